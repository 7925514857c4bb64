#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "axb/group.hpp"
#include "axb/kernels.hpp"
#include "axb/region.hpp"

// Adaptive integration in exponential coordinates (x1, x2, u = ln a), where
// the right Haar measure has density 1 and the left Haar measure e^{-2u}.
// Every result carries a certificate: the accumulated two-level differences
// plus pruned-cell bounds in quad_error, and any mass outside the integrated
// region in tail_bound.

namespace axb {

enum class MeasureKind { Right, Left };

struct QuadratureSpec {
    int order = 8;        // Gauss-Legendre points per axis per cell
    int max_subdiv = 12;  // recursion depth cap
    int min_subdiv = 2;   // forced splits before the two-level test may accept
    double rel_tol = 1e-6;
    double abs_tol = 1e-12;
};

enum class TailKind {
    None,      // nothing was cut off
    Rigorous,  // tail_bound is a proved closed-form bound on the cut mass
    Heuristic  // tail_bound comes from a fitted envelope
};

struct Certificate {
    double value = 0.0;
    double quad_error = 0.0;  // two-level differences + pruned cells + clipping
    double tail_bound = 0.0;
    TailKind tail_kind = TailKind::None;
    bool converged = true;  // false if some cell hit max_subdiv before settling
};

// Gauss-Legendre rule on [-1, 1], cached per order (2..64).
const std::vector<double>& gl_nodes(int order);
const std::vector<double>& gl_weights(int order);

using Integrand3 = std::function<double(double x1, double x2, double u)>;
using ScalarFn = std::function<double(double)>;

Certificate integrate_box(const Integrand3& f, const BoxRegion& box, MeasureKind kind,
                          const QuadratureSpec& spec);
Certificate integrate_box_g(const std::function<double(const GroupElement&)>& f,
                            const BoxRegion& box, MeasureKind kind, const QuadratureSpec& spec);
Certificate integrate_interval(const ScalarFn& f, double lo, double hi,
                               const QuadratureSpec& spec);

// integral of f(r) * r * sinh(r) dr over [0, r_max]; r_max <= 690.
Certificate radial_profile_integral(const ScalarFn& f, double r_max, const QuadratureSpec& spec);

// Graded 1-D grid on [lo, hi]: each anchor interval is cut into n_core equal
// cells and the gaps between / outside anchors are filled with geometrically
// growing cells.  Returns sorted breakpoints including lo and hi.
std::vector<double> graded_axis(std::vector<std::pair<double, double>> anchors, double lo,
                                double hi, int n_core, double growth);

struct CoverResult {
    double value = 0.0;
    double quad_error = 0.0;  // adaptive errors + sum of pruned-cell bounds
    bool converged = true;
    long cells_done = 0;
    long cells_pruned = 0;
};

// Integrates f over the product grid of the three breakpoint lists.
// cell_bound(cell) must return an upper bound for sup |f| on the cell (the
// measure weight is handled internally); return a negative value to force
// evaluation.  Cells whose bound * weight * volume stays below skip_tol are
// pruned, with the bound folded into quad_error.  Summation order is fixed.
CoverResult integrate_cover(const Integrand3& f, MeasureKind kind,
                            const std::vector<double>& x1_breaks,
                            const std::vector<double>& x2_breaks,
                            const std::vector<double>& u_breaks,
                            const std::function<double(const BoxRegion&)>& cell_bound,
                            double skip_tol, const QuadratureSpec& spec);

// Total kernel mass: integral of p_t over the coordinate bounding box of
// B(e, R) plus the exact closed-form tail; quad_error includes a rigorous
// bound for the box-minus-ball overcount.  Expected to be 1 for any t.
Certificate kernel_mass(const KernelSpec& ks, double t, double R, const QuadratureSpec& spec);

// Measure of the ball B(e, r); identical for both Haar measures.  Computed as
// a 2-D integral of the x1-section width.  Exact value: pi*(sinh(2r) - 2r).
Certificate ball_volume(double r, MeasureKind kind, const QuadratureSpec& spec);

// (f * p_t)(x) = delta(x) * sum_i c_i * integral over box_i of p_t(x^-1 y) drho(y).
// Boxes are clipped to a metric ball around x when the exact mass tail allows;
// clipped-off mass and interior fast-path remainders go into quad_error.
Certificate convolve(const StepFunction& f, const KernelSpec& ks, double t,
                     const GroupElement& x, const QuadratureSpec& spec);

// (p_s * p_t)(x) over a graded cover of B(e, R), R sized from r(x), s, t;
// the cut-off mass is bounded by sup_{r>R} p_s (rigorous).  Comparing against
// p_{s+t}(x) checks the semigroup identity.
Certificate convolve_kernels(const KernelSpec& ks, double s, double t, const GroupElement& x,
                             const QuadratureSpec& spec);

// Cross-check of the radial reduction: integral of delta^{1/2} f(r(x)) drho
// against integral of f(r) r sinh(r) dr for five test profiles.  kappa is the
// mean ratio (expected 4*pi); throws std::runtime_error if the five ratios
// spread by more than 1%.
struct RadialCalibration {
    struct Row {
        const char* name;
        double direct;
        double radial;
        double ratio;
    };
    double kappa = 0.0;
    double spread = 0.0;
    std::vector<Row> rows;
};
RadialCalibration calibrate_radial_constant(const QuadratureSpec& spec);

}  // namespace axb
