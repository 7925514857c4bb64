#pragma once

#include <cstdint>
#include <functional>

#include "axb/group.hpp"
#include "axb/kernels.hpp"
#include "axb/quadrature.hpp"
#include "axb/region.hpp"

// The maximal function M f(x) = sup_{t>0} |f * p_t(x)|, evaluated pointwise
// by a search over t and in L^1 by a graded midpoint grid with closed-form
// pruning bounds and a fitted far-field tail.

namespace axb {

// Search window and effort for the sup over t.  The profiles t -> p_t(x) are
// unimodal for a single box at distance r, so a log grid localizes the
// maximum and golden-section refinement sharpens it; the grid is what guards
// against the finitely many extra humps a multi-box f can create.
struct SupSearchSpec {
    double t_min = 1e-6;
    double t_max = 1e6;
    int grid = 48;    // log-spaced probe points, >= 8
    int refine = 40;  // golden-section iterations around the best probe
};

struct MaximalValue {
    double value = 0.0;
    double t_star = 0.0;  // the t realizing the reported sup
};

// sup_t |f * p_t(x)|.  The lower end of the t-window is raised to
// 1e-4 * d(x, supp f)^2 since below that the kernel cannot reach the support
// with any mass; keeps the grid spent on the informative decades.
MaximalValue maximal_at(const StepFunction& f, const GroupElement& x, const SupSearchSpec& s,
                        const QuadratureSpec& q, const KernelSpec& ks = heat_kernel());

// Closed-form upper bound for M chi_R(x) at d(x, R) >= 1 (heat kernel):
//   M chi_R(x) <= sup_t p_t envelope = c0 (6/e)^{3/2} delta^{1/2}(z) /
//                                      (r^2 sinh r)   at z = x^{-1}y,
// integrated exactly in y over R:
//   bound = c0 (6/e)^{3/2} delta^{1/2}(x) * S(R) * d^{-2} / sinh d,
// with d = d(x, R) and S(R) = integral of delta^{1/2} over R d rho
// = area(R) * (1/a_lo - 1/a_hi).  Throws std::domain_error if d(x, R) < 1.
double indicator_sup_bound(const GroupElement& x, const BoxRegion& R);

// Far-field bound for the two-box difference function with separation L:
//   fit.c_fL * (L^3 / a^2) * (L + |x|) / (r^2 sinh^2 r),   r = r(x).
// Valid (and enforced) only for r(x) >= (ln L)^2; the constant is fitted, so
// certificates built from this are heuristic.
double fL_tail_bound(double L, const GroupElement& x, const GradBoundFit& fit);

// Fits the constant for fL_tail_bound: max over sampled far points and
// separations of maximal_at / shape, times `safety`.  Deterministic for a
// fixed seed.
double fit_fL_constant(const SupSearchSpec& s, const QuadratureSpec& q, int samples,
                       std::uint64_t seed, double safety);

// Fits the constant for the mean-value tail route used by maximal_l1:
//   M f(x) <= c_mvt * |f|_1 * diam(supp f) * delta(x) * G(x^{-1})
// for mean-zero f supported near e, where G is the fitted gradient envelope.
// Ratio maximum over a sampled ring, times `safety`.
double fit_mvt_constant(const GradBoundFit& fit, const SupSearchSpec& s, const QuadratureSpec& q,
                        int samples, std::uint64_t seed, double safety);

// Integral of 2 pi m * density(m, u) over the shell
// { r_in < r(x) <= r_in + reach } for axisymmetric densities in the
// cylindrical coordinates (m, u) = (plane norm, ln a); the standing
// reduction for radial-ish far-field bounds.  Exact region via the (r, u)
// change of variables, composite fixed-order panels.
double far_region_integral(double r_in, double reach,
                           const std::function<double(double m, double u)>& density);

struct L1Report {
    double inner = 0.0;       // midpoint-rule integral of M f over the grid
    double tail = 0.0;        // bound for the mass outside the grid ball
    TailKind tail_kind = TailKind::Heuristic;
    double pruned_bound = 0.0;  // total surrendered by pruned cells
    long cells_evaluated = 0;
    long cells_pruned = 0;
    double r_max = 0.0;  // radius of the computation ball around the support
    int n_core = 0;      // grid cells per support-anchor interval
    bool mean_zero_warning = false;  // set when |f| integral does not cancel

    // Upper estimate: grid value plus the far tail plus what pruning gave up.
    double total() const { return inner + tail + pruned_bound; }
};

// Integral of M f over B(c, r_max), c the support center, by midpoint
// evaluation on a graded product grid anchored at the support boxes, plus a
// fitted tail bound outside the ball (infinite when f has no cancellation:
// the indicator bound alone integrates like log R).  r_max defaults to
// max(8, 1.3 * support radius + 3) and to max(10, 1.2 (ln L_hint)^2) when
// L_hint > 2 marks the two-box family.  Cells are processed in a fixed
// order; `threads` only distributes the per-cell work.
L1Report maximal_l1(const StepFunction& f, double L_hint, const SupSearchSpec& s,
                    const QuadratureSpec& q, const GradBoundFit& fit,
                    const KernelSpec& ks = heat_kernel(), int n_core = 6, int threads = 1);

}  // namespace axb
