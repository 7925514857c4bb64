#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "axb/group.hpp"
#include "axb/quadrature.hpp"
#include "axb/region.hpp"

// Admissible sets, atoms, atomic decompositions of the two-box difference
// family, mean oscillation, the duality pairing, and the integrable function
// whose pairing against clamped logarithms diverges.

namespace axb {

// Square base of side L around (x1, x2), log-height interval of half-width r
// around a.  Admissible when the side is comparable to the metric size of
// the height interval (branch inequalities below).
struct CZSet {
    GroupElement center;
    double L = 1.0;
    double r = 1.0;

    BoxRegion box() const;
    double rho() const;  // 2 r L^2
    bool admissible() const;
    CZSet translated(const GroupElement& z) const;
};

// r < 1: e^2 a r <= L < e^8 a r;  r >= 1: a e^{2r} <= L < a e^{8r}.
bool cz_admissible(const GroupElement& center, double L, double r);

// Canonical admissible set containing the box: centered at the box center
// with the geometric-mean height, r at least the half log-height, side
// inflated to meet the admissibility window.  Deterministic.
CZSet cz_superset(const BoxRegion& box);

// Covering box for the metric r-neighborhood {x : d(x, R.box()) < R.r}.
BoxRegion dilate_cover(const CZSet& R);

// Samples admissible sets across scales and returns the largest of
// rho(cover) / rho(set) and (farthest corner distance) / r seen.  Both stay
// bounded by constants of the geometry and are left-translation invariant.
double dilation_constant_estimate(int samples = 200, std::uint64_t seed = 2026);

struct Atom {
    StepFunction values;
    CZSet support;
};

struct AtomReport {
    bool support_ok = false;  // every value box inside the declared set
    bool sup_ok = false;      // sup norm within 1/rho(support)
    bool mean_ok = false;     // integral zero up to 1e-12 of the L1 norm
    double sup_norm = 0.0;
    double sup_limit = 0.0;
    double mean_abs = 0.0;
    double mean_limit = 0.0;
    bool pass() const { return support_ok && sup_ok && mean_ok; }
};

AtomReport validate_atom(const Atom& a);

// chi over the unit box translated to (L, 0, 1) minus chi over the unit box
// at the identity; mean zero exactly, sup norm 1.  Throws for L <= 2.
StepFunction make_fL(double L);

struct AtomicDecomposition {
    std::vector<double> lambda;  // positive weights
    std::vector<Atom> atoms;

    double lambda_sum() const;
    // sum of lambda_j * atom_j as one step function; identical boxes merged
    // by coefficient so telescoping terms cancel exactly.
    StepFunction reconstruct() const;
};

// Writes make_fL(L) as a chain of 2J+1 atoms, J = floor(ln L / 2), climbing
// in height from both ends and bridged at the top.  Exact reconstruction.
AtomicDecomposition decompose_fL(double L);

using ScalarField = std::function<double(const GroupElement&)>;

inline double g_log(const GroupElement& x) { return std::log(std::fabs(x.x1)); }

// (1/rho(R)) * integral over R of |g - mean_R(g)|.
double mean_oscillation(const ScalarField& g, const CZSet& R, const QuadratureSpec& q);

// integral of g * f, per-box adaptive quadrature.
double pairing(const ScalarField& g, const StepFunction& f, const QuadratureSpec& q);

// pairing(g_log, make_fL(L)) in closed form:
// 4 [(L+1) ln(L+1) - (L-1) ln(L-1) - 2] + 8.
double log_pairing_fL(double L);

struct ResidualReport {
    double sup_residual = 0.0;  // max over the k-th cell of |density - mean|
    double ratio = 0.0;         // sup_residual * k^2
    AtomReport atom;            // discretized, mean-corrected, rescaled cell
    bool pass(double c_hat) const { return ratio <= c_hat && atom.pass(); }
};

// Density 1/(x1 ln^{3/2} x1) on {x1 > 3, |x2| < 1, 1/e < a < e}, balanced by
// the constant c0 on the unit box so the total integral vanishes.  The cells
// R_{2k} = [2k-1, 2k+1] x [-1,1] x [1/e, e] tile the strip.
class CounterexampleSuite {
  public:
    explicit CounterexampleSuite(const QuadratureSpec& q);

    double c0() const { return c0_; }
    double value(const GroupElement& x) const;

    // g_log clamped to [-N, N]
    ScalarField g_clamped(double N) const;

    // mean of the density over the k-th cell, k >= 2
    double coefficient(int k) const;

    // sum over k = 2..K of coefficient(k) * make_fL(2k), merged; mean zero
    StepFunction f_tilde(int K) const;

    // integral of g_clamped(N) * value, unbounded parts by substitution with
    // exact remainders past the clamp
    double pairing_g_clamped(double N) const;

    // sup of |density - coefficient(k)| over the k-th cell scales like k^-2,
    // and the mean-corrected rescaled cell restriction is an atom
    ResidualReport residual_check(int k) const;

  private:
    QuadratureSpec q_;
    double c0_ = 0.0;
};

}  // namespace axb
