#pragma once

#include <array>
#include <cstdint>

#include "axb/group.hpp"

// Closed-form heat and Poisson kernels on G and pointwise bounds for their
// left-invariant derivatives.
//
// Both kernels are radial up to the modular weight:
//   p_t(x) = c0 * delta^(1/2)(x) * (r / sinh r) * profile_t(r),  r = r(x),
// with
//   heat:    c0 = 1 / (8 pi^(3/2)),  profile_t(r) = t^(-3/2) exp(-r^2 / 4t)
//   poisson: c0 = 1 / pi^2,          profile_t(r) = t / (t^2 + r^2)^2.
// The factor r/sinh r has a removable singularity at r = 0; below r = 1e-4 it
// is evaluated by the two-term Taylor expansion 1 - r^2/6.

namespace axb {

enum class KernelKind : std::uint8_t { Heat, Poisson };

struct KernelSpec {
    KernelKind kind = KernelKind::Heat;
    double c0 = 0.0;  // normalizing constant; the factory functions set it
};

KernelSpec heat_kernel();
KernelSpec poisson_kernel();

// Kernel value p_t(x) (or q_t(x)).  Requires t > 0.
double kernel_value(const KernelSpec& spec, double t, const GroupElement& x);

// The radial factor c0 * (r/sinh r) * profile_t(r), so that
// p_t(x) = delta^(1/2)(x) * kernel_radial_part(spec, t, r(x)).  Decreasing in
// r, which makes it usable as a sup bound over regions at distance >= r.
double kernel_radial_part(const KernelSpec& spec, double t, double r);

// Value of sup_{t>0} p_t(x) together with the maximizing time.  The profiles
// are unimodal in t with closed-form maximizers:
//   heat:    t* = r^2/6,     sup = c0 delta^(1/2) (r/sinh r) (6/e)^(3/2) r^-3
//   poisson: t* = r/sqrt(3), sup = c0 delta^(1/2) (r/sinh r) (3 sqrt 3/16) r^-3.
// Requires r(x) > 0 (the sup diverges at the identity).
struct KernelSup {
    double t_star = 0.0;
    double value = 0.0;
};
KernelSup kernel_sup_t(const KernelSpec& spec, const GroupElement& x);

// Left-invariant derivatives (X0, X1, X2) p_t(x) of the heat kernel, where
// X0 = a d/da, X1 = a d/dx1, X2 = a d/dx2.  With S = sinh r, C = cosh r:
//   Xi p_t = p_t * (xi/S) * (1/r - C/S - r/2t),          i = 1, 2
//   X0 p_t = p_t * ( (a-C)/(rS) + (1 - aC)/S^2 + (r/2t)(C-a)/S ).
// Only the heat kernel is supported.  Requires r(x) > 1e-6: closer to the
// identity the (a - cosh r) cancellations make the formulas meaningless in
// double precision.
std::array<double, 3> kernel_grad(const KernelSpec& spec, double t, const GroupElement& x);

// sup over t > 0 of |grad p_t(x)| (Euclidean norm of the three derivatives),
// located by a log-spaced t-grid plus golden-section refinement.  The time
// profile of each component is a product of the Gaussian profile with a
// factor linear in 1/t, so a single component can have two humps; the grid
// is what guards against missing one.
struct GradSup {
    double t_star = 0.0;
    double norm = 0.0;       // |(X0, X1, X2) p_t|
    double plane_norm = 0.0; // |(X1, X2) p_t| at its own maximizing t
    double x0_abs = 0.0;     // |X0 p_t| at its own maximizing t
};
GradSup kernel_grad_sup_t(const KernelSpec& spec, const GroupElement& x,
                          double t_lo = 1e-6, double t_hi = 1e6,
                          int grid = 64, int refine = 32);

// Fitted constants for the closed-shape envelopes of
//   G(x) = sup over the ball B(x, r1/2) of sup_t |grad p_t|.
// Shapes (everything evaluated at r = r(x), |x| the plane norm):
//   inside B(e,1) minus B(e,r1):  c3 * r^-4
//   outside B(e,1), plane part:   c4 * (1 + |x|/a) / (r^2 cosh^2 r)
//   outside B(e,1), X0 part:      c5 * ( 1/(a r^3 cosh r) + 1/(r^2 cosh^2 r) ).
// The constants are empirical maxima of ratio samples times the safety
// factor; the envelope is a calibrated certificate, not a proven bound.
struct GradBoundFit {
    double r1 = 0.0;
    double c3 = 0.0;
    double c4 = 0.0;
    double c5 = 0.0;
    double safety = 0.0;
    double c_fL = 0.0;   // constant for the two-box tail shape, fitted separately
    double c_mvt = 0.0;  // constant for the mean-zero tail route, fitted separately
    bool calibrated() const { return c3 > 0.0 && c4 > 0.0 && c5 > 0.0; }
};

// Fits c3, c4, c5 on seeded samples (ratio maxima times `safety`).
GradBoundFit fit_grad_bounds(const KernelSpec& spec, double r1, double safety,
                             int samples, std::uint64_t seed);

// Envelope described above.  Requires fit.calibrated() and r(x) >= r1.
double grad_envelope(const GradBoundFit& fit, const GroupElement& x);

// Exact mass tails: integral of the kernel over {r(x) > R} with respect to
// the right Haar measure, by the radial identity
//   int delta^(1/2) f(r(x)) d rho(x) = 4 pi * int_0^inf f(r) r sinh r dr,
// under which (r/sinh r) profile_t(r) integrates in closed form (erfc /
// arctan).  R = 0 gives the total mass (equal to 1 for both kernels).
double kernel_mass_tail(const KernelSpec& spec, double t, double R);

}  // namespace axb
