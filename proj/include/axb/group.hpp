#pragma once

#include <cmath>
#include <stdexcept>

// Core algebra and metric of the solvable group G = R^2 x| R^+ .
//
// An element is written x = (x1, x2, a) with a > 0.  The product is
//   (x1, x2, a) * (y1, y2, b) = (x1 + a*y1, x2 + a*y2, a*b),
// so a acts on the plane factor by dilation.  The group carries a right
// Haar measure  d rho = a^-1 dx1 dx2 da  and a left Haar measure
// d lambda = a^-3 dx1 dx2 da; the modular function is delta(x) = a^-2.
//
// The left-invariant Riemannian metric used throughout has the closed-form
// point-to-identity distance r(x) given by
//   cosh r(x) = (a + a^-1 + a^-1*|x|^2) / 2,   |x|^2 = x1^2 + x2^2,
// and d(x, y) = r(x^-1 y).  Balls grow exponentially: the measure of B(e, r)
// is pi*(sinh 2r - 2r) for either Haar measure.

namespace axb {

struct GroupElement {
    double x1 = 0.0;
    double x2 = 0.0;
    double a  = 1.0;
};

inline GroupElement identity() { return {0.0, 0.0, 1.0}; }

// Group product.  Throws std::range_error if the dilation coordinate of the
// result leaves (0, inf) (overflow/underflow) or an input is invalid.
GroupElement multiply(const GroupElement& x, const GroupElement& y);

// Group inverse: (x1, x2, a)^-1 = (-x1/a, -x2/a, 1/a).
GroupElement inverse(const GroupElement& x);

// Modular function delta(x) = a^-2 (d lambda = delta * d rho).
inline double modular_delta(const GroupElement& x) { return 1.0 / (x.a * x.a); }

// delta(x)^(1/2) = a^-1, the factor appearing in the kernel formulas.
inline double delta_sqrt(const GroupElement& x) { return 1.0 / x.a; }

// Distance to the identity.  The cosh formula can dip just below 1 from
// round-off; deficits up to 1e-12 are clamped, larger ones indicate a logic
// error upstream and raise std::domain_error.
double metric_radius(const GroupElement& x);

// Left-invariant distance d(x, y) = r(x^-1 y).
double distance(const GroupElement& x, const GroupElement& y);

}  // namespace axb
