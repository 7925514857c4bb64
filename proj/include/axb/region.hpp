#pragma once

#include <vector>

#include "axb/group.hpp"

// Coordinate boxes and box-supported step functions.  A BoxRegion is a
// product [x1_lo,x1_hi] x [x2_lo,x2_hi] x [a_lo,a_hi] in the global
// coordinates; left translation by any group element maps boxes to boxes.

namespace axb {

struct BoxRegion {
    double x1_lo = 0, x1_hi = 0;
    double x2_lo = 0, x2_hi = 0;
    double a_lo = 1, a_hi = 1;

    double u_lo() const;  // ln a_lo
    double u_hi() const;

    // Right Haar measure: area * log-height.
    double rho() const;
    // Left Haar measure: area * (a_lo^-2 - a_hi^-2)/2.
    double lambda() const;

    bool contains(const GroupElement& g) const;
    bool empty() const { return x1_lo >= x1_hi || x2_lo >= x2_hi || a_lo >= a_hi; }

    // Image z * B under left translation (again a box).
    BoxRegion translated(const GroupElement& z) const;

    static BoxRegion intersection(const BoxRegion& p, const BoxRegion& q);
};

// Exact distance from a point to a box: the plane offset reduces to a
// Euclidean clamp, after which cosh d(x, box) = (a^2 + b^2 + D^2) / (2ab) is
// minimized over the a-interval at b = clamp(sqrt(a^2 + D^2)).
double box_distance(const GroupElement& x, const BoxRegion& box);

// Finite linear combination of box indicators.  Boxes must have pairwise
// disjoint interiors.
struct StepFunction {
    std::vector<BoxRegion> boxes;
    std::vector<double> coef;

    std::size_t size() const { return boxes.size(); }
    double value_at(const GroupElement& g) const;
    double integral_rho() const;  // sum of coef * rho(box), exact
    double l1_norm() const;       // sum of |coef| * rho(box)
    double sup_norm() const;
    BoxRegion support_bounds() const;
    StepFunction translated(const GroupElement& z) const;  // f(z^-1 .) with no weight
    StepFunction scaled(double s) const;

    // Throws std::invalid_argument if two boxes overlap in the interior.
    void check_disjoint() const;
};

// max over elementary cells of |f - g| (the common refinement of both box
// families); exact coefficient algebra, no quadrature.
double step_difference_max(const StepFunction& f, const StepFunction& g);

}  // namespace axb
