#include "axb/region.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace axb {

double BoxRegion::u_lo() const { return std::log(a_lo); }
double BoxRegion::u_hi() const { return std::log(a_hi); }

double BoxRegion::rho() const {
    if (empty()) return 0.0;
    return (x1_hi - x1_lo) * (x2_hi - x2_lo) * std::log(a_hi / a_lo);
}

double BoxRegion::lambda() const {
    if (empty()) return 0.0;
    double h = 0.5 * (1.0 / (a_lo * a_lo) - 1.0 / (a_hi * a_hi));
    return (x1_hi - x1_lo) * (x2_hi - x2_lo) * h;
}

bool BoxRegion::contains(const GroupElement& g) const {
    return g.x1 >= x1_lo && g.x1 <= x1_hi && g.x2 >= x2_lo && g.x2 <= x2_hi &&
           g.a >= a_lo && g.a <= a_hi;
}

BoxRegion BoxRegion::translated(const GroupElement& z) const {
    // z * (y1, y2, b) = (z1 + z_a y1, z2 + z_a y2, z_a b), so each axis maps
    // affinely and the box stays a box (z_a > 0 preserves orientation).
    BoxRegion r;
    r.x1_lo = z.x1 + z.a * x1_lo;
    r.x1_hi = z.x1 + z.a * x1_hi;
    r.x2_lo = z.x2 + z.a * x2_lo;
    r.x2_hi = z.x2 + z.a * x2_hi;
    r.a_lo = z.a * a_lo;
    r.a_hi = z.a * a_hi;
    return r;
}

BoxRegion BoxRegion::intersection(const BoxRegion& p, const BoxRegion& q) {
    BoxRegion r;
    r.x1_lo = std::max(p.x1_lo, q.x1_lo);
    r.x1_hi = std::min(p.x1_hi, q.x1_hi);
    r.x2_lo = std::max(p.x2_lo, q.x2_lo);
    r.x2_hi = std::min(p.x2_hi, q.x2_hi);
    r.a_lo = std::max(p.a_lo, q.a_lo);
    r.a_hi = std::min(p.a_hi, q.a_hi);
    return r;
}

double box_distance(const GroupElement& x, const BoxRegion& box) {
    if (box.empty()) throw std::invalid_argument("box_distance: empty box");
    if (box.contains(x)) return 0.0;
    // Plane offset of x^-1 y has squared norm (y - x)^2 / a^2; minimizing the
    // numerator over the rectangle is a per-axis clamp.
    double d1 = std::max({box.x1_lo - x.x1, x.x1 - box.x1_hi, 0.0});
    double d2 = std::max({box.x2_lo - x.x2, x.x2 - box.x2_hi, 0.0});
    double dd = d1 * d1 + d2 * d2;
    // cosh d = (a^2 + b^2 + D^2) / (2ab) over b in the a-interval; the
    // unconstrained minimizer is b = sqrt(a^2 + D^2).
    double bstar = std::clamp(std::sqrt(x.a * x.a + dd), box.a_lo, box.a_hi);
    double c = (x.a * x.a + bstar * bstar + dd) / (2.0 * x.a * bstar);
    return std::acosh(std::max(1.0, c));
}

double StepFunction::value_at(const GroupElement& g) const {
    for (std::size_t i = 0; i < boxes.size(); ++i)
        if (boxes[i].contains(g)) return coef[i];
    return 0.0;
}

double StepFunction::integral_rho() const {
    double s = 0.0;
    for (std::size_t i = 0; i < boxes.size(); ++i) s += coef[i] * boxes[i].rho();
    return s;
}

double StepFunction::l1_norm() const {
    double s = 0.0;
    for (std::size_t i = 0; i < boxes.size(); ++i) s += std::abs(coef[i]) * boxes[i].rho();
    return s;
}

double StepFunction::sup_norm() const {
    double m = 0.0;
    for (double c : coef) m = std::max(m, std::abs(c));
    return m;
}

BoxRegion StepFunction::support_bounds() const {
    if (boxes.empty()) throw std::invalid_argument("support_bounds: empty step function");
    BoxRegion r = boxes[0];
    for (const BoxRegion& b : boxes) {
        r.x1_lo = std::min(r.x1_lo, b.x1_lo);
        r.x1_hi = std::max(r.x1_hi, b.x1_hi);
        r.x2_lo = std::min(r.x2_lo, b.x2_lo);
        r.x2_hi = std::max(r.x2_hi, b.x2_hi);
        r.a_lo = std::min(r.a_lo, b.a_lo);
        r.a_hi = std::max(r.a_hi, b.a_hi);
    }
    return r;
}

StepFunction StepFunction::translated(const GroupElement& z) const {
    StepFunction g;
    g.coef = coef;
    g.boxes.reserve(boxes.size());
    for (const BoxRegion& b : boxes) g.boxes.push_back(b.translated(z));
    return g;
}

StepFunction StepFunction::scaled(double s) const {
    StepFunction g = *this;
    for (double& c : g.coef) c *= s;
    return g;
}

void StepFunction::check_disjoint() const {
    for (std::size_t i = 0; i < boxes.size(); ++i)
        for (std::size_t j = i + 1; j < boxes.size(); ++j)
            if (!BoxRegion::intersection(boxes[i], boxes[j]).empty())
                throw std::invalid_argument("StepFunction: boxes overlap");
}

namespace {

std::vector<double> merged_breaks(const StepFunction& f, const StepFunction& g, int axis) {
    std::set<double> s;
    auto add = [&](const BoxRegion& b) {
        switch (axis) {
            case 0: s.insert(b.x1_lo); s.insert(b.x1_hi); break;
            case 1: s.insert(b.x2_lo); s.insert(b.x2_hi); break;
            default: s.insert(b.a_lo); s.insert(b.a_hi); break;
        }
    };
    for (const BoxRegion& b : f.boxes) add(b);
    for (const BoxRegion& b : g.boxes) add(b);
    return {s.begin(), s.end()};
}

}  // namespace

double step_difference_max(const StepFunction& f, const StepFunction& g) {
    std::vector<double> b1 = merged_breaks(f, g, 0);
    std::vector<double> b2 = merged_breaks(f, g, 1);
    std::vector<double> b3 = merged_breaks(f, g, 2);
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < b1.size(); ++i)
        for (std::size_t j = 0; j + 1 < b2.size(); ++j)
            for (std::size_t k = 0; k + 1 < b3.size(); ++k) {
                GroupElement c{0.5 * (b1[i] + b1[i + 1]), 0.5 * (b2[j] + b2[j + 1]),
                               std::sqrt(b3[k] * b3[k + 1])};
                worst = std::max(worst, std::abs(f.value_at(c) - g.value_at(c)));
            }
    return worst;
}

}  // namespace axb
