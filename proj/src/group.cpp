#include "axb/group.hpp"

namespace axb {

GroupElement multiply(const GroupElement& x, const GroupElement& y) {
    GroupElement z{x.x1 + x.a * y.x1, x.x2 + x.a * y.x2, x.a * y.a};
    if (!(z.a > 0.0) || !std::isfinite(z.a) ||
        !std::isfinite(z.x1) || !std::isfinite(z.x2)) {
        throw std::range_error("multiply: dilation coordinate left (0, inf)");
    }
    return z;
}

GroupElement inverse(const GroupElement& x) {
    if (!(x.a > 0.0)) throw std::range_error("inverse: dilation coordinate must be positive");
    return {-x.x1 / x.a, -x.x2 / x.a, 1.0 / x.a};
}

double metric_radius(const GroupElement& x) {
    if (!(x.a > 0.0)) throw std::range_error("metric_radius: dilation coordinate must be positive");
    const double m2 = x.x1 * x.x1 + x.x2 * x.x2;
    const double c = 0.5 * (x.a + (1.0 + m2) / x.a);
    if (c < 1.0) {
        // Round-off can only shave a few ulp off cosh r >= 1.
        if (c < 1.0 - 1e-12) throw std::domain_error("metric_radius: cosh r below 1 beyond round-off");
        return 0.0;
    }
    return std::acosh(c);
}

double distance(const GroupElement& x, const GroupElement& y) {
    return metric_radius(multiply(inverse(x), y));
}

}  // namespace axb
