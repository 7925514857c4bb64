#pragma once

#include <cstdint>
#include <random>

#include "axb/group.hpp"

// Seeded sampling helpers.  All mappings from raw 64-bit draws to doubles are
// done by hand so that streams are identical across standard libraries; the
// distributions in <random> leave that implementation-defined.

namespace axb {

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t bits() { return eng_(); }

    // Uniform in [0, 1) with 53 random bits.
    double u01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

    double log_uniform(double lo, double hi) {
        return std::exp(uniform(std::log(lo), std::log(hi)));
    }

    int uniform_int(int lo, int hi) {  // inclusive bounds
        return lo + static_cast<int>(eng_() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    // Element with log-uniform a in [a_lo, a_hi] and uniform plane coordinates.
    GroupElement element(double coord, double a_lo, double a_hi) {
        double x1 = uniform(-coord, coord);
        double x2 = uniform(-coord, coord);
        double a = log_uniform(a_lo, a_hi);
        return {x1, x2, a};
    }

    // Element at metric radius exactly r (up to round-off): pick the dilation
    // part u = ln a uniformly in (-r, r), then solve for |x| from
    // cosh r = (a + a^-1 + a^-1 |x|^2)/2 and spread x over a random angle.
    GroupElement element_at_radius(double r) {
        double u = uniform(-0.999, 0.999) * r;
        double a = std::exp(u);
        double m2 = 2.0 * a * std::cosh(r) - a * a - 1.0;
        double m = std::sqrt(m2 > 0.0 ? m2 : 0.0);
        double phi = uniform(0.0, 6.283185307179586);
        return {m * std::cos(phi), m * std::sin(phi), a};
    }

  private:
    std::mt19937_64 eng_;
};

// Stateless mixing for deriving independent per-task seeds from a base seed.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace axb
