#include "axb/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "axb/rng.hpp"

namespace axb {

namespace {

constexpr double kPi = std::numbers::pi;

// r/sinh r with the removable singularity patched by its Taylor expansion.
double sinh_ratio(double r) {
    if (r < 1e-4) return 1.0 - r * r / 6.0;
    return r / std::sinh(r);
}

double profile(const KernelSpec& spec, double t, double r) {
    if (spec.kind == KernelKind::Heat) {
        return std::pow(t, -1.5) * std::exp(-r * r / (4.0 * t));
    }
    double q = t * t + r * r;
    return t / (q * q);
}

}  // namespace

KernelSpec heat_kernel() { return {KernelKind::Heat, 1.0 / (8.0 * std::pow(kPi, 1.5))}; }
KernelSpec poisson_kernel() { return {KernelKind::Poisson, 1.0 / (kPi * kPi)}; }

double kernel_value(const KernelSpec& spec, double t, const GroupElement& x) {
    if (!(t > 0.0)) throw std::domain_error("kernel_value: t must be positive");
    double r = metric_radius(x);
    return spec.c0 * delta_sqrt(x) * sinh_ratio(r) * profile(spec, t, r);
}

double kernel_radial_part(const KernelSpec& spec, double t, double r) {
    if (!(t > 0.0)) throw std::domain_error("kernel_radial_part: t must be positive");
    return spec.c0 * sinh_ratio(r) * profile(spec, t, r);
}

KernelSup kernel_sup_t(const KernelSpec& spec, const GroupElement& x) {
    double r = metric_radius(x);
    if (!(r > 0.0)) throw std::domain_error("kernel_sup_t: sup over t diverges at the identity");
    double base = spec.c0 * delta_sqrt(x) * sinh_ratio(r) / (r * r * r);
    if (spec.kind == KernelKind::Heat) {
        return {r * r / 6.0, base * std::pow(6.0 / std::numbers::e, 1.5)};
    }
    return {r / std::sqrt(3.0), base * 3.0 * std::sqrt(3.0) / 16.0};
}

std::array<double, 3> kernel_grad(const KernelSpec& spec, double t, const GroupElement& x) {
    if (spec.kind != KernelKind::Heat)
        throw std::invalid_argument("kernel_grad: only the heat kernel has derivative formulas here");
    if (!(t > 0.0)) throw std::domain_error("kernel_grad: t must be positive");
    double r = metric_radius(x);
    if (r <= 1e-6)
        throw std::domain_error("kernel_grad: formulas refused for r <= 1e-6");
    double p = kernel_value(spec, t, x);
    double S = std::sinh(r), C = std::cosh(r);
    double plane = (1.0 / r - C / S - r / (2.0 * t)) / S;
    double g0 = (x.a - C) / (r * S) + (1.0 - x.a * C) / (S * S) +
                (r / (2.0 * t)) * (C - x.a) / S;
    return {p * g0, p * plane * x.x1, p * plane * x.x2};
}

GradSup kernel_grad_sup_t(const KernelSpec& spec, const GroupElement& x,
                          double t_lo, double t_hi, int grid, int refine) {
    auto eval = [&](double t) {
        auto g = kernel_grad(spec, t, x);
        double pn = std::hypot(g[1], g[2]);
        return std::array<double, 3>{std::hypot(pn, g[0]), pn, std::abs(g[0])};
    };
    // Independent grid maxima for the full norm, the plane part and X0.
    double llo = std::log(t_lo), lhi = std::log(t_hi);
    std::array<double, 3> best{0, 0, 0};
    std::array<double, 3> best_l{llo, llo, llo};
    for (int i = 0; i < grid; ++i) {
        double l = llo + (lhi - llo) * i / (grid - 1);
        auto v = eval(std::exp(l));
        for (int k = 0; k < 3; ++k)
            if (v[k] > best[k]) { best[k] = v[k]; best_l[k] = l; }
    }
    double step = (lhi - llo) / (grid - 1);
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    std::array<double, 3> refined = best;
    std::array<double, 3> arg_l = best_l;
    for (int k = 0; k < 3; ++k) {
        double lo = std::max(llo, best_l[k] - step), hi = std::min(lhi, best_l[k] + step);
        double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
        double fc = eval(std::exp(c))[k], fd = eval(std::exp(d))[k];
        for (int it = 0; it < refine; ++it) {
            if (fc > fd) {
                hi = d; d = c; fd = fc;
                c = hi - gr * (hi - lo); fc = eval(std::exp(c))[k];
            } else {
                lo = c; c = d; fc = fd;
                d = lo + gr * (hi - lo); fd = eval(std::exp(d))[k];
            }
        }
        double l = 0.5 * (lo + hi), f = eval(std::exp(l))[k];
        if (f > refined[k]) { refined[k] = f; arg_l[k] = l; }
    }
    return {std::exp(arg_l[0]), refined[0], refined[1], refined[2]};
}

namespace {

// Shapes of the three envelope pieces (without constants).
double shape_inner(double r) { return 1.0 / (r * r * r * r); }
double shape_plane(const GroupElement& x, double r) {
    double m = std::hypot(x.x1, x.x2);
    double ch = std::cosh(r);
    return (1.0 + m / x.a) / (r * r * ch * ch);
}
double shape_x0(const GroupElement& x, double r) {
    double ch = std::cosh(r);
    return 1.0 / (x.a * r * r * r * ch) + 1.0 / (r * r * ch * ch);
}

// Deterministic offsets covering B(e, s): the center plus axis points and
// diagonal points at radii s/2 and s.
std::vector<GroupElement> ball_probe_points(double s) {
    std::vector<GroupElement> pts;
    pts.push_back(identity());
    for (double f : {0.5, 1.0}) {
        double rr = s * f * 0.98;
        double ch = std::cosh(rr);
        for (int dir = 0; dir < 6; ++dir) {
            double u = (dir == 4) ? rr * 0.98 : (dir == 5 ? -rr * 0.98 : rr * 0.3 * ((dir & 1) ? -1 : 1));
            double a = std::exp(u);
            double m2 = std::max(0.0, 2.0 * a * ch - a * a - 1.0);
            double m = std::sqrt(m2);
            double ang = 0.25 * kPi * dir;
            pts.push_back({m * std::cos(ang), m * std::sin(ang), a});
        }
    }
    return pts;
}

}  // namespace

GradBoundFit fit_grad_bounds(const KernelSpec& spec, double r1, double safety,
                             int samples, std::uint64_t seed) {
    if (spec.kind != KernelKind::Heat)
        throw std::invalid_argument("fit_grad_bounds: heat kernel only");
    GradBoundFit fit;
    fit.r1 = r1;
    fit.safety = safety;
    auto probes = ball_probe_points(r1 / 2.0);
    double m3 = 0.0, m4 = 0.0, m5 = 0.0;
    Rng rng(seed);
    for (int i = 0; i < samples; ++i) {
        bool inner = (i % 2 == 0);
        double r = inner ? rng.uniform(r1, 1.0) : rng.log_uniform(1.0, 25.0);
        GroupElement x = rng.element_at_radius(r);
        double g_norm = 0.0, g_plane = 0.0, g_x0 = 0.0;
        for (const auto& z : probes) {
            GroupElement y = multiply(x, z);
            if (metric_radius(y) <= 1e-5) continue;
            auto s = kernel_grad_sup_t(spec, y);
            g_norm = std::max(g_norm, s.norm);
            g_plane = std::max(g_plane, s.plane_norm);
            g_x0 = std::max(g_x0, s.x0_abs);
        }
        if (inner) {
            m3 = std::max(m3, g_norm / shape_inner(r));
        } else {
            m4 = std::max(m4, g_plane / shape_plane(x, r));
            m5 = std::max(m5, g_x0 / shape_x0(x, r));
        }
    }
    fit.c3 = m3 * safety;
    fit.c4 = m4 * safety;
    fit.c5 = m5 * safety;
    return fit;
}

double grad_envelope(const GradBoundFit& fit, const GroupElement& x) {
    if (!fit.calibrated()) throw std::logic_error("grad_envelope: fit has no calibrated constants");
    double r = metric_radius(x);
    if (r < fit.r1) throw std::domain_error("grad_envelope: r(x) below the fitted r1");
    if (r < 1.0) return fit.c3 * shape_inner(r);
    return fit.c4 * shape_plane(x, r) + fit.c5 * shape_x0(x, r);
}

double kernel_mass_tail(const KernelSpec& spec, double t, double R) {
    if (!(t > 0.0) || R < 0.0) throw std::domain_error("kernel_mass_tail: bad arguments");
    if (spec.kind == KernelKind::Heat) {
        // 4 pi c0 t^(-3/2) * int_R^inf r^2 exp(-r^2/4t) dr
        double I = 2.0 * t * R * std::exp(-R * R / (4.0 * t)) +
                   0.25 * std::sqrt(kPi) * std::pow(4.0 * t, 1.5) * std::erfc(R / (2.0 * std::sqrt(t)));
        return 4.0 * kPi * spec.c0 * std::pow(t, -1.5) * I;
    }
    // 4 pi c0 t * int_R^inf r^2 / (t^2 + r^2)^2 dr
    double J = R / (2.0 * (t * t + R * R)) + (0.5 / t) * (kPi / 2.0 - std::atan(R / t));
    return 4.0 * kPi * spec.c0 * t * J;
}

}  // namespace axb
