#include "axb/kernels.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "axb/rng.hpp"
#include "test_harness.hpp"

using namespace axb;

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

// flows used for finite differences: multiply on the right by the coordinate
// one-parameter subgroups
GroupElement flow(const GroupElement& x, int dir, double h) {
    switch (dir) {
        case 1: return multiply(x, GroupElement{h, 0.0, 1.0});
        case 2: return multiply(x, GroupElement{0.0, h, 1.0});
        default: return multiply(x, GroupElement{0.0, 0.0, std::exp(h)});
    }
}

}  // namespace

int main() {
    KernelSpec heat = heat_kernel();
    KernelSpec poisson = poisson_kernel();
    Rng rng(77120011);

    {
        record("heat normalizing constant",
               std::abs(heat.c0 - 0.02244839026564582) < 1e-16);
        record("poisson normalizing constant",
               std::abs(poisson.c0 - 0.10132118364233777) < 1e-16);
        GroupElement x{1.0, 1.0, 2.0};
        record("heat kernel spot value",
               std::abs(kernel_value(heat, 0.5, x) - 0.013089446318851185) < 1e-15);
        record("poisson kernel spot value",
               std::abs(kernel_value(poisson, 2.0, x) - 0.0028639871955704491) < 1e-16);
        record("heat kernel at identity, t=1",
               std::abs(kernel_value(heat, 1.0, identity()) - heat.c0) < 1e-18);
    }

    {
        // p_t(x^-1) = delta(x)^-1 p_t(x), the compatibility that makes the
        // two convolution normalizations agree
        bool ok = true;
        double worst = 0.0;
        for (int i = 0; i < 5000 && ok; ++i) {
            GroupElement x = rng.element(50.0, 1e-2, 1e2);
            double t = rng.log_uniform(1e-2, 1e2);
            for (const KernelSpec& ks : {heat, poisson}) {
                double lhs = kernel_value(ks, t, inverse(x));
                double rhs = kernel_value(ks, t, x) / modular_delta(x);
                // below ~1e-290 the values sink toward subnormals, where
                // doubles cannot represent a relative comparison
                if (std::max(lhs, rhs) < 1e-290) continue;
                double rel = std::abs(lhs - rhs) / std::max(lhs, rhs);
                worst = std::max(worst, rel);
                ok = ok && rel <= 1e-12;
            }
        }
        record("inversion identity p_t(x^-1) = p_t(x)/delta(x)", ok, "worst rel " + fmt(worst));
    }

    {
        // sup over t by brute grid + local refinement must meet the closed form
        bool ok = true;
        double worst = 0.0;
        for (double r : {0.05, 0.3, 1.0, 3.0, 8.0}) {
            GroupElement x = rng.element_at_radius(r);
            for (const KernelSpec& ks : {heat, poisson}) {
                KernelSup s = kernel_sup_t(ks, x);
                double best = 0.0;
                double lo = std::log(s.t_star) - 2.0, hi = std::log(s.t_star) + 2.0;
                for (int i = 0; i <= 4000; ++i) {
                    double t = std::exp(lo + (hi - lo) * i / 4000.0);
                    best = std::max(best, kernel_value(ks, t, x));
                }
                double rel = std::abs(best - s.value) / s.value;
                // grid only undershoots; it must never exceed the closed form
                bool le = best <= s.value * (1.0 + 1e-12);
                worst = std::max(worst, rel);
                ok = ok && le && rel <= 1e-6;
            }
        }
        record("sup_t closed form matches brute search", ok, "worst rel " + fmt(worst));
    }

    {
        // derivative formulas against central differences along the flows
        bool ok = true;
        double worst = 0.0;
        for (int i = 0; i < 300 && ok; ++i) {
            GroupElement x = rng.element(20.0, 0.1, 10.0);
            double r = metric_radius(x);
            if (r < 1e-3) continue;
            double t = rng.log_uniform(std::max(1e-2, r * r / 1000.0), 1e2);
            auto g = kernel_grad(heat, t, x);
            double h = 1e-5;
            for (int dir = 0; dir < 3; ++dir) {
                double fp = kernel_value(heat, t, flow(x, dir, h));
                double fm = kernel_value(heat, t, flow(x, dir, -h));
                double fd = (fp - fm) / (2.0 * h);
                double scale = std::max({std::abs(g[0]), std::abs(g[1]), std::abs(g[2]), 1e-300});
                double rel = std::abs(fd - g[dir]) / scale;
                worst = std::max(worst, rel);
                ok = ok && rel <= 1e-4;
            }
        }
        record("heat gradient matches finite differences", ok, "worst rel " + fmt(worst));
    }

    {
        // the time-sup of the gradient dominates fixed-t slices
        GroupElement x = rng.element_at_radius(2.0);
        GradSup gs = kernel_grad_sup_t(heat, x);
        bool ok = gs.norm > 0.0 && gs.plane_norm <= gs.norm && gs.x0_abs <= gs.norm;
        for (double t : {0.01, 0.1, 1.0, 10.0}) {
            auto g = kernel_grad(heat, t, x);
            double n = std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]);
            ok = ok && n <= gs.norm * (1.0 + 1e-9);
        }
        record("gradient sup dominates fixed times", ok);
    }

    {
        bool ok = true;
        double prev = kernel_radial_part(heat, 1.0, 1e-6);
        for (int i = 1; i <= 400; ++i) {
            double v = kernel_radial_part(heat, 1.0, 1e-6 + 12.0 * i / 400.0);
            ok = ok && v <= prev;
            prev = v;
        }
        record("radial part is decreasing in r", ok);
    }

    {
        bool ok = true;
        double worst = 0.0;
        for (const KernelSpec& ks : {heat, poisson}) {
            for (double t : {0.25, 1.0, 4.0}) {
                double m = kernel_mass_tail(ks, t, 0.0);
                worst = std::max(worst, std::abs(m - 1.0));
                ok = ok && std::abs(m - 1.0) <= 1e-12;
            }
        }
        record("mass tail at R=0 is the unit total mass", ok, "worst dev " + fmt(worst));
    }

    {
        // tails decrease and vanish
        bool ok = true;
        for (const KernelSpec& ks : {heat, poisson}) {
            double prev = 1.0;
            for (double R : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
                double v = kernel_mass_tail(ks, 1.0, R);
                ok = ok && v < prev && v > 0.0;
                prev = v;
            }
        }
        record("mass tails decrease in R", ok);
    }

    {
        // fitted envelope dominates sampled ball sups of the gradient
        GradBoundFit fit = fit_grad_bounds(heat, 0.05, 1.3, 60, 424242);
        record("gradient envelope constants are positive", fit.calibrated());
        bool ok = true;
        double worst = 1e9;
        Rng check(99);
        for (int i = 0; i < 40 && ok; ++i) {
            double r = (i % 2 == 0) ? check.uniform(0.08, 0.95) : check.log_uniform(1.05, 15.0);
            GroupElement x = check.element_at_radius(r);
            GradSup gs = kernel_grad_sup_t(heat, x);
            double env = grad_envelope(fit, x);
            worst = std::min(worst, env / gs.norm);
            ok = ok && gs.norm <= env;
        }
        record("gradient envelope dominates fresh samples", ok, "min ratio " + fmt(worst));
    }

    return harness_exit("test_kernels");
}
