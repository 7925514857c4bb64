#include "axb/maximal.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "axb/rng.hpp"
#include "test_harness.hpp"

using namespace axb;

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6e", v);
    return buf;
}

// resolution used throughout: cheap enough for a test binary, fine enough
// that every tolerance below has an order of magnitude to spare
QuadratureSpec lean_quad() {
    QuadratureSpec q;
    q.order = 4;
    q.rel_tol = 1e-3;
    q.abs_tol = 1e-10;
    q.max_subdiv = 10;
    q.min_subdiv = 1;
    return q;
}

SupSearchSpec lean_search() {
    SupSearchSpec s;
    s.grid = 16;
    s.refine = 12;
    return s;
}

StepFunction chi_r0() {
    StepFunction f;
    f.boxes = {BoxRegion{-1.0, 1.0, -1.0, 1.0, std::exp(-1.0), std::exp(1.0)}};
    f.coef = {1.0};
    return f;
}

// mean-zero two-box split of the reference box, normalized to unit L1 norm
StepFunction test_atom() {
    StepFunction f;
    f.boxes = {BoxRegion{-1.0, 0.0, -1.0, 1.0, std::exp(-1.0), std::exp(1.0)},
               BoxRegion{0.0, 1.0, -1.0, 1.0, std::exp(-1.0), std::exp(1.0)}};
    double half = f.boxes[0].rho();
    f.coef = {0.5 / half, -0.5 / half};
    return f;
}

double radius_mu(double m, double u) {
    return std::acosh(0.5 * (std::exp(u) + std::exp(-u) * (1.0 + m * m)));
}

}  // namespace

int main() {
    KernelSpec heat = heat_kernel();
    QuadratureSpec ql = lean_quad();
    SupSearchSpec sl = lean_search();

    {
        // shell integrals against closed forms: ball volume differences for
        // the constant density, 4 pi (r cosh r - sinh r) for the delta^(1/2)
        // weight, 4 pi ln(b/a) for the delta^(1/2)/(r^2 sinh r) profile
        double v1 = far_region_integral(1.0, 1.0, [](double, double) { return 1.0; });
        double e1 = M_PI * (std::sinh(4.0) - 4.0) - M_PI * (std::sinh(2.0) - 2.0);
        record("shell mass, constant density", std::abs(v1 / e1 - 1.0) < 1e-12,
               fmt(v1) + " vs " + fmt(e1));

        double v2 = far_region_integral(1.0, 1.0, [](double, double u) { return std::exp(-u); });
        double e2 = 4.0 * M_PI *
                    ((2.0 * std::cosh(2.0) - std::sinh(2.0)) - (std::cosh(1.0) - std::sinh(1.0)));
        record("shell mass, modular sqrt density", std::abs(v2 / e2 - 1.0) < 1e-12,
               fmt(v2) + " vs " + fmt(e2));

        double v3 = far_region_integral(4.0, 60.0, [](double m, double u) {
            double r = radius_mu(m, u);
            return std::exp(-u) / (r * r * std::sinh(r));
        });
        double e3 = 4.0 * M_PI * std::log(64.0 / 4.0);
        record("shell mass, log profile", std::abs(v3 / e3 - 1.0) < 1e-10,
               fmt(v3) + " vs " + fmt(e3));

        bool threw = false;
        try {
            far_region_integral(10.0, 295.0, [](double, double) { return 0.0; });
        } catch (const std::invalid_argument&) {
            threw = true;
        }
        record("shell integral rejects overflow range", threw);
    }

    {
        // at interior points the small-t limit recovers the step value
        StepFunction chi = chi_r0();
        MaximalValue mv = maximal_at(chi, identity(), sl, ql, heat);
        record("indicator sup at the center", std::abs(mv.value - 1.0) < 1e-3, fmt(mv.value));

        StepFunction atom = test_atom();
        GroupElement inside{-0.52, 0.31, 1.27};
        MaximalValue mi = maximal_at(atom, inside, sl, ql, heat);
        record("sup at least the step value inside",
               mi.value >= std::abs(atom.value_at(inside)) - 1e-12,
               fmt(mi.value) + " vs " + fmt(std::abs(atom.value_at(inside))));
    }

    {
        // contraction: the sup never exceeds the sup norm
        StepFunction atom = test_atom();
        double sup = atom.sup_norm();
        Rng rng(90901);
        bool ok = true;
        double worst = 0.0;
        for (int i = 0; i < 12; ++i) {
            GroupElement x = rng.element(3.0, 0.2, 5.0);
            double v = maximal_at(atom, x, sl, ql, heat).value;
            worst = std::max(worst, v / sup);
            if (!(v >= 0.0) || v > sup * (1.0 + 1e-6)) ok = false;
        }
        record("contraction against the sup norm", ok, "worst ratio " + fmt(worst));
    }

    {
        // moving f by a left translation and x along with it changes nothing
        StepFunction atom = test_atom();
        GroupElement z{0.83, -1.91, std::exp(0.37)};
        StepFunction moved = atom.translated(z);
        GroupElement x{1.4, -0.3, 0.9};
        double v0 = maximal_at(atom, x, sl, ql, heat).value;
        double v1 = maximal_at(moved, multiply(z, x), sl, ql, heat).value;
        record("left translation moves the sup with the point",
               std::abs(v1 / v0 - 1.0) < 5e-3, fmt(v0) + " vs " + fmt(v1));
    }

    {
        // the grid + golden-section search should match a dense brute-force
        // scan of the same window
        StepFunction atom = test_atom();
        GroupElement x{3.0, -2.0, std::exp(1.2)};
        SupSearchSpec ss;
        ss.t_min = 1e-3;
        ss.t_max = 1e3;
        ss.grid = 32;
        ss.refine = 24;
        double refined = maximal_at(atom, x, ss, ql, heat).value;
        double brute = 0.0;
        for (int i = 0; i < 1200; ++i) {
            double t = std::exp(std::log(1e-3) + (std::log(1e3) - std::log(1e-3)) * i / 1199.0);
            brute = std::max(brute, std::abs(convolve(atom, heat, t, x, ql).value));
        }
        record("search matches dense scan",
               refined >= brute * (1.0 - 1e-9) && refined <= brute * 1.005,
               fmt(refined) + " vs brute " + fmt(brute));
    }

    {
        // closed-form envelope dominates the search everywhere it is defined
        StepFunction chi = chi_r0();
        BoxRegion r0 = chi.boxes[0];
        Rng rng(41507);
        bool ok = true;
        int tried = 0;
        double worst = 0.0;
        while (tried < 100) {
            GroupElement x = rng.element(12.0, 0.05, 20.0);
            if (box_distance(x, r0) < 1.0) continue;
            ++tried;
            double v = maximal_at(chi, x, sl, ql, heat).value;
            double b = indicator_sup_bound(x, r0);
            worst = std::max(worst, v / b);
            if (v > b * (1.0 + 1e-9)) ok = false;
        }
        record("indicator envelope dominates the search", ok, "worst ratio " + fmt(worst));

        bool threw = false;
        try {
            indicator_sup_bound(GroupElement{0.1, 0.0, 1.05}, r0);
        } catch (const std::domain_error&) {
            threw = true;
        }
        record("indicator envelope rejects near points", threw);
    }

    {
        // along the a-axis the envelope times r^2 sinh r / delta^(1/2) should
        // flatten out rather than grow
        BoxRegion r0 = chi_r0().boxes[0];
        double lo = 1e300, hi = 0.0;
        for (double r = 4.0; r <= 14.0; r += 2.0) {
            GroupElement x{0.0, 0.0, std::exp(r)};
            double q = indicator_sup_bound(x, r0) * r * r * std::sinh(r) / delta_sqrt(x);
            lo = std::min(lo, q);
            hi = std::max(hi, q);
        }
        record("axis scaling of the indicator envelope stays bounded", hi / lo < 3.0,
               "spread " + fmt(hi / lo));
    }

    {
        // the envelope integrates like log R over growing balls; ratio of the
        // radius-8 to radius-4 integrals sits near log 8 / log 4
        BoxRegion small{-0.05, 0.05, -0.05, 0.05, std::exp(-0.05), std::exp(0.05)};
        auto dens = [&](double m, double u) {
            GroupElement x{m, 0.0, std::exp(u)};
            if (box_distance(x, small) < 1.0) return 0.0;
            return indicator_sup_bound(x, small);
        };
        double i4 = far_region_integral(1.0, 3.0, dens);
        double i8 = far_region_integral(1.0, 7.0, dens);
        record("indicator envelope integral grows like the log",
               i8 > i4 && i8 / i4 > 1.2 && i8 / i4 < 1.8, "ratio " + fmt(i8 / i4));
    }

    {
        // two-box far shape: constant recovery, region guard, decay
        GradBoundFit fit;
        fit.r1 = 0.5;
        fit.c3 = fit.c4 = fit.c5 = 1.0;
        fit.safety = 1.0;
        fit.c_fL = 0.02;
        double L = std::exp(1.5);
        GroupElement x{7.0, -3.0, std::exp(1.5)};
        double r = metric_radius(x);
        double norm = std::hypot(x.x1, x.x2);
        double shape = (L * L * L / (x.a * x.a)) * (L + norm) /
                       (r * r * std::sinh(r) * std::sinh(r));
        double b = fL_tail_bound(L, x, fit);
        record("two-box far shape inverts to its constant",
               std::abs(b / shape - fit.c_fL) < 1e-12 * fit.c_fL, fmt(b / shape));

        bool threw = false;
        try {
            fL_tail_bound(L, GroupElement{0.5, 0.0, 1.1}, fit);
        } catch (const std::exception&) {
            threw = true;
        }
        record("two-box far shape rejects the inner region", threw);

        double Ls = L;
        bool mono = true;
        double prev = 1e300;
        for (double rr = 2.5; rr <= 8.0; rr += 0.5) {
            double v = fL_tail_bound(Ls, GroupElement{0.0, 0.0, std::exp(rr)}, fit);
            if (v >= prev) mono = false;
            prev = v;
        }
        record("two-box far shape decays along the axis", mono);

        // integral outside a growing cutoff is finite and shrinking
        auto dens = [&](double m, double u) {
            GroupElement p{m, 0.0, std::exp(u)};
            return fL_tail_bound(Ls, p, fit);
        };
        double cut = std::log(Ls) * std::log(Ls);
        double prev_i = 1e300;
        bool shrinking = true;
        double first = 0.0, last = 0.0;
        for (double alpha : {2.2, 2.6, 3.0}) {
            double radius = std::pow(std::log(Ls), alpha);
            if (radius < cut) radius = cut;
            double iv = far_region_integral(radius, 60.0, dens);
            if (!std::isfinite(iv) || iv >= prev_i) shrinking = false;
            if (first == 0.0) first = iv;
            last = iv;
            prev_i = iv;
        }
        record("two-box far shape integrable past the cutoff",
               shrinking && last < 0.8 * first,
               fmt(first) + " down to " + fmt(last));
    }

    {
        // fitted constants: positive and reproducible for a fixed seed
        GradBoundFit f1 = fit_grad_bounds(heat, 0.5, 4.0, 60, 11);
        GradBoundFit f2 = fit_grad_bounds(heat, 0.5, 4.0, 60, 11);
        record("gradient envelope fit is deterministic",
               f1.c3 == f2.c3 && f1.c4 == f2.c4 && f1.c5 == f2.c5 && f1.calibrated(),
               fmt(f1.c3) + ", " + fmt(f1.c4) + ", " + fmt(f1.c5));
        double m1 = fit_mvt_constant(f1, sl, ql, 4, 13, 2.0);
        double m2 = fit_mvt_constant(f1, sl, ql, 4, 13, 2.0);
        record("mean-zero tail constant fit is deterministic", m1 == m2 && m1 > 0.0, fmt(m1));
        double g1 = fit_fL_constant(sl, ql, 4, 17, 2.0);
        double g2 = fit_fL_constant(sl, ql, 4, 17, 2.0);
        record("two-box tail constant fit is deterministic", g1 == g2 && g1 > 0.0, fmt(g1));
    }

    {
        // L1 reports: finiteness, stability under refinement, translation
        // covariance, and the divergence warning without cancellation
        GradBoundFit fit = fit_grad_bounds(heat, 0.5, 4.0, 200, 11);
        fit.c_mvt = fit_mvt_constant(fit, sl, ql, 6, 13, 2.0);
        StepFunction atom = test_atom();

        L1Report r4 = maximal_l1(atom, 0.0, sl, ql, fit, heat, 4, 1);
        record("atom report finite",
               std::isfinite(r4.inner) && r4.inner > 0.0 && std::isfinite(r4.tail) &&
                   r4.tail > 0.0 && r4.tail_kind == TailKind::Heuristic &&
                   !r4.mean_zero_warning && r4.cells_evaluated > 0,
               "inner " + fmt(r4.inner) + " tail " + fmt(r4.tail));

        SupSearchSpec sh = sl;
        sh.t_min = 0.5e-6;
        L1Report r8 = maximal_l1(atom, 0.0, sh, ql, fit, heat, 8, 1);
        record("inner value stable under grid refinement",
               std::abs(r8.inner / r4.inner - 1.0) <= 0.02,
               "change " + fmt(r8.inner / r4.inner - 1.0));

        GroupElement c{0.83, -1.91, std::exp(0.37)};
        StepFunction moved = atom.translated(c).scaled(modular_delta(c));
        L1Report rm = maximal_l1(moved, 0.0, sl, ql, fit, heat, 4, 1);
        record("translated atom keeps its L1 estimate",
               std::abs(rm.total() / r4.total() - 1.0) <= 0.03,
               fmt(rm.total()) + " vs " + fmt(r4.total()));

        SupSearchSpec cheap;
        cheap.grid = 8;
        cheap.refine = 0;
        L1Report rw = maximal_l1(chi_r0(), 0.0, cheap, ql, fit, heat, 1, 1);
        record("no cancellation trips the divergence warning",
               rw.mean_zero_warning && std::isinf(rw.tail) && rw.inner > 0.0 &&
                   std::isfinite(rw.inner),
               "inner " + fmt(rw.inner));
    }

    return harness_exit("test_maximal");
}
