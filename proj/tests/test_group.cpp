#include "axb/group.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "axb/region.hpp"
#include "axb/rng.hpp"
#include "test_harness.hpp"

using namespace axb;

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

}  // namespace

int main() {
    Rng rng(20240901);

    {
        GroupElement e = identity();
        GroupElement x{3.0, -2.0, 0.5};
        GroupElement lhs = multiply(e, x), rhs = multiply(x, e);
        record("identity is neutral",
               lhs.x1 == x.x1 && lhs.x2 == x.x2 && lhs.a == x.a && rhs.x1 == x.x1 &&
                   rhs.x2 == x.x2 && rhs.a == x.a);
    }

    {
        bool ok = true;
        double worst = 0.0;
        for (int i = 0; i < 20000 && ok; ++i) {
            GroupElement x = rng.element(1e3, 1e-3, 1e3);
            GroupElement y = rng.element(1e3, 1e-3, 1e3);
            GroupElement z = rng.element(1e3, 1e-3, 1e3);
            GroupElement l = multiply(multiply(x, y), z);
            GroupElement r = multiply(x, multiply(y, z));
            double nl = std::sqrt(l.x1 * l.x1 + l.x2 * l.x2 + l.a * l.a);
            double nr = std::sqrt(r.x1 * r.x1 + r.x2 * r.x2 + r.a * r.a);
            double d = std::sqrt((l.x1 - r.x1) * (l.x1 - r.x1) + (l.x2 - r.x2) * (l.x2 - r.x2) +
                                 (l.a - r.a) * (l.a - r.a));
            double rel = d / std::max({1.0, nl, nr});
            worst = std::max(worst, rel);
            ok = rel <= 1e-12;
        }
        record("associativity, 2e4 samples", ok, "worst rel " + fmt(worst));
    }

    {
        bool ok = true;
        double worst = 0.0;
        for (int i = 0; i < 20000 && ok; ++i) {
            GroupElement x = rng.element(1e2, 1e-2, 1e2);
            GroupElement xi = inverse(x);
            GroupElement p = multiply(x, xi), q = multiply(xi, x);
            double d = std::max({std::abs(p.x1), std::abs(p.x2), std::abs(p.a - 1.0),
                                 std::abs(q.x1), std::abs(q.x2), std::abs(q.a - 1.0)});
            worst = std::max(worst, d);
            ok = d <= 1e-10;
        }
        record("x * x^-1 = e, 2e4 samples", ok, "worst abs " + fmt(worst));
    }

    {
        record("metric radius spot value 1",
               std::abs(metric_radius(GroupElement{3.0, 4.0, 2.0}) - 2.7035758309314023) < 1e-14);
        record("metric radius spot value 2",
               std::abs(metric_radius(GroupElement{1.0, 2.0, 3.0}) - 1.5667992369724111) < 1e-14);
        record("metric radius at identity", metric_radius(identity()) == 0.0);
    }

    {
        bool ok = true;
        double worst = 0.0;
        for (int i = 0; i < 20000 && ok; ++i) {
            GroupElement x = rng.element(1e2, 1e-2, 1e2);
            GroupElement y = rng.element(1e2, 1e-2, 1e2);
            GroupElement z = rng.element(1e2, 1e-2, 1e2);
            double d1 = distance(x, y);
            double d2 = distance(multiply(z, x), multiply(z, y));
            double rel = std::abs(d1 - d2) / std::max(1.0, d1);
            worst = std::max(worst, rel);
            ok = rel <= 1e-10;
        }
        record("left-invariance of the distance, 2e4 samples", ok, "worst rel " + fmt(worst));
    }

    {
        bool ok = true;
        for (int i = 0; i < 5000 && ok; ++i) {
            GroupElement x = rng.element(1e2, 1e-2, 1e2);
            GroupElement y = rng.element(1e2, 1e-2, 1e2);
            ok = std::abs(distance(x, y) - distance(y, x)) <= 1e-10 * std::max(1.0, distance(x, y));
        }
        record("distance symmetry, 5e3 samples", ok);
    }

    {
        bool ok = true;
        double worst = 0.0;
        for (int i = 0; i < 5000 && ok; ++i) {
            GroupElement x = rng.element(10.0, 1e-1, 10.0);
            GroupElement y = rng.element(10.0, 1e-1, 10.0);
            GroupElement z = rng.element(10.0, 1e-1, 10.0);
            double slack = distance(x, y) + distance(y, z) - distance(x, z);
            worst = std::min(worst, slack);
            ok = slack >= -1e-10;
        }
        record("triangle inequality, 5e3 samples", ok, "worst slack " + fmt(worst));
    }

    {
        bool ok = true;
        double worst = 0.0;
        for (int i = 0; i < 20000 && ok; ++i) {
            GroupElement x = rng.element(1e2, 1e-2, 1e2);
            GroupElement y = rng.element(1e2, 1e-2, 1e2);
            double lhs = modular_delta(multiply(x, y));
            double rhs = modular_delta(x) * modular_delta(y);
            double rel = std::abs(lhs - rhs) / rhs;
            worst = std::max(worst, rel);
            ok = rel <= 1e-12;
        }
        record("modular function is a homomorphism, 2e4 samples", ok, "worst rel " + fmt(worst));
    }

    {
        BoxRegion b{0.0, 2.0, -1.0, 1.0, 1.0, std::exp(1.0)};
        record("box right measure", std::abs(b.rho() - 4.0) < 1e-14);
        double lam = 4.0 * 0.5 * (1.0 - std::exp(-2.0));
        record("box left measure", std::abs(b.lambda() - lam) < 1e-14);
        bool ok = true;
        double worst = 0.0;
        for (int i = 0; i < 2000 && ok; ++i) {
            GroupElement z = rng.element(1e2, 1e-2, 1e2);
            BoxRegion tb = b.translated(z);
            double r1 = std::abs(tb.lambda() - b.lambda()) / b.lambda();
            double r2 = std::abs(tb.rho() - b.rho() / modular_delta(z)) / tb.rho();
            worst = std::max({worst, r1, r2});
            ok = r1 <= 1e-12 && r2 <= 1e-12;
        }
        record("translated box: lambda invariant, rho covariant", ok, "worst rel " + fmt(worst));
    }

    {
        BoxRegion b{-1.0, 1.0, -1.0, 1.0, 1.0, 2.0};
        record("box distance directly above",
               std::abs(box_distance(GroupElement{0.0, 0.0, 4.0}, b) - 0.69314718055994531) <
                   1e-14);
        record("box distance inside is zero",
               box_distance(GroupElement{0.5, 0.5, 1.5}, b) == 0.0);
        // lower-bound property plus attainment against a sampled grid
        bool lower = true;
        double gap = 1e9;
        GroupElement x{4.0, -3.0, 0.2};
        double d = box_distance(x, b);
        for (int i = 0; i <= 40; ++i)
            for (int j = 0; j <= 40; ++j)
                for (int k = 0; k <= 40; ++k) {
                    GroupElement y{-1.0 + 2.0 * i / 40.0, -1.0 + 2.0 * j / 40.0,
                                   1.0 + 1.0 * k / 40.0};
                    double dy = distance(x, y);
                    lower = lower && dy >= d - 1e-12;
                    gap = std::min(gap, dy - d);
                }
        record("box distance is a tight lower bound", lower && gap < 0.01,
               "grid gap " + fmt(gap));
    }

    {
        StepFunction f;
        f.boxes = {BoxRegion{0, 1, 0, 1, 1.0, std::exp(1.0)},
                   BoxRegion{2, 3, 0, 1, 1.0, std::exp(2.0)}};
        f.coef = {2.0, -0.5};
        f.check_disjoint();
        record("step function integral", std::abs(f.integral_rho() - (2.0 - 1.0)) < 1e-14);
        record("step function l1 norm", std::abs(f.l1_norm() - 3.0) < 1e-14);
        record("step function sup norm", f.sup_norm() == 2.0);
        record("step function value lookup",
               f.value_at(GroupElement{0.5, 0.5, 2.0}) == 2.0 &&
                   f.value_at(GroupElement{2.5, 0.5, 2.0}) == -0.5 &&
                   f.value_at(GroupElement{1.5, 0.5, 2.0}) == 0.0);
        StepFunction g = f;  // split the first box in two along x1
        g.boxes[0].x1_hi = 0.25;
        g.boxes.push_back(BoxRegion{0.25, 1, 0, 1, 1.0, std::exp(1.0)});
        g.coef.push_back(2.0);
        record("refined step function is pointwise equal", step_difference_max(f, g) == 0.0);
        g.coef[0] = 2.5;
        record("step difference sees a changed cell", step_difference_max(f, g) == 0.5);
        StepFunction bad;
        bad.boxes = {BoxRegion{0, 2, 0, 1, 1.0, 2.0}, BoxRegion{1, 3, 0, 1, 1.5, 3.0}};
        bad.coef = {1.0, 1.0};
        bool threw = false;
        try {
            bad.check_disjoint();
        } catch (const std::invalid_argument&) {
            threw = true;
        }
        record("overlapping boxes are rejected", threw);
    }

    return harness_exit("test_group");
}
