#include "axb/hardy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "axb/rng.hpp"

namespace axb {

namespace {

const double kE2 = std::exp(2.0);
const double kE8 = std::exp(8.0);

// admissibility window for the side, given height a and half log-height r
double side_lower(double a, double r) { return r < 1.0 ? kE2 * a * r : a * std::exp(2.0 * r); }
double side_upper(double a, double r) { return r < 1.0 ? kE8 * a * r : a * std::exp(8.0 * r); }

BoxRegion unit_box() { return {-1.0, 1.0, -1.0, 1.0, std::exp(-1.0), std::exp(1.0)}; }

double gl_panel(const std::function<double(double)>& f, double lo, double hi) {
    const std::vector<double>& xs = gl_nodes(16);
    const std::vector<double>& ws = gl_weights(16);
    double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    double s = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) s += ws[i] * f(mid + half * xs[i]);
    return s * half;
}

// integral over [lo, inf) of s^{-3/2}: geometric panels to a far cut, then
// the exact 2/sqrt remainder
double inv_sqrt_cubed_tail(double lo) {
    double cut = 1e8;
    double s = 0.0;
    for (double a = lo; a < cut; a *= 2.0) {
        double b = std::min(cut, 2.0 * a);
        s += gl_panel([](double t) { return std::pow(t, -1.5); }, a, b);
    }
    return s + 2.0 / std::sqrt(cut);
}

}  // namespace

BoxRegion CZSet::box() const {
    return {center.x1 - 0.5 * L, center.x1 + 0.5 * L, center.x2 - 0.5 * L,
            center.x2 + 0.5 * L, center.a * std::exp(-r), center.a * std::exp(r)};
}

double CZSet::rho() const { return 2.0 * r * L * L; }

bool CZSet::admissible() const { return cz_admissible(center, L, r); }

CZSet CZSet::translated(const GroupElement& z) const {
    return {multiply(z, center), z.a * L, r};
}

bool cz_admissible(const GroupElement& center, double L, double r) {
    if (!(L > 0.0) || !(r > 0.0)) throw std::invalid_argument("cz_admissible: L, r > 0");
    return side_lower(center.a, r) <= L && L < side_upper(center.a, r);
}

CZSet cz_superset(const BoxRegion& box) {
    if (box.empty()) throw std::invalid_argument("cz_superset: empty box");
    double ac = std::sqrt(box.a_lo * box.a_hi);
    double span = std::max(box.x1_hi - box.x1_lo, box.x2_hi - box.x2_lo);
    double r = std::max(0.5 * (box.u_hi() - box.u_lo()), 0.01);
    if (side_upper(ac, r) <= span) {
        // smallest r whose window clears the span, with a strictness margin
        double need = span / (kE8 * ac);
        r = need < 1.0 ? std::max(r, need * (1.0 + 1e-9))
                       : std::max({r, 1.0, std::log(span / ac) / 8.0 * (1.0 + 1e-9)});
    }
    while (side_upper(ac, r) <= span) r *= 1.25;
    double L = std::max(span, side_lower(ac, r));
    return {{0.5 * (box.x1_lo + box.x1_hi), 0.5 * (box.x2_lo + box.x2_hi), ac}, L, r};
}

BoxRegion dilate_cover(const CZSet& R) {
    BoxRegion b = R.box();
    // from height a' the plane offset within metric distance r is a' sinh r
    double m = R.center.a * std::exp(R.r) * std::sinh(R.r);
    return {b.x1_lo - m, b.x1_hi + m, b.x2_lo - m, b.x2_hi + m,
            R.center.a * std::exp(-2.0 * R.r), R.center.a * std::exp(2.0 * R.r)};
}

double dilation_constant_estimate(int samples, std::uint64_t seed) {
    Rng rng(seed);
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        double r = rng.log_uniform(0.05, 5.0);
        double a = rng.log_uniform(0.1, 10.0);
        double L = rng.log_uniform(side_lower(a, r), 0.999 * side_upper(a, r));
        CZSet R{{rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0), a}, L, r};
        worst = std::max(worst, dilate_cover(R).rho() / R.rho());
        BoxRegion b = R.box();
        for (double x1 : {b.x1_lo, b.x1_hi})
            for (double x2 : {b.x2_lo, b.x2_hi})
                for (double aa : {b.a_lo, b.a_hi})
                    worst = std::max(worst, distance(R.center, {x1, x2, aa}) / R.r);
    }
    return worst;
}

AtomReport validate_atom(const Atom& a) {
    AtomReport rep;
    BoxRegion cz = a.support.box();
    rep.support_ok = true;
    for (const BoxRegion& b : a.values.boxes) {
        double tol = 1e-9 * std::max({1.0, std::fabs(cz.x1_lo), std::fabs(cz.x1_hi),
                                      std::fabs(cz.x2_lo), std::fabs(cz.x2_hi)});
        bool in = b.x1_lo >= cz.x1_lo - tol && b.x1_hi <= cz.x1_hi + tol &&
                  b.x2_lo >= cz.x2_lo - tol && b.x2_hi <= cz.x2_hi + tol &&
                  b.a_lo >= cz.a_lo * (1.0 - 1e-12) && b.a_hi <= cz.a_hi * (1.0 + 1e-12);
        if (!in) rep.support_ok = false;
    }
    rep.sup_norm = a.values.sup_norm();
    rep.sup_limit = 1.0 / a.support.rho();
    rep.sup_ok = rep.sup_norm <= rep.sup_limit * (1.0 + 1e-12);
    rep.mean_abs = std::fabs(a.values.integral_rho());
    rep.mean_limit = 1e-12 * a.values.l1_norm();
    rep.mean_ok = rep.mean_abs <= rep.mean_limit;
    return rep;
}

StepFunction make_fL(double L) {
    if (!(L > 2.0)) throw std::invalid_argument("make_fL: boxes overlap unless L > 2");
    StepFunction f;
    BoxRegion r0 = unit_box();
    f.boxes = {BoxRegion{L - 1.0, L + 1.0, -1.0, 1.0, r0.a_lo, r0.a_hi}, r0};
    f.coef = {1.0, -1.0};
    return f;
}

double AtomicDecomposition::lambda_sum() const {
    double s = 0.0;
    for (double l : lambda) s += std::fabs(l);
    return s;
}

StepFunction AtomicDecomposition::reconstruct() const {
    StepFunction out;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        const StepFunction& v = atoms[i].values;
        for (std::size_t k = 0; k < v.size(); ++k) {
            double w = lambda[i] * v.coef[k];
            const BoxRegion& b = v.boxes[k];
            bool merged = false;
            for (std::size_t m = 0; m < out.size(); ++m) {
                const BoxRegion& o = out.boxes[m];
                if (o.x1_lo == b.x1_lo && o.x1_hi == b.x1_hi && o.x2_lo == b.x2_lo &&
                    o.x2_hi == b.x2_hi && o.a_lo == b.a_lo && o.a_hi == b.a_hi) {
                    out.coef[m] += w;
                    merged = true;
                    break;
                }
            }
            if (!merged) {
                out.boxes.push_back(b);
                out.coef.push_back(w);
            }
        }
    }
    StepFunction trimmed;
    for (std::size_t m = 0; m < out.size(); ++m) {
        if (out.coef[m] != 0.0) {
            trimmed.boxes.push_back(out.boxes[m]);
            trimmed.coef.push_back(out.coef[m]);
        }
    }
    return trimmed;
}

AtomicDecomposition decompose_fL(double L) {
    if (!(L > 2.0)) throw std::invalid_argument("decompose_fL: L > 2");
    int J = static_cast<int>(std::floor(0.5 * std::log(L) + 1e-9));

    // height-2j translate of the unit box; the chain climbs these
    auto level = [](int j) {
        double s = std::exp(2.0 * j);
        return BoxRegion{-s, s, -s, s, s * std::exp(-1.0), s * std::exp(1.0)};
    };
    auto shifted = [&](int j) {
        BoxRegion b = level(j);
        b.x1_lo += L;
        b.x1_hi += L;
        return b;
    };
    // both chains share the level-j measure so the telescoping coefficients
    // cancel exactly box by box
    double rho0 = level(0).rho();

    AtomicDecomposition out;
    auto push = [&out](const StepFunction& term) {
        CZSet cz = cz_superset(term.support_bounds());
        double lam = term.sup_norm() * cz.rho();
        out.lambda.push_back(lam);
        out.atoms.push_back({term.scaled(1.0 / lam), cz});
    };

    for (int j = 0; j < J; ++j) {
        StepFunction down;  // negated climb term at the identity end
        down.boxes = {level(j), level(j + 1)};
        down.coef = {-rho0 / level(j).rho(), rho0 / level(j + 1).rho()};
        push(down);
        StepFunction up;  // climb term at the far end
        up.boxes = {shifted(j), shifted(j + 1)};
        up.coef = {rho0 / level(j).rho(), -rho0 / level(j + 1).rho()};
        push(up);
    }
    StepFunction bridge;  // negated top connector
    bridge.boxes = {level(J), shifted(J)};
    double top = rho0 / level(J).rho();
    bridge.coef = {-top, top};
    push(bridge);
    return out;
}

double mean_oscillation(const ScalarField& g, const CZSet& R, const QuadratureSpec& q) {
    BoxRegion b = R.box();
    double vol = b.rho();
    double mean = integrate_box_g(g, b, MeasureKind::Right, q).value / vol;
    ScalarField dev = [&g, mean](const GroupElement& x) { return std::fabs(g(x) - mean); };
    return integrate_box_g(dev, b, MeasureKind::Right, q).value / vol;
}

double pairing(const ScalarField& g, const StepFunction& f, const QuadratureSpec& q) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        s += f.coef[i] * integrate_box_g(g, f.boxes[i], MeasureKind::Right, q).value;
    return s;
}

double log_pairing_fL(double L) {
    return 4.0 * ((L + 1.0) * std::log(L + 1.0) - (L - 1.0) * std::log(L - 1.0) - 2.0) + 8.0;
}

namespace {

double strip_profile(double x1) {
    return x1 > 3.0 ? 1.0 / (x1 * std::pow(std::log(x1), 1.5)) : 0.0;
}

BoxRegion cell_box(int k) {
    BoxRegion r0 = unit_box();
    return {2.0 * k - 1.0, 2.0 * k + 1.0, -1.0, 1.0, r0.a_lo, r0.a_hi};
}

}  // namespace

CounterexampleSuite::CounterexampleSuite(const QuadratureSpec& q) : q_(q) {
    // strip mass = 4 * integral_3^inf dx / (x ln^{3/2} x); s = ln x
    double mass = 4.0 * inv_sqrt_cubed_tail(std::log(3.0));
    c0_ = -mass / unit_box().rho();
}

double CounterexampleSuite::value(const GroupElement& x) const {
    if (!(std::fabs(x.x2) < 1.0) || !(x.a > std::exp(-1.0)) || !(x.a < std::exp(1.0)))
        return 0.0;
    if (x.x1 > 3.0) return strip_profile(x.x1);
    if (std::fabs(x.x1) <= 1.0) return c0_;
    return 0.0;
}

ScalarField CounterexampleSuite::g_clamped(double N) const {
    return [N](const GroupElement& x) { return std::min(std::max(g_log(x), -N), N); };
}

double CounterexampleSuite::coefficient(int k) const {
    if (k < 2) throw std::invalid_argument("coefficient: k >= 2");
    BoxRegion cell = cell_box(k);
    double line = integrate_interval([](double x) { return strip_profile(x); }, cell.x1_lo,
                                     cell.x1_hi, q_)
                      .value;
    return 4.0 * line / cell.rho();
}

StepFunction CounterexampleSuite::f_tilde(int K) const {
    if (K < 2) throw std::invalid_argument("f_tilde: K >= 2");
    StepFunction out;
    double total = 0.0;
    for (int k = 2; k <= K; ++k) {
        double ck = coefficient(k);
        out.boxes.push_back(cell_box(k));
        out.coef.push_back(ck);
        total += ck;
    }
    out.boxes.push_back(unit_box());
    out.coef.push_back(-total);
    return out;
}

double CounterexampleSuite::pairing_g_clamped(double N) const {
    if (!(N > std::log(3.0))) throw std::invalid_argument("pairing_g_clamped: N > ln 3");
    // strip part with s = ln x1: integral of min(s, N) s^{-3/2} over
    // [ln 3, inf) = numeric s^{-1/2} up to N plus the exact clamp remainder
    double strip = integrate_interval([](double s) { return 1.0 / std::sqrt(s); },
                                      std::log(3.0), N, q_)
                       .value +
                   2.0 * std::sqrt(N);
    // unit-box part with x1 = e^{-s}: integral over [-1,1] of max(ln|x1|, -N)
    // = -2 (numeric s e^{-s} up to N plus the exact clamp remainder)
    double box1d = integrate_interval([](double s) { return s * std::exp(-s); }, 0.0, N, q_)
                       .value +
                   N * std::exp(-N);
    return 4.0 * strip + c0_ * 4.0 * (-2.0) * box1d;
}

ResidualReport CounterexampleSuite::residual_check(int k) const {
    ResidualReport rep;
    double ck = coefficient(k);
    BoxRegion cell = cell_box(k);
    // the density decreases across the cell, so the deviation peaks at the
    // edges; the boundary value applies on the first cell's closed edge
    rep.sup_residual =
        std::max(1.0 / (cell.x1_lo * std::pow(std::log(cell.x1_lo), 1.5)) - ck,
                 ck - strip_profile(cell.x1_hi));
    rep.ratio = rep.sup_residual * k * k;

    // strip-wise means of the deviation, mean corrected, scaled to an atom
    const int strips = 64;
    StepFunction s;
    double w = (cell.x1_hi - cell.x1_lo) / strips;
    for (int m = 0; m < strips; ++m) {
        double lo = cell.x1_lo + m * w, hi = cell.x1_lo + (m + 1) * w;
        double mean = integrate_interval([](double x) { return strip_profile(x); }, lo, hi, q_)
                          .value /
                      w;
        s.boxes.push_back({lo, hi, cell.x2_lo, cell.x2_hi, cell.a_lo, cell.a_hi});
        s.coef.push_back(mean - ck);
    }
    double drift = s.integral_rho() / cell.rho();
    for (double& c : s.coef) c -= drift;
    CZSet cz = cz_superset(cell);
    double lam = s.sup_norm() * cz.rho();
    rep.atom = validate_atom({s.scaled(1.0 / lam), cz});
    return rep;
}

}  // namespace axb
