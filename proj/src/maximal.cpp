#include "axb/maximal.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "axb/parallel.hpp"
#include "axb/rng.hpp"

namespace axb {

namespace {

constexpr double kGolden = 0.6180339887498949;  // 1/phi

double support_distance(const StepFunction& f, const GroupElement& x) {
    double d = std::numeric_limits<double>::infinity();
    for (const BoxRegion& b : f.boxes) d = std::min(d, box_distance(x, b));
    return d;
}

// integral of delta^(1/2) over a box, d rho = dx1 dx2 du: the u-part is
// int e^-u du = 1/a_lo - 1/a_hi.
double delta_sqrt_mass(const BoxRegion& b) {
    return (b.x1_hi - b.x1_lo) * (b.x2_hi - b.x2_lo) * (1.0 / b.a_lo - 1.0 / b.a_hi);
}

// sup over t of the time profile is K * r^-3 with K = (6/e)^(3/2) for the
// heat profile and 3 sqrt(3)/16 for the Poisson one.
const double kSupFactor = std::pow(6.0 / std::exp(1.0), 1.5);

double profile_sup_factor(const KernelSpec& ks) {
    return ks.kind == KernelKind::Heat ? kSupFactor : 3.0 * std::sqrt(3.0) / 16.0;
}

double sinh_sq_log(double r) { return 2.0 * (r + std::log1p(-std::exp(-2.0 * r)) - std::log(2.0)); }

// Corners of a box as group elements.
std::array<GroupElement, 8> box_corners(const BoxRegion& b) {
    return {GroupElement{b.x1_lo, b.x2_lo, b.a_lo}, GroupElement{b.x1_hi, b.x2_lo, b.a_lo},
            GroupElement{b.x1_lo, b.x2_hi, b.a_lo}, GroupElement{b.x1_hi, b.x2_hi, b.a_lo},
            GroupElement{b.x1_lo, b.x2_lo, b.a_hi}, GroupElement{b.x1_hi, b.x2_lo, b.a_hi},
            GroupElement{b.x1_lo, b.x2_hi, b.a_hi}, GroupElement{b.x1_hi, b.x2_hi, b.a_hi}};
}

double metric_diameter(const BoxRegion& b) {
    auto cs = box_corners(b);
    double d = 0.0;
    for (int i = 0; i < 8; ++i)
        for (int j = i + 1; j < 8; ++j) d = std::max(d, distance(cs[i], cs[j]));
    return d;
}

GroupElement box_center(const BoxRegion& b) {
    return {0.5 * (b.x1_lo + b.x1_hi), 0.5 * (b.x2_lo + b.x2_hi), std::sqrt(b.a_lo * b.a_hi)};
}

// The mean-value tail density at radius-r points, written in the
// cylindrical coordinates (m, u) of the frame centered at the support:
//   delta(x) * G(x^-1),  x = (m, 0, e^u),  x^-1 = (-m e^-u, 0, e^-u).
double mvt_density(const GradBoundFit& fit, double m, double u) {
    double inv_a = std::exp(-u);
    GroupElement z{m * inv_a, 0.0, inv_a};
    return std::exp(-2.0 * u) * grad_envelope(fit, z);
}

}  // namespace

double far_region_integral(double r_in, double reach,
                           const std::function<double(double m, double u)>& density) {
    if (!(r_in > 0.0) || !(reach > 0.0))
        throw std::invalid_argument("far_region_integral: need r_in > 0 and reach > 0");
    double r_out = r_in + reach;
    // e^u cosh(r) factors overflow doubles past this point
    if (!(r_out <= 300.0))
        throw std::invalid_argument("far_region_integral: r_in + reach must stay <= 300");
    // Work in (r, u): m dm = e^u sinh r dr turns the integral into
    //   int 2 pi e^u sinh(r) density(m(r,u), u) dr du
    // over the exact region max(|u|, r_in) < r <= r_out.  Substituting
    // r = r_lo(u) + s (r_out - r_lo(u)) makes the domain a rectangle in
    // (s, u) and factors the sqrt edge of m out of the u direction.
    std::vector<double> ub{0.0};
    double step = 0.5;
    while (ub.back() < r_out) {
        double nxt = ub.back() + step;
        if (ub.back() < r_in && nxt > r_in) nxt = r_in;  // keep the section kink on a seam
        ub.push_back(std::min(nxt, r_out));
        if (ub.back() > r_in + 5.0) step = std::min(step * 1.5, 3.0);
    }
    std::vector<double> ubs;
    for (std::size_t i = ub.size(); i-- > 1;) ubs.push_back(-ub[i]);
    for (double v : ub) ubs.push_back(v);

    const auto& nd = gl_nodes(12);
    const auto& wt = gl_weights(12);
    std::vector<double> parts;
    parts.reserve(ubs.size());
    for (std::size_t i = 0; i + 1 < ubs.size(); ++i) {
        double u1 = ubs[i], u2 = ubs[i + 1];
        double min_abs = (u1 <= 0.0 && u2 >= 0.0) ? 0.0 : std::min(std::abs(u1), std::abs(u2));
        double span = r_out - std::max(min_abs, r_in);  // widest r-range in the slab
        if (!(span > 0.0)) continue;
        // s-panels: graded doubling from the inner edge, width capped so no
        // panel spans more than 2 units of r
        std::vector<double> sb{0.0};
        double w = 1e-4, cap = 2.0 / span;
        while (sb.back() < 1.0) {
            sb.push_back(std::min(1.0, sb.back() + std::min(w, cap)));
            w *= 2.0;
        }
        double uc = 0.5 * (u1 + u2), uh = 0.5 * (u2 - u1);
        double slab = 0.0;
        for (std::size_t k = 0; k + 1 < sb.size(); ++k) {
            double sc = 0.5 * (sb[k] + sb[k + 1]), sh = 0.5 * (sb[k + 1] - sb[k]);
            double q = 0.0;
            for (std::size_t p = 0; p < nd.size(); ++p)
                for (std::size_t t = 0; t < nd.size(); ++t) {
                    double u = uc + uh * nd[t];
                    double r_lo = std::max(std::abs(u), r_in);
                    double jac = r_out - r_lo;
                    double r = r_lo + (sc + sh * nd[p]) * jac;
                    double m2 = 2.0 * std::exp(u) * std::cosh(r) - std::exp(2.0 * u) - 1.0;
                    double m = std::sqrt(std::max(m2, 0.0));
                    double term = wt[p] * wt[t] * 2.0 * M_PI * std::exp(u) * std::sinh(r) * jac *
                                  density(m, u);
                    // an underflowed density against a huge shell factor
                    // yields inf * 0; such products carry no mass
                    if (std::isfinite(term)) q += term;
                }
            slab += q * sh * uh;
        }
        parts.push_back(slab);
    }
    return pairwise_sum(parts);
}

MaximalValue maximal_at(const StepFunction& f, const GroupElement& x, const SupSearchSpec& s,
                        const QuadratureSpec& q, const KernelSpec& ks) {
    if (f.size() == 0) return {0.0, s.t_min};
    if (!(s.t_min > 0.0) || !(s.t_min < s.t_max) || s.grid < 8)
        throw std::invalid_argument("maximal_at: bad search spec");
    double d = support_distance(f, x);
    double t_lo = std::max(s.t_min, 1e-4 * std::max(1e-6, d * d));
    double t_hi = std::max(s.t_max, 10.0 * t_lo);
    // When x sits strictly inside the support, f is constant on a metric ball
    // of radius eps around x, so f * p_t -> f(x) as t -> 0 and the whole
    // range 6 sqrt(t) < eps is redundant: its sup is |f(x)| up to the kernel
    // mass outside that ball.  Record |f(x)| as a floor and start the search
    // where the kernel first sees past the constant zone.
    double floor_val = -1.0;
    if (d == 0.0) {
        double eps = std::numeric_limits<double>::infinity();
        for (const BoxRegion& b : f.boxes) {
            if (b.contains(x)) {
                eps = std::min({eps, std::log(b.a_hi / x.a), std::log(x.a / b.a_lo),
                                std::asinh((b.x1_hi - x.x1) / x.a),
                                std::asinh((x.x1 - b.x1_lo) / x.a),
                                std::asinh((b.x2_hi - x.x2) / x.a),
                                std::asinh((x.x2 - b.x2_lo) / x.a)});
            } else {
                eps = std::min(eps, box_distance(x, b));
            }
        }
        if (eps > 1e-9) {
            floor_val = std::abs(f.value_at(x));
            t_lo = std::max(t_lo, eps * eps / 36.0);
            t_hi = std::max(t_hi, 10.0 * t_lo);
        }
    }
    auto probe = [&](double lt) { return std::abs(convolve(f, ks, std::exp(lt), x, q).value); };
    double la = std::log(t_lo), lb = std::log(t_hi);
    int n = s.grid;
    double best_v = -1.0, best_lt = la;
    int best_i = 0;
    for (int i = 0; i < n; ++i) {
        double lt = la + (lb - la) * i / (n - 1);
        double v = probe(lt);
        if (v > best_v) {
            best_v = v;
            best_lt = lt;
            best_i = i;
        }
    }
    // when the small-t limit already dominates the whole grid by a wide
    // margin, refinement cannot recover the gap; keep the floor
    if (floor_val > 0.0 && best_v < 0.7 * floor_val) return {floor_val, 0.0};
    // golden-section refinement inside the bracket around the best probe
    double lo = la + (lb - la) * std::max(best_i - 1, 0) / (n - 1);
    double hi = la + (lb - la) * std::min(best_i + 1, n - 1) / (n - 1);
    double x1 = hi - kGolden * (hi - lo), x2 = lo + kGolden * (hi - lo);
    double f1 = probe(x1), f2 = probe(x2);
    for (int it = 0; it < s.refine; ++it) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + kGolden * (hi - lo);
            f2 = probe(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - kGolden * (hi - lo);
            f1 = probe(x1);
        }
    }
    double cand = std::max(f1, f2);
    if (cand > best_v) {
        best_v = cand;
        best_lt = f1 > f2 ? x1 : x2;
    }
    // t_star 0 marks a sup attained in the small-t limit
    if (floor_val > best_v) return {floor_val, 0.0};
    return {best_v, std::exp(best_lt)};
}

double indicator_sup_bound(const GroupElement& x, const BoxRegion& R) {
    double d = box_distance(x, R);
    if (d < 1.0) throw std::domain_error("indicator_sup_bound: point closer than 1 to the box");
    double c0 = heat_kernel().c0;
    return c0 * kSupFactor * delta_sqrt(x) * delta_sqrt_mass(R) / (d * d * std::sinh(d));
}

double fL_tail_bound(double L, const GroupElement& x, const GradBoundFit& fit) {
    if (!(L > 2.0)) throw std::invalid_argument("fL_tail_bound: L must exceed 2");
    if (!(fit.c_fL > 0.0)) throw std::runtime_error("fL_tail_bound: constant not fitted");
    double r = metric_radius(x);
    double lnL = std::log(L);
    if (r < lnL * lnL) throw std::domain_error("fL_tail_bound: point inside the computation ball");
    double m = std::hypot(x.x1, x.x2);
    // assembled in logs: sinh^2 r overflows for r beyond ~350
    double lg = std::log(fit.c_fL) + 3.0 * lnL + std::log(L + m) - 2.0 * std::log(x.a) -
                2.0 * std::log(r) - sinh_sq_log(r);
    return std::exp(lg);
}

double fit_fL_constant(const SupSearchSpec& s, const QuadratureSpec& q, int samples,
                       std::uint64_t seed, double safety) {
    if (samples < 4) throw std::invalid_argument("fit_fL_constant: need at least 4 samples");
    GradBoundFit probe_fit;
    probe_fit.c_fL = 1.0;  // ratios against the bare shape
    double worst = 0.0;
    for (double L : {std::exp(2.0), std::exp(3.0)}) {
        StepFunction fL;
        fL.boxes = {BoxRegion{-1.0, 1.0, -1.0, 1.0, std::exp(-1.0), std::exp(1.0)},
                    BoxRegion{L - 1.0, L + 1.0, -1.0, 1.0, std::exp(-1.0), std::exp(1.0)}};
        fL.coef = {-1.0, 1.0};
        double lnL = std::log(L);
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(L)));
        for (int i = 0; i < samples; ++i) {
            double r = lnL * lnL + 4.0 * rng.u01();
            GroupElement x = rng.element_at_radius(r);
            double shape = fL_tail_bound(L, x, probe_fit);
            if (!(shape > 0.0)) continue;
            double v = maximal_at(fL, x, s, q).value;
            worst = std::max(worst, v / shape);
        }
    }
    if (!(worst > 0.0)) throw std::runtime_error("fit_fL_constant: all samples degenerate");
    return worst * safety;
}

double fit_mvt_constant(const GradBoundFit& fit, const SupSearchSpec& s, const QuadratureSpec& q,
                        int samples, std::uint64_t seed, double safety) {
    if (!fit.calibrated()) throw std::runtime_error("fit_mvt_constant: envelope not calibrated");
    // reference atom: the standard box split in half along x1
    BoxRegion r0{-1.0, 1.0, -1.0, 1.0, std::exp(-1.0), std::exp(1.0)};
    StepFunction atom;
    atom.boxes = {BoxRegion{-1.0, 0.0, -1.0, 1.0, r0.a_lo, r0.a_hi},
                  BoxRegion{0.0, 1.0, -1.0, 1.0, r0.a_lo, r0.a_hi}};
    atom.coef = {1.0 / r0.rho(), -1.0 / r0.rho()};
    double l1 = atom.l1_norm();
    double diam = metric_diameter(r0);
    Rng rng(seed);
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        double r = std::max(fit.r1 + 2.0, 3.0) + 4.0 * rng.u01();
        GroupElement x = rng.element_at_radius(r);
        double den = l1 * diam * modular_delta(x) * grad_envelope(fit, inverse(x));
        if (!(den > 0.0)) continue;
        double v = maximal_at(atom, x, s, q).value;
        worst = std::max(worst, v / den);
    }
    if (!(worst > 0.0)) throw std::runtime_error("fit_mvt_constant: all samples degenerate");
    return worst * safety;
}

L1Report maximal_l1(const StepFunction& f, double L_hint, const SupSearchSpec& s,
                    const QuadratureSpec& q, const GradBoundFit& fit, const KernelSpec& ks,
                    int n_core, int threads) {
    if (f.size() == 0) throw std::invalid_argument("maximal_l1: empty function");
    double l1 = f.l1_norm();
    double mean = f.integral_rho();
    bool warn = std::abs(mean) > 1e-12 * std::max(1.0, l1);

    BoxRegion hull = f.support_bounds();
    GroupElement c = box_center(hull);
    double supp_rad = 0.0;
    for (const GroupElement& g : box_corners(hull)) supp_rad = std::max(supp_rad, distance(c, g));
    double r_max = (L_hint > 2.0)
                       ? std::max(10.0, 1.2 * std::log(L_hint) * std::log(L_hint))
                       : std::max(8.0, 1.3 * supp_rad + 3.0);

    // Product grid over the coordinate hull of B(c, r_max).  Core cells come
    // from the support boxes dilated by 2 about their centers, n_core cells
    // per merged span, with box faces as seams (the integrand kinks there).
    // Outside the core the breakpoints are laid down at fixed metric spacing
    // (0.5 for the first 4 units past the core edge, 1.0 beyond), anchored at
    // the hull center only, so refining n_core never moves the far field.
    double sh = std::sinh(r_max);
    double x1_lo = c.x1 - c.a * sh, x1_hi = c.x1 + c.a * sh;
    double x2_lo = c.x2 - c.a * sh, x2_hi = c.x2 + c.a * sh;
    double u_lo = std::log(c.a) - r_max, u_hi = std::log(c.a) + r_max;
    std::vector<std::pair<double, double>> ax1, ax2, axu;
    auto dilated = [](double lo, double hi) {
        double m = 0.5 * (lo + hi), h = hi - lo;
        return std::pair<double, double>{m - h, m + h};
    };
    for (const BoxRegion& b : f.boxes) {
        ax1.push_back(dilated(b.x1_lo, b.x1_hi));
        ax2.push_back(dilated(b.x2_lo, b.x2_hi));
        axu.push_back(dilated(b.u_lo(), b.u_hi()));
    }
    auto insert_seam = [](std::vector<double>& br, double x) {
        auto it = std::lower_bound(br.begin(), br.end(), x);
        if (it == br.begin() || it == br.end()) return;
        double eps = 1e-9 * std::max(1.0, std::abs(x));
        if (x - *(it - 1) > eps && *it - x > eps) br.insert(it, x);
    };
    // metric step size as a function of the gap past the core edge; wide
    // cells far out trade a few percent of local accuracy on a region that
    // holds a few percent of the mass
    auto gap_step = [](double gap) { return gap < 3.0 ? 0.5 : (gap < 8.0 ? 1.25 : 2.5); };
    // x-axis offsets are converted to metric radii in the u = 0 slice of the
    // center: an offset h sits at radius 2 asinh(h / (2 a_c)) ... inverted,
    // radius r corresponds to offset 2 a_c sinh(r / 2)
    auto x_ladder = [&](std::vector<double>& br, double dom_lo, double dom_hi, double cx) {
        double off_lo = std::max(cx - br.front(), 1e-12 * std::max(1.0, c.a));
        double off_hi = std::max(br.back() - cx, 1e-12 * std::max(1.0, c.a));
        double r_lo = 2.0 * std::asinh(0.5 * off_lo / c.a);
        double r_hi = 2.0 * std::asinh(0.5 * off_hi / c.a);
        for (double r = r_lo, g = 0.0; br.front() > dom_lo;) {
            double s = gap_step(g);
            r += s;
            g += s;
            br.insert(br.begin(), std::max(dom_lo, cx - 2.0 * c.a * std::sinh(0.5 * r)));
        }
        for (double r = r_hi, g = 0.0; br.back() < dom_hi;) {
            double s = gap_step(g);
            r += s;
            g += s;
            br.push_back(std::min(dom_hi, cx + 2.0 * c.a * std::sinh(0.5 * r)));
        }
    };
    auto core_axis = [&](std::vector<std::pair<double, double>>& ax, double cap) {
        double lo = ax[0].first, hi = ax[0].second;
        for (const auto& p : ax) {
            lo = std::min(lo, p.first);
            hi = std::max(hi, p.second);
        }
        auto br = graded_axis(ax, lo, hi, n_core, 2.0);
        if (cap > 0.0) {  // subdivide core cells wider than the cap
            std::vector<double> out{br.front()};
            for (std::size_t i = 1; i < br.size(); ++i) {
                double w = br[i] - br[i - 1];
                int parts = std::max(1, static_cast<int>(std::ceil(w / cap)));
                for (int p = 1; p <= parts; ++p) out.push_back(br[i - 1] + w * p / parts);
            }
            br = std::move(out);
        }
        return br;
    };
    auto b1 = core_axis(ax1, 0.0);
    auto b2 = core_axis(ax2, 0.0);
    // u is the metric coordinate along the axis direction; core cells finer
    // than 2/n_core so doubling n_core really does refine all three axes
    auto bu = core_axis(axu, std::min(0.5, 2.0 / n_core));
    for (const BoxRegion& b : f.boxes) {
        insert_seam(b1, b.x1_lo);
        insert_seam(b1, b.x1_hi);
        insert_seam(b2, b.x2_lo);
        insert_seam(b2, b.x2_hi);
        insert_seam(bu, b.u_lo());
        insert_seam(bu, b.u_hi());
    }
    x_ladder(b1, x1_lo, x1_hi, c.x1);
    x_ladder(b2, x2_lo, x2_hi, c.x2);
    for (double g = 0.0; bu.front() > u_lo;) {
        double s = gap_step(g);
        g += s;
        bu.insert(bu.begin(), std::max(u_lo, bu.front() - s));
    }
    for (double g = 0.0; bu.back() < u_hi;) {
        double s = gap_step(g);
        g += s;
        bu.push_back(std::min(u_hi, bu.back() + s));
    }

    long total_cells = static_cast<long>((b1.size() - 1) * (b2.size() - 1) * (bu.size() - 1));
    double prune_share = 0.02 * std::max(1.0, l1) / static_cast<double>(total_cells);

    std::vector<double> sqrt_mass(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) sqrt_mass[i] = delta_sqrt_mass(f.boxes[i]);

    struct EvalCell {
        GroupElement g;
        double weight;  // rho measure of the cell
        double d_near;  // smallest center-to-support distance
        double d_far;   // largest point-to-support distance seen from the cell
    };
    std::vector<EvalCell> evals;
    L1Report rep;
    rep.r_max = r_max;
    rep.n_core = n_core;
    rep.mean_zero_warning = warn;

    double supp_diam = 0.0;
    for (const BoxRegion& b : f.boxes) supp_diam = std::max(supp_diam, metric_diameter(b));
    double hull_diam = metric_diameter(hull);
    // cancellation-aware prune scale; zero disables that route
    double mvt_scale = (!warn && fit.calibrated() && fit.c_mvt > 0.0)
                           ? fit.c_mvt * l1 * hull_diam
                           : 0.0;

    for (std::size_t i = 0; i + 1 < b1.size(); ++i)
        for (std::size_t j = 0; j + 1 < b2.size(); ++j)
            for (std::size_t k = 0; k + 1 < bu.size(); ++k) {
                BoxRegion cell{b1[i], b1[i + 1], b2[j],
                               b2[j + 1], std::exp(bu[k]), std::exp(bu[k + 1])};
                GroupElement g = box_center(cell);
                auto crs = box_corners(cell);
                // keep any cell that touches the domain ball, judged by its
                // center and corners, so boundary slivers are not dropped
                bool touches = distance(c, g) <= r_max;
                for (int cr = 0; cr < 8 && !touches; ++cr)
                    touches = distance(c, crs[cr]) <= r_max;
                if (!touches) continue;
                double w = cell.rho();
                // cell radius: how far a cell point can sit from its center
                double rad = 0.0;
                for (const GroupElement& cr : crs) rad = std::max(rad, distance(g, cr));
                // route 1: per-box indicator envelopes, no cancellation;
                // valid once every box is 1 away
                double bound = 0.0;
                double dsup = std::exp(-bu[k]);  // sup of delta^(1/2) on the cell
                double d_near = std::numeric_limits<double>::infinity(), d_far = 0.0;
                bool far = true;
                for (std::size_t b = 0; b < f.size(); ++b) {
                    double db = box_distance(g, f.boxes[b]);
                    d_near = std::min(d_near, db);
                    d_far = std::max(d_far, db);
                    double d = db - rad;
                    if (d < 1.0) {
                        far = false;
                        continue;
                    }
                    bound += std::abs(f.coef[b]) * ks.c0 * profile_sup_factor(ks) * dsup *
                             sqrt_mass[b] / (d * d * std::sinh(d));
                }
                if (!far) {
                    evals.push_back({g, w, d_near, d_far + rad + supp_diam});
                    continue;
                }
                // route 2: the mean-value envelope in the support-centered
                // frame sees the cancellation; e^{5 rad} converts the center
                // value into a cell sup (delta and the envelope shapes move
                // at most that fast per unit of distance)
                if (mvt_scale > 0.0 && rad <= 1.0) {
                    GroupElement z = multiply(inverse(c), g);
                    if (metric_radius(z) - rad >= std::max(1.0, fit.r1)) {
                        double b2v = mvt_scale * modular_delta(g) * grad_envelope(fit, inverse(z)) *
                                     std::exp(5.0 * rad);
                        bound = std::min(bound, b2v);
                    }
                }
                if (bound * w <= prune_share) {
                    rep.cells_pruned += 1;
                    rep.pruned_bound += bound * w;
                    continue;
                }
                evals.push_back({g, w, d_near, d_far + rad + supp_diam});
            }

    rep.cells_evaluated = static_cast<long>(evals.size());
    std::vector<double> contrib(evals.size());
    parallel_for(evals.size(), threads, [&](std::size_t i) {
        // the cell sees support points no farther than d_far, so the sup in t
        // cannot sit beyond the profile peak of that largest distance; cap
        // the search window there (same logic as the t_min raise)
        SupSearchSpec sc = s;
        sc.t_max = std::min(s.t_max, std::max(100.0 * s.t_min,
                                              50.0 * (evals[i].d_far + 3.0) *
                                                  (evals[i].d_far + 3.0)));
        const QuadratureSpec* qc = &q;
        QuadratureSpec qf;
        if (evals[i].d_near >= 1.0) {
            // off the support the t-profile peaks past d_near^2/6 and decays
            // fast below it, the window is clamped on both sides, and the
            // integrand over each box is smooth enough for a light initial
            // rule (the pair test still enforces the tolerance)
            sc.t_min = std::max(sc.t_min, evals[i].d_near * evals[i].d_near / 40.0);
            sc.grid = std::min(sc.grid, evals[i].d_near >= 2.5 ? 8 : 12);
            sc.refine = std::min(sc.refine, evals[i].d_near >= 2.5 ? 5 : 8);
            qf = q;
            qf.order = std::min(q.order, 3);
            qc = &qf;
        }
        contrib[i] = maximal_at(f, evals[i].g, sc, *qc, ks).value * evals[i].weight;
    });
    rep.inner = pairwise_sum(contrib);

    if (warn) {
        rep.tail = std::numeric_limits<double>::infinity();
        rep.tail_kind = TailKind::Heuristic;
        return rep;
    }
    if (!fit.calibrated() || !(fit.c_mvt > 0.0))
        throw std::runtime_error("maximal_l1: tail constants not calibrated");
    // Everything in the tail is translation-invariant (l1, metric diameter,
    // the shell integral of the identity-centered envelope), so this is the
    // same bound the support-centered change of variables would give.  The
    // shell integrand decays like 1/r^2; reach 19 r_max captures 95% of
    // that profile (less when clipped to the integrator's overflow-safe
    // range), in line with the heuristic tail kind.
    double reach = std::min(19.0 * r_max, 290.0 - r_max);
    rep.tail = fit.c_mvt * l1 * hull_diam *
               far_region_integral(r_max, reach, [&](double m, double u) {
                   return mvt_density(fit, m, u);
               });
    rep.tail_kind = TailKind::Heuristic;
    return rep;
}

}  // namespace axb
