#include "axb/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "axb/parallel.hpp"

namespace axb {

namespace {

constexpr double kPi = std::numbers::pi;

using GlRule = std::pair<std::vector<double>, std::vector<double>>;

// Nodes by Newton iteration on the Legendre recurrence.  The map gives node
// stability, so returned references survive later insertions.
const GlRule& gl_rule(int n) {
    n = std::clamp(n, 2, 64);
    static std::map<int, GlRule> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<double> x(n), w(n);
    int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double xi = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pn = 0.0, pn1 = 0.0, dp = 0.0;
        for (int iter = 0; iter < 64; ++iter) {
            pn = 1.0;
            pn1 = 0.0;
            for (int k = 0; k < n; ++k) {
                double p2 = pn1;
                pn1 = pn;
                pn = ((2.0 * k + 1.0) * xi * pn1 - k * p2) / (k + 1.0);
            }
            dp = n * (xi * pn - pn1) / (xi * xi - 1.0);
            double step = pn / dp;
            xi -= step;
            if (std::abs(step) < 1e-15) break;
        }
        // one clean evaluation at the converged node for the weight
        pn = 1.0;
        pn1 = 0.0;
        for (int k = 0; k < n; ++k) {
            double p2 = pn1;
            pn1 = pn;
            pn = ((2.0 * k + 1.0) * xi * pn1 - k * p2) / (k + 1.0);
        }
        dp = n * (xi * pn - pn1) / (xi * xi - 1.0);
        x[i] = -xi;
        x[n - 1 - i] = xi;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - xi * xi) * dp * dp);
    }
    return cache.emplace(n, GlRule{std::move(x), std::move(w)}).first->second;
}

// Globally adaptive tensor-product rule with embedded-pair error control.
// Each cell is evaluated at the base order and at a higher companion order;
// their difference is the local error estimate.  (Comparing a cell against
// its own two children is cheaper but blind: splitting one axis leaves the
// other axes' quadrature error identical in both levels, so it cancels from
// the difference.)  Refinement pops the worst cell from a heap and splits it
// along the axis with the largest center-line variation, so
// work goes where the error actually lives instead of being promised evenly
// down the tree.
template <int D, class F>
class Adaptive {
  public:
    using Pt = std::array<double, D>;

    Adaptive(const F& f, const QuadratureSpec& spec)
        : f_(f), order_(std::clamp(spec.order, 2, 60)), order2_(order_ + 4),
          max_depth_(spec.max_subdiv), min_depth_(std::min(spec.min_subdiv, spec.max_subdiv)),
          rel_tol_(spec.rel_tol), nodes_(gl_rule(order_).first),
          weights_(gl_rule(order_).second), nodes2_(gl_rule(order2_).first),
          weights2_(gl_rule(order2_).second) {}

    double run(const Pt& lo, const Pt& hi, double abs_budget) {
        heap_.clear();
        done_.clear();
        frozen_err_ = 0.0;
        live_err_ = 0.0;
        value_ = 0.0;
        seed(lo, hi, 0);
        while (!heap_.empty()) {
            double tol = std::max(abs_budget, rel_tol_ * std::abs(value_));
            if (live_err_ + frozen_err_ <= tol) break;
            // Depth-capped cells hold their error no matter how the rest is
            // refined, so once they dominate, further splitting is futile.
            if (frozen_err_ > tol && live_err_ <= 0.05 * frozen_err_) break;
            std::pop_heap(heap_.begin(), heap_.end());
            Cell c = heap_.back();
            heap_.pop_back();
            live_err_ -= c.diff;
            value_ -= c.q;
            int ax = split_axis(c.lo, c.hi);
            if (ax < 0) ax = c.depth % D;  // blank center lines, cycle axes
            double mid = 0.5 * (c.lo[ax] + c.hi[ax]);
            Pt hi1 = c.hi, lo2 = c.lo;
            hi1[ax] = mid;
            lo2[ax] = mid;
            seed(c.lo, hi1, c.depth + 1);
            seed(lo2, c.hi, c.depth + 1);
        }
        err = live_err_ + frozen_err_;
        converged = converged && live_err_ + frozen_err_ <=
                                     std::max(abs_budget, rel_tol_ * std::abs(value_)) * 1.0000001;
        std::vector<double> parts;
        parts.reserve(heap_.size() + done_.size());
        for (const Cell& c : heap_) parts.push_back(c.q);
        for (double q : done_) parts.push_back(q);
        return pairwise_sum(parts);
    }

    double err = 0.0;
    bool converged = true;

  private:
    struct Cell {
        Pt lo, hi;
        double q, diff;
        int depth;
        bool operator<(const Cell& o) const { return diff < o.diff; }
    };

    // Evaluate a cell; either park it as final (depth cap), queue it for
    // refinement, or split it right away while forced splitting applies.
    void seed(const Pt& lo, const Pt& hi, int depth) {
        double q1 = tensor(lo, hi, nodes_, weights_);
        double q2 = tensor(lo, hi, nodes2_, weights2_);
        double diff = std::abs(q1 - q2);
        // An exactly zero cell may just be sampling blindness (support
        // slipped between the nodes), so zero cells are force-split a few
        // extra levels before their estimate is trusted.
        bool force = depth < min_depth_ ||
                     (q1 == 0.0 && q2 == 0.0 && depth < std::min(min_depth_ + 5, max_depth_));
        if (force) {
            int ax = split_axis(lo, hi);
            if (ax < 0) ax = depth % D;
            double mid = 0.5 * (lo[ax] + hi[ax]);
            Pt hi1 = hi, lo2 = lo;
            hi1[ax] = mid;
            lo2[ax] = mid;
            seed(lo, hi1, depth + 1);
            seed(lo2, hi, depth + 1);
            return;
        }
        value_ += q2;
        if (depth >= max_depth_) {
            if (diff > 0.0) converged = false;
            frozen_err_ += diff;
            done_.push_back(q2);
            return;
        }
        heap_.push_back({lo, hi, q2, diff, depth});
        std::push_heap(heap_.begin(), heap_.end());
        live_err_ += diff;
    }

    double tensor(const Pt& lo, const Pt& hi, const std::vector<double>& nodes,
                  const std::vector<double>& weights) {
        Pt c, h;
        double jac = 1.0;
        for (int d = 0; d < D; ++d) {
            c[d] = 0.5 * (lo[d] + hi[d]);
            h[d] = 0.5 * (hi[d] - lo[d]);
            jac *= h[d];
        }
        int n = int(nodes.size());
        int count = 1;
        for (int d = 0; d < D; ++d) count *= n;
        double total = 0.0;
        for (int idx = 0; idx < count; ++idx) {
            int rem = idx;
            double w = 1.0;
            Pt p;
            for (int d = 0; d < D; ++d) {
                int i = rem % n;
                rem /= n;
                p[d] = c[d] + h[d] * nodes[i];
                w *= weights[i];
            }
            total += w * f_(p);
        }
        return total * jac;
    }

    // Score each axis by a 1D embedded-pair difference along its center
    // line: the axis whose restriction is worst-integrated is the one worth
    // splitting.  Variation-based scores conflate steepness with error and
    // either ride one axis or spread splits evenly; this measures the thing
    // the split is supposed to fix.
    int split_axis(const Pt& lo, const Pt& hi) {
        Pt c;
        for (int d = 0; d < D; ++d) c[d] = 0.5 * (lo[d] + hi[d]);
        int best = -1;
        double best_score = 0.0;
        for (int d = 0; d < D; ++d) {
            double h = 0.5 * (hi[d] - lo[d]);
            double i1 = 0.0, i2 = 0.0;
            for (std::size_t i = 0; i < nodes_.size(); ++i) {
                Pt p = c;
                p[d] = c[d] + h * nodes_[i];
                i1 += weights_[i] * f_(p);
            }
            for (std::size_t i = 0; i < nodes2_.size(); ++i) {
                Pt p = c;
                p[d] = c[d] + h * nodes2_[i];
                i2 += weights2_[i] * f_(p);
            }
            double score = std::abs(i1 - i2);
            if (score > best_score) {
                best_score = score;
                best = d;
            }
        }
        return best;
    }

    const F& f_;
    int order_;
    int order2_;
    int max_depth_;
    int min_depth_;
    double rel_tol_;
    const std::vector<double>& nodes_;
    const std::vector<double>& weights_;
    const std::vector<double>& nodes2_;
    const std::vector<double>& weights2_;
    std::vector<Cell> heap_;
    std::vector<double> done_;
    double frozen_err_ = 0.0;
    double live_err_ = 0.0;
    double value_ = 0.0;
};

double measure_weight(MeasureKind kind, double u) {
    return kind == MeasureKind::Left ? std::exp(-2.0 * u) : 1.0;
}

}  // namespace

const std::vector<double>& gl_nodes(int order) { return gl_rule(order).first; }
const std::vector<double>& gl_weights(int order) { return gl_rule(order).second; }

Certificate integrate_box(const Integrand3& f, const BoxRegion& box, MeasureKind kind,
                          const QuadratureSpec& spec) {
    if (box.empty()) return {};
    auto g = [&](const std::array<double, 3>& p) {
        return measure_weight(kind, p[2]) * f(p[0], p[1], p[2]);
    };
    Adaptive<3, decltype(g)> ad(g, spec);
    Certificate c;
    c.value = ad.run({box.x1_lo, box.x2_lo, box.u_lo()}, {box.x1_hi, box.x2_hi, box.u_hi()},
                     spec.abs_tol);
    c.quad_error = ad.err;
    c.converged = ad.converged;
    return c;
}

Certificate integrate_box_g(const std::function<double(const GroupElement&)>& f,
                            const BoxRegion& box, MeasureKind kind, const QuadratureSpec& spec) {
    return integrate_box(
        [&](double x1, double x2, double u) { return f(GroupElement{x1, x2, std::exp(u)}); }, box,
        kind, spec);
}

Certificate integrate_interval(const ScalarFn& f, double lo, double hi,
                               const QuadratureSpec& spec) {
    if (!(hi > lo)) return {};
    auto g = [&](const std::array<double, 1>& p) { return f(p[0]); };
    Adaptive<1, decltype(g)> ad(g, spec);
    Certificate c;
    c.value = ad.run({lo}, {hi}, spec.abs_tol);
    c.quad_error = ad.err;
    c.converged = ad.converged;
    return c;
}

Certificate radial_profile_integral(const ScalarFn& f, double r_max, const QuadratureSpec& spec) {
    if (!(r_max > 0.0) || r_max > 690.0)
        throw std::invalid_argument("radial_profile_integral: r_max in (0, 690]");
    return integrate_interval([&](double r) { return f(r) * r * std::sinh(r); }, 0.0, r_max, spec);
}

std::vector<double> graded_axis(std::vector<std::pair<double, double>> anchors, double lo,
                                double hi, int n_core, double growth) {
    if (!(hi > lo)) throw std::invalid_argument("graded_axis: empty interval");
    n_core = std::max(n_core, 1);
    growth = std::max(growth, 1.05);
    std::vector<std::pair<double, double>> as;
    for (auto& a : anchors) {
        double l = std::max(a.first, lo), h = std::min(a.second, hi);
        if (h > l) as.emplace_back(l, h);
    }
    if (as.empty()) as.emplace_back(lo, hi);
    std::sort(as.begin(), as.end());
    std::vector<std::pair<double, double>> merged;
    for (auto& a : as) {
        if (!merged.empty() && a.first <= merged.back().second)
            merged.back().second = std::max(merged.back().second, a.second);
        else
            merged.push_back(a);
    }
    auto core_w = [&](const std::pair<double, double>& a) { return (a.second - a.first) / n_core; };
    std::vector<double> br;
    for (auto& a : merged)
        for (int i = 0; i <= n_core; ++i)
            br.push_back(a.first + (a.second - a.first) * i / n_core);
    {  // left outskirt
        double w = core_w(merged.front()) * growth;
        double p = merged.front().first;
        while (p - w > lo) {
            p -= w;
            br.push_back(p);
            w *= growth;
        }
        br.push_back(lo);
    }
    {  // right outskirt
        double w = core_w(merged.back()) * growth;
        double p = merged.back().second;
        while (p + w < hi) {
            p += w;
            br.push_back(p);
            w *= growth;
        }
        br.push_back(hi);
    }
    for (std::size_t k = 0; k + 1 < merged.size(); ++k) {  // gaps
        double pl = merged[k].second, pr = merged[k + 1].first;
        double wl = core_w(merged[k]) * growth, wr = core_w(merged[k + 1]) * growth;
        while (pr - pl > std::max(wl, wr)) {
            if (wl <= wr) {
                pl += wl;
                br.push_back(pl);
                wl *= growth;
            } else {
                pr -= wr;
                br.push_back(pr);
                wr *= growth;
            }
        }
    }
    std::sort(br.begin(), br.end());
    // duplicate removal must use local magnitudes: a span-relative epsilon
    // would swallow the fine core cells whenever the outskirts are huge
    std::vector<double> out;
    for (double b : br) {
        if (!out.empty() && b - out.back() <= 1e-12 * std::max({1e-300, std::abs(b), std::abs(out.back())}))
            continue;
        out.push_back(b);
    }
    out.back() = hi;
    return out;
}

CoverResult integrate_cover(const Integrand3& f, MeasureKind kind,
                            const std::vector<double>& x1_breaks,
                            const std::vector<double>& x2_breaks,
                            const std::vector<double>& u_breaks,
                            const std::function<double(const BoxRegion&)>& cell_bound,
                            double skip_tol, const QuadratureSpec& spec) {
    CoverResult res;
    std::vector<double> parts;
    for (std::size_t i = 0; i + 1 < x1_breaks.size(); ++i)
        for (std::size_t j = 0; j + 1 < x2_breaks.size(); ++j)
            for (std::size_t k = 0; k + 1 < u_breaks.size(); ++k) {
                BoxRegion cell{x1_breaks[i],          x1_breaks[i + 1],
                               x2_breaks[j],          x2_breaks[j + 1],
                               std::exp(u_breaks[k]), std::exp(u_breaks[k + 1])};
                if (cell_bound) {
                    double bnd = cell_bound(cell);
                    if (bnd >= 0.0) {
                        double vol = (x1_breaks[i + 1] - x1_breaks[i]) *
                                     (x2_breaks[j + 1] - x2_breaks[j]) *
                                     (u_breaks[k + 1] - u_breaks[k]);
                        double cap = bnd * measure_weight(kind, u_breaks[k]) * vol;
                        if (cap <= skip_tol) {
                            res.quad_error += cap;
                            ++res.cells_pruned;
                            continue;
                        }
                    }
                }
                Certificate c = integrate_box(f, cell, kind, spec);
                parts.push_back(c.value);
                res.quad_error += c.quad_error;
                res.converged = res.converged && c.converged;
                ++res.cells_done;
            }
    res.value = pairwise_sum(parts);
    return res;
}

Certificate kernel_mass(const KernelSpec& ks, double t, double R, const QuadratureSpec& spec) {
    if (!(t > 0.0) || !(R > 0.0) || R > 60.0)
        throw std::invalid_argument("kernel_mass: need t > 0 and R in (0, 60]");
    // The kernel is rotationally symmetric in the plane coordinates, so the
    // mass inside the ball reduces exactly to a 2D integral over (m, u) with
    // m = |x|.  The domain is the exact ball section, which leaves no box
    // versus ball overshoot to account for.
    double chR = std::cosh(R);
    auto sec2 = [&](double u) { return 2.0 * std::exp(u) * chR - std::exp(2.0 * u) - 1.0; };
    double u_peak = std::log(chR);
    auto f2 = [&](const std::array<double, 2>& p) {
        if (p[0] * p[0] > sec2(p[1])) return 0.0;  // outside the ball
        return 2.0 * M_PI * p[0] * kernel_value(ks, t, GroupElement{p[0], 0.0, std::exp(p[1])});
    };
    // Exact distance from the identity to the cell corner nearest the peak.
    auto cell_dist = [&](double m_lo, double u1, double u2) {
        double ustar = std::clamp(0.5 * std::log1p(m_lo * m_lo), u1, u2);
        return metric_radius(GroupElement{m_lo, 0.0, std::exp(ustar)});
    };
    QuadratureSpec sp = spec;
    sp.max_subdiv = std::max(spec.max_subdiv, 14);
    // Thin uniform slabs keep the section edge snug inside one cell band, so
    // the boundary indicator resolves cheaply.
    int nsl = std::max(8, int(std::ceil(2.0 * R / 0.5)));
    double nslabs = double(nsl);
    std::vector<double> parts;
    Certificate c;
    c.converged = true;
    for (int i = 0; i < nsl; ++i) {
        double u1 = -R + 2.0 * R * i / nslabs, u2 = -R + 2.0 * R * (i + 1) / nslabs;
        double uw = std::clamp(u_peak, u1, u2);
        double m_slab = std::sqrt(std::max(sec2(uw), 0.0));
        if (!(m_slab > 0.0)) continue;
        // plane width over which the kernel still varies on an O(1) r scale
        double w = std::min(
            m_slab,
            3.0 * std::sqrt(std::max({std::exp(2.0 * u2) - 1.0, 1.0 - std::exp(2.0 * u1), 0.0})) +
                1.0);
        auto am = graded_axis({{0.0, w}}, 0.0, m_slab, 6, 2.0);
        // the section radii at the slab ends become explicit breakpoints, so
        // the edge band is its own cell column
        for (double ue : {u1, u2}) {
            double me = std::sqrt(std::max(sec2(ue), 0.0));
            auto it = std::lower_bound(am.begin(), am.end(), me);
            if (it != am.begin() && it != am.end() &&
                me - *(it - 1) > 1e-9 * std::max(1.0, me) && *it - me > 1e-9 * std::max(1.0, me))
                am.insert(it, me);
        }
        double ncells = double(am.size() - 1) * nslabs;
        double budget = std::max(1e-16, spec.abs_tol / ncells);
        double skip = 1e-10 / ncells;
        for (std::size_t j = 0; j + 1 < am.size(); ++j) {
            double m1 = am[j], m2 = am[j + 1];
            // sup of the kernel over the cell: the radial factor at the nearest
            // point times the largest delta^(1/2) = e^(-u) weight
            double cap = 2.0 * M_PI * m2 * std::exp(-u1) *
                         kernel_radial_part(ks, t, cell_dist(m1, u1, u2)) * (m2 - m1) * (u2 - u1);
            if (cap <= skip) {
                c.quad_error += cap;
                continue;
            }
            Adaptive<2, decltype(f2)> ad(f2, sp);
            parts.push_back(ad.run({m1, u1}, {m2, u2}, budget));
            c.quad_error += ad.err;
            c.converged = c.converged && ad.converged;
        }
    }
    double tail = kernel_mass_tail(ks, t, R);
    c.value = pairwise_sum(parts) + tail;
    c.tail_bound = tail;
    c.tail_kind = TailKind::Rigorous;
    return c;
}

Certificate ball_volume(double r, MeasureKind kind, const QuadratureSpec& spec) {
    if (!(r > 0.0) || r > 30.0) throw std::invalid_argument("ball_volume: r in (0, 30]");
    double ch = std::cosh(r);
    // The x1-section at (x2, u) has half-width sqrt(s), s = 2 a cosh r - a^2
    // - 1 - x2^2, so the x1 integral is analytic and the x2 integral carries
    // a sqrt edge at the section boundary.  Substituting x2 = m(u) sin(theta)
    // with m(u) the full section half-width absorbs the edge: the (theta, u)
    // integrand 2 m(u)^2 cos^2(theta) is smooth on the whole rectangle.
    auto f = [&](const std::array<double, 2>& p) {
        double a = std::exp(p[1]);
        double m2 = 2.0 * a * ch - a * a - 1.0;
        if (m2 <= 0.0) return 0.0;
        double cth = std::cos(p[0]);
        return measure_weight(kind, p[1]) * 2.0 * m2 * cth * cth;
    };
    Adaptive<2, decltype(f)> ad(f, spec);
    Certificate c;
    c.value = ad.run({-0.5 * kPi, -r}, {0.5 * kPi, r}, spec.abs_tol);
    c.quad_error = ad.err;
    c.converged = ad.converged;
    return c;
}

Certificate convolve(const StepFunction& f, const KernelSpec& ks, double t,
                     const GroupElement& x, const QuadratureSpec& spec) {
    if (!(t > 0.0)) throw std::domain_error("convolve: t must be positive");
    const double dx = modular_delta(x);
    double sumc = 0.0;
    for (double c : f.coef) sumc += std::abs(c);
    // Clip radius: smallest R whose exact mass tail drops below the fraction
    // CT.  The heat kernel always admits one; the fat Poisson tail usually
    // does not, in which case boxes are integrated whole.
    const double CT = 1e-12;
    double r_cut = -1.0;
    for (double R = std::sqrt(std::max(t, 1e-8)); R <= 300.0; R *= 1.25) {
        if (kernel_mass_tail(ks, t, R) <= CT) {
            r_cut = R;
            break;
        }
    }
    BoxRegion clip;
    if (r_cut > 0.0) {
        double w = x.a * std::sinh(r_cut);
        clip = BoxRegion{x.x1 - w, x.x1 + w, x.x2 - w, x.x2 + w,
                         x.a * std::exp(-r_cut), x.a * std::exp(r_cut)};
    }
    std::vector<double> parts(f.size(), 0.0);
    Certificate out;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const BoxRegion& b = f.boxes[i];
        double c = f.coef[i];
        if (c == 0.0 || b.empty()) continue;
        if (b.contains(x)) {
            // Deep-interior fast path: the ball B(x, R_in) whose bounding box
            // still fits inside b carries all but an exactly bounded sliver of
            // the kernel mass, so the integral is delta(x)^-1 up to that tail.
            double m1 = std::min(x.x1 - b.x1_lo, b.x1_hi - x.x1) / x.a;
            double m2 = std::min(x.x2 - b.x2_lo, b.x2_hi - x.x2) / x.a;
            double r_in = std::min({std::asinh(m1), std::asinh(m2),
                                    std::log(x.a / b.a_lo), std::log(b.a_hi / x.a)});
            if (r_in > 0.0) {
                double tl = kernel_mass_tail(ks, t, r_in);
                if (tl <= 1e-9) {
                    parts[i] = c * (1.0 - 0.5 * tl) / dx;
                    out.quad_error += std::abs(c) * 0.5 * tl;
                    continue;
                }
            }
        }
        BoxRegion reg = b;
        if (r_cut > 0.0) {
            BoxRegion inter = BoxRegion::intersection(b, clip);
            if (inter.empty()) {
                out.quad_error += std::abs(c) * CT;
                continue;
            }
            bool shrunk = inter.x1_lo > b.x1_lo || inter.x1_hi < b.x1_hi ||
                          inter.x2_lo > b.x2_lo || inter.x2_hi < b.x2_hi ||
                          inter.a_lo > b.a_lo || inter.a_hi < b.a_hi;
            if (shrunk) {
                out.quad_error += std::abs(c) * CT;
                reg = inter;
            }
        }
        QuadratureSpec sp = spec;
        sp.abs_tol = spec.abs_tol / (dx * std::max(1.0, sumc) * double(f.size()));
        Certificate ci = integrate_box_g(
            [&](const GroupElement& y) { return kernel_value(ks, t, multiply(inverse(x), y)); },
            reg, MeasureKind::Right, sp);
        parts[i] = c * ci.value;
        out.quad_error += dx * std::abs(c) * ci.quad_error;
        out.converged = out.converged && ci.converged;
    }
    out.value = dx * pairwise_sum(parts);
    return out;
}

Certificate convolve_kernels(const KernelSpec& ks, double s, double t, const GroupElement& x,
                             const QuadratureSpec& spec) {
    if (!(s > 0.0) || !(t > 0.0)) throw std::domain_error("convolve_kernels: s, t > 0");
    double rx = metric_radius(x);
    double bulk = (ks.kind == KernelKind::Heat) ? 6.0 * std::sqrt(std::max(s, t)) + 3.0
                                                : 6.0 * std::max(s, t) + 3.0;
    double R = rx + bulk;
    if (ks.kind == KernelKind::Poisson) R = std::max(R, 45.0);
    R = std::max(R, 4.0 * std::max(s, t) + 2.0);
    if (R > 60.0) throw std::invalid_argument("convolve_kernels: radii this large are not supported");
    const double dx = modular_delta(x);
    // anchors sized to the kernels' core widths so the graded cells actually
    // resolve the two peaks (at e for p_s, at x for p_t)
    auto peak_w = [&](double tau) {
        double w = (ks.kind == KernelKind::Heat) ? 2.0 * std::sqrt(tau) + 0.5 : 2.0 * tau + 0.5;
        return std::min(w, 3.0);
    };
    double ws = std::sinh(peak_w(s)), wt = std::sinh(peak_w(t));
    double X = std::sinh(R);
    auto clampi = [&](double v) { return std::clamp(v, -X, X); };
    std::vector<std::pair<double, double>> ax1 = {
        {-ws, ws}, {clampi(x.x1 - x.a * wt), clampi(x.x1 + x.a * wt)}};
    std::vector<std::pair<double, double>> ax2 = {
        {-ws, ws}, {clampi(x.x2 - x.a * wt), clampi(x.x2 + x.a * wt)}};
    double ux = std::log(x.a);
    std::vector<std::pair<double, double>> axu = {{-peak_w(s), peak_w(s)},
                                                  {ux - peak_w(t), ux + peak_w(t)}};
    auto b1 = graded_axis(ax1, -X, X, 6, 1.7);
    auto b2 = graded_axis(ax2, -X, X, 6, 1.7);
    auto bu = graded_axis(axu, -R, R, 6, 1.7);
    auto f = [&](double y1, double y2, double u) {
        GroupElement y{y1, y2, std::exp(u)};
        return kernel_value(ks, s, y) * kernel_value(ks, t, multiply(inverse(x), y));
    };
    GroupElement e = identity();
    auto bound = [&](const BoxRegion& cell) {
        double eu = std::exp(-cell.u_lo());
        return eu * kernel_radial_part(ks, s, box_distance(e, cell)) * x.a * eu *
               kernel_radial_part(ks, t, box_distance(x, cell));
    };
    double scale = kernel_value(ks, s + t, x) / dx;
    double ncells = double(b1.size() - 1) * (b2.size() - 1) * (bu.size() - 1);
    QuadratureSpec sp = spec;
    sp.abs_tol = std::max(1e-300, 1e-9 * scale / ncells);
    CoverResult cov = integrate_cover(f, MeasureKind::Right, b1, b2, bu, bound,
                                      1e-9 * scale / ncells, sp);
    Certificate c;
    c.value = dx * cov.value;
    c.quad_error = dx * cov.quad_error;
    c.converged = cov.converged;
    // Cut mass <= sup over {r > R} of p_s, since the p_t factor integrates to
    // delta(x)^-1; e^r (r/sinh r) <= 2.4 r for r >= 1 turns the modular weight
    // into the plain radial profile.
    double sup_tail;
    if (ks.kind == KernelKind::Heat)
        sup_tail = 2.4 * ks.c0 * std::pow(s, -1.5) * R * std::exp(-R * R / (4.0 * s));
    else
        sup_tail = 2.4 * ks.c0 * s * R / std::pow(s * s + R * R, 2.0);
    c.tail_bound = sup_tail;
    c.tail_kind = TailKind::Rigorous;
    return c;
}

RadialCalibration calibrate_radial_constant(const QuadratureSpec& spec) {
    struct Profile {
        const char* name;
        std::function<double(double)> f;
        double r_max;     // integration radius for the direct side
        double core;      // radius of the region holding the bulk
        double tail_dir;  // bound on the direct-side mass beyond r_max
        double tail_rad;  // bound on the radial-side integral beyond r_max
    };
    std::vector<Profile> profiles;
    for (double t : {0.25, 1.0, 4.0}) {
        double rm = 6.0 * t + 15.0 * std::sqrt(t) + 1.0;
        // direct tail: unit shells, volume pi e^{2s}/2 and weight sup e^s, give
        // (pi e^3/2) int_{rm-1}^inf e^{3s - s^2/4t} ds in closed erfc form.
        double td = 0.5 * kPi * std::exp(3.0) * std::exp(9.0 * t) * std::sqrt(kPi * t) *
                    std::erfc((rm - 1.0 - 6.0 * t) / (2.0 * std::sqrt(t)));
        double Xr = rm - 2.0 * t;
        double tr = 0.5 * std::exp(t) *
                    (2.0 * t * std::exp(-Xr * Xr / (4.0 * t)) +
                     2.0 * t * std::sqrt(kPi * t) * std::erfc(Xr / (2.0 * std::sqrt(t))));
        static const char* names[] = {"gauss t=0.25", "gauss t=1", "gauss t=4"};
        int idx = t == 0.25 ? 0 : (t == 1.0 ? 1 : 2);
        profiles.push_back({names[idx],
                            [t](double r) { return std::exp(-r * r / (4.0 * t)); }, rm,
                            1.0 + 2.0 * std::sqrt(t), td, tr});
    }
    for (double R0 : {2.0, 5.0}) {
        profiles.push_back({R0 == 2.0 ? "bump R=2" : "bump R=5",
                            [R0](double r) {
                                double s = 1.0 - (r / R0) * (r / R0);
                                return s > 0.0 ? s * s * s : 0.0;
                            },
                            R0, R0 * 0.6, 0.0, 0.0});
    }
    RadialCalibration cal;
    GroupElement e = identity();
    for (const Profile& pr : profiles) {
        Certificate rad = radial_profile_integral(pr.f, pr.r_max, spec);
        double radial = rad.value + pr.tail_rad;
        double X = std::sinh(pr.r_max);
        double anchor = std::sinh(std::min(pr.core, pr.r_max));
        auto ax = graded_axis({{-anchor, anchor}}, -X, X, 8, 3.0);
        auto au = graded_axis({{-std::min(pr.core, pr.r_max), std::min(pr.core, pr.r_max)}},
                              -pr.r_max, pr.r_max, 8, 1.8);
        auto f = [&](double x1, double x2, double u) {
            double r = metric_radius(GroupElement{x1, x2, std::exp(u)});
            return std::exp(-u) * pr.f(r);
        };
        auto bound = [&](const BoxRegion& cell) {
            return std::exp(-cell.u_lo()) * pr.f(box_distance(e, cell));
        };
        double ncells = double(ax.size() - 1) * (ax.size() - 1) * (au.size() - 1);
        QuadratureSpec sp = spec;
        sp.order = 6;
        sp.max_subdiv = std::max(spec.max_subdiv, 14);
        sp.abs_tol = std::max(1e-300, 1e-8 * 12.0 * radial / ncells);
        CoverResult cov = integrate_cover(f, MeasureKind::Right, ax, ax, au, bound,
                                          1e-8 * 12.0 * radial / ncells, sp);
        double ratio = cov.value / radial;
        cal.rows.push_back({pr.name, cov.value, radial, ratio});
    }
    double lo = cal.rows[0].ratio, hi = lo, sum = 0.0;
    for (const auto& row : cal.rows) {
        lo = std::min(lo, row.ratio);
        hi = std::max(hi, row.ratio);
        sum += row.ratio;
    }
    cal.kappa = sum / double(cal.rows.size());
    cal.spread = (hi - lo) / cal.kappa;
    if (cal.spread > 0.01)
        throw std::runtime_error("calibrate_radial_constant: inconsistent ratios");
    return cal;
}

}  // namespace axb
