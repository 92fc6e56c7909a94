#include "henchsim/security_region.hpp"

#include <algorithm>
#include <cmath>

namespace henchsim {

namespace {

struct XY {
    double x, y;
};

double cross(const XY& o, const XY& a, const XY& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Lower convex hull of D -> min{R_K, R(D)} over [0, d_max], evaluated at d_e.
double hull_route(double key_rate, double d_e, const RDCurve& curve) {
    const double dmax = curve.dmax;
    if (d_e >= dmax) return 0.0;

    std::vector<double> xs;
    xs.reserve(curve.points.size() + 2050);
    for (const auto& pt : curve.points)
        if (pt.distortion <= dmax) xs.push_back(pt.distortion);
    const int grid = 2048;
    for (int i = 0; i <= grid; ++i) xs.push_back(dmax * i / grid);
    xs.push_back(d_e);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    std::vector<XY> hull;
    for (double x : xs) {
        const XY p{x, std::min(key_rate, curve.rate_at(x))};
        while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), p) <= 0.0)
            hull.pop_back();
        hull.push_back(p);
    }

    const auto it = std::lower_bound(hull.begin(), hull.end(), d_e,
                                     [](const XY& p, double x) { return p.x < x; });
    if (it == hull.begin()) return it->y;
    if (it == hull.end()) return hull.back().y;
    const XY& hi = *it;
    const XY& lo = *(it - 1);
    if (hi.x <= lo.x) return std::min(lo.y, hi.y);
    const double t = (d_e - lo.x) / (hi.x - lo.x);
    return lo.y + t * (hi.y - lo.y);
}

} // namespace

GammaResult gamma(double key_rate, double d_e, const RDCurve& curve) {
    if (key_rate < 0.0 || d_e < 0.0) throw std::invalid_argument("gamma: rates must be >= 0");

    GammaResult res;
    if (d_e <= 0.0) {
        // lambda*D <= 0 forces lambda = 0 or D = 0; both corners are exact
        const double r0 = curve.rate_at(0.0);
        if (key_rate <= r0) {
            res.value = key_rate;
            res.lambda_star = 0.0;
        } else {
            res.value = r0;
            res.lambda_star = 1.0;
        }
        res.d_star = 0.0;
        res.hull_value = res.value;
        return res;
    }

    const double dmax = curve.dmax;
    auto objective = [&](double lambda, double& d_out) {
        if (lambda <= 0.0) {
            d_out = 0.0;
            return key_rate;
        }
        // R(D) is nonincreasing, so the largest feasible D is optimal
        d_out = std::min(d_e / lambda, dmax);
        return (1.0 - lambda) * key_rate + lambda * curve.rate_at(d_out);
    };

    double best_lambda = 0.0, best_d = 0.0;
    double best = objective(0.0, best_d);
    auto scan = [&](double lo, double hi, double step) {
        for (double lam = lo; lam <= hi + 1e-15; lam += step) {
            const double l = std::clamp(lam, 0.0, 1.0);
            double d = 0.0;
            const double v = objective(l, d);
            if (v < best) {
                best = v;
                best_lambda = l;
                best_d = d;
            }
        }
    };
    scan(0.0, 1.0, 1e-2);
    for (double step : {1e-3, 1e-4, 1e-5, 1e-6})
        scan(std::max(0.0, best_lambda - 10.0 * step), std::min(1.0, best_lambda + 10.0 * step),
             step);

    res.value = best;
    res.lambda_star = best_lambda;
    res.d_star = best_d;
    res.hull_value = hull_route(key_rate, d_e, curve);
    return res;
}

AchievabilityWitness is_achievable(const RegionPoint& pt, const Source& source,
                                   const RDCurve& curve) {
    if (pt.rate < 0.0 || pt.key_rate < 0.0 || pt.henchman_rate < 0.0 || pt.d_e < 0.0)
        throw std::invalid_argument("is_achievable: all coordinates must be >= 0");
    AchievabilityWitness w;
    w.source_entropy = entropy(source);
    w.gamma = gamma(pt.key_rate, pt.d_e, curve);
    w.rate_ok = pt.rate >= w.source_entropy - 1e-9;
    w.security_ok = pt.henchman_rate <= w.gamma.value + 1e-9;
    w.achievable = w.rate_ok && w.security_ok;
    return w;
}

AchievabilityWitness is_achievable(const RegionPoint& pt, const Source& source,
                                   const DistortionMeasure& measure) {
    return is_achievable(pt, source, build_rd_curve(source, measure));
}

std::vector<SurfaceRow> surface_sample(const Source& source, const DistortionMeasure& measure,
                                       std::span<const double> rk_grid,
                                       std::span<const double> de_grid) {
    if (rk_grid.empty() || de_grid.empty())
        throw std::invalid_argument("surface_sample: empty grid");
    const RDCurve curve = build_rd_curve(source, measure);
    std::vector<SurfaceRow> rows;
    rows.reserve(rk_grid.size() * de_grid.size());
    for (double rk : rk_grid) {
        for (double de : de_grid) {
            const GammaResult g = gamma(rk, de, curve);
            rows.push_back({rk, de, g.value, g.lambda_star, g.d_star});
        }
    }
    return rows;
}

double perfect_secrecy_threshold(const Source& source) { return entropy(source); }

double r_de_estimate(const Codebook& cb, const DistortionMeasure& measure, double delta,
                     double d_e, std::uint64_t max_super_alphabet) {
    const MessagePosterior mp = message_posterior(cb, delta, max_super_alphabet);
    const DistortionMeasure measure_n = product_measure(measure, cb.n);
    std::vector<std::pair<double, Source>> posteriors;
    posteriors.reserve(mp.message_prob.size());
    for (std::size_t m = 0; m < mp.message_prob.size(); ++m) {
        if (mp.message_prob[m] <= 0.0) continue;
        std::vector<double> q = mp.posterior[m];
        double sum = 0.0;
        for (double v : q) sum += v;
        for (auto& v : q) v /= sum;
        posteriors.emplace_back(mp.message_prob[m], Source(std::move(q)));
    }
    return conditional_rd(posteriors, measure_n, d_e, cb.n);
}

} // namespace henchsim
