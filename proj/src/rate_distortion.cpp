#include "henchsim/rate_distortion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace henchsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double expected_column_distortion(const Source& source, const DistortionMeasure& measure,
                                  std::size_t z) {
    double e = 0.0;
    for (std::size_t s = 0; s < measure.source_alphabet; ++s)
        e += source.pmf[s] * measure.at(s, z);
    return e;
}

// Zero-rate endpoint: point mass on the best constant reconstruction.
RDPoint zero_slope_point(const Source& source, const DistortionMeasure& measure) {
    std::size_t best = 0;
    double best_d = expected_column_distortion(source, measure, 0);
    for (std::size_t z = 1; z < measure.recon_alphabet; ++z) {
        const double e = expected_column_distortion(source, measure, z);
        if (e < best_d) {
            best_d = e;
            best = z;
        }
    }
    RDPoint pt;
    pt.distortion = best_d;
    pt.rate = 0.0;
    pt.slope = 0.0;
    pt.test_channel.assign(measure.source_alphabet * measure.recon_alphabet, 0.0);
    for (std::size_t s = 0; s < measure.source_alphabet; ++s)
        pt.test_channel[s * measure.recon_alphabet + best] = 1.0;
    return pt;
}

// Core alternating minimization. weights[s][v] is either exp2(-beta*d) or a
// 0/1 support indicator for the infinite-slope endpoint. Converges when the
// standard upper/lower bound gap log2(max_v c(v)) drops below tolerance.
RDPoint solve_weighted(const Source& source, const DistortionMeasure& measure,
                       const std::vector<double>& weights, double slope,
                       const BASolverConfig& config) {
    const std::size_t ns = measure.source_alphabet;
    const std::size_t nz = measure.recon_alphabet;

    // Start from the marginal induced by spreading each row over its support.
    std::vector<double> q(nz, 0.0);
    for (std::size_t s = 0; s < ns; ++s) {
        double row = 0.0;
        for (std::size_t v = 0; v < nz; ++v) row += (weights[s * nz + v] > 0.0) ? 1.0 : 0.0;
        for (std::size_t v = 0; v < nz; ++v)
            if (weights[s * nz + v] > 0.0) q[v] += source.pmf[s] / row;
    }

    std::vector<double> zrow(ns), c(nz);
    double gap = kInf;
    for (int it = 0; it < config.max_iterations; ++it) {
        for (std::size_t s = 0; s < ns; ++s) {
            double z = 0.0;
            for (std::size_t v = 0; v < nz; ++v) z += q[v] * weights[s * nz + v];
            zrow[s] = z;
        }
        std::fill(c.begin(), c.end(), 0.0);
        for (std::size_t s = 0; s < ns; ++s) {
            if (source.pmf[s] == 0.0) continue;
            const double inv = source.pmf[s] / zrow[s];
            for (std::size_t v = 0; v < nz; ++v) c[v] += inv * weights[s * nz + v];
        }
        const double cmax = *std::max_element(c.begin(), c.end());
        gap = std::max(0.0, std::log2(cmax));
        if (gap < config.tolerance) break;

        double total = 0.0;
        for (std::size_t v = 0; v < nz; ++v) {
            q[v] *= c[v];
            total += q[v];
        }
        for (auto& val : q) val /= total;
    }
    if (!(gap < config.tolerance))
        throw std::runtime_error("blahut_arimoto: no convergence, residual gap " +
                                 std::to_string(gap));

    RDPoint pt;
    pt.slope = slope;
    pt.test_channel.assign(ns * nz, 0.0);
    std::vector<double> marginal(nz, 0.0);
    double dist = 0.0;
    for (std::size_t s = 0; s < ns; ++s) {
        double z = 0.0;
        for (std::size_t v = 0; v < nz; ++v) z += q[v] * weights[s * nz + v];
        for (std::size_t v = 0; v < nz; ++v) {
            const double cond = (z > 0.0) ? q[v] * weights[s * nz + v] / z : 0.0;
            pt.test_channel[s * nz + v] = cond;
            marginal[v] += source.pmf[s] * cond;
            dist += source.pmf[s] * cond * measure.at(s, v);
        }
    }
    double info = 0.0;
    for (std::size_t s = 0; s < ns; ++s) {
        if (source.pmf[s] == 0.0) continue;
        for (std::size_t v = 0; v < nz; ++v) {
            const double cond = pt.test_channel[s * nz + v];
            if (cond > 0.0) info += source.pmf[s] * cond * std::log2(cond / marginal[v]);
        }
    }
    pt.distortion = dist;
    pt.rate = std::max(0.0, info);
    return pt;
}

RDPoint min_distortion_point(const Source& source, const DistortionMeasure& measure,
                             const BASolverConfig& config) {
    const std::size_t ns = measure.source_alphabet;
    const std::size_t nz = measure.recon_alphabet;
    std::vector<double> support(ns * nz, 0.0);
    for (std::size_t s = 0; s < ns; ++s) {
        double row_min = kInf;
        for (std::size_t v = 0; v < nz; ++v) row_min = std::min(row_min, measure.at(s, v));
        const double eps = 1e-12 * (1.0 + std::abs(row_min));
        for (std::size_t v = 0; v < nz; ++v)
            if (measure.at(s, v) <= row_min + eps) support[s * nz + v] = 1.0;
    }
    return solve_weighted(source, measure, support, -kInf, config);
}

} // namespace

double d_max(const Source& source, const DistortionMeasure& measure) {
    return zero_slope_point(source, measure).distortion;
}

double d_min(const Source& source, const DistortionMeasure& measure) {
    double total = 0.0;
    for (std::size_t s = 0; s < measure.source_alphabet; ++s) {
        double row_min = kInf;
        for (std::size_t v = 0; v < measure.recon_alphabet; ++v)
            row_min = std::min(row_min, measure.at(s, v));
        total += source.pmf[s] * row_min;
    }
    return total;
}

RDPoint blahut_arimoto(const Source& source, const DistortionMeasure& measure, double slope,
                       const BASolverConfig& config) {
    if (source.alphabet_size() != measure.source_alphabet)
        throw std::invalid_argument("blahut_arimoto: alphabet mismatch");
    if (slope > 0.0) throw std::invalid_argument("blahut_arimoto: slope must be <= 0");
    if (slope == 0.0) return zero_slope_point(source, measure);
    if (std::isinf(slope)) return min_distortion_point(source, measure, config);

    const double beta = -slope;
    const std::size_t ns = measure.source_alphabet;
    const std::size_t nz = measure.recon_alphabet;
    std::vector<double> weights(ns * nz);
    for (std::size_t s = 0; s < ns; ++s)
        for (std::size_t v = 0; v < nz; ++v)
            weights[s * nz + v] = std::exp2(-beta * measure.at(s, v));
    return solve_weighted(source, measure, weights, slope, config);
}

RDPoint rd_at_distortion(const Source& source, const DistortionMeasure& measure, double distortion,
                         const BASolverConfig& config) {
    if (distortion < 0.0) throw std::invalid_argument("rd_at_distortion: distortion must be >= 0");

    const double dmax = d_max(source, measure);
    if (distortion >= dmax - 1e-15) {
        RDPoint pt = zero_slope_point(source, measure);
        pt.distortion = std::max(distortion, pt.distortion);
        return pt;
    }
    const double dmin = d_min(source, measure);
    if (distortion < dmin - 1e-12)
        throw std::domain_error("rd_at_distortion: distortion below the achievable minimum");
    if (distortion <= dmin + 1e-15) return min_distortion_point(source, measure, config);

    // D(beta) is nonincreasing; bracket the target then bisect.
    double beta_lo = 0.0;
    double beta_hi = 1.0;
    RDPoint hi_pt = blahut_arimoto(source, measure, -beta_hi, config);
    int guard = 0;
    while (hi_pt.distortion > distortion) {
        beta_lo = beta_hi;
        beta_hi *= 2.0;
        if (++guard > 60) throw std::runtime_error("rd_at_distortion: bisection bracket failure");
        hi_pt = blahut_arimoto(source, measure, -beta_hi, config);
    }

    double best_lower = hi_pt.rate + beta_hi * (hi_pt.distortion - distortion);
    RDPoint best_pt = hi_pt;
    for (int it = 0; it < 200 && beta_hi - beta_lo > 1e-12 * (1.0 + beta_hi); ++it) {
        const double mid = 0.5 * (beta_lo + beta_hi);
        const RDPoint pt = blahut_arimoto(source, measure, -mid, config);
        const double tangent = pt.rate + mid * (pt.distortion - distortion);
        if (tangent > best_lower) best_lower = tangent;
        if (pt.distortion > distortion) {
            beta_lo = mid;
        } else {
            beta_hi = mid;
            best_pt = pt;
        }
        if (std::abs(pt.distortion - distortion) < 1e-13) break;
    }

    RDPoint out = best_pt;  // channel meets E d <= target
    out.distortion = distortion;
    out.rate = std::max(0.0, best_lower);
    out.slope = -0.5 * (beta_lo + beta_hi);
    return out;
}

double binary_hamming_rd(double p, double distortion) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("binary_hamming_rd: p must be in [0,1]");
    if (distortion < 0.0) throw std::invalid_argument("binary_hamming_rd: distortion must be >= 0");
    p = std::min(p, 1.0 - p);
    if (distortion >= p) return 0.0;
    auto hb = [](double x) {
        if (x <= 0.0 || x >= 1.0) return 0.0;
        return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
    };
    return hb(p) - hb(distortion);
}

double RDCurve::rate_at(double distortion) const {
    if (points.empty()) throw std::logic_error("RDCurve: empty curve");
    if (distortion >= dmax) return 0.0;
    if (distortion <= points.front().distortion) return points.front().rate;
    auto it = std::lower_bound(points.begin(), points.end(), distortion,
                               [](const RDPoint& p, double d) { return p.distortion < d; });
    const RDPoint& hi = *it;
    const RDPoint& lo = *(it - 1);
    if (hi.distortion <= lo.distortion) return hi.rate;
    const double t = (distortion - lo.distortion) / (hi.distortion - lo.distortion);
    return lo.rate + t * (hi.rate - lo.rate);
}

RDCurve build_rd_curve(const Source& source, const DistortionMeasure& measure,
                       const BASolverConfig& config) {
    RDCurve curve;
    curve.dmax = d_max(source, measure);

    std::vector<double> slopes = config.slope_grid;
    if (slopes.empty()) {
        // Uniform slope grid; dense enough that linear interpolation stays
        // a few 1e-6 from the true convex curve.
        const double beta_max = 45.0;
        const int count = 1400;
        for (int i = 1; i <= count; ++i) slopes.push_back(-beta_max * i / count);
    }

    curve.points.push_back(blahut_arimoto(source, measure, 0.0, config));
    for (double s : slopes) {
        if (s == 0.0) continue;
        curve.points.push_back(blahut_arimoto(source, measure, s, config));
    }
    curve.points.push_back(blahut_arimoto(source, measure, -kInf, config));

    std::sort(curve.points.begin(), curve.points.end(),
              [](const RDPoint& a, const RDPoint& b) { return a.distortion < b.distortion; });
    std::vector<RDPoint> dedup;
    for (auto& pt : curve.points) {
        if (!dedup.empty() && pt.distortion - dedup.back().distortion < 1e-15)
            continue;
        dedup.push_back(std::move(pt));
    }
    curve.points = std::move(dedup);
    return curve;
}

double conditional_rd(const std::vector<std::pair<double, Source>>& posteriors,
                      const DistortionMeasure& measure, double distortion,
                      std::size_t n_symbols, const BASolverConfig& config) {
    if (posteriors.empty()) throw std::invalid_argument("conditional_rd: no posteriors");
    if (n_symbols == 0) throw std::invalid_argument("conditional_rd: n_symbols must be >= 1");
    double wsum = 0.0;
    for (const auto& [w, src] : posteriors) {
        if (w < -1e-15) throw std::invalid_argument("conditional_rd: negative weight");
        if (src.alphabet_size() != measure.source_alphabet)
            throw std::invalid_argument("conditional_rd: alphabet mismatch");
        wsum += w;
    }
    if (std::abs(wsum - 1.0) > 1e-9) throw std::invalid_argument("conditional_rd: weights must sum to 1");

    auto solve_all = [&](double slope) {
        double total_d = 0.0, total_r = 0.0;
        for (const auto& [w, src] : posteriors) {
            if (w <= 0.0) continue;
            const RDPoint pt = blahut_arimoto(src, measure, slope, config);
            total_d += w * pt.distortion;
            total_r += w * pt.rate;
        }
        return std::make_pair(total_d, total_r);
    };

    auto [dmax_total, r0] = solve_all(0.0);
    if (distortion >= dmax_total - 1e-15) return 0.0;
    auto [dmin_total, rmin_rate] = solve_all(-kInf);
    if (distortion < dmin_total - 1e-12)
        throw std::domain_error("conditional_rd: distortion below the achievable minimum");
    if (distortion <= dmin_total + 1e-15) return rmin_rate / static_cast<double>(n_symbols);

    double beta_lo = 0.0, beta_hi = 1.0;
    auto [dh, rh] = solve_all(-beta_hi);
    int guard = 0;
    while (dh > distortion) {
        beta_lo = beta_hi;
        beta_hi *= 2.0;
        if (++guard > 60) throw std::runtime_error("conditional_rd: bracket failure");
        std::tie(dh, rh) = solve_all(-beta_hi);
    }
    double best = rh + beta_hi * (dh - distortion);
    for (int it = 0; it < 200 && beta_hi - beta_lo > 1e-12 * (1.0 + beta_hi); ++it) {
        const double mid = 0.5 * (beta_lo + beta_hi);
        auto [dm, rm] = solve_all(-mid);
        best = std::max(best, rm + mid * (dm - distortion));
        if (dm > distortion)
            beta_lo = mid;
        else
            beta_hi = mid;
        if (std::abs(dm - distortion) < 1e-13) break;
    }
    return std::max(0.0, best) / static_cast<double>(n_symbols);
}

} // namespace henchsim
