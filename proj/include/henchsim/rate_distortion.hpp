#ifndef HENCHSIM_RATE_DISTORTION_HPP
#define HENCHSIM_RATE_DISTORTION_HPP

#include <utility>
#include <vector>

#include "henchsim/source_model.hpp"

namespace henchsim {

// One solved point of the rate-distortion tradeoff.
struct RDPoint {
    double distortion = 0.0;
    double rate = 0.0;                 // bits per symbol
    double slope = 0.0;                // dR/dD at this point, <= 0
    std::vector<double> test_channel;  // row-major p(v|s)
};

struct BASolverConfig {
    double tolerance = 1e-9;  // stop when the parametric bound gap is below this
    // At slopes where the optimal output support changes, the gap decays as
    // O(1/t^2); reaching 1e-9 takes ~2e4 iterations, so the budget is generous.
    int max_iterations = 200000;
    std::vector<double> slope_grid;  // optional explicit slopes for curve building
};

// Best constant-reconstruction distortion, i.e. the D at which R(D) = 0.
// Ties broken toward the smallest reconstruction index.
double d_max(const Source& source, const DistortionMeasure& measure);

// Minimum achievable expected distortion (per-row minima averaged).
double d_min(const Source& source, const DistortionMeasure& measure);

// Lagrangian Blahut-Arimoto at a fixed slope <= 0 (beta = -slope).
// slope = -infinity solves the minimum-distortion endpoint.
RDPoint blahut_arimoto(const Source& source, const DistortionMeasure& measure, double slope,
                       const BASolverConfig& config = {});

// R(D) by slope bisection; exact 0 for D >= d_max.
RDPoint rd_at_distortion(const Source& source, const DistortionMeasure& measure, double distortion,
                         const BASolverConfig& config = {});

// Closed form for a Bernoulli(p) source under Hamming distortion.
double binary_hamming_rd(double p, double distortion);

// Sampled convex R(D) curve with linear interpolation between solved points.
struct RDCurve {
    std::vector<RDPoint> points;  // sorted by distortion
    double dmax = 0.0;

    double rate_at(double distortion) const;
};

RDCurve build_rd_curve(const Source& source, const DistortionMeasure& measure,
                       const BASolverConfig& config = {});

// Weighted conditional rate at joint distortion budget D:
//   min sum_m w_m R_m(D_m)  subject to  sum_m w_m D_m <= D,
// where R_m is the rate-distortion function of posteriors[m]. The inputs live
// on a super-alphabet of n_symbols-blocks; the result is bits per symbol.
double conditional_rd(const std::vector<std::pair<double, Source>>& posteriors,
                      const DistortionMeasure& measure, double distortion,
                      std::size_t n_symbols, const BASolverConfig& config = {});

} // namespace henchsim

#endif
