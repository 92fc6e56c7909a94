#ifndef HENCHSIM_SECURITY_REGION_HPP
#define HENCHSIM_SECURITY_REGION_HPP

#include <span>
#include <vector>

#include "henchsim/cipher_codec.hpp"
#include "henchsim/rate_distortion.hpp"
#include "henchsim/source_model.hpp"

namespace henchsim {

struct RegionPoint {
    double rate = 0.0;      // R
    double key_rate = 0.0;  // R_K
    double henchman_rate = 0.0;  // R_H
    double d_e = 0.0;       // wiretapper distortion level
};

// Minimum of (1-lambda) R_K + lambda R(D) over 0 <= lambda <= 1, lambda D <= D_E.
// Solved two ways: a direct lambda sweep with local refinement (value,
// lambda_star, d_star) and the lower convex hull of D -> min{R_K, R(D)}
// evaluated at D_E (hull_value). The two agree to within grid resolution.
struct GammaResult {
    double value = 0.0;
    double lambda_star = 0.0;
    double d_star = 0.0;
    double hull_value = 0.0;
};

GammaResult gamma(double key_rate, double d_e, const RDCurve& curve);

struct AchievabilityWitness {
    bool achievable = false;
    bool rate_ok = false;      // R >= H(S)
    bool security_ok = false;  // R_H <= Gamma(R_K, D_E)
    double source_entropy = 0.0;
    GammaResult gamma;
};

AchievabilityWitness is_achievable(const RegionPoint& pt, const Source& source,
                                   const RDCurve& curve);
AchievabilityWitness is_achievable(const RegionPoint& pt, const Source& source,
                                   const DistortionMeasure& measure);

struct SurfaceRow {
    double key_rate = 0.0;
    double d_e = 0.0;
    double gamma = 0.0;
    double lambda_star = 0.0;
    double d_star = 0.0;
};

std::vector<SurfaceRow> surface_sample(const Source& source, const DistortionMeasure& measure,
                                       std::span<const double> rk_grid,
                                       std::span<const double> de_grid);

// Key rate at and above which the cipher is perfectly secret (H(S)).
double perfect_secrecy_threshold(const Source& source);

// Exact distortion-constrained equivocation of an implemented code at tiny n:
// posteriors P[S^n | M] are enumerated and the optimal conditional rate at
// distortion d_e is returned in bits per symbol.
double r_de_estimate(const Codebook& cb, const DistortionMeasure& measure, double delta,
                     double d_e, std::uint64_t max_super_alphabet = 16);

} // namespace henchsim

#endif
