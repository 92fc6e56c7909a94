#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "henchsim/rate_distortion.hpp"

using namespace henchsim;

namespace {

double hb(double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

} // namespace

TEST_CASE("binary_hamming_rd closed form") {
    CHECK(binary_hamming_rd(0.5, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(binary_hamming_rd(0.5, 0.5) == 0.0);
    CHECK(binary_hamming_rd(0.3, 0.1) == doctest::Approx(0.412295306).epsilon(1e-9));
    CHECK(binary_hamming_rd(0.3, 0.1) == doctest::Approx(hb(0.3) - hb(0.1)).epsilon(1e-14));
    // symmetrization
    CHECK(binary_hamming_rd(0.7, 0.1) == doctest::Approx(binary_hamming_rd(0.3, 0.1)));
}

TEST_CASE("d_max basics and tie-break") {
    const auto hamming = DistortionMeasure::hamming(2);
    CHECK(d_max(Source::bernoulli(0.5), hamming) == doctest::Approx(0.5));
    CHECK(d_max(Source::bernoulli(0.2), hamming) == doctest::Approx(0.2));
    CHECK(d_max(Source({1.0}), DistortionMeasure(1, 2, {0.0, 0.0})) == 0.0);

    // both columns tie; the smallest index must be chosen
    const DistortionMeasure tie(2, 2, {0.5, 0.5, 0.5, 0.5});
    const auto pt = blahut_arimoto(Source::bernoulli(0.5), tie, 0.0);
    CHECK(pt.test_channel[0] == 1.0);
    CHECK(pt.test_channel[2] == 1.0);
}

TEST_CASE("blahut_arimoto endpoints") {
    const auto hamming = DistortionMeasure::hamming(2);
    const Source fair = Source::bernoulli(0.5);

    const auto zero = blahut_arimoto(fair, hamming, 0.0);
    CHECK(zero.rate == 0.0);
    CHECK(zero.distortion == doctest::Approx(0.5));

    const auto lossless = rd_at_distortion(fair, hamming, 0.0);
    CHECK(lossless.rate == doctest::Approx(1.0).epsilon(1e-9));

    const auto biased = rd_at_distortion(Source::bernoulli(0.2), hamming, 0.0);
    CHECK(biased.rate == doctest::Approx(0.7219280949).epsilon(1e-9));

    CHECK_THROWS_AS(blahut_arimoto(fair, hamming, 0.5), std::invalid_argument);
}

TEST_CASE("rd_at_distortion matches the analytic binary-Hamming curve") {
    const auto hamming = DistortionMeasure::hamming(2);
    for (double p : {0.2, 0.3, 0.5}) {
        const Source src = Source::bernoulli(p);
        for (int i = 0; i < 12; ++i) {
            const double d = p * i / 12.0;
            const auto pt = rd_at_distortion(src, hamming, d);
            CHECK(pt.rate == doctest::Approx(binary_hamming_rd(p, d)).epsilon(1e-6));
            // returned channel meets its distortion budget
            double ed = 0.0;
            for (std::size_t s = 0; s < 2; ++s)
                for (std::size_t v = 0; v < 2; ++v)
                    ed += src.pmf[s] * pt.test_channel[s * 2 + v] * hamming.at(s, v);
            CHECK(ed <= pt.distortion + 1e-9);
        }
    }
    CHECK(rd_at_distortion(Source::bernoulli(0.5), hamming, 0.11).rate ==
          doctest::Approx(1.0 - hb(0.11)).epsilon(1e-6));
    CHECK(rd_at_distortion(Source::bernoulli(0.5), hamming, 0.5).rate == 0.0);
    CHECK(rd_at_distortion(Source::bernoulli(0.5), hamming, 0.7).rate == 0.0);
}

TEST_CASE("rd curve is convex and monotone") {
    const auto hamming = DistortionMeasure::hamming(2);
    const Source src = Source::bernoulli(0.3);
    const auto curve = build_rd_curve(src, hamming);

    CHECK(curve.rate_at(0.0) == doctest::Approx(hb(0.3)).epsilon(1e-6));
    CHECK(curve.rate_at(curve.dmax) == 0.0);
    CHECK(curve.rate_at(1.0) == 0.0);

    double prev_rate = 1e9;
    for (int i = 0; i <= 60; ++i) {
        const double d = 0.3 * i / 60.0;
        const double r = curve.rate_at(d);
        CHECK(r <= prev_rate + 1e-9);  // monotone
        prev_rate = r;
    }
    // midpoint convexity on sampled pairs
    for (int i = 0; i < 20; ++i) {
        const double d1 = 0.3 * i / 40.0;
        const double d2 = 0.3 * (i + 18) / 40.0;
        const double mid = curve.rate_at(0.5 * (d1 + d2));
        CHECK(mid <= 0.5 * (curve.rate_at(d1) + curve.rate_at(d2)) + 1e-6);
    }
    // interpolated curve stays within 1e-4 of the analytic one
    for (int i = 0; i <= 100; ++i) {
        const double d = 0.3 * i / 100.0;
        CHECK(curve.rate_at(d) == doctest::Approx(binary_hamming_rd(0.3, d)).epsilon(5e-5));
    }
}

TEST_CASE("rd_at_distortion on a ternary source stays consistent") {
    const Source src({0.5, 0.3, 0.2});
    const auto hamming = DistortionMeasure::hamming(3);
    CHECK(rd_at_distortion(src, hamming, 0.0).rate == doctest::Approx(entropy(src)).epsilon(1e-9));
    double prev = 1e9;
    for (int i = 0; i <= 10; ++i) {
        const double d = 0.5 * i / 10.0;
        const double r = rd_at_distortion(src, hamming, d).rate;
        CHECK(r <= prev + 1e-9);
        prev = r;
    }
    CHECK(rd_at_distortion(src, hamming, 0.5).rate == 0.0);
}

TEST_CASE("rd_at_distortion rejects unreachable targets") {
    // no zero entries: the minimum expected distortion is 0.1, reached only
    // by the identity map, so R(0.1) = H(S) = 1
    const DistortionMeasure m(2, 2, {0.1, 1.0, 1.0, 0.1});
    const Source fair = Source::bernoulli(0.5);
    CHECK(d_min(fair, m) == doctest::Approx(0.1));
    CHECK_THROWS_AS(rd_at_distortion(fair, m, 0.01), std::domain_error);
    CHECK_THROWS_AS(rd_at_distortion(fair, m, -0.5), std::invalid_argument);
    CHECK(rd_at_distortion(fair, m, 0.1).rate == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("degenerate measure where every rate is zero") {
    // both rows minimized by column 0, so d_min = d_max and the curve is flat
    const DistortionMeasure m(2, 2, {0.0, 1.0, 0.2, 0.3});
    const Source fair = Source::bernoulli(0.5);
    CHECK(d_min(fair, m) == doctest::Approx(0.1));
    CHECK(d_max(fair, m) == doctest::Approx(0.1));
    CHECK(rd_at_distortion(fair, m, 0.1).rate == 0.0);
    CHECK(rd_at_distortion(fair, m, 0.4).rate == 0.0);
}

TEST_CASE("conditional_rd with a single posterior reduces to rd_at_distortion") {
    const auto hamming = DistortionMeasure::hamming(2);
    const Source src = Source::bernoulli(0.3);
    for (double d : {0.0, 0.05, 0.1, 0.2, 0.4}) {
        const double led = conditional_rd({{1.0, src}}, hamming, d, 1);
        CHECK(led == doctest::Approx(rd_at_distortion(src, hamming, d).rate).epsilon(1e-6));
    }
}

TEST_CASE("conditional_rd at large distortion is zero") {
    const auto hamming = DistortionMeasure::hamming(2);
    const std::vector<std::pair<double, Source>> mix{{0.5, Source::bernoulli(0.1)},
                                                     {0.5, Source::bernoulli(0.4)}};
    CHECK(conditional_rd(mix, hamming, 0.45, 1) == 0.0);
}

TEST_CASE("conditional_rd matches an exhaustive allocation oracle") {
    // two equiprobable binary posteriors, Hamming, n = 1, D = 0.05
    const std::vector<std::pair<double, Source>> mix{{0.5, Source::bernoulli(0.1)},
                                                     {0.5, Source::bernoulli(0.4)}};
    const auto hamming = DistortionMeasure::hamming(2);

    // oracle: grid over the distortion split at step 1e-4, analytic curves
    double best = 1e9;
    for (int i = 0; i <= 1000; ++i) {
        const double d1 = 1e-4 * i;
        const double d2 = (0.05 - 0.5 * d1) / 0.5;
        if (d2 < 0.0) break;
        best = std::min(best, 0.5 * binary_hamming_rd(0.1, d1) + 0.5 * binary_hamming_rd(0.4, d2));
    }
    const double value = conditional_rd(mix, hamming, 0.05, 1);
    CHECK(value == doctest::Approx(best).epsilon(1e-6));
    CHECK(value == doctest::Approx(0.4335761).epsilon(1e-4));
}
