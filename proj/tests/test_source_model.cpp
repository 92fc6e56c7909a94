#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>

#include "henchsim/source_model.hpp"

using namespace henchsim;

TEST_CASE("entropy of basic sources") {
    CHECK(entropy(Source::bernoulli(0.5)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(entropy(Source({1.0})) == 0.0);
    // direct evaluation of -0.2 log2 0.2 - 0.8 log2 0.8
    const double h02 = -(0.2 * std::log2(0.2) + 0.8 * std::log2(0.8));
    CHECK(entropy(Source::bernoulli(0.2)) == doctest::Approx(h02).epsilon(1e-14));
    CHECK(h02 == doctest::Approx(0.7219280949).epsilon(1e-9));
}

TEST_CASE("entropy is maximized by the uniform pmf") {
    RngStream rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t k = 2 + rng.next_below(6);
        std::vector<double> p(k);
        double sum = 0.0;
        for (auto& v : p) {
            v = rng.next_double() + 1e-3;
            sum += v;
        }
        for (auto& v : p) v /= sum;
        // renormalize exactly enough for the constructor
        double s2 = 0.0;
        for (double v : p) s2 += v;
        p.back() += 1.0 - s2;
        CHECK(entropy(Source(p)) <= std::log2(double(k)) + 1e-12);
    }
    CHECK(entropy(Source::uniform(8)) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("source validation") {
    CHECK_THROWS_AS(Source({0.5, 0.2}), std::invalid_argument);
    CHECK_THROWS_AS(Source({-0.1, 1.1}), std::invalid_argument);
    CHECK_THROWS_AS(Source(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("sample_iid determinism and degenerate source") {
    const Source degenerate({1.0});
    CHECK(sample_iid(degenerate, 5, 7) == Sequence({0, 0, 0, 0, 0}));

    const Source fair = Source::bernoulli(0.5);
    const auto a = sample_iid(fair, 1000, 42);
    const auto b = sample_iid(fair, 1000, 42);
    CHECK(a == b);
    CHECK(a != sample_iid(fair, 1000, 43));
}

TEST_CASE("sample_iid law of large numbers") {
    const Source fair = Source::bernoulli(0.5);
    const auto seq = sample_iid(fair, 100000, 3);
    const auto type = empirical_type(seq, 2);
    const auto emp = type.empirical_pmf();
    CHECK(std::abs(emp[0] - 0.5) < 0.02);
    CHECK(std::abs(emp[1] - 0.5) < 0.02);
}

TEST_CASE("empirical_type") {
    const Sequence s{0, 1, 0, 1};
    const auto t = empirical_type(s, 2);
    CHECK(t.counts == std::vector<std::uint64_t>({2, 2}));
    CHECK(t.length() == 4);

    const Sequence z{0, 0, 0};
    CHECK(empirical_type(z, 2).counts == std::vector<std::uint64_t>({3, 0}));

    const Sequence bad{0, 2};
    CHECK_THROWS_AS(empirical_type(bad, 2), std::out_of_range);
    CHECK_THROWS_AS(empirical_type(Sequence{}, 2), std::invalid_argument);
}

TEST_CASE("strong typicality") {
    const Source fair = Source::bernoulli(0.5);
    const Source biased = Source::bernoulli(0.2);

    // exact type match passes for every delta
    const Sequence exact{1, 0, 0, 0, 0};  // type (0.8, 0.2)
    for (double delta : {0.01, 0.1, 0.5, 0.99})
        CHECK(is_strongly_typical(exact, biased, TypicalityParams(delta)));

    const Sequence zeros(10, 0);
    CHECK_FALSE(is_strongly_typical(zeros, fair, TypicalityParams(0.1)));

    Sequence two_ones(10, 0);
    two_ones[3] = 1;
    two_ones[7] = 1;
    CHECK(is_strongly_typical(two_ones, biased, TypicalityParams(0.25)));

    Sequence three_ones = two_ones;
    three_ones[5] = 1;  // |0.3 - 0.2| = 0.1 >= 0.25*0.2
    CHECK_FALSE(is_strongly_typical(three_ones, biased, TypicalityParams(0.25)));

    // zero-probability letters must not appear, regardless of delta
    const Source with_hole({0.5, 0.5, 0.0});
    const Sequence hole_free{0, 1, 0, 1};
    const Sequence with_sym2{0, 1, 2, 1};
    CHECK(is_strongly_typical(hole_free, with_hole, TypicalityParams(0.9)));
    CHECK_FALSE(is_strongly_typical(with_sym2, with_hole, TypicalityParams(0.9)));
}

TEST_CASE("typicality frequency grows with blocklength") {
    const Source biased = Source::bernoulli(0.2);
    const TypicalityParams params(0.25);
    RngStream rng(2024);
    double prev = -1.0;
    for (std::size_t n : {8u, 16u, 32u, 64u}) {
        int hits = 0;
        const int trials = 4000;
        for (int t = 0; t < trials; ++t) {
            auto stream = rng.derive(n * 100000 + t);
            const auto seq = sample_iid(biased, n, stream);
            if (is_strongly_typical(seq, biased, params)) ++hits;
        }
        const double freq = double(hits) / trials;
        CHECK(freq >= prev);
        prev = freq;
    }
    CHECK(prev > 0.5);
}

TEST_CASE("block distortion") {
    const auto hamming = DistortionMeasure::hamming(2);
    const Sequence a{0, 1, 0, 1};
    const Sequence b{0, 1, 1, 1};
    CHECK(block_distortion(a, a, hamming) == 0.0);
    CHECK(block_distortion(Sequence{0, 0, 0, 0}, Sequence{1, 1, 1, 1}, hamming) == 1.0);
    CHECK(block_distortion(a, b, hamming) == doctest::Approx(0.25));
    CHECK_THROWS_AS(block_distortion(a, Sequence{0, 1}, hamming), std::invalid_argument);
}

TEST_CASE("distortion level enumeration, binary Hamming") {
    const auto hamming = DistortionMeasure::hamming(2);
    const auto levels4 = enumerate_distortion_levels(hamming, 4);
    CHECK(levels4.size() == 5);
    for (std::size_t k = 0; k < 5; ++k)
        CHECK(levels4[k] == doctest::Approx(k / 4.0).epsilon(1e-12));

    CHECK(enumerate_distortion_levels(hamming, 100).size() == 101);  // <= (n+1)^4
}

TEST_CASE("distortion level enumeration, n=1 general matrix") {
    const DistortionMeasure m(2, 3, {0.0, 0.3, 0.7, 0.3, 0.0, 1.5});
    const auto levels = enumerate_distortion_levels(m, 1);
    CHECK(levels == std::vector<double>({0.0, 0.3, 0.7, 1.5}));
}

TEST_CASE("distortion level enumeration matches brute force at small n") {
    RngStream rng(5);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<double> entries(4);
        for (auto& e : entries) e = std::round(rng.next_double() * 8.0) / 4.0;
        const DistortionMeasure m(2, 2, entries);
        for (std::size_t n = 1; n <= 4; ++n) {
            std::set<double> brute;
            const std::uint64_t total = 1ull << n;
            for (std::uint64_t si = 0; si < total; ++si)
                for (std::uint64_t zi = 0; zi < total; ++zi)
                    brute.insert(block_distortion(unpack_sequence(si, 2, n),
                                                  unpack_sequence(zi, 2, n), m));
            const auto levels = enumerate_distortion_levels(m, n);
            REQUIRE(levels.size() == brute.size());
            std::size_t i = 0;
            for (double b : brute) CHECK(levels[i++] == doctest::Approx(b).epsilon(1e-10));
        }
    }
}

TEST_CASE("distortion level enumeration cap") {
    const auto m = DistortionMeasure::hamming(4);
    CHECK_THROWS_AS(enumerate_distortion_levels(m, 50, 1000), cap_exceeded_error);
}

TEST_CASE("sequence packing round trip") {
    RngStream rng(9);
    for (int t = 0; t < 100; ++t) {
        const std::size_t alphabet = 2 + rng.next_below(3);
        const std::size_t n = 1 + rng.next_below(8);
        Sequence seq(n);
        for (auto& s : seq) s = static_cast<Symbol>(rng.next_below(alphabet));
        CHECK(unpack_sequence(pack_sequence(seq, alphabet), alphabet, n) == seq);
    }
}

TEST_CASE("product measure extends block distortion") {
    const auto hamming = DistortionMeasure::hamming(2);
    const auto m2 = product_measure(hamming, 2);
    CHECK(m2.source_alphabet == 4);
    CHECK(m2.recon_alphabet == 4);
    for (std::uint64_t si = 0; si < 4; ++si)
        for (std::uint64_t zi = 0; zi < 4; ++zi)
            CHECK(m2.at(si, zi) ==
                  doctest::Approx(block_distortion(unpack_sequence(si, 2, 2),
                                                   unpack_sequence(zi, 2, 2), hamming)));
    CHECK_THROWS_AS(product_measure(hamming, 16, 1000), cap_exceeded_error);
}

TEST_CASE("json loading") {
    const auto src = Source::from_json_text(R"({"pmf": [0.25, 0.75]})");
    CHECK(src.pmf == std::vector<double>({0.25, 0.75}));
    const auto m = DistortionMeasure::from_json_text(R"({"distortion": [[0, 1], [1, 0]]})");
    CHECK(m.at(0, 1) == 1.0);
    CHECK(m.at(1, 1) == 0.0);
}
