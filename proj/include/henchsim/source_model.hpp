#ifndef HENCHSIM_SOURCE_MODEL_HPP
#define HENCHSIM_SOURCE_MODEL_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "henchsim/common.hpp"
#include "henchsim/rng.hpp"

namespace henchsim {

// Finite-alphabet memoryless source.
struct Source {
    std::vector<double> pmf;

    Source() = default;
    explicit Source(std::vector<double> probabilities);

    std::size_t alphabet_size() const { return pmf.size(); }

    static Source bernoulli(double p_one);   // symbol 1 has probability p_one
    static Source uniform(std::size_t alphabet);
    static Source from_json_text(const std::string& text);
};

// Per-letter distortion matrix d(s,z) >= 0, extended to blocks by averaging.
struct DistortionMeasure {
    std::size_t source_alphabet = 0;
    std::size_t recon_alphabet = 0;
    std::vector<double> matrix;  // row-major, source index major

    DistortionMeasure() = default;
    DistortionMeasure(std::size_t src, std::size_t rec, std::vector<double> values);

    double at(std::size_t s, std::size_t z) const { return matrix[s * recon_alphabet + z]; }
    double max_entry() const;

    static DistortionMeasure hamming(std::size_t alphabet);
    static DistortionMeasure from_json_text(const std::string& text);
};

// Symbol counts of a sequence.
struct TypeVector {
    std::vector<std::uint64_t> counts;

    std::uint64_t length() const;
    std::vector<double> empirical_pmf() const;
};

struct TypicalityParams {
    double delta = 0.25;

    explicit TypicalityParams(double d);
    TypicalityParams() = default;
};

double entropy(const Source& source);  // bits per symbol

Sequence sample_iid(const Source& source, std::size_t n, RngStream& rng);
Sequence sample_iid(const Source& source, std::size_t n, std::uint64_t seed);

TypeVector empirical_type(std::span<const Symbol> seq, std::size_t alphabet);

// Entrywise test |T(a) - P(a)| < delta*P(a); zero-probability letters must
// not appear at all.
bool is_strongly_typical(std::span<const Symbol> seq, const Source& source,
                         const TypicalityParams& params);

double block_distortion(std::span<const Symbol> s_seq, std::span<const Symbol> z_seq,
                        const DistortionMeasure& measure);

// The exact set D^n = { d(s^n,z^n) }, via joint-type enumeration.
std::vector<double> enumerate_distortion_levels(const DistortionMeasure& measure, std::size_t n,
                                                std::uint64_t max_types = 20'000'000);

// n-fold product alphabet helpers (first symbol is the most significant digit).
std::uint64_t pack_sequence(std::span<const Symbol> seq, std::size_t alphabet);
Sequence unpack_sequence(std::uint64_t index, std::size_t alphabet, std::size_t n);

// Distortion measure on the n-block super-alphabets (|S|^n x |Z|^n entries).
DistortionMeasure product_measure(const DistortionMeasure& measure, std::size_t n,
                                  std::uint64_t max_cells = 1u << 22);

} // namespace henchsim

#endif
