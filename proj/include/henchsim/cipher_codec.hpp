#ifndef HENCHSIM_CIPHER_CODEC_HPP
#define HENCHSIM_CIPHER_CODEC_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "henchsim/common.hpp"
#include "henchsim/rng.hpp"
#include "henchsim/source_model.hpp"

namespace henchsim {

// Random (n, R, R_K) code: 2^{nR} i.i.d. source-distributed codewords split
// into contiguous bins of size 2^{nR_K}. Sizes are floored and the remainder
// beyond num_bins*bin_size is dropped so that every codeword has a full
// (j_p, j_s) address; the trimmed rate loss is at most 2/n bits.
struct Codebook {
    Source source;
    std::size_t n = 0;
    double rate = 0.0;
    double key_rate = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t num_bins = 0;
    std::uint64_t bin_size = 0;
    std::vector<Symbol> symbols;  // num_codewords() * n, flat index major

    std::uint64_t num_codewords() const { return num_bins * bin_size; }
    std::span<const Symbol> codeword(std::uint64_t flat) const {
        return {symbols.data() + flat * n, n};
    }
    std::span<const Symbol> codeword(std::uint64_t j_p, std::uint64_t j_s) const {
        return codeword(j_p * bin_size + j_s);
    }
    double rate_loss_bits() const;  // log2(floor(2^{nR})) - log2(num_codewords)

    // flat indices of every codeword equal to seq (empty when absent)
    std::span<const std::uint64_t> matches(std::span<const Symbol> seq) const;

private:
    friend Codebook generate_codebook(const Source&, std::size_t, double, double, std::uint64_t,
                                      std::uint64_t);
    friend Codebook load_codebook(const std::string&);
    void build_index();
    std::unordered_map<std::string, std::vector<std::uint64_t>> index_;
};

struct CipherMessage {
    std::uint64_t j_p = 0;  // public bin index
    std::uint64_t m_s = 0;  // one-time-padded within-bin index

    bool operator==(const CipherMessage&) const = default;
};

struct EncodeOutcome {
    CipherMessage message;
    bool success = false;
};

Codebook generate_codebook(const Source& source, std::size_t n, double rate, double key_rate,
                           std::uint64_t seed, std::uint64_t max_bytes = 1ull << 26);

// Typicality encoder: if some (j_p, j_s) holds a delta-typical copy of the
// block, one such pair is chosen uniformly and j_s is padded with the key;
// otherwise a uniformly random full index is sent and success is false.
EncodeOutcome encode(std::span<const Symbol> block, std::uint64_t key, const Codebook& cb,
                     double delta, RngStream& rng);

Sequence decode(const CipherMessage& msg, std::uint64_t key, const Codebook& cb);

// Codebook audit: extrema of the per-bin counting functions
// against their exponential thresholds.
struct AuditReport {
    double delta = 0.0;
    double eps = 0.0;
    std::vector<double> levels;
    std::vector<std::uint64_t> max_eta;       // per level, over (bin, z^n)
    std::vector<double> eta_thresholds;       // 2^{n([R_K - R(D)]^+ + eps)}
    std::uint64_t min_gamma = 0;              // typical codewords in the worst bin
    double gamma_threshold = 0.0;             // (1-eps) 2^{nR_K}
    std::uint64_t max_phi = 0;                // codeword multiplicity extrema over typical s^n
    std::uint64_t min_phi = 0;
    double phi_upper = 0.0;                   // 2^{n(R - H(S) + eps)}
    double phi_lower = 0.0;                   // 2^{n(R - H(S) - eps)}
    bool a2 = false;
    bool a3 = false;
    bool a4 = false;
    bool typical_set_empty = false;
    bool z_sampled = false;                   // true when z^n space was sampled, not exhausted
    std::uint64_t z_candidates = 0;
};

struct AuditOptions {
    std::uint64_t z_exhaustive_cap = 16384;  // exhaust |Z|^n up to this many sequences
    std::uint64_t z_sample_count = 4096;     // stratified sample size beyond the cap
    std::uint64_t typical_enum_cap = 1ull << 22;  // cap on |S|^n for the phi scan
    double max_work = 4e9;                   // cap on z_candidates * codewords
    std::uint64_t seed = 0x5eed;
};

AuditReport audit(const Codebook& cb, double delta, double eps, std::span<const double> levels,
                  const DistortionMeasure& measure, const AuditOptions& options = {});

// Exact joint law of (S^n, M) under the implemented encoder with a uniform
// key, for super-alphabets small enough to enumerate. posterior[m][s_index]
// is P[S^n = s | M = m]; message order is j_p * bin_size + m_s.
struct MessagePosterior {
    std::vector<double> message_prob;
    std::vector<std::vector<double>> posterior;
};

MessagePosterior message_posterior(const Codebook& cb, double delta,
                                   std::uint64_t max_super_alphabet = 4096);

// Binary cache format; regeneration from (seed, params) is bit-exact, so the
// file is optional.
void save_codebook(const Codebook& cb, const std::string& path);
Codebook load_codebook(const std::string& path);

} // namespace henchsim

#endif
