#ifndef HENCHSIM_HENCHMAN_ATTACKS_HPP
#define HENCHSIM_HENCHMAN_ATTACKS_HPP

#include <string>
#include <utility>
#include <vector>

#include "henchsim/cipher_codec.hpp"
#include "henchsim/rng.hpp"
#include "henchsim/source_model.hpp"

namespace henchsim {

// What the henchman and wiretapper jointly see: l source blocks and the
// public messages, plus the (public) codebook. Keys are never included;
// encode_success is simulation bookkeeping for reports, not attack input.
struct SuperblockObservation {
    const Codebook* codebook = nullptr;
    std::vector<Sequence> source_blocks;
    std::vector<CipherMessage> messages;
    std::vector<bool> encode_success;

    std::size_t num_blocks() const { return source_blocks.size(); }
    std::size_t block_length() const { return codebook->n; }
    std::size_t total_symbols() const { return num_blocks() * block_length(); }
};

struct SimulatedSuperblock {
    SuperblockObservation obs;
    std::vector<std::uint64_t> keys;  // receiver-side bookkeeping only
};

SimulatedSuperblock simulate_superblock(const Codebook& cb, std::size_t l, double delta,
                                        RngStream& rng);

struct AttackResult {
    std::string strategy;
    double budget = 0.0;      // offered bits per source symbol
    double rate_spent = 0.0;  // bits per source symbol actually used
    double budget_excess = 0.0;  // budget minus the nominal requirement
    std::vector<Sequence> reconstruction;
    std::vector<double> block_distortions;
    double superblock_distortion = 0.0;
    bool success = false;  // superblock distortion within the attack's target
};

// Sends the within-bin index of each block (ceil(log2 bin_size) bits per
// block). Blocks whose bin holds no copy of the source fall back to the
// closest codeword in the bin.
AttackResult key_index_attack(const SuperblockObservation& obs, const DistortionMeasure& measure,
                              double d_e);

// Ignores the messages: random covering over the whole superblock with
// 2^floor(nl * rate_budget) reconstruction words drawn i.i.d. from the
// R(d_target)-achieving output marginal; sends the index of the best word.
AttackResult rd_attack(const SuperblockObservation& obs, const DistortionMeasure& measure,
                       double d_target, double rate_budget, RngStream& rng,
                       int max_codebook_log2 = 26);

// Key-index on the first ceil((1-lambda) l) blocks, covering on the rest.
AttackResult timesharing_attack(const SuperblockObservation& obs, const DistortionMeasure& measure,
                                double lambda, double d_target, double rate_budget, double d_e,
                                RngStream& rng, int max_codebook_log2 = 26);

// Smallest reconstruction list covering the requested posterior mass within
// d_e, as log2 of the list size. Exact subset search up to exact_limit list
// entries, greedy set cover (flagged) beyond.
struct CoverResult {
    double bits = 0.0;
    std::vector<Sequence> list;
    bool greedy = false;
};

CoverResult min_covering_bits(const std::vector<std::pair<Sequence, double>>& posterior,
                              const DistortionMeasure& measure, double d_e, double coverage,
                              std::size_t exact_limit = 4, std::uint64_t max_candidates = 4096);

// The same search on the exact posterior that the implemented encoder
// induces given message msg (enumerated over source blocks, keys and encoder
// randomness).
CoverResult brute_force_min_rate(const Codebook& cb, const CipherMessage& msg, double delta,
                                 const DistortionMeasure& measure, double d_e, double coverage,
                                 std::size_t exact_limit = 4, std::uint64_t max_candidates = 4096);

} // namespace henchsim

#endif
