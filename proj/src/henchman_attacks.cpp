#include "henchsim/henchman_attacks.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "henchsim/rate_distortion.hpp"

namespace henchsim {

namespace {

int key_index_bits(std::uint64_t bin_size) {
    return bin_size <= 1 ? 0 : std::bit_width(bin_size - 1);
}

void finalize(AttackResult& res, const SuperblockObservation& obs,
              const DistortionMeasure& measure, double threshold) {
    res.block_distortions.resize(obs.num_blocks());
    double total = 0.0;
    for (std::size_t i = 0; i < obs.num_blocks(); ++i) {
        res.block_distortions[i] =
            block_distortion(obs.source_blocks[i], res.reconstruction[i], measure);
        total += res.block_distortions[i];
    }
    res.superblock_distortion = total / static_cast<double>(obs.num_blocks());
    res.success = res.superblock_distortion <= threshold + 1e-12;
}

// Best codeword in bin j_p for a given block: an exact copy if one exists,
// the distortion-minimizing codeword otherwise.
Sequence best_in_bin(const Codebook& cb, std::uint64_t jp, std::span<const Symbol> block,
                     const DistortionMeasure& measure) {
    for (std::uint64_t flat : cb.matches(block))
        if (flat / cb.bin_size == jp) return Sequence(block.begin(), block.end());
    double best_d = std::numeric_limits<double>::infinity();
    std::uint64_t best_js = 0;
    for (std::uint64_t js = 0; js < cb.bin_size; ++js) {
        const double d = block_distortion(block, cb.codeword(jp, js), measure);
        if (d < best_d) {
            best_d = d;
            best_js = js;
        }
    }
    const auto cw = cb.codeword(jp, best_js);
    return Sequence(cw.begin(), cw.end());
}

bool is_binary_hamming(const DistortionMeasure& m) {
    return m.source_alphabet == 2 && m.recon_alphabet == 2 && m.at(0, 0) == 0.0 &&
           m.at(1, 1) == 0.0 && m.at(0, 1) == 1.0 && m.at(1, 0) == 1.0;
}

// min over 2^bits i.i.d. marginal-distributed words of d(target, word).
// Binary Hamming targets are bit-packed; a uniform marginal is drawn one
// machine word at a time. Words are streamed, never stored.
std::pair<Sequence, double> covering_search(std::span<const Symbol> target,
                                            const DistortionMeasure& measure,
                                            const std::vector<double>& marginal, int bits,
                                            RngStream& rng) {
    const std::size_t nl = target.size();
    const std::uint64_t num_words = 1ull << bits;

    if (is_binary_hamming(measure)) {
        const std::size_t words = (nl + 63) / 64;
        std::vector<std::uint64_t> packed(words, 0);
        for (std::size_t i = 0; i < nl; ++i)
            if (target[i]) packed[i / 64] |= 1ull << (i % 64);
        const std::uint64_t tail_mask =
            (nl % 64 == 0) ? ~0ull : ((1ull << (nl % 64)) - 1);

        const double q1 = marginal[1];
        const bool uniform = std::abs(q1 - 0.5) < 1e-12;
        std::vector<std::uint64_t> cand(words), best(words, 0);
        std::uint64_t best_dist = std::numeric_limits<std::uint64_t>::max();
        for (std::uint64_t w = 0; w < num_words && best_dist > 0; ++w) {
            if (uniform) {
                for (auto& c : cand) c = rng.next_u64();
            } else {
                for (std::size_t k = 0; k < words; ++k) {
                    std::uint64_t c = 0;
                    const std::size_t lim = std::min<std::size_t>(64, nl - k * 64);
                    for (std::size_t b = 0; b < lim; ++b)
                        if (rng.next_double() < q1) c |= 1ull << b;
                    cand[k] = c;
                }
            }
            cand[words - 1] &= tail_mask;
            std::uint64_t dist = 0;
            for (std::size_t k = 0; k < words; ++k) {
                std::uint64_t x = cand[k] ^ packed[k];
                if (k + 1 == words) x &= tail_mask;
                dist += static_cast<std::uint64_t>(std::popcount(x));
            }
            if (dist < best_dist) {
                best_dist = dist;
                best = cand;
            }
        }
        Sequence recon(nl);
        for (std::size_t i = 0; i < nl; ++i) recon[i] = (best[i / 64] >> (i % 64)) & 1;
        return {std::move(recon), static_cast<double>(best_dist) / static_cast<double>(nl)};
    }

    Sequence cand(nl), best_seq(nl, 0);
    double best_d = std::numeric_limits<double>::infinity();
    for (std::uint64_t w = 0; w < num_words && best_d > 0.0; ++w) {
        double total = 0.0;
        for (std::size_t i = 0; i < nl; ++i) {
            cand[i] = static_cast<Symbol>(rng.sample_pmf(marginal));
            total += measure.at(target[i], cand[i]);
        }
        const double d = total / static_cast<double>(nl);
        if (d < best_d) {
            best_d = d;
            best_seq = cand;
        }
    }
    return {std::move(best_seq), best_d};
}

std::vector<double> covering_marginal(const Source& source, const DistortionMeasure& measure,
                                      double d_target) {
    const RDPoint pt = rd_at_distortion(source, measure, d_target);
    std::vector<double> marginal(measure.recon_alphabet, 0.0);
    for (std::size_t s = 0; s < measure.source_alphabet; ++s)
        for (std::size_t v = 0; v < measure.recon_alphabet; ++v)
            marginal[v] += source.pmf[s] * pt.test_channel[s * measure.recon_alphabet + v];
    double sum = 0.0;
    for (double v : marginal) sum += v;
    for (auto& v : marginal) v /= sum;
    return marginal;
}

} // namespace

SimulatedSuperblock simulate_superblock(const Codebook& cb, std::size_t l, double delta,
                                        RngStream& rng) {
    if (l == 0) throw std::invalid_argument("simulate_superblock: l must be >= 1");
    SimulatedSuperblock sim;
    sim.obs.codebook = &cb;
    sim.obs.source_blocks.reserve(l);
    sim.obs.messages.reserve(l);
    sim.keys.reserve(l);
    for (std::size_t i = 0; i < l; ++i) {
        sim.obs.source_blocks.push_back(sample_iid(cb.source, cb.n, rng));
        const std::uint64_t key = rng.next_below(cb.bin_size);
        const EncodeOutcome out = encode(sim.obs.source_blocks.back(), key, cb, delta, rng);
        sim.obs.messages.push_back(out.message);
        sim.obs.encode_success.push_back(out.success);
        sim.keys.push_back(key);
    }
    return sim;
}

AttackResult key_index_attack(const SuperblockObservation& obs, const DistortionMeasure& measure,
                              double d_e) {
    const Codebook& cb = *obs.codebook;
    AttackResult res;
    res.strategy = "key-index";
    const int kb = key_index_bits(cb.bin_size);
    res.rate_spent = static_cast<double>(kb) / static_cast<double>(cb.n);
    res.budget = res.rate_spent;
    res.budget_excess = res.budget - cb.key_rate;
    res.reconstruction.reserve(obs.num_blocks());
    for (std::size_t i = 0; i < obs.num_blocks(); ++i)
        res.reconstruction.push_back(
            best_in_bin(cb, obs.messages[i].j_p, obs.source_blocks[i], measure));
    finalize(res, obs, measure, d_e);
    return res;
}

AttackResult rd_attack(const SuperblockObservation& obs, const DistortionMeasure& measure,
                       double d_target, double rate_budget, RngStream& rng,
                       int max_codebook_log2) {
    if (rate_budget < 0.0) throw std::invalid_argument("rd_attack: budget must be >= 0");
    const std::size_t nl = obs.total_symbols();
    const int bits = static_cast<int>(static_cast<double>(nl) * rate_budget + 1e-9);
    if (bits > max_codebook_log2)
        throw cap_exceeded_error("rd_attack: covering codebook exceeds cap");

    Sequence target;
    target.reserve(nl);
    for (const auto& b : obs.source_blocks) target.insert(target.end(), b.begin(), b.end());

    const auto marginal = covering_marginal(obs.codebook->source, measure, d_target);
    auto [recon, dist] = covering_search(target, measure, marginal, bits, rng);
    (void)dist;

    AttackResult res;
    res.strategy = "rd-covering";
    res.budget = rate_budget;
    res.rate_spent = static_cast<double>(bits) / static_cast<double>(nl);
    res.budget_excess = rate_budget - rd_at_distortion(obs.codebook->source, measure, d_target).rate;
    const std::size_t n = obs.block_length();
    res.reconstruction.resize(obs.num_blocks());
    for (std::size_t i = 0; i < obs.num_blocks(); ++i)
        res.reconstruction[i] = Sequence(recon.begin() + i * n, recon.begin() + (i + 1) * n);
    finalize(res, obs, measure, d_target);
    return res;
}

AttackResult timesharing_attack(const SuperblockObservation& obs, const DistortionMeasure& measure,
                                double lambda, double d_target, double rate_budget, double d_e,
                                RngStream& rng, int max_codebook_log2) {
    if (lambda < 0.0 || lambda > 1.0)
        throw std::invalid_argument("timesharing_attack: lambda must be in [0,1]");
    const Codebook& cb = *obs.codebook;
    const std::size_t l = obs.num_blocks();
    const std::size_t n = obs.block_length();
    const std::size_t l_key = static_cast<std::size_t>(
        std::ceil((1.0 - lambda) * static_cast<double>(l) - 1e-9));
    const std::size_t l_rd = l - l_key;

    const int kb = key_index_bits(cb.bin_size);
    const std::uint64_t total_bits =
        static_cast<std::uint64_t>(static_cast<double>(n * l) * rate_budget + 1e-9);
    const std::uint64_t key_bits = static_cast<std::uint64_t>(l_key) * kb;
    if (key_bits > total_bits)
        throw std::invalid_argument("timesharing_attack: budget insufficient for the key-index part");

    AttackResult res;
    res.strategy = "timesharing";
    res.budget = rate_budget;
    res.reconstruction.resize(l);
    for (std::size_t i = 0; i < l_key; ++i)
        res.reconstruction[i] = best_in_bin(cb, obs.messages[i].j_p, obs.source_blocks[i], measure);

    std::uint64_t rd_bits = 0;
    if (l_rd > 0) {
        rd_bits = std::min<std::uint64_t>(total_bits - key_bits,
                                          static_cast<std::uint64_t>(max_codebook_log2));
        Sequence target;
        target.reserve(l_rd * n);
        for (std::size_t i = l_key; i < l; ++i)
            target.insert(target.end(), obs.source_blocks[i].begin(), obs.source_blocks[i].end());
        const auto marginal = covering_marginal(cb.source, measure, d_target);
        auto [recon, dist] = covering_search(target, measure, marginal,
                                             static_cast<int>(rd_bits), rng);
        (void)dist;
        for (std::size_t i = 0; i < l_rd; ++i)
            res.reconstruction[l_key + i] =
                Sequence(recon.begin() + i * n, recon.begin() + (i + 1) * n);
    }

    res.rate_spent = static_cast<double>(key_bits + rd_bits) / static_cast<double>(n * l);
    const double nominal = (1.0 - lambda) * (static_cast<double>(kb) / n) +
                           lambda * rd_at_distortion(cb.source, measure, d_target).rate;
    res.budget_excess = rate_budget - nominal;
    finalize(res, obs, measure, d_e);
    return res;
}

namespace {

double choose_count(std::uint64_t n, std::uint64_t k) {
    double c = 1.0;
    for (std::uint64_t i = 0; i < k; ++i) c *= static_cast<double>(n - i) / static_cast<double>(i + 1);
    return c;
}

// mass covered by candidate subsets; cover[c] lists posterior indices within d_e of candidate c
double covered_mass(const std::vector<std::size_t>& picked,
                    const std::vector<std::vector<std::size_t>>& cover,
                    const std::vector<double>& mass, std::vector<char>& scratch) {
    std::fill(scratch.begin(), scratch.end(), 0);
    for (std::size_t c : picked)
        for (std::size_t s : cover[c]) scratch[s] = 1;
    double total = 0.0;
    for (std::size_t s = 0; s < mass.size(); ++s)
        if (scratch[s]) total += mass[s];
    return total;
}

bool exact_search(std::size_t k, std::size_t start, std::vector<std::size_t>& picked,
                  const std::vector<std::vector<std::size_t>>& cover,
                  const std::vector<double>& mass, double target, std::vector<char>& scratch,
                  std::vector<std::size_t>& found) {
    if (picked.size() == k) {
        if (covered_mass(picked, cover, mass, scratch) >= target) {
            found = picked;
            return true;
        }
        return false;
    }
    for (std::size_t c = start; c < cover.size(); ++c) {
        picked.push_back(c);
        if (exact_search(k, c + 1, picked, cover, mass, target, scratch, found)) return true;
        picked.pop_back();
    }
    return false;
}

} // namespace

CoverResult min_covering_bits(const std::vector<std::pair<Sequence, double>>& posterior,
                              const DistortionMeasure& measure, double d_e, double coverage,
                              std::size_t exact_limit, std::uint64_t max_candidates) {
    if (posterior.empty()) throw std::invalid_argument("min_covering_bits: empty posterior");
    if (coverage <= 0.0 || coverage > 1.0)
        throw std::invalid_argument("min_covering_bits: coverage must be in (0,1]");
    const std::size_t n = posterior.front().first.size();

    double z_space = 1.0;
    for (std::size_t i = 0; i < n; ++i) z_space *= static_cast<double>(measure.recon_alphabet);
    if (z_space > static_cast<double>(max_candidates))
        throw cap_exceeded_error("min_covering_bits: candidate space exceeds cap");
    const std::uint64_t num_z = static_cast<std::uint64_t>(z_space);

    std::vector<double> mass(posterior.size());
    for (std::size_t s = 0; s < posterior.size(); ++s) mass[s] = posterior[s].second;

    std::vector<std::vector<std::size_t>> cover(num_z);
    for (std::uint64_t zi = 0; zi < num_z; ++zi) {
        const Sequence z = unpack_sequence(zi, measure.recon_alphabet, n);
        for (std::size_t s = 0; s < posterior.size(); ++s)
            if (block_distortion(posterior[s].first, z, measure) <= d_e + 1e-12)
                cover[zi].push_back(s);
    }

    const double target = coverage - 1e-12;
    std::vector<char> scratch(posterior.size());
    for (std::size_t k = 1; k <= exact_limit && k <= num_z; ++k) {
        if (choose_count(num_z, k) > 2e6) break;
        std::vector<std::size_t> picked, found;
        if (exact_search(k, 0, picked, cover, mass, target, scratch, found)) {
            CoverResult res;
            res.bits = std::log2(static_cast<double>(k));
            res.greedy = false;
            for (std::size_t c : found)
                res.list.push_back(unpack_sequence(c, measure.recon_alphabet, n));
            return res;
        }
    }

    // greedy set cover, verified by recomputing the final mass
    std::vector<std::size_t> picked;
    std::vector<char> done(posterior.size(), 0);
    double have = 0.0;
    while (have < target && picked.size() < num_z) {
        std::size_t best_c = 0;
        double best_gain = -1.0;
        for (std::uint64_t c = 0; c < num_z; ++c) {
            double gain = 0.0;
            for (std::size_t s : cover[c])
                if (!done[s]) gain += mass[s];
            if (gain > best_gain) {
                best_gain = gain;
                best_c = c;
            }
        }
        if (best_gain <= 0.0) break;
        picked.push_back(best_c);
        for (std::size_t s : cover[best_c]) done[s] = 1;
        have += best_gain;
    }
    if (covered_mass(picked, cover, mass, scratch) < target)
        throw std::runtime_error("min_covering_bits: greedy cover failed to reach coverage");
    CoverResult res;
    res.bits = std::log2(static_cast<double>(picked.size()));
    res.greedy = true;
    for (std::size_t c : picked) res.list.push_back(unpack_sequence(c, measure.recon_alphabet, n));
    return res;
}

CoverResult brute_force_min_rate(const Codebook& cb, const CipherMessage& msg, double delta,
                                 const DistortionMeasure& measure, double d_e, double coverage,
                                 std::size_t exact_limit, std::uint64_t max_candidates) {
    const MessagePosterior mp = message_posterior(cb, delta, max_candidates);
    const std::uint64_t m = msg.j_p * cb.bin_size + msg.m_s;
    if (m >= mp.posterior.size()) throw std::invalid_argument("brute_force_min_rate: bad message");
    std::vector<std::pair<Sequence, double>> posterior;
    for (std::size_t si = 0; si < mp.posterior[m].size(); ++si)
        if (mp.posterior[m][si] > 1e-15)
            posterior.emplace_back(unpack_sequence(si, cb.source.alphabet_size(), cb.n),
                                   mp.posterior[m][si]);
    return min_covering_bits(posterior, measure, d_e, coverage, exact_limit, max_candidates);
}

} // namespace henchsim
