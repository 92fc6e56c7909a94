#ifndef HENCHSIM_HARNESS_HPP
#define HENCHSIM_HARNESS_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "henchsim/cipher_codec.hpp"
#include "henchsim/csv.hpp"
#include "henchsim/henchman_attacks.hpp"
#include "henchsim/security_region.hpp"
#include "henchsim/source_model.hpp"

namespace henchsim {

inline constexpr const char* kArtifactVersion = "0.1.0";

// Canned experiments: region-surface, rd-curve, roundtrip, codebook-audit,
// attack-sweep, equivocation-tiny, lemma-trends.
struct ExperimentConfig {
    std::string experiment;
    std::vector<double> pmf{0.5, 0.5};
    std::optional<std::vector<std::vector<double>>> distortion;  // default: Hamming
    std::size_t n = 10;
    std::size_t l = 20;
    double rate = 1.5;
    double key_rate = 0.3;
    double delta = 0.9;
    double eps = 0.15;
    double d_e = 0.1;
    std::vector<double> budgets;      // attack-sweep budgets, bits/symbol
    int trials = 50;
    std::uint64_t seed = 1;
    std::string out_dir = ".";
    std::vector<double> rk_grid;      // region-surface, default 51 points on [0,1]
    std::vector<double> de_grid;      // region-surface, default 51 points on [0,1/2]
    std::vector<std::size_t> n_list{8, 12, 16};  // lemma-trends blocklengths
    double lambda_step = 0.1;         // timesharing grid in the attack sweep
    int attack_cap_log2 = 24;         // covering codebook cap, log2 words

    Source source() const { return Source(pmf); }
    DistortionMeasure measure() const;

    // tuned starting point for a named experiment (the CLI uses this when no
    // config file is given, so every experiment runs sensibly out of the box)
    static ExperimentConfig canned(const std::string& experiment);
    static ExperimentConfig from_json_text(const std::string& text);
    std::string to_json_text() const;
    std::string digest() const;  // fnv1a64 over the canonical json echo
};

struct RunManifest {
    std::string experiment;
    std::string config_json;
    std::string config_digest;
    std::string version;
    std::vector<std::uint64_t> trial_seeds;
    double wall_seconds = 0.0;
    std::map<std::string, std::string> output_digests;  // file name -> fnv1a64 hex

    void write(const std::string& path) const;
};

// Dispatches to the named experiment; deterministic given the master seed
// and independent of the worker count. Emitted CSV files land in out_dir.
RunManifest run_experiment(const ExperimentConfig& config);

// Deterministic helper: results must be written by index; the callable runs
// on `workers` threads (0 = hardware concurrency).
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn,
                  unsigned workers = 0);

// -- attack sweep internals, reused by the acceptance suite --

struct AttackSweepSpec {
    Source source = Source::bernoulli(0.5);
    DistortionMeasure measure = DistortionMeasure::hamming(2);
    std::size_t n = 10;
    std::size_t l = 20;
    double rate = 1.5;
    double key_rate = 0.3;
    double delta = 0.9;
    double d_e = 0.1;
    double lambda_step = 0.05;
    int trials = 200;
    std::uint64_t seed = 1;
    int cap_log2 = 26;
};

struct SweepRow {
    std::string strategy;
    double lambda = 0.0;  // meaningful for timesharing rows
    double budget = 0.0;
    bool runnable = true;
    int runs = 0;
    int successes = 0;
    double mean_distortion = 0.0;
    double mean_rate_spent = 0.0;

    double success_frequency() const {
        return runs ? static_cast<double>(successes) / runs : 0.0;
    }
};

// Every implemented attack at one budget: key-index, pure covering, and the
// timesharing grid (grid endpoints are the pure strategies and not repeated).
std::vector<SweepRow> sweep_budget(const AttackSweepSpec& spec, double budget,
                                   Csv* per_trial_rows = nullptr);

// Cheapest-first scan of the same family that stops as soon as one strategy
// reaches `threshold` success frequency over the full trial count.
SweepRow best_attack_at_budget(const AttackSweepSpec& spec, double budget, double threshold);

// -- lemma trends internals, reused by the acceptance suite --

struct LemmaTrendsSpec {
    Source source = Source::bernoulli(0.2);
    DistortionMeasure measure = DistortionMeasure::hamming(2);
    std::vector<std::size_t> n_list{8, 12, 16};
    double rate = 0.9;
    double key_rate = 0.3;
    double delta = 0.25;
    double eps = 0.15;
    int books = 50;
    std::uint64_t seed = 7;
};

struct LemmaTrendRow {
    std::size_t n = 0;
    int books = 0;
    double freq_a2 = 0.0;
    double freq_a3 = 0.0;
    double freq_a4 = 0.0;
    bool z_sampled = false;
};

std::vector<LemmaTrendRow> lemma_trends(const LemmaTrendsSpec& spec, Csv* per_book_rows = nullptr);

} // namespace henchsim

#endif
