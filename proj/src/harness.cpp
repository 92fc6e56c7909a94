#include "henchsim/harness.hpp"

#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "henchsim/rate_distortion.hpp"

namespace henchsim {

using nlohmann::json;

DistortionMeasure ExperimentConfig::measure() const {
    if (!distortion) return DistortionMeasure::hamming(pmf.size());
    const auto& rows = *distortion;
    std::vector<double> flat;
    for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
    return DistortionMeasure(rows.size(), rows.empty() ? 0 : rows.front().size(), flat);
}

ExperimentConfig ExperimentConfig::canned(const std::string& experiment) {
    ExperimentConfig c;
    c.experiment = experiment;
    if (experiment == "roundtrip") {
        c.n = 4;
        c.rate = 1.0;
        c.key_rate = 0.5;
        c.delta = 0.5;
    } else if (experiment == "equivocation-tiny") {
        c.n = 2;
        c.rate = 1.0;
        c.key_rate = 0.5;
        c.delta = 0.5;
    } else if (experiment == "codebook-audit") {
        c.pmf = {0.8, 0.2};
        c.n = 12;
        c.rate = 0.9;
        c.key_rate = 0.3;
        c.delta = 0.25;
        c.eps = 0.15;
    } else if (experiment == "lemma-trends") {
        c.pmf = {0.8, 0.2};
        c.rate = 0.9;
        c.key_rate = 0.3;
        c.delta = 0.25;
        c.eps = 0.15;
        c.trials = 50;
    }
    return c;
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    const json j = json::parse(text);
    ExperimentConfig c = canned(j.value("experiment", ""));
    if (j.contains("pmf")) c.pmf = j.at("pmf").get<std::vector<double>>();
    if (j.contains("distortion"))
        c.distortion = j.at("distortion").get<std::vector<std::vector<double>>>();
    c.n = j.value("n", c.n);
    c.l = j.value("l", c.l);
    c.rate = j.value("rate", c.rate);
    c.key_rate = j.value("key_rate", c.key_rate);
    c.delta = j.value("delta", c.delta);
    c.eps = j.value("eps", c.eps);
    c.d_e = j.value("d_e", c.d_e);
    if (j.contains("budgets")) c.budgets = j.at("budgets").get<std::vector<double>>();
    c.trials = j.value("trials", c.trials);
    c.seed = j.value("seed", c.seed);
    c.out_dir = j.value("out_dir", c.out_dir);
    if (j.contains("rk_grid")) c.rk_grid = j.at("rk_grid").get<std::vector<double>>();
    if (j.contains("de_grid")) c.de_grid = j.at("de_grid").get<std::vector<double>>();
    if (j.contains("n_list")) c.n_list = j.at("n_list").get<std::vector<std::size_t>>();
    c.lambda_step = j.value("lambda_step", c.lambda_step);
    c.attack_cap_log2 = j.value("attack_cap_log2", c.attack_cap_log2);
    return c;
}

std::string ExperimentConfig::to_json_text() const {
    json j;
    j["experiment"] = experiment;
    j["pmf"] = pmf;
    if (distortion) j["distortion"] = *distortion;
    j["n"] = n;
    j["l"] = l;
    j["rate"] = rate;
    j["key_rate"] = key_rate;
    j["delta"] = delta;
    j["eps"] = eps;
    j["d_e"] = d_e;
    j["budgets"] = budgets;
    j["trials"] = trials;
    j["seed"] = seed;
    j["out_dir"] = out_dir;
    j["rk_grid"] = rk_grid;
    j["de_grid"] = de_grid;
    j["n_list"] = n_list;
    j["lambda_step"] = lambda_step;
    j["attack_cap_log2"] = attack_cap_log2;
    return j.dump();
}

std::string ExperimentConfig::digest() const { return fnv1a64_hex(to_json_text()); }

void RunManifest::write(const std::string& path) const {
    json j;
    j["experiment"] = experiment;
    j["config"] = json::parse(config_json);
    j["config_digest"] = config_digest;
    j["version"] = version;
    j["trial_seeds"] = trial_seeds;
    j["wall_seconds"] = wall_seconds;
    j["outputs"] = output_digests;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("RunManifest::write: cannot open " + path);
    f << j.dump(2) << '\n';
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn,
                  unsigned workers) {
    if (count == 0) return;
    unsigned w = workers ? workers : std::thread::hardware_concurrency();
    w = std::max(1u, std::min<unsigned>(w, static_cast<unsigned>(count)));
    if (w == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    for (unsigned t = 0; t < w; ++t) {
        pool.emplace_back([&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------
// attack sweep
// ---------------------------------------------------------------------------

namespace {

struct RowSpec {
    enum class Kind { KeyIndex, PureRd, Timesharing };
    Kind kind = Kind::KeyIndex;
    std::string name;
    double lambda = 0.0;
    double d_target = 0.0;
    bool runnable = true;
};

int bits_per_key_index(std::uint64_t bin_size) {
    return bin_size <= 1 ? 0 : std::bit_width(bin_size - 1);
}

std::vector<RowSpec> build_rows(const AttackSweepSpec& spec, double budget) {
    const std::uint64_t bin_size = floor_exp2(static_cast<double>(spec.n) * spec.key_rate);
    const double key_rate_spent =
        static_cast<double>(bits_per_key_index(bin_size)) / static_cast<double>(spec.n);
    const double nl = static_cast<double>(spec.n * spec.l);
    const double dmax = d_max(spec.source, spec.measure);

    std::vector<RowSpec> rows;
    rows.push_back({RowSpec::Kind::KeyIndex, "key-index", 0.0, spec.d_e,
                    key_rate_spent <= budget + 1e-12});

    // timesharing grid; the endpoints coincide with the pure strategies
    for (double lam = spec.lambda_step; lam < 1.0 - 1e-9; lam += spec.lambda_step) {
        const auto l_key = static_cast<std::size_t>(
            std::ceil((1.0 - lam) * static_cast<double>(spec.l) - 1e-9));
        const std::size_t l_rd = spec.l - l_key;
        if (l_rd == 0 || l_key == 0) continue;
        const double d_target =
            std::min(spec.d_e * static_cast<double>(spec.l) / static_cast<double>(l_rd), dmax);
        const double key_bits = static_cast<double>(l_key * bits_per_key_index(bin_size));
        char name[48];
        std::snprintf(name, sizeof(name), "timesharing(lambda=%.2f)", lam);
        rows.push_back({RowSpec::Kind::Timesharing, name, lam, d_target,
                        key_bits <= nl * budget + 1e-9});
    }

    rows.push_back({RowSpec::Kind::PureRd, "rd-covering", 1.0, spec.d_e,
                    std::floor(nl * budget + 1e-9) <= static_cast<double>(spec.cap_log2)});
    return rows;
}

struct TrialOutcome {
    double distortion = 0.0;
    double rate_spent = 0.0;
    bool success = false;
};

TrialOutcome run_row(const AttackSweepSpec& spec, const RowSpec& row, double budget,
                     const SuperblockObservation& obs, RngStream& rng) {
    AttackResult res;
    switch (row.kind) {
        case RowSpec::Kind::KeyIndex:
            res = key_index_attack(obs, spec.measure, spec.d_e);
            break;
        case RowSpec::Kind::PureRd:
            res = rd_attack(obs, spec.measure, row.d_target, budget, rng, spec.cap_log2);
            break;
        case RowSpec::Kind::Timesharing:
            res = timesharing_attack(obs, spec.measure, row.lambda, row.d_target, budget,
                                     spec.d_e, rng, spec.cap_log2);
            break;
    }
    return {res.superblock_distortion, res.rate_spent,
            res.superblock_distortion <= spec.d_e + 1e-12};
}

Codebook trial_codebook(const AttackSweepSpec& spec, std::uint64_t trial) {
    const auto seed = RngStream(spec.seed).derive(trial).derive(1).seed();
    return generate_codebook(spec.source, spec.n, spec.rate, spec.key_rate, seed);
}

} // namespace

std::vector<SweepRow> sweep_budget(const AttackSweepSpec& spec, double budget,
                                   Csv* per_trial_rows) {
    const auto rows = build_rows(spec, budget);
    const std::size_t trials = static_cast<std::size_t>(spec.trials);
    std::vector<std::vector<TrialOutcome>> outcomes(trials);

    parallel_for(trials, [&](std::size_t t) {
        auto base = RngStream(spec.seed).derive(t);
        const Codebook cb = trial_codebook(spec, t);
        auto sim_stream = base.derive(2);
        const SimulatedSuperblock sim = simulate_superblock(cb, spec.l, spec.delta, sim_stream);
        auto& out = outcomes[t];
        out.resize(rows.size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (!rows[r].runnable) continue;
            auto attack_stream = base.derive(100 + r);
            out[r] = run_row(spec, rows[r], budget, sim.obs, attack_stream);
        }
    });

    std::vector<SweepRow> result(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        auto& agg = result[r];
        agg.strategy = rows[r].name;
        agg.lambda = rows[r].lambda;
        agg.budget = budget;
        agg.runnable = rows[r].runnable;
        if (!rows[r].runnable) continue;
        for (std::size_t t = 0; t < trials; ++t) {
            const auto& o = outcomes[t][r];
            ++agg.runs;
            agg.successes += o.success ? 1 : 0;
            agg.mean_distortion += o.distortion;
            agg.mean_rate_spent += o.rate_spent;
        }
        if (agg.runs) {
            agg.mean_distortion /= agg.runs;
            agg.mean_rate_spent /= agg.runs;
        }
        if (per_trial_rows) {
            for (std::size_t t = 0; t < trials; ++t) {
                const auto& o = outcomes[t][r];
                per_trial_rows->rows.push_back({rows[r].name,
                                                std::uint64_t{spec.n}, std::uint64_t{spec.l},
                                                budget, o.rate_spent, o.distortion,
                                                std::int64_t{o.success ? 1 : 0}});
            }
        }
    }
    return result;
}

SweepRow best_attack_at_budget(const AttackSweepSpec& spec, double budget, double threshold) {
    // cheapest strategies first; covering cost grows with the rd bit budget
    auto rows = build_rows(spec, budget);
    std::stable_sort(rows.begin(), rows.end(), [](const RowSpec& a, const RowSpec& b) {
        auto cost = [](const RowSpec& r) {
            switch (r.kind) {
                case RowSpec::Kind::KeyIndex: return 0.0;
                case RowSpec::Kind::Timesharing: return r.lambda;
                case RowSpec::Kind::PureRd: return 2.0;
            }
            return 3.0;
        };
        return cost(a) < cost(b);
    });

    SweepRow best;
    best.budget = budget;
    const std::size_t trials = static_cast<std::size_t>(spec.trials);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (!rows[r].runnable) continue;
        std::vector<TrialOutcome> outcomes(trials);
        parallel_for(trials, [&](std::size_t t) {
            auto base = RngStream(spec.seed).derive(t);
            const Codebook cb = trial_codebook(spec, t);
            auto sim_stream = base.derive(2);
            const SimulatedSuperblock sim =
                simulate_superblock(cb, spec.l, spec.delta, sim_stream);
            auto attack_stream = base.derive(100 + r);
            outcomes[t] = run_row(spec, rows[r], budget, sim.obs, attack_stream);
        });
        SweepRow agg;
        agg.strategy = rows[r].name;
        agg.lambda = rows[r].lambda;
        agg.budget = budget;
        agg.runs = static_cast<int>(trials);
        for (const auto& o : outcomes) {
            agg.successes += o.success ? 1 : 0;
            agg.mean_distortion += o.distortion;
            agg.mean_rate_spent += o.rate_spent;
        }
        agg.mean_distortion /= trials;
        agg.mean_rate_spent /= trials;
        if (agg.success_frequency() > best.success_frequency() || best.runs == 0) best = agg;
        if (best.success_frequency() >= threshold) break;
    }
    return best;
}

// ---------------------------------------------------------------------------
// lemma trends
// ---------------------------------------------------------------------------

std::vector<LemmaTrendRow> lemma_trends(const LemmaTrendsSpec& spec, Csv* per_book_rows) {
    struct BookRecord {
        std::size_t n;
        int book;
        AuditReport report;
    };
    std::vector<std::pair<std::size_t, int>> jobs;
    for (std::size_t n : spec.n_list)
        for (int b = 0; b < spec.books; ++b) jobs.emplace_back(n, b);

    std::vector<BookRecord> records(jobs.size());
    parallel_for(jobs.size(), [&](std::size_t i) {
        const auto [n, book] = jobs[i];
        const auto seed = RngStream(spec.seed).derive(n * 100000 + book).seed();
        const Codebook cb = generate_codebook(spec.source, n, spec.rate, spec.key_rate, seed);
        const auto levels = enumerate_distortion_levels(spec.measure, n);
        AuditOptions opts;
        opts.seed = RngStream(seed).derive(17).seed();
        records[i] = {n, book, audit(cb, spec.delta, spec.eps, levels, spec.measure, opts)};
    });

    std::vector<LemmaTrendRow> rows;
    for (std::size_t n : spec.n_list) {
        LemmaTrendRow row;
        row.n = n;
        for (const auto& rec : records) {
            if (rec.n != n) continue;
            ++row.books;
            row.freq_a2 += rec.report.a2 ? 1 : 0;
            row.freq_a3 += rec.report.a3 ? 1 : 0;
            row.freq_a4 += rec.report.a4 ? 1 : 0;
            row.z_sampled = row.z_sampled || rec.report.z_sampled;
        }
        if (row.books) {
            row.freq_a2 /= row.books;
            row.freq_a3 /= row.books;
            row.freq_a4 /= row.books;
        }
        rows.push_back(row);
    }
    if (per_book_rows) {
        for (const auto& rec : records) {
            const auto& rep = rec.report;
            per_book_rows->rows.push_back(
                {std::uint64_t{rec.n}, std::int64_t{rec.book}, std::int64_t{rep.a2 ? 1 : 0},
                 std::int64_t{rep.a3 ? 1 : 0}, std::int64_t{rep.a4 ? 1 : 0},
                 std::uint64_t{rep.min_gamma}, rep.gamma_threshold, std::uint64_t{rep.max_phi},
                 std::uint64_t{rep.min_phi}, std::int64_t{rep.z_sampled ? 1 : 0}});
        }
    }
    return rows;
}

// ---------------------------------------------------------------------------
// canned experiments
// ---------------------------------------------------------------------------

namespace {

std::vector<double> linspace(double lo, double hi, std::size_t count) {
    std::vector<double> v(count);
    for (std::size_t i = 0; i < count; ++i)
        v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    return v;
}

Csv new_table(const ExperimentConfig& config, std::vector<std::string> header) {
    Csv t;
    t.comments.push_back("config_digest=" + config.digest());
    t.comments.push_back("config=" + config.to_json_text());
    t.header = std::move(header);
    return t;
}

void write_table(const Csv& table, const ExperimentConfig& config, const std::string& name,
                 RunManifest& manifest) {
    const std::string rendered = render_csv(table);
    const std::string path = config.out_dir + "/" + name;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_table: cannot open " + path);
    f.write(rendered.data(), static_cast<std::streamsize>(rendered.size()));
    if (!f) throw std::runtime_error("write_table: write failure on " + path);
    manifest.output_digests[name] = fnv1a64_hex(rendered);
}

void run_region_surface(const ExperimentConfig& config, RunManifest& manifest) {
    const Source src = config.source();
    const DistortionMeasure measure = config.measure();
    std::vector<double> rk = config.rk_grid.empty() ? linspace(0.0, 1.0, 51) : config.rk_grid;
    std::vector<double> de =
        config.de_grid.empty() ? linspace(0.0, d_max(src, measure), 51) : config.de_grid;
    Csv t = new_table(config, {"R_K", "D_E", "gamma", "lambda_star", "d_star"});
    for (const auto& row : surface_sample(src, measure, rk, de))
        t.rows.push_back({row.key_rate, row.d_e, row.gamma, row.lambda_star, row.d_star});
    write_table(t, config, "region_surface.csv", manifest);
}

void run_rd_curve(const ExperimentConfig& config, RunManifest& manifest) {
    const RDCurve curve = build_rd_curve(config.source(), config.measure());
    Csv t = new_table(config, {"distortion", "rate", "slope"});
    for (const auto& pt : curve.points) t.rows.push_back({pt.distortion, pt.rate, pt.slope});
    write_table(t, config, "rd_curve.csv", manifest);
}

void run_roundtrip(const ExperimentConfig& config, RunManifest& manifest) {
    const Source src = config.source();
    const Codebook cb =
        generate_codebook(src, config.n, config.rate, config.key_rate, config.seed);
    double space = 1.0;
    for (std::size_t i = 0; i < config.n; ++i) space *= static_cast<double>(src.alphabet_size());
    if (space * static_cast<double>(cb.bin_size) > 4e6)
        throw cap_exceeded_error("roundtrip: exhaustive space too large");

    const auto total_seq = static_cast<std::uint64_t>(space);
    std::uint64_t encodes = 0, successes = 0, mismatches = 0;
    RngStream rng(RngStream(config.seed).derive(3).seed());
    for (std::uint64_t si = 0; si < total_seq; ++si) {
        const Sequence s = unpack_sequence(si, src.alphabet_size(), config.n);
        for (std::uint64_t key = 0; key < cb.bin_size; ++key) {
            for (int rep = 0; rep < 3; ++rep) {
                ++encodes;
                const EncodeOutcome out = encode(s, key, cb, config.delta, rng);
                if (!out.success) continue;
                ++successes;
                if (decode(out.message, key, cb) != s) ++mismatches;
            }
        }
    }
    Csv t = new_table(config, {"n", "rate", "key_rate", "delta", "encodes", "successes",
                               "mismatches"});
    t.rows.push_back({std::uint64_t{config.n}, config.rate, config.key_rate, config.delta,
                      encodes, successes, mismatches});
    write_table(t, config, "roundtrip.csv", manifest);
}

void run_codebook_audit(const ExperimentConfig& config, RunManifest& manifest) {
    const Source src = config.source();
    const DistortionMeasure measure = config.measure();
    const Codebook cb =
        generate_codebook(src, config.n, config.rate, config.key_rate, config.seed);
    // optional cache; regeneration from (seed, params) reproduces it bit-exactly
    const std::string cache_path = config.out_dir + "/codebook.bin";
    save_codebook(cb, cache_path);
    {
        std::ifstream f(cache_path, std::ios::binary);
        std::stringstream ss;
        ss << f.rdbuf();
        manifest.output_digests["codebook.bin"] = fnv1a64_hex(ss.str());
    }
    const auto levels = enumerate_distortion_levels(measure, config.n);
    AuditOptions opts;
    opts.seed = RngStream(config.seed).derive(17).seed();
    const AuditReport rep = audit(cb, config.delta, config.eps, levels, measure, opts);

    Csv lt = new_table(config, {"level", "max_eta", "eta_threshold"});
    for (std::size_t k = 0; k < rep.levels.size(); ++k)
        lt.rows.push_back({rep.levels[k], rep.max_eta[k], rep.eta_thresholds[k]});
    write_table(lt, config, "audit_levels.csv", manifest);

    Csv st = new_table(config, {"min_gamma", "gamma_threshold", "max_phi", "min_phi",
                                "phi_upper", "phi_lower", "a2", "a3", "a4",
                                "typical_set_empty", "z_sampled", "z_candidates"});
    st.rows.push_back({std::uint64_t{rep.min_gamma}, rep.gamma_threshold,
                       std::uint64_t{rep.max_phi}, std::uint64_t{rep.min_phi}, rep.phi_upper,
                       rep.phi_lower, std::int64_t{rep.a2 ? 1 : 0}, std::int64_t{rep.a3 ? 1 : 0},
                       std::int64_t{rep.a4 ? 1 : 0}, std::int64_t{rep.typical_set_empty ? 1 : 0},
                       std::int64_t{rep.z_sampled ? 1 : 0}, std::uint64_t{rep.z_candidates}});
    write_table(st, config, "audit_summary.csv", manifest);
}

void run_attack_sweep(const ExperimentConfig& config, RunManifest& manifest) {
    AttackSweepSpec spec;
    spec.source = config.source();
    spec.measure = config.measure();
    spec.n = config.n;
    spec.l = config.l;
    spec.rate = config.rate;
    spec.key_rate = config.key_rate;
    spec.delta = config.delta;
    spec.d_e = config.d_e;
    spec.lambda_step = config.lambda_step;
    spec.trials = config.trials;
    spec.seed = config.seed;
    spec.cap_log2 = config.attack_cap_log2;

    std::vector<double> budgets = config.budgets;
    if (budgets.empty()) {
        const RDCurve curve = build_rd_curve(spec.source, spec.measure);
        const double g = gamma(spec.key_rate, spec.d_e, curve).value;
        budgets = {std::max(0.0, g - 0.1), g + 0.1};
    }

    Csv trials_table = new_table(
        config, {"strategy", "n", "l", "budget", "rate_spent", "distortion", "success"});
    Csv agg = new_table(config, {"strategy", "lambda", "budget", "runnable", "runs", "successes",
                                 "success_freq", "mean_rate_spent", "mean_distortion"});
    for (double b : budgets) {
        for (const auto& row : sweep_budget(spec, b, &trials_table)) {
            agg.rows.push_back({row.strategy, row.lambda, row.budget,
                                std::int64_t{row.runnable ? 1 : 0}, std::int64_t{row.runs},
                                std::int64_t{row.successes}, row.success_frequency(),
                                row.mean_rate_spent, row.mean_distortion});
        }
    }
    write_table(agg, config, "attack_sweep.csv", manifest);
    write_table(trials_table, config, "attack_trials.csv", manifest);
    for (int t = 0; t < config.trials; ++t)
        manifest.trial_seeds.push_back(RngStream(config.seed).derive(t).seed());
}

void run_equivocation_tiny(const ExperimentConfig& config, RunManifest& manifest) {
    const Source src = config.source();
    const DistortionMeasure measure = config.measure();
    const Codebook cb =
        generate_codebook(src, config.n, config.rate, config.key_rate, config.seed);
    const MessagePosterior mp = message_posterior(cb, config.delta);

    double equivocation = 0.0;  // (1/n) H(S^n | M)
    for (std::size_t m = 0; m < mp.message_prob.size(); ++m) {
        if (mp.message_prob[m] <= 0.0) continue;
        double h = 0.0;
        for (double p : mp.posterior[m])
            if (p > 0.0) h -= p * std::log2(p);
        equivocation += mp.message_prob[m] * h;
    }
    equivocation /= static_cast<double>(config.n);
    const double bound = std::min(config.key_rate, entropy(src));

    std::vector<double> des =
        config.de_grid.empty() ? linspace(0.0, d_max(src, measure), 11) : config.de_grid;
    Csv t = new_table(config, {"d_e", "r_de", "equivocation", "key_entropy_bound"});
    for (double de : des)
        t.rows.push_back({de, r_de_estimate(cb, measure, config.delta, de), equivocation, bound});
    write_table(t, config, "equivocation_tiny.csv", manifest);
}

void run_lemma_trends(const ExperimentConfig& config, RunManifest& manifest) {
    LemmaTrendsSpec spec;
    spec.source = config.source();
    spec.measure = config.measure();
    spec.n_list = config.n_list;
    spec.rate = config.rate;
    spec.key_rate = config.key_rate;
    spec.delta = config.delta;
    spec.eps = config.eps;
    spec.books = config.trials;
    spec.seed = config.seed;

    Csv books = new_table(config, {"n", "book", "a2", "a3", "a4", "min_gamma", "gamma_threshold",
                                   "max_phi", "min_phi", "z_sampled"});
    Csv t = new_table(config, {"n", "books", "freq_a2", "freq_a3", "freq_a4", "z_sampled"});
    for (const auto& row : lemma_trends(spec, &books))
        t.rows.push_back({std::uint64_t{row.n}, std::int64_t{row.books}, row.freq_a2, row.freq_a3,
                          row.freq_a4, std::int64_t{row.z_sampled ? 1 : 0}});
    write_table(t, config, "lemma_trends.csv", manifest);
    write_table(books, config, "lemma_books.csv", manifest);
}

} // namespace

RunManifest run_experiment(const ExperimentConfig& config) {
    if (config.trials < 1) throw std::invalid_argument("run_experiment: trials must be >= 1");
    if (config.rate < 0.0 || config.key_rate < 0.0 || config.d_e < 0.0)
        throw std::invalid_argument("run_experiment: rates and distortion must be >= 0");

    RunManifest manifest;
    manifest.experiment = config.experiment;
    manifest.config_json = config.to_json_text();
    manifest.config_digest = config.digest();
    manifest.version = kArtifactVersion;

    std::filesystem::create_directories(config.out_dir);
    const auto start = std::chrono::steady_clock::now();

    if (config.experiment == "region-surface")
        run_region_surface(config, manifest);
    else if (config.experiment == "rd-curve")
        run_rd_curve(config, manifest);
    else if (config.experiment == "roundtrip")
        run_roundtrip(config, manifest);
    else if (config.experiment == "codebook-audit")
        run_codebook_audit(config, manifest);
    else if (config.experiment == "attack-sweep")
        run_attack_sweep(config, manifest);
    else if (config.experiment == "equivocation-tiny")
        run_equivocation_tiny(config, manifest);
    else if (config.experiment == "lemma-trends")
        run_lemma_trends(config, manifest);
    else
        throw std::invalid_argument("run_experiment: unknown experiment '" + config.experiment +
                                    "'");

    manifest.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    manifest.write(config.out_dir + "/manifest.json");
    return manifest;
}

} // namespace henchsim
