#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "henchsim/harness.hpp"

namespace {

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot open config file " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Shannon cipher system simulator with a rate-limited henchman adversary"};
    app.require_subcommand(1);

    henchsim::ExperimentConfig config;
    std::string config_path;

    // `run` executes any named experiment; flags override config-file fields.
    auto* run = app.add_subcommand("run", "run a named experiment");
    std::string experiment, out_dir;
    std::uint64_t seed = 0;
    int trials = 0;
    std::size_t n = 0, l = 0;
    double rate = -1.0, key_rate = -1.0, delta = -1.0, eps = -1.0, d_e = -1.0;
    run->add_option("--experiment", experiment,
                    "region-surface | rd-curve | roundtrip | codebook-audit | attack-sweep | "
                    "equivocation-tiny | lemma-trends");
    run->add_option("--config", config_path, "JSON config file");
    run->add_option("--seed", seed, "master seed");
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--trials", trials, "Monte Carlo trials / codebooks");
    run->add_option("--n", n, "blocklength");
    run->add_option("--l", l, "blocks per superblock");
    run->add_option("--rate", rate, "code rate R, bits/symbol");
    run->add_option("--key-rate", key_rate, "key rate R_K, bits/symbol");
    run->add_option("--delta", delta, "typicality delta");
    run->add_option("--eps", eps, "audit epsilon");
    run->add_option("--de", d_e, "wiretapper distortion level D_E");

    // `region` is a shortcut for sampling the security-rate surface.
    auto* region = app.add_subcommand("region", "sample the security-rate surface");
    double rk_max = 1.0, de_max = -1.0;
    std::size_t grid_points = 51;
    region->add_option("--out", out_dir, "output directory");
    region->add_option("--rk-max", rk_max, "largest key rate on the grid");
    region->add_option("--de-max", de_max, "largest distortion on the grid (default d_max)");
    region->add_option("--points", grid_points, "grid points per axis");
    region->add_option("--config", config_path, "JSON config file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (!config_path.empty()) {
            config = henchsim::ExperimentConfig::from_json_text(slurp(config_path));
        } else if (run->parsed() && !experiment.empty()) {
            config = henchsim::ExperimentConfig::canned(experiment);
        }

        if (run->parsed()) {
            if (!experiment.empty()) config.experiment = experiment;
            if (run->count("--seed")) config.seed = seed;
            if (!out_dir.empty()) config.out_dir = out_dir;
            if (run->count("--trials")) config.trials = trials;
            if (run->count("--n")) config.n = n;
            if (run->count("--l")) config.l = l;
            if (run->count("--rate")) config.rate = rate;
            if (run->count("--key-rate")) config.key_rate = key_rate;
            if (run->count("--delta")) config.delta = delta;
            if (run->count("--eps")) config.eps = eps;
            if (run->count("--de")) config.d_e = d_e;
        } else if (region->parsed()) {
            config.experiment = "region-surface";
            if (!out_dir.empty()) config.out_dir = out_dir;
            if (grid_points < 2) throw std::invalid_argument("--points must be >= 2");
            config.rk_grid.clear();
            config.de_grid.clear();
            const double de_hi =
                de_max >= 0.0 ? de_max : henchsim::d_max(config.source(), config.measure());
            for (std::size_t i = 0; i < grid_points; ++i) {
                const double t = static_cast<double>(i) / static_cast<double>(grid_points - 1);
                config.rk_grid.push_back(rk_max * t);
                config.de_grid.push_back(de_hi * t);
            }
        }

        if (config.experiment.empty())
            throw std::invalid_argument("no experiment selected (use --experiment or --config)");

        const auto manifest = henchsim::run_experiment(config);
        std::printf("experiment %s done in %.2fs; outputs in %s\n",
                    manifest.experiment.c_str(), manifest.wall_seconds, config.out_dir.c_str());
        for (const auto& [file, digest] : manifest.output_digests)
            std::printf("  %s  %s\n", file.c_str(), digest.c_str());
        return 0;
    } catch (const henchsim::cap_exceeded_error& e) {
        std::fprintf(stderr, "cap exceeded: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
