#include "henchsim/cipher_codec.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "henchsim/rate_distortion.hpp"

namespace henchsim {

namespace {

std::string key_of(std::span<const Symbol> seq) {
    return std::string(reinterpret_cast<const char*>(seq.data()), seq.size());
}

double positive_part(double x) { return x > 0.0 ? x : 0.0; }

} // namespace

double Codebook::rate_loss_bits() const {
    const double nominal = std::log2(static_cast<double>(floor_exp2(static_cast<double>(n) * rate)));
    return nominal - std::log2(static_cast<double>(num_codewords()));
}

std::span<const std::uint64_t> Codebook::matches(std::span<const Symbol> seq) const {
    const auto it = index_.find(key_of(seq));
    if (it == index_.end()) return {};
    return it->second;
}

void Codebook::build_index() {
    index_.clear();
    index_.reserve(num_codewords());
    for (std::uint64_t j = 0; j < num_codewords(); ++j)
        index_[key_of(codeword(j))].push_back(j);
}

Codebook generate_codebook(const Source& source, std::size_t n, double rate, double key_rate,
                           std::uint64_t seed, std::uint64_t max_bytes) {
    if (n == 0) throw std::invalid_argument("generate_codebook: n must be >= 1");
    if (key_rate < 0.0 || rate < key_rate)
        throw std::invalid_argument("generate_codebook: need rate >= key_rate >= 0");

    Codebook cb;
    cb.source = source;
    cb.n = n;
    cb.rate = rate;
    cb.key_rate = key_rate;
    cb.seed = seed;
    cb.num_bins = floor_exp2(static_cast<double>(n) * (rate - key_rate));
    cb.bin_size = floor_exp2(static_cast<double>(n) * key_rate);

    const double bytes = static_cast<double>(cb.num_bins) * static_cast<double>(cb.bin_size) *
                         static_cast<double>(n);
    if (bytes > static_cast<double>(max_bytes))
        throw cap_exceeded_error("generate_codebook: codebook exceeds memory cap");

    RngStream rng(seed);
    cb.symbols.resize(cb.num_codewords() * n);
    for (auto& s : cb.symbols) s = static_cast<Symbol>(rng.sample_pmf(source.pmf));
    cb.build_index();
    return cb;
}

EncodeOutcome encode(std::span<const Symbol> block, std::uint64_t key, const Codebook& cb,
                     double delta, RngStream& rng) {
    if (block.size() != cb.n) throw std::invalid_argument("encode: block length mismatch");
    if (key >= cb.bin_size) throw std::invalid_argument("encode: key out of range");

    EncodeOutcome out;
    std::uint64_t flat;
    if (is_strongly_typical(block, cb.source, TypicalityParams(delta)) &&
        !cb.matches(block).empty()) {
        const auto hits = cb.matches(block);
        flat = hits[rng.next_below(hits.size())];
        out.success = true;
    } else {
        flat = rng.next_below(cb.num_codewords());
        out.success = false;
    }
    out.message.j_p = flat / cb.bin_size;
    const std::uint64_t j_s = flat % cb.bin_size;
    out.message.m_s = (j_s + key) % cb.bin_size;
    return out;
}

Sequence decode(const CipherMessage& msg, std::uint64_t key, const Codebook& cb) {
    if (msg.j_p >= cb.num_bins || msg.m_s >= cb.bin_size)
        throw std::invalid_argument("decode: message out of range");
    if (key >= cb.bin_size) throw std::invalid_argument("decode: key out of range");
    const std::uint64_t j_s = (msg.m_s + cb.bin_size - key) % cb.bin_size;
    const auto cw = cb.codeword(msg.j_p, j_s);
    return Sequence(cw.begin(), cw.end());
}

namespace {

std::size_t level_index(std::span<const double> levels, double d) {
    // d is an exact member of the level set up to float noise
    const auto it = std::lower_bound(levels.begin(), levels.end(), d - 1e-9);
    return static_cast<std::size_t>(it - levels.begin());
}

// All length-n binary sequences of a given weight are equally likely under
// the stratified sampler; nonbinary alphabets fall back to uniform draws.
std::vector<Sequence> sampled_z_candidates(std::size_t n, std::size_t alphabet,
                                           std::uint64_t count, RngStream& rng) {
    std::vector<Sequence> zs;
    zs.reserve(count);
    if (alphabet == 2) {
        const std::uint64_t per_weight = std::max<std::uint64_t>(1, count / (n + 1));
        std::vector<std::size_t> positions(n);
        for (std::size_t w = 0; w <= n; ++w) {
            for (std::uint64_t i = 0; i < per_weight; ++i) {
                for (std::size_t k = 0; k < n; ++k) positions[k] = k;
                Sequence z(n, 0);
                for (std::size_t k = 0; k < w; ++k) {
                    const std::size_t pick = k + rng.next_below(n - k);
                    std::swap(positions[k], positions[pick]);
                    z[positions[k]] = 1;
                }
                zs.push_back(std::move(z));
            }
        }
    } else {
        for (std::uint64_t i = 0; i < count; ++i) {
            Sequence z(n);
            for (auto& sym : z) sym = static_cast<Symbol>(rng.next_below(alphabet));
            zs.push_back(std::move(z));
        }
    }
    return zs;
}

} // namespace

AuditReport audit(const Codebook& cb, double delta, double eps, std::span<const double> levels,
                  const DistortionMeasure& measure, const AuditOptions& options) {
    if (measure.source_alphabet != cb.source.alphabet_size())
        throw std::invalid_argument("audit: measure does not match the codebook source");

    AuditReport rep;
    rep.delta = delta;
    rep.eps = eps;
    rep.levels.assign(levels.begin(), levels.end());

    const std::size_t n = cb.n;
    const double nd = static_cast<double>(n);
    const TypicalityParams params(delta);

    // typicality flags and per-bin typical codeword lists
    std::vector<std::vector<std::uint64_t>> typical_in_bin(cb.num_bins);
    for (std::uint64_t jp = 0; jp < cb.num_bins; ++jp)
        for (std::uint64_t js = 0; js < cb.bin_size; ++js)
            if (is_strongly_typical(cb.codeword(jp, js), cb.source, params))
                typical_in_bin[jp].push_back(jp * cb.bin_size + js);

    rep.min_gamma = std::numeric_limits<std::uint64_t>::max();
    for (const auto& bin : typical_in_bin)
        rep.min_gamma = std::min(rep.min_gamma, static_cast<std::uint64_t>(bin.size()));
    rep.gamma_threshold = (1.0 - eps) * std::exp2(nd * cb.key_rate);
    rep.a3 = static_cast<double>(rep.min_gamma) >= rep.gamma_threshold - 1e-9;

    // phi over the typical set
    double super = 1.0;
    for (std::size_t i = 0; i < n; ++i) super *= static_cast<double>(cb.source.alphabet_size());
    if (super > static_cast<double>(options.typical_enum_cap))
        throw cap_exceeded_error("audit: typical-set enumeration exceeds cap");
    std::unordered_map<std::string, std::uint64_t> multiplicity;
    for (std::uint64_t j = 0; j < cb.num_codewords(); ++j) ++multiplicity[key_of(cb.codeword(j))];

    const std::uint64_t total_seqs = static_cast<std::uint64_t>(super);
    rep.max_phi = 0;
    rep.min_phi = std::numeric_limits<std::uint64_t>::max();
    rep.typical_set_empty = true;
    for (std::uint64_t si = 0; si < total_seqs; ++si) {
        const Sequence s = unpack_sequence(si, cb.source.alphabet_size(), n);
        if (!is_strongly_typical(s, cb.source, params)) continue;
        rep.typical_set_empty = false;
        const auto it = multiplicity.find(key_of(s));
        const std::uint64_t phi = (it == multiplicity.end()) ? 0 : it->second;
        rep.max_phi = std::max(rep.max_phi, phi);
        rep.min_phi = std::min(rep.min_phi, phi);
    }
    if (rep.typical_set_empty) rep.min_phi = 0;

    const double hs = entropy(cb.source);
    rep.phi_upper = std::exp2(nd * (cb.rate - hs + eps));
    rep.phi_lower = std::exp2(nd * (cb.rate - hs - eps));
    rep.a4 = rep.typical_set_empty ||
             (static_cast<double>(rep.max_phi) <= rep.phi_upper + 1e-9 &&
              static_cast<double>(rep.min_phi) >= rep.phi_lower - 1e-9);

    // eta extrema per distortion level
    double z_space = 1.0;
    for (std::size_t i = 0; i < n; ++i) z_space *= static_cast<double>(measure.recon_alphabet);
    std::vector<Sequence> shared_z;
    if (z_space <= static_cast<double>(options.z_exhaustive_cap)) {
        const std::uint64_t nz = static_cast<std::uint64_t>(z_space);
        shared_z.reserve(nz);
        for (std::uint64_t zi = 0; zi < nz; ++zi)
            shared_z.push_back(unpack_sequence(zi, measure.recon_alphabet, n));
        rep.z_sampled = false;
    } else {
        RngStream rng(options.seed);
        shared_z = sampled_z_candidates(n, measure.recon_alphabet, options.z_sample_count, rng);
        rep.z_sampled = true;
    }

    if (static_cast<double>(shared_z.size()) * static_cast<double>(cb.num_codewords()) >
        options.max_work)
        throw cap_exceeded_error("audit: eta scan exceeds the work cap");

    rep.max_eta.assign(rep.levels.size(), 0);
    std::vector<std::uint64_t> hist(rep.levels.size());
    auto scan_candidate = [&](std::span<const Symbol> z, const std::vector<std::uint64_t>& bin) {
        std::fill(hist.begin(), hist.end(), 0);
        for (std::uint64_t flat : bin)
            ++hist[level_index(rep.levels, block_distortion(cb.codeword(flat), z, measure))];
        std::uint64_t cum = 0;
        for (std::size_t k = 0; k < hist.size(); ++k) {
            cum += hist[k];
            rep.max_eta[k] = std::max(rep.max_eta[k], cum);
        }
    };
    for (std::uint64_t jp = 0; jp < cb.num_bins; ++jp) {
        const auto& bin = typical_in_bin[jp];
        if (bin.empty()) continue;
        for (const auto& z : shared_z) scan_candidate(z, bin);
        if (rep.z_sampled && measure.recon_alphabet == cb.source.alphabet_size())
            for (std::uint64_t flat : bin) scan_candidate(cb.codeword(flat), bin);
    }
    rep.z_candidates = shared_z.size();

    rep.eta_thresholds.resize(rep.levels.size());
    rep.a2 = true;
    for (std::size_t k = 0; k < rep.levels.size(); ++k) {
        const double rd = rd_at_distortion(cb.source, measure, rep.levels[k]).rate;
        rep.eta_thresholds[k] = std::exp2(nd * (positive_part(cb.key_rate - rd) + eps));
        if (static_cast<double>(rep.max_eta[k]) > rep.eta_thresholds[k] + 1e-9) rep.a2 = false;
    }
    return rep;
}

MessagePosterior message_posterior(const Codebook& cb, double delta,
                                   std::uint64_t max_super_alphabet) {
    double super = 1.0;
    for (std::size_t i = 0; i < cb.n; ++i) super *= static_cast<double>(cb.source.alphabet_size());
    if (super > static_cast<double>(max_super_alphabet))
        throw cap_exceeded_error("message_posterior: super-alphabet exceeds cap");
    const std::uint64_t num_seq = static_cast<std::uint64_t>(super);
    const std::uint64_t num_msg = cb.num_codewords();
    const TypicalityParams params(delta);

    std::vector<std::vector<double>> joint(num_msg, std::vector<double>(num_seq, 0.0));
    for (std::uint64_t si = 0; si < num_seq; ++si) {
        const Sequence s = unpack_sequence(si, cb.source.alphabet_size(), cb.n);
        double ps = 1.0;
        for (Symbol sym : s) ps *= cb.source.pmf[sym];
        if (ps == 0.0) continue;

        const auto hits = cb.matches(s);
        if (!hits.empty() && is_strongly_typical(s, cb.source, params)) {
            // uniform choice among matches, then a uniform pad over the bin
            const double per_hit = ps / static_cast<double>(hits.size()) /
                                   static_cast<double>(cb.bin_size);
            for (std::uint64_t flat : hits) {
                const std::uint64_t jp = flat / cb.bin_size;
                for (std::uint64_t ms = 0; ms < cb.bin_size; ++ms)
                    joint[jp * cb.bin_size + ms][si] += per_hit;
            }
        } else {
            const double per_msg = ps / static_cast<double>(num_msg);
            for (std::uint64_t m = 0; m < num_msg; ++m) joint[m][si] += per_msg;
        }
    }

    MessagePosterior out;
    out.message_prob.resize(num_msg);
    out.posterior.resize(num_msg);
    for (std::uint64_t m = 0; m < num_msg; ++m) {
        double pm = 0.0;
        for (double v : joint[m]) pm += v;
        out.message_prob[m] = pm;
        out.posterior[m].assign(num_seq, 0.0);
        if (pm > 0.0)
            for (std::uint64_t si = 0; si < num_seq; ++si) out.posterior[m][si] = joint[m][si] / pm;
    }
    return out;
}

namespace {

constexpr char kMagic[4] = {'H', 'S', 'C', 'B'};

template <typename T>
void write_pod(std::ofstream& f, const T& v) {
    f.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_pod(std::ifstream& f, T& v) {
    f.read(reinterpret_cast<char*>(&v), sizeof(T));
}

} // namespace

void save_codebook(const Codebook& cb, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("save_codebook: cannot open " + path);
    f.write(kMagic, 4);
    write_pod(f, std::uint32_t{1});
    write_pod(f, static_cast<std::uint64_t>(cb.n));
    write_pod(f, cb.seed);
    write_pod(f, cb.rate);
    write_pod(f, cb.key_rate);
    write_pod(f, cb.num_bins);
    write_pod(f, cb.bin_size);
    write_pod(f, static_cast<std::uint32_t>(cb.source.alphabet_size()));
    for (double p : cb.source.pmf) write_pod(f, p);
    f.write(reinterpret_cast<const char*>(cb.symbols.data()),
            static_cast<std::streamsize>(cb.symbols.size()));
    if (!f) throw std::runtime_error("save_codebook: write failure");
}

Codebook load_codebook(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("load_codebook: cannot open " + path);
    char magic[4];
    f.read(magic, 4);
    if (!f || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("load_codebook: bad magic");
    std::uint32_t version = 0;
    read_pod(f, version);
    if (version != 1) throw std::runtime_error("load_codebook: unsupported version");

    Codebook cb;
    std::uint64_t n = 0;
    read_pod(f, n);
    cb.n = static_cast<std::size_t>(n);
    read_pod(f, cb.seed);
    read_pod(f, cb.rate);
    read_pod(f, cb.key_rate);
    read_pod(f, cb.num_bins);
    read_pod(f, cb.bin_size);
    std::uint32_t alphabet = 0;
    read_pod(f, alphabet);
    std::vector<double> pmf(alphabet);
    for (auto& p : pmf) read_pod(f, p);
    cb.source = Source(std::move(pmf));
    cb.symbols.resize(cb.num_codewords() * cb.n);
    f.read(reinterpret_cast<char*>(cb.symbols.data()),
           static_cast<std::streamsize>(cb.symbols.size()));
    if (!f) throw std::runtime_error("load_codebook: truncated file");
    cb.build_index();
    return cb;
}

} // namespace henchsim
