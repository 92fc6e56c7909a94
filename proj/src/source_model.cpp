#include "henchsim/source_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"

namespace henchsim {

Source::Source(std::vector<double> probabilities) : pmf(std::move(probabilities)) {
    if (pmf.empty()) throw std::invalid_argument("Source: empty pmf");
    double sum = 0.0;
    for (double p : pmf) {
        if (!(p >= 0.0) || !std::isfinite(p)) throw std::invalid_argument("Source: pmf entries must be finite and >= 0");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("Source: pmf must sum to 1");
}

Source Source::bernoulli(double p_one) {
    if (p_one < 0.0 || p_one > 1.0) throw std::invalid_argument("bernoulli: p must be in [0,1]");
    return Source({1.0 - p_one, p_one});
}

Source Source::uniform(std::size_t alphabet) {
    if (alphabet == 0) throw std::invalid_argument("uniform: empty alphabet");
    return Source(std::vector<double>(alphabet, 1.0 / static_cast<double>(alphabet)));
}

Source Source::from_json_text(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    return Source(j.at("pmf").get<std::vector<double>>());
}

DistortionMeasure::DistortionMeasure(std::size_t src, std::size_t rec, std::vector<double> values)
    : source_alphabet(src), recon_alphabet(rec), matrix(std::move(values)) {
    if (src == 0 || rec == 0) throw std::invalid_argument("DistortionMeasure: empty alphabet");
    if (matrix.size() != src * rec) throw std::invalid_argument("DistortionMeasure: matrix size mismatch");
    for (double v : matrix)
        if (!(v >= 0.0) || !std::isfinite(v))
            throw std::invalid_argument("DistortionMeasure: entries must be finite and >= 0");
}

double DistortionMeasure::max_entry() const {
    return *std::max_element(matrix.begin(), matrix.end());
}

DistortionMeasure DistortionMeasure::hamming(std::size_t alphabet) {
    std::vector<double> m(alphabet * alphabet, 1.0);
    for (std::size_t a = 0; a < alphabet; ++a) m[a * alphabet + a] = 0.0;
    return DistortionMeasure(alphabet, alphabet, std::move(m));
}

DistortionMeasure DistortionMeasure::from_json_text(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    const auto rows = j.at("distortion").get<std::vector<std::vector<double>>>();
    if (rows.empty()) throw std::invalid_argument("distortion: empty matrix");
    const std::size_t cols = rows.front().size();
    std::vector<double> flat;
    flat.reserve(rows.size() * cols);
    for (const auto& r : rows) {
        if (r.size() != cols) throw std::invalid_argument("distortion: ragged matrix");
        flat.insert(flat.end(), r.begin(), r.end());
    }
    return DistortionMeasure(rows.size(), cols, std::move(flat));
}

std::uint64_t TypeVector::length() const {
    return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

std::vector<double> TypeVector::empirical_pmf() const {
    const double n = static_cast<double>(length());
    std::vector<double> p(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) p[i] = static_cast<double>(counts[i]) / n;
    return p;
}

TypicalityParams::TypicalityParams(double d) : delta(d) {
    if (!(d > 0.0)) throw std::invalid_argument("TypicalityParams: delta must be > 0");
}

double entropy(const Source& source) {
    double h = 0.0;
    for (double p : source.pmf)
        if (p > 0.0) h -= p * std::log2(p);
    return h;
}

Sequence sample_iid(const Source& source, std::size_t n, RngStream& rng) {
    if (n == 0) throw std::invalid_argument("sample_iid: n must be >= 1");
    Sequence out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = static_cast<Symbol>(rng.sample_pmf(source.pmf));
    return out;
}

Sequence sample_iid(const Source& source, std::size_t n, std::uint64_t seed) {
    RngStream rng(seed);
    return sample_iid(source, n, rng);
}

TypeVector empirical_type(std::span<const Symbol> seq, std::size_t alphabet) {
    if (seq.empty()) throw std::invalid_argument("empirical_type: empty sequence");
    TypeVector t;
    t.counts.assign(alphabet, 0);
    for (Symbol s : seq) {
        if (s >= alphabet) throw std::out_of_range("empirical_type: symbol out of alphabet range");
        ++t.counts[s];
    }
    return t;
}

bool is_strongly_typical(std::span<const Symbol> seq, const Source& source,
                         const TypicalityParams& params) {
    const auto type = empirical_type(seq, source.alphabet_size());
    const double n = static_cast<double>(seq.size());
    for (std::size_t a = 0; a < source.alphabet_size(); ++a) {
        const double p = source.pmf[a];
        const double emp = static_cast<double>(type.counts[a]) / n;
        if (p == 0.0) {
            if (type.counts[a] != 0) return false;
        } else if (!(std::abs(emp - p) < params.delta * p)) {
            return false;
        }
    }
    return true;
}

double block_distortion(std::span<const Symbol> s_seq, std::span<const Symbol> z_seq,
                        const DistortionMeasure& measure) {
    if (s_seq.size() != z_seq.size()) throw std::invalid_argument("block_distortion: length mismatch");
    if (s_seq.empty()) throw std::invalid_argument("block_distortion: empty block");
    double total = 0.0;
    for (std::size_t i = 0; i < s_seq.size(); ++i) total += measure.at(s_seq[i], z_seq[i]);
    return total / static_cast<double>(s_seq.size());
}

namespace {

double composition_count(std::uint64_t n, std::uint64_t cells) {
    // C(n + cells - 1, cells - 1)
    return std::exp(std::lgamma(static_cast<double>(n + cells)) -
                    std::lgamma(static_cast<double>(n + 1)) -
                    std::lgamma(static_cast<double>(cells)));
}

void enumerate_compositions(std::uint64_t remaining, std::size_t cell,
                            std::vector<std::uint64_t>& counts,
                            const std::vector<double>& d_flat, double partial,
                            std::vector<double>& out, std::size_t n) {
    if (cell + 1 == counts.size()) {
        out.push_back((partial + static_cast<double>(remaining) * d_flat[cell]) /
                      static_cast<double>(n));
        return;
    }
    for (std::uint64_t c = 0; c <= remaining; ++c) {
        counts[cell] = c;
        enumerate_compositions(remaining - c, cell + 1, counts, d_flat,
                               partial + static_cast<double>(c) * d_flat[cell], out, n);
    }
}

} // namespace

std::vector<double> enumerate_distortion_levels(const DistortionMeasure& measure, std::size_t n,
                                                std::uint64_t max_types) {
    if (n == 0) throw std::invalid_argument("enumerate_distortion_levels: n must be >= 1");
    const std::size_t cells = measure.source_alphabet * measure.recon_alphabet;
    if (composition_count(n, cells) > static_cast<double>(max_types))
        throw cap_exceeded_error("enumerate_distortion_levels: joint-type count exceeds cap");

    std::vector<double> values;
    std::vector<std::uint64_t> counts(cells, 0);
    enumerate_compositions(n, 0, counts, measure.matrix, 0.0, values, n);

    std::sort(values.begin(), values.end());
    const double eps = 1e-12 * (1.0 + measure.max_entry());
    std::vector<double> levels;
    for (double v : values)
        if (levels.empty() || v - levels.back() > eps) levels.push_back(v);
    return levels;
}

std::uint64_t pack_sequence(std::span<const Symbol> seq, std::size_t alphabet) {
    std::uint64_t idx = 0;
    for (Symbol s : seq) idx = idx * alphabet + s;
    return idx;
}

Sequence unpack_sequence(std::uint64_t index, std::size_t alphabet, std::size_t n) {
    Sequence seq(n);
    for (std::size_t i = n; i-- > 0;) {
        seq[i] = static_cast<Symbol>(index % alphabet);
        index /= alphabet;
    }
    return seq;
}

DistortionMeasure product_measure(const DistortionMeasure& measure, std::size_t n,
                                  std::uint64_t max_cells) {
    double cells = 1.0;
    for (std::size_t i = 0; i < n; ++i)
        cells *= static_cast<double>(measure.source_alphabet) * static_cast<double>(measure.recon_alphabet);
    if (cells > static_cast<double>(max_cells))
        throw cap_exceeded_error("product_measure: super-alphabet exceeds cap");

    std::uint64_t ns = 1, nz = 1;
    for (std::size_t i = 0; i < n; ++i) {
        ns *= measure.source_alphabet;
        nz *= measure.recon_alphabet;
    }
    std::vector<double> flat(ns * nz);
    for (std::uint64_t si = 0; si < ns; ++si) {
        const Sequence s = unpack_sequence(si, measure.source_alphabet, n);
        for (std::uint64_t zi = 0; zi < nz; ++zi) {
            const Sequence z = unpack_sequence(zi, measure.recon_alphabet, n);
            flat[si * nz + zi] = block_distortion(s, z, measure);
        }
    }
    return DistortionMeasure(ns, nz, std::move(flat));
}

} // namespace henchsim
