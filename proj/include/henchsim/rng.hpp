#ifndef HENCHSIM_RNG_HPP
#define HENCHSIM_RNG_HPP

#include <array>
#include <cstdint>
#include <span>

namespace henchsim {

// Seedable, splittable generator (xoshiro256** seeded through splitmix64).
// Hand-rolled so that streams are bit-reproducible across platforms and
// standard-library versions. derive() produces an independent substream from
// the parent seed and a tag, independent of how much the parent has drawn.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : seed_(seed) {
        std::uint64_t x = seed;
        for (auto& s : state_) s = splitmix64(x);
    }

    RngStream derive(std::uint64_t tag) const {
        std::uint64_t x = seed_ ^ (0x9E3779B97F4A7C15ULL * (tag + 0x632BE59BD9B4E019ULL));
        return RngStream(splitmix64(x));
    }

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform in [0,1), 53-bit resolution.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Unbiased uniform in [0, bound), bound >= 1.
    std::uint64_t next_below(std::uint64_t bound) {
        if (bound <= 1) return 0;
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    // Categorical draw from a pmf (entries >= 0, summing to ~1).
    std::size_t sample_pmf(std::span<const double> pmf) {
        const double u = next_double();
        double c = 0.0;
        for (std::size_t i = 0; i + 1 < pmf.size(); ++i) {
            c += pmf[i];
            if (u < c) return i;
        }
        return pmf.empty() ? 0 : pmf.size() - 1;
    }

private:
    static std::uint64_t splitmix64(std::uint64_t& x) {
        x += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

    std::array<std::uint64_t, 4> state_;
    std::uint64_t seed_;
};

} // namespace henchsim

#endif
