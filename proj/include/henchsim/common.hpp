#ifndef HENCHSIM_COMMON_HPP
#define HENCHSIM_COMMON_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace henchsim {

// Symbols are small unsigned integers; alphabets up to 256 letters.
using Symbol = std::uint8_t;
using Sequence = std::vector<Symbol>;

// Thrown when an exact computation would exceed its configured size cap.
// The CLI maps this to exit code 2.
struct cap_exceeded_error : std::runtime_error {
    explicit cap_exceeded_error(const std::string& what) : std::runtime_error(what) {}
};

// 2^x with a tiny relative cushion so that exact powers of two are not lost
// to representation error before flooring.
inline std::uint64_t floor_exp2(double x) {
    double v = std::exp2(x);
    return static_cast<std::uint64_t>(v * (1.0 + 1e-12) + 1e-12);
}

} // namespace henchsim

#endif
