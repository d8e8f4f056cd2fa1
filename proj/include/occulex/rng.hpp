#pragma once

#include <cstdint>

#include "errors.hpp"

namespace occulex {

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace detail

// Counter-based generator: the i-th output of stream (seed, index) is a hash
// of (seed, index, i). Sample j of a run always reads stream j, so results do
// not depend on how samples are split across workers.
class Stream {
public:
    Stream(std::uint64_t seed, std::uint64_t index)
        : key_(detail::mix64(detail::mix64(seed ^ 0x6f6363756c6578ULL) + index * 0x9e3779b97f4a7c15ULL)) {}

    std::uint64_t next() { return detail::mix64(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL); }

    // Uniform on [0, bound) by rejection.
    std::uint64_t below(std::uint64_t bound) {
        if (bound == 0) throw invalid_argument("empty range");
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x;
        do {
            x = next();
        } while (x >= limit);
        return x % bound;
    }

    int letter(int k) { return static_cast<int>(below(static_cast<std::uint64_t>(k))) + 1; }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    std::uint64_t position() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace occulex
