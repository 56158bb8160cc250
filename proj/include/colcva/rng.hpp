#pragma once

#include <cstdint>

#include "colcva/math.hpp"

namespace colcva {

// Named sub-streams so every random variate in a run has a unique, stable
// address (seed, path, stream, step, dim). Results are then independent of
// execution order and worker count.
enum class Stream : std::uint32_t {
    shocks = 1,        // Brownian increments on the simulation grid
    rate_integral = 2, // residual normal for the integrated short-rate factor
    copula = 3,        // default-trigger Gaussian pair
    nested = 4,        // inner-simulation shocks
    nested_copula = 5, // inner-simulation default trigger
};

namespace detail {

inline std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdULL;
    x ^= x >> 33;
    x *= 0xc4ceb9fe1a85ec53ULL;
    x ^= x >> 33;
    return x;
}

}  // namespace detail

// Stateless counter-based generator. Each output is a hash of its address;
// there is no sequential state to share or lock.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t path_id)
        : base_(detail::mix64(seed ^ 0x6a09e667f3bcc909ULL) ^
                detail::mix64((path_id + 1) * 0x9e3779b97f4a7c15ULL)) {}

    // Uniform on the open interval (0,1).
    double uniform(Stream stream, std::uint64_t step, std::uint32_t dim) const {
        std::uint64_t h = raw(stream, step, dim);
        return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal(Stream stream, std::uint64_t step, std::uint32_t dim) const {
        return norm_inv(uniform(stream, step, dim));
    }

private:
    std::uint64_t raw(Stream stream, std::uint64_t step, std::uint32_t dim) const {
        std::uint64_t h = detail::mix64(base_ ^ (step * 0xbf58476d1ce4e5b9ULL) ^
                                        (static_cast<std::uint64_t>(stream) << 56));
        return detail::mix64(h ^ ((static_cast<std::uint64_t>(dim) + 1) *
                                  0x94d049bb133111ebULL));
    }

    std::uint64_t base_;
};

}  // namespace colcva
