#pragma once

#include <cstdint>
#include <random>

namespace ellprod {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

// Counter-based seed derivation: each (trial, stream) pair owns an
// independent generator regardless of the order trials are executed in.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t trial, std::uint64_t stream);

inline Rng make_rng(std::uint64_t master, std::uint64_t trial, std::uint64_t stream) {
    return Rng(derive_seed(master, trial, stream));
}

// Stream tags keep unrelated draws of one trial apart. Factor q of a trial
// uses stream kFactorStream + q.
inline constexpr std::uint64_t kFactorStream = 0;
inline constexpr std::uint64_t kGaussianPartnerStream = 1u << 20;
inline constexpr std::uint64_t kResampleStream = 1u << 24;
inline constexpr std::uint64_t kAuxStream = 1u << 28;

}  // namespace ellprod
