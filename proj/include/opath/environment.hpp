#pragma once

#include <span>
#include <string>

#include "opath/common.hpp"
#include "opath/kernel.hpp"

namespace opath {

/// Key of the lazily-evaluated percolation environment. No edge state is ever
/// stored: every uniform variable is a pure function of (seed, stream, edge).
struct EnvSeed {
    std::uint64_t seed_lo = 0;
    std::uint64_t seed_hi = 0;
    std::uint64_t stream = 0;

    EnvSeed with_stream(std::uint64_t s) const { return EnvSeed{seed_lo, seed_hi, s}; }
    std::string seed_hex() const;
};

EnvSeed env_seed_from_hex(const std::string& hex32, std::uint64_t stream = 0);

/// Raw keyed PRF over a word sequence; the basis of every random value in the artifact.
std::uint64_t prf(const EnvSeed& env, std::span<const std::uint64_t> words);

/// Uniform variable of the coupling field, 53-bit resolution in [0,1).
/// Coordinates beyond +-2^31 are rejected (they would overflow the canonical encoding).
double uniform_at(const EnvSeed& env, const Edge& e);

/// Auxiliary uniform stream (spine sampling and similar), keyed by (tag, counter).
double uniform_counter(const EnvSeed& env, std::uint64_t tag, std::uint64_t counter);

inline constexpr std::uint64_t kTagSpine = 2;

/// X(p) = 1{U <= p f(y-x)}; the monotone coupling across p of a single uniform field.
bool is_open(const EnvSeed& env, const Edge& e, double p, const Kernel& k);

/// Edge oracle backed by a seed. `open(e, pf)` takes the precomputed threshold
/// p*f(to-from) so dynamic-programming loops avoid repeated kernel lookups.
struct SeededEnv {
    EnvSeed seed;

    bool open(const Edge& e, double pf) const {
        if (pf <= 0.0) return false;
        return uniform_at(seed, e) <= pf;
    }
};

}  // namespace opath
