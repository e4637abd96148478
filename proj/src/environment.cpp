#include "opath/environment.hpp"

#include <charconv>

namespace opath {

namespace {

inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t kTagEdge = 1;
constexpr std::int64_t kCoordLimit = std::int64_t(1) << 31;

inline std::uint64_t absorb(std::uint64_t h, std::uint64_t w) { return mix64(h ^ w); }

inline std::uint64_t chain_init(const EnvSeed& env) {
    std::uint64_t h = mix64(env.seed_lo);
    h = absorb(h, env.seed_hi);
    h = absorb(h, env.stream);
    return h;
}

inline double to_unit(std::uint64_t h) { return static_cast<double>(h >> 11) * 0x1.0p-53; }

}  // namespace

std::string EnvSeed::seed_hex() const {
    char buf[33];
    std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(seed_hi),
                  static_cast<unsigned long long>(seed_lo));
    return buf;
}

EnvSeed env_seed_from_hex(const std::string& hex32, std::uint64_t stream) {
    std::string h = hex32;
    if (h.starts_with("0x") || h.starts_with("0X")) h = h.substr(2);
    if (h.empty() || h.size() > 32 || h.find_first_not_of("0123456789abcdefABCDEF") != std::string::npos)
        throw config_error("seed must be a hex string of up to 32 digits");
    while (h.size() < 32) h.insert(h.begin(), '0');
    auto parse = [](const std::string& s) {
        std::uint64_t v = 0;
        std::from_chars(s.data(), s.data() + s.size(), v, 16);
        return v;
    };
    EnvSeed e;
    e.seed_hi = parse(h.substr(0, 16));
    e.seed_lo = parse(h.substr(16, 16));
    e.stream = stream;
    return e;
}

std::uint64_t prf(const EnvSeed& env, std::span<const std::uint64_t> words) {
    std::uint64_t h = chain_init(env);
    for (std::uint64_t w : words) h = absorb(h, w);
    return h;
}

double uniform_at(const EnvSeed& env, const Edge& e) {
    // Canonical encoding: tag, level, d, then from- and to-coordinates as
    // 64-bit two's complement words, low coordinate index first.
    std::uint64_t h = chain_init(env);
    h = absorb(h, kTagEdge);
    h = absorb(h, static_cast<std::uint64_t>(e.level));
    h = absorb(h, static_cast<std::uint64_t>(e.from.size()));
    for (std::int32_t c : e.from) {
        if (c >= kCoordLimit || c <= -kCoordLimit) throw std::invalid_argument("edge coordinate overflow");
        h = absorb(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(c)));
    }
    for (std::int32_t c : e.to) {
        if (c >= kCoordLimit || c <= -kCoordLimit) throw std::invalid_argument("edge coordinate overflow");
        h = absorb(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(c)));
    }
    return to_unit(h);
}

double uniform_counter(const EnvSeed& env, std::uint64_t tag, std::uint64_t counter) {
    const std::uint64_t words[2] = {tag, counter};
    return to_unit(prf(env, words));
}

bool is_open(const EnvSeed& env, const Edge& e, double p, const Kernel& k) {
    if (p < 0.0 || p * k.max_weight() > 1.0 + 1e-12)
        throw std::invalid_argument("p must lie in [0, p_max]");
    const double pf = p * k.weight(sub(e.to, e.from));
    if (pf <= 0.0) return false;
    return uniform_at(env, e) <= pf;
}

}  // namespace opath
