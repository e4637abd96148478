#pragma once

#include <map>
#include <optional>
#include <type_traits>

#include "opath/common.hpp"
#include "opath/environment.hpp"
#include "opath/harness.hpp"
#include "opath/kernel.hpp"

namespace opath {

/// Log-space path count: value exp(lv), positive by construction.
struct LogCount {
    double lv = 0.0;
};

inline void combine(BigInt& a, const BigInt& b) { a += b; }
inline void combine(LogCount& a, const LogCount& b) { a.lv = logaddexp(a.lv, b.lv); }

/// Sparse level slice of path counts: site -> number of open paths from the
/// origin ending there. Only strictly positive entries are stored.
template <class Count>
struct Frontier {
    std::int64_t level = 0;
    std::map<Site, Count> counts;
};

template <class Count>
Frontier<Count> origin_frontier(int dim) {
    Frontier<Count> fr;
    if constexpr (std::is_same_v<Count, LogCount>)
        fr.counts.emplace(Site(dim, 0), LogCount{0.0});  // log 1
    else
        fr.counts.emplace(Site(dim, 0), Count{1});
    return fr;
}

inline BigInt total(const Frontier<BigInt>& fr) {
    BigInt z = 0;
    for (const auto& [x, c] : fr.counts) z += c;
    return z;
}

inline double log_total(const Frontier<LogCount>& fr) {
    double z = kNegInf;
    for (const auto& [x, c] : fr.counts) z = logaddexp(z, c.lv);
    return z;
}

/// One level of the counting recursion: counts'(y) = sum_x counts(x) 1{edge open}.
template <class Count, class Env>
Frontier<Count> frontier_step(const Frontier<Count>& fr, const Env& env, double p, const Kernel& k) {
    Frontier<Count> out;
    out.level = fr.level + 1;
    Edge e;
    e.level = fr.level;
    for (const auto& [x, c] : fr.counts) {
        e.from = x;
        for (const auto& [z, w] : k.support()) {
            e.to = add(x, z);
            if (!env.open(e, p * w)) continue;
            auto [it, inserted] = out.counts.try_emplace(e.to, c);
            if (!inserted) combine(it->second, c);
        }
    }
    return out;
}

inline void check_p_range(double p, const Kernel& k) {
    if (p < 0.0 || p * k.max_weight() > 1.0 + 1e-12)
        throw std::invalid_argument("p must lie in [0, p_max]");
}

/// Z_N and the per-site frontier, exact arbitrary-precision counts.
template <class Env>
std::pair<BigInt, Frontier<BigInt>> count_paths_exact(const Env& env, double p, const Kernel& k, int N) {
    if (N < 0) throw std::invalid_argument("N must be >= 0");
    check_p_range(p, k);
    auto fr = origin_frontier<BigInt>(k.dim());
    for (int n = 0; n < N; ++n) {
        fr = frontier_step(fr, env, p, k);
        if (fr.counts.empty()) break;
    }
    fr.level = N;
    return {total(fr), std::move(fr)};
}

/// log Z_N (or -inf on extinction) with log-space counts.
template <class Env>
std::pair<double, Frontier<LogCount>> count_paths_log(const Env& env, double p, const Kernel& k, int N) {
    if (N < 0) throw std::invalid_argument("N must be >= 0");
    check_p_range(p, k);
    auto fr = origin_frontier<LogCount>(k.dim());
    for (int n = 0; n < N; ++n) {
        fr = frontier_step(fr, env, p, k);
        if (fr.counts.empty()) break;
    }
    fr.level = N;
    return {log_total(fr), std::move(fr)};
}

/// log W_N = log Z_N - N log p.
double renormalized(double logZ, double p, int N);
double renormalized(const BigInt& Z, double p, int N);

/// Finite-N percolation proxy Z_N > 0, with early exit on the empty frontier.
bool survives(const EnvSeed& env, double p, const Kernel& k, int N);

/// Exact-count horizon for mode selection: Z_N stays cheap enough for big
/// integers up to this many levels; log-space beyond.
inline constexpr int kExactHorizon = 64;

/// Number of open length-N paths; -inf when extinct. Mode picked by horizon.
double log_count_auto(const EnvSeed& env, double p, const Kernel& k, int N);

struct GrowthSample {
    int N = 0;
    double logZ = kNegInf;
    bool survived = false;
    double p = 0.0;
    EnvSeed seed;
};

struct GrowthEstimate {
    Estimate est;  ///< mean of (1/N) log Z_N over surviving replicas
    double survival_fraction = 0.0;
    std::uint64_t replicas = 0;
    std::uint64_t extinct = 0;
    bool no_survivor = false;
};

/// Monte Carlo estimate of the growth rate F(p), conditioned on survival at
/// horizon N. Extinct replicas are discarded and reported, never hidden.
GrowthEstimate growth_rate_estimate(double p, const Kernel& k, int N, std::uint64_t replicas,
                                    const EnvSeed& env0);

/// Depth-first enumeration of open paths; independent of the frontier recursion.
template <class Env>
std::uint64_t enumerate_oracle(const Env& env, const Kernel& k, int N, std::uint64_t budget = 10'000'000) {
    if (N < 0) throw std::invalid_argument("N must be >= 0");
    std::uint64_t found = 0;
    Edge e;
    // x passed by value: the Edge buffer the caller hands down is mutated below.
    auto dfs = [&](auto&& self, int n, Site x) -> void {
        if (n == N) {
            if (++found > budget) throw regime_error("enumerate_oracle: path budget exceeded");
            return;
        }
        for (const auto& [z, w] : k.support()) {
            // Reset every iteration: the recursive call reuses the buffer.
            e.level = n;
            e.from = x;
            e.to = add(x, z);
            if (env.open(e, w)) self(self, n + 1, e.to);
        }
    };
    dfs(dfs, 0, Site(k.dim(), 0));
    return found;
}

}  // namespace opath
