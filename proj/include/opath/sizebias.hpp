#pragma once

#include <vector>

#include "opath/common.hpp"
#include "opath/environment.hpp"
#include "opath/kernel.hpp"
#include "opath/pathcount.hpp"

namespace opath {

/// Spine trajectory T: i.i.d. steps with law f, positions are the prefix sums.
struct SpineWalk {
    int dim = 0;
    std::vector<Site> steps;
    std::vector<Site> positions;  ///< positions[0] = origin, size steps+1

    int length() const { return static_cast<int>(steps.size()); }

    bool is_spine_edge(const Edge& e) const {
        if (e.level < 0 || e.level >= length()) return false;
        const auto n = static_cast<std::size_t>(e.level);
        return e.from == positions[n] && e.to == positions[n + 1];
    }
};

/// N steps drawn by CDF inversion from the spine stream of the seed.
SpineWalk sample_spine(const Kernel& k, int N, const EnvSeed& rng);

/// Environment with every spine edge forced open; all other edges defer to the base.
template <class Base>
struct Tilted {
    const Base* base = nullptr;
    const SpineWalk* spine = nullptr;

    bool open(const Edge& e, double pf) const {
        if (spine->is_spine_edge(e)) return true;
        return base->open(e, pf);
    }
};

template <class Base>
Tilted<Base> tilt_environment(const Base& base, const SpineWalk& spine) {
    return Tilted<Base>{&base, &spine};
}

/// Pinned count: open paths in the tilted environment from (0,0) to (N, T_N).
template <class Env>
BigInt pinned_count_exact(const Env& te, const SpineWalk& T, double p, const Kernel& k, int N) {
    if (N < 0 || N > T.length()) throw std::invalid_argument("pinned_count: N out of spine range");
    check_p_range(p, k);
    auto fr = origin_frontier<BigInt>(k.dim());
    for (int n = 0; n < N; ++n) fr = frontier_step(fr, te, p, k);
    auto it = fr.counts.find(T.positions[static_cast<std::size_t>(N)]);
    return it == fr.counts.end() ? BigInt(0) : it->second;
}

template <class Env>
double pinned_count_log(const Env& te, const SpineWalk& T, double p, const Kernel& k, int N) {
    if (N < 0 || N > T.length()) throw std::invalid_argument("pinned_count: N out of spine range");
    check_p_range(p, k);
    auto fr = origin_frontier<LogCount>(k.dim());
    for (int n = 0; n < N; ++n) fr = frontier_step(fr, te, p, k);
    auto it = fr.counts.find(T.positions[static_cast<std::size_t>(N)]);
    return it == fr.counts.end() ? kNegInf : it->second.lv;
}

enum class FTag { one, identity, indicator_ge2 };

/// Exhaustive size-bias identity check for the nearest-neighbor d=1 model:
/// average of F over counts in the tilted environment vs the W_N-weighted
/// average of F over counts in the plain environment. Exact rationals.
Rational sizebias_identity_check(int N, const Rational& p, FTag F);

enum class Verdict { met, not_met, inconclusive };

struct CriterionReport {
    int N0 = 0;
    double p = 0.0;
    std::uint64_t replicas = 0;
    double mean_logZbar = 0.0;
    double ci95 = 0.0;
    double threshold = 0.0;  ///< N0 log p
    Verdict verdict = Verdict::inconclusive;
};

const char* verdict_name(Verdict v);

/// Per-replica log Zbar_{N0} samples (replica i: env stream 2i, spine stream 2i+1).
std::vector<double> criterion_samples(const Kernel& k, double p, int N0, std::uint64_t replicas,
                                      const EnvSeed& env0);

/// Finite-volume criterion: "met" certifies mean log Zbar_{N0} > N0 log p at the
/// 95% level, i.e. the growth rate sits strictly below log p.
CriterionReport criterion_estimate(const Kernel& k, double p, int N0, std::uint64_t replicas,
                                   const EnvSeed& env0);
CriterionReport report_from_samples(const std::vector<double>& samples, double p, int N0);

/// Per-realization supermultiplicativity Zbar_{N+M} >= Zbar_N * Zbar'_M along
/// one spine, where the primed count lives in the environment shifted to (N, T_N).
bool supermultiplicativity_check(const Kernel& k, double p, int N, int M, const EnvSeed& env0);

struct BridgeHit {
    int a = 0;
    int b = 0;
    std::vector<Site> path;  ///< sites B_a..B_b
};

/// All open paths leaving the spine at (a,T_a) and rejoining at (b,T_b) without
/// touching it in between, with b - a in [2, max_len]. Bounded depth-first search.
template <class Env>
std::vector<BridgeHit> find_bridges(const Env& te, const SpineWalk& T, double p, const Kernel& k,
                                    int N, int max_len, std::uint64_t budget = 10'000'000) {
    check_p_range(p, k);
    if (N > T.length()) throw std::invalid_argument("find_bridges: N exceeds spine length");
    std::vector<BridgeHit> hits;
    std::uint64_t expansions = 0;
    std::vector<Site> path;
    Edge e;
    // x passed by value: the Edge buffer the caller hands down is mutated below.
    auto dfs = [&](auto&& self, int a, int c, Site x) -> void {
        if (c >= N || c - a >= max_len) return;
        for (const auto& [z, w] : k.support()) {
            // Reset every iteration: the recursive call reuses the buffer.
            e.level = c;
            e.from = x;
            e.to = add(x, z);
            if (!te.open(e, p * w)) continue;
            if (++expansions > budget) throw regime_error("find_bridges: search budget exceeded");
            const Site& spine_site = T.positions[static_cast<std::size_t>(c) + 1];
            if (e.to == spine_site) {
                if (c + 1 - a >= 2) {
                    BridgeHit hit{a, c + 1, path};
                    hit.path.push_back(e.to);
                    hits.push_back(std::move(hit));
                }
                continue;  // rejoined the spine: bridge ends here
            }
            path.push_back(e.to);
            self(self, a, c + 1, e.to);
            path.pop_back();
        }
    };
    for (int a = 0; a + 2 <= N; ++a) {
        path.assign(1, T.positions[static_cast<std::size_t>(a)]);
        dfs(dfs, a, a, T.positions[static_cast<std::size_t>(a)]);
    }
    return hits;
}

/// Number of admissible (not necessarily open) length-2 bridges over position a,
/// i.e. intermediate sites y != T_a with f(y - T_{a-1}) > 0 and f(T_{a+1} - y) > 0.
int length2_bridge_options(const Kernel& k, const SpineWalk& T, int a);

/// Nearest-neighbor case tally: 0 when the two increments repeat, 2d-1 when
/// they cancel, 1 otherwise.
int length2_bridge_case_count(const SpineWalk& T, int a, int d);

}  // namespace opath
