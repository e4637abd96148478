#include "opath/pathcount.hpp"

namespace opath {

double renormalized(double logZ, double p, int N) {
    if (logZ == kNegInf) return kNegInf;
    return logZ - static_cast<double>(N) * std::log(p);
}

double renormalized(const BigInt& Z, double p, int N) { return renormalized(log_bigint(Z), p, N); }

bool survives(const EnvSeed& env, double p, const Kernel& k, int N) {
    if (N < 1) throw std::invalid_argument("N must be >= 1");
    check_p_range(p, k);
    SeededEnv se{env};
    auto fr = origin_frontier<LogCount>(k.dim());
    for (int n = 0; n < N; ++n) {
        fr = frontier_step(fr, se, p, k);
        if (fr.counts.empty()) return false;
    }
    return true;
}

double log_count_auto(const EnvSeed& env, double p, const Kernel& k, int N) {
    SeededEnv se{env};
    if (N <= kExactHorizon) return log_bigint(count_paths_exact(se, p, k, N).first);
    return count_paths_log(se, p, k, N).first;
}

GrowthEstimate growth_rate_estimate(double p, const Kernel& k, int N, std::uint64_t replicas,
                                    const EnvSeed& env0) {
    if (!(p > 0.0)) throw std::invalid_argument("p must be positive");
    if (replicas < 1) throw std::invalid_argument("replicas must be >= 1");
    check_p_range(p, k);
    auto values = run_replica_values(replicas, [&](std::uint64_t i) -> std::optional<double> {
        const double logZ = log_count_auto(env0.with_stream(env0.stream + i), p, k, N);
        if (logZ == kNegInf) return std::nullopt;
        return logZ / static_cast<double>(N);
    });
    GrowthEstimate g;
    g.est = estimate_from_values(values);
    g.replicas = replicas;
    g.extinct = g.est.discarded;
    g.survival_fraction =
        static_cast<double>(replicas - g.extinct) / static_cast<double>(replicas);
    g.no_survivor = g.est.n == 0;
    return g;
}

}  // namespace opath
