#include "opath/sizebias.hpp"

#include "opath/enumeration.hpp"
#include "opath/harness.hpp"

namespace opath {

SpineWalk sample_spine(const Kernel& k, int N, const EnvSeed& rng) {
    if (N < 0) throw std::invalid_argument("N must be >= 0");
    SpineWalk T;
    T.dim = k.dim();
    T.positions.reserve(N + 1);
    T.positions.push_back(Site(k.dim(), 0));
    for (int n = 0; n < N; ++n) {
        const double u = uniform_counter(rng, kTagSpine, static_cast<std::uint64_t>(n));
        double cum = 0.0;
        const Site* chosen = nullptr;
        for (const auto& [z, w] : k.support()) {
            cum += w;
            if (u < cum) {
                chosen = &z;
                break;
            }
        }
        if (!chosen) chosen = &k.support().rbegin()->first;  // u landed on rounding slack
        T.steps.push_back(*chosen);
        T.positions.push_back(add(T.positions.back(), *chosen));
    }
    return T;
}

namespace {

Rational apply_f(FTag F, const BigInt& z) {
    switch (F) {
        case FTag::one:
            return 1;
        case FTag::identity:
            return Rational(z);
        case FTag::indicator_ge2:
            return z >= 2 ? 1 : 0;
    }
    throw std::logic_error("unreachable");
}

}  // namespace

Rational sizebias_identity_check(int N, const Rational& p, FTag F) {
    if (N < 0 || N > 3) throw std::invalid_argument("identity check: instance too large (need N <= 3)");
    if (p < 0 || p > 2) throw std::invalid_argument("identity check: p outside [0, p_max]");
    const Kernel k = make_nn_kernel(1);
    const EdgeTable table = relevant_edges(k, N);
    if (table.size() > 30) throw std::invalid_argument("identity check: instance too large");
    const Rational pf = p / 2;  // per-edge opening probability, f = 1/2
    const std::uint64_t nconf = std::uint64_t(1) << table.size();

    // Environment probabilities, exact.
    std::vector<Rational> prob(nconf);
    for (std::uint64_t mask = 0; mask < nconf; ++mask) {
        Rational q = 1;
        for (std::size_t i = 0; i < table.size(); ++i)
            q *= ((mask >> i) & 1u) ? pf : (1 - pf);
        prob[mask] = q;
    }

    // LHS: average of F over tilted counts, spine and environment independent.
    Rational lhs = 0;
    const Rational spine_prob = Rational(1) / (std::uint64_t(1) << N);
    for (std::uint64_t spine_mask = 0; spine_mask < (std::uint64_t(1) << N); ++spine_mask) {
        SpineWalk T;
        T.dim = 1;
        T.positions.push_back(Site{0});
        for (int n = 0; n < N; ++n) {
            const std::int32_t step = ((spine_mask >> n) & 1u) ? 1 : -1;
            T.steps.push_back(Site{step});
            T.positions.push_back(Site{static_cast<std::int32_t>(T.positions.back()[0] + step)});
        }
        for (std::uint64_t mask = 0; mask < nconf; ++mask) {
            MaskEnv env{&table, mask};
            auto te = tilt_environment(env, T);
            const BigInt z = count_paths_exact(te, 1.0, k, N).first;
            lhs += spine_prob * prob[mask] * apply_f(F, z);
        }
    }

    // RHS: E_p[W_N F(Z_N)] with W_N = Z_N / p^N.
    Rational rhs = 0;
    Rational pN = 1;
    for (int n = 0; n < N; ++n) pN *= p;
    for (std::uint64_t mask = 0; mask < nconf; ++mask) {
        MaskEnv env{&table, mask};
        const BigInt z = count_paths_exact(env, 1.0, k, N).first;
        if (z == 0) continue;
        rhs += prob[mask] * Rational(z) / pN * apply_f(F, z);
    }
    return lhs - rhs;
}

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::met:
            return "met";
        case Verdict::not_met:
            return "not met";
        case Verdict::inconclusive:
            return "inconclusive";
    }
    return "?";
}

std::vector<double> criterion_samples(const Kernel& k, double p, int N0, std::uint64_t replicas,
                                      const EnvSeed& env0) {
    if (N0 < 1) throw std::invalid_argument("N0 must be >= 1");
    if (!(p > 0.0)) throw std::invalid_argument("p must be positive");
    check_p_range(p, k);
    auto values = run_replica_values(replicas, [&](std::uint64_t i) -> std::optional<double> {
        const EnvSeed env = env0.with_stream(env0.stream + 2 * i);
        const EnvSeed spine_rng = env0.with_stream(env0.stream + 2 * i + 1);
        const SpineWalk T = sample_spine(k, N0, spine_rng);
        SeededEnv base{env};
        auto te = tilt_environment(base, T);
        if (N0 <= kExactHorizon) return log_bigint(pinned_count_exact(te, T, p, k, N0));
        return pinned_count_log(te, T, p, k, N0);
    });
    std::vector<double> out;
    out.reserve(values.size());
    for (const auto& v : values) out.push_back(*v);
    return out;
}

CriterionReport report_from_samples(const std::vector<double>& samples, double p, int N0) {
    Estimate e;
    for (double v : samples) accumulate(e, v);
    CriterionReport r;
    r.N0 = N0;
    r.p = p;
    r.replicas = e.n;
    r.mean_logZbar = e.mean;
    r.ci95 = e.ci95();
    r.threshold = static_cast<double>(N0) * std::log(p);
    if (r.mean_logZbar - r.ci95 > r.threshold)
        r.verdict = Verdict::met;
    else if (r.mean_logZbar + r.ci95 < r.threshold)
        r.verdict = Verdict::not_met;
    else
        r.verdict = Verdict::inconclusive;
    return r;
}

CriterionReport criterion_estimate(const Kernel& k, double p, int N0, std::uint64_t replicas,
                                   const EnvSeed& env0) {
    if (replicas < 10) throw std::invalid_argument("criterion needs at least 10 replicas");
    return report_from_samples(criterion_samples(k, p, N0, replicas, env0), p, N0);
}

bool supermultiplicativity_check(const Kernel& k, double p, int N, int M, const EnvSeed& env0) {
    if (N < 0 || M < 0) throw std::invalid_argument("N, M must be >= 0");
    check_p_range(p, k);
    const EnvSeed env = env0.with_stream(env0.stream * 2);
    const EnvSeed spine_rng = env0.with_stream(env0.stream * 2 + 1);
    const SpineWalk T = sample_spine(k, N + M, spine_rng);
    SeededEnv base{env};
    auto te = tilt_environment(base, T);
    const BigInt whole = pinned_count_exact(te, T, p, k, N + M);
    const BigInt head = pinned_count_exact(te, T, p, k, N);
    // Tail segment: paths from (N, T_N) to (N+M, T_{N+M}) in the same tilted environment.
    Frontier<BigInt> fr;
    fr.level = N;
    fr.counts.emplace(T.positions[static_cast<std::size_t>(N)], BigInt(1));
    for (int n = 0; n < M; ++n) fr = frontier_step(fr, te, p, k);
    auto it = fr.counts.find(T.positions[static_cast<std::size_t>(N + M)]);
    const BigInt tail = it == fr.counts.end() ? BigInt(0) : it->second;
    return whole >= head * tail;
}

int length2_bridge_options(const Kernel& k, const SpineWalk& T, int a) {
    if (a < 1 || a + 1 > T.length()) throw std::invalid_argument("a must lie in [1, N-1]");
    const Site& before = T.positions[static_cast<std::size_t>(a) - 1];
    const Site& at = T.positions[static_cast<std::size_t>(a)];
    const Site& after = T.positions[static_cast<std::size_t>(a) + 1];
    int count = 0;
    for (const auto& [z, w] : k.support()) {
        const Site y = add(before, z);
        if (y == at) continue;
        if (k.weight(sub(after, y)) > 0.0) ++count;
    }
    return count;
}

int length2_bridge_case_count(const SpineWalk& T, int a, int d) {
    if (a < 1 || a + 1 > T.length()) throw std::invalid_argument("a must lie in [1, N-1]");
    const Site& s1 = T.steps[static_cast<std::size_t>(a) - 1];
    const Site& s2 = T.steps[static_cast<std::size_t>(a)];
    if (s1 == s2) return 0;
    if (s1 == negate(s2)) return 2 * d - 1;
    return 1;
}

}  // namespace opath
