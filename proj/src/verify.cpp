#include "opath/verify.hpp"

#include <sstream>

#include "opath/enumeration.hpp"
#include "opath/pathcount.hpp"
#include "opath/sizebias.hpp"

namespace opath {

namespace {

/// MaskEnv with one edge answered inconsistently; drives the negative control.
struct CorruptEnv {
    MaskEnv inner;
    std::size_t flipped;

    bool open(const Edge& e, double pf) const {
        auto it = inner.table->index.find(key_of(e));
        if (it != inner.table->index.end() && it->second == flipped)
            return !inner.open(e, pf);
        return inner.open(e, pf);
    }
};

bool oracle_case(const Kernel& k, int N, bool corrupt, std::string& detail) {
    const EdgeTable table = relevant_edges(k, N);
    const std::uint64_t nconf = std::uint64_t(1) << table.size();
    for (std::uint64_t mask = 0; mask < nconf; ++mask) {
        MaskEnv env{&table, mask};
        const BigInt dp = count_paths_exact(env, 1.0, k, N).first;
        BigInt oracle;
        if (corrupt) {
            CorruptEnv bad{env, 0};
            oracle = enumerate_oracle(bad, k, N);
        } else {
            oracle = enumerate_oracle(env, k, N);
        }
        if (dp != oracle) {
            std::ostringstream os;
            os << "d=" << k.dim() << " N=" << N << " mask=" << mask << ": dp=" << dp
               << " oracle=" << oracle;
            detail = os.str();
            return false;
        }
    }
    return true;
}

}  // namespace

SuiteResult verify_oracle_equivalence(bool corrupt) {
    SuiteResult r{"oracle-equivalence", true, ""};
    const Kernel nn1 = make_nn_kernel(1);
    for (int N = 1; N <= 3; ++N) {
        if (!oracle_case(nn1, N, corrupt, r.detail)) {
            r.pass = false;
            return r;
        }
    }
    const Kernel nn2 = make_nn_kernel(2);
    if (!oracle_case(nn2, 2, corrupt, r.detail)) {
        r.pass = false;
        return r;
    }
    r.detail = "nn d=1 N<=3 and nn d=2 N=2, all configurations";
    return r;
}

SuiteResult verify_sizebias_identity() {
    SuiteResult r{"sizebias-identity", true, "nn d=1, N<=3, F in {1, id, 1{Z>=2}}, p in {1, 1/2}"};
    for (int N = 1; N <= 3; ++N) {
        for (const Rational& p : {Rational(1), Rational(1, 2)}) {
            for (FTag f : {FTag::one, FTag::identity, FTag::indicator_ge2}) {
                const Rational disc = sizebias_identity_check(N, p, f);
                if (disc != 0) {
                    std::ostringstream os;
                    os << "N=" << N << " p=" << p << ": discrepancy " << disc;
                    r = {"sizebias-identity", false, os.str()};
                    return r;
                }
            }
        }
    }
    return r;
}

SuiteResult verify_martingale() {
    SuiteResult r{"martingale", true, "nn d=1, N<=2, exact E[W_{N+1}|F_N] = W_N, p in {1/2,1,7/4}"};
    const Kernel k = make_nn_kernel(1);
    for (int N = 1; N <= 2; ++N) {
        const EdgeTable all = relevant_edges(k, N + 1);
        const EdgeTable past = relevant_edges(k, N);
        const std::size_t npast = past.size();
        const std::size_t nfuture = all.size() - npast;
        for (const Rational& p : {Rational(1, 2), Rational(1), Rational(7, 4)}) {
            const Rational pf = p / 2;
            Rational pN = 1, pN1 = 1;
            for (int n = 0; n < N; ++n) pN *= p;
            pN1 = pN * p;
            for (std::uint64_t past_mask = 0; past_mask < (std::uint64_t(1) << npast); ++past_mask) {
                MaskEnv env{&all, past_mask};
                const Rational wN = Rational(count_paths_exact(env, 1.0, k, N).first) / pN;
                Rational cond = 0;
                for (std::uint64_t fut = 0; fut < (std::uint64_t(1) << nfuture); ++fut) {
                    Rational q = 1;
                    for (std::size_t i = 0; i < nfuture; ++i) q *= ((fut >> i) & 1u) ? pf : (1 - pf);
                    MaskEnv full{&all, past_mask | (fut << npast)};
                    cond += q * Rational(count_paths_exact(full, 1.0, k, N + 1).first) / pN1;
                }
                if (cond != wN) {
                    std::ostringstream os;
                    os << "N=" << N << " p=" << p << " mask=" << past_mask << ": E[W|F]=" << cond
                       << " W=" << wN;
                    return {"martingale", false, os.str()};
                }
            }
        }
    }
    return r;
}

SuiteResult verify_supermultiplicativity() {
    SuiteResult r{"supermultiplicativity", true, "nn d=2, p=1, N=M=8, 200 realizations"};
    const Kernel k = make_nn_kernel(2);
    const EnvSeed base = env_seed_from_hex("5eedc0de5eedc0de5eedc0de5eedc0de");
    for (std::uint64_t i = 0; i < 200; ++i) {
        if (!supermultiplicativity_check(k, 1.0, 8, 8, base.with_stream(i))) {
            r = {"supermultiplicativity", false, "violation at stream " + std::to_string(i)};
            return r;
        }
    }
    return r;
}

SuiteResult verify_bridge_equivalence() {
    SuiteResult r{"bridge-equivalence", true, "nn d=1, N<=3, exhaustive over spines and environments"};
    const Kernel k = make_nn_kernel(1);
    for (int N = 2; N <= 3; ++N) {
        const EdgeTable table = relevant_edges(k, N);
        const std::uint64_t nconf = std::uint64_t(1) << table.size();
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
                const BigInt zbar = pinned_count_exact(te, T, 1.0, k, N);
                const auto bridges = find_bridges(te, T, 1.0, k, N, N);
                if ((zbar >= 2) != !bridges.empty()) {
                    std::ostringstream os;
                    os << "N=" << N << " spine=" << spine_mask << " mask=" << mask
                       << ": zbar=" << zbar << " bridges=" << bridges.size();
                    return {"bridge-equivalence", false, os.str()};
                }
            }
        }
    }
    return r;
}

SuiteResult verify_monotone_coupling() {
    SuiteResult r{"monotone-coupling", true, "nn d=2, sampled edges, p-grid subset relation"};
    const Kernel k = make_nn_kernel(2);
    const EnvSeed env = env_seed_from_hex("00facadefacadefacadefacadeface00");
    const std::vector<double> grid{0.5, 1.0, 2.0, 3.0, 4.0};
    const SpineWalk T = sample_spine(k, 64, env.with_stream(77));  // arbitrary sites to probe
    for (int n = 0; n + 1 < 64; ++n) {
        for (const auto& [z, w] : k.support()) {
            Edge e{n, T.positions[static_cast<std::size_t>(n)],
                   add(T.positions[static_cast<std::size_t>(n)], z)};
            bool prev = false;
            for (double p : grid) {
                const bool now = is_open(env, e, p, k);
                if (prev && !now) {
                    return {"monotone-coupling", false, "open set not monotone at level " +
                                                            std::to_string(n)};
                }
                prev = now;
            }
        }
    }
    return r;
}

std::vector<SuiteResult> run_verify(VerifyScope scope, const VerifyOptions& opts) {
    std::vector<SuiteResult> out;
    const bool all = scope == VerifyScope::all;
    if (all || scope == VerifyScope::oracle) out.push_back(verify_oracle_equivalence(opts.corrupt_oracle));
    if (all || scope == VerifyScope::identity) out.push_back(verify_sizebias_identity());
    if (all || scope == VerifyScope::invariants) {
        out.push_back(verify_martingale());
        out.push_back(verify_supermultiplicativity());
        out.push_back(verify_bridge_equivalence());
        out.push_back(verify_monotone_coupling());
    }
    return out;
}

}  // namespace opath
