// Acceptance gate: one PASS/FAIL line per criterion. Usage: acceptance <path-to-cli>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "opath/bounds.hpp"
#include "opath/enumeration.hpp"
#include "opath/harness.hpp"
#include "opath/pathcount.hpp"
#include "opath/sizebias.hpp"
#include "opath/verify.hpp"

using namespace opath;
using nlohmann::json;

namespace {

std::string g_cli;
std::filesystem::path g_outdir;
int g_failures = 0;

using Clock = std::chrono::steady_clock;

void report(int criterion, bool pass, double seconds, const std::string& detail) {
    std::printf("criterion %d: %s  (%.1fs)  %s\n", criterion, pass ? "PASS" : "FAIL", seconds,
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

int run_cli(const std::string& args, unsigned threads) {
    const std::string cmd = "OPATH_THREADS=" + std::to_string(threads) + " " + g_cli + " " + args;
    return std::system(cmd.c_str());
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// --- criterion 1: exhaustive oracle equivalence ---------------------------
void criterion1() {
    const auto t0 = Clock::now();
    const SuiteResult r = verify_oracle_equivalence();
    const double dt = std::chrono::duration<double>(Clock::now() - t0).count();
    report(1, r.pass && dt < 120.0, dt, r.detail);
}

// --- criterion 2: exact size-bias identity --------------------------------
void criterion2() {
    const auto t0 = Clock::now();
    bool pass = true;
    std::string detail = "nn d=1 N=2, 64 envs x 4 spines, F in {1, id, 1{Z>=2}}: zero discrepancy";
    for (FTag f : {FTag::one, FTag::identity, FTag::indicator_ge2}) {
        const Rational disc = sizebias_identity_check(2, Rational(1), f);
        if (disc != 0) {
            pass = false;
            std::ostringstream os;
            os << "nonzero discrepancy " << disc;
            detail = os.str();
        }
    }
    const double dt = std::chrono::duration<double>(Clock::now() - t0).count();
    report(2, pass && dt < 60.0, dt, detail);
}

// --- criterion 3: martingale, exact and Monte Carlo -----------------------
void criterion3() {
    const auto t0 = Clock::now();
    const SuiteResult exact = verify_martingale();

    const Kernel k = make_nn_kernel(2);
    const double p = 1.2;
    const int N = 15;
    const EnvSeed base = env_seed_from_hex("000000000000000000000000c3c3c3c3");
    const Estimate e = run_replicas(10'000, [&](std::uint64_t i) -> std::optional<double> {
        const double logZ = log_count_auto(base.with_stream(i), p, k, N);
        return logZ == kNegInf ? 0.0 : std::exp(logZ - N * std::log(p));
    });
    const double sigma = std::sqrt(e.variance() / static_cast<double>(e.n));
    const bool mc_ok = std::abs(e.mean - 1.0) <= 3.0 * sigma;

    std::ostringstream os;
    os << "exact E[W_{N+1}|F_N]=W_N " << (exact.pass ? "ok" : "VIOLATED") << "; MC E[W_15]="
       << e.mean << " +- " << sigma << " (target 1)";
    const double dt = std::chrono::duration<double>(Clock::now() - t0).count();
    report(3, exact.pass && mc_ok, dt, os.str());
}

// --- criterion 4: nearest-neighbor bridge lemma ---------------------------
void criterion4() {
    const auto t0 = Clock::now();
    const Kernel k = make_nn_kernel(1);
    const EnvSeed base = env_seed_from_hex("00000000000000000000000000b41d6e");
    bool pass = true;
    std::ostringstream os;
    for (int N : {10, 20, 30}) {
        const std::uint64_t reps = 10'000;
        const auto values = run_replica_values(reps, [&](std::uint64_t i) -> std::optional<double> {
            const EnvSeed env = base.with_stream(2 * i);
            const SpineWalk T = sample_spine(k, N, base.with_stream(2 * i + 1));
            SeededEnv se{env};
            auto te = tilt_environment(se, T);
            return pinned_count_exact(te, T, 1.0, k, N) == 1 ? 1.0 : 0.0;
        });
        std::uint64_t ones = 0;
        for (const auto& v : values) ones += *v > 0.5 ? 1 : 0;
        const double frac = static_cast<double>(ones) / reps;
        const double bound = std::pow(7.0 / 8.0, N - 1);
        const double sigma = std::sqrt(frac * (1.0 - frac) / reps);
        if (frac > bound + 3.0 * sigma) pass = false;
        os << "N=" << N << ": P(Zbar=1)=" << frac << " <= " << bound << "+3s; ";
    }

    // Length-2 bridge-count classifier on sampled spines.
    std::uint64_t mismatches = 0;
    for (int d : {2, 3}) {
        const Kernel kd = make_nn_kernel(d);
        for (std::uint64_t s = 0; s < 1000; ++s) {
            const SpineWalk T = sample_spine(kd, 30, base.with_stream(100'000 + s));
            for (int a = 1; a < 30; ++a)
                if (length2_bridge_options(kd, T, a) != length2_bridge_case_count(T, a, d)) ++mismatches;
        }
    }
    if (mismatches > 0) pass = false;
    os << "classifier mismatches=" << mismatches;
    const double dt = std::chrono::duration<double>(Clock::now() - t0).count();
    report(4, pass && dt < 300.0, dt, os.str());
}

// --- criterion 5: finite-volume criterion via the CLI ---------------------
const char* kC5Args =
    "criterion --family box --d 3 --L 3 --p 1 --N0 25 --replicas 10000 "
    "--seed 00000000000000000000000000005a1e ";

void criterion5() {
    const auto t0 = Clock::now();
    const std::string out = (g_outdir / "c5_w4").string();
    bool pass = run_cli(std::string(kC5Args) + "--out " + out, 4) == 0;
    std::ostringstream os;
    if (pass) {
        const json doc = json::parse(slurp(out + ".json"));
        const auto& rep = doc.at("report");
        const double mean = rep.at("mean_logZbar").get<double>();
        const double ci = rep.at("ci95").get<double>();
        const std::string verdict = rep.at("verdict").get<std::string>();

        // Spread-out lemma leading term: log2 * sum_{k=2}^{N0} ((N0-k)/N0) f^{*2k}(0).
        const Kernel k = make_box_kernel(3, 3);
        const auto r = even_return_probabilities(k, 25);
        double lead = 0.0;
        for (int j = 2; j <= 25; ++j) lead += (25.0 - j) / 25.0 * r[static_cast<std::size_t>(j)];
        const double target = std::log(2.0) * lead;
        const double three_sigma = 3.0 * ci / 1.96;

        pass = verdict == "met" && mean >= target - three_sigma;
        os << "verdict=" << verdict << ", mean=" << mean << " vs lemma term " << target;
    } else {
        os << "CLI run failed";
    }
    const double dt = std::chrono::duration<double>(Clock::now() - t0).count();
    report(5, pass && dt < 900.0, dt, os.str());
}

// --- criterion 6: second moment -------------------------------------------
void criterion6() {
    const auto t0 = Clock::now();
    const Kernel k1 = make_nn_kernel(1);
    const bool hand = std::abs(second_moment(k1, 1.0, 1, 5) - 1.5) < 1e-12;

    const Kernel k3 = make_nn_kernel(3);
    const double p = 1.5;
    const int N = 6;
    const double dp = second_moment(k3, p, N, 14);
    const EnvSeed base = env_seed_from_hex("00000000000000000000000000000d06");
    const Estimate e = run_replicas(100'000, [&](std::uint64_t i) -> std::optional<double> {
        const SeededEnv env{base.with_stream(i)};
        const double z = count_paths_exact(env, p, k3, N).first.convert_to<double>();
        const double w = z / std::pow(p, N);
        return w * w;
    });
    const double sigma = std::sqrt(e.variance() / static_cast<double>(e.n));
    const bool mc_ok = std::abs(e.mean - dp) <= 3.0 * sigma;

    // Bounded above the threshold, divergent below (p = 1).
    const double sup20 = second_moment(k3, p, 20, 44);
    const double at40 = second_moment(k3, p, 40, 44);
    const bool bounded = std::max(sup20, at40) <= at40 * 1.01;
    const double lo = second_moment(k3, 1.0, 4, 44);
    const double hi = second_moment(k3, 1.0, 40, 44);
    const bool divergent = hi / lo > 10.0;

    std::ostringstream os;
    os << "hand 3/2 " << (hand ? "ok" : "FAIL") << "; DP=" << dp << " MC=" << e.mean << " +- "
       << sigma << "; bounded@p=1.5 " << (bounded ? "ok" : "FAIL") << "; divergent@p=1 "
       << (divergent ? "ok" : "FAIL");
    const double dt = std::chrono::duration<double>(Clock::now() - t0).count();
    report(6, hand && mc_ok && bounded && divergent, dt, os.str());
}

// --- criterion 7: threshold-gap ratio -------------------------------------
void criterion7() {
    const auto t0 = Clock::now();
    bool pass = true;
    std::ostringstream os;
    for (int L : {2, 4, 8}) {
        const Kernel k = make_box_kernel(5, L);
        const double lower = spreadout_pc2_lower(k, 1e-4).value;
        const double asym = spreadout_pc_asymptotic(k, 1e-4).value;
        const double ratio = (lower - 1.0) / (asym - 1.0);
        const double target = 2.0 * std::log(2.0);
        if (std::abs(ratio - target) > 0.05 * target) pass = false;
        os << "L=" << L << ": ratio=" << ratio << "; ";
    }
    os << "target 2log2=" << 2.0 * std::log(2.0);
    const double dt = std::chrono::duration<double>(Clock::now() - t0).count();
    report(7, pass && dt < 300.0, dt, os.str());
}

// --- criterion 8: growth-gap positivity via the CLI -----------------------
const char* kC8Args =
    "simulate --family nn --d 1 --p 1.9 --N 400 --replicas 256 "
    "--seed 000000000000000000000000000008f8 ";

void criterion8() {
    const auto t0 = Clock::now();
    const std::string out = (g_outdir / "c8_w4").string();
    bool pass = run_cli(std::string(kC8Args) + "--out " + out, 4) == 0;
    std::ostringstream os;
    if (pass) {
        const json doc = json::parse(slurp(out + ".json"));
        const auto& row = doc.at("results").at(0);
        const std::uint64_t survivors =
            row.at("replicas").get<std::uint64_t>() - row.at("extinct").get<std::uint64_t>();
        const double mean = row.at("growth_rate_mean").get<double>();
        const double ci = row.at("growth_rate_ci95").get<double>();
        const double logp = std::log(1.9);
        pass = survivors >= 200 && mean + ci < logp;
        os << "survivors=" << survivors << ", F(p) in [" << mean - ci << ", " << mean + ci
           << "], log p=" << logp;
    } else {
        os << "CLI run failed";
    }
    const double dt = std::chrono::duration<double>(Clock::now() - t0).count();
    report(8, pass && dt < 600.0, dt, os.str());
}

// --- criterion 9: determinism across worker counts ------------------------
void criterion9() {
    const auto t0 = Clock::now();
    bool pass = true;
    std::ostringstream os;
    const std::string c5b = (g_outdir / "c5_w1").string();
    const std::string c8b = (g_outdir / "c8_w1").string();
    if (run_cli(std::string(kC5Args) + "--out " + c5b, 1) != 0) pass = false;
    if (run_cli(std::string(kC8Args) + "--out " + c8b, 1) != 0) pass = false;
    for (const auto& [a, b] : {std::pair{std::string((g_outdir / "c5_w4").string()), c5b},
                               std::pair{std::string((g_outdir / "c8_w4").string()), c8b}}) {
        for (const char* ext : {".csv", ".json"}) {
            if (slurp(a + ext) != slurp(b + ext) || slurp(a + ext).empty()) {
                pass = false;
                os << a << ext << " differs across worker counts; ";
            }
        }
    }
    if (pass) os << "CSV and JSON byte-identical for 1 vs 4 workers (criteria 5 and 8 reruns)";
    const double dt = std::chrono::duration<double>(Clock::now() - t0).count();
    report(9, pass, dt, os.str());
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: acceptance <path-to-cli>\n");
        return 2;
    }
    g_cli = argv[1];
    g_outdir = std::filesystem::temp_directory_path() / "opath-acceptance";
    std::filesystem::create_directories(g_outdir);

    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();

    if (g_failures > 0) {
        std::printf("%d criterion(s) FAILED\n", g_failures);
        return 1;
    }
    std::printf("all 9 criteria passed\n");
    return 0;
}
