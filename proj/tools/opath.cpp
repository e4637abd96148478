#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "opath/bounds.hpp"
#include "opath/environment.hpp"
#include "opath/harness.hpp"
#include "opath/kernel.hpp"
#include "opath/pathcount.hpp"
#include "opath/sizebias.hpp"
#include "opath/verify.hpp"

namespace {

using nlohmann::json;
using nlohmann::ordered_json;
using namespace opath;

constexpr const char* kArtifactVersion = "1.0.0";

struct Config {
    std::string family = "nn";
    int d = 1;
    int L = 1;
    std::vector<double> p_grid;  // single p = grid of one
    int N = 10;
    int N0 = 0;
    std::uint64_t replicas = 100;
    std::string seed_hex = "00000000000000000000000000000000";
    std::uint64_t stream = 0;
    int horizon = 2000;
    double rel_tol = 1e-3;
    std::optional<int> cap;
    std::string out;
};

Kernel build_kernel(const Config& c) {
    if (c.family == "nn") return make_nn_kernel(c.d);
    if (c.family == "box") return make_box_kernel(c.d, c.L);
    throw config_error("kernel.family must be nn or box (profiles enter via kernel JSON files)");
}

void load_config_file(Config& c, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw config_error(std::string("config parse error: ") + e.what());
    }
    if (j.contains("kernel")) {
        const auto& k = j["kernel"];
        if (k.contains("family")) c.family = k["family"].get<std::string>();
        if (k.contains("d")) c.d = k["d"].get<int>();
        if (k.contains("L")) c.L = k["L"].get<int>();
    }
    if (j.contains("p")) c.p_grid = {j["p"].get<double>()};
    if (j.contains("p_grid")) c.p_grid = j["p_grid"].get<std::vector<double>>();
    if (j.contains("N")) c.N = j["N"].get<int>();
    if (j.contains("N0")) c.N0 = j["N0"].get<int>();
    if (j.contains("replicas")) c.replicas = j["replicas"].get<std::uint64_t>();
    if (j.contains("seed")) c.seed_hex = j["seed"].get<std::string>();
    if (j.contains("stream")) c.stream = j["stream"].get<std::uint64_t>();
    if (j.contains("horizon")) c.horizon = j["horizon"].get<int>();
    if (j.contains("rel_tol")) c.rel_tol = j["rel_tol"].get<double>();
    if (j.contains("cap")) c.cap = j["cap"].get<int>();
    if (j.contains("out")) c.out = j["out"].get<std::string>();
}

ordered_json make_manifest(const Config& c, const std::string& op) {
    ordered_json m;
    m["operation"] = op;
    m["version"] = kArtifactVersion;
    m["kernel"] = {{"family", c.family}, {"d", c.d}, {"L", c.L}};
    m["p_grid"] = c.p_grid;
    m["N"] = c.N;
    m["N0"] = c.N0;
    m["replicas"] = c.replicas;
    m["seed"] = c.seed_hex;
    m["stream"] = c.stream;
    return m;
}

std::string fmt_double(double v) {
    if (v == kNegInf) return "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot write " + path);
    out << content;
}

void require(bool ok, const std::string& field) {
    if (!ok) throw config_error("invalid config field: " + field);
}

int cmd_simulate(const Config& c) {
    require(!c.p_grid.empty(), "p");
    require(c.N >= 1, "N");
    require(c.replicas >= 1, "replicas");
    require(!c.out.empty(), "out");
    const Kernel k = build_kernel(c);
    for (double p : c.p_grid) require(p >= 0.0 && p <= p_max(k) + 1e-12, "p");
    const EnvSeed base = env_seed_from_hex(c.seed_hex, c.stream);
    const ordered_json manifest = make_manifest(c, "simulate");
    const std::string hash = manifest_hash(manifest);

    std::ostringstream csv;
    csv << "# manifest_hash=" << hash << "\n";
    csv << "p,N,replica,logZ,survived\n";
    ordered_json results = ordered_json::array();
    for (double p : c.p_grid) {
        auto values = run_replica_values(c.replicas, [&](std::uint64_t i) -> std::optional<double> {
            const double logZ = log_count_auto(base.with_stream(base.stream + i), p, k, c.N);
            return logZ;  // -inf encodes extinction; kept so the CSV is complete
        });
        Estimate cond;  // conditioned on survival, in units of (1/N) log Z
        std::uint64_t extinct = 0;
        for (std::uint64_t i = 0; i < values.size(); ++i) {
            const double logZ = *values[i];
            const bool survived = logZ != kNegInf;
            if (survived)
                accumulate(cond, logZ / c.N);
            else
                ++extinct;
            csv << fmt_double(p) << ',' << c.N << ',' << i << ',' << fmt_double(logZ) << ','
                << (survived ? 1 : 0) << "\n";
        }
        ordered_json row;
        row["p"] = p;
        row["N"] = c.N;
        row["replicas"] = c.replicas;
        row["survival_fraction"] = static_cast<double>(c.replicas - extinct) / c.replicas;
        row["extinct"] = extinct;
        row["no_survivor"] = cond.n == 0;
        row["growth_rate_mean"] = cond.n > 0 ? cond.mean : 0.0;
        row["growth_rate_ci95"] = cond.ci95();
        row["log_p"] = std::log(p);
        results.push_back(std::move(row));
    }
    ordered_json summary;
    summary["manifest"] = manifest;
    summary["manifest_hash"] = hash;
    summary["results"] = results;
    write_file(c.out + ".csv", csv.str());
    write_file(c.out + ".json", summary.dump(2) + "\n");
    return 0;
}

int cmd_criterion(const Config& c) {
    require(c.p_grid.size() == 1, "p");
    require(c.N0 >= 1, "N0");
    require(c.replicas >= 10, "replicas");
    require(!c.out.empty(), "out");
    const Kernel k = build_kernel(c);
    const double p = c.p_grid[0];
    require(p > 0.0 && p <= p_max(k) + 1e-12, "p");
    const EnvSeed base = env_seed_from_hex(c.seed_hex, c.stream);
    const ordered_json manifest = make_manifest(c, "criterion");
    const std::string hash = manifest_hash(manifest);

    const auto samples = criterion_samples(k, p, c.N0, c.replicas, base);
    const CriterionReport report = report_from_samples(samples, p, c.N0);

    std::ostringstream csv;
    csv << "# manifest_hash=" << hash << "\n";
    csv << "replica,N0,p,logZbar\n";
    for (std::size_t i = 0; i < samples.size(); ++i)
        csv << i << ',' << c.N0 << ',' << fmt_double(p) << ',' << fmt_double(samples[i]) << "\n";

    ordered_json out;
    out["manifest"] = manifest;
    out["manifest_hash"] = hash;
    out["report"] = {{"N0", report.N0},
                     {"p", report.p},
                     {"replicas", report.replicas},
                     {"mean_logZbar", report.mean_logZbar},
                     {"ci95", report.ci95},
                     {"threshold", report.threshold},
                     {"verdict", verdict_name(report.verdict)}};
    write_file(c.out + ".csv", csv.str());
    write_file(c.out + ".json", out.dump(2) + "\n");
    return 0;
}

int cmd_bounds(const Config& c) {
    const Kernel k = build_kernel(c);
    const ordered_json manifest = make_manifest(c, "bounds");
    ordered_json doc;
    doc["manifest"] = manifest;
    doc["manifest_hash"] = manifest_hash(manifest);
    ordered_json reports = ordered_json::object();
    auto attempt = [&](const std::string& name, auto&& fn) {
        try {
            reports[name] = bound_report_to_json(fn());
        } catch (const std::exception& e) {
            reports[name] = {{"error", e.what()}};
        }
    };
    if (c.family == "nn") {
        attempt("nn_pc2_lower", [&] { return nn_pc2_lower(c.d); });
        reports["nn_bridge_factor"] = nn_bridge_factor(c.d);
        if (c.N >= 1) reports["nn_logZbar_lower"] = nn_logZbar_lower(c.d, c.N);
        reports["pc_blease_reference"] = blease_pc_reference(c.d);  // reference constant only
    }
    attempt("spreadout_pc2_lower", [&] { return spreadout_pc2_lower(k, c.rel_tol, c.cap); });
    attempt("spreadout_pc_asymptotic", [&] { return spreadout_pc_asymptotic(k, c.rel_tol, c.cap); });
    attempt("pc3_upper", [&] { return pc3_upper(k, c.horizon); });
    doc["bounds"] = reports;
    const std::string text = doc.dump(2) + "\n";
    if (c.out.empty())
        std::cout << text;
    else
        write_file(c.out + ".json", text);
    return 0;
}

int cmd_verify(const std::string& scope_name) {
    VerifyScope scope = VerifyScope::all;
    if (scope_name == "oracle")
        scope = VerifyScope::oracle;
    else if (scope_name == "identity")
        scope = VerifyScope::identity;
    else if (scope_name == "invariants")
        scope = VerifyScope::invariants;
    else if (scope_name != "all")
        throw config_error("scope must be oracle|identity|invariants|all");
    const auto results = run_verify(scope);
    bool all_pass = true;
    for (const auto& r : results) {
        std::printf("%-24s %s  %s\n", r.name.c_str(), r.pass ? "PASS" : "FAIL", r.detail.c_str());
        all_pass = all_pass && r.pass;
    }
    return all_pass ? 0 : 3;
}

int cmd_convolve(const Config& c, const std::string& a_path, const std::string& b_path,
                 unsigned power) {
    Kernel a = a_path.empty() ? build_kernel(c) : [&] {
        std::ifstream in(a_path);
        if (!in) throw config_error("cannot open " + a_path);
        json j;
        in >> j;
        return kernel_from_json(j);
    }();
    Kernel result = a;
    if (!b_path.empty()) {
        std::ifstream in(b_path);
        if (!in) throw config_error("cannot open " + b_path);
        json j;
        in >> j;
        result = convolve(a, kernel_from_json(j));
    }
    if (power > 1) {
        Kernel acc = result;
        for (unsigned i = 1; i < power; ++i) acc = convolve(acc, result);
        result = acc;
    }
    const std::string text = kernel_to_json(result).dump(2) + "\n";
    if (c.out.empty())
        std::cout << text;
    else
        write_file(c.out + ".json", text);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"oriented-percolation path-counting laboratory"};
    app.require_subcommand(1);

    Config cfg;
    std::string config_path;
    std::string scope = "all";
    std::string conv_a, conv_b;
    unsigned conv_power = 1;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file (flags override)");
        sub->add_option("--family", cfg.family, "kernel family: nn | box");
        sub->add_option("--d", cfg.d, "dimension");
        sub->add_option("--L", cfg.L, "box radius");
        sub->add_option("--p", cfg.p_grid, "percolation parameter(s)");
        sub->add_option("--N", cfg.N, "horizon");
        sub->add_option("--N0", cfg.N0, "criterion horizon");
        sub->add_option("--replicas", cfg.replicas, "Monte Carlo replicas");
        sub->add_option("--seed", cfg.seed_hex, "128-bit seed, hex");
        sub->add_option("--stream", cfg.stream, "base stream index");
        sub->add_option("--horizon", cfg.horizon, "Green-function horizon");
        sub->add_option("--rel-tol", cfg.rel_tol, "return-sum relative tolerance");
        sub->add_option("--cap", [&cfg](const std::vector<std::string>& v) {
            cfg.cap = std::stoi(v.front());
            return true;
        }, "return-sum truncation cap");
        sub->add_option("--out", cfg.out, "output path prefix");
    };

    auto* sim = app.add_subcommand("simulate", "path-count growth samples over a p-grid");
    add_common(sim);
    auto* crit = app.add_subcommand("criterion", "finite-volume criterion estimate");
    add_common(crit);
    auto* bnd = app.add_subcommand("bounds", "closed-form threshold bounds");
    add_common(bnd);
    auto* ver = app.add_subcommand("verify", "exhaustive verification suites");
    ver->add_option("--scope", scope, "oracle | identity | invariants | all");
    auto* conv = app.add_subcommand("convolve", "kernel convolution utility");
    add_common(conv);
    conv->add_option("--a", conv_a, "kernel JSON file (defaults to --family kernel)");
    conv->add_option("--b", conv_b, "second kernel JSON file");
    conv->add_option("--power", conv_power, "convolution power");

    // Parse twice so config-file values land first and flags win.
    try {
        app.parse(argc, argv);
        if (!config_path.empty()) {
            Config base;
            load_config_file(base, config_path);
            std::swap(cfg, base);
            app.clear();
            app.parse(argc, argv);
        }
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    } catch (const opath::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (sim->parsed()) return cmd_simulate(cfg);
        if (crit->parsed()) return cmd_criterion(cfg);
        if (bnd->parsed()) return cmd_bounds(cfg);
        if (ver->parsed()) return cmd_verify(scope);
        if (conv->parsed()) return cmd_convolve(cfg, conv_a, conv_b, conv_power);
    } catch (const opath::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const opath::regime_error& e) {
        std::cerr << "numerical/regime error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 2;
}
