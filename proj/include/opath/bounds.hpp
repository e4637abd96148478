#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "opath/common.hpp"
#include "opath/kernel.hpp"

namespace opath {

struct BoundReport {
    std::string name;
    double value = 0.0;
    nlohmann::ordered_json ingredients;
    std::string validity;
};

/// Nearest-neighbor lower bound 1 + log(2)/(2 d^2) on the growth-gap threshold.
BoundReport nn_pc2_lower(int d);

/// Per-step factor g(d) from the length-2 bridge case analysis; g(1) = 7/8.
double nn_bridge_factor(int d);

/// log 2 * (1 - g(d)^{N-1}); the product over interior positions has N-1 slots.
double nn_logZbar_lower(int d, int N);

/// 1 + log 2 * sum_{k>=2} f^{*2k}(0) via the truncated return sum.
BoundReport spreadout_pc2_lower(const Kernel& k, double rel_tol, std::optional<int> cap = std::nullopt);

/// Coefficient-1/2 variant matching the lace-expansion expansion of p_c;
/// paired with the lower bound it exhibits the log 2 vs 1/2 gap.
BoundReport spreadout_pc_asymptotic(const Kernel& k, double rel_tol,
                                    std::optional<int> cap = std::nullopt);

/// E_p[W_N^2] by dynamic programming over the difference walk of two copies.
/// Mass escaping the l-infinity box of radius range_cap above 1e-9 is an error.
double second_moment(const Kernel& k, double p, int N, int range_cap);

/// Second-moment upper bound 1/(1 - pi) on the uniform-integrability threshold,
/// pi = P(copies split at step one and meet again), from return sums at the
/// given horizon with a power-law tail correction; bracket in the ingredients.
BoundReport pc3_upper(const Kernel& k, int horizon);

struct BridgeMass {
    double main = 0.0;        ///< sum_{j=2}^N (N-j) f^{*2j}(0)
    double correction = 0.0;  ///< N * (sum_{b>=1} f^{*2b}(0))^2, double-count bound
};

BridgeMass dirlo2_expected_bridge_mass(const Kernel& k, int N,
                                       std::optional<int> cap = std::nullopt);

/// Heuristic 1/d expansion of p_c, displayed as a reference constant only.
double blease_pc_reference(int d);

nlohmann::ordered_json bound_report_to_json(const BoundReport& r);

}  // namespace opath
