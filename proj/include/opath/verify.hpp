#pragma once

#include <string>
#include <vector>

#include "opath/common.hpp"

namespace opath {

enum class VerifyScope { oracle, identity, invariants, all };

struct SuiteResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct VerifyOptions {
    /// Test hook: flip one edge between the two counting routes of the oracle
    /// suite, which must then fail (negative control).
    bool corrupt_oracle = false;
};

std::vector<SuiteResult> run_verify(VerifyScope scope, const VerifyOptions& opts = {});

/// Exhaustive count_paths vs enumerate_oracle over every configuration.
SuiteResult verify_oracle_equivalence(bool corrupt = false);
/// Exact size-bias identity on nn d=1 instances.
SuiteResult verify_sizebias_identity();
/// Exact conditional-expectation martingale check.
SuiteResult verify_martingale();
/// Per-realization supermultiplicativity sweep.
SuiteResult verify_supermultiplicativity();
/// Zbar >= 2 iff a bridge exists, exhaustively on small instances.
SuiteResult verify_bridge_equivalence();
/// Pathwise monotone coupling across a p-grid on sampled edge sets.
SuiteResult verify_monotone_coupling();

}  // namespace opath
