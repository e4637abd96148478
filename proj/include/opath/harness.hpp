#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "opath/common.hpp"

namespace opath {

/// Streaming mean/variance with exact pooled merging.
struct Estimate {
    std::uint64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;  ///< sum of squared deviations from the mean
    std::uint64_t discarded = 0;

    double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
    double ci95() const { return n > 0 ? 1.96 * std::sqrt(variance() / static_cast<double>(n)) : 0.0; }
};

void accumulate(Estimate& e, double x);
Estimate merge(const Estimate& a, const Estimate& b);

Estimate estimate_from_values(const std::vector<std::optional<double>>& values);

/// Worker cap: OPATH_THREADS, else hardware concurrency.
unsigned worker_count();

/// Evaluate task(stream) for streams 0..replicas-1. Workers steal indices, but
/// results are folded in stream order, so the outcome is independent of the
/// worker count. nullopt marks a discarded replica.
std::vector<std::optional<double>> run_replica_values(
    std::uint64_t replicas, const std::function<std::optional<double>(std::uint64_t)>& task);

Estimate run_replicas(std::uint64_t replicas,
                      const std::function<std::optional<double>(std::uint64_t)>& task);

/// Stable 64-bit digest of a manifest, hex-encoded; embedded in every output file.
std::string manifest_hash(const nlohmann::ordered_json& manifest);

}  // namespace opath
