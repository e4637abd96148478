#pragma once

#include <map>
#include <set>
#include <tuple>
#include <vector>

#include "opath/common.hpp"
#include "opath/kernel.hpp"

namespace opath {

struct EdgeKey {
    std::int64_t level;
    Site from;
    Site to;

    auto operator<=>(const EdgeKey&) const = default;
};

inline EdgeKey key_of(const Edge& e) { return EdgeKey{e.level, e.from, e.to}; }

/// All edges a length-N path from the origin can possibly use, in a fixed
/// deterministic order (level-major, then lexicographic by endpoints).
struct EdgeTable {
    std::vector<Edge> edges;
    std::map<EdgeKey, std::size_t> index;

    std::size_t size() const { return edges.size(); }
};

EdgeTable relevant_edges(const Kernel& k, int N);

/// Finite explicit environment: absent edges are closed.
struct ExplicitEnv {
    std::map<EdgeKey, bool> states;

    bool open(const Edge& e, double /*pf*/) const {
        auto it = states.find(key_of(e));
        return it != states.end() && it->second;
    }
};

/// Environment given by a bitmask over an EdgeTable; the workhorse of the
/// exhaustive verification sweeps (one mask per configuration).
struct MaskEnv {
    const EdgeTable* table = nullptr;
    std::uint64_t mask = 0;

    bool open(const Edge& e, double /*pf*/) const {
        auto it = table->index.find(key_of(e));
        if (it == table->index.end()) return false;
        return (mask >> it->second) & 1u;
    }
};

}  // namespace opath
