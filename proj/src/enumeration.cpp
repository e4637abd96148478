#include "opath/enumeration.hpp"

namespace opath {

EdgeTable relevant_edges(const Kernel& k, int N) {
    if (N < 0) throw std::invalid_argument("N must be >= 0");
    EdgeTable t;
    std::set<Site> level_sites{Site(k.dim(), 0)};
    for (int n = 0; n < N; ++n) {
        std::set<Site> next;
        for (const auto& x : level_sites) {
            for (const auto& [z, w] : k.support()) {
                Site y = add(x, z);
                t.edges.push_back(Edge{n, x, y});
                next.insert(std::move(y));
            }
        }
        level_sites = std::move(next);
    }
    for (std::size_t i = 0; i < t.edges.size(); ++i) t.index[key_of(t.edges[i])] = i;
    return t;
}

}  // namespace opath
