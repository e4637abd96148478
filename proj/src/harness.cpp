#include "opath/harness.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

namespace opath {

void accumulate(Estimate& e, double x) {
    ++e.n;
    const double delta = x - e.mean;
    e.mean += delta / static_cast<double>(e.n);
    e.m2 += delta * (x - e.mean);
}

Estimate merge(const Estimate& a, const Estimate& b) {
    if (a.n == 0) {
        Estimate r = b;
        r.discarded += a.discarded;
        return r;
    }
    if (b.n == 0) {
        Estimate r = a;
        r.discarded += b.discarded;
        return r;
    }
    Estimate r;
    r.n = a.n + b.n;
    const double delta = b.mean - a.mean;
    const double na = static_cast<double>(a.n), nb = static_cast<double>(b.n);
    r.mean = a.mean + delta * nb / (na + nb);
    r.m2 = a.m2 + b.m2 + delta * delta * na * nb / (na + nb);
    r.discarded = a.discarded + b.discarded;
    return r;
}

Estimate estimate_from_values(const std::vector<std::optional<double>>& values) {
    Estimate e;
    for (const auto& v : values) {
        if (v)
            accumulate(e, *v);
        else
            ++e.discarded;
    }
    return e;
}

unsigned worker_count() {
    if (const char* env = std::getenv("OPATH_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

std::vector<std::optional<double>> run_replica_values(
    std::uint64_t replicas, const std::function<std::optional<double>(std::uint64_t)>& task) {
    if (replicas == 0) throw std::invalid_argument("replicas must be >= 1");
    std::vector<std::optional<double>> results(replicas);
    const unsigned workers =
        static_cast<unsigned>(std::min<std::uint64_t>(worker_count(), replicas));
    if (workers <= 1) {
        for (std::uint64_t i = 0; i < replicas; ++i) results[i] = task(i);
        return results;
    }
    std::atomic<std::uint64_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    std::uint64_t failing_stream = 0;
    auto worker = [&] {
        for (;;) {
            const std::uint64_t i = next.fetch_add(1);
            if (i >= replicas) return;
            try {
                results[i] = task(i);
            } catch (...) {
                std::lock_guard lock(err_mutex);
                if (!first_error) {
                    first_error = std::current_exception();
                    failing_stream = i;
                }
                next.store(replicas);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) {
        try {
            std::rethrow_exception(first_error);
        } catch (const std::exception& ex) {
            throw std::runtime_error("replica stream " + std::to_string(failing_stream) +
                                     " failed: " + ex.what());
        }
    }
    return results;
}

Estimate run_replicas(std::uint64_t replicas,
                      const std::function<std::optional<double>(std::uint64_t)>& task) {
    return estimate_from_values(run_replica_values(replicas, task));
}

std::string manifest_hash(const nlohmann::ordered_json& manifest) {
    const std::string s = manifest.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace opath
