#include "opath/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

namespace opath {

namespace {

void check_dim(int d) {
    if (d < 1) throw std::invalid_argument("kernel dimension must be >= 1");
}

/// Visit all lattice points with |x_i| <= radius[i].
void for_each_point(std::span<const int> radius, const std::function<void(const Site&)>& fn) {
    Site x(radius.size());
    for (std::size_t i = 0; i < radius.size(); ++i) x[i] = -radius[i];
    for (;;) {
        fn(x);
        std::size_t i = 0;
        for (; i < x.size(); ++i) {
            if (x[i] < radius[i]) {
                ++x[i];
                break;
            }
            x[i] = -radius[i];
        }
        if (i == x.size()) return;
    }
}

template <class W>
bool flip_symmetric(int dim, const std::map<Site, W>& w) {
    for (int c = 0; c < dim; ++c) {
        for (const auto& [z, v] : w) {
            Site m = z;
            m[c] = -m[c];
            auto it = w.find(m);
            if (it == w.end()) return false;
            if constexpr (std::is_same_v<W, Rational>) {
                if (it->second != v) return false;
            } else {
                if (std::abs(it->second - v) > 1e-12 * std::max(std::abs(v), 1.0)) return false;
            }
        }
    }
    return true;
}

int linf_range(const std::map<Site, double>& w) {
    int r = 0;
    for (const auto& [z, v] : w)
        for (int zi : z) r = std::max(r, std::abs(zi));
    return r;
}

}  // namespace

Kernel::Kernel(int dim, std::map<Site, Rational> weights, KernelFamily family, int range)
    : dim_(dim), exact_(true), family_(family), range_(range), rw_(std::move(weights)) {
    check_dim(dim);
    Rational total = 0;
    for (const auto& [z, v] : rw_) {
        if (static_cast<int>(z.size()) != dim_) throw std::invalid_argument("offset dimension mismatch");
        if (v <= 0) throw std::invalid_argument("kernel weights must be strictly positive");
        total += v;
        dw_[z] = v.convert_to<double>();
    }
    if (total != 1) throw std::invalid_argument("kernel weights must sum to 1 exactly");
    symmetric_ = flip_symmetric(dim_, rw_);
    finalize();
}

Kernel::Kernel(int dim, std::map<Site, double> weights, KernelFamily family, int range)
    : dim_(dim), exact_(false), family_(family), range_(range), dw_(std::move(weights)) {
    check_dim(dim);
    double total = 0.0;
    for (const auto& [z, v] : dw_) {
        if (static_cast<int>(z.size()) != dim_) throw std::invalid_argument("offset dimension mismatch");
        if (v <= 0.0) throw std::invalid_argument("kernel weights must be strictly positive");
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("kernel weights must sum to 1 within 1e-12");
    symmetric_ = flip_symmetric(dim_, dw_);
    finalize();
}

void Kernel::finalize() {
    if (dw_.empty()) throw std::invalid_argument("kernel support is empty");
    for (const auto& [z, v] : dw_) max_weight_ = std::max(max_weight_, v);
    if (range_ == 0) range_ = linf_range(dw_);
}

const std::map<Site, Rational>& Kernel::exact_support() const {
    if (!exact_) throw std::logic_error("kernel has no exact weights");
    return rw_;
}

double Kernel::weight(const Site& z) const {
    auto it = dw_.find(z);
    return it == dw_.end() ? 0.0 : it->second;
}

Rational Kernel::weight_exact(const Site& z) const {
    const auto& w = exact_support();
    auto it = w.find(z);
    return it == w.end() ? Rational(0) : it->second;
}

Kernel make_nn_kernel(int d) {
    check_dim(d);
    std::map<Site, Rational> w;
    const Rational u(1, 2 * d);
    for (int i = 0; i < d; ++i) {
        Site z(d, 0);
        z[i] = 1;
        w[z] = u;
        z[i] = -1;
        w[z] = u;
    }
    return Kernel(d, std::move(w), KernelFamily::nearest_neighbor, 1);
}

Kernel make_box_kernel(int d, int L) {
    check_dim(d);
    if (L < 1) throw std::invalid_argument("box radius must be >= 1");
    std::map<Site, Rational> w;
    Rational u(1);
    for (int i = 0; i < d; ++i) u /= (2 * L + 1);
    std::vector<int> radius(d, L);
    for_each_point(radius, [&](const Site& z) { w[z] = u; });
    return Kernel(d, std::move(w), KernelFamily::box, L);
}

Kernel make_delta_kernel(int d) {
    check_dim(d);
    std::map<Site, Rational> w;
    w[Site(d, 0)] = 1;
    return Kernel(d, std::move(w), KernelFamily::general, 0);
}

Kernel make_profile_kernel(int d, int L,
                           const std::function<double(const std::vector<double>&)>& profile,
                           double support_radius) {
    check_dim(d);
    if (L < 1) throw std::invalid_argument("profile scale L must be >= 1");
    if (!(support_radius > 0)) throw std::invalid_argument("support radius must be positive");
    const int R = static_cast<int>(std::ceil(support_radius * L));
    std::map<Site, double> raw;
    double norm = 0.0;
    std::vector<int> radius(d, R);
    for_each_point(radius, [&](const Site& x) {
        std::vector<double> u(d);
        for (int i = 0; i < d; ++i) u[i] = static_cast<double>(x[i]) / L;
        const double v = profile(u);
        if (v < 0.0) throw std::invalid_argument("profile must be nonnegative");
        if (v > 0.0) {
            raw[x] = v;
            norm += v;
        }
    });
    if (raw.empty())
        throw std::invalid_argument("profile vanishes on every lattice point; increase L or the support radius");
    // The construction only sees lattice samples, so reflection invariance is checked there.
    for (int c = 0; c < d; ++c) {
        for (const auto& [x, v] : raw) {
            Site m = x;
            m[c] = -m[c];
            auto it = raw.find(m);
            const double mv = it == raw.end() ? 0.0 : it->second;
            if (std::abs(mv - v) > 1e-9 * std::max(v, 1.0))
                throw std::invalid_argument("profile is not reflection-invariant per coordinate");
        }
    }
    std::map<Site, double> w;
    for (auto& [x, v] : raw) w[x] = v / norm;
    return Kernel(d, std::move(w), KernelFamily::general, R);
}

Kernel convolve(const Kernel& a, const Kernel& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("convolve: dimension mismatch");
    if (a.exact() && b.exact()) {
        std::map<Site, Rational> w;
        for (const auto& [za, va] : a.exact_support())
            for (const auto& [zb, vb] : b.exact_support()) w[add(za, zb)] += va * vb;
        return Kernel(a.dim(), std::move(w), KernelFamily::general, 0);
    }
    std::map<Site, double> w;
    for (const auto& [za, va] : a.support())
        for (const auto& [zb, vb] : b.support()) w[add(za, zb)] += va * vb;
    return Kernel(a.dim(), std::move(w), KernelFamily::general, 0);
}

namespace {

constexpr std::size_t kConvSupportBudget = 4'000'000;

template <class K>
K conv_power(const K& base, unsigned m, const std::function<K(const K&, const K&)>& mul,
             const K& identity, const std::function<std::size_t(const K&)>& size) {
    K result = identity;
    K sq = base;
    unsigned e = m;
    for (;;) {
        if (e & 1u) result = mul(result, sq);
        e >>= 1u;
        if (e == 0) break;
        sq = mul(sq, sq);
        if (size(sq) > kConvSupportBudget || size(result) > kConvSupportBudget)
            throw regime_error("conv_power_at_zero: support budget exceeded");
    }
    return result;
}

}  // namespace

double conv_power_at_zero(const Kernel& k, unsigned m) {
    if (m == 0) return 1.0;
    Kernel g = conv_power<Kernel>(
        k, m, [](const Kernel& x, const Kernel& y) { return convolve(x, y); }, make_delta_kernel(k.dim()),
        [](const Kernel& x) { return x.support().size(); });
    return g.weight(Site(k.dim(), 0));
}

Rational conv_power_at_zero_exact(const Kernel& k, unsigned m) {
    if (!k.exact()) throw std::invalid_argument("exact convolution power needs an exact kernel");
    if (m == 0) return 1;
    Kernel g = conv_power<Kernel>(
        k, m, [](const Kernel& x, const Kernel& y) { return convolve(x, y); }, make_delta_kernel(k.dim()),
        [](const Kernel& x) { return x.support().size(); });
    return g.weight_exact(Site(k.dim(), 0));
}

namespace {

/// 1-d uniform step on {-L..L}: q^{*2j}(0) for j = 0..kmax, sliding-window convolution.
std::vector<double> box_1d_even_returns(int L, int kmax) {
    const int width = 2 * L + 1;
    const double inv = 1.0 / width;
    std::vector<double> r(kmax + 1);
    r[0] = 1.0;
    // dist over [-mL, mL], index i <-> site i - mL
    std::vector<double> dist{1.0};
    std::vector<double> prefix;
    for (int m = 1; m <= 2 * kmax; ++m) {
        const int old_half = (m - 1) * L;
        const int new_half = m * L;
        prefix.assign(dist.size() + 1, 0.0);
        for (std::size_t i = 0; i < dist.size(); ++i) prefix[i + 1] = prefix[i] + dist[i];
        std::vector<double> next(2 * new_half + 1, 0.0);
        for (int s = -new_half; s <= new_half; ++s) {
            // sum of dist over [s-L, s+L] in old coordinates
            int lo = std::max(s - L, -old_half);
            int hi = std::min(s + L, old_half);
            if (lo > hi) continue;
            next[s + new_half] = (prefix[hi + old_half + 1] - prefix[lo + old_half]) * inv;
        }
        dist = std::move(next);
        if (m % 2 == 0) r[m / 2] = dist[new_half];
    }
    return r;
}

/// Nearest-neighbor even return probabilities via allocation of steps across dimensions.
std::vector<double> nn_even_returns(int d, int kmax) {
    // u[j] = P(1-d +-1 walk back at 0 after 2j steps) = C(2j,j)/4^j
    std::vector<double> u(kmax + 1);
    u[0] = 1.0;
    for (int j = 1; j <= kmax; ++j) u[j] = u[j - 1] * (2.0 * j - 1.0) / (2.0 * j);
    if (d == 1) return u;

    std::vector<double> lfact(2 * kmax + 1);
    for (int n = 1; n <= 2 * kmax; ++n) lfact[n] = lfact[n - 1] + std::log(static_cast<double>(n));
    auto lchoose = [&](int n, int m) { return lfact[n] - lfact[m] - lfact[n - m]; };

    std::vector<double> prev = u;  // 1-dimensional
    for (int dd = 2; dd <= d; ++dd) {
        const double lq = std::log(1.0 / dd);
        const double lr = std::log((dd - 1.0) / dd);
        std::vector<double> cur(kmax + 1, 0.0);
        cur[0] = 1.0;
        for (int k = 1; k <= kmax; ++k) {
            double acc = 0.0;
            for (int j = 0; j <= k; ++j) {
                if (prev[k - j] == 0.0 || u[j] == 0.0) continue;
                const double lw = lchoose(2 * k, 2 * j) + 2.0 * j * lq + 2.0 * (k - j) * lr;
                acc += std::exp(lw) * u[j] * prev[k - j];
            }
            cur[k] = acc;
        }
        prev = std::move(cur);
    }
    return prev;
}

std::vector<double> general_even_returns(const Kernel& k, int kmax) {
    std::vector<double> r(kmax + 1);
    r[0] = 1.0;
    std::map<Site, double> g{{Site(k.dim(), 0), 1.0}};
    for (int m = 1; m <= 2 * kmax; ++m) {
        std::map<Site, double> next;
        for (const auto& [x, v] : g)
            for (const auto& [z, w] : k.support()) next[add(x, z)] += v * w;
        if (next.size() > kConvSupportBudget)
            throw regime_error("even_return_probabilities: direct convolution budget exceeded; "
                               "use a box or nearest-neighbor kernel for long horizons");
        g = std::move(next);
        if (m % 2 == 0) {
            auto it = g.find(Site(k.dim(), 0));
            r[m / 2] = it == g.end() ? 0.0 : it->second;
        }
    }
    return r;
}

}  // namespace

std::vector<double> even_return_probabilities(const Kernel& k, int kmax) {
    if (kmax < 0) throw std::invalid_argument("kmax must be >= 0");
    switch (k.family()) {
        case KernelFamily::nearest_neighbor:
            return nn_even_returns(k.dim(), kmax);
        case KernelFamily::box: {
            auto r1 = box_1d_even_returns(k.range(), kmax);
            std::vector<double> r(kmax + 1);
            for (int j = 0; j <= kmax; ++j) r[j] = std::pow(r1[j], k.dim());
            return r;
        }
        case KernelFamily::general:
            return general_even_returns(k, kmax);
    }
    throw std::logic_error("unreachable");
}

namespace {

/// sum_{j=K+1}^inf j^{-s}: exact terms for a stretch, then an integral bound.
double zeta_tail(double s, int K) {
    double acc = 0.0;
    const int M = K + 4000;
    for (int j = K + 1; j <= M; ++j) acc += std::pow(static_cast<double>(j), -s);
    acc += std::pow(static_cast<double>(M) + 0.5, 1.0 - s) / (s - 1.0);
    return acc;
}

struct TailFit {
    double c = 0.0;
    double tail = 0.0;
    double quality = 0.0;
};

TailFit fit_tail(const std::vector<double>& r, int K, int dim) {
    const double s = dim / 2.0;
    double acc = 0.0;
    int n = 0;
    for (int j = K - 4; j <= K; ++j) {
        if (j < 1 || r[j] <= 0.0) continue;
        acc += std::log(r[j]) + s * std::log(static_cast<double>(j));
        ++n;
    }
    TailFit fit;
    if (n == 0) return fit;
    fit.c = std::exp(acc / n);
    for (int j = K - 4; j <= K; ++j) {
        if (j < 1 || r[j] <= 0.0) continue;
        const double model = fit.c * std::pow(static_cast<double>(j), -s);
        fit.quality = std::max(fit.quality, std::abs(model - r[j]) / r[j]);
    }
    fit.tail = dim >= 3 ? fit.c * zeta_tail(s, K) : std::numeric_limits<double>::infinity();
    return fit;
}

}  // namespace

ReturnSum return_sum(const Kernel& k, double rel_tol, std::optional<int> cap) {
    if (!k.symmetric()) throw std::invalid_argument("return_sum requires a symmetric kernel");
    if (k.dim() <= 2 && !cap)
        throw regime_error("return_sum diverges for dim <= 2; supply a truncation cap");
    constexpr int kBudget = 16384;
    int K = 16;
    if (cap) K = std::min(K, *cap);
    double prev_corrected = -1.0;
    for (;;) {
        const auto r = even_return_probabilities(k, K);
        double partial = 0.0;
        for (int j = 2; j <= K; ++j) partial += r[j];
        const TailFit fit = fit_tail(r, K, k.dim());
        const bool at_cap = cap && K >= *cap;
        // Two admissible stops: the extrapolated tail is negligible against the
        // partial sum, or (slowly converging dimensions) the tail-corrected sum
        // has stabilized across a doubling of the truncation order.
        const double corrected = partial + fit.tail;
        const bool tail_small = k.dim() >= 3 && fit.tail <= rel_tol * partial;
        const bool stabilized = k.dim() >= 3 && prev_corrected >= 0.0 &&
                                std::abs(corrected - prev_corrected) <= rel_tol * corrected;
        if (at_cap || tail_small || stabilized) return ReturnSum{partial, K, fit.tail, fit.quality};
        if (K >= kBudget)
            throw regime_error("return_sum: rel_tol unreachable within truncation budget; supply a cap");
        prev_corrected = corrected;
        K = cap ? std::min(2 * K, *cap) : 2 * K;
    }
}

double p_max(const Kernel& k) { return 1.0 / k.max_weight(); }

nlohmann::ordered_json kernel_to_json(const Kernel& k) {
    nlohmann::ordered_json j;
    j["dim"] = k.dim();
    nlohmann::ordered_json entries = nlohmann::ordered_json::array();
    if (k.exact()) {
        for (const auto& [z, v] : k.exact_support()) {
            std::ostringstream os;
            os << v;
            entries.push_back({z, os.str()});
        }
    } else {
        for (const auto& [z, v] : k.support()) {
            std::ostringstream os;
            os.precision(17);
            os << v;
            entries.push_back({z, os.str()});
        }
    }
    j["entries"] = std::move(entries);
    j["symmetric"] = k.symmetric();
    return j;
}

Kernel kernel_from_json(const nlohmann::json& j) {
    const int dim = j.at("dim").get<int>();
    bool exact = true;
    for (const auto& e : j.at("entries"))
        if (e.at(1).get<std::string>().find_first_of(".eE") != std::string::npos) exact = false;
    if (exact) {
        std::map<Site, Rational> rw;
        for (const auto& e : j.at("entries")) rw[e.at(0).get<Site>()] = Rational(e.at(1).get<std::string>());
        return Kernel(dim, std::move(rw));
    }
    std::map<Site, double> dw;
    for (const auto& e : j.at("entries")) {
        const std::string s = e.at(1).get<std::string>();
        dw[e.at(0).get<Site>()] =
            s.find('/') != std::string::npos ? Rational(s).convert_to<double>() : std::stod(s);
    }
    return Kernel(dim, std::move(dw));
}

}  // namespace opath
