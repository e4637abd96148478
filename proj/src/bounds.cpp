#include "opath/bounds.hpp"

#include <cmath>
#include <map>

namespace opath {

namespace {

void check_d(int d) {
    if (d < 1) throw std::invalid_argument("d must be >= 1");
}

}  // namespace

BoundReport nn_pc2_lower(int d) {
    check_d(d);
    BoundReport r;
    r.name = "nn_pc2_lower";
    r.value = 1.0 + std::log(2.0) / (2.0 * d * d);
    r.ingredients = {{"d", d}, {"log2_over_2d2", std::log(2.0) / (2.0 * d * d)}};
    r.validity = d >= 5 ? "asymptotic in d; o(d^-2) remainder not included"
                        : "outside the large-d regime; formula value only";
    return r;
}

double nn_bridge_factor(int d) {
    check_d(d);
    const double q = 1.0 - 1.0 / (4.0 * d * d);
    return std::pow(q, 2.0 * d - 1.0) / (2.0 * d) + (d - 1.0) / d * q + 1.0 / (2.0 * d);
}

double nn_logZbar_lower(int d, int N) {
    check_d(d);
    if (N < 1) throw std::invalid_argument("N must be >= 1");
    return std::log(2.0) * (1.0 - std::pow(nn_bridge_factor(d), N - 1));
}

namespace {

BoundReport spreadout_report(const Kernel& k, double rel_tol, std::optional<int> cap,
                             double coefficient, const std::string& name) {
    const ReturnSum rs = return_sum(k, rel_tol, cap);
    BoundReport r;
    r.name = name;
    r.value = 1.0 + coefficient * rs.value;
    r.ingredients = {{"coefficient", coefficient},
                     {"return_sum", rs.value},
                     {"truncation_k", rs.truncation_k},
                     {"tail_estimate", rs.tail_estimate},
                     {"tail_fit_quality", rs.fit_quality},
                     {"value_with_tail", 1.0 + coefficient * (rs.value + rs.tail_estimate)}};
    return r;
}

}  // namespace

BoundReport spreadout_pc2_lower(const Kernel& k, double rel_tol, std::optional<int> cap) {
    if (k.dim() < 3 && !cap) throw regime_error("spreadout_pc2_lower needs dim >= 3 or a cap");
    BoundReport r = spreadout_report(k, rel_tol, cap, std::log(2.0), "spreadout_pc2_lower");
    r.validity = "lower bound up to O(L^{-3d/2}); large-L regime";
    return r;
}

BoundReport spreadout_pc_asymptotic(const Kernel& k, double rel_tol, std::optional<int> cap) {
    if (k.dim() < 3 && !cap) throw regime_error("spreadout_pc_asymptotic needs dim >= 3 or a cap");
    BoundReport r = spreadout_report(k, rel_tol, cap, 0.5, "spreadout_pc_asymptotic");
    r.validity = k.dim() > 4 ? "lace-expansion asymptotic, valid for d > 4 up to o(L^-d)"
                             : "d <= 4: expansion expected but not proven to hold in this regime";
    return r;
}

double second_moment(const Kernel& k, double p, int N, int range_cap) {
    if (!(p > 0.0) || p * k.max_weight() > 1.0 + 1e-12)
        throw std::invalid_argument("p must lie in (0, p_max]");
    if (N < 0) throw std::invalid_argument("N must be >= 0");
    if (range_cap < 1) throw std::invalid_argument("range_cap must be >= 1");

    // Cross-correlation of two independent steps: law of z1 - z2.
    std::map<Site, double> diff_step;
    for (const auto& [z1, w1] : k.support())
        for (const auto& [z2, w2] : k.support()) diff_step[sub(z1, z2)] += w1 * w2;
    double same_step = 0.0;  // sum f(z)^2, the coincident-step mass at the origin
    for (const auto& [z, w] : k.support()) same_step += w * w;

    // Dense DP over the l-infinity box of radius range_cap, flat row-major
    // indexing; sparse maps are too slow at the N ~ 40 horizons the invariant
    // checks need.
    const int d = k.dim();
    const int side = 2 * range_cap + 1;
    std::size_t cells = 1;
    for (int i = 0; i < d; ++i) {
        if (cells > 50'000'000 / static_cast<std::size_t>(side))
            throw regime_error("second_moment: state space too large; shrink range_cap");
        cells *= static_cast<std::size_t>(side);
    }
    std::vector<std::ptrdiff_t> stride(static_cast<std::size_t>(d));
    stride[static_cast<std::size_t>(d) - 1] = 1;
    for (int i = d - 2; i >= 0; --i)
        stride[static_cast<std::size_t>(i)] = stride[static_cast<std::size_t>(i) + 1] * side;

    struct Step {
        std::ptrdiff_t delta;
        double q;
        Site z;
    };
    std::vector<Step> steps;
    steps.reserve(diff_step.size());
    const Site origin(static_cast<std::size_t>(d), 0);
    double q_origin = 0.0;  // weight of the coincident-displacement move
    for (const auto& [w, q] : diff_step) {
        if (w == origin) {
            q_origin = q;
            continue;
        }
        std::ptrdiff_t delta = 0;
        for (int i = 0; i < d; ++i) delta += stride[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(i)];
        steps.push_back(Step{delta, q, w});
    }

    std::size_t center = 0;
    for (int i = 0; i < d; ++i) center += static_cast<std::size_t>(stride[static_cast<std::size_t>(i)]) * range_cap;
    std::vector<double> mu(cells, 0.0), next(cells, 0.0);
    mu[center] = 1.0;
    double escaped = 0.0;
    Site x(static_cast<std::size_t>(d), static_cast<std::int32_t>(-range_cap));
    for (int n = 0; n < N; ++n) {
        std::fill(next.begin(), next.end(), 0.0);
        for (int i = 0; i < d; ++i) x[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(-range_cap);
        for (std::size_t idx = 0; idx < cells; ++idx) {
            const double m = mu[idx];
            if (m != 0.0) {
                // At the origin, coincident steps are re-weighted by (f(z)p)^{-1}
                // each: their total mass is 1/p instead of sum f(z)^2.
                if (idx == center)
                    next[center] += m / p;
                else
                    next[idx] += m * q_origin;
                bool interior = true;
                for (int i = 0; i < d; ++i) {
                    if (std::abs(x[static_cast<std::size_t>(i)]) + 2 * k.range() > range_cap) {
                        interior = false;
                        break;
                    }
                }
                if (interior) {
                    for (const Step& s : steps)
                        next[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(idx) + s.delta)] += m * s.q;
                } else {
                    for (const Step& s : steps) {
                        bool inside = true;
                        for (int i = 0; i < d; ++i) {
                            const std::int32_t c =
                                x[static_cast<std::size_t>(i)] + s.z[static_cast<std::size_t>(i)];
                            if (c < -range_cap || c > range_cap) {
                                inside = false;
                                break;
                            }
                        }
                        if (inside)
                            next[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(idx) + s.delta)] += m * s.q;
                        else
                            escaped += m * s.q;
                    }
                }
            }
            for (int i = d - 1; i >= 0; --i) {
                if (x[static_cast<std::size_t>(i)] < range_cap) {
                    ++x[static_cast<std::size_t>(i)];
                    break;
                }
                x[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(-range_cap);
            }
        }
        std::swap(mu, next);
    }
    double totalmass = escaped;
    for (double m : mu) totalmass += m;
    if (escaped > 1e-9 * totalmass)
        throw regime_error("second_moment: mass escaped range_cap; enlarge the cap");
    return totalmass;
}

BoundReport pc3_upper(const Kernel& k, int horizon) {
    if (k.dim() <= 2) throw regime_error("pc3_upper: difference walk is recurrent for dim <= 2");
    if (!k.symmetric()) throw std::invalid_argument("pc3_upper requires a symmetric kernel");
    if (horizon < 8) throw std::invalid_argument("horizon too small");
    const int K = horizon / 2;
    const auto r = even_return_probabilities(k, K);
    double ret = 0.0;  // sum_{j>=1} f^{*2j}(0), truncated
    for (int j = 1; j <= K; ++j) ret += r[j];
    // Tail of the return series from the local-CLT power law on the last points.
    const double s = k.dim() / 2.0;
    double acc = 0.0;
    int n = 0;
    for (int j = K - 4; j <= K; ++j) {
        if (j >= 1 && r[j] > 0.0) {
            acc += std::log(r[j]) + s * std::log(static_cast<double>(j));
            ++n;
        }
    }
    double tail = 0.0;
    if (n > 0) {
        const double c = std::exp(acc / n);
        double zt = 0.0;
        for (int j = K + 1; j <= K + 4000; ++j) zt += std::pow(static_cast<double>(j), -s);
        zt += std::pow(static_cast<double>(K) + 4000.5, 1.0 - s) / (s - 1.0);
        tail = c * zt;
    }
    // The difference walk of two copies has step law f*f; by symmetry its
    // return mass from a first-step site x weights G(x)/G(0) into
    // pi = R/(1+R) - f^{*2}(0), with R the full return sum.
    auto pi_of = [&](double R) { return R / (1.0 + R) - r[1]; };
    const double pi_lo = pi_of(ret);
    const double pi_hi = pi_of(ret + tail);
    BoundReport b;
    b.name = "pc3_upper";
    b.value = 1.0 / (1.0 - pi_hi);
    b.ingredients = {{"horizon", horizon},
                     {"return_sum_from_1", ret},
                     {"tail_estimate", tail},
                     {"coincidence_mass", r[1]},
                     {"pi_bracket", {pi_lo, pi_hi}},
                     {"value_bracket", {1.0 / (1.0 - pi_lo), 1.0 / (1.0 - pi_hi)}}};
    b.validity = "second-moment bound; tail beyond the horizon extrapolated";
    return b;
}

BridgeMass dirlo2_expected_bridge_mass(const Kernel& k, int N, std::optional<int> cap) {
    if (!k.symmetric()) throw std::invalid_argument("bridge mass requires a symmetric kernel");
    if (k.dim() <= 2 && !cap) throw regime_error("bridge mass correction diverges for dim <= 2 without a cap");
    if (N < 2) throw std::invalid_argument("N must be >= 2");
    const auto r = even_return_probabilities(k, N);
    BridgeMass out;
    for (int j = 2; j <= N; ++j) out.main += (N - j) * r[j];
    const ReturnSum rs = return_sum(k, 1e-4, cap);
    const double full_from_1 = r[1] + rs.value + rs.tail_estimate;
    out.correction = static_cast<double>(N) * full_from_1 * full_from_1;
    return out;
}

double blease_pc_reference(int d) {
    check_d(d);
    return 1.0 + 1.0 / (4.0 * d * d);
}

nlohmann::ordered_json bound_report_to_json(const BoundReport& r) {
    return {{"name", r.name}, {"value", r.value}, {"ingredients", r.ingredients}, {"validity", r.validity}};
}

}  // namespace opath
