#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "opath/environment.hpp"
#include "opath/kernel.hpp"

using namespace opath;

namespace {

Edge edge1d(std::int64_t n, std::int32_t x, std::int32_t y) { return Edge{n, Site{x}, Site{y}}; }

}  // namespace

TEST_CASE("seed hex round trip") {
    const EnvSeed e = env_seed_from_hex("0123456789abcdef0fedcba987654321", 7);
    CHECK(e.stream == 7);
    CHECK(e.seed_hex() == "0123456789abcdef0fedcba987654321");
    // Short seeds are zero-padded on the left.
    CHECK(env_seed_from_hex("123").seed_hex() == "00000000000000000000000000000123");
    CHECK_THROWS_AS(env_seed_from_hex("zz23456789abcdef0fedcba987654321"), config_error);
    CHECK_THROWS_AS(env_seed_from_hex(""), config_error);
}

TEST_CASE("uniform_at determinism and keying") {
    const EnvSeed env = env_seed_from_hex("00112233445566778899aabbccddeeff", 3);
    const Edge e = edge1d(5, -2, -1);
    const double u1 = uniform_at(env, e);
    const double u2 = uniform_at(env, e);
    CHECK(u1 == u2);
    CHECK(u1 >= 0.0);
    CHECK(u1 < 1.0);

    CHECK(uniform_at(env.with_stream(4), e) != u1);
    CHECK(uniform_at(env, edge1d(6, -2, -1)) != u1);
    CHECK(uniform_at(env, edge1d(5, -2, -3)) != u1);
}

TEST_CASE("uniform values over distinct edges are decorrelated") {
    const EnvSeed env = env_seed_from_hex("deadbeefdeadbeefdeadbeefdeadbeef");
    const std::size_t n = 1'000'000;
    double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto lvl = static_cast<std::int64_t>(i);
        const double x = uniform_at(env, edge1d(lvl, 0, 1));
        const double y = uniform_at(env, edge1d(lvl, 0, -1));
        sx += x;
        sy += y;
        sxy += x * y;
        sxx += x * x;
        syy += y * y;
    }
    const double mx = sx / n, my = sy / n;
    const double cov = sxy / n - mx * my;
    const double vx = sxx / n - mx * mx, vy = syy / n - my * my;
    const double corr = cov / std::sqrt(vx * vy);
    // Under independence corr is ~N(0, 1/n).
    CHECK(std::abs(corr) < 3.0 / std::sqrt(static_cast<double>(n)));
    // Uniform marginals: mean 1/2 within 3 sigma = 3/sqrt(12 n).
    CHECK(std::abs(mx - 0.5) < 3.0 / std::sqrt(12.0 * n));
    CHECK(std::abs(my - 0.5) < 3.0 / std::sqrt(12.0 * n));
}

TEST_CASE("is_open threshold semantics") {
    const Kernel k = make_nn_kernel(2);
    const EnvSeed env = env_seed_from_hex("0000000000000000000000000000002a");
    const Edge e{0, Site{0, 0}, Site{1, 0}};
    CHECK_FALSE(is_open(env, e, 0.0, k));
    CHECK(is_open(env, e, p_max(k), k));
    // Off-support offsets are never open.
    const Edge off{0, Site{0, 0}, Site{1, 1}};
    CHECK_FALSE(is_open(env, off, p_max(k), k));
    CHECK_THROWS_AS(is_open(env, e, -0.5, k), std::invalid_argument);
    CHECK_THROWS_AS(is_open(env, e, p_max(k) + 0.5, k), std::invalid_argument);
}

TEST_CASE("monotone coupling in p") {
    const Kernel k = make_nn_kernel(1);
    const EnvSeed env = env_seed_from_hex("0123456789abcdef0123456789abcdef");
    const double grid[] = {0.0, 0.3, 0.7, 1.0, 1.5, 2.0};
    for (std::int64_t n = 0; n < 500; ++n) {
        const Edge e = edge1d(n, static_cast<std::int32_t>(n % 17 - 8),
                              static_cast<std::int32_t>(n % 17 - 8 + (n % 2 ? 1 : -1)));
        bool prev = false;
        for (double p : grid) {
            const bool now = is_open(env, e, p, k);
            const bool closed_after_open = prev && !now;
            CHECK_FALSE(closed_after_open);
            prev = now;
        }
    }
}

TEST_CASE("empirical open fraction matches p f(z)") {
    const Kernel k = make_box_kernel(1, 1);
    const EnvSeed env = env_seed_from_hex("feedfacefeedfacefeedfacefeedface");
    const double p = 1.7;
    const std::size_t n = 100'000;
    for (std::int32_t dz : {-1, 0, 1}) {
        std::size_t open = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const Edge e = edge1d(static_cast<std::int64_t>(i), 0, dz);
            if (is_open(env, e, p, k)) ++open;
        }
        const double q = p * k.weight(Site{dz});
        const double sigma = std::sqrt(q * (1.0 - q) / n);
        CHECK(std::abs(static_cast<double>(open) / n - q) < 3.0 * sigma);
    }
}

TEST_CASE("uniform_counter streams are distinct from the edge field") {
    const EnvSeed env = env_seed_from_hex("00000000000000000000000000000001");
    const double a = uniform_counter(env, kTagSpine, 0);
    const double b = uniform_counter(env, kTagSpine, 1);
    CHECK(a != b);
    CHECK(uniform_counter(env, kTagSpine, 0) == a);
    CHECK(uniform_counter(env.with_stream(9), kTagSpine, 0) != a);
}

TEST_CASE("SeededEnv matches is_open") {
    const Kernel k = make_nn_kernel(2);
    const EnvSeed env = env_seed_from_hex("abcdefabcdefabcdefabcdefabcdefab", 11);
    const SeededEnv se{env};
    const double p = 2.5;
    for (std::int64_t n = 0; n < 200; ++n) {
        Edge e{n, Site{static_cast<std::int32_t>(n % 5), 0}, Site{static_cast<std::int32_t>(n % 5), 1}};
        const double pf = p * k.weight(sub(e.to, e.from));
        CHECK(se.open(e, pf) == is_open(env, e, p, k));
    }
}
