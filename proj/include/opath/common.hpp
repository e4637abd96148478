#pragma once

#include <cstdint>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace opath {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// A lattice site in Z^d.
using Site = std::vector<std::int32_t>;

/// Oriented edge [(n,x),(n+1,y)].
struct Edge {
    std::int64_t level = 0;
    Site from;
    Site to;
};

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Numerical / regime failures (divergent series, exceeded budgets, ...).
struct regime_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline Site add(const Site& a, const Site& b) {
    Site r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline Site sub(const Site& a, const Site& b) {
    Site r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline Site negate(const Site& a) {
    Site r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = -a[i];
    return r;
}

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double logaddexp(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    if (a < b) std::swap(a, b);
    return a + std::log1p(std::exp(b - a));
}

/// log of a nonnegative big integer, -inf for zero. Works beyond the range of double.
inline double log_bigint(const BigInt& z) {
    if (z == 0) return kNegInf;
    const unsigned bits = boost::multiprecision::msb(z);
    if (bits < 900) return std::log(z.convert_to<double>());
    const BigInt m = z >> (bits - 52);
    return std::log(m.convert_to<double>()) + static_cast<double>(bits - 52) * std::log(2.0);
}

}  // namespace opath
