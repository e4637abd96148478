#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "opath/common.hpp"

namespace opath {

enum class KernelFamily { nearest_neighbor, box, general };

/// Finitely-supported step distribution f on Z^d. Weights are kept as exact
/// rationals when the construction allows it, with a double view alongside.
class Kernel {
  public:
    Kernel(int dim, std::map<Site, Rational> weights, KernelFamily family = KernelFamily::general,
           int range = 0);
    Kernel(int dim, std::map<Site, double> weights, KernelFamily family = KernelFamily::general,
           int range = 0);

    int dim() const { return dim_; }
    bool exact() const { return exact_; }
    bool symmetric() const { return symmetric_; }
    KernelFamily family() const { return family_; }
    /// Box radius L for the box family, 1 for nearest-neighbor, max |z|_inf otherwise.
    int range() const { return range_; }
    double max_weight() const { return max_weight_; }

    const std::map<Site, double>& support() const { return dw_; }
    const std::map<Site, Rational>& exact_support() const;

    /// f(z); zero off the support.
    double weight(const Site& z) const;
    Rational weight_exact(const Site& z) const;

  private:
    void finalize();

    int dim_;
    bool exact_;
    bool symmetric_ = false;
    KernelFamily family_;
    int range_;
    double max_weight_ = 0.0;
    std::map<Site, Rational> rw_;
    std::map<Site, double> dw_;
};

/// Uniform weight 1/(2d) on the 2d unit vectors.
Kernel make_nn_kernel(int d);

/// Uniform weight (2L+1)^-d on the l-infinity ball of radius L.
Kernel make_box_kernel(int d, int L);

/// Point mass at the origin (convolution identity).
Kernel make_delta_kernel(int d);

/// f(x) = F(x/L) / sum_y F(y/L) over lattice points. The profile must be
/// reflection-invariant per coordinate and is scanned over |x_i| <= ceil(support_radius * L).
Kernel make_profile_kernel(int d, int L,
                           const std::function<double(const std::vector<double>&)>& profile,
                           double support_radius);

Kernel convolve(const Kernel& a, const Kernel& b);

/// f^{*m}(0) by iterated convolution (exact when the kernel is exact).
double conv_power_at_zero(const Kernel& k, unsigned m);
Rational conv_power_at_zero_exact(const Kernel& k, unsigned m);

/// r[j] = f^{*2j}(0) for j = 0..kmax. Box kernels use per-coordinate 1-d
/// convolutions, nearest-neighbor kernels a step-allocation recursion over
/// dimensions; other kernels fall back to direct convolution under a budget.
std::vector<double> even_return_probabilities(const Kernel& k, int kmax);

struct ReturnSum {
    double value = 0.0;        ///< partial sum over j in [2, truncation_k]
    int truncation_k = 0;
    double tail_estimate = 0.0;
    double fit_quality = 0.0;  ///< max relative residual of the power-law fit
};

/// Partial sum of f^{*2j}(0) for j >= 2 with a fitted c*j^{-d/2} tail.
/// Requires a symmetric kernel, and dim >= 3 unless a truncation cap is given.
ReturnSum return_sum(const Kernel& k, double rel_tol, std::optional<int> cap = std::nullopt);

/// 1 / max_z f(z).
double p_max(const Kernel& k);

nlohmann::ordered_json kernel_to_json(const Kernel& k);
Kernel kernel_from_json(const nlohmann::json& j);

}  // namespace opath
