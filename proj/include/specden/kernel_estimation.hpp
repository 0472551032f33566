#pragma once

#include <memory>
#include <span>
#include <vector>

#include "specden/ensembles.hpp"
#include "specden/kernel.hpp"
#include "specden/spectral_law.hpp"

namespace specden {

/// Default bandwidth exponent: h = n^{-0.37}, inside the window (1/3, 2/5)
/// where n h^{5/2} grows and n h^3 shrinks.
inline constexpr double kDefaultBandwidthExponent = 0.37;

double default_bandwidth(int n, double exponent = kDefaultBandwidthExponent);

struct EstimatorConfig {
    KernelSpec kernel;
    double bandwidth = 0.1;
    std::vector<double> eval_points;

    void validate() const;
    /// Also requires every evaluation point inside the open support of `law`.
    void validate_against(const LawSolution& law) const;
};

struct EstimatePoint {
    double x = 0.0;
    double value = 0.0;
};

/// f_n(x) = (1/(p h)) sum_i K((x - lambda_i)/h) over eigenvalues sorted
/// ascending; terms with |u - center| > cutoff are skipped.
double kernel_density_at(std::span<const double> eigenvalues, const KernelSpec& k, double h, double x);

/// F_n(x) = int_0^x f_n: closed form through the antiderivative, adaptive
/// quadrature of f_n when the kernel has none.
double kernel_cdf_at(std::span<const double> eigenvalues, const KernelSpec& k, double h, double x);

std::vector<EstimatePoint> estimate_density(const SpectrumSample& sample, const EstimatorConfig& config);
double estimate_cdf(const SpectrumSample& sample, const EstimatorConfig& config, double x);

/// Cubic B-spline through a LawSolution's density grid, zero outside the
/// support and clamped at zero.
class DensityInterpolant {
public:
    explicit DensityInterpolant(const LawSolution& law);
    ~DensityInterpolant();
    DensityInterpolant(DensityInterpolant&&) noexcept;
    DensityInterpolant& operator=(DensityInterpolant&&) noexcept;

    double operator()(double x) const;
    const LawSolution& law() const noexcept { return *law_; }

private:
    struct Impl;
    std::shared_ptr<const LawSolution> law_;
    std::unique_ptr<Impl> impl_;
};

/// (1/h) int_a^b K((x - y)/h) f_{c,H}(y) dy against the interpolated grid.
/// Throws GridTooCoarse when the grid spacing exceeds h/10.
double smoothed_target(const LawSolution& law, const KernelSpec& k, double h, double x);
double smoothed_target(const DensityInterpolant& f, const KernelSpec& k, double h, double x);

/// int_{-inf}^x smoothed_target(t) dt = int_a^b Kbar((x - y)/h) f(y) dy.
double smoothed_cdf_target(const LawSolution& law, const KernelSpec& k, double h, double x);
double smoothed_cdf_target(const DensityInterpolant& f, const KernelSpec& k, double h, double x);

/// F^{c,H}(x) from the density grid.
double limit_cdf(const DensityInterpolant& f, double x);

struct RegimeReport {
    int n = 0;
    double h = 0.0;
    double exponent = 0.0;          ///< -ln h / ln n
    double n_h52 = 0.0;             ///< n h^{5/2}, must grow for the density CLT
    double n_h3 = 0.0;              ///< n h^3, must vanish for f_{c,H} centring
    double n_h3_sqrt_log = 0.0;     ///< n h^3 sqrt(ln 1/h), must grow for the CDF CLT
    bool density_regime = false;    ///< n h^{5/2} > 1 and n h^3 < 1
    bool cdf_regime = false;        ///< n h^3 sqrt(ln 1/h) > 1
};

/// Thresholds: the asymptotic conditions are read at finite n as
/// "growing" = above 1 and "vanishing" = below 1.
RegimeReport bandwidth_regime(int n, double h);

}  // namespace specden
