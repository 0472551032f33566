#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "specden/kernel.hpp"
#include "specden/spectral_law.hpp"

namespace specden {

/// Frozen variance constant of the Gaussian kernel, produced by sigma2()
/// with both quadrature schemes agreeing to 1e-10 relative. Integrating
/// by parts twice gives the same number in closed form, 1/(2 pi^2).
inline constexpr double kGaussianSigma2 = 0.050660591821168885;

struct VarianceResult {
    double sigma2 = 0.0;
    double quad_error_estimate = 0.0;
    std::string kernel_id;
    double reduced_scheme = 0.0;  ///< 1-D autocorrelation route
    double tensor_scheme = 0.0;   ///< 2-D route with an analytic diagonal strip
};

struct Sigma2Options {
    double tol = 1e-8;
    /// half-width of the diagonal strip |u1 - u2| < delta treated analytically
    double strip_halfwidth = 1e-4;
};

/// sigma^2 = -(1/(2 pi^2)) int int K'(u1) K'(u2) ln (u1 - u2)^2 du1 du2,
/// computed twice: by reduction to the autocorrelation of K' in s = u1 - u2,
/// and by a tensor-product rule with the logarithmic diagonal handled in
/// closed form. Throws SchemeDisagreement when they differ by more than
/// 10 tol relative.
VarianceResult sigma2(const KernelSpec& k, const Sigma2Options& options = {});

/// Reduced route only: -(1/pi^2) int_0^inf g(s) ln s^2 ds with
/// g(s) = int K'(u) K'(u - s) du.
double sigma2_reduced(const KernelSpec& k, double tol, double* error = nullptr);
/// Tensor-product route only.
double sigma2_tensor(const KernelSpec& k, double tol, double strip_halfwidth, double* error = nullptr);

/// Variance of the integrated-estimator limit: 1/(2 pi^2), any kernel.
double cdf_variance() noexcept;

struct BiasTermResult {
    cplx z;
    cplx m_under;
    cplx numerator;    ///< c m^3 int t^2 dH / (1 + t m)^3
    cplx denominator;  ///< 1 - c m^2 int t^2 dH / (1 + t m)^2
    cplx value;        ///< numerator / denominator^2 (bandwidth-free)
};

/// Mean integrand at z with m_under = m_under^0(z). Throws
/// DegenerateDenominator when |denominator| < 1e-10.
BiasTermResult bias_term(double c, const SpectralMeasure& h, cplx z);
BiasTermResult bias_term(double c, const SpectralMeasure& h, cplx z, cplx m_under);

/// Rectangle with horizontal sides at +-height spanning [a_l, a_r] and
/// vertical sides at a_l, a_r.
struct RectangularContour {
    double a_l = 0.0;
    double a_r = 0.0;
    double height = 0.0;
};

/// a_l = 0.5 * left end, a_r = 1.5 * right end of the support bracket,
/// height = v0 * h.
RectangularContour default_contour(double c, const SpectralMeasure& h_meas, double bandwidth, double v0 = 1.0);

/// h/(4 pi i) times the counter-clockwise contour integral of
/// K((x - z)/h) * bias_term(z). Needs the kernel's complex extension.
double mean_diagnostic(double c, const SpectralMeasure& h_meas, const KernelSpec& k, double bandwidth, double x,
                       std::optional<RectangularContour> contour = std::nullopt, int nodes_per_side = 400);

struct MisePoint {
    double h = 0.0;
    double loss = 0.0;
};

struct OptimalBandwidth {
    double h_star = 0.0;
    double c1 = 0.0;          ///< 0.5 f''(x0) int u^2 K
    double curvature = 0.0;   ///< f''(x0)
    double x0 = 0.0;
    double sigma2 = 0.0;
    double support_width = 0.0;  ///< b - a
    int n = 0;
    double numeric_argmin = 0.0;
    std::vector<MisePoint> mise_curve;
};

/// L(h) = (c1 h^2)^2 + sigma2 (b - a) / (n^2 h^2)
double leading_order_mise(double h, double c1, double sigma2, double width, int n);

/// h* = (sigma2 (b - a) / (2 n^2 c1^2))^{1/6}
double optimal_bandwidth_formula(double c1, double sigma2, double width, int n);

/// Second derivative of the limiting density by 5-point differences on the
/// law's grid spacing. Throws CurvatureUnavailable near the edges or on
/// grids with fewer than 50 points.
double density_curvature(const LawSolution& law, double x0);

struct MiseOptions {
    std::optional<double> x0;      ///< default: support midpoint
    std::optional<double> sigma2;  ///< default: computed from the kernel
    int curve_points = 401;
};

OptimalBandwidth mise_and_optimal_bandwidth(const KernelSpec& k, const LawSolution& law, int n,
                                            const MiseOptions& options = {});

}  // namespace specden
