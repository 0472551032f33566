#include "specden/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/minima.hpp>

#include "specden/kernel_estimation.hpp"
#include "specden/quadrature.hpp"

namespace specden {
namespace {

constexpr double kPi = std::numbers::pi;

// g(s) = int K'(u) K'(u - s) du for s >= 0
double deriv_autocorrelation(const KernelSpec& k, double s, double tol, double* err) {
    const double lo = k.range_lo + s;
    const double hi = k.range_hi;
    if (lo >= hi) return 0.0;
    const auto f = [&](double u) { return k.deriv1(u) * k.deriv1(u - s); };
    const double mid = std::clamp(k.center + 0.5 * s, lo, hi);
    quad::Estimate left{}, right{};
    if (mid > lo) left = quad::adaptive(f, lo, mid, tol);
    if (hi > mid) right = quad::adaptive(f, mid, hi, tol);
    if (err) *err += left.error + right.error;
    return left.value + right.value;
}

// int_{delta}^{reach} K'(u1 + dir * s) ln s^2 ds with s = delta e^tau
double log_tail(const KernelSpec& k, double u1, double dir, double delta, double reach, double tol, double* err) {
    if (reach <= delta) return 0.0;
    const double log_delta = std::log(delta);
    const auto f = [&](double tau) {
        const double s = delta * std::exp(tau);
        return k.deriv1(u1 + dir * s) * 2.0 * (log_delta + tau) * s;
    };
    const auto est = quad::adaptive(f, 0.0, std::log(reach / delta), tol);
    if (err) *err += est.error;
    return est.value;
}

}  // namespace

double sigma2_reduced(const KernelSpec& k, double tol, double* error) {
    const double width = k.range_hi - k.range_lo;
    const double inner_tol = std::min(1e-13, tol * 1e-3);
    double err = 0.0;
    const auto integrand = [&](double s) {
        if (s <= 0.0) return 0.0;
        return deriv_autocorrelation(k, s, inner_tol, &err) * 2.0 * std::log(s);
    };
    // log singularity at s = 0 goes to tanh-sinh; the smooth remainder to Gauss-Kronrod
    const double split = 0.05 * width;
    const auto head = quad::endpoint_singular(integrand, 0.0, split, std::min(1e-12, tol * 1e-3));
    const auto mid = quad::adaptive(integrand, split, 4.0 * split, inner_tol);
    const auto tail = quad::adaptive(integrand, 4.0 * split, width, inner_tol);
    const double integral = 2.0 * (head.value + mid.value + tail.value);  // g is even
    if (error) *error = (head.error + mid.error + tail.error + err) / (2.0 * kPi * kPi) * 2.0;
    return -integral / (2.0 * kPi * kPi);
}

double sigma2_tensor(const KernelSpec& k, double tol, double strip_halfwidth, double* error) {
    const double delta = strip_halfwidth;
    if (!(delta > 0.0)) throw DomainError("asymptotics", "sigma2", "strip half-width must be > 0");
    const double inner_tol = std::min(1e-13, tol * 1e-3);
    // int_{-delta}^{delta} ln s^2 ds
    const double strip_weight = 4.0 * (delta * std::log(delta) - delta);
    double err = 0.0;
    const auto inner = [&](double u1) {
        // local linear model of K' across the strip: the odd part integrates to 0
        double j = k.deriv1(u1) * strip_weight;
        j += log_tail(k, u1, +1.0, delta, k.range_hi - u1, inner_tol, &err);
        j += log_tail(k, u1, -1.0, delta, u1 - k.range_lo, inner_tol, &err);
        return k.deriv1(u1) * j;
    };
    quad::Estimate left{}, right{};
    const double mid = std::clamp(k.center, k.range_lo, k.range_hi);
    if (mid > k.range_lo) left = quad::adaptive(inner, k.range_lo, mid, std::min(1e-12, tol * 1e-3));
    if (k.range_hi > mid) right = quad::adaptive(inner, mid, k.range_hi, std::min(1e-12, tol * 1e-3));
    if (error) *error = (left.error + right.error + err) / (2.0 * kPi * kPi);
    return -(left.value + right.value) / (2.0 * kPi * kPi);
}

VarianceResult sigma2(const KernelSpec& k, const Sigma2Options& options) {
    if (!(options.tol > 0.0)) throw DomainError("asymptotics", "sigma2", "tol must be > 0");
    if (!k.deriv1) throw DomainError("asymptotics", "sigma2", "kernel derivative unavailable");
    VarianceResult r;
    r.kernel_id = k.id;
    double err_a = 0.0, err_b = 0.0;
    r.reduced_scheme = sigma2_reduced(k, options.tol, &err_a);
    r.tensor_scheme = sigma2_tensor(k, options.tol, options.strip_halfwidth, &err_b);
    const double scale = std::max(std::abs(r.reduced_scheme), std::abs(r.tensor_scheme));
    const double gap = std::abs(r.reduced_scheme - r.tensor_scheme);
    if (!std::isfinite(gap) || gap > 10.0 * options.tol * scale)
        throw SchemeDisagreement("asymptotics", "sigma2",
                                 "quadrature schemes disagree: " + std::to_string(r.reduced_scheme) + " vs " +
                                     std::to_string(r.tensor_scheme));
    r.sigma2 = 0.5 * (r.reduced_scheme + r.tensor_scheme);
    r.quad_error_estimate = std::max(err_a, err_b);
    return r;
}

double cdf_variance() noexcept { return 1.0 / (2.0 * kPi * kPi); }

BiasTermResult bias_term(double c, const SpectralMeasure& h, cplx z, cplx m) {
    BiasTermResult r;
    r.z = z;
    r.m_under = m;
    cplx s2{}, s3{};
    for (const auto& a : h.atoms()) {
        const cplx q = 1.0 / (1.0 + a.t * m);
        s2 += a.w * a.t * a.t * q * q;
        s3 += a.w * a.t * a.t * q * q * q;
    }
    r.numerator = c * m * m * m * s3;
    r.denominator = 1.0 - c * m * m * s2;
    if (std::abs(r.denominator) < 1e-10)
        throw DegenerateDenominator("asymptotics", "bias_term",
                                    "|1 - c m^2 int t^2 dH/(1+tm)^2| < 1e-10 at z = (" + std::to_string(z.real()) +
                                        ", " + std::to_string(z.imag()) + ")");
    r.value = r.numerator / (r.denominator * r.denominator);
    return r;
}

BiasTermResult bias_term(double c, const SpectralMeasure& h, cplx z) {
    if (z.imag() == 0.0) throw DomainError("asymptotics", "bias_term", "requires Im z != 0");
    return bias_term(c, h, z, companion_transform(c, h, z).m_under);
}

RectangularContour default_contour(double c, const SpectralMeasure& h_meas, double bandwidth, double v0) {
    const auto bracket = support_bracket(c, h_meas);
    return {0.5 * bracket.lo, 1.5 * bracket.hi, v0 * bandwidth};
}

double mean_diagnostic(double c, const SpectralMeasure& h_meas, const KernelSpec& k, double bandwidth, double x,
                       std::optional<RectangularContour> contour, int nodes_per_side) {
    if (!k.has_complex_extension())
        throw DomainError("asymptotics", "mean_diagnostic", "kernel has no complex extension");
    if (!(bandwidth > 0.0)) throw DomainError("asymptotics", "mean_diagnostic", "bandwidth must be > 0");
    const auto box = contour.value_or(default_contour(c, h_meas, bandwidth));
    const auto& K = k.complex_derivs[0];

    using rule = boost::math::quadrature::gauss<double, 10>;
    const auto& x_pos = rule::abscissa();
    const auto& w_pos = rule::weights();
    // composite 10-point Gauss-Legendre along z(t) = start + t * dir, t in [0, 1]
    const auto segment = [&](cplx start, cplx end, int panels) {
        cplx total{};
        const cplx dir = end - start;
        for (int p = 0; p < panels; ++p) {
            const double t0 = static_cast<double>(p) / panels;
            const double half = 0.5 / panels;
            for (std::size_t i = 0; i < x_pos.size(); ++i) {
                for (double sgn : {-1.0, 1.0}) {
                    if (x_pos[i] == 0.0 && sgn > 0.0) continue;
                    const double t = t0 + half * (1.0 + sgn * x_pos[i]);
                    const cplx z = start + t * dir;
                    const cplx weight = w_pos[i] * half * dir;
                    total += weight * K((x - z) / bandwidth) * bias_term(c, h_meas, z).value;
                }
            }
        }
        return total;
    };
    const int panels = std::max(2, nodes_per_side / 10);
    const cplx bl(box.a_l, -box.height), br(box.a_r, -box.height);
    const cplx tr(box.a_r, box.height), tl(box.a_l, box.height);
    const cplx ml(box.a_l, 0.0), mr(box.a_r, 0.0);
    cplx integral = segment(bl, br, panels);
    integral += segment(br, mr, panels / 2) + segment(mr, tr, panels / 2);
    integral += segment(tr, tl, panels);
    integral += segment(tl, ml, panels / 2) + segment(ml, bl, panels / 2);
    const cplx value = bandwidth * integral / (4.0 * kPi * cplx(0.0, 1.0));
    return value.real();
}

double leading_order_mise(double h, double c1, double sigma2, double width, int n) {
    const double nd = static_cast<double>(n);
    const double bias = c1 * h * h;
    return bias * bias + sigma2 * width / (nd * nd * h * h);
}

double optimal_bandwidth_formula(double c1, double sigma2, double width, int n) {
    if (c1 == 0.0) throw CurvatureUnavailable("asymptotics", "mise_and_optimal_bandwidth", "c1 = 0: h* unbounded");
    const double nd = static_cast<double>(n);
    return std::pow(sigma2 * width / (2.0 * nd * nd * c1 * c1), 1.0 / 6.0);
}

double density_curvature(const LawSolution& law, double x0) {
    if (law.density_grid.size() < 50)
        throw CurvatureUnavailable("asymptotics", "mise_and_optimal_bandwidth", "density grid has fewer than 50 points");
    const double d = law.grid_spacing();
    const auto iv = std::find_if(law.support.begin(), law.support.end(),
                                 [&](const Interval& i) { return x0 - 2 * d > i.lo && x0 + 2 * d < i.hi; });
    if (iv == law.support.end())
        throw CurvatureUnavailable("asymptotics", "mise_and_optimal_bandwidth",
                                   "x0 must lie two grid steps inside a support interval");
    const DensityInterpolant f(law);
    const double value =
        (-f(x0 - 2 * d) + 16 * f(x0 - d) - 30 * f(x0) + 16 * f(x0 + d) - f(x0 + 2 * d)) / (12 * d * d);
    if (!std::isfinite(value)) throw CurvatureUnavailable("asymptotics", "mise_and_optimal_bandwidth", "f'' not finite");
    return value;
}

OptimalBandwidth mise_and_optimal_bandwidth(const KernelSpec& k, const LawSolution& law, int n,
                                            const MiseOptions& options) {
    if (n < 2) throw DomainError("asymptotics", "mise_and_optimal_bandwidth", "n must be >= 2");
    OptimalBandwidth out;
    out.n = n;
    out.x0 = options.x0.value_or(0.5 * (law.lower() + law.upper()));
    out.support_width = law.upper() - law.lower();
    out.sigma2 = options.sigma2 ? *options.sigma2 : sigma2(k).sigma2;
    out.curvature = density_curvature(law, out.x0);
    out.c1 = 0.5 * out.curvature * k.moment2;
    out.h_star = optimal_bandwidth_formula(out.c1, out.sigma2, out.support_width, n);

    const auto loss = [&](double h) { return leading_order_mise(h, out.c1, out.sigma2, out.support_width, n); };
    const int m = std::max(3, options.curve_points);
    const double lo = std::log(out.h_star / 10.0), hi = std::log(out.h_star * 10.0);
    std::size_t best = 0;
    for (int i = 0; i < m; ++i) {
        const double h = std::exp(lo + (hi - lo) * i / (m - 1));
        out.mise_curve.push_back({h, loss(h)});
        if (out.mise_curve.back().loss < out.mise_curve[best].loss) best = out.mise_curve.size() - 1;
    }
    const std::size_t left = best == 0 ? 0 : best - 1;
    const std::size_t right = std::min(out.mise_curve.size() - 1, best + 1);
    const auto res = boost::math::tools::brent_find_minima([&](double lh) { return loss(std::exp(lh)); },
                                                           std::log(out.mise_curve[left].h),
                                                           std::log(out.mise_curve[right].h), 40);
    out.numeric_argmin = std::exp(res.first);
    return out;
}

}  // namespace specden
