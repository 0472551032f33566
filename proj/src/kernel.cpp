#include "specden/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "specden/errors.hpp"
#include "specden/quadrature.hpp"

namespace specden {
namespace {

using cplx = std::complex<double>;

const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

// piecewise polynomial kernels: zero outside |Re u| <= edge
template <class Poly>
ComplexFn piecewise(double edge, Poly poly) {
    return [edge, poly](cplx z) { return std::abs(z.real()) <= edge ? poly(z) : cplx(0.0, 0.0); };
}

template <class Poly>
RealFn piecewise_real(double edge, Poly poly) {
    return [edge, poly](double u) { return std::abs(u) <= edge ? poly(u) : 0.0; };
}

quad::Estimate integrate_split(const std::function<double(double)>& g, double lo, double hi, double mid, double tol) {
    if (mid <= lo || mid >= hi) return quad::adaptive(g, lo, hi, tol);
    const auto left = quad::adaptive(g, lo, mid, tol);
    const auto right = quad::adaptive(g, mid, hi, tol);
    return {left.value + right.value, left.error + right.error};
}

}  // namespace

KernelSpec gaussian_kernel() {
    KernelSpec k;
    k.id = "gaussian";
    k.value = [](double u) { return kInvSqrt2Pi * std::exp(-0.5 * u * u); };
    k.deriv1 = [](double u) { return -u * kInvSqrt2Pi * std::exp(-0.5 * u * u); };
    k.deriv2 = [](double u) { return (u * u - 1.0) * kInvSqrt2Pi * std::exp(-0.5 * u * u); };
    k.antiderivative = [](double u) { return 0.5 * std::erfc(-u / std::numbers::sqrt2); };
    k.complex_derivs = {
        [](cplx z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); },
        [](cplx z) { return -z * kInvSqrt2Pi * std::exp(-0.5 * z * z); },
        [](cplx z) { return (z * z - 1.0) * kInvSqrt2Pi * std::exp(-0.5 * z * z); },
    };
    k.range_lo = -40.0;
    k.range_hi = 40.0;
    k.cutoff = 38.0;
    k.entire = true;
    k.analytic_strip_halfwidth = 1.0;
    compute_kernel_metadata(k);
    return k;
}

KernelSpec epanechnikov_kernel() {
    const double s = std::sqrt(5.0);
    const double a = 3.0 / (4.0 * s);
    KernelSpec k;
    k.id = "epanechnikov";
    k.value = piecewise_real(s, [a](double u) { return a * (1.0 - u * u / 5.0); });
    k.deriv1 = piecewise_real(s, [a](double u) { return -a * 2.0 * u / 5.0; });
    k.deriv2 = piecewise_real(s, [a](double) { return -a * 2.0 / 5.0; });
    k.antiderivative = [a, s](double u) {
        if (u <= -s) return 0.0;
        if (u >= s) return 1.0;
        return 0.5 + a * (u - u * u * u / 15.0);
    };
    k.complex_derivs = {
        piecewise(s, [a](cplx z) { return a * (1.0 - z * z / 5.0); }),
        piecewise(s, [a](cplx z) { return -a * 2.0 * z / 5.0; }),
        piecewise(s, [a](cplx) { return cplx(-a * 2.0 / 5.0, 0.0); }),
    };
    k.range_lo = -s;
    k.range_hi = s;
    k.cutoff = s;
    k.analytic_strip_halfwidth = 1.0;
    compute_kernel_metadata(k);
    return k;
}

KernelSpec biweight_kernel() {
    static constexpr double a = 15.0 / 16.0;
    KernelSpec k;
    k.id = "biweight";
    k.value = piecewise_real(1.0, [](double u) { return a * (1 - u * u) * (1 - u * u); });
    k.deriv1 = piecewise_real(1.0, [](double u) { return -4.0 * a * u * (1 - u * u); });
    k.deriv2 = piecewise_real(1.0, [](double u) { return -4.0 * a * (1 - 3 * u * u); });
    k.antiderivative = [](double u) {
        if (u <= -1.0) return 0.0;
        if (u >= 1.0) return 1.0;
        return 0.5 + a * (u - 2.0 * u * u * u / 3.0 + std::pow(u, 5) / 5.0);
    };
    k.complex_derivs = {
        piecewise(1.0, [](cplx z) { return a * (1.0 - z * z) * (1.0 - z * z); }),
        piecewise(1.0, [](cplx z) { return -4.0 * a * z * (1.0 - z * z); }),
        piecewise(1.0, [](cplx z) { return -4.0 * a * (1.0 - 3.0 * z * z); }),
    };
    k.range_lo = -1.0;
    k.range_hi = 1.0;
    k.cutoff = 1.0;
    k.analytic_strip_halfwidth = 1.0;
    compute_kernel_metadata(k);
    return k;
}

KernelSpec scaled_kernel(const KernelSpec& base, double lambda) {
    if (!(lambda > 0.0)) throw DomainError("kernel-estimation", "scaled_kernel", "scale must be > 0");
    KernelSpec k = base;
    k.id = base.id + "*scale(" + std::to_string(lambda) + ")";
    k.value = [f = base.value, lambda](double u) { return lambda * f(lambda * u); };
    k.deriv1 = [f = base.deriv1, lambda](double u) { return lambda * lambda * f(lambda * u); };
    k.deriv2 = [f = base.deriv2, lambda](double u) { return lambda * lambda * lambda * f(lambda * u); };
    if (base.antiderivative) k.antiderivative = [f = base.antiderivative, lambda](double u) { return f(lambda * u); };
    if (base.has_complex_extension()) {
        for (int j = 0; j < 3; ++j) {
            const double factor = std::pow(lambda, j + 1);
            k.complex_derivs[j] = [f = base.complex_derivs[j], lambda, factor](cplx z) { return factor * f(lambda * z); };
        }
    }
    k.range_lo = base.range_lo / lambda;
    k.range_hi = base.range_hi / lambda;
    k.cutoff = base.cutoff / lambda;
    k.center = base.center / lambda;
    k.analytic_strip_halfwidth = base.analytic_strip_halfwidth / lambda;
    compute_kernel_metadata(k);
    return k;
}

KernelSpec translated_kernel(const KernelSpec& base, double shift) {
    KernelSpec k = base;
    k.id = base.id + "*shift(" + std::to_string(shift) + ")";
    k.value = [f = base.value, shift](double u) { return f(u - shift); };
    k.deriv1 = [f = base.deriv1, shift](double u) { return f(u - shift); };
    k.deriv2 = [f = base.deriv2, shift](double u) { return f(u - shift); };
    if (base.antiderivative) k.antiderivative = [f = base.antiderivative, shift](double u) { return f(u - shift); };
    if (base.has_complex_extension()) {
        for (int j = 0; j < 3; ++j)
            k.complex_derivs[j] = [f = base.complex_derivs[j], shift](cplx z) { return f(z - shift); };
    }
    k.range_lo = base.range_lo + shift;
    k.range_hi = base.range_hi + shift;
    k.center = base.center + shift;
    compute_kernel_metadata(k);
    return k;
}

KernelSpec mass_scaled_kernel(const KernelSpec& base, double factor) {
    KernelSpec k = base;
    k.id = base.id + "*mass(" + std::to_string(factor) + ")";
    k.value = [f = base.value, factor](double u) { return factor * f(u); };
    k.deriv1 = [f = base.deriv1, factor](double u) { return factor * f(u); };
    k.deriv2 = [f = base.deriv2, factor](double u) { return factor * f(u); };
    if (base.antiderivative) k.antiderivative = [f = base.antiderivative, factor](double u) { return factor * f(u); };
    if (base.has_complex_extension()) {
        for (int j = 0; j < 3; ++j)
            k.complex_derivs[j] = [f = base.complex_derivs[j], factor](cplx z) { return factor * f(z); };
    }
    compute_kernel_metadata(k);
    return k;
}

KernelSpec kernel_by_name(const std::string& name) {
    if (name == "gaussian") return gaussian_kernel();
    if (name == "epanechnikov") return epanechnikov_kernel();
    if (name == "biweight") return biweight_kernel();
    throw DomainError("kernel-estimation", "kernel_by_name", "unknown kernel '" + name + "'");
}

void compute_kernel_metadata(KernelSpec& k) {
    constexpr double tol = 1e-13;
    const auto& K = k.value;
    k.moment0 = integrate_split(K, k.range_lo, k.range_hi, k.center, tol).value;
    k.moment1 = integrate_split([&](double u) { return u * K(u); }, k.range_lo, k.range_hi, k.center, tol).value;
    k.moment2 = integrate_split([&](double u) { return u * u * K(u); }, k.range_lo, k.range_hi, k.center, tol).value;
    k.moment2_abs =
        integrate_split([&](double u) { return u * u * std::abs(K(u)); }, k.range_lo, k.range_hi, k.center, tol).value;
    bool decays = true;
    for (double u : {k.center - 50.0, k.center + 50.0})
        decays = decays && std::abs(u * K(u)) < 1e-8 && std::abs(u * k.deriv1(u)) < 1e-8;
    k.tail_decay_verified = decays;
}

const char* to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::Pass: return "pass";
        case CheckStatus::Fail: return "fail";
        case CheckStatus::NotVerifiable: return "not-verifiable";
        case CheckStatus::QuadratureFailure: return "quadrature-failure";
    }
    return "unknown";
}

bool AdmissibilityReport::all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const ConditionCheck& c) { return c.status == CheckStatus::Pass; });
}

std::vector<std::string> AdmissibilityReport::failed() const {
    std::vector<std::string> out;
    for (const auto& c : checks)
        if (c.status == CheckStatus::Fail || c.status == CheckStatus::QuadratureFailure) out.push_back(c.name);
    return out;
}

const ConditionCheck& AdmissibilityReport::at(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return c;
    throw DomainError("kernel-estimation", "check_kernel", "no condition named " + name);
}

namespace {

// Integral of g over the kernel window and over the doubled window. The
// integral counts as finite when both agree.
ConditionCheck finiteness_check(const std::string& name, const KernelSpec& k, const std::function<double(double)>& g,
                                double tol) {
    const double lo = k.range_lo, hi = k.range_hi, mid = k.center;
    const auto inner = integrate_split(g, lo, hi, mid, tol);
    const auto outer = integrate_split(g, mid - 2.0 * (mid - lo), mid + 2.0 * (hi - mid), mid, tol);
    ConditionCheck c{name, CheckStatus::Pass, outer.value, ""};
    if (!inner.ok() || !outer.ok() || outer.error > 1e-6 * (1.0 + std::abs(outer.value))) {
        c.status = CheckStatus::QuadratureFailure;
        c.detail = "quadrature error estimate " + std::to_string(outer.error);
    } else if (std::abs(outer.value - inner.value) > 1e-6 * (1.0 + std::abs(inner.value))) {
        c.status = CheckStatus::Fail;
        c.detail = "integral grows with the window";
    }
    return c;
}

ConditionCheck value_check(const std::string& name, const KernelSpec& k, const std::function<double(double)>& g,
                           double target, double tol, double quad_tol) {
    const auto est = integrate_split(g, k.range_lo, k.range_hi, k.center, quad_tol);
    ConditionCheck c{name, CheckStatus::Pass, est.value, ""};
    if (!est.ok() || est.error > tol) {
        c.status = CheckStatus::QuadratureFailure;
        c.detail = "quadrature error estimate " + std::to_string(est.error);
    } else if (std::abs(est.value - target) > tol) {
        c.status = CheckStatus::Fail;
        c.detail = "expected " + std::to_string(target);
    }
    return c;
}

}  // namespace

AdmissibilityReport check_kernel(const KernelSpec& k, double quad_tol) {
    AdmissibilityReport report;
    report.kernel_id = k.id;
    auto& out = report.checks;
    constexpr double kMomentTol = 1e-10;

    out.push_back(value_check("integral_equals_one", k, k.value, 1.0, kMomentTol, quad_tol));
    out.push_back(value_check("first_moment_zero", k, [&](double u) { return u * k.value(u); }, 0.0, kMomentTol,
                              quad_tol));
    out.push_back(finiteness_check("second_abs_moment_finite", k,
                                   [&](double u) { return u * u * std::abs(k.value(u)); }, quad_tol));
    out.push_back(finiteness_check("u_deriv1_integrable", k, [&](double u) { return std::abs(u * k.deriv1(u)); },
                                   quad_tol));
    out.push_back(finiteness_check("deriv2_integrable", k, [&](double u) { return std::abs(k.deriv2(u)); }, quad_tol));

    {
        double worst = 0.0;
        for (double u : {k.center - 50.0, k.center + 50.0})
            worst = std::max({worst, std::abs(u * k.value(u)), std::abs(u * k.deriv1(u))});
        out.push_back({"tail_decay", worst < 1e-8 ? CheckStatus::Pass : CheckStatus::Fail, worst,
                       "max of |u K(u)|, |u K'(u)| at |u - center| = 50"});
    }

    const double v0 = k.analytic_strip_halfwidth;
    for (int j = 0; j < 3; ++j) {
        const std::string name = "strip_integrable_" + std::to_string(j);
        if (!k.has_complex_extension()) {
            out.push_back({name, CheckStatus::NotVerifiable, 0.0, "kernel has no complex extension"});
            continue;
        }
        ConditionCheck worst{name, CheckStatus::Pass, 0.0, "sup over |v| <= v0 of int |K^(j)(u + iv)| du"};
        for (int s = 0; s <= 8; ++s) {
            const double v = -v0 + 2.0 * v0 * s / 8.0;
            const auto& f = k.complex_derivs[j];
            auto c = finiteness_check(name, k, [&](double u) { return std::abs(f(cplx(u, v))); }, quad_tol);
            if (c.status != CheckStatus::Pass) {
                c.detail += " at v = " + std::to_string(v);
                worst = c;
                break;
            }
            worst.value = std::max(worst.value, c.value);
        }
        out.push_back(worst);
    }

    // Mean-value test: an analytic K equals its average over any circle
    // inside the strip. Kinks or jumps near a centre point break it.
    if (!k.has_complex_extension()) {
        out.push_back({"strip_analytic", CheckStatus::NotVerifiable, 0.0, "kernel has no complex extension"});
    } else {
        const double r = 0.5 * v0;
        const auto& K = k.complex_derivs[0];
        const double lo = std::max(k.range_lo - 1.0, k.center - 12.0);
        const double hi = std::min(k.range_hi + 1.0, k.center + 12.0);
        constexpr int kNodes = 128;
        double scale = 0.0, worst = 0.0, where = 0.0;
        for (int i = 0; i <= 480; ++i) {
            const double u = lo + (hi - lo) * i / 480.0;
            for (double v : {-r, 0.0, r}) {
                const cplx z0(u, v);
                cplx mean{};
                for (int q = 0; q < kNodes; ++q) {
                    const double th = 2.0 * std::numbers::pi * q / kNodes;
                    mean += K(z0 + r * cplx(std::cos(th), std::sin(th)));
                }
                mean /= static_cast<double>(kNodes);
                const cplx direct = K(z0);
                scale = std::max(scale, std::abs(direct));
                if (std::abs(mean - direct) > worst) {
                    worst = std::abs(mean - direct);
                    where = u;
                }
            }
        }
        const bool ok = worst <= 1e-8 * std::max(scale, 1e-300);
        out.push_back({"strip_analytic", ok ? CheckStatus::Pass : CheckStatus::Fail, worst,
                       ok ? "mean-value property holds on the strip"
                          : "mean-value property broken near u = " + std::to_string(where)});
    }

    out.push_back({"analytic_on_growing_interval", k.entire ? CheckStatus::Pass : CheckStatus::NotVerifiable, 0.0,
                   k.entire ? "kernel is entire"
                            : "analyticity on intervals growing like 1/h is not verifiable numerically"});
    return report;
}

}  // namespace specden
