#pragma once

#include <array>
#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace specden {

using RealFn = std::function<double(double)>;
using ComplexFn = std::function<std::complex<double>(std::complex<double>)>;

/// A smoothing kernel K with its first two derivatives and the metadata the
/// estimator, the variance quadrature and the admissibility checker need.
/// Build through the factories below; they fill the moment fields.
struct KernelSpec {
    std::string id;
    RealFn value;
    RealFn deriv1;
    RealFn deriv2;
    /// Antiderivative with limit 0 at -inf; empty when unavailable.
    RealFn antiderivative;
    /// Complex extensions of K, K', K''; empty when the kernel has none.
    std::array<ComplexFn, 3> complex_derivs;

    /// Interval outside which K (and K') is zero or below 1e-16: compact
    /// support, or a truncation window for rapidly decaying kernels.
    double range_lo = -40.0;
    double range_hi = 40.0;
    /// Truncation radius around `center` used when summing K((x - l)/h).
    double cutoff = 38.0;
    double center = 0.0;
    /// True when K is known to be entire (analytic on all of C).
    bool entire = false;
    /// v0: half-width of the strip |Im u| <= v0 used in the strip checks.
    double analytic_strip_halfwidth = 1.0;

    double moment0 = 0.0;      ///< int K
    double moment1 = 0.0;      ///< int u K
    double moment2 = 0.0;      ///< int u^2 K
    double moment2_abs = 0.0;  ///< int u^2 |K|
    bool tail_decay_verified = false;

    double operator()(double u) const { return value(u); }
    bool has_antiderivative() const noexcept { return static_cast<bool>(antiderivative); }
    bool has_complex_extension() const noexcept { return static_cast<bool>(complex_derivs[0]); }
};

/// Standard normal density; entire, u_cut = 38.
KernelSpec gaussian_kernel();
/// 3/(4 sqrt 5) (1 - u^2/5) on |u| <= sqrt 5. Not analytic at the edges.
KernelSpec epanechnikov_kernel();
/// 15/16 (1 - u^2)^2 on |u| <= 1. Polynomial test kernel with K' continuous.
KernelSpec biweight_kernel();

/// lambda K(lambda u)
KernelSpec scaled_kernel(const KernelSpec& k, double lambda);
/// K(u - shift)
KernelSpec translated_kernel(const KernelSpec& k, double shift);
/// factor * K(u); breaks the unit mass when factor != 1.
KernelSpec mass_scaled_kernel(const KernelSpec& k, double factor);

/// Looks up a kernel by CLI name: gaussian, epanechnikov, biweight.
KernelSpec kernel_by_name(const std::string& name);

/// Recomputes the moment metadata of `k` by quadrature.
void compute_kernel_metadata(KernelSpec& k);

enum class CheckStatus { Pass, Fail, NotVerifiable, QuadratureFailure };

const char* to_string(CheckStatus s);

struct ConditionCheck {
    std::string name;
    CheckStatus status = CheckStatus::Fail;
    double value = 0.0;
    std::string detail;
};

struct AdmissibilityReport {
    std::string kernel_id;
    std::vector<ConditionCheck> checks;

    bool all_passed() const;
    /// Names of checks with status Fail or QuadratureFailure.
    std::vector<std::string> failed() const;
    const ConditionCheck& at(const std::string& name) const;
};

/// Evaluates the kernel regularity conditions one by one: unit mass, zero
/// first moment, finite absolute second moment, integrability of u K' and
/// K'', decay of u K and u K', strip integrability of K, K', K'' uniformly
/// for |Im u| <= v0, analyticity in the strip and on growing intervals.
/// Quadrature problems are reported per condition, never thrown.
AdmissibilityReport check_kernel(const KernelSpec& k, double quad_tol = 1e-10);

}  // namespace specden
