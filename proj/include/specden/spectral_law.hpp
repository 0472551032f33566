#pragma once

#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "specden/errors.hpp"
#include "specden/spectral_measure.hpp"

namespace specden {

using cplx = std::complex<double>;

/// Companion Stieltjes transform m_under(z) of the limiting law of B_n,
/// together with m(z) of the limiting law F^{c,H} of A_n.
struct StieltjesValue {
    cplx z;
    cplx m_under;
    cplx m;
    /// |m_under + (z - c int t dH / (1 + t m_under))^{-1}|
    double residual = 0.0;
    int iterations = 0;
};

struct SolverOptions {
    double tol = 1e-12;
    int max_iter = 100000;
    /// alpha in m <- (1 - alpha) m + alpha G(m)
    double damping = 0.5;
    /// residual below which Newton steps are attempted
    double newton_switch = 1e-3;
    std::optional<cplx> warm_start;
};

/// Raised when the iteration budget runs out; carries the best iterate.
class MaxIterExceeded : public NumericalError {
public:
    MaxIterExceeded(const StieltjesValue& best, const std::string& message)
        : NumericalError("spectral-law", "solve_stieltjes", message), best_(best) {}
    const StieltjesValue& best() const noexcept { return best_; }

private:
    StieltjesValue best_;
};

/// Upper half-plane fixed point of m <- -(z - c int t dH(t) / (1 + t m))^{-1}
/// by damped iteration with Newton polishing. Always iterates, even for a
/// point mass H. Requires Im z > 0 and 0 <= c < 1.
StieltjesValue solve_stieltjes(double c, const SpectralMeasure& h, cplx z, const SolverOptions& options = {});

/// m_under(z) for any z off the real axis: closed form when H is a point
/// mass, conjugate symmetry below the axis, solve_stieltjes otherwise.
StieltjesValue companion_transform(double c, const SpectralMeasure& h, cplx z, const SolverOptions& options = {});

/// m(z) = (m_under(z) + (1 - c) / z) / c for c > 0, int dH / (t - z) at c = 0.
cplx law_transform(double c, const SpectralMeasure& h, cplx z, cplx m_under);

/// z = -1/m_under + c int t / (1 + t m_under) dH(t).
cplx inverse_map(double c, const SpectralMeasure& h, cplx m_under);

/// d z / d m_under along the real axis: 1/m^2 - c int t^2 / (1 + t m)^2 dH.
double inverse_map_derivative(double c, const SpectralMeasure& h, double m_under);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double width() const noexcept { return hi - lo; }
    bool contains(double x) const noexcept { return x >= lo && x <= hi; }
};

/// [lambda_min(T)(1 - sqrt c)^2, lambda_max(T)(1 + sqrt c)^2]
Interval support_bracket(double c, const SpectralMeasure& h);

struct SupportScanOptions {
    int points_per_gap = 10000;
    double refine_tol = 1e-10;
};

/// Support of F^{c,H} as sorted disjoint intervals, from the sign changes of
/// z'(m) for real m in (-inf, 0) minus the poles -1/t.
std::vector<Interval> find_support(double c, const SpectralMeasure& h, const SupportScanOptions& options = {});

/// max(1e-6, 1e-3 * (support hull width))
double default_epsilon(std::span<const Interval> support);

/// f_{c,H}(x) from (1/pi) Im m(x + i eps), Richardson-extrapolated from eps
/// and eps/2, clamped to 0 outside the support and below zero.
double density(double c, const SpectralMeasure& h, double x, double eps);
double density(double c, const SpectralMeasure& h, double x, double eps, std::span<const Interval> support);

struct ClosedFormValue {
    cplx m_under;
    cplx m;
};

/// Identity population: m_under = (-(z + 1 - c) + sqrt((z - 1 - c)^2 - 4c)) / (2z)
/// with the branch giving Im m_under >= 0. Real z selects the branch that
/// is the limit from the upper half-plane.
ClosedFormValue identity_T_closed_form(double c, cplx z);

struct DensityPoint {
    double x = 0.0;
    double f = 0.0;
};

/// Limiting law: support and density on a uniform grid spanning the
/// support hull [a, b] (zero inside gaps).
struct LawSolution {
    double c = 0.0;
    SpectralMeasure h;
    std::vector<Interval> support;
    std::vector<DensityPoint> density_grid;
    double epsilon = 0.0;

    double lower() const noexcept { return support.front().lo; }
    double upper() const noexcept { return support.back().hi; }
    double grid_spacing() const noexcept;
    bool in_support(double x) const noexcept;
};

/// Builds a LawSolution whose grid spacing is at most `spacing`; eps
/// defaults to default_epsilon(support). Grid points are solved with
/// warm starts from their left neighbour.
LawSolution solve_law(double c, const SpectralMeasure& h, double spacing, std::optional<double> eps = std::nullopt);

}  // namespace specden
