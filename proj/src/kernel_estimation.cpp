#include "specden/kernel_estimation.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include "specden/quadrature.hpp"

namespace specden {

double default_bandwidth(int n, double exponent) {
    if (n < 2) throw DomainError("kernel-estimation", "default_bandwidth", "n must be >= 2");
    return std::pow(static_cast<double>(n), -exponent);
}

void EstimatorConfig::validate() const {
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth))
        throw DomainError("kernel-estimation", "EstimatorConfig", "bandwidth must be positive");
    if (!std::is_sorted(eval_points.begin(), eval_points.end()))
        throw DomainError("kernel-estimation", "EstimatorConfig", "evaluation points must be sorted");
}

void EstimatorConfig::validate_against(const LawSolution& law) const {
    validate();
    for (double x : eval_points) {
        const bool interior = std::any_of(law.support.begin(), law.support.end(),
                                          [x](const Interval& i) { return x > i.lo && x < i.hi; });
        if (!interior)
            throw DomainError("kernel-estimation", "EstimatorConfig",
                              "evaluation point " + std::to_string(x) + " is not inside the limiting support");
    }
}

double kernel_density_at(std::span<const double> eig, const KernelSpec& k, double h, double x) {
    if (eig.empty()) return 0.0;
    // u = (x - l)/h in [center - cutoff, center + cutoff]
    const double lo = x - h * (k.center + k.cutoff);
    const double hi = x - h * (k.center - k.cutoff);
    const auto first = std::lower_bound(eig.begin(), eig.end(), lo);
    const auto last = std::upper_bound(first, eig.end(), hi);
    double sum = 0.0;
    for (auto it = first; it != last; ++it) sum += k.value((x - *it) / h);
    return sum / (static_cast<double>(eig.size()) * h);
}

double kernel_cdf_at(std::span<const double> eig, const KernelSpec& k, double h, double x) {
    if (eig.empty()) return 0.0;
    if (k.has_antiderivative()) {
        double sum = 0.0;
        for (double l : eig) sum += k.antiderivative((x - l) / h) - k.antiderivative(-l / h);
        return sum / static_cast<double>(eig.size());
    }
    const auto f = [&](double y) { return kernel_density_at(eig, k, h, y); };
    const double span = h * (std::abs(k.center) + k.cutoff);
    double lo = 0.0, hi = x, sign = 1.0;
    if (hi < lo) {
        std::swap(lo, hi);
        sign = -1.0;
    }
    // only the stretch near the eigenvalues carries mass
    const double from = std::max(lo, eig.front() - span);
    const double to = std::min(hi, eig.back() + span);
    if (from >= to) return 0.0;
    const auto est = quad::adaptive(f, from, to, 1e-12);
    return sign * est.value;
}

std::vector<EstimatePoint> estimate_density(const SpectrumSample& sample, const EstimatorConfig& config) {
    config.validate();
    std::vector<EstimatePoint> out;
    out.reserve(config.eval_points.size());
    for (double x : config.eval_points)
        out.push_back({x, kernel_density_at(sample.eigenvalues, config.kernel, config.bandwidth, x)});
    return out;
}

double estimate_cdf(const SpectrumSample& sample, const EstimatorConfig& config, double x) {
    config.validate();
    return kernel_cdf_at(sample.eigenvalues, config.kernel, config.bandwidth, x);
}

struct DensityInterpolant::Impl {
    boost::math::interpolators::cardinal_cubic_b_spline<double> spline;
};

DensityInterpolant::DensityInterpolant(const LawSolution& law) : law_(std::make_shared<LawSolution>(law)) {
    const auto& grid = law_->density_grid;
    if (grid.size() < 4)
        throw GridTooCoarse("kernel-estimation", "smoothed_target", "density grid needs at least 4 points");
    std::vector<double> y;
    y.reserve(grid.size());
    for (const auto& g : grid) y.push_back(g.f);
    impl_ = std::make_unique<Impl>(
        Impl{boost::math::interpolators::cardinal_cubic_b_spline<double>(y.begin(), y.end(), grid.front().x,
                                                                         law_->grid_spacing())});
}

DensityInterpolant::~DensityInterpolant() = default;
DensityInterpolant::DensityInterpolant(DensityInterpolant&&) noexcept = default;
DensityInterpolant& DensityInterpolant::operator=(DensityInterpolant&&) noexcept = default;

double DensityInterpolant::operator()(double x) const {
    if (!law_->in_support(x)) return 0.0;
    return std::max(0.0, impl_->spline(x));
}

namespace {

void require_resolution(const LawSolution& law, double h) {
    if (!(h > 0.0)) throw DomainError("kernel-estimation", "smoothed_target", "bandwidth must be > 0");
    // relative slack absorbs the rounding of a grid built at exactly h/10
    if (law.grid_spacing() > h / 10.0 * (1.0 + 1e-9))
        throw GridTooCoarse("kernel-estimation", "smoothed_target",
                            "density grid spacing " + std::to_string(law.grid_spacing()) + " exceeds h/10 = " +
                                std::to_string(h / 10.0));
}

// Integrates g(y) f(y) over the support, restricted to [from, to].
template <class G>
double against_density(const DensityInterpolant& f, G&& g, double from, double to) {
    double total = 0.0;
    for (const auto& iv : f.law().support) {
        const double lo = std::max(iv.lo, from);
        const double hi = std::min(iv.hi, to);
        if (lo >= hi) continue;
        total += quad::adaptive([&](double y) { return g(y) * f(y); }, lo, hi, 1e-12).value;
    }
    return total;
}

}  // namespace

double smoothed_target(const DensityInterpolant& f, const KernelSpec& k, double h, double x) {
    require_resolution(f.law(), h);
    // (x - y)/h in [center - cutoff, center + cutoff]
    const double from = x - h * (k.center + k.cutoff);
    const double to = x - h * (k.center - k.cutoff);
    return against_density(f, [&](double y) { return k.value((x - y) / h); }, from, to) / h;
}

double smoothed_target(const LawSolution& law, const KernelSpec& k, double h, double x) {
    require_resolution(law, h);
    return smoothed_target(DensityInterpolant(law), k, h, x);
}

double smoothed_cdf_target(const DensityInterpolant& f, const KernelSpec& k, double h, double x) {
    require_resolution(f.law(), h);
    const double a = f.law().lower();
    const double b = f.law().upper();
    if (k.has_antiderivative()) {
        // Kbar((x - y)/h) is the kernel mass for y far below x, 0 far above
        const double to = x - h * (k.center - k.cutoff);
        const double full_from = x - h * (k.center + k.cutoff);
        double total = against_density(f, [&](double y) { return k.antiderivative((x - y) / h); }, full_from, to);
        total += k.moment0 * against_density(f, [](double) { return 1.0; }, a, std::min(full_from, b));
        return total;
    }
    const double start = a - h * (k.cutoff + std::abs(k.center));
    if (x <= start) return 0.0;
    return quad::adaptive([&](double t) { return smoothed_target(f, k, h, t); }, start, x, 1e-10).value;
}

double smoothed_cdf_target(const LawSolution& law, const KernelSpec& k, double h, double x) {
    require_resolution(law, h);
    return smoothed_cdf_target(DensityInterpolant(law), k, h, x);
}

double limit_cdf(const DensityInterpolant& f, double x) {
    return against_density(f, [](double) { return 1.0; }, f.law().lower(), x);
}

RegimeReport bandwidth_regime(int n, double h) {
    if (n < 2) throw DomainError("kernel-estimation", "bandwidth_regime", "n must be >= 2");
    if (!(h > 0.0 && h < 1.0)) throw DomainError("kernel-estimation", "bandwidth_regime", "h must lie in (0, 1)");
    RegimeReport r;
    r.n = n;
    r.h = h;
    const double nd = static_cast<double>(n);
    r.exponent = -std::log(h) / std::log(nd);
    r.n_h52 = nd * std::pow(h, 2.5);
    r.n_h3 = nd * h * h * h;
    r.n_h3_sqrt_log = r.n_h3 * std::sqrt(std::log(1.0 / h));
    r.density_regime = r.n_h52 > 1.0 && r.n_h3 < 1.0;
    r.cdf_regime = r.n_h3_sqrt_log > 1.0;
    return r;
}

}  // namespace specden
