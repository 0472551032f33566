#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "specden/ensembles.hpp"
#include "specden/errors.hpp"
#include "specden/kernel_estimation.hpp"

using namespace specden;

namespace {

double normal_pdf(double u) { return std::exp(-0.5 * u * u) / std::sqrt(2 * std::numbers::pi); }
double normal_cdf(double u) { return 0.5 * std::erfc(-u / std::sqrt(2.0)); }

SpectrumSample sample_of(std::vector<double> eig) {
    SpectrumSample s;
    s.eigenvalues = std::move(eig);
    return s;
}

double integrate(const std::function<double(double)>& f, double a, double b) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-13);
}

}  // namespace

TEST_CASE("single and two atom estimates") {
    const auto g = gaussian_kernel();
    CHECK(kernel_density_at(std::vector<double>{0.0}, g, 1.0, 0.0) == doctest::Approx(0.398942).epsilon(1e-6));
    const double two = kernel_density_at(std::vector<double>{1.0, 2.0}, g, 0.5, 1.5);
    CHECK(two == doctest::Approx((normal_pdf(1.0) + normal_pdf(-1.0)) / (2 * 0.5)));
    CHECK(two == doctest::Approx(0.483941).epsilon(1e-6));
}

TEST_CASE("estimated density integrates to one and matches its cdf") {
    EnsembleConfig cfg;
    cfg.n = 200;
    cfg.p = 60;
    cfg.seed = 4;
    const auto s = generate_sample(cfg);
    const auto g = gaussian_kernel();
    const double h = 0.1;
    const auto f = [&](double x) { return kernel_density_at(s.eigenvalues, g, h, x); };
    const double lo = s.eigenvalues.front() - 40 * h, hi = s.eigenvalues.back() + 40 * h;
    double total = 0.0;
    for (double a = lo; a < hi; a += 0.25) total += integrate(f, a, std::min(a + 0.25, hi));
    CHECK(std::abs(total - 1.0) < 1e-8);

    double previous = -1.0;
    for (double x = 0.0; x < 3.5; x += 0.37) {
        const double F = kernel_cdf_at(s.eigenvalues, g, h, x);
        CHECK(F >= previous);
        previous = F;
        double direct = 0.0;
        for (double a = 0.0; a < x; a += 0.25) direct += integrate(f, a, std::min(a + 0.25, x));
        CHECK(std::abs(F - direct) < 1e-8);
    }
}

TEST_CASE("cdf estimate edge cases") {
    const auto g = gaussian_kernel();
    const std::vector<double> eig{1.0, 1.5, 2.0};
    CHECK(std::abs(kernel_cdf_at(eig, g, 0.05, 1e6) - 1.0) < 1e-10);
    CHECK(kernel_cdf_at(eig, g, 0.05, 0.0) < 1e-10);
    const double one = kernel_cdf_at(std::vector<double>{1.0}, g, 0.5, 1.0);
    CHECK(one == doctest::Approx(normal_cdf(0.0) - normal_cdf(-2.0)));
    CHECK(one == doctest::Approx(0.47725).epsilon(1e-5));
}

TEST_CASE("cdf without an antiderivative falls back to quadrature") {
    auto g = gaussian_kernel();
    const auto with = kernel_cdf_at(std::vector<double>{0.4, 0.9, 1.3}, g, 0.2, 1.0);
    g.antiderivative = nullptr;
    const auto without = kernel_cdf_at(std::vector<double>{0.4, 0.9, 1.3}, g, 0.2, 1.0);
    CHECK(std::abs(with - without) < 1e-9);
}

TEST_CASE("estimator wrappers") {
    EstimatorConfig cfg;
    cfg.kernel = gaussian_kernel();
    cfg.bandwidth = 0.5;
    cfg.eval_points = {1.0, 1.5};
    const auto s = sample_of({1.0, 2.0});
    const auto est = estimate_density(s, cfg);
    REQUIRE(est.size() == 2);
    CHECK(est[1].value == doctest::Approx(0.483941).epsilon(1e-6));
    // mass below 0 is excluded by construction
    CHECK(estimate_cdf(s, cfg, 100.0) == doctest::Approx(1.0 - 0.5 * (normal_cdf(-2.0) + normal_cdf(-4.0))));
    cfg.bandwidth = -1.0;
    CHECK_THROWS_AS(estimate_density(s, cfg), DomainError);
    cfg.bandwidth = 0.1;
    cfg.eval_points = {2.0, 1.0};
    CHECK_THROWS_AS(cfg.validate(), DomainError);
}

TEST_CASE("smoothed target approaches the density") {
    const auto law = solve_law(0.25, SpectralMeasure::identity(), 1e-3);
    const auto g = gaussian_kernel();
    const double f = density(0.25, SpectralMeasure::identity(), 1.0, law.epsilon, law.support);
    CHECK(std::abs(smoothed_target(law, g, 0.01, 1.0) - f) < 0.01);
    CHECK_THROWS_AS(smoothed_target(law, g, 0.005, 1.0), GridTooCoarse);

    EstimatorConfig cfg;
    cfg.kernel = g;
    cfg.eval_points = {0.1};
    CHECK_THROWS_AS(cfg.validate_against(law), DomainError);
    cfg.eval_points = {1.0, 2.0};
    CHECK_NOTHROW(cfg.validate_against(law));
}

TEST_CASE("smoothing a constant density returns the constant") {
    LawSolution law;
    law.c = 0.5;
    law.support = {{-20.0, 20.0}};
    for (int i = 0; i <= 4000; ++i) law.density_grid.push_back({-20.0 + 0.01 * i, 0.025});
    CHECK(smoothed_target(law, gaussian_kernel(), 0.2, 0.0) == doctest::Approx(0.025).epsilon(1e-6 / 0.025));
}

TEST_CASE("bias shrinks quadratically in h") {
    const double c = 0.25;
    const auto law = solve_law(c, SpectralMeasure::identity(), 5e-4);
    const DensityInterpolant f(law);
    const auto g = gaussian_kernel();
    for (double x : {0.8, 1.0, 1.4}) {
        const double fx = density(c, law.h, x, law.epsilon, law.support);
        const double ratio = (smoothed_target(f, g, 0.04, x) - fx) / (smoothed_target(f, g, 0.02, x) - fx);
        CHECK(ratio == doctest::Approx(4.0).epsilon(0.15));
    }
}

TEST_CASE("smoothed cdf target is the integral of the smoothed density") {
    const auto law = solve_law(0.25, SpectralMeasure::identity(), 2e-3);
    const DensityInterpolant f(law);
    const auto g = gaussian_kernel();
    const double h = 0.1;
    // composite Simpson on a fine grid of the smoothed density
    const auto simpson = [&](double a, double b) {
        const int m = 2 * static_cast<int>(std::ceil((b - a) / 0.01));
        const double d = (b - a) / m;
        double acc = smoothed_target(f, g, h, a) + smoothed_target(f, g, h, b);
        for (int i = 1; i < m; ++i) acc += (i % 2 ? 4.0 : 2.0) * smoothed_target(f, g, h, a + i * d);
        return acc * d / 3.0;
    };
    for (double x : {0.6, 1.4}) CHECK(std::abs(smoothed_cdf_target(f, g, h, x) - simpson(law.lower() - 1.0, x)) < 1e-7);
    CHECK(limit_cdf(f, law.upper()) == doctest::Approx(1.0).epsilon(2e-3));
    CHECK(smoothed_cdf_target(f, g, h, 10.0) == doctest::Approx(limit_cdf(f, law.upper())).epsilon(1e-9));
}

TEST_CASE("bandwidth regimes") {
    const int n = 800;
    auto r = bandwidth_regime(n, std::pow(n, -0.37));
    CHECK(r.n_h52 == doctest::Approx(1.66).epsilon(0.01));
    CHECK(r.n_h3 == doctest::Approx(0.48).epsilon(0.01));
    CHECK(r.exponent == doctest::Approx(0.37));
    CHECK(r.density_regime);
    r = bandwidth_regime(n, std::pow(n, -0.5));
    CHECK(r.n_h52 == doctest::Approx(std::pow(n, -0.25)));
    CHECK_FALSE(r.density_regime);
    r = bandwidth_regime(n, std::pow(n, -0.3));
    CHECK(r.n_h3 == doctest::Approx(std::pow(n, 0.1)));
    CHECK(r.cdf_regime);
    CHECK_FALSE(r.density_regime);
    CHECK(default_bandwidth(n) == doctest::Approx(std::pow(n, -0.37)));
    CHECK_THROWS_AS(bandwidth_regime(1, 0.1), DomainError);
    CHECK_THROWS_AS(bandwidth_regime(100, 1.5), DomainError);
}

TEST_CASE("estimator is consistent as n grows") {
    const double c = 0.2;
    const auto law = solve_law(c, SpectralMeasure::identity(), 1e-3);
    const DensityInterpolant f(law);
    const auto g = gaussian_kernel();
    const double a = law.lower(), b = law.upper();
    auto sup_error = [&](int n, std::uint64_t seed) {
        EnsembleConfig cfg;
        cfg.n = n;
        cfg.p = static_cast<int>(c * n);
        cfg.seed = seed;
        const auto s = generate_sample(cfg);
        const double h = default_bandwidth(n);
        double worst = 0.0;
        for (double x = a + 0.1 * (b - a); x <= b - 0.1 * (b - a); x += 0.01)
            worst = std::max(worst, std::abs(kernel_density_at(s.eigenvalues, g, h, x) - f(x)));
        return worst;
    };
    int improved = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) improved += sup_error(2000, seed) < sup_error(500, seed);
    CHECK(improved >= 18);
}
