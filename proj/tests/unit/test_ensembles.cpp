#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "specden/ensembles.hpp"
#include "specden/errors.hpp"

using namespace specden;

namespace {

EnsembleConfig config(int n, int p, std::uint64_t seed, SpectralMeasure t = SpectralMeasure::identity()) {
    EnsembleConfig cfg;
    cfg.n = n;
    cfg.p = p;
    cfg.seed = seed;
    cfg.t_spectrum = std::move(t);
    return cfg;
}

}  // namespace

TEST_CASE("one by one case") {
    const Eigen::MatrixXd x = Eigen::MatrixXd::Ones(1, 4);
    const std::vector<double> t{1.0};
    const auto eig = covariance_spectrum(x, t);
    REQUIRE(eig.size() == 1);
    CHECK(eig[0] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("eigenvalues stay inside the slackened support bound") {
    const double bound = std::pow(1.0 + std::sqrt(0.5), 2) * 1.5;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto s = generate_sample(config(100, 50, seed));
        REQUIRE(s.size() == 50);
        CHECK(s.eigenvalues.front() >= -1e-12);
        CHECK(s.eigenvalues.back() <= bound);
    }
}

TEST_CASE("same seed gives bitwise identical spectra") {
    for (auto law : {EntryLaw::standard_normal(), EntryLaw::rademacher4()}) {
        auto cfg = config(120, 40, 99, SpectralMeasure({{1.0, 0.5}, {2.0, 0.5}}));
        cfg.entry = law;
        const auto a = generate_sample(cfg, 3);
        const auto b = generate_sample(cfg, 3);
        CHECK(a.eigenvalues == b.eigenvalues);
        CHECK(generate_sample(cfg, 4).eigenvalues != a.eigenvalues);
    }
}

TEST_CASE("replication streams differ") {
    std::set<std::uint64_t> seeds;
    for (std::uint64_t r = 0; r < 1000; ++r) seeds.insert(stream_seed(7, r));
    CHECK(seeds.size() == 1000);
}

TEST_CASE("empirical cdf counts") {
    SpectrumSample s;
    s.eigenvalues = {1.0, 2.0, 3.0};
    CHECK(empirical_cdf(s, 2.0) == doctest::Approx(2.0 / 3.0));
    CHECK(empirical_cdf(s, 0.5) == 0.0);
    CHECK(empirical_cdf(s, 3.0) == 1.0);
    CHECK(empirical_cdf(s, 10.0) == 1.0);
}

TEST_CASE("trace identity against the raw entries") {
    const SpectralMeasure t({{0.5, 0.3}, {1.0, 0.3}, {4.0, 0.4}});
    const auto cfg = config(300, 90, 11, t);
    const auto s = generate_sample(cfg, 2);
    Engine engine(stream_seed(cfg.seed, 2));
    const Eigen::MatrixXd x = draw_entries(cfg.entry, cfg.p, cfg.n, engine);
    const auto diag = t.population_diagonal(90);
    double trace = 0.0;
    for (int i = 0; i < cfg.p; ++i)
        for (int k = 0; k < cfg.n; ++k) trace += diag[i] * x(i, k) * x(i, k);
    trace /= cfg.n;
    const double sum = std::accumulate(s.eigenvalues.begin(), s.eigenvalues.end(), 0.0);
    CHECK(std::abs(sum - trace) / trace < 1e-10);
}

TEST_CASE("spectrum is sorted and positive semidefinite") {
    const auto s = generate_sample(config(60, 59, 5));
    CHECK(std::is_sorted(s.eigenvalues.begin(), s.eigenvalues.end()));
    CHECK(s.eigenvalues.front() >= -1e-10 * s.eigenvalues.back());
}

TEST_CASE("companion view appends n - p zeros") {
    const auto s = generate_sample(config(50, 20, 1));
    const auto b = s.companion_eigenvalues();
    REQUIRE(b.size() == 50);
    CHECK(std::count(b.begin(), b.end(), 0.0) >= 30);
}

TEST_CASE("fraction outside the limiting support shrinks with n") {
    const double c = 0.25;
    const double lo = std::pow(1 - std::sqrt(c), 2) - 0.1, hi = std::pow(1 + std::sqrt(c), 2) + 0.1;
    auto outside = [&](int n) {
        int count = 0, total = 0;
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto s = generate_sample(config(n, static_cast<int>(c * n), seed));
            for (double l : s.eigenvalues) count += (l < lo || l > hi);
            total += static_cast<int>(s.size());
        }
        return static_cast<double>(count) / total;
    };
    CHECK(outside(800) <= outside(200));
}

TEST_CASE("rademacher4 matches the gaussian moments") {
    const auto m = EntryLaw::rademacher4().moments();
    CHECK(m[0] == doctest::Approx(0.0));
    CHECK(m[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m[2] == doctest::Approx(0.0));
    CHECK(m[3] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(Rademacher4Atoms::inner() * Rademacher4Atoms::inner() == doctest::Approx(1.0 - 1.0 / std::sqrt(2.0)));
    CHECK(Rademacher4Atoms::outer() * Rademacher4Atoms::outer() == doctest::Approx(1.0 + 2.0 * std::sqrt(2.0)));

    // sample moments of the sampler itself
    Engine engine(123);
    const Eigen::MatrixXd x = draw_entries(EntryLaw::rademacher4(), 400, 500, engine);
    CHECK(x.array().square().mean() == doctest::Approx(1.0).epsilon(0.02));
    CHECK(x.array().pow(4).mean() == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("config validation") {
    auto bad = config(10, 20, 0);
    try {
        bad.validate();
        FAIL("expected a domain error");
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("p must be < n") != std::string::npos);
        CHECK(e.exit_code() == 1);
    }
    CHECK_THROWS_AS(config(10, 10, 0).validate(), DomainError);
    CHECK_THROWS_AS(config(10, 0, 0).validate(), DomainError);
    CHECK_THROWS_AS(EntryLaw::custom({-1.0, 1.0}, {0.7, 0.7}), DomainError);
    auto custom = config(10, 5, 0);
    custom.entry = EntryLaw::custom({-1.0, 1.0}, {0.5, 0.5});  // fourth moment 1, not 3
    CHECK_THROWS_AS(custom.validate(), DomainError);
}
