// Acceptance suite. Prints one PASS/FAIL line per criterion.
//   specden_acceptance            run all criteria
//   specden_acceptance 5          run criterion 5 only (exit 1 on failure)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <string>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "specden/asymptotics.hpp"
#include "specden/clt_harness.hpp"
#include "specden/kernel.hpp"
#include "specden/kernel_estimation.hpp"
#include "specden/spectral_law.hpp"

using namespace specden;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Outcome closed_form_oracle() {
    const double c = 0.25;
    const auto h = SpectralMeasure::identity();
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const cplx z(0.3 + 1.9 * i / 99.0, 0.01);
        const auto it = solve_stieltjes(c, h, z);
        const auto cf = identity_T_closed_form(c, z);
        worst = std::max(worst, std::abs(it.m_under - cf.m_under));
    }
    return {worst < 1e-8, fmt("max |m_iter - m_closed| = %.3e (< 1e-8)", worst)};
}

Outcome support_recovery() {
    const auto s = find_support(0.25, SpectralMeasure::identity());
    const bool ok = s.size() == 1 && std::abs(s[0].lo - 0.25) < 1e-6 && std::abs(s[0].hi - 2.25) < 1e-6;
    return {ok, s.empty() ? "no support found"
                          : fmt("%zu interval(s), [%.10f, %.10f]", s.size(), s.front().lo, s.back().hi)};
}

Outcome density_normalization() {
    struct Case {
        double c;
        SpectralMeasure h;
    };
    const Case cases[] = {{0.25, SpectralMeasure::identity()},
                          {0.5, SpectralMeasure({{1.0, 0.5}, {3.0, 0.5}})}};
    boost::math::quadrature::tanh_sinh<double> ts;
    bool ok = true;
    std::string detail;
    for (const auto& cs : cases) {
        const auto support = find_support(cs.c, cs.h);
        const double eps = default_epsilon(support);
        double total = 0.0;
        for (const auto& iv : support)
            total += ts.integrate([&](double x) { return density(cs.c, cs.h, x, eps, support); }, iv.lo, iv.hi, 1e-9);
        ok = ok && std::abs(total - 1.0) < 1e-3;
        detail += fmt("c=%.2f: %.6f (%zu interval(s))  ", cs.c, total, support.size());
    }
    return {ok, detail};
}

Outcome sigma2_agreement() {
    const auto g = gaussian_kernel();
    const auto base = sigma2(g);
    const double rel = std::abs(base.reduced_scheme - base.tensor_scheme) / std::abs(base.reduced_scheme);
    const double shift_gap = std::abs(sigma2(translated_kernel(g, 0.7)).sigma2 - base.sigma2);
    double scale_gap = 0.0;
    std::string info;
    for (double lambda : {0.5, 2.0}) {
        const double s = sigma2(scaled_kernel(g, lambda)).sigma2;
        scale_gap = std::max(scale_gap, std::abs(s - base.sigma2));
        info += fmt(" lambda=%.1f: sigma2/sigma2_K=%.9f (lambda^2=%.2f)", lambda, s / base.sigma2, lambda * lambda);
    }
    return {rel < 1e-8 && shift_gap < 1e-6 && scale_gap < 1e-6,
            fmt("sigma2=%.15f reduced/tensor rel gap %.2e (< 1e-8); translation gap %.2e, scale gap %.2e (< 1e-6)"
                "\n      [info]%s",
                base.sigma2, rel, shift_gap, scale_gap, info.c_str())};
}

CltExperimentConfig clt_base() {
    CltExperimentConfig cfg;
    cfg.ensemble.n = 800;
    cfg.ensemble.p = 160;
    cfg.ensemble.seed = 20240601;
    cfg.reps = 500;
    cfg.estimator.kernel = gaussian_kernel();
    return cfg;
}

Outcome clt_density() {
    auto cfg = clt_base();
    cfg.estimator.bandwidth = std::pow(800.0, -0.37);
    cfg.estimator.eval_points = {0.7, 1.3};
    cfg.target = CenteringTarget::SmoothedTarget;
    cfg.reference_variance = kGaussianSigma2;
    const auto res = run_clt_density(cfg);
    std::string detail;
    for (const auto& v : res.verdicts)
        detail += fmt("\n      %-26s %s  stat=% .4f  bound=%.4f", v.name.c_str(), v.passed ? "ok  " : "FAIL",
                      v.statistic, v.threshold);
    // same draws, dimension normalisation: informational only
    auto alt = cfg;
    alt.normalization = Normalization::Dimension;
    const auto res_p = run_clt_density(alt);
    detail += "\n      [info] variance ratio with p h scaling:";
    for (const auto& s : res_p.summary) detail += fmt(" %.3f", s.variance / kGaussianSigma2);
    return {res.passed() && res.verdicts.size() == 9, detail};
}

Outcome clt_cdf() {
    auto cfg = clt_base();
    cfg.estimator.bandwidth = std::pow(800.0, -0.3);
    cfg.estimator.eval_points = {1.0};
    cfg.target = CenteringTarget::SmoothedCdf;
    const auto res = run_clt_cdf(cfg);
    const double ratio = res.summary.at(0).variance / cdf_variance();
    auto alt = cfg;
    alt.normalization = Normalization::Dimension;
    const double ratio_p = run_clt_cdf(alt).summary.at(0).variance / cdf_variance();
    return {ratio >= 0.5 && ratio <= 2.0,
            fmt("variance ratio to 1/(2 pi^2) = %.3f (in [0.5, 2.0]); mean = %.3f\n      [info] with p scaling: %.3f",
                ratio, res.summary.at(0).mean, ratio_p)};
}

Outcome bias_scaling() {
    const double c = 0.25;
    const auto h = SpectralMeasure::identity();
    const auto law = solve_law(c, h, 0.02 / 40.0);
    const auto g = gaussian_kernel();
    const double f1 = density(c, h, 1.0, law.epsilon, law.support);
    const double b1 = std::abs(smoothed_target(law, g, 0.04, 1.0) - f1);
    const double b2 = std::abs(smoothed_target(law, g, 0.02, 1.0) - f1);
    const double ratio = b1 / b2;
    return {std::abs(ratio - 4.0) <= 0.6, fmt("bias(0.04)=%.4e bias(0.02)=%.4e ratio=%.4f (4 +- 15%%)", b1, b2, ratio)};
}

Outcome optimal_bandwidth() {
    const auto law = solve_law(0.25, SpectralMeasure::identity(), 1e-3);
    const auto g = gaussian_kernel();
    const auto opt = mise_and_optimal_bandwidth(g, law, 800);
    const double rel = std::abs(opt.numeric_argmin - opt.h_star) / opt.h_star;
    const double r = optimal_bandwidth_formula(opt.c1, opt.sigma2, opt.support_width, 1600) /
                     optimal_bandwidth_formula(opt.c1, opt.sigma2, opt.support_width, 800);
    const double dev = std::abs(r - std::pow(2.0, -1.0 / 3.0));
    return {rel < 0.02 && dev < 1e-12,
            fmt("h*=%.6f argmin=%.6f rel=%.2e (< 2%%); h*(2n)/h*(n) dev %.1e", opt.h_star, opt.numeric_argmin, rel,
                dev)};
}

Outcome condition_scan() {
    const double h0 = std::pow(800.0, -0.37);
    const double c = 0.25;
    const auto id = SpectralMeasure::identity();
    const auto r1 = check_contour_conditions(c, id, 800, h0, 1.0, 200);
    const auto r2 = check_contour_conditions(c, id, 800, h0 / 2.0, 1.0, 200);
    const double change = std::max(r1.min_d1_ratio, r2.min_d1_ratio) / std::min(r1.min_d1_ratio, r2.min_d1_ratio);
    const bool identity_ok = r1.all_ok() && r2.all_ok() && r1.min_d1_ratio > 0 && r2.min_d1_ratio > 0 && change < 2.0;
    // a far atom of tiny mass creates a narrow island the contour passes
    // close to, so 1 + t m_under nearly vanishes
    const SpectralMeasure spiked({{1.0, 0.999}, {5.0, 0.001}});
    const auto bad = check_contour_conditions(c, spiked, 800, h0, 1.0, 200);
    const bool flagged = !bad.all_ok();
    return {identity_ok && flagged,
            fmt("identity: min_d1_ratio %.4f -> %.4f (x%.3f < 2), g38 max %.3f; counterexample max_g38=%.3e flagged=%s",
                r1.min_d1_ratio, r2.min_d1_ratio, change, r1.max_g38, bad.max_g38, flagged ? "yes" : "no")};
}

Outcome kernel_gate() {
    const auto g = check_kernel(gaussian_kernel());
    const auto d = check_kernel(mass_scaled_kernel(gaussian_kernel(), 2.0));
    const auto failed = d.failed();
    const bool ok = g.all_passed() && failed.size() == 1 && failed[0] == "integral_equals_one";
    std::string names;
    for (const auto& f : failed) names += f + " ";
    return {ok, fmt("gaussian all passed: %s; doubled mass fails: %s", g.all_passed() ? "yes" : "no", names.c_str())};
}

struct Criterion {
    const char* title;
    double budget_s;
    std::function<Outcome()> run;
};

const std::map<int, Criterion>& criteria() {
    static const std::map<int, Criterion> all = {
        {1, {"closed-form oracle", 1.0, closed_form_oracle}},
        {2, {"support recovery", 1.0, support_recovery}},
        {3, {"density normalization", 10.0, density_normalization}},
        {4, {"sigma2 dual-scheme agreement", 30.0, sigma2_agreement}},
        {5, {"CLT density experiment", 600.0, clt_density}},
        {6, {"CLT CDF experiment", 600.0, clt_cdf}},
        {7, {"bias scaling", 10.0, bias_scaling}},
        {8, {"optimal bandwidth", 10.0, optimal_bandwidth}},
        {9, {"condition scan", 30.0, condition_scan}},
        {10, {"kernel gate", 5.0, kernel_gate}},
    };
    return all;
}

bool run_one(int id, const Criterion& c) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
        out = c.run();
    } catch (const std::exception& e) {
        out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.budget_s;
    const bool ok = out.passed && in_time;
    std::printf("criterion %2d [%s] %s: %s (%.2f s, budget %.0f s%s)\n", id, ok ? "PASS" : "FAIL", c.title,
                out.detail.c_str(), secs, c.budget_s, in_time ? "" : ", OVER BUDGET");
    std::fflush(stdout);
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc > 1) {
        const int id = std::atoi(argv[1]);
        const auto it = criteria().find(id);
        if (it == criteria().end()) {
            std::fprintf(stderr, "unknown criterion %s\n", argv[1]);
            return 2;
        }
        return run_one(id, it->second) ? 0 : 1;
    }
    int failed = 0;
    for (const auto& [id, c] : criteria()) failed += run_one(id, c) ? 0 : 1;
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria().size()) - failed, criteria().size());
    return failed == 0 ? 0 : 1;
}
