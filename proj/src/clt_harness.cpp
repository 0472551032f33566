#include "specden/clt_harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace specden {

const char* to_string(CenteringTarget t) {
    switch (t) {
        case CenteringTarget::SmoothedTarget: return "smoothed";
        case CenteringTarget::LimitDensity: return "limit";
        case CenteringTarget::SmoothedCdf: return "smoothed-cdf";
        case CenteringTarget::LimitCdf: return "limit-cdf";
        case CenteringTarget::SelfCentered: return "self";
    }
    return "unknown";
}

CenteringTarget centering_from_string(const std::string& s) {
    for (auto t : {CenteringTarget::SmoothedTarget, CenteringTarget::LimitDensity, CenteringTarget::SmoothedCdf,
                   CenteringTarget::LimitCdf, CenteringTarget::SelfCentered})
        if (s == to_string(t)) return t;
    throw DomainError("clt-harness", "CltExperimentConfig", "unknown centering target '" + s + "'");
}

const char* to_string(Normalization n) { return n == Normalization::SampleSize ? "n" : "p"; }

bool CltExperimentResult::passed() const {
    return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.informational || v.passed; });
}

const Verdict* CltExperimentResult::find(const std::string& name) const {
    for (const auto& v : verdicts)
        if (v.name == name) return &v;
    return nullptr;
}

std::vector<PointSummary> summarize(const Eigen::MatrixXd& z) {
    const auto r = static_cast<double>(z.rows());
    std::vector<PointSummary> out;
    for (Eigen::Index j = 0; j < z.cols(); ++j) {
        PointSummary s;
        const auto col = z.col(j);
        s.mean = col.mean();
        double m2 = 0, m3 = 0, m4 = 0;
        for (Eigen::Index i = 0; i < z.rows(); ++i) {
            const double d = col(i) - s.mean;
            m2 += d * d;
            m3 += d * d * d;
            m4 += d * d * d * d;
        }
        s.variance = z.rows() > 1 ? m2 / (r - 1.0) : 0.0;
        m2 /= r;
        m3 /= r;
        m4 /= r;
        if (m2 > 0.0) {
            s.skewness = m3 / std::pow(m2, 1.5);
            s.excess_kurtosis = m4 / (m2 * m2) - 3.0;
        }
        out.push_back(s);
    }
    return out;
}

Eigen::MatrixXd column_correlation(const Eigen::MatrixXd& z) {
    const Eigen::Index j = z.cols();
    const Eigen::MatrixXd centered = z.rowwise() - z.colwise().mean();
    const Eigen::MatrixXd cov = centered.transpose() * centered;
    Eigen::MatrixXd corr = Eigen::MatrixXd::Identity(j, j);
    for (Eigen::Index a = 0; a < j; ++a)
        for (Eigen::Index b = 0; b < j; ++b) {
            if (a == b) continue;
            const double denom = std::sqrt(cov(a, a) * cov(b, b));
            corr(a, b) = denom > 0.0 ? cov(a, b) / denom : 0.0;
        }
    return corr;
}

namespace {

enum class Mode { Density, Cdf };

void validate(const CltExperimentConfig& cfg, Mode mode) {
    cfg.ensemble.validate();
    cfg.estimator.validate();
    if (cfg.reps < 1) throw DomainError("clt-harness", "CltExperimentConfig", "reps must be positive");
    if (cfg.estimator.eval_points.empty())
        throw DomainError("clt-harness", "CltExperimentConfig", "at least one evaluation point is required");
    const double h = cfg.estimator.bandwidth;
    const auto& xs = cfg.estimator.eval_points;
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (xs[i] - xs[i - 1] <= 5.0 * h)
            throw DomainError("clt-harness", "CltExperimentConfig", "evaluation points must be separated by more than 5h");
    const bool density_target = cfg.target == CenteringTarget::SmoothedTarget ||
                                cfg.target == CenteringTarget::LimitDensity ||
                                cfg.target == CenteringTarget::SelfCentered;
    const bool cdf_target = cfg.target == CenteringTarget::SmoothedCdf || cfg.target == CenteringTarget::LimitCdf ||
                            cfg.target == CenteringTarget::SelfCentered;
    if (mode == Mode::Density && !density_target)
        throw DomainError("clt-harness", "run_clt_density", "target must be smoothed, limit or self");
    if (mode == Mode::Cdf && !cdf_target)
        throw DomainError("clt-harness", "run_clt_cdf", "target must be smoothed-cdf, limit-cdf or self");
}

// Runs `body(r, row)` for r in [0, reps) on a pool of workers. The first
// exception aborts the run and is rethrown.
template <class Body>
void for_each_replication(int reps, unsigned threads, Body&& body) {
    const unsigned hw = std::max(1U, std::thread::hardware_concurrency());
    const unsigned workers = std::clamp(threads == 0 ? hw : threads, 1U, static_cast<unsigned>(reps));
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for (int r = next++; r < reps && !failed; r = next++) {
            try {
                body(r);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                failed = true;
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < workers; ++i) pool.emplace_back(work);
    }
    if (error) std::rethrow_exception(error);
}

void add_verdicts(CltExperimentResult& res, const CltExperimentConfig& cfg, Mode mode) {
    const int reps = static_cast<int>(res.z_matrix.rows());
    if (reps < kMinRepsForVerdict) {
        res.warnings.push_back("fewer than " + std::to_string(kMinRepsForVerdict) + " replications: no verdicts");
        return;
    }
    const auto& s = cfg.slack;
    const bool informational = cfg.target == CenteringTarget::LimitCdf;
    const double r = static_cast<double>(reps);
    for (std::size_t j = 0; j < res.summary.size(); ++j) {
        const auto& p = res.summary[j];
        const std::string at = "[x=" + std::to_string(res.eval_points[j]) + "]";
        const double se = std::sqrt(p.variance / r);
        res.verdicts.push_back({"mean" + at, std::abs(p.mean) <= s.mean_standard_errors * se, std::abs(p.mean),
                                s.mean_standard_errors * se, informational});
        const double ratio = p.variance / res.reference_variance;
        if (mode == Mode::Density) {
            res.verdicts.push_back({"variance_ratio" + at, std::abs(ratio - 1.0) < s.variance, ratio, s.variance,
                                    informational});
        } else {
            res.verdicts.push_back({"variance_ratio" + at, ratio >= s.cdf_variance_lo && ratio <= s.cdf_variance_hi,
                                    ratio, s.cdf_variance_hi, informational});
        }
        const double skew_bound = s.skewness_factor * std::sqrt(6.0 / r);
        const double kurt_bound = s.kurtosis_factor * std::sqrt(24.0 / r);
        res.verdicts.push_back(
            {"skewness" + at, std::abs(p.skewness) < skew_bound, p.skewness, skew_bound, informational});
        res.verdicts.push_back({"excess_kurtosis" + at, std::abs(p.excess_kurtosis) < kurt_bound, p.excess_kurtosis,
                                kurt_bound, informational});
    }
    if (res.eval_points.size() >= 2) {
        double worst = 0.0;
        for (Eigen::Index a = 0; a < res.cross_corr.rows(); ++a)
            for (Eigen::Index b = 0; b < res.cross_corr.cols(); ++b)
                if (a != b) worst = std::max(worst, std::abs(res.cross_corr(a, b)));
        const double bound = mode == Mode::Density ? s.correlation : s.cdf_correlation;
        res.verdicts.push_back({"cross_correlation", worst < bound, worst, bound, informational});
    }
}

CltExperimentResult run(const CltExperimentConfig& cfg, Mode mode) {
    validate(cfg, mode);
    const auto& ens = cfg.ensemble;
    const auto& k = cfg.estimator.kernel;
    const double h = cfg.estimator.bandwidth;
    const auto& xs = cfg.estimator.eval_points;
    const auto n = ens.n;
    const double cn = ens.ratio();
    const auto hn = ens.t_spectrum.discretized(static_cast<std::size_t>(ens.p));

    CltExperimentResult res;
    res.eval_points = xs;
    res.target = cfg.target;
    res.normalization = cfg.normalization;
    res.bandwidth = h;

    const double dim = cfg.normalization == Normalization::SampleSize ? n : ens.p;
    if (mode == Mode::Density) {
        res.scale = dim * h;
        res.reference_variance = cfg.reference_variance.value_or(k.id == "gaussian" ? kGaussianSigma2 : sigma2(k).sigma2);
    } else {
        res.scale = dim / std::sqrt(std::log(1.0 / h));
        res.reference_variance = cfg.reference_variance.value_or(cdf_variance());
    }

    const auto regime = bandwidth_regime(n, h);
    if (mode == Mode::Density && !regime.density_regime)
        res.warnings.push_back("bandwidth outside the density CLT regime (n h^2.5 > 1, n h^3 < 1)");
    if (mode == Mode::Cdf && !regime.cdf_regime)
        res.warnings.push_back("bandwidth outside the CDF CLT regime (n h^3 sqrt(ln 1/h) > 1)");

    // centring values depend only on (c_n, H_n, K, h)
    res.targets.assign(xs.size(), 0.0);
    if (cfg.target != CenteringTarget::SelfCentered) {
        const auto law = solve_law(cn, hn, h / 20.0);
        cfg.estimator.validate_against(law);
        const DensityInterpolant f(law);
        for (std::size_t j = 0; j < xs.size(); ++j) {
            switch (cfg.target) {
                case CenteringTarget::SmoothedTarget: res.targets[j] = smoothed_target(f, k, h, xs[j]); break;
                case CenteringTarget::LimitDensity:
                    res.targets[j] = density(cn, hn, xs[j], law.epsilon, law.support);
                    break;
                case CenteringTarget::SmoothedCdf: res.targets[j] = smoothed_cdf_target(f, k, h, xs[j]); break;
                case CenteringTarget::LimitCdf: res.targets[j] = limit_cdf(f, xs[j]); break;
                case CenteringTarget::SelfCentered: break;
            }
        }
        if (cfg.target == CenteringTarget::LimitDensity && k.has_complex_extension())
            for (double x : xs) res.bias_diagnostic.push_back(mean_diagnostic(cn, hn, k, h, x));
    }

    res.z_matrix.resize(cfg.reps, static_cast<Eigen::Index>(xs.size()));
    for_each_replication(cfg.reps, cfg.threads, [&](int r) {
        SpectrumSample sample;
        try {
            sample = generate_sample(ens, static_cast<std::uint64_t>(r));
        } catch (const Error& e) {
            throw NumericalError("clt-harness", mode == Mode::Density ? "run_clt_density" : "run_clt_cdf",
                                 "replication " + std::to_string(r) + " failed: " + e.what());
        }
        for (std::size_t j = 0; j < xs.size(); ++j) {
            const double est = mode == Mode::Density ? kernel_density_at(sample.eigenvalues, k, h, xs[j])
                                                     : kernel_cdf_at(sample.eigenvalues, k, h, xs[j]);
            const double centre = cfg.target == CenteringTarget::SelfCentered ? est : res.targets[j];
            res.z_matrix(r, static_cast<Eigen::Index>(j)) = res.scale * (est - centre);
        }
    });

    res.summary = summarize(res.z_matrix);
    res.cross_corr = column_correlation(res.z_matrix);
    add_verdicts(res, cfg, mode);
    return res;
}

}  // namespace

CltExperimentResult run_clt_density(const CltExperimentConfig& config) { return run(config, Mode::Density); }

CltExperimentResult run_clt_cdf(const CltExperimentConfig& config) { return run(config, Mode::Cdf); }

ContourConditionReport check_contour_conditions(double c, const SpectralMeasure& h_meas, int n, double bandwidth,
                                                double v0, int grid, const ContourCheckOptions& options) {
    const char* op = "check_contour_conditions";
    if (!(c > 0.0 && c < 1.0)) throw DomainError("clt-harness", op, "c must lie in (0, 1)");
    if (!(bandwidth > 0.0) || !(v0 > 0.0)) throw DomainError("clt-harness", op, "bandwidth and v0 must be > 0");
    if (grid < 2) throw DomainError("clt-harness", op, "grid must be >= 2");
    if (n < 2) throw DomainError("clt-harness", op, "n must be >= 2");

    ContourConditionReport rep;
    rep.grid = grid;
    rep.bound = options.bound;
    rep.contour = default_contour(c, h_meas, bandwidth, v0);
    if (options.a_l) rep.contour.a_l = *options.a_l;
    if (options.a_r) rep.contour.a_r = *options.a_r;
    const auto bracket = support_bracket(c, h_meas);
    if (!(rep.contour.a_l > 0.0 && rep.contour.a_l < bracket.lo && rep.contour.a_r > bracket.hi))
        throw DomainError("clt-harness", op, "need 0 < a_l < left end and a_r > right end of the support bracket");
    const double height = rep.contour.height;

    // sample points on the upper half of the rectangle; the lower half is
    // the mirror image and gives identical moduli
    std::vector<cplx> points;
    for (int k = 0; k < grid; ++k) {
        const double t = (k + 0.5) / grid;
        points.emplace_back(rep.contour.a_l + (rep.contour.a_r - rep.contour.a_l) * t, height);
        const double v = -height + 2.0 * height * t;
        if (v > 0.0) {
            points.emplace_back(rep.contour.a_l, v);
            points.emplace_back(rep.contour.a_r, v);
        }
    }

    std::vector<cplx> expected_m(points.size());
    rep.f11_uses_proxy = options.expectation_reps <= 0;
    if (rep.f11_uses_proxy) {
        rep.notes.push_back("E m_under_n replaced by m_under^0 in the first integral condition");
    } else {
        EnsembleConfig ens;
        ens.n = n;
        ens.p = static_cast<int>(std::lround(c * n));
        ens.t_spectrum = h_meas;
        ens.seed = options.seed;
        const double cn = ens.ratio();
        for (int r = 0; r < options.expectation_reps; ++r) {
            const auto s = generate_sample(ens, static_cast<std::uint64_t>(r));
            for (std::size_t i = 0; i < points.size(); ++i) {
                cplx sum{};
                for (double l : s.eigenvalues) sum += 1.0 / (l - points[i]);
                const cplx m_a = sum / static_cast<double>(s.eigenvalues.size());
                expected_m[i] += -(1.0 - cn) / points[i] + cn * m_a;
            }
        }
        for (auto& m : expected_m) m /= static_cast<double>(options.expectation_reps);
        rep.notes.push_back("E m_under_n estimated from " + std::to_string(options.expectation_reps) + " draws");
    }

    const auto fourth = [&](cplx m) {
        double s = 0.0;
        for (const auto& a : h_meas.atoms()) s += a.w / std::pow(std::abs(1.0 + a.t * m), 4);
        return s;
    };

    rep.min_d1_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i) {
        const cplx z = points[i];
        cplx m0;
        try {
            m0 = companion_transform(c, h_meas, z).m_under;
        } catch (const NumericalError&) {
            rep.failed_points.push_back(z);
            continue;
        }
        cplx s2{};
        for (const auto& a : h_meas.atoms()) {
            const cplx q = 1.0 / (1.0 + a.t * m0);
            s2 += a.w * a.t * a.t * q * q;
        }
        const double ratio = std::abs(1.0 - c * m0 * m0 * s2) / std::sqrt(z.imag());
        if (ratio < rep.min_d1_ratio) {
            rep.min_d1_ratio = ratio;
            rep.argmin_d1 = z;
        }
        const double g38 = fourth(m0);
        rep.max_g38 = std::max(rep.max_g38, g38);
        rep.max_f11 = std::max(rep.max_f11, rep.f11_uses_proxy ? g38 : fourth(expected_m[i]));
    }
    rep.d1_ok = std::isfinite(rep.min_d1_ratio) && rep.min_d1_ratio > 0.0;
    rep.f11_ok = std::isfinite(rep.max_f11) && rep.max_f11 < rep.bound;
    rep.g38_ok = std::isfinite(rep.max_g38) && rep.max_g38 < rep.bound;
    if (!rep.failed_points.empty())
        rep.notes.push_back(std::to_string(rep.failed_points.size()) + " contour points failed to solve");
    return rep;
}

}  // namespace specden
