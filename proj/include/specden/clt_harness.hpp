#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "specden/asymptotics.hpp"
#include "specden/ensembles.hpp"
#include "specden/kernel_estimation.hpp"

namespace specden {

enum class CenteringTarget {
    SmoothedTarget,  ///< (1/h) int K((x-y)/h) dF^{c_n,H_n}(y)
    LimitDensity,    ///< f_{c_n,H_n}(x)
    SmoothedCdf,     ///< int_{-inf}^x of the smoothed target
    LimitCdf,        ///< F^{c_n,H_n}(x); experiment only, verdicts informational
    SelfCentered,    ///< each replication's own estimate; Z == 0 by construction
};

const char* to_string(CenteringTarget t);
CenteringTarget centering_from_string(const std::string& s);

/// Which dimension multiplies the centred estimator: the sample size n
/// (n h for densities, n / sqrt(ln 1/h) for CDFs) or the dimension p.
enum class Normalization { SampleSize, Dimension };

const char* to_string(Normalization n);

/// Declared finite-n tolerances for the asymptotic statements.
struct VerdictSlack {
    double mean_standard_errors = 3.0;
    double variance = 0.3;           ///< |var / sigma^2 - 1| < variance (density mode)
    double correlation = 0.15;       ///< density mode
    double cdf_variance_lo = 0.5;    ///< var / (1/(2 pi^2)) in [lo, hi] (CDF mode)
    double cdf_variance_hi = 2.0;
    double cdf_correlation = 0.2;
    double skewness_factor = 3.0;    ///< |skew| < factor sqrt(6/R)
    double kurtosis_factor = 3.0;    ///< |excess kurtosis| < factor sqrt(24/R)
};

inline constexpr int kMinRepsForVerdict = 50;

struct CltExperimentConfig {
    EnsembleConfig ensemble;
    int reps = 500;
    EstimatorConfig estimator;
    CenteringTarget target = CenteringTarget::SmoothedTarget;
    Normalization normalization = Normalization::SampleSize;
    VerdictSlack slack;
    /// Variance the density verdict compares against; computed from the
    /// kernel when unset (the frozen constant for the Gaussian).
    std::optional<double> reference_variance;
    /// Worker threads; 0 means hardware concurrency.
    unsigned threads = 0;
};

struct PointSummary {
    double mean = 0.0;
    double variance = 0.0;  ///< unbiased
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
};

struct Verdict {
    std::string name;
    bool passed = false;
    double statistic = 0.0;
    double threshold = 0.0;
    /// Reported but not part of the overall pass (experiment modes).
    bool informational = false;
};

struct CltExperimentResult {
    Eigen::MatrixXd z_matrix;  ///< R x J
    std::vector<double> eval_points;
    std::vector<double> targets;
    std::vector<PointSummary> summary;
    Eigen::MatrixXd cross_corr;
    std::vector<Verdict> verdicts;
    std::vector<std::string> warnings;
    double reference_variance = 0.0;
    double scale = 0.0;
    double bandwidth = 0.0;
    CenteringTarget target = CenteringTarget::SmoothedTarget;
    Normalization normalization = Normalization::SampleSize;
    /// LimitDensity mode: mean diagnostic at each evaluation point.
    std::vector<double> bias_diagnostic;

    bool passed() const;
    const Verdict* find(const std::string& name) const;
};

/// Per-column moments of an R x J matrix.
std::vector<PointSummary> summarize(const Eigen::MatrixXd& z);
/// Sample correlation between columns (0 off the diagonal for constant columns).
Eigen::MatrixXd column_correlation(const Eigen::MatrixXd& z);

/// Z_{r,j} = scale * (f_n^{(r)}(x_j) - target(x_j)) for R independent draws.
/// Targets SmoothedTarget, LimitDensity or SelfCentered.
CltExperimentResult run_clt_density(const CltExperimentConfig& config);

/// Z_{r,j} = scale * (F_n^{(r)}(x_j) - target(x_j)). Targets SmoothedCdf,
/// LimitCdf or SelfCentered.
CltExperimentResult run_clt_cdf(const CltExperimentConfig& config);

struct ContourCheckOptions {
    std::optional<double> a_l;
    std::optional<double> a_r;
    /// M: the integral conditions count as satisfied when below this bound.
    double bound = 100.0;
    /// Replications used to estimate E m_under_n; 0 substitutes m_under^0.
    int expectation_reps = 0;
    std::uint64_t seed = 0;
};

struct ContourConditionReport {
    RectangularContour contour;
    int grid = 0;
    double min_d1_ratio = 0.0;  ///< min |1 - c m^2 int t^2 dH/(1+tm)^2| / sqrt(v)
    cplx argmin_d1;
    double max_f11 = 0.0;  ///< max int dH / |1 + t E m_under_n|^4
    double max_g38 = 0.0;  ///< max int dH / |1 + t m_under^0|^4
    bool f11_uses_proxy = true;
    double bound = 100.0;
    bool d1_ok = false;
    bool f11_ok = false;
    bool g38_ok = false;
    std::vector<cplx> failed_points;
    std::vector<std::string> notes;

    bool all_ok() const noexcept { return d1_ok && f11_ok && g38_ok && failed_points.empty(); }
};

/// Scans the four sides of the rectangle (a_l, a_r, v0 h) at `grid` points
/// each and evaluates the three regularity statistics with m_under^0 from
/// the spectral law.
ContourConditionReport check_contour_conditions(double c, const SpectralMeasure& h_meas, int n, double bandwidth,
                                                double v0, int grid, const ContourCheckOptions& options = {});

}  // namespace specden
