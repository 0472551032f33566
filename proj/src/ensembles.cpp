#include "specden/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "specden/errors.hpp"

namespace specden {
namespace {

constexpr double kMomentTol = 1e-9;

[[noreturn]] void reject(const std::string& op, const std::string& what) {
    throw DomainError("ensembles", op, what);
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace

double Rademacher4Atoms::inner() { return std::sqrt(1.0 - 1.0 / std::sqrt(2.0)); }
double Rademacher4Atoms::outer() { return std::sqrt(1.0 + 2.0 * std::sqrt(2.0)); }

EntryLaw EntryLaw::custom(std::vector<double> atoms, std::vector<double> probabilities) {
    EntryLaw law{EntryKind::Custom, std::move(atoms), std::move(probabilities)};
    if (law.atoms.empty() || law.atoms.size() != law.probabilities.size())
        reject("EntryLaw", "custom law needs matching, non-empty atoms and probabilities");
    double total = 0.0;
    for (double q : law.probabilities) {
        if (!(q > 0.0)) reject("EntryLaw", "custom probabilities must be > 0");
        total += q;
    }
    if (std::abs(total - 1.0) > kMomentTol) reject("EntryLaw", "custom probabilities must sum to 1");
    return law;
}

std::array<double, 4> EntryLaw::moments() const {
    switch (kind) {
        case EntryKind::StandardNormal:
            return {0.0, 1.0, 0.0, 3.0};
        case EntryKind::Rademacher4: {
            const double a2 = 1.0 - 1.0 / std::sqrt(2.0);
            const double b2 = 1.0 + 2.0 * std::sqrt(2.0);
            const double q = Rademacher4Atoms::inner_probability;
            return {0.0, q * a2 + (1 - q) * b2, 0.0, q * a2 * a2 + (1 - q) * b2 * b2};
        }
        case EntryKind::Custom: {
            std::array<double, 4> m{};
            for (std::size_t i = 0; i < atoms.size(); ++i) {
                double power = 1.0;
                for (auto& mk : m) {
                    power *= atoms[i];
                    mk += probabilities[i] * power;
                }
            }
            return m;
        }
    }
    return {};
}

std::string EntryLaw::name() const {
    switch (kind) {
        case EntryKind::StandardNormal: return "normal";
        case EntryKind::Rademacher4: return "rademacher4";
        case EntryKind::Custom: return "custom";
    }
    return "unknown";
}

void EnsembleConfig::validate() const {
    if (n <= 0 || p <= 0) reject("generate_sample", "n and p must be positive");
    if (p >= n) reject("generate_sample", "p must be < n");
    const auto m = entry.moments();
    if (std::abs(m[0]) > kMomentTol) reject("generate_sample", "entry law must have mean 0");
    if (std::abs(m[1] - 1.0) > kMomentTol) reject("generate_sample", "entry law must have variance 1");
    if (std::abs(m[3] - 3.0) > kMomentTol) reject("generate_sample", "entry law must have fourth moment 3");
    // SpectralMeasure already enforces positive, finite atoms
}

std::vector<double> SpectrumSample::companion_eigenvalues() const {
    std::vector<double> out(static_cast<std::size_t>(config.n - config.p), 0.0);
    out.insert(out.end(), eigenvalues.begin(), eigenvalues.end());
    std::sort(out.begin(), out.end());
    return out;
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t replication) {
    return splitmix64(splitmix64(seed) ^ splitmix64(replication + 0x632BE59BD9B4E019ULL));
}

Eigen::MatrixXd draw_entries(const EntryLaw& law, int p, int n, Engine& engine) {
    Eigen::MatrixXd x(p, n);
    switch (law.kind) {
        case EntryKind::StandardNormal: {
            std::normal_distribution<double> normal(0.0, 1.0);
            for (Eigen::Index j = 0; j < x.cols(); ++j)
                for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, j) = normal(engine);
            break;
        }
        case EntryKind::Rademacher4: {
            const double a = Rademacher4Atoms::inner();
            const double b = Rademacher4Atoms::outer();
            std::uniform_real_distribution<double> unif(0.0, 1.0);
            for (Eigen::Index j = 0; j < x.cols(); ++j)
                for (Eigen::Index i = 0; i < x.rows(); ++i) {
                    const double u = unif(engine);
                    const double mag = u < Rademacher4Atoms::inner_probability ? a : b;
                    x(i, j) = (engine() & 1U) ? mag : -mag;
                }
            break;
        }
        case EntryKind::Custom: {
            std::discrete_distribution<std::size_t> pick(law.probabilities.begin(), law.probabilities.end());
            for (Eigen::Index j = 0; j < x.cols(); ++j)
                for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, j) = law.atoms[pick(engine)];
            break;
        }
    }
    return x;
}

std::vector<double> covariance_spectrum(const Eigen::MatrixXd& x, std::span<const double> population) {
    const Eigen::Index p = x.rows();
    if (static_cast<Eigen::Index>(population.size()) != p)
        reject("generate_sample", "population diagonal length must equal p");
    Eigen::VectorXd root(p);
    for (Eigen::Index i = 0; i < p; ++i) root(i) = std::sqrt(population[static_cast<std::size_t>(i)]);
    const Eigen::MatrixXd y = root.asDiagonal() * x;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(p, p);
    a.selfadjointView<Eigen::Lower>().rankUpdate(y, 1.0 / static_cast<double>(x.cols()));

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw EigenSolverError("ensembles", "generate_sample", "symmetric eigensolver did not converge");
    const auto& ev = solver.eigenvalues();
    std::vector<double> out(ev.data(), ev.data() + ev.size());
    std::sort(out.begin(), out.end());
    return out;
}

SpectrumSample generate_sample(const EnsembleConfig& config, std::uint64_t replication) {
    config.validate();
    Engine engine(stream_seed(config.seed, replication));
    const auto x = draw_entries(config.entry, config.p, config.n, engine);
    const auto diag = config.t_spectrum.population_diagonal(static_cast<std::size_t>(config.p));
    return SpectrumSample{covariance_spectrum(x, diag), config};
}

double empirical_cdf(const SpectrumSample& sample, double x) {
    if (sample.eigenvalues.empty()) return 0.0;
    const auto it = std::upper_bound(sample.eigenvalues.begin(), sample.eigenvalues.end(), x);
    return static_cast<double>(it - sample.eigenvalues.begin()) / static_cast<double>(sample.eigenvalues.size());
}

}  // namespace specden
