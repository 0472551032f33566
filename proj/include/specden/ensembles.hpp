#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "specden/spectral_measure.hpp"

namespace specden {

enum class EntryKind { StandardNormal, Rademacher4, Custom };

/// Law of the i.i.d. entries X_ij. Every law must have mean 0,
/// variance 1 and fourth moment 3.
struct EntryLaw {
    EntryKind kind = EntryKind::StandardNormal;
    /// Custom only: a discrete law given by support points and probabilities.
    std::vector<double> atoms;
    std::vector<double> probabilities;

    static EntryLaw standard_normal() { return {}; }
    static EntryLaw rademacher4() { return {EntryKind::Rademacher4, {}, {}}; }
    static EntryLaw custom(std::vector<double> atoms, std::vector<double> probabilities);

    /// Raw moments E X^k for k = 1..4 (index k-1).
    std::array<double, 4> moments() const;
    std::string name() const;
};

/// Symmetric four-point law on {-b, -a, a, b}: P(|X| = a) = 0.8,
/// P(|X| = b) = 0.2 with a^2 = 1 - 1/sqrt(2), b^2 = 1 + 2 sqrt(2).
/// These solve 0.8 a^2 + 0.2 b^2 = 1, 0.8 a^4 + 0.2 b^4 = 3.
struct Rademacher4Atoms {
    static double inner();
    static double outer();
    static constexpr double inner_probability = 0.8;
};

struct EnsembleConfig {
    int n = 0;
    int p = 0;
    EntryLaw entry;
    SpectralMeasure t_spectrum;
    std::uint64_t seed = 0;

    double ratio() const noexcept { return static_cast<double>(p) / static_cast<double>(n); }
    /// Throws DomainError when an invariant fails.
    void validate() const;
};

/// Eigenvalues of one draw of A_n = (1/n) T^{1/2} X X^T T^{1/2}, ascending.
struct SpectrumSample {
    std::vector<double> eigenvalues;
    EnsembleConfig config;

    std::size_t size() const noexcept { return eigenvalues.size(); }
    /// Spectrum of the companion B_n = (1/n) X^T T X: the p eigenvalues of
    /// A_n and n - p zeros, ascending.
    std::vector<double> companion_eigenvalues() const;
};

/// Engine seed for replication r of a run seeded with `seed`. Streams for
/// distinct (seed, r) pairs are decorrelated by a SplitMix64 mix.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t replication);

using Engine = std::mt19937_64;

/// Fills a p x n matrix with i.i.d. draws of `law`.
Eigen::MatrixXd draw_entries(const EntryLaw& law, int p, int n, Engine& engine);

/// Spectrum of (1/n) D X X^T D for D = diag(sqrt(population)).
std::vector<double> covariance_spectrum(const Eigen::MatrixXd& x, std::span<const double> population);

/// One draw for replication `replication` of `config`. Deterministic in
/// (config, replication).
SpectrumSample generate_sample(const EnsembleConfig& config, std::uint64_t replication = 0);

/// (1/p) #{lambda_k <= x}.
double empirical_cdf(const SpectrumSample& sample, double x);

}  // namespace specden
