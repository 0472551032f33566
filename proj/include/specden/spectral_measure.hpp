#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

namespace specden {

struct Atom {
    double t = 1.0;  ///< location, strictly positive
    double w = 1.0;  ///< weight, strictly positive

    friend bool operator==(const Atom&, const Atom&) = default;
};

/// Discrete population spectrum H: weighted positive atoms, sorted by
/// location, total weight one.
class SpectralMeasure {
public:
    /// The identity population, delta at 1.
    SpectralMeasure() : atoms_{Atom{1.0, 1.0}} {}

    /// Validates and sorts. Atoms sharing a location are merged.
    explicit SpectralMeasure(std::vector<Atom> atoms);

    static SpectralMeasure point_mass(double t);
    static SpectralMeasure identity() { return point_mass(1.0); }

    const std::vector<Atom>& atoms() const noexcept { return atoms_; }
    std::size_t size() const noexcept { return atoms_.size(); }
    bool is_point_mass() const noexcept { return atoms_.size() == 1; }

    double min_location() const noexcept { return atoms_.front().t; }
    double max_location() const noexcept { return atoms_.back().t; }

    /// H with every location multiplied by s > 0.
    SpectralMeasure scaled(double s) const;

    /// Population diagonal of a p x p matrix T whose spectrum approximates
    /// this measure; atom multiplicities follow largest-remainder rounding
    /// of w * p, every atom keeps at least one copy when p allows.
    std::vector<double> population_diagonal(std::size_t p) const;

    /// F^T of the matrix built by population_diagonal(p), i.e. H_n.
    SpectralMeasure discretized(std::size_t p) const;

    friend bool operator==(const SpectralMeasure&, const SpectralMeasure&) = default;

private:
    std::vector<Atom> atoms_;
};

void to_json(nlohmann::json& j, const SpectralMeasure& h);
void from_json(const nlohmann::json& j, SpectralMeasure& h);

SpectralMeasure load_spectral_measure(const std::string& path);

}  // namespace specden
