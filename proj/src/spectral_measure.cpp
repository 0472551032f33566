#include "specden/spectral_measure.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "specden/errors.hpp"

namespace specden {
namespace {

[[noreturn]] void reject(const std::string& what) {
    throw DomainError("spectral-law", "SpectralMeasure", what);
}

}  // namespace

SpectralMeasure::SpectralMeasure(std::vector<Atom> atoms) {
    if (atoms.empty()) reject("measure needs at least one atom");
    for (const auto& a : atoms) {
        if (!(a.t > 0.0) || !std::isfinite(a.t)) reject("atom locations must be finite and > 0");
        if (!(a.w > 0.0) || !std::isfinite(a.w)) reject("atom weights must be finite and > 0");
    }
    std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.t < b.t; });
    for (const auto& a : atoms) {
        if (!atoms_.empty() && atoms_.back().t == a.t)
            atoms_.back().w += a.w;
        else
            atoms_.push_back(a);
    }
    const double total = std::accumulate(atoms_.begin(), atoms_.end(), 0.0,
                                         [](double s, const Atom& a) { return s + a.w; });
    if (std::abs(total - 1.0) > 1e-12) reject("atom weights must sum to 1 (got " + std::to_string(total) + ")");
}

SpectralMeasure SpectralMeasure::point_mass(double t) { return SpectralMeasure({Atom{t, 1.0}}); }

SpectralMeasure SpectralMeasure::scaled(double s) const {
    if (!(s > 0.0)) reject("scale must be > 0");
    std::vector<Atom> out = atoms_;
    for (auto& a : out) a.t *= s;
    return SpectralMeasure(std::move(out));
}

std::vector<double> SpectralMeasure::population_diagonal(std::size_t p) const {
    if (p == 0) reject("dimension must be positive");
    const std::size_t k = atoms_.size();
    std::vector<std::size_t> counts(k, 0);
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < k; ++i) {
        const double exact = atoms_[i].w * static_cast<double>(p);
        counts[i] = static_cast<std::size_t>(std::floor(exact));
        assigned += counts[i];
        remainders.emplace_back(exact - std::floor(exact), i);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t j = 0; assigned < p; ++j, ++assigned) ++counts[remainders[j % k].second];

    // keep every atom represented when p is large enough
    if (p >= k) {
        for (std::size_t i = 0; i < k; ++i) {
            if (counts[i] > 0) continue;
            auto donor = std::max_element(counts.begin(), counts.end());
            --*donor;
            counts[i] = 1;
        }
    }

    std::vector<double> diag;
    diag.reserve(p);
    for (std::size_t i = 0; i < k; ++i) diag.insert(diag.end(), counts[i], atoms_[i].t);
    return diag;
}

SpectralMeasure SpectralMeasure::discretized(std::size_t p) const {
    const auto diag = population_diagonal(p);
    std::vector<Atom> out;
    for (std::size_t i = 0; i < diag.size();) {
        std::size_t j = i;
        while (j < diag.size() && diag[j] == diag[i]) ++j;
        out.push_back({diag[i], static_cast<double>(j - i) / static_cast<double>(p)});
        i = j;
    }
    // renormalise away the rounding in count / p
    double total = 0.0;
    for (const auto& a : out) total += a.w;
    for (auto& a : out) a.w /= total;
    return SpectralMeasure(std::move(out));
}

void to_json(nlohmann::json& j, const SpectralMeasure& h) {
    j = nlohmann::json::object();
    auto& arr = j["atoms"] = nlohmann::json::array();
    for (const auto& a : h.atoms()) arr.push_back({{"t", a.t}, {"w", a.w}});
}

void from_json(const nlohmann::json& j, SpectralMeasure& h) {
    if (!j.is_object() || !j.contains("atoms") || !j.at("atoms").is_array())
        reject("spectral measure JSON must be {\"atoms\": [{\"t\": .., \"w\": ..}, ...]}");
    std::vector<Atom> atoms;
    for (const auto& a : j.at("atoms")) {
        if (!a.contains("t") || !a.contains("w")) reject("each atom needs fields t and w");
        atoms.push_back({a.at("t").get<double>(), a.at("w").get<double>()});
    }
    h = SpectralMeasure(std::move(atoms));
}

SpectralMeasure load_spectral_measure(const std::string& path) {
    std::ifstream in(path);
    if (!in) reject("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        reject(path + ": " + e.what());
    }
    return j.get<SpectralMeasure>();
}

}  // namespace specden
