#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "specden/errors.hpp"
#include "specden/spectral_measure.hpp"

using specden::Atom;
using specden::SpectralMeasure;

TEST_CASE("atoms are sorted and duplicates merged") {
    const SpectralMeasure h({{3.0, 0.25}, {1.0, 0.5}, {3.0, 0.25}});
    REQUIRE(h.size() == 2);
    CHECK(h.atoms()[0].t == 1.0);
    CHECK(h.atoms()[1].t == 3.0);
    CHECK(h.atoms()[1].w == doctest::Approx(0.5));
    CHECK(h.min_location() == 1.0);
    CHECK(h.max_location() == 3.0);
}

TEST_CASE("invalid measures are rejected") {
    CHECK_THROWS_AS(SpectralMeasure({{1.0, 0.6}}), specden::DomainError);
    CHECK_THROWS_AS(SpectralMeasure({{-1.0, 1.0}}), specden::DomainError);
    CHECK_THROWS_AS(SpectralMeasure({{1.0, 1.5}, {2.0, -0.5}}), specden::DomainError);
    CHECK_THROWS_AS(SpectralMeasure(std::vector<Atom>{}), specden::DomainError);
}

TEST_CASE("population diagonal reproduces the weights") {
    const SpectralMeasure h({{1.0, 0.5}, {3.0, 0.5}});
    const auto d = h.population_diagonal(7);
    REQUIRE(d.size() == 7);
    CHECK(std::count(d.begin(), d.end(), 1.0) + std::count(d.begin(), d.end(), 3.0) == 7);
    CHECK(std::is_sorted(d.begin(), d.end()));
    const auto hn = h.discretized(8);
    CHECK(hn == h);
}

TEST_CASE("json round trip") {
    const SpectralMeasure h({{0.5, 0.2}, {2.0, 0.8}});
    nlohmann::json j = h;
    CHECK(j.at("atoms").size() == 2);
    CHECK(j.get<SpectralMeasure>() == h);

    const auto path = std::string("spectral_measure_roundtrip.json");
    std::ofstream(path) << j.dump();
    CHECK(specden::load_spectral_measure(path) == h);
    std::remove(path.c_str());
    CHECK_THROWS_AS(specden::load_spectral_measure("does/not/exist.json"), specden::DomainError);
}

TEST_CASE("scaling moves the atoms") {
    const auto h = SpectralMeasure::identity().scaled(2.5);
    CHECK(h.is_point_mass());
    CHECK(h.min_location() == doctest::Approx(2.5));
}
