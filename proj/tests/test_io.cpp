#include <cmath>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "heisflow/experiments.hpp"
#include "heisflow/io.hpp"

using namespace heisflow;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const char* name) {
    auto d = fs::temp_directory_path() / (std::string("heisflow_test_") + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

}  // namespace

TEST_CASE("double formatting round-trips exactly") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> ud(-1.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        double x = ud(rng) * std::pow(10.0, 40.0 * ud(rng));
        CHECK(io::parse_double(io::format_double(x)) == x);
    }
    CHECK(std::isnan(io::parse_double(io::format_double(std::nan("")))));
    CHECK(io::parse_double(io::format_double(-INFINITY)) == -INFINITY);
    CHECK_THROWS_AS(io::parse_double("1.5x"), ConfigError);
    CHECK_THROWS_AS(io::parse_double(""), ConfigError);
}

TEST_CASE("Hardy function CSV round-trip is bit-exact") {
    auto dir = scratch_dir("hardy");
    for (auto grid : {FrequencyGrid::cell_centered(1.0 / 7.0, 50), FrequencyGrid::trapezoid(1e-3, 30.0, 77)}) {
        auto f = hardy::ground_state_profile(grid) + experiments::random_hardy_perturbation(grid, 0.3, 9);
        io::write_hardy(dir / "f.csv", f);
        CHECK(fs::exists(dir / "f.csv.json"));
        CHECK_FALSE(fs::exists(dir / "f.csv.tmp"));
        auto g = io::read_hardy(dir / "f.csv");
        REQUIRE(g.grid() == grid);
        CHECK(g.values() == f.values());
    }
    io::write_text_atomic(dir / "bad.csv", "sigma,re\n1,2\n");
    io::write_text_atomic(dir / "bad.csv.json", R"({"n_points": 1, "rule": "cell_centered", "spacing": 1})");
    CHECK_THROWS_AS(io::read_hardy(dir / "bad.csv"), ConfigError);
    CHECK_THROWS_AS(io::read_hardy(dir / "missing.csv"), ConfigError);
    fs::remove_all(dir);
}

TEST_CASE("radial field CSV round-trip is bit-exact") {
    auto dir = scratch_dir("radial");
    RadialGridSpec spec;
    spec.k_max = 2;
    spec.n_sigma = 24;
    spec.sigma_max = 9.0;
    RadialSpectralGrid g(spec);
    auto u = heis::embed_hardy(hardy::ground_state_profile(g.hardy_grid()), g) +
             experiments::random_w_perturbation(g, Truncation::none(), 0.2, 3);
    io::write_radial(dir / "u.csv", u);
    auto v = io::read_radial(dir / "u.csv");
    REQUIRE(v.grid() == g);
    CHECK(v.coeffs() == u.coeffs());
    fs::remove_all(dir);
}

TEST_CASE("series and ground-state tables") {
    auto dir = scratch_dir("series");
    std::vector<SeriesRow> rows(3);
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i].t = 0.1 * static_cast<double>(i);
    io::write_series(dir / "series.csv", rows);
    auto text = io::read_text(dir / "series.csv");
    CHECK(text.rfind("t,momentum,energy,l4,w_norm,uplus_norm,dt_norm,dist_orbit,x_s,x_theta,x_alpha,anchor_id\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 4);

    ModulationTrack track;
    track.anchor.resize(2);
    track.anchor_id.resize(2);
    CHECK_THROWS_AS(io::write_series(dir / "s2.csv", rows, &track), ConfigError);

    GroundStateTable table;
    table.rows.resize(2);
    table.rows[1].beta = 0.95;
    io::write_groundstates(dir / "groundstates.csv", table);
    text = io::read_text(dir / "groundstates.csv");
    CHECK(text.find("\n0.95,") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("initial family") {
    RadialGridSpec spec;
    spec.k_max = 1;
    spec.n_sigma = 16;
    spec.sigma_max = 8.0;
    RadialSpectralGrid g(spec);
    auto q = heis::embed_hardy(hardy::ground_state_profile(g.hardy_grid()), g);
    auto w = experiments::random_w_perturbation(g, Truncation::none(), 0.5, 2);
    auto u0 = cplx{0.8} * q + w;

    CHECK(experiments::initial_family(u0, 0.5, 0.5).coeffs() == u0.coeffs());
    auto mid = experiments::initial_family(u0, 0.5, 0.75);
    auto expect = cplx{0.5} * u0 + cplx{0.5} * q;
    double err = 0.0;
    for (std::size_t i = 0; i < expect.coeffs().size(); ++i)
        err = std::max(err, std::abs(mid.coeffs()[i] - expect.coeffs()[i]));
    CHECK(err < 1e-15);
    auto near_one = experiments::initial_family(u0, 0.5, 1.0 - 1e-12);
    CHECK(std::sqrt(heis::sobolev2(near_one - q, 1)) < 1e-9);

    auto plus = cplx{0.8} * q;
    CHECK(experiments::initial_family(plus, 0.5, 0.9).coeffs() == plus.coeffs());
    CHECK_THROWS_AS(experiments::initial_family(u0, 0.6, 0.5), ConfigError);
    CHECK_THROWS_AS(experiments::initial_family(u0, 0.5, 1.0), ConfigError);
}

TEST_CASE("random perturbations") {
    FrequencyGrid grid = FrequencyGrid::cell_centered(1.0 / 16.0, 480);
    auto p = experiments::random_hardy_perturbation(grid, 0.02, 5);
    CHECK(std::sqrt(hardy::sobolev2(p, 1.0)) == doctest::Approx(0.02).epsilon(1e-12));
    CHECK(experiments::random_hardy_perturbation(grid, 0.02, 5).values() == p.values());
    CHECK(experiments::random_hardy_perturbation(grid, 0.02, 6).values() != p.values());

    RadialGridSpec spec;
    spec.k_max = 2;
    spec.n_sigma = 16;
    spec.sigma_max = 8.0;
    RadialSpectralGrid g(spec);
    auto w = experiments::random_w_perturbation(g, Truncation::none(), 0.1, 1);
    CHECK(std::sqrt(heis::sobolev2(w, 1)) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(heis::sobolev2(heis::split_plus(w).plus, 1) == 0.0);
    Truncation only_zero;
    only_zero.level_max = 0;
    only_zero.sigma_hi = 0.0;
    CHECK_THROWS_AS(experiments::random_w_perturbation(g, only_zero, 0.1, 1), ConfigError);
}

TEST_CASE("desk-scale stability runs stay in the tube") {
    experiments::LimitStabilityConfig c;
    c.grid = FrequencyGrid::cell_centered(1.0 / 16.0, 16 * 30);
    c.r_values = {0.05, 0.025};
    c.t_final = 1.0;
    c.dt = 5e-3;
    c.sample_every = 10;
    auto pts = experiments::limit_stability(c);
    REQUIRE(pts.size() == 2);
    for (const auto& p : pts) {
        CHECK_FALSE(p.tube_exit);
        CHECK(p.perturbation == doctest::Approx(p.r * p.r).epsilon(1e-10));
        CHECK(p.sup_distance <= p.perturbation * 1.5);
        CHECK(p.series.size() == p.track.anchor.size());
        CHECK(std::isfinite(p.series.back().dist_orbit));
    }
    CHECK(pts[1].sup_distance < pts[0].sup_distance);
    c.r_values = {};
    CHECK_THROWS_AS(experiments::limit_stability(c), ConfigError);
}
