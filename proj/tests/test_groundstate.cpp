#include <cmath>

#include "doctest.h"
#include "heisflow/evolution.hpp"
#include "heisflow/groundstate.hpp"

using namespace heisflow;

namespace {

RadialSpectralGrid small_grid() {
    RadialGridSpec spec;
    spec.k_max = 2;
    spec.n_sigma = 64;
    spec.sigma_max = 16.0;
    return RadialSpectralGrid(spec);
}

}  // namespace

TEST_CASE("limit ground state from a perturbed guess") {
    auto grid = FrequencyGrid::cell_centered(1.0 / 16.0, 16 * 30);
    auto f = hardy::ground_state_profile(grid);
    HardyFunction init(grid);
    for (std::size_t j = 0; j < grid.size(); ++j) {
        double s = grid.node(j);
        init[j] = f[j] * (1.0 + 0.1 * s * std::exp(-s));
    }
    PetviashviliOptions opts;
    auto res = groundstate::solve_limit(init, opts);
    CHECK(res.residual < 1e-10);
    // the discrete fixed points c(alpha) T_alpha f_Q have an O(h^2) alpha-dependent amplitude
    auto ref = OrbitReference::discrete(grid);
    CHECK(modulation::distance_to_orbit(res.profile, ref).distance < 1e-4);
}

TEST_CASE("Heisenberg ground state solves the stationary equation") {
    auto g = small_grid();
    PetviashviliOptions opts;
    opts.tol = 1e-9;
    auto res = groundstate::solve(0.9, groundstate::initial_guess(g), Truncation::none(), opts);
    CHECK(res.residual <= 1e-9);
    CHECK(res.residual == doctest::Approx(groundstate::residual(res.profile, 0.9, Truncation::none())));
    CHECK(res.stabilizer == doctest::Approx(1.0).epsilon(1e-6));

    // gauge: translation removed, -i phase at the peak
    auto q = res.profile;
    std::size_t peak = 0;
    for (std::size_t m = 0; m < g.n_sigma(); ++m)
        if (std::abs(q.at(0, Sign::plus, m)) > std::abs(q.at(0, Sign::plus, peak))) peak = m;
    CHECK(std::arg(q.at(0, Sign::plus, peak)) == doctest::Approx(-kPi / 2).epsilon(1e-9));

    // fixed point of the flow
    IntegratorConfig cfg;
    cfg.scheme = Scheme::etdrk4;
    cfg.dt = 1e-2;
    cfg.t_final = 0.5;
    cfg.sample_every = 10;
    auto traj = evolve_heis(q, 0.9, Truncation::none(), cfg);
    double worst = 0.0;
    for (const auto& u : traj.snapshots) worst = std::max(worst, std::sqrt(heis::sobolev2(u - q, 1)));
    CHECK(worst <= 10.0 * (res.residual + 1e-8) * std::sqrt(heis::sobolev2(q, 1)));
}

TEST_CASE("ground state solver input validation") {
    auto g = small_grid();
    CHECK_THROWS_AS(groundstate::solve(1.0, groundstate::initial_guess(g), Truncation::none()), ConfigError);
    CHECK_THROWS_AS(groundstate::solve(-0.1, groundstate::initial_guess(g), Truncation::none()), ConfigError);
    CHECK_THROWS_AS(groundstate::solve(0.9, RadialField(g), Truncation::none()), ConfigError);
    PetviashviliOptions opts;
    opts.max_iter = 2;
    opts.newton_switch = 0.0;
    CHECK_THROWS_AS(groundstate::solve(0.5, groundstate::initial_guess(g), Truncation::none(), opts),
                    NumericalError);
}

TEST_CASE("continuation sweep table") {
    auto g = small_grid();
    PetviashviliOptions opts;
    opts.tol = 1e-9;
    auto one = groundstate::continuation_sweep({0.9}, g, Truncation::none(), opts);
    REQUIRE(one.rows.size() == 1);
    CHECK_FALSE(one.dist_slope.has_value());
    CHECK_FALSE(one.r_slope.has_value());
    const auto& row = one.rows[0];
    CHECK(row.residual <= 1e-9);
    CHECK(row.r_beta_norm > 0.0);
    CHECK(row.dist_to_q >= row.r_beta_norm);
    CHECK(row.dist_to_q < 0.2 * row.qbeta_norm_h1);

    auto two = groundstate::continuation_sweep({0.9, 0.95}, g, Truncation::none(), opts);
    REQUIRE(two.dist_slope.has_value());
    CHECK(two.rows[1].dist_to_q < two.rows[0].dist_to_q);

    CHECK_THROWS_AS(groundstate::continuation_sweep({}, g, Truncation::none()), ConfigError);
    CHECK_THROWS_AS(groundstate::continuation_sweep({0.95, 0.9}, g, Truncation::none()), ConfigError);
}

TEST_CASE("log-log slope") {
    std::vector<double> x{0.1, 0.05, 0.01}, y;
    for (double v : x) y.push_back(3.0 * std::pow(v, 1.7));
    CHECK(groundstate::loglog_slope(x, y) == doctest::Approx(1.7).epsilon(1e-12));
    CHECK_THROWS_AS(groundstate::loglog_slope({1.0}, {1.0}), ConfigError);
}
