#include <cmath>
#include <random>

#include "doctest.h"
#include "heisflow/evolution.hpp"

using namespace heisflow;

namespace {

HardyFunction bump(const FrequencyGrid& grid, double center, double width, cplx amp) {
    HardyFunction f(grid);
    for (std::size_t j = 0; j < grid.size(); ++j) {
        double x = (grid.node(j) - center) / width;
        f[j] = amp * std::exp(-0.5 * x * x);
    }
    return f;
}

double rel_h12(const HardyFunction& a, const HardyFunction& b) {
    return std::sqrt(hardy::sobolev2(a - b, 1.0) / hardy::sobolev2(b, 1.0));
}

double max_rel_drift(const std::vector<SeriesRow>& s, double SeriesRow::*field) {
    double d = 0.0;
    for (const auto& r : s) d = std::max(d, std::abs(r.*field - s.front().*field) / std::abs(s.front().*field));
    return d;
}

RadialSpectralGrid heis_grid() {
    RadialGridSpec spec;
    spec.k_max = 3;
    spec.n_sigma = 24;
    spec.sigma_max = 3.0;
    spec.nodes_per_panel = 12;
    return RadialSpectralGrid(spec);
}

RadialField perturbed_q(const RadialSpectralGrid& g, unsigned seed, double eps) {
    auto u = heis::embed_hardy(hardy::ground_state_profile(g.hardy_grid()), g);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    for (std::size_t k = 0; k <= g.k_max(); ++k)
        for (Sign s : {Sign::plus, Sign::minus})
            for (std::size_t m = 0; m < g.n_sigma(); ++m)
                u.at(k, s, m) += eps * cplx{nd(rng), nd(rng)} * std::exp(-std::abs(g.sigma(s, m)));
    return u;
}

}  // namespace

TEST_CASE("limit flow: Q travels") {
    auto grid = FrequencyGrid::cell_centered(1.0 / 64.0, 64 * 24);
    auto fq = hardy::ground_state_profile(grid);
    IntegratorConfig cfg{Scheme::rk4, 1e-2, 1.0, 100};
    auto traj = evolve_limit(fq, cfg);
    HardyFunction exact = fq;
    for (std::size_t j = 0; j < grid.size(); ++j) exact[j] *= std::polar(1.0, -grid.node(j));
    CHECK(rel_h12(traj.snapshots.back(), exact) < 1e-4);
    auto diag = dt_norm_diagnostic(traj.series);
    CHECK(std::abs(diag.ratio.back() / diag.ratio.front() - 1.0) < 1e-3);
}

TEST_CASE("limit flow: zero stays zero") {
    auto grid = FrequencyGrid::cell_centered(0.1, 50);
    auto traj = evolve_limit(HardyFunction(grid), {Scheme::rk4, 0.1, 1.0, 5});
    for (const auto& s : traj.snapshots)
        for (auto c : s.values()) CHECK(c == cplx{});
    CHECK(dt_norm_diagnostic(traj.series).sup == 0.0);
}

TEST_CASE("limit flow: conservation at fourth order, time reversal") {
    auto grid = FrequencyGrid::cell_centered(1.0 / 16.0, 16 * 20);
    auto u0 = hardy::ground_state_profile(grid) + bump(grid, 1.5, 0.3, {0.2, 0.1});
    double prev_p = 0.0, prev_e = 0.0;
    for (double dt : {0.04, 0.02}) {
        auto traj = evolve_limit(u0, {Scheme::rk4, dt, 4.0, 10});
        double dp = max_rel_drift(traj.series, &SeriesRow::momentum);
        double de = max_rel_drift(traj.series, &SeriesRow::energy);
        if (prev_p > 0.0) {
            CHECK(prev_p / dp > 15.0);
            CHECK(prev_e / de > 15.0);
        }
        prev_p = dp;
        prev_e = de;
    }
    IntegratorConfig fwd{Scheme::rk4, 0.02, 2.0, 100};
    auto there = evolve_limit(u0, fwd);
    IntegratorConfig bwd = fwd;
    bwd.backward = true;
    auto back = evolve_limit(there.snapshots.back(), bwd);
    CHECK(rel_h12(back.snapshots.back(), u0) < 1e-5);
}

TEST_CASE("limit flow: blow-up is reported") {
    auto grid = FrequencyGrid::cell_centered(0.5, 40);
    auto u0 = 30.0 * hardy::ground_state_profile(grid);
    CHECK_THROWS_AS(evolve_limit(u0, {Scheme::rk4, 0.5, 10.0, 1}), NumericalError);
    CHECK_THROWS_AS(evolve_limit(u0, {Scheme::rk4, 0.3, 1.0, 1}), ConfigError);
}

TEST_CASE("Heisenberg flow: conservation, closure, reversal") {
    auto g = heis_grid();
    auto t = Truncation::level(6);
    auto u0 = heis::truncate(perturbed_q(g, 4, 0.05), t);
    const double gamma = 0.9;
    for (Scheme scheme : {Scheme::ifrk4, Scheme::etdrk4}) {
    double prev_p = 0.0, prev_e = 0.0;
    for (double dt : {0.025, 0.0125}) {
        auto traj = evolve_heis(u0, gamma, t, {scheme, dt, 2.0, static_cast<std::size_t>(std::llround(0.1 / dt))});
        double dp = max_rel_drift(traj.series, &SeriesRow::momentum);
        double de = max_rel_drift(traj.series, &SeriesRow::energy);
        MESSAGE("dt " << dt << " momentum drift " << dp << " energy drift " << de);
        if (prev_p > 0.0) {
            CHECK(prev_p / dp > 15.0);
            CHECK(prev_e / de > 15.0);
        }
        prev_p = dp;
        prev_e = de;
        for (const auto& s : traj.snapshots) CHECK(heis::is_truncated(s, t));
    }
    IntegratorConfig fwd{scheme, 0.01, 1.0, 100};
    auto there = evolve_heis(u0, gamma, t, fwd);
    IntegratorConfig bwd = fwd;
    bwd.backward = true;
    auto back = evolve_heis(there.snapshots.back(), gamma, t, bwd);
    double err = std::sqrt(heis::sobolev2(back.snapshots.back() - u0, 1) / heis::sobolev2(u0, 1));
    CHECK(err < 1e-6);
    }

    auto zero = evolve_heis(RadialField(g), gamma, t, {Scheme::ifrk4, 0.1, 0.5, 1});
    for (auto c : zero.snapshots.back().coeffs()) CHECK(c == cplx{});
}

TEST_CASE("Heisenberg flow: the three schemes agree when not stiff") {
    auto g = heis_grid();
    auto t = Truncation::level(6);
    auto u0 = heis::truncate(perturbed_q(g, 8, 0.05), t);
    auto a = evolve_heis(u0, 0.0, t, {Scheme::rk4, 0.005, 0.5, 100});
    auto b = evolve_heis(u0, 0.0, t, {Scheme::ifrk4, 0.005, 0.5, 100});
    double err = std::sqrt(heis::sobolev2(a.snapshots.back() - b.snapshots.back(), 1) /
                           heis::sobolev2(u0, 1));
    CHECK(err < 1e-7);
    auto c = evolve_heis(u0, 0.0, t, {Scheme::etdrk4, 0.005, 0.5, 100});
    CHECK(std::sqrt(heis::sobolev2(c.snapshots.back() - b.snapshots.back(), 1) / heis::sobolev2(u0, 1)) < 1e-7);
    CHECK_THROWS_AS(evolve_heis(u0, 0.99, t, {Scheme::rk4, 0.1, 1.0, 1}), ConfigError);
    CHECK_THROWS_AS(evolve_heis(perturbed_q(g, 1, 0.1), 0.5, Truncation::level(2), {Scheme::ifrk4, 0.1, 1.0, 1}),
                    ConfigError);
}
