#include <cmath>
#include <random>

#include "doctest.h"
#include "heisflow/hardy.hpp"
#include "heisflow/oracles.hpp"

using namespace heisflow;

namespace {

HardyFunction random_function(const FrequencyGrid& grid, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    HardyFunction f(grid);
    for (std::size_t j = 0; j < grid.size(); ++j)
        f[j] = cplx{nd(rng), nd(rng)} * std::exp(-0.3 * grid.node(j));
    return f;
}

double rel_linf_vs_sigma_f(const HardyFunction& f) {
    auto p = hardy::cubic_projection(f);
    double err = 0.0, ref = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) {
        cplx target = f.grid().node(j) * f[j];
        err = std::max(err, std::abs(p[j] - target));
        ref = std::max(ref, std::abs(target));
    }
    return err / ref;
}

HardyFunction gaussian_bump(const FrequencyGrid& grid, double center, double width) {
    HardyFunction f(grid);
    for (std::size_t j = 0; j < grid.size(); ++j) {
        double x = (grid.node(j) - center) / width;
        f[j] = cplx{1.0, 0.5} * std::exp(-0.5 * x * x);
    }
    return f;
}

}  // namespace

TEST_CASE("frequency grids") {
    auto t = FrequencyGrid::trapezoid(1e-3, 30.0, 1024);
    CHECK(t.size() == 1024);
    CHECK(t.node(0) == doctest::Approx(1e-3));
    CHECK(t.node(1023) == 30.0);
    CHECK(t.weights()[0] == doctest::Approx(0.5 * t.spacing()));

    auto c = FrequencyGrid::cell_centered(0.25, 8);
    CHECK(c.node(0) == 0.125);
    CHECK(c.upper_edge() == 2.0);
    CHECK_THROWS_AS(FrequencyGrid::trapezoid(0.0, 1.0, 16), ConfigError);
    CHECK_THROWS_AS(FrequencyGrid::cell_centered(-1.0, 16), ConfigError);
}

TEST_CASE("ground state norms") {
    // Exact: (1/2) int 4 pi e^{-2 sigma} = pi for both functionals.
    auto grid = FrequencyGrid::cell_centered(1.0 / 256.0, 256 * 40);
    auto fq = hardy::ground_state_profile(grid);
    CHECK(hardy::sobolev2(fq, 1.0) == doctest::Approx(kPi).epsilon(1e-5));
    CHECK(hardy::l4norm4(fq) == doctest::Approx(kPi).epsilon(1e-5));
    // (1/2) int sigma^{-1}... diverges; sigma^1 moment: (1/2) 4 pi int sigma e^{-2 sigma} = pi/2
    CHECK(hardy::sobolev2(fq, 2.0) == doctest::Approx(kPi / 2).epsilon(1e-5));

    auto def = FrequencyGrid::trapezoid(1e-3, 30.0, 1024);
    auto fq2 = hardy::ground_state_profile(def);
    CHECK(std::abs(hardy::sobolev2(fq2, 1.0) / kPi - 1.0) < 1e-2);
    CHECK(std::abs(hardy::l4norm4(fq2) / kPi - 1.0) < 1e-2);
}

TEST_CASE("l4norm4 matches half-plane quadrature") {
    auto grid = FrequencyGrid::cell_centered(1.0 / 16.0, 160);
    auto f = gaussian_bump(grid, 2.0, 0.4);
    double direct = oracle::l4norm4_direct(f, 40.0, 801, 8.0);
    CHECK(hardy::l4norm4(f) == doctest::Approx(direct).epsilon(1e-8));
}

TEST_CASE("cubic kernel agrees with direct triple sum") {
    for (auto grid : {FrequencyGrid::cell_centered(0.1, 37), FrequencyGrid::trapezoid(0.05, 4.0, 41)}) {
        auto f = random_function(grid, 7);
        auto fast = hardy::cubic_projection(f);
        auto slow = oracle::cubic_projection_direct(f, true);
        double err = 0.0, ref = 0.0;
        for (std::size_t j = 0; j < f.size(); ++j) {
            err = std::max(err, std::abs(fast[j] - slow[j]));
            ref = std::max(ref, std::abs(slow[j]));
        }
        CHECK(err / ref < 1e-13);
        // l4norm4 is the pairing of the kernel with f in the weight w/(2 sigma).
        CHECK(hardy::l4norm4(f) == doctest::Approx(hardy::inner(fast, f, 0.0).real()).epsilon(1e-12));
    }
    // On cell-centred grids the outer weight is h, so both forms coincide.
    auto grid = FrequencyGrid::cell_centered(0.1, 30);
    auto f = random_function(grid, 3);
    auto a = oracle::cubic_projection_direct(f, true);
    auto b = oracle::cubic_projection_direct(f, false);
    for (std::size_t j = 0; j < f.size(); ++j) CHECK(std::abs(a[j] - b[j]) < 1e-12 * (1 + std::abs(a[j])));
}

TEST_CASE("cubic_projection(f_Q) = sigma f_Q at second order") {
    double prev = 0.0;
    for (int level = 0; level < 4; ++level) {
        double h = 1.0 / (16.0 * std::pow(2.0, level));
        auto grid = FrequencyGrid::cell_centered(h, static_cast<std::size_t>(std::llround(30.0 / h)));
        double err = rel_linf_vs_sigma_f(hardy::ground_state_profile(grid));
        if (level > 0) CHECK(prev / err > 3.5);
        prev = err;
    }
    auto def = FrequencyGrid::trapezoid(1e-3, 30.0, 1024);
    CHECK(rel_linf_vs_sigma_f(hardy::ground_state_profile(def)) < 1e-2);
}

TEST_CASE("cubic_projection is phase equivariant and supported on the grid") {
    auto grid = FrequencyGrid::cell_centered(0.05, 120);
    auto f = random_function(grid, 11);
    auto p = hardy::cubic_projection(f);
    cplx ph = std::polar(1.0, 0.7);
    auto q = hardy::cubic_projection(ph * f);
    for (std::size_t j = 0; j < f.size(); ++j) CHECK(std::abs(q[j] - ph * p[j]) < 1e-12);
    auto clipped = hardy::band_limit(p, grid.lower_edge(), grid.upper_edge());
    CHECK(clipped.values() == p.values());
}

TEST_CASE("Bergman brute force agrees with cubic_projection") {
    auto grid = FrequencyGrid::cell_centered(1.0 / 16.0, 96);
    auto f = gaussian_bump(grid, 2.0, 0.3);
    auto p = hardy::cubic_projection(f);
    auto bf = oracle::bergman_project_bruteforce(f);
    double err = 0.0, ref = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) {
        err = std::max(err, std::abs(p[j] - bf.p[j]));
        ref = std::max(ref, std::abs(p[j]));
    }
    MESSAGE("bruteforce rel err " << err / ref << " estimate " << bf.error_estimate / ref
                                  << " edge " << bf.edge_mass);
    CHECK(err / ref < 1e-2);
    CHECK(bf.error_estimate / ref < 1e-2);
    CHECK(bf.edge_mass < 1e-8);
}

TEST_CASE("symmetry group") {
    SymmetryElement x{0.7, 1.1, 1.6}, y{-0.4, 2.0, 0.8};
    auto e = compose(x, x.inverse());
    CHECK(e.s == doctest::Approx(0.0));
    CHECK(e.theta == doctest::Approx(0.0));
    CHECK(e.alpha == doctest::Approx(1.0));
    CHECK(SymmetryElement{0.0, 2.0 * kPi + 0.5, 1.0}.norm() == doctest::Approx(0.5));

    // T_{xy} Q = T_x T_y Q on the analytic orbit
    auto grid = FrequencyGrid::cell_centered(1.0 / 512.0, 512 * 40);
    auto lhs = hardy::transformed_ground_state(grid, compose(x, y));
    auto rhs = hardy::apply_symmetry(hardy::transformed_ground_state(grid, y), x);
    double err = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) err = std::max(err, std::abs(lhs[j] - rhs[j]));
    CHECK(err < 1e-6);

    // interpolated action matches the analytic orbit and is unitary
    auto fq = hardy::ground_state_profile(grid);
    for (double alpha : {0.5, 0.8, 1.0, 1.5, 2.0}) {
        SymmetryElement z{1.3, -0.4, alpha};
        auto g = hardy::apply_symmetry(fq, z);
        auto exact = hardy::transformed_ground_state(grid, z);
        double d = 0.0;
        for (std::size_t j = 0; j < grid.size(); ++j) d = std::max(d, std::abs(g[j] - exact[j]));
        CHECK(d < 1e-7);
    }
}

TEST_CASE("synthesize reproduces Q") {
    auto grid = FrequencyGrid::cell_centered(1.0 / 64.0, 64 * 40);
    auto fq = hardy::ground_state_profile(grid);
    std::vector<cplx> z{{0.0, 0.0}, {1.5, 0.5}, {-3.0, 2.0}};
    auto vals = hardy::synthesize(fq, z);
    for (std::size_t p = 0; p < z.size(); ++p) {
        cplx exact = std::sqrt(2.0) / (z[p] + cplx{0.0, 1.0});
        CHECK(std::abs(vals[p] - exact) < 1e-4);
    }
}

TEST_CASE("oracle suite") {
    auto checks = oracle::run_suite();
    CHECK(checks.size() == 7);
    for (const auto& c : checks) {
        INFO(c.name << ": " << c.error << " vs " << c.tolerance);
        CHECK(c.pass);
    }
    oracle::OracleTolerances strict;
    strict.gap = 1e-9;
    auto failing = oracle::run_suite(strict);
    CHECK_FALSE(failing.back().pass);
}
