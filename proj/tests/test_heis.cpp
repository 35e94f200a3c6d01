#include <cmath>
#include <random>

#include "doctest.h"
#include "heisflow/heis.hpp"

using namespace heisflow;

namespace {

RadialSpectralGrid small_grid() {
    RadialGridSpec spec;
    spec.k_max = 3;
    spec.n_sigma = 24;
    spec.sigma_max = 3.0;
    return RadialSpectralGrid(spec);
}

RadialField random_field(const RadialSpectralGrid& g, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    RadialField u(g);
    for (std::size_t k = 0; k <= g.k_max(); ++k)
        for (Sign s : {Sign::plus, Sign::minus})
            for (std::size_t m = 0; m < g.n_sigma(); ++m) {
                double a = std::abs(g.sigma(s, m));
                u.at(k, s, m) = cplx{nd(rng), nd(rng)} * std::exp(-a - 0.5 * k);
            }
    return u;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("linear symbol") {
    CHECK(heis::linear_symbol(0, Sign::plus, 1.7, 0.9) == doctest::Approx(1.7));
    CHECK(heis::linear_symbol(1, Sign::plus, 1.0, 0.5) == doctest::Approx(3.0));
    CHECK(heis::linear_symbol(0, Sign::minus, -1.0, 0.5) == doctest::Approx(3.0));
    CHECK_THROWS_AS(heis::linear_symbol(0, Sign::plus, 1.0, 1.0), ConfigError);
    // radial mode k = 1 is level 2
    CHECK(heis::linear_symbol(2, Sign::plus, 1.0, 0.0) == doctest::Approx(3.0));
}

TEST_CASE("radial quadrature reproduces mode orthogonality") {
    RadialSpectralGrid g;  // defaults
    auto w = g.radial_weights();
    double worst = 0.0;
    for (std::size_t m : {std::size_t{0}, std::size_t{1}, g.n_sigma() / 2, g.n_sigma() - 1}) {
        double a = std::abs(g.sigma(Sign::plus, m));
        for (std::size_t k = 0; k <= g.k_max(); ++k)
            for (std::size_t k2 = 0; k2 <= g.k_max(); ++k2) {
                double acc = 0.0;
                for (std::size_t q = 0; q < w.size(); ++q) acc += w[q] * g.psi(q, k, m) * g.psi(q, k2, m);
                double exact = k == k2 ? kPi / (2.0 * a) : 0.0;
                worst = std::max(worst, std::abs(acc - exact) * 2.0 * a / kPi);
            }
    }
    MESSAGE("orthogonality error " << worst << " with " << w.size() << " radial nodes");
    CHECK(worst < 1e-10);
}

TEST_CASE("Laguerre modes are eigenfunctions of the radial symbol") {
    // (1/4)(psi'' + psi'/r) - r^2 sigma^2 psi = -(2k+1)|sigma| psi, checked by central differences
    auto psi = [](std::size_t k, double sigma, double r) {
        double x = 2.0 * sigma * r * r;
        double l0 = 1.0, l1 = 1.0 - x;
        if (k == 0) return std::exp(-0.5 * x);
        for (std::size_t j = 1; j < k; ++j) {
            double l2 = ((2.0 * j + 1.0 - x) * l1 - j * l0) / (j + 1.0);
            l0 = l1;
            l1 = l2;
        }
        return l1 * std::exp(-0.5 * x);
    };
    for (std::size_t k : {0, 2, 5}) {
        double sigma = 0.7, r = 0.9;
        double prev = 0.0;
        for (int level = 0; level < 3; ++level) {
            double dr = 1e-2 / std::pow(2.0, level);
            double p0 = psi(k, sigma, r), pp = psi(k, sigma, r + dr), pm = psi(k, sigma, r - dr);
            double lap = (pp - 2 * p0 + pm) / (dr * dr) + (pp - pm) / (2 * dr * r);
            double err = std::abs(0.25 * lap - r * r * sigma * sigma * p0 + (2.0 * k + 1.0) * sigma * p0);
            if (level > 0) CHECK(prev / err > 3.5);
            prev = err;
        }
    }
}

TEST_CASE("Parseval between spectral and collocation norms") {
    auto g = small_grid();
    auto u = random_field(g, 5);
    auto phys = heis::synthesize_physical(u);
    auto w = g.radial_weights();
    double acc = 0.0;
    for (std::size_t q = 0; q < w.size(); ++q)
        for (std::size_t p = 0; p < g.n_s(); ++p) acc += w[q] * std::norm(phys[q * g.n_s() + p]);
    acc *= g.s_spacing();
    CHECK(rel(acc, heis::sobolev2(u, 0)) < 1e-6);
}

TEST_CASE("truncation and split") {
    auto g = small_grid();
    auto u = random_field(g, 9);
    auto t = Truncation::level(2);
    auto tu = heis::truncate(u, t);
    CHECK(heis::truncate(tu, t).coeffs() == tu.coeffs());
    CHECK(heis::is_truncated(tu, t));
    CHECK(heis::sobolev2(tu, 1) <= heis::sobolev2(u, 1));
    auto v = random_field(g, 10);
    cplx a = heis::inner(heis::truncate(u, t), v, 1), b = heis::inner(u, heis::truncate(v, t), 1);
    CHECK(std::abs(a - b) < 1e-12 * std::abs(a));

    double prev = 0.0;
    for (std::size_t n = 1; n <= 6; ++n) {
        double val = heis::sobolev2(heis::truncate(u, n), 1);
        CHECK(val >= prev);
        prev = val;
    }

    auto sp = heis::split_plus(u);
    for (int j = -1; j <= 2; ++j) {
        CHECK(rel(heis::sobolev2(sp.plus, j) + heis::sobolev2(sp.rest, j), heis::sobolev2(u, j)) < 1e-12);
        CHECK(std::abs(heis::inner(sp.plus, sp.rest, j)) == 0.0);
    }
    CHECK((sp.plus + sp.rest).coeffs() == u.coeffs());
}

TEST_CASE("H2 bound for truncated fields") {
    RadialGridSpec spec;
    spec.k_max = 4;
    spec.n_sigma = 40;
    spec.sigma_max = 5.0;
    RadialSpectralGrid g(spec);
    for (std::size_t n : {2, 3, 4, 5}) {
        auto v = heis::truncate(random_field(g, 20 + n), n);
        double ds = heis::abs_momentum(v), h2 = heis::h2_norm2(v);
        double nd = static_cast<double>(n);
        CHECK(ds <= h2);
        CHECK(h2 <= nd * (nd * nd + 2 * nd + 2) * ds);
    }
}

TEST_CASE("embed and extract") {
    RadialSpectralGrid g;
    auto f = hardy::ground_state_profile(g.hardy_grid());
    auto u = heis::embed_hardy(f, g);
    CHECK(heis::extract_hardy(u).values() == f.values());
    CHECK(heis::momentum(u) == doctest::Approx(kPi * kPi).epsilon(0.02));
    CHECK(rel(heis::sobolev2(u, 1), kPi * hardy::sobolev2(f, 1.0)) < 1e-12);
    auto z = heis::embed_hardy(HardyFunction(g.hardy_grid()), g);
    CHECK(heis::momentum(z) == 0.0);
    CHECK(heis::energy_gamma(z, 0.5) == 0.0);
}

TEST_CASE("collocation nonlinearity matches the Hardy kernel on V0+") {
    RadialGridSpec spec;
    spec.k_max = 2;
    spec.n_sigma = 64;
    spec.sigma_max = 8.0;
    RadialSpectralGrid g(spec);
    auto f = hardy::ground_state_profile(g.hardy_grid());
    auto u = heis::embed_hardy(f, g);
    auto n = heis::cubic_truncated(u, Truncation::none());
    auto p_heis = heis::extract_hardy(n);
    auto p_hardy = hardy::cubic_projection(f);
    auto diff = p_heis - p_hardy;
    double err = std::sqrt(hardy::sobolev2(diff, -1.0) / hardy::sobolev2(p_hardy, -1.0));
    MESSAGE("Hardy vs Heisenberg nonlinearity rel Hdot^-1 " << err);
    CHECK(err < 1e-8);
}

TEST_CASE("collocation nonlinearity is a gradient") {
    auto g = small_grid();
    auto u = random_field(g, 31);
    auto v = random_field(g, 32);
    double l4 = 0.0;
    auto n = heis::cubic_truncated(u, Truncation::none(), &l4);
    CHECK(rel(l4, heis::l4norm4(u)) < 1e-12);
    CHECK(rel(heis::inner(n, u, 0).real(), l4) < 1e-12);
    double eps = 1e-5;
    double fd = (heis::l4norm4(u + cplx{eps} * v) - heis::l4norm4(u - cplx{eps} * v)) / (2 * eps);
    CHECK(rel(fd, 4.0 * heis::inner(n, v, 0).real()) < 1e-7);
    auto zero = heis::cubic_truncated(RadialField(g), Truncation::none());
    for (auto c : zero.coeffs()) CHECK(c == cplx{});
}

TEST_CASE("aliasing guard") {
    RadialGridSpec spec;
    spec.n_sigma = 256;
    spec.n_s = 512;
    CHECK_THROWS_AS(RadialSpectralGrid{spec}, ConfigError);
}
