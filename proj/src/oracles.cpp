#include "heisflow/oracles.hpp"

#include <algorithm>
#include <cmath>

#include <random>

#include "heisflow/fft.hpp"
#include "heisflow/heis.hpp"
#include "heisflow/modulation.hpp"
#include "heisflow/quadrature.hpp"

namespace heisflow::oracle {

HardyFunction cubic_projection_direct(const HardyFunction& u, bool include_outer_weight) {
    const auto& grid = u.grid();
    const auto n = static_cast<std::ptrdiff_t>(grid.size());
    auto s = grid.nodes();
    auto w = grid.weights();
    const double h = grid.spacing();
    HardyFunction p(grid);
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        cplx acc{};
        for (std::ptrdiff_t j = 0; j < n; ++j) {
            for (std::ptrdiff_t l = 0; l < n; ++l) {
                std::ptrdiff_t k = j + l - i;
                if (k < 0 || k >= n) continue;
                double wk = include_outer_weight ? w[k] / h : 1.0;
                acc += w[j] * w[l] * wk * u[j] * std::conj(u[k]) * u[l] / (s[i] + s[j] + s[k] + s[l]);
            }
        }
        p[i] = s[i] / kPi * acc;
    }
    return p;
}

double l4norm4_direct(const HardyFunction& u, double half_width, std::size_t points, double t_max) {
    quad::Rule tr = quad::uniform_panels(0.0, t_max, 16, 10);
    double ds = 2.0 * half_width / static_cast<double>(points - 1);
    double total = 0.0;
    for (std::size_t q = 0; q < tr.nodes.size(); ++q) {
        std::vector<cplx> z(points);
        for (std::size_t p = 0; p < points; ++p) z[p] = {-half_width + ds * p, tr.nodes[q]};
        auto vals = hardy::synthesize(u, z);
        double acc = 0.0;
        for (std::size_t p = 0; p < points; ++p) {
            double wgt = (p == 0 || p + 1 == points) ? 0.5 : 1.0;
            acc += wgt * std::pow(std::norm(vals[p]), 2);
        }
        total += tr.weights[q] * acc * ds;
    }
    return total;
}

namespace {

struct Pass {
    std::vector<cplx> p;
    double edge = 0.0;
};

// F(s_m, t) for s_m = -s_half + m ds via direct sums over the coefficient grid.
std::vector<cplx> synthesize_row(const HardyFunction& u, double t, double ds, std::size_t ns,
                                 double s_half) {
    std::vector<cplx> out(ns);
    auto sg = u.grid().nodes();
    auto wg = u.grid().weights();
    std::vector<cplx> damp(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) damp[j] = wg[j] * u[j] * std::exp(-sg[j] * t);
    const double norm = 1.0 / std::sqrt(2.0 * kPi);
    for (std::size_t m = 0; m < ns; ++m) {
        double s = -s_half + ds * static_cast<double>(m);
        // e^{i s sigma_j} by recurrence in j
        cplx rot = std::polar(1.0, s * u.grid().spacing());
        cplx e = std::polar(1.0, s * sg[0]);
        cplx acc{};
        for (std::size_t j = 0; j < u.size(); ++j) {
            acc += damp[j] * e;
            e *= rot;
        }
        out[m] = norm * acc;
    }
    return out;
}

Pass run_pass(const HardyFunction& u, const BruteforceOptions& o) {
    const auto ns = static_cast<std::size_t>(std::llround(2.0 * o.s_half / o.ds)) + 1;
    const auto nout = static_cast<std::size_t>(std::llround(2.0 * o.s_out_half / o.ds)) + 1;
    // kernel needed on offsets x = s' - s in [-(s_out_half + s_half), s_out_half + s_half]
    const std::size_t nker = ns + nout - 1;
    quad::Rule tr = quad::uniform_panels(0.0, o.t_max, o.t_panels, o.t_nodes);

    std::vector<cplx> p0g(nout);
    double gmax = 0.0, gedge = 0.0;
    for (std::size_t q = 0; q < tr.nodes.size(); ++q) {
        const double t = tr.nodes[q];
        auto row = synthesize_row(u, t, o.ds, ns, o.s_half);
        for (auto& f : row) f = std::norm(f) * f;
        for (const auto& g : row) gmax = std::max(gmax, std::abs(g));
        gedge = std::max({gedge, std::abs(row.front()), std::abs(row.back())});

        std::vector<cplx> ker(nker);
        const double x0 = -(o.s_out_half + o.s_half);
        for (std::size_t m = 0; m < nker; ++m) {
            cplx d{x0 + o.ds * static_cast<double>(m), o.t0 + t};
            ker[m] = -1.0 / (kPi * d * d);
        }
        // sum_s G(s) K(s' - s): output index s' = -s_out_half + m ds corresponds to
        // convolution index m + ns - 1.
        auto conv = fft::convolve(row, ker);
        const double wt = tr.weights[q] * o.ds;
        for (std::size_t m = 0; m < nout; ++m) p0g[m] += wt * conv[m + ns - 1];
    }

    const auto& grid = u.grid();
    Pass pass;
    pass.p.resize(grid.size());
    const double norm = 1.0 / std::sqrt(2.0 * kPi);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double tau = grid.node(i);
        cplx acc{};
        for (std::size_t m = 0; m < nout; ++m) {
            double sp = -o.s_out_half + o.ds * static_cast<double>(m);
            double wgt = (m == 0 || m + 1 == nout) ? 0.5 : 1.0;
            acc += wgt * p0g[m] * std::polar(1.0, -sp * tau);
        }
        pass.p[i] = std::exp(o.t0 * tau) * norm * o.ds * acc;
    }
    pass.edge = gmax > 0.0 ? gedge / gmax : 0.0;
    return pass;
}

}  // namespace

BruteforceResult bergman_project_bruteforce(const HardyFunction& u, const BruteforceOptions& opts) {
    Pass fine = run_pass(u, opts);
    BruteforceOptions coarse = opts;
    coarse.ds *= 2.0;
    coarse.t_nodes = std::max<std::size_t>(2, opts.t_nodes * 3 / 4);
    coarse.s_out_half *= 0.5;
    Pass rough = run_pass(u, coarse);

    BruteforceResult r{HardyFunction(u.grid(), fine.p), 0.0, fine.edge};
    for (std::size_t i = 0; i < u.size(); ++i)
        r.error_estimate = std::max(r.error_estimate, std::abs(fine.p[i] - rough.p[i]));
    return r;
}

}  // namespace heisflow::oracle

namespace heisflow::oracle {

namespace {

HardyFunction bump(const FrequencyGrid& grid, double center, double width) {
    HardyFunction f(grid);
    for (std::size_t j = 0; j < grid.size(); ++j) {
        double x = (grid.node(j) - center) / width;
        f[j] = cplx{1.0, 0.5} * std::exp(-0.5 * x * x);
    }
    return f;
}

double rel_max(const HardyFunction& a, const HardyFunction& b) {
    double err = 0.0, ref = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        err = std::max(err, std::abs(a[j] - b[j]));
        ref = std::max(ref, std::abs(b[j]));
    }
    return err / ref;
}

OracleCheck make(std::string name, double error, double tol) {
    return {std::move(name), error, tol, std::isfinite(error) && error <= tol};
}

}  // namespace

std::vector<OracleCheck> run_suite(const OracleTolerances& tol) {
    std::vector<OracleCheck> out;

    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    double kernel = 0.0;
    for (auto grid : {FrequencyGrid::cell_centered(0.1, 37), FrequencyGrid::trapezoid(0.05, 4.0, 41)}) {
        HardyFunction f(grid);
        for (std::size_t j = 0; j < grid.size(); ++j) f[j] = cplx{nd(rng), nd(rng)} * std::exp(-0.3 * grid.node(j));
        kernel = std::max(kernel, rel_max(hardy::cubic_projection(f), cubic_projection_direct(f, true)));
    }
    out.push_back(make("cubic_projection vs direct triple sum", kernel, tol.kernel));

    {
        auto grid = FrequencyGrid::cell_centered(1.0 / 16.0, 96);
        auto f = bump(grid, 2.0, 0.3);
        auto bf = bergman_project_bruteforce(f);
        out.push_back(make("cubic_projection vs Bergman brute force", rel_max(bf.p, hardy::cubic_projection(f)),
                           tol.bruteforce));
    }
    {
        auto grid = FrequencyGrid::cell_centered(1.0 / 16.0, 160);
        auto f = bump(grid, 2.0, 0.4);
        double direct = l4norm4_direct(f, 40.0, 801, 8.0);
        out.push_back(make("l4norm4 vs half-plane quadrature", std::abs(hardy::l4norm4(f) - direct) / direct, tol.l4));
    }
    {
        RadialGridSpec spec;
        spec.k_max = 3;
        spec.n_sigma = 24;
        spec.sigma_max = 3.0;
        RadialSpectralGrid g(spec);
        RadialField u(g);
        for (std::size_t k = 0; k <= g.k_max(); ++k)
            for (Sign s : {Sign::plus, Sign::minus})
                for (std::size_t m = 0; m < g.n_sigma(); ++m)
                    u.at(k, s, m) = cplx{nd(rng), nd(rng)} * std::exp(-std::abs(g.sigma(s, m)) - 0.5 * k);
        auto phys = heis::synthesize_physical(u);
        auto w = g.radial_weights();
        double acc = 0.0;
        for (std::size_t q = 0; q < w.size(); ++q)
            for (std::size_t p = 0; p < g.n_s(); ++p) acc += w[q] * std::norm(phys[q * g.n_s() + p]);
        acc *= g.s_spacing();
        double spectral = heis::sobolev2(u, 0);
        out.push_back(make("spectral vs collocation Parseval", std::abs(acc - spectral) / spectral, tol.parseval));
    }
    {
        RadialGridSpec spec;
        spec.k_max = 2;
        spec.n_sigma = 64;
        spec.sigma_max = 8.0;
        RadialSpectralGrid g(spec);
        auto f = hardy::ground_state_profile(g.hardy_grid());
        auto p_heis = heis::extract_hardy(heis::cubic_truncated(heis::embed_hardy(f, g), Truncation::none()));
        auto p_hardy = hardy::cubic_projection(f);
        double err = std::sqrt(hardy::sobolev2(p_heis - p_hardy, -1.0) / hardy::sobolev2(p_hardy, -1.0));
        out.push_back(make("Hardy vs Heisenberg nonlinearity on V0+", err, tol.hardy_heis));
    }
    {
        auto grid = FrequencyGrid::trapezoid(1e-3, 30.0, 1024);
        auto f = hardy::ground_state_profile(grid);
        HardyFunction target(grid);
        for (std::size_t j = 0; j < grid.size(); ++j) target[j] = grid.node(j) * f[j];
        out.push_back(make("cubic_projection(f_Q) = sigma f_Q", rel_max(hardy::cubic_projection(f), target), tol.identity));
    }
    {
        FrequencyGrid grid;
        auto q = hardy::ground_state_profile(grid);
        double worst = 0.0;
        for (double a : {0.5, 0.8, 1.0, 1.3, 2.0})
            for (double s : {-5.0, -1.5, 0.0, 0.7, 5.0})
                for (double th : {0.0, 1.0, 3.0, 5.5}) {
                    SymmetryElement x{s, th, a};
                    double exact = modulation::gap_closed_form(x);
                    double discrete = hardy::sobolev2(hardy::apply_symmetry(q, x) - q, 1.0);
                    if (exact > 1e-8) worst = std::max(worst, std::abs(discrete - exact) / exact);
                }
        out.push_back(make("gap closed form vs discrete symmetry action", worst, tol.gap));
    }
    return out;
}

}  // namespace heisflow::oracle
