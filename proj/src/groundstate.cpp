#include "heisflow/groundstate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gmres.hpp"

namespace heisflow::groundstate {

namespace {

// Translation s0 and phase such that f e^{i s0 sigma} e^{i phi} has flat phase equal to -pi/2 at its peak.
struct Gauge {
    double s0 = 0.0;
    cplx rot{1.0, 0.0};
};

Gauge find_gauge(const std::vector<cplx>& f, const std::vector<double>& sigma, double h) {
    Gauge gauge;
    cplx acc{};
    for (std::size_t m = 0; m + 1 < f.size(); ++m) acc += f[m + 1] * std::conj(f[m]);
    if (std::abs(acc) == 0.0) return gauge;
    gauge.s0 = std::arg(acc) / h;  // neighbour phase advance is -s0 h
    gauge.s0 = -gauge.s0;
    std::size_t peak = 0;
    for (std::size_t m = 0; m < f.size(); ++m)
        if (std::abs(f[m]) > std::abs(f[peak])) peak = m;
    cplx at_peak = f[peak] * std::polar(1.0, gauge.s0 * sigma[peak]);
    gauge.rot = cplx{0.0, -1.0} * std::conj(at_peak) / std::abs(at_peak);
    return gauge;
}

void check_stabilizer(double m, std::size_t it) {
    if (!std::isfinite(m) || m < 0.1 || m > 10.0) {
        std::ostringstream msg;
        msg << "Petviashvili: stabilizer " << m << " left [0.1, 10] at iteration " << it;
        throw NumericalError(msg.str());
    }
}

std::vector<double> to_real(const std::vector<cplx>& c) {
    std::vector<double> r(2 * c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        r[2 * i] = c[i].real();
        r[2 * i + 1] = c[i].imag();
    }
    return r;
}

void from_real(const std::vector<double>& r, std::vector<cplx>& c) {
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = {r[2 * i], r[2 * i + 1]};
}

// Newton iterations on Lambda g = N(g), each step solving
// (I - Lambda^{-1} N'(g)) d = -Lambda^{-1} (Lambda g - N(g)) by GMRES.
RadialField newton_polish(RadialField g, double beta, const Truncation& t,
                          const std::vector<double>& inv_lam, const PetviashviliOptions& opts) {
    const auto& grid = g.grid();
    std::vector<double> weight(2 * grid.size());
    for (std::size_t k = 0; k <= grid.k_max(); ++k)
        for (Sign s : {Sign::plus, Sign::minus})
            for (std::size_t m = 0; m < grid.n_sigma(); ++m) {
                std::size_t i = grid.index(k, s, m);
                double a = std::abs(grid.sigma(s, m));
                double w = grid.spacing() * kPi / (2.0 * a) * (2.0 * k + 1.0) * a;
                weight[2 * i] = weight[2 * i + 1] = w;
            }
    auto dot = [&](const detail::Vec& a, const detail::Vec& b) {
        double acc = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) acc += weight[i] * a[i] * b[i];
        return acc;
    };
    auto precond_residual = [&](const RadialField& x) {
        auto f = heis::apply_linear(x, beta) - heis::cubic_truncated(x, t);
        for (std::size_t i = 0; i < f.coeffs().size(); ++i) f.coeffs()[i] *= inv_lam[i];
        return f;
    };

    double res = residual(g, beta, t);
    for (std::size_t step = 0; step < opts.newton_steps && res > opts.tol; ++step) {
        heis::CubicJacobian jac(g, t);
        RadialField tmp(grid);
        auto op = [&](const detail::Vec& x) {
            from_real(x, tmp.coeffs());
            auto jv = jac.apply(tmp);
            detail::Vec out = x;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                cplx d = inv_lam[i] * jv.coeffs()[i];
                out[2 * i] -= d.real();
                out[2 * i + 1] -= d.imag();
            }
            return out;
        };
        auto rhs = to_real(precond_residual(g).coeffs());
        for (auto& x : rhs) x = -x;
        auto sol = detail::gmres(op, rhs, dot, 1e-10, 80, 800);

        RadialField delta(grid);
        from_real(sol.x, delta.coeffs());
        double step_len = 1.0;
        for (int ls = 0; ls < 8; ++ls, step_len *= 0.5) {
            RadialField trial = g + cplx{step_len} * delta;
            double r = residual(trial, beta, t);
            if (r < res) {
                g = std::move(trial);
                res = r;
                break;
            }
        }
        if (opts.monitor) opts.monitor(step, res, step_len);
    }
    return g;
}

// Log of the Hdot^1-weighted mean |sigma|; dilation by alpha shifts it by 2 log alpha.
double log_scale(const RadialField& u) {
    const auto& g = u.grid();
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k <= g.k_max(); ++k)
        for (Sign s : {Sign::plus, Sign::minus})
            for (std::size_t m = 0; m < g.n_sigma(); ++m) {
                double w = (2.0 * k + 1.0) * std::norm(u.at(k, s, m));
                num += w * std::abs(g.sigma(s, m));
                den += w;
            }
    return std::log(num / den);
}

// Aitken extrapolation of a geometrically converging scalar sequence.
// Returns false when the three samples do not look geometric.
bool aitken(double x0, double x1, double x2, double& limit) {
    double d1 = x1 - x0, d2 = x2 - x1;
    if (d1 == 0.0 || d1 * d2 <= 0.0) return false;
    double rho = d2 / d1;
    if (rho >= 0.999) return false;
    limit = x2 + d2 * rho / (1.0 - rho);
    return true;
}

}  // namespace

void fix_gauge(RadialField& u) {
    const auto& g = u.grid();
    std::vector<cplx> f(g.n_sigma());
    std::vector<double> sigma(g.n_sigma());
    for (std::size_t m = 0; m < g.n_sigma(); ++m) {
        f[m] = u.at(0, Sign::plus, m);
        sigma[m] = g.sigma(Sign::plus, m);
    }
    Gauge gauge = find_gauge(f, sigma, g.spacing());
    for (std::size_t k = 0; k <= g.k_max(); ++k)
        for (Sign s : {Sign::plus, Sign::minus})
            for (std::size_t m = 0; m < g.n_sigma(); ++m)
                u.at(k, s, m) *= gauge.rot * std::polar(1.0, gauge.s0 * g.sigma(s, m));
}

void fix_gauge(HardyFunction& f) {
    const auto& grid = f.grid();
    std::vector<double> sigma(grid.nodes().begin(), grid.nodes().end());
    Gauge gauge = find_gauge(f.values(), sigma, grid.spacing());
    for (std::size_t m = 0; m < f.size(); ++m) f[m] *= gauge.rot * std::polar(1.0, gauge.s0 * sigma[m]);
}

double residual(const RadialField& q, double beta, const Truncation& t) {
    auto lq = heis::apply_linear(q, beta);
    double denom = heis::sobolev2(lq, -1);
    if (denom == 0.0) return 0.0;
    return std::sqrt(heis::sobolev2(lq - heis::cubic_truncated(q, t), -1) / denom);
}

double limit_residual(const HardyFunction& f) {
    HardyFunction sf = f;
    for (std::size_t j = 0; j < f.size(); ++j) sf[j] *= f.grid().node(j);
    double denom = hardy::sobolev2(sf, -1.0);
    if (denom == 0.0) return 0.0;
    return std::sqrt(hardy::sobolev2(sf - hardy::cubic_projection(f), -1.0) / denom);
}

GroundStateResult solve(double beta, const RadialField& init, const Truncation& t,
                        const PetviashviliOptions& opts) {
    if (!(beta >= 0.0 && beta < 1.0)) throw ConfigError("groundstate: need 0 <= beta < 1");
    RadialField g = heis::truncate(init, t);
    if (heis::sobolev2(g, 1) == 0.0) throw ConfigError("groundstate: initial guess is zero");
    const auto& grid = g.grid();

    std::vector<double> inv_lam(grid.size());
    for (std::size_t k = 0; k <= grid.k_max(); ++k)
        for (Sign s : {Sign::plus, Sign::minus})
            for (std::size_t m = 0; m < grid.n_sigma(); ++m)
                inv_lam[grid.index(k, s, m)] = 1.0 / heis::linear_symbol(2 * k, s, grid.sigma(s, m), beta);

    GroundStateResult best;
    best.residual = INFINITY;
    std::size_t last_improvement = 0;
    std::vector<double> scales;
    for (std::size_t it = 1; it <= opts.max_iter; ++it) {
        if (opts.scale_extrapolation > 0 && it % opts.scale_extrapolation == 0) {
            scales.push_back(log_scale(g));
            double target = 0.0;
            if (scales.size() == 3) {
                if (aitken(scales[0], scales[1], scales[2], target)) {
                    double shift = std::clamp(target - scales[2], -1.0, 1.0);
                    g = heis::truncate(heis::apply_symmetry(g, {0.0, 0.0, std::exp(0.5 * shift)}), t);
                    scales.clear();
                    // the interpolated iterate is a fresh start for the stall check
                    last_improvement = it;
                } else {
                    scales.erase(scales.begin());
                }
            }
        }
        auto lg = heis::apply_linear(g, beta);
        auto n = heis::cubic_truncated(g, t);
        double num = heis::inner(lg, g, 0).real();
        double den = heis::inner(n, g, 0).real();
        if (!(den > 0.0)) throw NumericalError("Petviashvili: iterate collapsed to zero");
        double m = num / den;
        check_stabilizer(m, it);

        double res_den = heis::sobolev2(lg, -1);
        double res = std::sqrt(heis::sobolev2(lg - n, -1) / res_den);
        if (opts.monitor) opts.monitor(it, res, m);
        if (res < best.residual) {
            best.profile = g;
            best.residual = res;
            best.stabilizer = m;
            best.iterations = it - 1;
            last_improvement = it;
        }
        if (res <= opts.tol) break;
        if (it - last_improvement > opts.stall_window) break;

        if (res <= opts.newton_switch && it > 1) {
            g = newton_polish(g, beta, t, inv_lam, opts);
            double r = residual(g, beta, t);
            if (opts.monitor) opts.monitor(it + 1, r, 1.0);
            if (r < best.residual) {
                best.profile = g;
                best.residual = r;
                best.iterations = it;
            }
            break;
        }

        const double f = std::pow(m, 1.5);
        auto& c = g.coeffs();
        const auto& nc = n.coeffs();
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = f * inv_lam[i] * nc[i];
    }
    if (best.residual > opts.tol) {
        std::ostringstream msg;
        msg << "Petviashvili: stalled at residual " << best.residual << " (tol " << opts.tol << ")";
        throw NumericalError(msg.str());
    }
    fix_gauge(best.profile);
    best.residual = residual(best.profile, beta, t);
    return best;
}

LimitGroundStateResult solve_limit(const HardyFunction& init, const PetviashviliOptions& opts) {
    HardyFunction f = init;
    if (hardy::sobolev2(f, 1.0) == 0.0) throw ConfigError("groundstate: initial guess is zero");
    const auto& grid = f.grid();
    LimitGroundStateResult best;
    best.residual = INFINITY;
    std::size_t last_improvement = 0;
    for (std::size_t it = 1; it <= opts.max_iter; ++it) {
        auto p = hardy::cubic_projection(f);
        double num = hardy::sobolev2(f, 1.0);
        double den = hardy::inner(p, f, 0.0).real();
        if (!(den > 0.0)) throw NumericalError("Petviashvili: iterate collapsed to zero");
        double m = num / den;
        check_stabilizer(m, it);
        HardyFunction sf = f;
        for (std::size_t j = 0; j < f.size(); ++j) sf[j] *= grid.node(j);
        double res = std::sqrt(hardy::sobolev2(sf - p, -1.0) / hardy::sobolev2(sf, -1.0));
        if (opts.monitor) opts.monitor(it, res, m);
        if (res < best.residual) {
            best.profile = f;
            best.residual = res;
            best.stabilizer = m;
            best.iterations = it - 1;
            last_improvement = it;
        }
        if (res <= opts.tol) break;
        if (it - last_improvement > opts.stall_window) break;
        const double fac = std::pow(m, 1.5);
        for (std::size_t j = 0; j < f.size(); ++j) f[j] = fac * p[j] / grid.node(j);
    }
    if (best.residual > opts.tol) {
        std::ostringstream msg;
        msg << "Petviashvili: stalled at residual " << best.residual << " (tol " << opts.tol << ")";
        throw NumericalError(msg.str());
    }
    fix_gauge(best.profile);
    best.residual = limit_residual(best.profile);
    return best;
}

RadialField initial_guess(const RadialSpectralGrid& grid) {
    auto ref = OrbitReference::discrete(grid.hardy_grid());
    return heis::embed_hardy(ref.amplitude * hardy::ground_state_profile(grid.hardy_grid()), grid);
}

GroundStateTable continuation_sweep(const std::vector<double>& betas, const RadialSpectralGrid& grid,
                                    const Truncation& t, const PetviashviliOptions& opts) {
    if (betas.empty()) throw ConfigError("continuation_sweep: empty beta list");
    for (std::size_t i = 0; i < betas.size(); ++i) {
        if (!(betas[i] >= 0.0 && betas[i] < 1.0)) throw ConfigError("continuation_sweep: need 0 <= beta < 1");
        if (i > 0 && !(betas[i] > betas[i - 1]))
            throw ConfigError("continuation_sweep: betas must be strictly increasing");
    }
    const auto ref = OrbitReference::discrete(grid.hardy_grid());
    const double band_top = std::min(t.sigma_hi, grid.spacing() * static_cast<double>(grid.n_sigma()));
    const std::size_t k_top = std::min<std::size_t>(grid.k_max(), t.level_max / 2);

    GroundStateTable table;
    RadialField init = initial_guess(grid);
    for (double beta : betas) {
        auto res = solve(beta, init, t, opts);
        init = res.profile;
        const auto& q = res.profile;

        GroundStateRow row;
        row.beta = beta;
        row.residual = res.residual;
        row.stabilizer = res.stabilizer;
        row.iterations = res.iterations;
        row.qbeta_norm_h1 = std::sqrt(heis::sobolev2(q, 1));
        auto fit = modulation::distance_to_orbit(q, ref);
        row.dist_to_q = fit.distance;
        row.r_beta_norm = fit.w_norm;
        row.x_star = fit.plus.x_star;
        row.delta_qbeta_plus = kPi * modulation::delta_functional(heis::extract_hardy(q), ref);
        row.wave_energy = heis::energy(cplx{std::sqrt(1.0 - beta)} * q);

        // re-solve under a tighter cutoff (one mode fewer, 80% of the band) and compare
        Truncation tight = t;
        tight.level_max = k_top > 0 ? 2 * (k_top - 1) : 0;
        tight.sigma_hi = 0.8 * band_top;
        auto tight_res = solve(beta, heis::truncate(q, tight), tight, opts);
        double tight_dist = modulation::distance_to_orbit(tight_res.profile, ref).distance;
        row.truncation_sensitivity = std::abs(tight_dist - row.dist_to_q) / row.dist_to_q;
        row.truncation_dominated = row.truncation_sensitivity > 0.1;
        if (row.truncation_dominated) {
            std::ostringstream msg;
            msg << "continuation_sweep: beta=" << beta << " distance to Q moves by "
                << 100.0 * row.truncation_sensitivity << "% under a tighter truncation";
            warn(msg.str());
        }
        table.rows.push_back(row);
        table.profiles.push_back(q);
    }
    if (table.rows.size() >= 2) {
        std::vector<double> x, d, r;
        for (const auto& row : table.rows) {
            x.push_back(1.0 - row.beta);
            d.push_back(row.dist_to_q);
            r.push_back(row.r_beta_norm);
        }
        table.dist_slope = loglog_slope(x, d);
        table.r_slope = loglog_slope(x, r);
    }
    return table;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw ConfigError("loglog_slope: need >= 2 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace heisflow::groundstate
