#include "heisflow/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace heisflow::experiments {

namespace {

// 2 e^{-x/2} L_n(x) at x = 2 sigma for n < modes, by the three-term recurrence.
std::vector<double> laguerre_functions(double sigma, std::size_t modes) {
    std::vector<double> out(modes);
    const double x = 2.0 * sigma;
    double lm1 = 0.0, l = 1.0;
    for (std::size_t n = 0; n < modes; ++n) {
        out[n] = 2.0 * std::exp(-sigma) * l;
        double next = ((2.0 * n + 1.0 - x) * l - n * lm1) / (n + 1.0);
        lm1 = l;
        l = next;
    }
    return out;
}

void check_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(what) + " must be positive");
}

double relative_drift(const std::vector<SeriesRow>& series, double SeriesRow::*field) {
    if (series.empty()) return 0.0;
    const double ref = series.front().*field;
    double worst = 0.0;
    for (const auto& row : series) worst = std::max(worst, std::abs(row.*field - ref));
    return worst / std::max(std::abs(ref), 1e-300);
}

IntegratorConfig integrator(Scheme scheme, double dt, double t_final, std::size_t every) {
    check_positive(dt, "dt");
    check_positive(t_final, "t_final");
    if (every == 0) throw ConfigError("sample_every must be positive");
    IntegratorConfig c;
    c.scheme = scheme;
    c.dt = dt;
    c.t_final = t_final;
    c.sample_every = every;
    return c;
}

template <class Traj, class Track>
void fill_point(StabilityPoint& pt, const Traj& traj, Track&& track, double scale) {
    pt.series = traj.series;
    pt.momentum_drift = relative_drift(traj.series, &SeriesRow::momentum);
    pt.energy_drift = relative_drift(traj.series, &SeriesRow::energy);
    for (const auto& row : traj.series)
        if (std::isfinite(row.w_norm)) pt.sup_w = std::max(pt.sup_w, row.w_norm);
    try {
        pt.track = track();
        for (std::size_t i = 0; i < pt.series.size(); ++i) pt.series[i].dist_orbit = scale * pt.track.distance[i];
        pt.initial_distance = scale * pt.track.distance.front();
        pt.sup_distance = scale * pt.track.sup_distance;
        pt.sup_jump = pt.track.sup_jump;
        pt.anchors = pt.track.anchor_id.empty() ? 0 : pt.track.anchor_id.back() + 1;
    } catch (const NumericalError& e) {
        pt.tube_exit = true;
        pt.failure = e.what();
    }
}

}  // namespace

HardyFunction random_hardy_perturbation(const FrequencyGrid& grid, double size, std::uint64_t seed,
                                        std::size_t modes) {
    if (!(size >= 0.0)) throw ConfigError("random_hardy_perturbation: size must be >= 0");
    if (modes == 0) throw ConfigError("random_hardy_perturbation: need modes > 0");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::vector<cplx> c(modes);
    for (auto& x : c) x = {normal(rng), normal(rng)};
    HardyFunction p(grid);
    for (std::size_t j = 0; j < grid.size(); ++j) {
        auto l = laguerre_functions(grid.node(j), modes);
        for (std::size_t n = 0; n < modes; ++n) p[j] += c[n] * l[n];
    }
    double norm = std::sqrt(hardy::sobolev2(p, 1.0));
    if (norm == 0.0) throw NumericalError("random_hardy_perturbation: degenerate draw");
    p *= cplx{size / norm};
    return p;
}

RadialField random_w_perturbation(const RadialSpectralGrid& grid, const Truncation& t, double size,
                                  std::uint64_t seed, std::size_t modes) {
    if (!(size >= 0.0)) throw ConfigError("random_w_perturbation: size must be >= 0");
    if (modes == 0) throw ConfigError("random_w_perturbation: need modes > 0");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    RadialField w(grid);
    for (std::size_t k = 0; k <= grid.k_max(); ++k)
        for (Sign s : {Sign::plus, Sign::minus}) {
            if (k == 0 && s == Sign::plus) continue;
            std::vector<cplx> c(modes);
            for (auto& x : c) x = {normal(rng), normal(rng)};
            for (std::size_t m = 0; m < grid.n_sigma(); ++m) {
                double a = std::abs(grid.sigma(s, m));
                auto l = laguerre_functions(a, modes);
                cplx v{};
                for (std::size_t n = 0; n < modes; ++n) v += c[n] * l[n];
                w.at(k, s, m) = a * v;
            }
        }
    w = heis::truncate(w, t);
    double norm = std::sqrt(heis::sobolev2(w, 1));
    if (norm == 0.0) throw ConfigError("random_w_perturbation: truncation leaves no W modes");
    w *= cplx{size / norm};
    return w;
}

RadialField initial_family(const RadialField& u0, double beta, double gamma) {
    if (!(beta >= 0.0 && beta < 1.0)) throw ConfigError("initial_family: need 0 <= beta < 1");
    if (!(gamma >= beta && gamma < 1.0)) throw ConfigError("initial_family: need beta <= gamma < 1");
    auto split = heis::split_plus(u0);
    bool in_plus = std::all_of(split.rest.coeffs().begin(), split.rest.coeffs().end(),
                               [](cplx z) { return z == cplx{}; });
    if (in_plus || gamma == beta) return u0;
    const auto& g = u0.grid();
    auto q = heis::embed_hardy(hardy::ground_state_profile(g.hardy_grid()), g);
    const double a = (1.0 - gamma) / (1.0 - beta);
    const double b = (gamma - beta) / (1.0 - beta);
    return cplx{a} * u0 + cplx{b} * q;
}

std::vector<StabilityPoint> limit_stability(const LimitStabilityConfig& cfg) {
    if (cfg.r_values.empty()) throw ConfigError("limit_stability: empty r list");
    for (double r : cfg.r_values) check_positive(r, "r");
    check_positive(cfg.tube_factor, "tube_factor");
    const auto icfg = integrator(Scheme::rk4, cfg.dt, cfg.t_final, cfg.sample_every);

    auto mod = cfg.modulation;
    mod.reference = OrbitReference::discrete(cfg.grid);
    const auto q = mod.reference.amplitude * hardy::ground_state_profile(cfg.grid);
    const double scale = std::sqrt(kPi);  // Hardy -> Hdot^1(H^1)

    std::vector<StabilityPoint> out(cfg.r_values.size());
    parallel_for(out.size(), cfg.workers, [&](std::size_t i) {
        const double r = cfg.r_values[i];
        auto& pt = out[i];
        pt.r = r;
        pt.threshold = cfg.tube_factor * r;
        auto p = random_hardy_perturbation(cfg.grid, r * r / scale, cfg.seed, cfg.modes);
        pt.perturbation = scale * std::sqrt(hardy::sobolev2(p, 1.0));
        auto traj = evolve_limit(q + p, icfg);
        fill_point(pt, traj, [&] { return modulation::track_modulation(traj, pt.threshold / scale, mod); }, scale);
    });
    return out;
}

HeisStabilityResult heis_stability(const HeisStabilityConfig& cfg) {
    if (cfg.r_values.empty()) throw ConfigError("heis_stability: empty r list");
    for (double r : cfg.r_values) check_positive(r, "r");
    check_positive(cfg.tube_factor, "tube_factor");
    if (!(cfg.beta >= 0.0 && cfg.beta < 1.0)) throw ConfigError("heis_stability: need 0 <= beta < 1");
    const auto icfg = integrator(cfg.scheme, cfg.dt, cfg.t_final, cfg.sample_every);

    RadialSpectralGrid grid(cfg.grid);
    HeisStabilityResult res;
    res.ground_state = groundstate::solve(cfg.beta, groundstate::initial_guess(grid), Truncation::none(), cfg.solver);
    const auto& q = res.ground_state.profile;

    res.points.resize(cfg.r_values.size());
    parallel_for(res.points.size(), cfg.workers, [&](std::size_t i) {
        const double r = cfg.r_values[i];
        auto& pt = res.points[i];
        pt.r = r;
        pt.threshold = cfg.tube_factor * r;
        RadialField p;
        if (cfg.in_v0_plus) {
            p = heis::embed_hardy(random_hardy_perturbation(grid.hardy_grid(), r * r / std::sqrt(kPi), cfg.seed), grid);
        } else {
            const double half = std::sqrt(1.0 - cfg.beta) * r / std::sqrt(2.0);
            p = heis::embed_hardy(random_hardy_perturbation(grid.hardy_grid(), half / std::sqrt(kPi), cfg.seed), grid) +
                random_w_perturbation(grid, Truncation::none(), half, cfg.seed + 1);
        }
        pt.perturbation = std::sqrt(heis::sobolev2(p, 1));
        auto traj = evolve_heis(q + p, cfg.beta, Truncation::none(), icfg);
        fill_point(pt, traj, [&] { return modulation::track_modulation(traj, q, pt.threshold, cfg.modulation); }, 1.0);
    });
    return res;
}

TrappingResult w_trapping(const TrappingConfig& cfg) {
    if (cfg.gammas.empty()) throw ConfigError("w_trapping: empty gamma list");
    for (std::size_t i = 0; i < cfg.gammas.size(); ++i) {
        double g = cfg.gammas[i];
        if (!(g >= 0.0 && g < 1.0)) throw ConfigError("w_trapping: gammas must lie in [0, 1)");
        if (i > 0 && !(g > cfg.gammas[i - 1])) throw ConfigError("w_trapping: gammas must increase");
    }
    if (!(cfg.plus_size >= 0.0 && cfg.w_size >= 0.0)) throw ConfigError("w_trapping: sizes must be >= 0");
    const auto icfg = integrator(Scheme::etdrk4, cfg.dt, cfg.t_final, cfg.sample_every);

    RadialSpectralGrid grid(cfg.grid);
    const auto pplus =
        heis::embed_hardy(random_hardy_perturbation(grid.hardy_grid(), cfg.plus_size / std::sqrt(kPi), cfg.seed), grid);
    const auto w = random_w_perturbation(grid, Truncation::none(), cfg.w_size, cfg.seed + 1);

    // continuation in gamma is sequential; the flows are independent
    std::vector<GroundStateResult> states;
    RadialField guess = groundstate::initial_guess(grid);
    for (double g : cfg.gammas) {
        states.push_back(groundstate::solve(g, guess, Truncation::none(), cfg.solver));
        guess = states.back().profile;
    }

    TrappingResult out;
    out.rows.resize(cfg.gammas.size());
    parallel_for(out.rows.size(), cfg.workers, [&](std::size_t i) {
        const double g = cfg.gammas[i];
        auto& row = out.rows[i];
        row.gamma = g;
        row.residual = states[i].residual;
        auto u0 = states[i].profile + pplus + cplx{std::sqrt(1.0 - g)} * w;
        auto traj = evolve_heis(u0, g, Truncation::none(), icfg);
        row.w0 = traj.series.front().w_norm;
        for (const auto& s : traj.series) row.sup_w = std::max(row.sup_w, s.w_norm);
        row.ratio = row.sup_w / std::sqrt(1.0 - g);
        row.energy_drift = relative_drift(traj.series, &SeriesRow::energy);
    });
    double lo = INFINITY, hi = 0.0;
    for (const auto& r : out.rows) {
        lo = std::min(lo, r.ratio);
        hi = std::max(hi, r.ratio);
    }
    out.spread = lo > 0.0 ? hi / lo : INFINITY;
    return out;
}

}  // namespace heisflow::experiments
