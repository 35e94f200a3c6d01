#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "heisflow/experiments.hpp"
#include "heisflow/io.hpp"
#include "heisflow/oracles.hpp"

#ifndef HEISFLOW_VERSION
#define HEISFLOW_VERSION "dev"
#endif

namespace heisflow::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

Run::Run(std::string subcommand, Config cfg, fs::path out, std::size_t workers)
    : subcommand_(std::move(subcommand)),
      cfg_(std::move(cfg)),
      out_(std::move(out)),
      workers_(workers),
      start_(std::chrono::steady_clock::now()) {}

double Run::seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void Run::check(const std::string& name, double value, const std::string& tolerance_key, bool pass) {
    double tol = tolerance_key.empty() ? NAN : cfg_.num(tolerance_key);
    checks_.push_back({name, value, tol, tolerance_key, pass});
}

void Run::check_le(const std::string& name, double value, const std::string& tolerance_key) {
    double tol = cfg_.num(tolerance_key);
    check(name, value, tolerance_key, std::isfinite(value) && value <= tol);
}

void Run::check_ge(const std::string& name, double value, const std::string& tolerance_key) {
    double tol = cfg_.num(tolerance_key);
    check(name, value, tolerance_key, std::isfinite(value) && value >= tol);
}

fs::path Run::file(const std::string& relative) {
    files_.push_back(relative);
    return out_ / relative;
}

bool Run::passed() const {
    return std::all_of(checks_.begin(), checks_.end(), [](const Check& c) { return c.pass; });
}

void Run::write_manifest(const std::string& status, const std::string& error) {
    json checks = json::array();
    for (const auto& c : checks_) {
        json j{{"name", c.name}, {"value", std::isfinite(c.value) ? json(c.value) : json(io::format_double(c.value))},
               {"pass", c.pass}};
        if (!c.tolerance_key.empty()) {
            j["tolerance"] = c.tolerance;
            j["tolerance_key"] = c.tolerance_key;
        }
        checks.push_back(std::move(j));
    }
    timings_["total"] = seconds_since(start_);
    json m{{"tool", "heisflow"},
           {"version", HEISFLOW_VERSION},
           {"subcommand", subcommand_},
           {"status", status},
           {"config", cfg_.echo()},
           {"config_sources", cfg_.sources()},
           {"tolerances", cfg_.section("checks")},
           {"workers", workers_},
           {"derived", derived_},
           {"checks", checks},
           {"timings_s", timings_},
           {"files", files_}};
    if (!error.empty()) {
        m["error"] = error;
        m["failed_check"] = stage_;
    }
    io::write_text_atomic(out_ / "manifest.json", m.dump(2) + '\n');
}

namespace {

// ---- shared declarations ----------------------------------------------------

void declare_hardy(Config& c) {
    c.declare("hardy.spacing", "0.0078125", "Hardy grid spacing h (cell-centred nodes (j + 1/2) h)");
    c.declare("hardy.points", "3840", "number of Hardy grid nodes");
}

void declare_radial(Config& c) {
    c.declare("grid.k_max", "8", "radial Laguerre modes k = 0..k_max");
    c.declare("grid.n_sigma", "160", "frequency nodes per sign");
    c.declare("grid.sigma_max", "20", "frequency band edge");
}

void declare_solver(Config& c) {
    c.declare("solver.tol", "1e-9", "relative Hdot^-1 residual target for the ground-state solver");
    c.declare("solver.max_iter", "5000", "Petviashvili iteration cap");
}

FrequencyGrid hardy_grid(const Config& c) {
    return FrequencyGrid::cell_centered(c.positive("hardy.spacing"), c.count("hardy.points"));
}

RadialGridSpec radial_spec(const Config& c) {
    RadialGridSpec s;
    s.k_max = c.count("grid.k_max");
    s.n_sigma = c.count("grid.n_sigma");
    s.sigma_max = c.positive("grid.sigma_max");
    if (s.n_sigma < 4) throw ConfigError("grid.n_sigma must be >= 4");
    return s;
}

PetviashviliOptions solver_options(const Config& c) {
    PetviashviliOptions o;
    o.tol = c.positive("solver.tol");
    o.max_iter = c.count("solver.max_iter");
    return o;
}

Scheme parse_scheme(const std::string& s) {
    if (s == "rk4") return Scheme::rk4;
    if (s == "ifrk4") return Scheme::ifrk4;
    if (s == "etdrk4") return Scheme::etdrk4;
    throw ConfigError("unknown scheme \"" + s + "\" (rk4, ifrk4, etdrk4)");
}

IntegratorConfig integrator(const Config& c, Scheme scheme) {
    IntegratorConfig ic;
    ic.scheme = scheme;
    ic.dt = c.positive("evolve.dt");
    ic.t_final = c.positive("evolve.t_final");
    ic.sample_every = c.count("evolve.sample_every");
    if (ic.sample_every == 0) throw ConfigError("evolve.sample_every must be positive");
    return ic;
}

double relative_drift(const std::vector<SeriesRow>& s, double SeriesRow::*field) {
    double worst = 0.0;
    for (const auto& r : s) worst = std::max(worst, std::abs(r.*field - s.front().*field));
    return worst / std::max(std::abs(s.front().*field), 1e-300);
}

std::string indexed(const std::string& stem, std::size_t i, const std::string& ext = ".csv") {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%03zu", i);
    return stem + buf + ext;
}

bool is_hardy_file(const fs::path& csv) {
    auto side = json::parse(io::read_text(fs::path(csv.string() + ".json")), nullptr, false);
    if (side.is_discarded()) throw ConfigError(csv.string() + ".json: invalid JSON");
    return side.contains("rule");
}

void check_betas(const std::vector<double>& betas, const std::string& key) {
    for (std::size_t i = 0; i < betas.size(); ++i) {
        if (!(betas[i] >= 0.0 && betas[i] < 1.0)) throw ConfigError(key + ": values must lie in [0, 1)");
        if (i > 0 && !(betas[i] > betas[i - 1])) throw ConfigError(key + ": values must increase");
    }
}

json symmetry_json(const SymmetryElement& x) { return {{"s", x.s}, {"theta", x.theta}, {"alpha", x.alpha}}; }

// ---- groundstate -------------------------------------------------------------

void declare_groundstate(Config& c) {
    declare_radial(c);
    declare_solver(c);
    c.declare("groundstate.betas", "0.9,0.95,0.99", "increasing speeds in [0, 1)");
    c.declare("checks.residual", "1e-8", "maximal solver residual");
}

void write_table(Run& run, const GroundStateTable& table) {
    io::write_groundstates(run.file("groundstates.csv"), table);
    for (std::size_t i = 0; i < table.profiles.size(); ++i)
        io::write_radial(run.file(indexed("profiles/qbeta_", i)), table.profiles[i]);
}

void run_groundstate(Run& run) {
    const auto& c = run.cfg();
    auto betas = c.list("groundstate.betas");
    check_betas(betas, "groundstate.betas");
    RadialSpectralGrid grid(radial_spec(c));
    auto opts = solver_options(c);
    auto table = run.timed("continuation_sweep",
                           [&] { return groundstate::continuation_sweep(betas, grid, Truncation::none(), opts); });
    write_table(run, table);
    for (const auto& r : table.rows) run.check_le("residual beta=" + io::format_double(r.beta), r.residual, "checks.residual");
    if (table.dist_slope) run.derived("dist_slope", *table.dist_slope);
    if (table.r_slope) run.derived("r_slope", *table.r_slope);
    run.derived("hdot1_norm2_heis_over_hardy", kPi);
}

// ---- evolve-limit ------------------------------------------------------------

void declare_evolve_common(Config& c) {
    c.declare("evolve.dt", "1e-3", "time step");
    c.declare("evolve.t_final", "1", "final time");
    c.declare("evolve.sample_every", "100", "steps between recorded samples");
    c.declare("evolve.seed", "1", "seed of the random perturbation");
    c.declare("evolve.snapshots", "false", "write every sample as a snapshot file");
    c.declare("evolve.tube", "0", "modulation tube radius for tracking; 0 disables tracking");
    c.declare("checks.momentum_drift", "1e-6", "relative momentum drift bound");
    c.declare("checks.energy_drift", "1e-6", "relative energy drift bound");
}

void declare_evolve_limit(Config& c) {
    declare_hardy(c);
    declare_evolve_common(c);
    c.declare("evolve.input", "", "Hardy CSV with the initial datum; empty uses f_Q");
    c.declare("evolve.perturbation", "0", "Hdot^{1/2} size of a seeded perturbation added to the datum");
}

void run_evolve_limit(Run& run) {
    const auto& c = run.cfg();
    auto icfg = integrator(c, Scheme::rk4);
    double tube = c.num("evolve.tube");
    double size = c.num("evolve.perturbation");
    if (tube < 0.0 || size < 0.0) throw ConfigError("evolve.tube and evolve.perturbation must be >= 0");
    auto path = c.str("evolve.input");
    HardyFunction u0 = path.empty() ? hardy::ground_state_profile(hardy_grid(c)) : io::read_hardy(path);
    if (size > 0.0) u0 += experiments::random_hardy_perturbation(u0.grid(), size, c.seed("evolve.seed"));

    auto traj = run.timed("evolve", [&] { return evolve_limit(u0, icfg); });
    ModulationTrack track;
    bool tracked = tube > 0.0;
    if (tracked) {
        ModulationOptions mo;
        mo.workers = run.workers();
        mo.reference = OrbitReference::discrete(u0.grid());
        track = run.timed("track_modulation", [&] { return modulation::track_modulation(traj, tube, mo); });
        for (std::size_t i = 0; i < traj.series.size(); ++i) traj.series[i].dist_orbit = track.distance[i];
        run.derived("sup_distance", track.sup_distance);
        run.derived("sup_anchor_jump", track.sup_jump);
        run.derived("anchors", track.anchor_id.back() + 1);
    }
    io::write_series(run.file("series.csv"), traj.series, tracked ? &track : nullptr);
    if (c.flag("evolve.snapshots"))
        for (std::size_t i = 0; i < traj.snapshots.size(); ++i)
            io::write_hardy(run.file(indexed("snapshots/u_", i)), traj.snapshots[i]);
    run.derived("empirical_dt_norm_ratio_sup", dt_norm_diagnostic(traj.series).sup);
    run.check_le("momentum drift", relative_drift(traj.series, &SeriesRow::momentum), "checks.momentum_drift");
    run.check_le("energy drift", relative_drift(traj.series, &SeriesRow::energy), "checks.energy_drift");
}

// ---- evolve-heis -------------------------------------------------------------

void declare_evolve_heis(Config& c) {
    declare_radial(c);
    declare_solver(c);
    declare_evolve_common(c);
    c.declare("evolve.scheme", "etdrk4", "rk4, ifrk4 or etdrk4");
    c.declare("evolve.beta", "0.9", "speed of the initial datum U0");
    c.declare("evolve.gammas", "0.9", "speeds gamma >= beta of the flows; U0 follows the interpolation family");
    c.declare("evolve.initial", "q", "q (embed of f_Q), qbeta (solved traveling-wave profile) or a radial CSV path");
    c.declare("evolve.plus_size", "0", "Hdot^1 size of a seeded V0+ perturbation of U0");
    c.declare("evolve.w_size", "0", "Hdot^1 size of a seeded perturbation on the other modes");
    c.declare("evolve.level", "0", "Galerkin level n of the truncation Pi^(n); 0 keeps the whole grid");
}

void run_evolve_heis(Run& run) {
    const auto& c = run.cfg();
    auto icfg = integrator(c, parse_scheme(c.str("evolve.scheme")));
    double beta = c.num("evolve.beta");
    auto gammas = c.list("evolve.gammas");
    check_betas(gammas, "evolve.gammas");
    if (!(beta >= 0.0 && beta < 1.0)) throw ConfigError("evolve.beta must lie in [0, 1)");
    if (gammas.front() < beta) throw ConfigError("evolve.gammas must be >= evolve.beta");
    double tube = c.num("evolve.tube");
    double plus = c.num("evolve.plus_size"), wsize = c.num("evolve.w_size");
    if (tube < 0.0 || plus < 0.0 || wsize < 0.0) throw ConfigError("tube and perturbation sizes must be >= 0");
    std::size_t level = c.count("evolve.level");
    Truncation trunc = level == 0 ? Truncation::none() : Truncation::level(level);

    auto initial = c.str("evolve.initial");
    RadialField u0;
    if (initial == "q" || initial == "qbeta") {
        RadialSpectralGrid grid(radial_spec(c));
        u0 = heis::embed_hardy(hardy::ground_state_profile(grid.hardy_grid()), grid);
        if (initial == "qbeta") {
            auto gs = run.timed("groundstate", [&] {
                return groundstate::solve(beta, groundstate::initial_guess(grid), Truncation::none(), solver_options(c));
            });
            run.derived("qbeta_residual", gs.residual);
            u0 = gs.profile;
        }
    } else {
        u0 = io::read_radial(initial);
    }
    const auto& grid = u0.grid();
    auto seed = c.seed("evolve.seed");
    if (plus > 0.0)
        u0 += heis::embed_hardy(experiments::random_hardy_perturbation(grid.hardy_grid(), plus / std::sqrt(kPi), seed), grid);
    if (wsize > 0.0) u0 += experiments::random_w_perturbation(grid, trunc, wsize, seed + 1);

    std::vector<HeisTrajectory> trajs(gammas.size());
    std::vector<ModulationTrack> tracks(gammas.size());
    ModulationOptions mo;
    mo.reference = OrbitReference::discrete(grid.hardy_grid());
    run.timed("evolve", [&] {
        parallel_for(gammas.size(), run.workers(), [&](std::size_t i) {
            auto start = heis::truncate(experiments::initial_family(u0, beta, gammas[i]), trunc);
            trajs[i] = evolve_heis(start, gammas[i], trunc, icfg);
            if (tube > 0.0) {
                tracks[i] = modulation::track_modulation(trajs[i], tube, mo);
                for (std::size_t k = 0; k < trajs[i].series.size(); ++k)
                    trajs[i].series[k].dist_orbit = tracks[i].distance[k];
            }
        });
    });
    json per_gamma = json::array();
    for (std::size_t i = 0; i < gammas.size(); ++i) {
        const auto& s = trajs[i].series;
        auto tag = "gamma=" + io::format_double(gammas[i]);
        io::write_series(run.file(indexed("series_gamma_", i)), s, tube > 0.0 ? &tracks[i] : nullptr);
        if (c.flag("evolve.snapshots"))
            for (std::size_t k = 0; k < trajs[i].snapshots.size(); ++k)
                io::write_radial(run.file(indexed("snapshots/gamma_" + std::to_string(i) + "_u_", k)), trajs[i].snapshots[k]);
        double sup_w = 0.0;
        for (const auto& r : s) sup_w = std::max(sup_w, r.w_norm);
        json row{{"gamma", gammas[i]}, {"series", indexed("series_gamma_", i)}, {"sup_w_norm", sup_w},
                 {"sup_w_over_sqrt_1mg", sup_w / std::sqrt(1.0 - gammas[i])}};
        if (tube > 0.0) row["sup_distance"] = tracks[i].sup_distance;
        per_gamma.push_back(row);
        run.check_le("momentum drift " + tag, relative_drift(s, &SeriesRow::momentum), "checks.momentum_drift");
        run.check_le("energy drift " + tag, relative_drift(s, &SeriesRow::energy), "checks.energy_drift");
    }
    run.derived("runs", per_gamma);
}

// ---- distance ----------------------------------------------------------------

void declare_distance(Config& c) {
    c.declare("distance.input", "", "Hardy or radial CSV (format taken from the JSON sidecar)");
    c.declare("distance.reference", "", "radial CSV of a reference profile; empty measures against the orbit of Q");
    c.declare("search.half_width", "2.5", "half width of the log alpha scan");
    c.declare("search.coarse_points", "41", "coarse log alpha scan points");
    c.declare("search.starts", "3", "local minima refined");
}

void run_distance(Run& run) {
    const auto& c = run.cfg();
    auto input = c.str("distance.input");
    if (input.empty()) throw ConfigError("distance.input is required");
    OrbitSearch search;
    search.log_alpha_half_width = c.positive("search.half_width");
    search.coarse_points = c.count("search.coarse_points");
    search.starts = c.count("search.starts");
    auto ref_path = c.str("distance.reference");
    if (is_hardy_file(input)) {
        if (!ref_path.empty()) throw ConfigError("distance.reference applies to radial input only");
        auto u = io::read_hardy(input);
        auto fit = run.timed("distance", [&] { return modulation::distance_to_orbit(u, OrbitReference::analytic(), search); });
        run.derived("kind", "hardy");
        run.derived("distance_hardy", fit.distance);
        run.derived("distance_heis", std::sqrt(kPi) * fit.distance);
        run.derived("delta_hardy", modulation::delta_functional(u));
        run.derived("x_star", symmetry_json(fit.x_star));
        run.derived("converged", fit.converged);
    } else {
        auto u = io::read_radial(input);
        run.derived("kind", "radial");
        if (ref_path.empty()) {
            auto fit = run.timed("distance", [&] {
                return modulation::distance_to_orbit(u, OrbitReference::discrete(u.grid().hardy_grid()), search);
            });
            run.derived("distance", fit.distance);
            run.derived("plus_distance_hardy", fit.plus.distance);
            run.derived("w_norm", fit.w_norm);
            run.derived("x_star", symmetry_json(fit.plus.x_star));
            run.derived("converged", fit.plus.converged);
        } else {
            auto r = io::read_radial(ref_path);
            auto fit = run.timed("distance", [&] { return modulation::distance_to_orbit(u, r, search); });
            run.derived("distance", fit.distance);
            run.derived("x_star", symmetry_json(fit.x_star));
            run.derived("converged", fit.converged);
        }
    }
}

// ---- stability-sweep ---------------------------------------------------------

void declare_stability(Config& c) {
    declare_hardy(c);
    declare_radial(c);
    declare_solver(c);
    c.declare("stability.flow", "heis", "heis (Q_beta orbit), limit (Q orbit) or ratio (d^2 / delta ensemble)");
    c.declare("stability.r", "0.03", "list of r values");
    c.declare("stability.beta", "0.99", "speed of the traveling wave (heis)");
    c.declare("stability.in_v0_plus", "false", "heis: perturb inside V0+ with size r^2 instead of sqrt(1-beta) r");
    c.declare("stability.t_final", "10", "final time");
    c.declare("stability.dt", "1e-2", "time step");
    c.declare("stability.sample_every", "20", "steps between samples");
    c.declare("stability.scheme", "etdrk4", "scheme for the heis flow");
    c.declare("stability.tube_factor", "1.5", "tube radius / r (empirical c0)");
    c.declare("stability.seed", "1", "perturbation seed");
    c.declare("stability.samples", "64", "ratio: ensemble size (rerun with twice as many)");
    c.declare("stability.tangent_fraction", "0.25", "ratio: share of samples along the orbit tangent space");
    c.declare("stability.ridge_fraction", "0.25", "ratio: share of samples minimizing delta along the Q direction");
    c.declare("checks.distance_multiple", "3", "sup_t d <= distance_multiple * r");
    c.declare("checks.ratio_doubling", "0.5", "ratio: relative change of the sup under sample doubling");
    c.declare("checks.ratio_monotone_slack", "1e-3", "ratio: allowed relative increase of the sup as r decreases");
}

void stability_rows(Run& run, const std::vector<experiments::StabilityPoint>& pts) {
    std::string csv = "r,perturbation,threshold,initial_distance,sup_distance,sup_jump,anchors,sup_w,momentum_drift,energy_drift,tube_exit\n";
    json rows = json::array();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& p = pts[i];
        csv += io::format_double(p.r) + ',' + io::format_double(p.perturbation) + ',' + io::format_double(p.threshold) +
               ',' + io::format_double(p.initial_distance) + ',' + io::format_double(p.sup_distance) + ',' +
               io::format_double(p.sup_jump) + ',' + std::to_string(p.anchors) + ',' + io::format_double(p.sup_w) + ',' +
               io::format_double(p.momentum_drift) + ',' + io::format_double(p.energy_drift) + ',' +
               (p.tube_exit ? "1" : "0") + '\n';
        io::write_series(run.file(indexed("series_r_", i)), p.series, p.tube_exit ? nullptr : &p.track);
        auto tag = "r=" + io::format_double(p.r);
        run.check("no tube exit " + tag, p.tube_exit ? 1.0 : 0.0, "", !p.tube_exit);
        run.check("sup distance / r " + tag, p.sup_distance / p.r, "checks.distance_multiple",
                  !p.tube_exit && p.sup_distance <= run.cfg().num("checks.distance_multiple") * p.r);
        rows.push_back({{"r", p.r}, {"sup_distance", p.sup_distance}, {"sup_over_r", p.sup_distance / p.r},
                        {"empirical_c0", p.sup_distance / p.r}, {"failure", p.failure}});
    }
    io::write_text_atomic(run.file("stability.csv"), csv);
    run.derived("points", rows);
}

void run_stability(Run& run) {
    const auto& c = run.cfg();
    auto flow = c.str("stability.flow");
    auto r = c.list("stability.r");
    for (double x : r)
        if (!(x > 0.0)) throw ConfigError("stability.r: values must be positive");
    auto seed = c.seed("stability.seed");

    if (flow == "limit") {
        experiments::LimitStabilityConfig lc;
        lc.grid = hardy_grid(c);
        lc.r_values = r;
        lc.t_final = c.positive("stability.t_final");
        lc.dt = c.positive("stability.dt");
        lc.sample_every = c.count("stability.sample_every");
        lc.tube_factor = c.positive("stability.tube_factor");
        lc.seed = seed;
        lc.workers = run.workers();
        auto pts = run.timed("limit_stability", [&] { return experiments::limit_stability(lc); });
        stability_rows(run, pts);
    } else if (flow == "heis") {
        experiments::HeisStabilityConfig hc;
        hc.grid = radial_spec(c);
        hc.beta = c.num("stability.beta");
        hc.r_values = r;
        hc.in_v0_plus = c.flag("stability.in_v0_plus");
        hc.t_final = c.positive("stability.t_final");
        hc.dt = c.positive("stability.dt");
        hc.sample_every = c.count("stability.sample_every");
        hc.scheme = parse_scheme(c.str("stability.scheme"));
        hc.tube_factor = c.positive("stability.tube_factor");
        hc.seed = seed;
        hc.workers = run.workers();
        hc.solver = solver_options(c);
        auto res = run.timed("heis_stability", [&] { return experiments::heis_stability(hc); });
        run.derived("qbeta_residual", res.ground_state.residual);
        stability_rows(run, res.points);
    } else if (flow == "ratio") {
        auto grid = hardy_grid(c);
        std::size_t samples = c.count("stability.samples");
        StabilityOptions so;
        so.workers = run.workers();
        so.tangent_fraction = c.num("stability.tangent_fraction");
        so.ridge_fraction = c.num("stability.ridge_fraction");
        if (so.tangent_fraction < 0.0 || so.ridge_fraction < 0.0 || so.tangent_fraction + so.ridge_fraction > 1.0)
            throw ConfigError("stability.tangent_fraction and stability.ridge_fraction must be >= 0 with sum <= 1");
        auto rows = run.timed("ratio", [&] { return modulation::stability_ratio_experiment(grid, r, samples, seed, so); });
        auto doubled = run.timed("ratio_doubled",
                                 [&] { return modulation::stability_ratio_experiment(grid, r, 2 * samples, seed, so); });
        std::string csv = "r,samples,excluded,sup_ratio,mean_ratio,sup_ratio_doubled\n";
        for (std::size_t i = 0; i < rows.size(); ++i) {
            csv += io::format_double(rows[i].r) + ',' + std::to_string(rows[i].samples) + ',' +
                   std::to_string(rows[i].excluded) + ',' + io::format_double(rows[i].sup_ratio) + ',' +
                   io::format_double(rows[i].mean_ratio) + ',' + io::format_double(doubled[i].sup_ratio) + '\n';
            auto tag = "r=" + io::format_double(rows[i].r);
            run.check_le("sample doubling change " + tag, std::abs(doubled[i].sup_ratio / rows[i].sup_ratio - 1.0),
                         "checks.ratio_doubling");
        }
        io::write_text_atomic(run.file("ratio.csv"), csv);
        std::vector<std::size_t> order(rows.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](auto a, auto b) { return rows[a].r > rows[b].r; });
        double worst = 0.0;
        for (std::size_t i = 1; i < order.size(); ++i)
            worst = std::max(worst, rows[order[i]].sup_ratio / rows[order[i - 1]].sup_ratio - 1.0);
        run.check_le("sup ratio increase as r decreases", worst, "checks.ratio_monotone_slack");
        double c_emp = 0.0;
        for (const auto& x : doubled) c_emp = std::max(c_emp, x.sup_ratio);
        run.derived("empirical_C_hardy_units", c_emp);
    } else {
        throw ConfigError("stability.flow must be heis, limit or ratio");
    }
}

// ---- rate-study --------------------------------------------------------------

void declare_rates(Config& c) {
    declare_radial(c);
    declare_solver(c);
    c.declare("rates.betas", "0.9,0.95,0.99", "increasing speeds; slopes are fitted against 1 - beta");
    c.declare("checks.residual", "1e-8", "maximal solver residual");
    c.declare("checks.dist_slope_min", "0.8", "lower bound of the ||Q_beta - Q|| slope");
    c.declare("checks.dist_slope_max", "1.3", "upper bound of the ||Q_beta - Q|| slope");
    c.declare("checks.r_slope_min", "1.5", "lower bound of the ||R_beta|| slope");
    c.declare("checks.c3_spread", "2", "max / min of C3 = ||R|| / ((1 - beta) ||Q_beta - Q||) over the sweep");
}

void run_rates(Run& run) {
    const auto& c = run.cfg();
    auto betas = c.list("rates.betas");
    check_betas(betas, "rates.betas");
    if (betas.size() < 2) throw ConfigError("rates.betas needs at least two values");
    RadialSpectralGrid grid(radial_spec(c));
    auto opts = solver_options(c);
    auto table = run.timed("continuation_sweep",
                           [&] { return groundstate::continuation_sweep(betas, grid, Truncation::none(), opts); });
    write_table(run, table);
    std::string csv = "beta,one_minus_beta,dist_to_q,r_beta_norm,delta_qbeta_plus,c3\n";
    double lo = INFINITY, hi = 0.0;
    for (const auto& r : table.rows) {
        double c3 = r.r_beta_norm / ((1.0 - r.beta) * r.dist_to_q);
        lo = std::min(lo, c3);
        hi = std::max(hi, c3);
        csv += io::format_double(r.beta) + ',' + io::format_double(1.0 - r.beta) + ',' + io::format_double(r.dist_to_q) +
               ',' + io::format_double(r.r_beta_norm) + ',' + io::format_double(r.delta_qbeta_plus) + ',' +
               io::format_double(c3) + '\n';
        run.check_le("residual beta=" + io::format_double(r.beta), r.residual, "checks.residual");
    }
    io::write_text_atomic(run.file("rates.csv"), csv);
    std::vector<double> x, d;
    for (const auto& r : table.rows) {
        x.push_back(1.0 - r.beta);
        d.push_back(r.delta_qbeta_plus);
    }
    run.derived("delta_slope", groundstate::loglog_slope(x, d));
    run.derived("dist_slope", *table.dist_slope);
    run.derived("r_slope", *table.r_slope);
    run.derived("c3_min", lo);
    run.derived("c3_max", hi);
    run.check_ge("dist slope lower", *table.dist_slope, "checks.dist_slope_min");
    run.check_le("dist slope upper", *table.dist_slope, "checks.dist_slope_max");
    run.check_ge("R slope", *table.r_slope, "checks.r_slope_min");
    run.check_le("C3 spread", hi / lo, "checks.c3_spread");
}

// ---- oracle-check ------------------------------------------------------------

void declare_oracles(Config& c) {
    oracle::OracleTolerances t;
    c.declare("checks.kernel", io::format_double(t.kernel), "FFT kernel vs direct triple sum");
    c.declare("checks.bruteforce", io::format_double(t.bruteforce), "cubic_projection vs Bergman brute force");
    c.declare("checks.l4", io::format_double(t.l4), "l4norm4 vs 2D quadrature");
    c.declare("checks.parseval", io::format_double(t.parseval), "spectral vs collocation L^2 norm");
    c.declare("checks.hardy_heis", io::format_double(t.hardy_heis), "Hardy vs Heisenberg nonlinearity on V0+");
    c.declare("checks.identity", io::format_double(t.identity), "cubic_projection(f_Q) = sigma f_Q at N = 1024");
    c.declare("checks.gap", io::format_double(t.gap), "closed-form gap vs discrete symmetry action");
}

void run_oracles(Run& run) {
    const auto& c = run.cfg();
    oracle::OracleTolerances t;
    t.kernel = c.positive("checks.kernel");
    t.bruteforce = c.positive("checks.bruteforce");
    t.l4 = c.positive("checks.l4");
    t.parseval = c.positive("checks.parseval");
    t.hardy_heis = c.positive("checks.hardy_heis");
    t.identity = c.positive("checks.identity");
    t.gap = c.positive("checks.gap");
    const char* keys[] = {"checks.kernel",     "checks.bruteforce", "checks.l4",  "checks.parseval",
                          "checks.hardy_heis", "checks.identity",   "checks.gap"};
    auto results = run.timed("oracles", [&] { return oracle::run_suite(t); });
    std::string csv = "name,error,tolerance,pass\n";
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& r = results[i];
        csv += r.name + ',' + io::format_double(r.error) + ',' + io::format_double(r.tolerance) + ',' +
               (r.pass ? "1" : "0") + '\n';
        run.check(r.name, r.error, keys[i], r.pass);
    }
    io::write_text_atomic(run.file("oracles.csv"), csv);
}

}  // namespace

const std::vector<Command>& commands() {
    static const std::vector<Command> list{
        {"groundstate", "traveling-wave profiles Q_beta by continuation in beta", declare_groundstate, run_groundstate},
        {"evolve-limit", "truncated limit flow on the Hardy space", declare_evolve_limit, run_evolve_limit},
        {"evolve-heis", "truncated Heisenberg flow for a list of gamma", declare_evolve_heis, run_evolve_heis},
        {"distance", "orbit distance of a stored field", declare_distance, run_distance},
        {"stability-sweep", "perturb, evolve, track, report sup distance", declare_stability, run_stability},
        {"rate-study", "convergence rates of Q_beta as beta -> 1", declare_rates, run_rates},
        {"oracle-check", "fast kernels against reference implementations", declare_oracles, run_oracles},
    };
    return list;
}

}  // namespace heisflow::cli
