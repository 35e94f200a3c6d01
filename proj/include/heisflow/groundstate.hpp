#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "heisflow/hardy.hpp"
#include "heisflow/heis.hpp"
#include "heisflow/modulation.hpp"

namespace heisflow {

struct PetviashviliOptions {
    double tol = 1e-10;          // relative Hdot^{-1} residual
    std::size_t max_iter = 5000;
    double newton_switch = 1e-5;     // residual at which Newton-GMRES takes over (0 disables)
    std::size_t newton_steps = 12;
    std::size_t stall_window = 200;  // stop if the residual has not improved for this many iterations
    // Every this many iterations, extrapolate the slowly drifting dilation scale (0 disables).
    std::size_t scale_extrapolation = 40;
    // called once per iteration with (iteration, residual, stabilizer)
    std::function<void(std::size_t, double, double)> monitor;
};

struct GroundStateResult {
    RadialField profile;
    double residual = 0.0;
    double stabilizer = 0.0;
    std::size_t iterations = 0;
};

struct LimitGroundStateResult {
    HardyFunction profile;
    double residual = 0.0;
    double stabilizer = 0.0;
    std::size_t iterations = 0;
};

struct GroundStateRow {
    double beta = 0.0;
    double residual = 0.0;
    double stabilizer = 0.0;
    std::size_t iterations = 0;
    double qbeta_norm_h1 = 0.0;
    double dist_to_q = 0.0;         // orbit distance, Hdot^1(H^1)
    double r_beta_norm = 0.0;       // ||Q_beta - Q_beta^+||_{Hdot^1}
    double delta_qbeta_plus = 0.0;  // delta(Q_beta^+), Heisenberg units
    double wave_energy = 0.0;       // energy of sqrt(1 - beta) Q_beta
    double truncation_sensitivity = 0.0;  // relative change of dist_to_q under a tighter truncation
    bool truncation_dominated = false;
    SymmetryElement x_star;
};

struct GroundStateTable {
    std::vector<GroundStateRow> rows;
    std::vector<RadialField> profiles;
    std::optional<double> dist_slope;  // log-log slopes against 1 - beta (>= 2 rows)
    std::optional<double> r_slope;
};

namespace groundstate {

// ||Lambda_beta Q - N(Q)||_{Hdot^-1} / ||Lambda_beta Q||_{Hdot^-1}
double residual(const RadialField& q, double beta, const Truncation& t);

// Petviashvili iteration for Lambda_beta Q = N(Q) on the truncated band, warm
// started from init. Gauge: translation removed and the peak (0,+)
// coefficient given the phase of f_Q (-i).
GroundStateResult solve(double beta, const RadialField& init, const Truncation& t,
                        const PetviashviliOptions& opts = {});

// Same iteration for the limit problem sigma f = cubic_projection(f) on a Hardy grid.
LimitGroundStateResult solve_limit(const HardyFunction& init, const PetviashviliOptions& opts = {});
double limit_residual(const HardyFunction& f);

// Fix translation and phase of a field in place (the gauge used by `solve`).
void fix_gauge(RadialField& u);
void fix_gauge(HardyFunction& f);

// embed of the discrete limit ground state c f_Q, the default warm start.
RadialField initial_guess(const RadialSpectralGrid& grid);

// Solves for increasing betas, each warm started from the previous profile,
// and tabulates distances to the orbit of Q.
GroundStateTable continuation_sweep(const std::vector<double>& betas, const RadialSpectralGrid& grid,
                                    const Truncation& t, const PetviashviliOptions& opts = {});

// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace groundstate
}  // namespace heisflow
