#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "heisflow/hardy.hpp"
#include "heisflow/heis.hpp"

namespace heisflow {

// rk4: classical explicit. ifrk4: Lawson integrating factor. etdrk4:
// Cox-Matthews exponential time differencing (keeps equilibria exactly).
// The last two treat the diagonal linear symbol exactly.
enum class Scheme { rk4, ifrk4, etdrk4 };

struct IntegratorConfig {
    Scheme scheme = Scheme::rk4;
    double dt = 1e-3;
    double t_final = 1.0;
    std::size_t sample_every = 100;
    bool backward = false;  // integrate from 0 to -t_final
};

struct SeriesRow {
    static constexpr double unset = std::numeric_limits<double>::quiet_NaN();
    double t = 0.0;
    double momentum = 0.0;
    double energy = 0.0;
    double l4 = 0.0;          // l4norm4 of the state
    double w_norm = unset;    // Hdot^1 norm of the non-(0,+) part (Heisenberg flow only)
    double uplus_norm = unset;
    double dt_norm = 0.0;     // Hdot^{-1/2} (limit) or Hdot^{-1} (Heisenberg) norm of the time derivative
    double dist_orbit = unset;
};

template <class Field>
struct Trajectory {
    std::vector<double> times;
    std::vector<Field> snapshots;
    std::vector<SeriesRow> series;
};

using HardyTrajectory = Trajectory<HardyFunction>;
using HeisTrajectory = Trajectory<RadialField>;

// i u_t = cubic_projection(u), explicit RK4. Throws NumericalError on NaN or
// relative momentum drift above 1e-3.
HardyTrajectory evolve_limit(const HardyFunction& u0, const IntegratorConfig& cfg);

// i U_t + Lambda_gamma U = N(U) with N the truncated cubic, i.e.
// U_t = i (Lambda_gamma U - N(U)). ifrk4 and etdrk4 propagate Lambda exactly.
// U0 must already be truncated.
HeisTrajectory evolve_heis(const RadialField& u0, double gamma, const Truncation& trunc,
                           const IntegratorConfig& cfg);

struct DtNormDiagnostic {
    std::vector<double> ratio;  // dt_norm / ||u||_{L^4}^3 per sample (0 where u = 0)
    double sup = 0.0;
};
DtNormDiagnostic dt_norm_diagnostic(const std::vector<SeriesRow>& series);

}  // namespace heisflow
