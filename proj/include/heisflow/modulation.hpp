#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "heisflow/evolution.hpp"
#include "heisflow/hardy.hpp"
#include "heisflow/heis.hpp"

namespace heisflow {

// The orbit generator c f_Q and its conserved quantities in Hardy units.
// analytic(): c = 1, P = E = pi. discrete(grid): c and P, E of the discrete
// fixed point of sigma f = cubic_projection(f) along f_Q on that grid, so that
// delta vanishes to rounding on the discrete orbit.
struct OrbitReference {
    double amplitude = 1.0;
    double momentum = kPi;
    double energy = kPi;

    static OrbitReference analytic() { return {}; }
    static OrbitReference discrete(const FrequencyGrid& grid);
};

struct OrbitSearch {
    double log_alpha_half_width = 2.5;  // coarse scan around the scale guessed from <sigma>
    std::size_t coarse_points = 41;
    std::size_t starts = 3;             // local minima of the coarse scan refined
    std::size_t oversample = 8;         // s-lattice refinement of the FFT scan
    double tol = 1e-10;                 // golden-section tolerance in log alpha
};

struct OrbitFit {
    double distance = 0.0;
    SymmetryElement x_star;  // minimizer of ||T_X u - Q||
    bool converged = false;
    std::size_t evaluations = 0;

    // Orbit point nearest u: u ~ T_{anchor()} Q.
    SymmetryElement anchor() const { return x_star.inverse(); }
};

struct HeisOrbitFit {
    OrbitFit plus;          // fit of the (0,+) part, Hardy units
    double w_norm = 0.0;    // Hdot^1 norm of the remaining modes
    double distance = 0.0;  // sqrt(pi d_plus^2 + ||W||^2), Hdot^1(H^1) units
};

struct StabilityOptions {
    std::size_t modes = 8;          // perturbations span 2 e^{-sigma} L_n(2 sigma), n < modes
    double tangent_fraction = 0.25; // share of samples along the orbit's tangent space
    // Share of samples p = a e + b v (e = Q / |Q|, v orthogonal to e, a^2 + b^2 = r^2)
    // with a chosen to minimize delta; the ratio peaks there.
    double ridge_fraction = 0.25;
    double delta_floor = 1e-8;      // samples with smaller delta are excluded
    std::size_t workers = 1;
    OrbitSearch search;
};

struct StabilityRow {
    double r = 0.0;
    std::size_t samples = 0;
    std::size_t excluded = 0;
    double sup_ratio = 0.0;   // empirical C in d^2 <= C delta
    double mean_ratio = 0.0;
};

struct ModulationOptions {
    double epsilon = 0.1;  // re-anchor once ||u - T_X Q|| > (1 + epsilon) threshold
    std::size_t workers = 1;
    OrbitReference reference;
    OrbitSearch search;
};

struct ModulationTrack {
    std::vector<SymmetryElement> anchor;  // u(t) ~ T_{anchor} Q, piecewise constant
    std::vector<std::size_t> anchor_id;
    std::vector<double> anchor_gap;       // ||u(t) - T_{anchor} Q||
    std::vector<OrbitFit> fits;           // per-snapshot orbit fit
    std::vector<double> distance;         // d(u(t), M), same units as the threshold
    std::vector<double> jumps;            // |X^{k-1} (X^k)^{-1}| between consecutive anchors
    double sup_distance = 0.0;
    double sup_jump = 0.0;
};

namespace modulation {

// ||T_X Q - Q||^2 in Hardy units.
double gap_closed_form(const SymmetryElement& x);

// ||u - T_x (c f_Q)|| with the orbit point sampled on u's grid.
double orbit_gap(const HardyFunction& u, const SymmetryElement& x, const OrbitReference& ref = {});

// inf_X ||T_X u - c f_Q||, evaluated as ||u - T_{X^-1} c f_Q||. Analytic theta,
// FFT scan plus golden refinement in s, golden search in log alpha.
OrbitFit distance_to_orbit(const HardyFunction& u, const OrbitReference& ref = {},
                           const OrbitSearch& search = {});
HeisOrbitFit distance_to_orbit(const RadialField& u, const OrbitReference& ref = {},
                               const OrbitSearch& search = {});

// Orbit of a general radial reference R (e.g. Q_beta) under the slice-wise
// group action: inf_X ||T_X u - R||_{Hdot^1}, evaluated as ||u - T_{X^-1} R||
// with T_{X^-1} R obtained by interpolation in sigma.
OrbitFit distance_to_orbit(const RadialField& u, const RadialField& reference, const OrbitSearch& search = {});
double orbit_gap(const RadialField& u, const RadialField& reference, const SymmetryElement& x);

// |P(u) - P_ref| + |E(u) - E_ref| in Hardy units.
double delta_functional(const HardyFunction& u, const OrbitReference& ref = {});

// Monte-Carlo sup of d(u)^2 / delta(u) for u = Q + p, ||p||_{Hdot^{1/2}} = r.
// The same seeded directions are reused for every r.
std::vector<StabilityRow> stability_ratio_experiment(const FrequencyGrid& grid,
                                                     const std::vector<double>& r_values,
                                                     std::size_t samples, std::uint64_t seed,
                                                     const StabilityOptions& opts = {});

// Piecewise-constant anchors along a trajectory. Throws NumericalError if a
// re-fit lands farther than 2 threshold from the orbit.
ModulationTrack track_modulation(const HardyTrajectory& traj, double threshold,
                                 const ModulationOptions& opts = {});
// Heisenberg version on the (0,+) part; distances in Hdot^1(H^1) units
// include ||W||.
ModulationTrack track_modulation(const HeisTrajectory& traj, double threshold,
                                 const ModulationOptions& opts = {});
// Anchors on the orbit of a general reference (e.g. Q_beta), full Hdot^1 distance.
ModulationTrack track_modulation(const HeisTrajectory& traj, const RadialField& reference, double threshold,
                                 const ModulationOptions& opts = {});

}  // namespace modulation
}  // namespace heisflow
