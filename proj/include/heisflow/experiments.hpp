#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "heisflow/evolution.hpp"
#include "heisflow/groundstate.hpp"
#include "heisflow/modulation.hpp"

namespace heisflow::experiments {

// Seeded perturbation sum_{n < modes} c_n 2 e^{-sigma} L_n(2 sigma), c_n complex
// normal, scaled to ||p||_{Hdot^{1/2}} = size.
HardyFunction random_hardy_perturbation(const FrequencyGrid& grid, double size, std::uint64_t seed,
                                        std::size_t modes = 8);

// Seeded perturbation on the modes other than (0,+), profiles
// |sigma| e^{-|sigma|} L_n(2|sigma|) per slice, truncated by t and scaled to
// ||w||_{Hdot^1} = size.
RadialField random_w_perturbation(const RadialSpectralGrid& grid, const Truncation& t, double size,
                                  std::uint64_t seed, std::size_t modes = 4);

// U0^gamma = ((1 - gamma) U0 + (gamma - beta) Q) / (1 - beta) with Q the
// band-clipped embed of f_Q; U0 itself when U0 lies in V0+. Needs beta <= gamma < 1.
RadialField initial_family(const RadialField& u0, double beta, double gamma);

// Limit flow from f_Q + p, p in V0+ with ||p||_{Hdot^1(H^1)} = r^2, tracked in
// a tube of radius tube_factor * r. Distances in Hdot^1(H^1) units.
struct LimitStabilityConfig {
    FrequencyGrid grid = FrequencyGrid::cell_centered(1.0 / 32.0, 32 * 30);
    std::vector<double> r_values{0.0316227766016838};
    double t_final = 10.0;
    double dt = 2e-3;
    std::size_t sample_every = 50;
    double tube_factor = 1.5;
    std::uint64_t seed = 1;
    std::size_t modes = 8;
    std::size_t workers = 1;
    ModulationOptions modulation;
};

struct StabilityPoint {
    double r = 0.0;
    double perturbation = 0.0;    // ||U0 - reference||_{Hdot^1}
    double threshold = 0.0;       // tube radius
    double initial_distance = 0.0;
    double sup_distance = 0.0;
    double sup_jump = 0.0;
    std::size_t anchors = 0;
    double sup_w = 0.0;           // sup_t ||W(t)||_{Hdot^1} (Heisenberg runs)
    double momentum_drift = 0.0;  // relative
    double energy_drift = 0.0;
    bool tube_exit = false;
    std::string failure;
    std::vector<SeriesRow> series;  // dist_orbit filled from the track
    ModulationTrack track;
};

std::vector<StabilityPoint> limit_stability(const LimitStabilityConfig& cfg);

// Heisenberg flow at gamma = beta from Q_beta + p, tracked against the orbit of
// Q_beta in a tube of radius tube_factor * r. in_v0_plus: p in V0+ with norm
// r^2; otherwise p = p+ + w of total norm sqrt(1 - beta) r, split evenly.
struct HeisStabilityConfig {
    RadialGridSpec grid;
    double beta = 0.99;
    std::vector<double> r_values{0.03};
    bool in_v0_plus = false;
    double t_final = 10.0;
    double dt = 1e-2;
    std::size_t sample_every = 20;
    Scheme scheme = Scheme::etdrk4;
    double tube_factor = 1.5;
    std::uint64_t seed = 1;
    std::size_t workers = 1;
    PetviashviliOptions solver;
    ModulationOptions modulation;
};

struct HeisStabilityResult {
    GroundStateResult ground_state;
    std::vector<StabilityPoint> points;
};

HeisStabilityResult heis_stability(const HeisStabilityConfig& cfg);

// W-trapping sweep: for each gamma, U0 = Q_gamma + p+ + sqrt(1 - gamma) w with
// seeded p+, w of fixed sizes; reports sup_t ||W(t)|| / sqrt(1 - gamma).
struct TrappingConfig {
    RadialGridSpec grid;
    std::vector<double> gammas{0.9, 0.99, 0.999};
    double plus_size = 1e-2;
    double w_size = 0.5;
    double t_final = 5.0;
    double dt = 5e-3;
    std::size_t sample_every = 10;
    std::uint64_t seed = 1;
    std::size_t workers = 1;
    PetviashviliOptions solver;
};

struct TrappingRow {
    double gamma = 0.0;
    double residual = 0.0;
    double w0 = 0.0;       // ||W(0)||
    double sup_w = 0.0;    // sup_t ||W(t)||
    double ratio = 0.0;    // sup_w / sqrt(1 - gamma)
    double energy_drift = 0.0;
};

struct TrappingResult {
    std::vector<TrappingRow> rows;
    double spread = 0.0;  // max ratio / min ratio
};

TrappingResult w_trapping(const TrappingConfig& cfg);

}  // namespace heisflow::experiments
