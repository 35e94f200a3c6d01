#pragma once

// Slow reference implementations used by the tests and `heisflow oracle-check`.

#include <string>
#include <vector>

#include "heisflow/hardy.hpp"

namespace heisflow::oracle {

// Direct triple sum for cubic_projection. With include_outer_weight the
// summand carries w_k / h, matching the production kernel on any grid;
// without it the plain two-weight sum is returned.
HardyFunction cubic_projection_direct(const HardyFunction& u, bool include_outer_weight = true);

// l4norm4 by 2D quadrature of |u(s+it)|^4 over [-half_width, half_width] x [0, t_max].
double l4norm4_direct(const HardyFunction& u, double half_width, std::size_t points, double t_max);

struct BruteforceOptions {
    double t0 = 0.5;          // height of the evaluation line z = s' + i t0
    double t_max = 12.0;      // truncation of the half-plane in t
    std::size_t t_panels = 12;
    std::size_t t_nodes = 8;  // Gauss-Legendre nodes per t panel
    double ds = 0.125;        // spacing for G(s, t) and P0G
    double s_half = 64.0;     // G is sampled on |s| <= s_half
    double s_out_half = 512.0;  // P0G is sampled on |s'| <= s_out_half
};

struct BruteforceResult {
    HardyFunction p;
    double error_estimate = 0.0;  // max |p - p_coarse| against a half-resolution run
    double edge_mass = 0.0;       // max |G| on the boundary of the s window relative to max |G|
};

// Bergman projection of |F|^2 F, F(s+it) = u(s+it), computed from the
// reproducing kernel -1/(pi (z - conj w)^2) by direct quadrature over the
// half-plane, then read back as frequency coefficients on u's grid.
BruteforceResult bergman_project_bruteforce(const HardyFunction& u, const BruteforceOptions& opts = {});

struct OracleTolerances {
    double kernel = 1e-12;      // FFT kernel vs direct triple sum, relative max
    double bruteforce = 1e-2;   // cubic_projection vs half-plane Bergman projection
    double l4 = 1e-6;           // l4norm4 vs 2D quadrature
    double parseval = 1e-6;     // spectral vs collocation L^2 norm
    double hardy_heis = 1e-6;   // Hardy vs Heisenberg nonlinearity on V0+, relative Hdot^-1
    double identity = 1e-2;     // cubic_projection(f_Q) = sigma f_Q, relative max at N = 1024
    double gap = 1e-3;          // closed-form gap vs discrete symmetry action
};

struct OracleCheck {
    std::string name;
    double error = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

// All cross-validations between fast and reference implementations.
std::vector<OracleCheck> run_suite(const OracleTolerances& tol = {});

}  // namespace heisflow::oracle
