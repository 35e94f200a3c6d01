#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "heisflow/common.hpp"
#include "heisflow/hardy.hpp"

namespace heisflow {

enum class Sign : int { plus = 0, minus = 1 };

struct RadialGridSpec {
    std::size_t k_max = 8;       // radial modes k = 0..k_max (Hermite levels 0, 2, .., 2 k_max)
    std::size_t n_sigma = 160;   // frequency nodes per sign
    double sigma_max = 20.0;     // nodes +-(m + 1/2) h, h = sigma_max / n_sigma
    std::size_t n_s = 0;         // collocation points in s; 0 picks the smallest alias-free size
    std::size_t nodes_per_panel = 16;
    double panel_ratio = 2.0;
};

// Laguerre modes x signed frequencies, with the radial quadrature (in v = r^2)
// and periodic s-box used by the collocation nonlinearity. Shared, immutable.
class RadialSpectralGrid {
public:
    explicit RadialSpectralGrid(const RadialGridSpec& spec = {});

    const RadialGridSpec& spec() const;
    std::size_t k_max() const;
    std::size_t n_sigma() const;
    std::size_t n_s() const;
    double spacing() const;
    double sigma(Sign sign, std::size_t m) const;
    // total coefficient count (k_max + 1) * 2 * n_sigma
    std::size_t size() const;
    std::size_t index(std::size_t k, Sign sign, std::size_t m) const {
        return (k * 2 + static_cast<std::size_t>(sign)) * n_sigma() + m;
    }

    // radial quadrature for int_0^inf . 2 pi r dr = pi int_0^inf . dv
    std::span<const double> radial_nodes() const;    // v_q
    std::span<const double> radial_weights() const;  // includes the factor pi
    double s_spacing() const;
    double s_half_length() const;  // box is periodic with length 2 L, L = pi / h

    // psi_k(v_q, sigma_m) = L_k(2 |sigma| v_q) e^{-|sigma| v_q}, same for both signs
    double psi(std::size_t q, std::size_t k, std::size_t m) const;
    // psi_k(v_q, sigma_m) for m = 0..n_sigma-1
    const double* psi_row(std::size_t q, std::size_t k) const;

    // Grid of positive nodes as a Hardy-side frequency grid.
    FrequencyGrid hardy_grid() const;

    bool operator==(const RadialSpectralGrid& o) const;

private:
    struct Data;
    std::shared_ptr<const Data> d_;
};

class RadialField {
public:
    RadialField() = default;
    explicit RadialField(RadialSpectralGrid grid);

    const RadialSpectralGrid& grid() const { return grid_; }
    std::vector<cplx>& coeffs() { return c_; }
    const std::vector<cplx>& coeffs() const { return c_; }
    cplx& at(std::size_t k, Sign s, std::size_t m) { return c_[grid_.index(k, s, m)]; }
    cplx at(std::size_t k, Sign s, std::size_t m) const { return c_[grid_.index(k, s, m)]; }

    RadialField& operator+=(const RadialField& o);
    RadialField& operator-=(const RadialField& o);
    RadialField& operator*=(cplx c);

private:
    RadialSpectralGrid grid_;
    std::vector<cplx> c_;
};

RadialField operator+(RadialField a, const RadialField& b);
RadialField operator-(RadialField a, const RadialField& b);
RadialField operator*(cplx c, RadialField a);

// Galerkin cutoff: keep Hermite levels 2k <= level_max and sigma_lo <= |sigma| <= sigma_hi.
struct Truncation {
    std::size_t level_max = static_cast<std::size_t>(-1);
    double sigma_lo = 0.0;
    double sigma_hi = 1e300;

    static Truncation none() { return {}; }
    // Pi^{(n)}: levels <= n, 1/n <= |sigma| <= n
    static Truncation level(std::size_t n);
};

namespace heis {

// Multiplier of the linear part on Hermite level n:
// ((n+1)|sigma| - gamma sigma) / (1 - gamma). Radial mode k sits at level 2k.
double linear_symbol(std::size_t level, Sign sign, double sigma, double gamma);

RadialField truncate(const RadialField& u, const Truncation& t);
RadialField truncate(const RadialField& u, std::size_t n);
bool is_truncated(const RadialField& u, const Truncation& t);

struct PlusSplit {
    RadialField plus;
    RadialField rest;
};
PlusSplit split_plus(const RadialField& u);

// g_0^+ = f on the positive band; other modes zero.
RadialField embed_hardy(const HardyFunction& f, const RadialSpectralGrid& grid);
// (0,+) coefficients as a Hardy function on grid.hardy_grid().
HardyFunction extract_hardy(const RadialField& u);

// sum mu ((2k+1)|sigma|)^j |g|^2 with mu = h pi / (2 |sigma|), j in {-1, 0, 1, 2}
double sobolev2(const RadialField& u, int j);
cplx inner(const RadialField& u, const RadialField& v, int j);
// ||V||_{L^2}^2 + ||V||_{Hdot^2}^2
double h2_norm2(const RadialField& u);
// (|D_s| V, V)
double abs_momentum(const RadialField& u);

// (D_s V, V) = sum mu sigma |g|^2
double momentum(const RadialField& u);
// ||u||_{L^4}^4 on the collocation grid
double l4norm4(const RadialField& u);
// (1/2)(Lambda_gamma u, u) - (1/4)||u||_{L^4}^4
double energy_gamma(const RadialField& u, double gamma);

// (1/2)||u||_{Hdot^1}^2 - (1/4)||u||_{L^4}^4, the energy of the unrescaled flow
double energy(const RadialField& u);

// Symmetry action on every (k, sign) slice: g(sigma) -> e^{i theta} e^{-i s sigma} g(sigma / alpha^2) / alpha,
// by cubic interpolation in sigma (zero outside the band).
RadialField apply_symmetry(const RadialField& u, const SymmetryElement& x);

// Lambda_gamma u, mode-wise
RadialField apply_linear(const RadialField& u, double gamma);

// Truncated cubic nonlinearity by collocation. When l4 is non-null the
// collocation-grid ||u||_{L^4}^4 is returned through it.
RadialField cubic_truncated(const RadialField& u, const Truncation& t, double* l4 = nullptr);

// Real-linear derivative of cubic_truncated at u: v -> Pi(2|u|^2 v + u^2 conj(v)).
class CubicJacobian {
public:
    CubicJacobian(const RadialField& u, const Truncation& t);
    RadialField apply(const RadialField& v) const;

private:
    RadialSpectralGrid grid_;
    Truncation trunc_;
    std::vector<cplx> rows_;  // u on the collocation grid
};

// Values u(r_q, s_p) on the collocation grid, row-major [q][p], s_p = p * s_spacing.
std::vector<cplx> synthesize_physical(const RadialField& u);

}  // namespace heis
}  // namespace heisflow
