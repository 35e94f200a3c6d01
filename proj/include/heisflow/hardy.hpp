#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "heisflow/common.hpp"

namespace heisflow {

enum class GridRule { trapezoid, cell_centered };

// Uniform frequency grid on the positive half-line with quadrature weights.
// Cheap to copy: node data is shared and immutable.
class FrequencyGrid {
public:
    // Nodes sigma_min + j h, j = 0..n-1, trapezoid weights.
    static FrequencyGrid trapezoid(double sigma_min, double sigma_max, std::size_t n);
    // Nodes (j + 1/2) h, j = 0..n-1, weights h. Covers [0, n h].
    static FrequencyGrid cell_centered(double spacing, std::size_t n);

    FrequencyGrid();

    GridRule rule() const;
    std::size_t size() const;
    double spacing() const;
    double node(std::size_t j) const;
    std::span<const double> nodes() const;
    std::span<const double> weights() const;
    // Interval represented by the grid; functions are zero outside it.
    double lower_edge() const;
    double upper_edge() const;

    bool operator==(const FrequencyGrid& other) const;

private:
    struct Data;
    explicit FrequencyGrid(std::shared_ptr<const Data> d);
    std::shared_ptr<const Data> d_;
};

// Boundary coefficient f(sigma) of a Hardy-space function on C_+,
// u(z) = (2 pi)^{-1/2} int_0^inf f(sigma) e^{i z sigma} d sigma.
class HardyFunction {
public:
    HardyFunction() = default;
    explicit HardyFunction(FrequencyGrid grid);
    HardyFunction(FrequencyGrid grid, std::vector<cplx> values);

    const FrequencyGrid& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    std::vector<cplx>& values() { return values_; }
    const std::vector<cplx>& values() const { return values_; }
    cplx& operator[](std::size_t j) { return values_[j]; }
    cplx operator[](std::size_t j) const { return values_[j]; }

    HardyFunction& operator+=(const HardyFunction& o);
    HardyFunction& operator-=(const HardyFunction& o);
    HardyFunction& operator*=(cplx c);

private:
    FrequencyGrid grid_;
    std::vector<cplx> values_;
};

HardyFunction operator+(HardyFunction a, const HardyFunction& b);
HardyFunction operator-(HardyFunction a, const HardyFunction& b);
HardyFunction operator*(cplx c, HardyFunction a);

// Symmetry group element: translation s, phase theta, dilation alpha > 0.
struct SymmetryElement {
    double s = 0.0;
    double theta = 0.0;
    double alpha = 1.0;

    static SymmetryElement identity() { return {}; }
    SymmetryElement inverse() const;
    // |s| + |theta| (reduced to (-pi, pi]) + |log alpha|
    double norm() const;
};

// T_{a*b} = T_a T_b
SymmetryElement compose(const SymmetryElement& a, const SymmetryElement& b);

namespace hardy {

// f_Q(sigma) = -2 i sqrt(pi) e^{-sigma}, coefficient of Q(z) = sqrt(2)/(z+i).
HardyFunction ground_state_profile(const FrequencyGrid& grid);

// (1/2) int sigma^{k-1} |f|^2 d sigma. k=1 is the Hdot^{1/2} norm squared (= pi for f_Q).
double sobolev2(const HardyFunction& u, double k);
// (1/2) int sigma^{k-1} f conj(g) d sigma.
cplx inner(const HardyFunction& u, const HardyFunction& v, double k);

// int_{C_+} |u|^4 dA, area measure on the upper half-plane (= pi for f_Q).
double l4norm4(const HardyFunction& u);

// Coefficient of sigma-weighted Szego projection of |u|^2 u; the right-hand
// side of i u_t = D_s Pi(|u|^2 u). cubic_projection(f_Q) = sigma f_Q.
HardyFunction cubic_projection(const HardyFunction& u);

// Evaluate u at points z in the closed upper half-plane.
std::vector<cplx> synthesize(const HardyFunction& u, std::span<const cplx> points);

// Cubic interpolation of the coefficient at arbitrary sigma; zero outside the grid's interval.
cplx interpolate(const HardyFunction& u, double sigma);
// Same for samples values[j] at first + j * spacing, zero outside [lo, hi].
cplx interpolate_uniform(std::span<const cplx> values, double first, double spacing, double lo,
                         double hi, double x);

// (T_X u)(z) = e^{i theta} alpha u(alpha^2 (z - s)), acting on coefficients as
// g(sigma) = e^{i theta} e^{-i s sigma} f(sigma/alpha^2) / alpha.
HardyFunction apply_symmetry(const HardyFunction& u, const SymmetryElement& x);

// Coefficient of T_X Q sampled directly on a grid (no interpolation).
HardyFunction transformed_ground_state(const FrequencyGrid& grid, const SymmetryElement& x);

// Restriction of the coefficient to [lo, hi].
HardyFunction band_limit(const HardyFunction& u, double lo, double hi);

}  // namespace hardy
}  // namespace heisflow
