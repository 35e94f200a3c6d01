#include "heisflow/hardy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "heisflow/fft.hpp"

namespace heisflow {

struct FrequencyGrid::Data {
    GridRule rule = GridRule::cell_centered;
    double h = 1.0;
    double lower = 0.0;
    double upper = 0.0;
    std::vector<double> nodes;
    std::vector<double> weights;
};

FrequencyGrid::FrequencyGrid() : FrequencyGrid(cell_centered(1.0 / 128.0, 3840)) {}

FrequencyGrid::FrequencyGrid(std::shared_ptr<const Data> d) : d_(std::move(d)) {}

FrequencyGrid FrequencyGrid::trapezoid(double sigma_min, double sigma_max, std::size_t n) {
    if (!(sigma_min > 0.0) || !(sigma_max > sigma_min) || n < 4)
        throw ConfigError("FrequencyGrid::trapezoid: need 0 < sigma_min < sigma_max and n >= 4");
    auto d = std::make_shared<Data>();
    d->rule = GridRule::trapezoid;
    d->h = (sigma_max - sigma_min) / static_cast<double>(n - 1);
    d->lower = sigma_min;
    d->upper = sigma_max;
    d->nodes.resize(n);
    d->weights.assign(n, d->h);
    for (std::size_t j = 0; j < n; ++j) d->nodes[j] = sigma_min + d->h * static_cast<double>(j);
    d->nodes[n - 1] = sigma_max;
    d->weights.front() = d->weights.back() = 0.5 * d->h;
    return FrequencyGrid(std::move(d));
}

FrequencyGrid FrequencyGrid::cell_centered(double spacing, std::size_t n) {
    if (!(spacing > 0.0) || n < 4)
        throw ConfigError("FrequencyGrid::cell_centered: need spacing > 0 and n >= 4");
    auto d = std::make_shared<Data>();
    d->rule = GridRule::cell_centered;
    d->h = spacing;
    d->lower = 0.0;
    d->upper = spacing * static_cast<double>(n);
    d->nodes.resize(n);
    d->weights.assign(n, spacing);
    for (std::size_t j = 0; j < n; ++j) d->nodes[j] = (static_cast<double>(j) + 0.5) * spacing;
    return FrequencyGrid(std::move(d));
}

GridRule FrequencyGrid::rule() const { return d_->rule; }
std::size_t FrequencyGrid::size() const { return d_->nodes.size(); }
double FrequencyGrid::spacing() const { return d_->h; }
double FrequencyGrid::node(std::size_t j) const { return d_->nodes[j]; }
std::span<const double> FrequencyGrid::nodes() const { return d_->nodes; }
std::span<const double> FrequencyGrid::weights() const { return d_->weights; }
double FrequencyGrid::lower_edge() const { return d_->lower; }
double FrequencyGrid::upper_edge() const { return d_->upper; }

bool FrequencyGrid::operator==(const FrequencyGrid& o) const {
    if (d_ == o.d_) return true;
    return d_->rule == o.d_->rule && d_->nodes.size() == o.d_->nodes.size() &&
           d_->h == o.d_->h && d_->lower == o.d_->lower && d_->upper == o.d_->upper;
}

HardyFunction::HardyFunction(FrequencyGrid grid)
    : grid_(std::move(grid)), values_(grid_.size()) {}

HardyFunction::HardyFunction(FrequencyGrid grid, std::vector<cplx> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size())
        throw ConfigError("HardyFunction: value count does not match grid");
}

static void require_same_grid(const HardyFunction& a, const HardyFunction& b) {
    if (!(a.grid() == b.grid())) throw ConfigError("HardyFunction: grid mismatch");
}

HardyFunction& HardyFunction::operator+=(const HardyFunction& o) {
    require_same_grid(*this, o);
    for (std::size_t j = 0; j < values_.size(); ++j) values_[j] += o.values_[j];
    return *this;
}

HardyFunction& HardyFunction::operator-=(const HardyFunction& o) {
    require_same_grid(*this, o);
    for (std::size_t j = 0; j < values_.size(); ++j) values_[j] -= o.values_[j];
    return *this;
}

HardyFunction& HardyFunction::operator*=(cplx c) {
    for (auto& v : values_) v *= c;
    return *this;
}

HardyFunction operator+(HardyFunction a, const HardyFunction& b) { return a += b; }
HardyFunction operator-(HardyFunction a, const HardyFunction& b) { return a -= b; }
HardyFunction operator*(cplx c, HardyFunction a) { return a *= c; }

static double reduce_angle(double theta) {
    double t = std::remainder(theta, 2.0 * kPi);
    if (t <= -kPi) t += 2.0 * kPi;
    return t;
}

SymmetryElement SymmetryElement::inverse() const {
    return {-alpha * alpha * s, -theta, 1.0 / alpha};
}

double SymmetryElement::norm() const {
    return std::abs(s) + std::abs(reduce_angle(theta)) + std::abs(std::log(alpha));
}

SymmetryElement compose(const SymmetryElement& a, const SymmetryElement& b) {
    return {a.s + b.s / (a.alpha * a.alpha), a.theta + b.theta, a.alpha * b.alpha};
}

namespace hardy {

namespace {

// Pair sums G_q = sum_{j+l=q} w_j w_l f_j f_l, q = 0..2N-2, kept in spectral form
// padded to length L >= 2N-1 so the cubic kernel can reuse the transform.
struct PairSums {
    std::size_t n = 0;
    std::size_t len = 0;
    std::vector<cplx> g;  // length len, entries >= 2N-1 are zero
};

PairSums pair_sums(const HardyFunction& u) {
    PairSums ps;
    ps.n = u.size();
    ps.len = fft::good_size(2 * ps.n - 1);
    ps.g.assign(ps.len, cplx{});
    auto w = u.grid().weights();
    for (std::size_t j = 0; j < ps.n; ++j) ps.g[j] = w[j] * u[j];
    fft::forward(ps.g, ps.g);
    for (auto& x : ps.g) x *= x;
    fft::backward(ps.g, ps.g);
    const double scale = 1.0 / static_cast<double>(ps.len);
    for (std::size_t q = 0; q < ps.len; ++q) ps.g[q] = q < 2 * ps.n - 1 ? ps.g[q] * scale : cplx{};
    return ps;
}

double pair_node(const FrequencyGrid& grid, std::size_t q) {
    return 2.0 * grid.node(0) + grid.spacing() * static_cast<double>(q);
}

}  // namespace

HardyFunction ground_state_profile(const FrequencyGrid& grid) {
    HardyFunction f(grid);
    const cplx c{0.0, -2.0 * std::sqrt(kPi)};
    for (std::size_t j = 0; j < grid.size(); ++j) f[j] = c * std::exp(-grid.node(j));
    return f;
}

double sobolev2(const HardyFunction& u, double k) {
    return inner(u, u, k).real();
}

cplx inner(const HardyFunction& u, const HardyFunction& v, double k) {
    require_same_grid(u, v);
    auto s = u.grid().nodes();
    auto w = u.grid().weights();
    cplx acc{};
    for (std::size_t j = 0; j < u.size(); ++j) {
        double m = k == 1.0 ? w[j] : w[j] * std::pow(s[j], k - 1.0);
        acc += m * u[j] * std::conj(v[j]);
    }
    return 0.5 * acc;
}

double l4norm4(const HardyFunction& u) {
    if (u.size() == 0) return 0.0;
    PairSums ps = pair_sums(u);
    double acc = 0.0;
    for (std::size_t q = 0; q < 2 * ps.n - 1; ++q)
        acc += std::norm(ps.g[q]) / pair_node(u.grid(), q);
    return acc / (4.0 * kPi * u.grid().spacing());
}

HardyFunction cubic_projection(const HardyFunction& u) {
    const auto& grid = u.grid();
    const std::size_t n = u.size();
    HardyFunction out(grid);
    if (n == 0) return out;
    PairSums ps = pair_sums(u);
    for (std::size_t q = 0; q < 2 * n - 1; ++q) ps.g[q] /= pair_node(grid, q);
    fft::forward(ps.g, ps.g);

    // c_i = sum_k A_{i+k} w_k conj(f_k): circular correlation, no wrap for len >= 2N-1.
    std::vector<cplx> b(ps.len);
    auto w = grid.weights();
    b[0] = w[0] * std::conj(u[0]);
    for (std::size_t k = 1; k < n; ++k) b[ps.len - k] = w[k] * std::conj(u[k]);
    fft::forward(b, b);
    for (std::size_t i = 0; i < ps.len; ++i) b[i] *= ps.g[i];
    fft::backward(b, b);

    const double scale = 1.0 / (2.0 * kPi * grid.spacing() * static_cast<double>(ps.len));
    for (std::size_t i = 0; i < n; ++i) out[i] = grid.node(i) * scale * b[i];
    return out;
}

std::vector<cplx> synthesize(const HardyFunction& u, std::span<const cplx> points) {
    auto s = u.grid().nodes();
    auto w = u.grid().weights();
    const double norm = 1.0 / std::sqrt(2.0 * kPi);
    std::vector<cplx> out(points.size());
    for (std::size_t p = 0; p < points.size(); ++p) {
        if (points[p].imag() < 0.0) throw ConfigError("synthesize: point below the real axis");
        cplx acc{};
        const cplx iz = cplx{0.0, 1.0} * points[p];
        for (std::size_t j = 0; j < u.size(); ++j) acc += w[j] * u[j] * std::exp(iz * s[j]);
        out[p] = norm * acc;
    }
    return out;
}

cplx interpolate_uniform(std::span<const cplx> values, double first, double spacing, double lo,
                         double hi, double x) {
    const std::size_t n = values.size();
    if (x < lo || x > hi || n < 4) return {};
    double pos = (x - first) / spacing;
    auto i0 = static_cast<std::ptrdiff_t>(std::floor(pos)) - 1;
    i0 = std::clamp<std::ptrdiff_t>(i0, 0, static_cast<std::ptrdiff_t>(n) - 4);
    double t = pos - static_cast<double>(i0);
    // Lagrange basis on nodes 0,1,2,3 evaluated at t.
    double l0 = -(t - 1) * (t - 2) * (t - 3) / 6.0;
    double l1 = t * (t - 2) * (t - 3) / 2.0;
    double l2 = -t * (t - 1) * (t - 3) / 2.0;
    double l3 = t * (t - 1) * (t - 2) / 6.0;
    auto i = static_cast<std::size_t>(i0);
    return l0 * values[i] + l1 * values[i + 1] + l2 * values[i + 2] + l3 * values[i + 3];
}

cplx interpolate(const HardyFunction& u, double sigma) {
    const auto& grid = u.grid();
    return interpolate_uniform(u.values(), grid.node(0), grid.spacing(), grid.lower_edge(),
                               grid.upper_edge(), sigma);
}

HardyFunction apply_symmetry(const HardyFunction& u, const SymmetryElement& x) {
    if (!(x.alpha > 0.0) || !std::isfinite(x.alpha) || !std::isfinite(x.s) ||
        !std::isfinite(x.theta))
        throw ConfigError("apply_symmetry: need finite s, theta and alpha > 0");
    const auto& grid = u.grid();
    HardyFunction out(grid);
    const double a2 = x.alpha * x.alpha;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        double sj = grid.node(j);
        cplx phase = std::polar(1.0 / x.alpha, x.theta - x.s * sj);
        out[j] = phase * interpolate(u, sj / a2);
    }
    double before = sobolev2(u, 1.0);
    double after = sobolev2(out, 1.0);
    if (before > 0.0 && after < 0.99 * before) {
        std::ostringstream msg;
        msg << "apply_symmetry: " << 100.0 * (1.0 - after / before)
            << "% of the Hdot^{1/2} mass left the grid";
        warn(msg.str());
    }
    return out;
}

HardyFunction transformed_ground_state(const FrequencyGrid& grid, const SymmetryElement& x) {
    HardyFunction out(grid);
    const double a2 = x.alpha * x.alpha;
    const double c = 2.0 * std::sqrt(kPi) / x.alpha;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        double sj = grid.node(j);
        out[j] = cplx{0.0, -1.0} * std::polar(c * std::exp(-sj / a2), x.theta - x.s * sj);
    }
    return out;
}

HardyFunction band_limit(const HardyFunction& u, double lo, double hi) {
    HardyFunction out = u;
    for (std::size_t j = 0; j < u.size(); ++j) {
        double s = u.grid().node(j);
        if (s < lo || s > hi) out[j] = {};
    }
    return out;
}

}  // namespace hardy
}  // namespace heisflow
