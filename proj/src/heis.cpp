#include "heisflow/heis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "heisflow/fft.hpp"
#include "heisflow/quadrature.hpp"

namespace heisflow {

namespace {

// L_0..L_kmax at x
void laguerre_all(double x, std::size_t kmax, double* out) {
    out[0] = 1.0;
    if (kmax == 0) return;
    out[1] = 1.0 - x;
    for (std::size_t k = 1; k < kmax; ++k) {
        double kd = static_cast<double>(k);
        out[k + 1] = ((2.0 * kd + 1.0 - x) * out[k] - kd * out[k - 1]) / (kd + 1.0);
    }
}

// Smallest x beyond which L_k(x)^2 e^{-x} stays below 1e-18 of its maximum, for all k <= kmax.
double radial_extent(std::size_t kmax) {
    std::vector<double> l(kmax + 1);
    double peak = 0.0, last = 0.0;
    for (double x = 0.0; x < 1e4; x += 0.25) {
        laguerre_all(x, kmax, l.data());
        double v = 0.0;
        for (double lk : l) v = std::max(v, lk * lk * std::exp(-x));
        peak = std::max(peak, v);
        if (v > 1e-18 * peak) last = x;
        else if (x > last + 20.0) break;
    }
    return last + 1.0;
}

}  // namespace

struct RadialSpectralGrid::Data {
    RadialGridSpec spec;
    double h = 0.0;
    double ds = 0.0;
    std::vector<double> v, w;
    std::vector<double> psi;  // [q][k][m]
};

RadialSpectralGrid::RadialSpectralGrid(const RadialGridSpec& spec) {
    if (spec.n_sigma < 4 || !(spec.sigma_max > 0.0) || spec.nodes_per_panel < 2 ||
        !(spec.panel_ratio > 1.0))
        throw ConfigError("RadialSpectralGrid: invalid specification");
    auto d = std::make_shared<Data>();
    d->spec = spec;
    d->h = spec.sigma_max / static_cast<double>(spec.n_sigma);
    const std::size_t min_ns = 4 * spec.n_sigma - 1;
    if (d->spec.n_s == 0) d->spec.n_s = fft::good_size(min_ns);
    if (d->spec.n_s < min_ns) {
        std::ostringstream msg;
        msg << "RadialSpectralGrid: n_s = " << d->spec.n_s << " aliases the cubic interaction; need >= "
            << min_ns;
        throw ConfigError(msg.str());
    }
    d->ds = 2.0 * kPi / (static_cast<double>(d->spec.n_s) * d->h);

    const double sigma_min = 0.5 * d->h;
    const double v_end = radial_extent(spec.k_max) / (2.0 * sigma_min);
    const double v_first = 0.5 / spec.sigma_max;
    quad::Rule r = quad::geometric_panels(v_first, spec.panel_ratio, v_end, spec.nodes_per_panel);
    d->v = std::move(r.nodes);
    d->w = std::move(r.weights);
    for (auto& w : d->w) w *= kPi;

    const std::size_t nk = spec.k_max + 1, nm = spec.n_sigma;
    d->psi.resize(d->v.size() * nk * nm);
    std::vector<double> l(nk);
    for (std::size_t q = 0; q < d->v.size(); ++q) {
        for (std::size_t m = 0; m < nm; ++m) {
            double s = (static_cast<double>(m) + 0.5) * d->h;
            double x = 2.0 * s * d->v[q];
            laguerre_all(x, spec.k_max, l.data());
            double e = std::exp(-0.5 * x);
            for (std::size_t k = 0; k < nk; ++k) d->psi[(q * nk + k) * nm + m] = l[k] * e;
        }
    }
    d_ = std::move(d);
}

const RadialGridSpec& RadialSpectralGrid::spec() const { return d_->spec; }
std::size_t RadialSpectralGrid::k_max() const { return d_->spec.k_max; }
std::size_t RadialSpectralGrid::n_sigma() const { return d_->spec.n_sigma; }
std::size_t RadialSpectralGrid::n_s() const { return d_->spec.n_s; }
double RadialSpectralGrid::spacing() const { return d_->h; }
double RadialSpectralGrid::sigma(Sign sign, std::size_t m) const {
    double s = (static_cast<double>(m) + 0.5) * d_->h;
    return sign == Sign::plus ? s : -s;
}
std::size_t RadialSpectralGrid::size() const { return (k_max() + 1) * 2 * n_sigma(); }
std::span<const double> RadialSpectralGrid::radial_nodes() const { return d_->v; }
std::span<const double> RadialSpectralGrid::radial_weights() const { return d_->w; }
double RadialSpectralGrid::s_spacing() const { return d_->ds; }
double RadialSpectralGrid::s_half_length() const { return kPi / d_->h; }
double RadialSpectralGrid::psi(std::size_t q, std::size_t k, std::size_t m) const {
    return d_->psi[(q * (k_max() + 1) + k) * n_sigma() + m];
}
const double* RadialSpectralGrid::psi_row(std::size_t q, std::size_t k) const {
    return d_->psi.data() + (q * (k_max() + 1) + k) * n_sigma();
}
FrequencyGrid RadialSpectralGrid::hardy_grid() const {
    return FrequencyGrid::cell_centered(d_->h, d_->spec.n_sigma);
}
bool RadialSpectralGrid::operator==(const RadialSpectralGrid& o) const {
    if (d_ == o.d_) return true;
    const auto &a = d_->spec, &b = o.d_->spec;
    return a.k_max == b.k_max && a.n_sigma == b.n_sigma && a.sigma_max == b.sigma_max &&
           a.n_s == b.n_s && a.nodes_per_panel == b.nodes_per_panel &&
           a.panel_ratio == b.panel_ratio;
}

RadialField::RadialField(RadialSpectralGrid grid) : grid_(std::move(grid)), c_(grid_.size()) {}

static void require_same_grid(const RadialField& a, const RadialField& b) {
    if (!(a.grid() == b.grid())) throw ConfigError("RadialField: grid mismatch");
}

RadialField& RadialField::operator+=(const RadialField& o) {
    require_same_grid(*this, o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}
RadialField& RadialField::operator-=(const RadialField& o) {
    require_same_grid(*this, o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
}
RadialField& RadialField::operator*=(cplx c) {
    for (auto& x : c_) x *= c;
    return *this;
}
RadialField operator+(RadialField a, const RadialField& b) { return a += b; }
RadialField operator-(RadialField a, const RadialField& b) { return a -= b; }
RadialField operator*(cplx c, RadialField a) { return a *= c; }

Truncation Truncation::level(std::size_t n) {
    if (n == 0) throw ConfigError("Truncation::level: n must be positive");
    return {n, 1.0 / static_cast<double>(n), static_cast<double>(n)};
}

namespace heis {

namespace {

template <class F>
void for_each_mode(const RadialSpectralGrid& g, F&& f) {
    for (std::size_t k = 0; k <= g.k_max(); ++k)
        for (Sign s : {Sign::plus, Sign::minus})
            for (std::size_t m = 0; m < g.n_sigma(); ++m) f(k, s, m, g.index(k, s, m));
}

bool keeps(const Truncation& t, std::size_t k, double sigma) {
    double a = std::abs(sigma);
    return 2 * k <= t.level_max && a >= t.sigma_lo && a <= t.sigma_hi;
}

}  // namespace

double linear_symbol(std::size_t level, Sign sign, double sigma, double gamma) {
    if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("linear_symbol: need 0 <= gamma < 1");
    if ((sign == Sign::plus) != (sigma > 0.0)) throw ConfigError("linear_symbol: sign does not match sigma");
    double n1 = static_cast<double>(level + 1);
    return (n1 * std::abs(sigma) - gamma * sigma) / (1.0 - gamma);
}

RadialField truncate(const RadialField& u, const Truncation& t) {
    RadialField out = u;
    const auto& g = u.grid();
    for_each_mode(g, [&](std::size_t k, Sign s, std::size_t m, std::size_t i) {
        if (!keeps(t, k, g.sigma(s, m))) out.coeffs()[i] = {};
    });
    return out;
}

RadialField truncate(const RadialField& u, std::size_t n) { return truncate(u, Truncation::level(n)); }

bool is_truncated(const RadialField& u, const Truncation& t) {
    const auto& g = u.grid();
    bool ok = true;
    for_each_mode(g, [&](std::size_t k, Sign s, std::size_t m, std::size_t i) {
        if (!keeps(t, k, g.sigma(s, m)) && u.coeffs()[i] != cplx{}) ok = false;
    });
    return ok;
}

PlusSplit split_plus(const RadialField& u) {
    PlusSplit out{RadialField(u.grid()), u};
    const auto& g = u.grid();
    for (std::size_t m = 0; m < g.n_sigma(); ++m) {
        std::size_t i = g.index(0, Sign::plus, m);
        out.plus.coeffs()[i] = u.coeffs()[i];
        out.rest.coeffs()[i] = {};
    }
    return out;
}

RadialField embed_hardy(const HardyFunction& f, const RadialSpectralGrid& grid) {
    RadialField out(grid);
    FrequencyGrid hg = grid.hardy_grid();
    const auto& fg = f.grid();
    const bool aligned = fg.rule() == GridRule::cell_centered && fg.spacing() == hg.spacing();
    HardyFunction placed(hg);
    for (std::size_t m = 0; m < grid.n_sigma(); ++m) {
        cplx v = aligned ? (m < f.size() ? f[m] : cplx{}) : hardy::interpolate(f, hg.node(m));
        out.at(0, Sign::plus, m) = v;
        placed[m] = v;
    }
    double before = hardy::sobolev2(f, 1.0);
    double after = hardy::sobolev2(placed, 1.0);
    if (before > 0.0 && std::abs(after - before) > 0.01 * before) {
        std::ostringstream msg;
        msg << "embed_hardy: band clipping changed the Hdot^{1/2} mass by "
            << 100.0 * std::abs(after - before) / before << "%";
        warn(msg.str());
    }
    return out;
}

HardyFunction extract_hardy(const RadialField& u) {
    const auto& g = u.grid();
    HardyFunction f(g.hardy_grid());
    for (std::size_t m = 0; m < g.n_sigma(); ++m) f[m] = u.at(0, Sign::plus, m);
    return f;
}

cplx inner(const RadialField& u, const RadialField& v, int j) {
    require_same_grid(u, v);
    const auto& g = u.grid();
    const double h = g.spacing();
    cplx acc{};
    for_each_mode(g, [&](std::size_t k, Sign s, std::size_t m, std::size_t i) {
        double a = std::abs(g.sigma(s, m));
        double mu = h * kPi / (2.0 * a);
        double lam = static_cast<double>(2 * k + 1) * a;
        acc += mu * std::pow(lam, j) * u.coeffs()[i] * std::conj(v.coeffs()[i]);
    });
    return acc;
}

double sobolev2(const RadialField& u, int j) {
    if (j < -1 || j > 2) throw ConfigError("sobolev2: j must be in {-1, 0, 1, 2}");
    return inner(u, u, j).real();
}

double h2_norm2(const RadialField& u) { return sobolev2(u, 0) + sobolev2(u, 2); }

double abs_momentum(const RadialField& u) {
    const auto& g = u.grid();
    double acc = 0.0;
    for_each_mode(g, [&](std::size_t, Sign, std::size_t, std::size_t i) {
        acc += std::norm(u.coeffs()[i]);
    });
    return 0.5 * kPi * g.spacing() * acc;
}

double momentum(const RadialField& u) {
    const auto& g = u.grid();
    double acc = 0.0;
    for_each_mode(g, [&](std::size_t, Sign s, std::size_t, std::size_t i) {
        double n = std::norm(u.coeffs()[i]);
        acc += s == Sign::plus ? n : -n;
    });
    return 0.5 * kPi * g.spacing() * acc;
}

RadialField apply_linear(const RadialField& u, double gamma) {
    RadialField out = u;
    const auto& g = u.grid();
    for_each_mode(g, [&](std::size_t k, Sign s, std::size_t m, std::size_t i) {
        out.coeffs()[i] *= linear_symbol(2 * k, s, g.sigma(s, m), gamma);
    });
    return out;
}

RadialField apply_symmetry(const RadialField& u, const SymmetryElement& x) {
    if (!(x.alpha > 0.0)) throw ConfigError("apply_symmetry: alpha must be positive");
    const auto& g = u.grid();
    const double h = g.spacing();
    const double top = h * static_cast<double>(g.n_sigma());
    const double a2 = x.alpha * x.alpha;
    RadialField out(g);
    for (std::size_t k = 0; k <= g.k_max(); ++k)
        for (Sign s : {Sign::plus, Sign::minus}) {
            std::span<const cplx> slice(&u.coeffs()[g.index(k, s, 0)], g.n_sigma());
            for (std::size_t m = 0; m < g.n_sigma(); ++m) {
                double a = std::abs(g.sigma(s, m));
                cplx v = hardy::interpolate_uniform(slice, 0.5 * h, h, 0.0, top, a / a2);
                out.at(k, s, m) = std::polar(1.0 / x.alpha, x.theta - x.s * g.sigma(s, m)) * v;
            }
        }
    return out;
}

double energy(const RadialField& u) {
    return 0.5 * sobolev2(u, 1) - 0.25 * l4norm4(u);
}

double energy_gamma(const RadialField& u, double gamma) {
    double quad = inner(apply_linear(u, gamma), u, 0).real();
    return 0.5 * quad - 0.25 * l4norm4(u);
}

namespace {

// Node (sign, m) has sigma = (J + 1/2) h with lattice position J = m or n_s - 1 - m.
// rows[q][p]: inverse transform of sum_k g_k psi_k onto the s lattice, without
// the common factor e^{i pi p / n_s} and scaled by h / sqrt(2 pi).
std::vector<cplx> to_physical(const RadialField& u) {
    const auto& g = u.grid();
    const std::size_t nq = g.radial_nodes().size(), ns = g.n_s(), nm = g.n_sigma();
    const std::size_t nk = g.k_max() + 1;
    std::vector<cplx> rows(nq * ns);
    const double scale = g.spacing() / std::sqrt(2.0 * kPi);
    const auto& c = u.coeffs();
    std::vector<cplx> acc(nm);
    for (std::size_t q = 0; q < nq; ++q) {
        cplx* row = rows.data() + q * ns;
        for (Sign s : {Sign::plus, Sign::minus}) {
            std::fill(acc.begin(), acc.end(), cplx{});
            for (std::size_t k = 0; k < nk; ++k) {
                const double* psi = g.psi_row(q, k);
                const cplx* ck = &c[g.index(k, s, 0)];
                for (std::size_t m = 0; m < nm; ++m) acc[m] += psi[m] * ck[m];
            }
            if (s == Sign::plus) {
                for (std::size_t m = 0; m < nm; ++m) row[m] = scale * acc[m];
            } else {
                for (std::size_t m = 0; m < nm; ++m) row[ns - 1 - m] = scale * acc[m];
            }
        }
    }
    fft::backward_rows(rows, ns, nq);
    return rows;
}

}  // namespace

std::vector<cplx> synthesize_physical(const RadialField& u) {
    auto rows = to_physical(u);
    const std::size_t ns = u.grid().n_s();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        double p = static_cast<double>(i % ns);
        rows[i] *= std::polar(1.0, kPi * p / static_cast<double>(ns));
    }
    return rows;
}

double l4norm4(const RadialField& u) {
    auto rows = to_physical(u);
    const auto& g = u.grid();
    const std::size_t ns = g.n_s();
    auto w = g.radial_weights();
    double acc = 0.0;
    for (std::size_t q = 0; q < w.size(); ++q) {
        double row = 0.0;
        for (std::size_t p = 0; p < ns; ++p) row += std::pow(std::norm(rows[q * ns + p]), 2);
        acc += w[q] * row;
    }
    return acc * g.s_spacing();
}

namespace {

// Forward transform of the rows in place and radial projection onto the modes.
RadialField from_physical(std::vector<cplx>& rows, const RadialSpectralGrid& g, const Truncation& t) {
    const std::size_t nq = g.radial_nodes().size(), ns = g.n_s(), nm = g.n_sigma();
    const std::size_t nk = g.k_max() + 1;
    auto w = g.radial_weights();
    fft::forward_rows(rows, ns, nq);
    RadialField out(g);
    auto& c = out.coeffs();
    std::vector<cplx> val(nm);
    for (std::size_t q = 0; q < nq; ++q) {
        const cplx* row = rows.data() + q * ns;
        for (Sign s : {Sign::plus, Sign::minus}) {
            if (s == Sign::plus) {
                for (std::size_t m = 0; m < nm; ++m) val[m] = w[q] * row[m];
            } else {
                for (std::size_t m = 0; m < nm; ++m) val[m] = w[q] * row[ns - 1 - m];
            }
            for (std::size_t k = 0; k < nk; ++k) {
                const double* psi = g.psi_row(q, k);
                cplx* ck = &c[g.index(k, s, 0)];
                for (std::size_t m = 0; m < nm; ++m) ck[m] += psi[m] * val[m];
            }
        }
    }
    const double scale = g.s_spacing() / std::sqrt(2.0 * kPi);
    for (std::size_t k = 0; k < nk; ++k)
        for (Sign s : {Sign::plus, Sign::minus})
            for (std::size_t m = 0; m < nm; ++m) {
                const double sigma = std::abs(g.sigma(s, m));
                cplx& x = out.at(k, s, m);
                x = keeps(t, k, sigma) ? 2.0 * sigma / kPi * scale * x : cplx{};
            }
    return out;
}

}  // namespace

RadialField cubic_truncated(const RadialField& u, const Truncation& t, double* l4) {
    const auto& g = u.grid();
    const std::size_t nq = g.radial_nodes().size(), ns = g.n_s();
    auto rows = to_physical(u);
    auto w = g.radial_weights();
    double quartic = 0.0;
    for (std::size_t q = 0; q < nq; ++q) {
        double acc = 0.0;
        for (std::size_t p = 0; p < ns; ++p) {
            cplx& x = rows[q * ns + p];
            double n = std::norm(x);
            acc += n * n;
            x *= n;
        }
        quartic += w[q] * acc;
    }
    if (l4) *l4 = quartic * g.s_spacing();
    return from_physical(rows, g, t);
}

CubicJacobian::CubicJacobian(const RadialField& u, const Truncation& t)
    : grid_(u.grid()), trunc_(t), rows_(to_physical(u)) {}

RadialField CubicJacobian::apply(const RadialField& v) const {
    if (!(v.grid() == grid_)) throw ConfigError("CubicJacobian: grid mismatch");
    auto rows = to_physical(v);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const cplx u = rows_[i];
        rows[i] = 2.0 * std::norm(u) * rows[i] + u * u * std::conj(rows[i]);
    }
    return from_physical(rows, grid_, trunc_);
}

}  // namespace heis
}  // namespace heisflow
