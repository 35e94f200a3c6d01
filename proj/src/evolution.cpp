#include "heisflow/evolution.hpp"

#include <cmath>
#include <sstream>

namespace heisflow {

namespace {

std::size_t step_count(const IntegratorConfig& cfg) {
    if (!(cfg.dt > 0.0) || !(cfg.t_final >= 0.0) || cfg.sample_every == 0)
        throw ConfigError("IntegratorConfig: need dt > 0, t_final >= 0, sample_every >= 1");
    double n = cfg.t_final / cfg.dt;
    auto steps = static_cast<std::size_t>(std::llround(n));
    if (std::abs(n - static_cast<double>(steps)) > 1e-6)
        throw ConfigError("IntegratorConfig: t_final must be a multiple of dt");
    return steps;
}

bool finite(const std::vector<cplx>& v) {
    for (const auto& x : v)
        if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
    return true;
}

void check_drift(double p0, double p, double t) {
    if (!std::isfinite(p)) {
        std::ostringstream msg;
        msg << "non-finite state at t = " << t;
        throw NumericalError(msg.str());
    }
    double scale = std::max(std::abs(p0), 1e-300);
    if (std::abs(p - p0) > 1e-3 * scale) {
        std::ostringstream msg;
        msg << "momentum drift " << std::abs(p - p0) / scale << " exceeds 1e-3 at t = " << t;
        throw NumericalError(msg.str());
    }
}

// y += a * x
template <class Field>
void axpy(Field& y, cplx a, const Field& x) {
    auto& yc = [&]() -> auto& {
        if constexpr (std::is_same_v<Field, HardyFunction>) return y.values();
        else return y.coeffs();
    }();
    const auto& xc = [&]() -> const auto& {
        if constexpr (std::is_same_v<Field, HardyFunction>) return x.values();
        else return x.coeffs();
    }();
    for (std::size_t i = 0; i < yc.size(); ++i) yc[i] += a * xc[i];
}

// phi_1, phi_2, phi_3 with phi_k(z) = sum_j z^j / (j + k)!
struct Phi {
    cplx p1, p2, p3;
};

Phi phi(cplx z) {
    if (std::abs(z) < 1.0) {
        Phi r{};
        cplx term{1.0, 0.0};  // z^j / j!
        for (int j = 0; j < 30; ++j) {
            double a = j + 1.0, b = j + 2.0, c = j + 3.0;
            r.p1 += term / a;
            r.p2 += term / (a * b);
            r.p3 += term / (a * b * c);
            term *= z / a;
        }
        return r;
    }
    cplx e = std::exp(z);
    cplx p1 = (e - 1.0) / z;
    cplx p2 = (p1 - 1.0) / z;
    cplx p3 = (p2 - 0.5) / z;
    return {p1, p2, p3};
}

}  // namespace

HardyTrajectory evolve_limit(const HardyFunction& u0, const IntegratorConfig& cfg) {
    const std::size_t steps = step_count(cfg);
    const double dt = cfg.backward ? -cfg.dt : cfg.dt;
    const cplx mi{0.0, -1.0};
    auto rhs = [&](const HardyFunction& f) { return mi * hardy::cubic_projection(f); };

    HardyTrajectory traj;
    auto record = [&](const HardyFunction& f, double t) {
        SeriesRow row;
        row.t = t;
        row.momentum = hardy::sobolev2(f, 1.0);
        row.l4 = hardy::l4norm4(f);
        row.energy = row.l4;
        row.dt_norm = std::sqrt(hardy::sobolev2(hardy::cubic_projection(f), -1.0));
        traj.times.push_back(t);
        traj.snapshots.push_back(f);
        traj.series.push_back(row);
    };

    HardyFunction u = u0;
    record(u, 0.0);
    const double p0 = traj.series.front().momentum;
    for (std::size_t n = 1; n <= steps; ++n) {
        auto k1 = rhs(u);
        HardyFunction y = u;
        axpy(y, 0.5 * dt, k1);
        auto k2 = rhs(y);
        y = u;
        axpy(y, 0.5 * dt, k2);
        auto k3 = rhs(y);
        y = u;
        axpy(y, dt, k3);
        auto k4 = rhs(y);
        axpy(u, dt / 6.0, k1);
        axpy(u, dt / 3.0, k2);
        axpy(u, dt / 3.0, k3);
        axpy(u, dt / 6.0, k4);
        const double t = dt * static_cast<double>(n);
        if (n % cfg.sample_every == 0 || n == steps) {
            if (!finite(u.values())) check_drift(p0, std::nan(""), t);
            record(u, t);
            check_drift(p0, traj.series.back().momentum, t);
        }
    }
    return traj;
}

HeisTrajectory evolve_heis(const RadialField& u0, double gamma, const Truncation& trunc,
                           const IntegratorConfig& cfg) {
    const std::size_t steps = step_count(cfg);
    if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("evolve_heis: need 0 <= gamma < 1");
    if (!heis::is_truncated(u0, trunc)) throw ConfigError("evolve_heis: initial data is not truncated");
    const auto& g = u0.grid();
    const double dt = cfg.backward ? -cfg.dt : cfg.dt;

    // Diagonal symbol on the flattened coefficient layout.
    std::vector<double> lam(g.size());
    double lam_max = 0.0;
    for (std::size_t k = 0; k <= g.k_max(); ++k)
        for (Sign s : {Sign::plus, Sign::minus})
            for (std::size_t m = 0; m < g.n_sigma(); ++m) {
                double l = heis::linear_symbol(2 * k, s, g.sigma(s, m), gamma);
                lam[g.index(k, s, m)] = l;
                lam_max = std::max(lam_max, l);
            }
    if (cfg.scheme == Scheme::rk4 && lam_max * cfg.dt > 1.0) {
        std::ostringstream msg;
        msg << "evolve_heis: explicit RK4 with max symbol * dt = " << lam_max * cfg.dt
            << " > 1; use ifrk4";
        throw ConfigError(msg.str());
    }

    const cplx mi{0.0, -1.0};
    auto nonlinear = [&](const RadialField& u) { return mi * heis::cubic_truncated(u, trunc); };

    HeisTrajectory traj;
    auto record = [&](const RadialField& u, double t) {
        SeriesRow row;
        row.t = t;
        double l4 = 0.0;
        auto n = heis::cubic_truncated(u, trunc, &l4);
        auto ut = heis::apply_linear(u, gamma) - n;
        row.momentum = heis::momentum(u);
        row.l4 = l4;
        row.energy = 0.5 * heis::inner(heis::apply_linear(u, gamma), u, 0).real() - 0.25 * l4;
        auto sp = heis::split_plus(u);
        row.w_norm = std::sqrt(heis::sobolev2(sp.rest, 1));
        row.uplus_norm = std::sqrt(heis::sobolev2(sp.plus, 1));
        row.dt_norm = std::sqrt(heis::sobolev2(ut, -1));
        traj.times.push_back(t);
        traj.snapshots.push_back(u);
        traj.series.push_back(row);
    };

    RadialField u = u0;
    record(u, 0.0);
    const double p0 = traj.series.front().momentum;

    if (cfg.scheme == Scheme::rk4) {
        auto rhs = [&](const RadialField& v) {
            RadialField out = nonlinear(v);
            auto& oc = out.coeffs();
            const auto& vc = v.coeffs();
            for (std::size_t i = 0; i < oc.size(); ++i) oc[i] += cplx{0.0, lam[i]} * vc[i];
            return out;
        };
        for (std::size_t n = 1; n <= steps; ++n) {
            auto k1 = rhs(u);
            RadialField y = u;
            axpy(y, 0.5 * dt, k1);
            auto k2 = rhs(y);
            y = u;
            axpy(y, 0.5 * dt, k2);
            auto k3 = rhs(y);
            y = u;
            axpy(y, dt, k3);
            auto k4 = rhs(y);
            axpy(u, dt / 6.0, k1);
            axpy(u, dt / 3.0, k2);
            axpy(u, dt / 3.0, k3);
            axpy(u, dt / 6.0, k4);
            const double t = dt * static_cast<double>(n);
            if (n % cfg.sample_every == 0 || n == steps) {
                if (!finite(u.coeffs())) check_drift(p0, std::nan(""), t);
                record(u, t);
                check_drift(p0, traj.series.back().momentum, t);
            }
        }
        return traj;
    }

    if (cfg.scheme == Scheme::etdrk4) {
        // Cox-Matthews ETDRK4 for U' = L U + N(U), L = i Lambda diagonal.
        const std::size_t n_c = lam.size();
        std::vector<cplx> ex(n_c), eh(n_c), qh(n_c), f1(n_c), f2(n_c), f3(n_c);
        for (std::size_t i = 0; i < n_c; ++i) {
            cplx z{0.0, lam[i] * dt};
            auto full = phi(z);
            auto half = phi(0.5 * z);
            ex[i] = std::exp(z);
            eh[i] = std::exp(0.5 * z);
            qh[i] = 0.5 * dt * half.p1;
            f1[i] = dt * (full.p1 - 3.0 * full.p2 + 4.0 * full.p3);
            f2[i] = dt * (full.p2 - 2.0 * full.p3);
            f3[i] = dt * (4.0 * full.p3 - full.p2);
        }
        RadialField a(g), b(g), c(g);
        for (std::size_t n = 1; n <= steps; ++n) {
            auto nu = nonlinear(u);
            const auto& uc = u.coeffs();
            for (std::size_t i = 0; i < n_c; ++i) a.coeffs()[i] = eh[i] * uc[i] + qh[i] * nu.coeffs()[i];
            auto na = nonlinear(a);
            for (std::size_t i = 0; i < n_c; ++i) b.coeffs()[i] = eh[i] * uc[i] + qh[i] * na.coeffs()[i];
            auto nb = nonlinear(b);
            for (std::size_t i = 0; i < n_c; ++i)
                c.coeffs()[i] = eh[i] * a.coeffs()[i] + qh[i] * (2.0 * nb.coeffs()[i] - nu.coeffs()[i]);
            auto nc = nonlinear(c);
            auto& out = u.coeffs();
            for (std::size_t i = 0; i < n_c; ++i)
                out[i] = ex[i] * out[i] + f1[i] * nu.coeffs()[i] +
                         2.0 * f2[i] * (na.coeffs()[i] + nb.coeffs()[i]) + f3[i] * nc.coeffs()[i];

            const double t = dt * static_cast<double>(n);
            if (n % cfg.sample_every == 0 || n == steps) {
                if (!finite(u.coeffs())) check_drift(p0, std::nan(""), t);
                record(u, t);
                check_drift(p0, traj.series.back().momentum, t);
            }
        }
        return traj;
    }

    // Lawson integrating-factor RK4 with E = exp(i Lambda dt / 2).
    std::vector<cplx> e1(lam.size()), e2(lam.size());
    for (std::size_t i = 0; i < lam.size(); ++i) {
        e1[i] = std::polar(1.0, 0.5 * lam[i] * dt);
        e2[i] = e1[i] * e1[i];
    }
    auto mul = [](const std::vector<cplx>& e, RadialField v) {
        auto& c = v.coeffs();
        for (std::size_t i = 0; i < c.size(); ++i) c[i] *= e[i];
        return v;
    };
    for (std::size_t n = 1; n <= steps; ++n) {
        auto k1 = nonlinear(u);
        RadialField eu = mul(e1, u);
        RadialField y = u;
        axpy(y, 0.5 * dt, k1);
        auto k2 = nonlinear(mul(e1, y));
        y = eu;
        axpy(y, 0.5 * dt, k2);
        auto k3 = nonlinear(y);
        y = mul(e1, eu);
        axpy(y, dt, mul(e1, k3));
        auto k4 = nonlinear(y);

        RadialField next = mul(e1, eu);
        axpy(next, dt / 6.0, mul(e2, k1));
        axpy(next, dt / 3.0, mul(e1, k2));
        axpy(next, dt / 3.0, mul(e1, k3));
        axpy(next, dt / 6.0, k4);
        u = std::move(next);

        const double t = dt * static_cast<double>(n);
        if (n % cfg.sample_every == 0 || n == steps) {
            if (!finite(u.coeffs())) check_drift(p0, std::nan(""), t);
            record(u, t);
            check_drift(p0, traj.series.back().momentum, t);
        }
    }
    return traj;
}

DtNormDiagnostic dt_norm_diagnostic(const std::vector<SeriesRow>& series) {
    DtNormDiagnostic d;
    for (const auto& row : series) {
        double denom = std::pow(row.l4, 0.75);
        double r = denom > 0.0 ? row.dt_norm / denom : 0.0;
        d.ratio.push_back(r);
        d.sup = std::max(d.sup, r);
    }
    return d;
}

}  // namespace heisflow
