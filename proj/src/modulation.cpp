#include "heisflow/modulation.hpp"

#include <algorithm>
#include <functional>
#include <cmath>
#include <random>
#include <sstream>

#include "heisflow/fft.hpp"

namespace heisflow {

OrbitReference OrbitReference::discrete(const FrequencyGrid& grid) {
    auto f = hardy::ground_state_profile(grid);
    double num = hardy::sobolev2(f, 1.0);
    double den = hardy::inner(hardy::cubic_projection(f), f, 0.0).real();
    if (!(den > 0.0)) throw NumericalError("OrbitReference: degenerate grid");
    OrbitReference ref;
    ref.amplitude = std::sqrt(num / den);
    const double c2 = ref.amplitude * ref.amplitude;
    ref.momentum = c2 * num;
    ref.energy = c2 * c2 * hardy::l4norm4(f);
    return ref;
}

namespace modulation {

namespace {

constexpr double kGolden = 0.6180339887498949;

// Minimizes f on [a, b] by golden-section search; returns the abscissa.
template <class F>
double golden_min(F&& f, double a, double b, double tol, std::size_t& evals) {
    double x1 = b - kGolden * (b - a), x2 = a + kGolden * (b - a);
    double f1 = f(x1), f2 = f(x2);
    evals += 2;
    while (b - a > tol) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kGolden * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kGolden * (b - a);
            f2 = f(x2);
        }
        ++evals;
    }
    return f1 <= f2 ? x1 : x2;
}

// Overlap of u with the dilated reference on a uniform frequency lattice
// sigma_j = sigma0 + j h: S(s) = sum_j a_j e^{i s sigma_j}, so that
// <u, T_{(s, theta, alpha)} R> = e^{-i theta} S(s). `fill` writes a_j for a given
// alpha and returns ||T_{(0,0,alpha)} R||^2.
class OrbitScan {
public:
    using Fill = std::function<double(double alpha, std::vector<cplx>& a)>;

    OrbitScan(std::size_t n, double sigma0, double h, const OrbitSearch& search, Fill fill)
        : n_(n), h_(h), sigma0_(sigma0), fill_(std::move(fill)) {
        fft_len_ = fft::good_size(std::max<std::size_t>(search.oversample, 1) * n_);
        buf_.resize(fft_len_);
        a_.resize(n_);
    }

    struct Best {
        double value;  // ||T R||^2 - 2 max_s |S|
        double s;
        cplx overlap;
    };

    Best at(double log_alpha) {
        double norm_r = fill_(std::exp(log_alpha), a_);
        std::fill(buf_.begin(), buf_.end(), cplx{});
        std::copy(a_.begin(), a_.end(), buf_.begin());
        fft::backward(buf_, buf_);
        std::size_t peak = 0;
        for (std::size_t m = 1; m < fft_len_; ++m)
            if (std::norm(buf_[m]) > std::norm(buf_[peak])) peak = m;
        const double ds = 2.0 * kPi / (static_cast<double>(fft_len_) * h_);
        auto signed_m = static_cast<double>(peak) -
                        (peak >= fft_len_ / 2 ? static_cast<double>(fft_len_) : 0.0);
        double s0 = signed_m * ds;
        std::size_t dummy = 0;
        double s = golden_min([&](double x) { return -std::abs(direct(x)); }, s0 - ds, s0 + ds,
                              1e-12 * std::max(1.0, std::abs(s0)) + 1e-13 / h_, dummy);
        cplx ov = direct(s);
        return {norm_r - 2.0 * std::abs(ov), s, ov};
    }

private:
    cplx direct(double s) const {
        cplx step = std::polar(1.0, s * h_);
        cplx ph = std::polar(1.0, s * sigma0_);
        cplx acc{};
        for (std::size_t j = 0; j < n_; ++j) {
            acc += a_[j] * ph;
            ph *= step;
            // renormalize the phasor now and then to stop drift in |ph|
            if ((j & 255) == 255) ph /= std::abs(ph);
        }
        return acc;
    }

    std::size_t n_ = 0, fft_len_ = 0;
    double h_ = 0.0, sigma0_ = 0.0;
    Fill fill_;
    std::vector<cplx> a_, buf_;
};

// Coarse scan of log alpha around `center`, golden refinement of the best local
// minima. Returns the best group element Y (u ~ T_Y R) and bookkeeping.
struct ScanResult {
    SymmetryElement y;
    bool interior = false;
    std::size_t evaluations = 0;
};

ScanResult search_orbit(OrbitScan& scan, double center, const OrbitSearch& search) {
    const std::size_t n = search.coarse_points;
    std::vector<double> xs(n), vals(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = center - search.log_alpha_half_width +
                2.0 * search.log_alpha_half_width * static_cast<double>(i) / static_cast<double>(n - 1);
        vals[i] = scan.at(xs[i]).value;
    }
    ScanResult out;
    out.evaluations = n;

    std::vector<std::size_t> minima;
    for (std::size_t i = 0; i < n; ++i) {
        bool left = i == 0 || vals[i] <= vals[i - 1];
        bool right = i + 1 == n || vals[i] <= vals[i + 1];
        if (left && right) minima.push_back(i);
    }
    std::sort(minima.begin(), minima.end(), [&](auto a, auto b) { return vals[a] < vals[b]; });
    if (minima.size() > std::max<std::size_t>(search.starts, 1)) minima.resize(std::max<std::size_t>(search.starts, 1));

    double best_x = xs[minima.front()];
    double best_v = vals[minima.front()];
    for (std::size_t i : minima) {
        double a = xs[i == 0 ? 0 : i - 1];
        double b = xs[i + 1 == n ? n - 1 : i + 1];
        double x = golden_min([&](double t) { return scan.at(t).value; }, a, b, search.tol, out.evaluations);
        double v = scan.at(x).value;
        ++out.evaluations;
        if (v <= best_v) {
            best_v = v;
            best_x = x;
            out.interior = i != 0 && i + 1 != n;
        }
    }
    auto best = scan.at(best_x);
    ++out.evaluations;
    out.y = {best.s, std::arg(best.overlap), std::exp(best_x)};
    return out;
}

// Hdot^1-weighted mean |sigma| of a radial field.
double mean_abs_sigma(const RadialField& u) {
    const auto& g = u.grid();
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k <= g.k_max(); ++k)
        for (Sign s : {Sign::plus, Sign::minus})
            for (std::size_t m = 0; m < g.n_sigma(); ++m) {
                double p = (2.0 * k + 1.0) * std::norm(u.at(k, s, m));
                num += p * std::abs(g.sigma(s, m));
                den += p;
            }
    return den > 0.0 ? num / den : 0.0;
}

double mean_sigma(const HardyFunction& u) {
    const auto& g = u.grid();
    const auto w = g.weights();
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        double p = w[j] * std::norm(u[j]);
        num += p * g.node(j);
        den += p;
    }
    return den > 0.0 ? num / den : 0.0;
}

}  // namespace

double gap_closed_form(const SymmetryElement& x) {
    if (!(x.alpha > 0.0)) throw ConfigError("gap_closed_form: alpha must be positive");
    const double ia = 1.0 / x.alpha;
    cplx z = std::polar(ia, x.theta) / cplx{ia * ia + 1.0, x.s};
    return 2.0 * kPi - 4.0 * kPi * z.real();
}

double orbit_gap(const HardyFunction& u, const SymmetryElement& x, const OrbitReference& ref) {
    auto q = hardy::transformed_ground_state(u.grid(), x);
    q *= ref.amplitude;
    return std::sqrt(hardy::sobolev2(u - q, 1.0));
}

OrbitFit distance_to_orbit(const HardyFunction& u, const OrbitReference& ref, const OrbitSearch& search) {
    if (search.coarse_points < 3) throw ConfigError("distance_to_orbit: need >= 3 coarse points");
    OrbitFit fit;
    double mean = mean_sigma(u);
    if (mean == 0.0) {
        fit.distance = orbit_gap(u, SymmetryElement::identity(), ref);
        fit.converged = true;
        return fit;
    }
    const auto& g = u.grid();
    const auto w = g.weights();
    OrbitScan scan(g.size(), g.node(0), g.spacing(), search, [&](double alpha, std::vector<cplx>& a) {
        const double a2 = alpha * alpha;
        const double amp = 2.0 * std::sqrt(kPi) * ref.amplitude / alpha;
        double norm_q = 0.0;
        for (std::size_t j = 0; j < a.size(); ++j) {
            double q = amp * std::exp(-g.node(j) / a2);
            norm_q += 0.5 * w[j] * q * q;
            // conj(-i q) = i q
            a[j] = 0.5 * w[j] * u[j] * cplx{0.0, q};
        }
        return norm_q;
    });
    // <sigma> of T_{(.,.,alpha)} Q is alpha^2 / 2
    auto found = search_orbit(scan, 0.5 * std::log(2.0 * mean), search);
    fit.x_star = found.y.inverse();
    fit.distance = orbit_gap(u, found.y, ref);
    fit.converged = found.interior;
    fit.evaluations = found.evaluations;

    double trivial = orbit_gap(u, SymmetryElement::identity(), ref);
    if (trivial < fit.distance) {
        fit.distance = trivial;
        fit.x_star = SymmetryElement::identity();
    }
    return fit;
}

double orbit_gap(const RadialField& u, const RadialField& reference, const SymmetryElement& x) {
    return std::sqrt(heis::sobolev2(u - heis::apply_symmetry(reference, x), 1));
}

OrbitFit distance_to_orbit(const RadialField& u, const RadialField& reference, const OrbitSearch& search) {
    if (search.coarse_points < 3) throw ConfigError("distance_to_orbit: need >= 3 coarse points");
    if (!(u.grid() == reference.grid())) throw ConfigError("distance_to_orbit: grids differ");
    OrbitFit fit;
    double mean_u = mean_abs_sigma(u), mean_r = mean_abs_sigma(reference);
    if (mean_u == 0.0 || mean_r == 0.0) {
        fit.distance = orbit_gap(u, reference, SymmetryElement::identity());
        fit.converged = true;
        return fit;
    }
    const auto& g = u.grid();
    const std::size_t n = g.n_sigma();
    const double h = g.spacing();
    // lattice -(n - 1/2) h .. (n - 1/2) h: negative m sits at n - 1 - m, positive at n + m
    OrbitScan scan(2 * n, -(static_cast<double>(n) - 0.5) * h, h, search, [&](double alpha, std::vector<cplx>& a) {
        auto r = heis::apply_symmetry(reference, {0.0, 0.0, alpha});
        std::fill(a.begin(), a.end(), cplx{});
        for (std::size_t k = 0; k <= g.k_max(); ++k) {
            const double wk = 0.5 * h * kPi * (2.0 * k + 1.0);
            for (std::size_t m = 0; m < n; ++m) {
                a[n + m] += wk * u.at(k, Sign::plus, m) * std::conj(r.at(k, Sign::plus, m));
                a[n - 1 - m] += wk * u.at(k, Sign::minus, m) * std::conj(r.at(k, Sign::minus, m));
            }
        }
        return heis::sobolev2(r, 1);
    });
    // dilation by alpha multiplies <|sigma|> by alpha^2
    auto found = search_orbit(scan, 0.5 * std::log(mean_u / mean_r), search);
    fit.x_star = found.y.inverse();
    fit.distance = orbit_gap(u, reference, found.y);
    fit.converged = found.interior;
    fit.evaluations = found.evaluations;

    double trivial = orbit_gap(u, reference, SymmetryElement::identity());
    if (trivial < fit.distance) {
        fit.distance = trivial;
        fit.x_star = SymmetryElement::identity();
    }
    return fit;
}

HeisOrbitFit distance_to_orbit(const RadialField& u, const OrbitReference& ref, const OrbitSearch& search) {
    HeisOrbitFit out;
    out.plus = distance_to_orbit(heis::extract_hardy(u), ref, search);
    out.w_norm = std::sqrt(heis::sobolev2(heis::split_plus(u).rest, 1));
    out.distance = std::sqrt(kPi * out.plus.distance * out.plus.distance + out.w_norm * out.w_norm);
    return out;
}

double delta_functional(const HardyFunction& u, const OrbitReference& ref) {
    return std::abs(hardy::sobolev2(u, 1.0) - ref.momentum) + std::abs(hardy::l4norm4(u) - ref.energy);
}

std::vector<StabilityRow> stability_ratio_experiment(const FrequencyGrid& grid,
                                                     const std::vector<double>& r_values,
                                                     std::size_t samples, std::uint64_t seed,
                                                     const StabilityOptions& opts) {
    if (r_values.empty()) throw ConfigError("stability_ratio_experiment: empty r list");
    for (double r : r_values)
        if (!(r > 0.0 && r <= 0.3)) throw ConfigError("stability_ratio_experiment: need 0 < r <= 0.3");
    if (samples == 0) throw ConfigError("stability_ratio_experiment: need samples > 0");
    if (opts.modes == 0) throw ConfigError("stability_ratio_experiment: need modes > 0");

    const auto ref = OrbitReference::discrete(grid);
    const auto q = ref.amplitude * hardy::ground_state_profile(grid);
    const std::size_t n = grid.size();

    std::vector<std::vector<double>> basis(opts.modes, std::vector<double>(n));
    for (std::size_t j = 0; j < n; ++j) {
        double x = 2.0 * grid.node(j);
        double lm1 = 0.0, l = 1.0;
        for (std::size_t k = 0; k < opts.modes; ++k) {
            basis[k][j] = 2.0 * std::exp(-0.5 * x) * l;
            double next = ((2.0 * k + 1.0 - x) * l - k * lm1) / (k + 1.0);
            lm1 = l;
            l = next;
        }
    }
    std::vector<HardyFunction> tangent(3, HardyFunction(grid));
    for (std::size_t j = 0; j < n; ++j) {
        double s = grid.node(j);
        tangent[0][j] = cplx{0.0, 1.0} * q[j];
        tangent[1][j] = cplx{0.0, -s} * q[j];
        tangent[2][j] = (2.0 * s - 1.0) * q[j];
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::vector<HardyFunction> dirs;
    dirs.reserve(samples);
    std::vector<bool> ridge;
    const auto n_tangent = static_cast<std::size_t>(std::llround(opts.tangent_fraction * samples));
    const auto n_ridge = std::min(samples - n_tangent,
                                  static_cast<std::size_t>(std::llround(opts.ridge_fraction * samples)));
    const auto e = cplx{1.0 / std::sqrt(hardy::sobolev2(q, 1.0))} * q;
    for (std::size_t i = 0; i < samples; ++i) {
        HardyFunction p(grid);
        if (i < n_tangent) {
            for (const auto& t : tangent) p += cplx{normal(rng)} * t;
        } else {
            for (std::size_t k = 0; k < opts.modes; ++k) {
                cplx c{normal(rng), normal(rng)};
                for (std::size_t j = 0; j < n; ++j) p[j] += c * basis[k][j];
            }
        }
        bool on_ridge = i >= n_tangent && i < n_tangent + n_ridge;
        if (on_ridge) p -= cplx{hardy::inner(p, e, 1.0).real()} * e;
        double norm = std::sqrt(hardy::sobolev2(p, 1.0));
        if (norm == 0.0) continue;
        p *= cplx{1.0 / norm};
        dirs.push_back(std::move(p));
        ridge.push_back(on_ridge);
    }
    // argmin over a in [-r, r] of delta(q + a e + sqrt(r^2 - a^2) v)
    auto ridge_point = [&](const HardyFunction& v, double r) {
        auto at = [&](double a) { return q + cplx{a} * e + cplx{std::sqrt(std::max(0.0, r * r - a * a))} * v; };
        auto delta_at = [&](double a) { return delta_functional(at(a), ref); };
        constexpr std::size_t scan = 64;
        double best = -r, best_val = INFINITY;
        for (std::size_t k = 0; k <= scan; ++k) {
            double a = -r + 2.0 * r * static_cast<double>(k) / scan;
            double val = delta_at(a);
            if (val < best_val) best = a, best_val = val;
        }
        double step = 2.0 * r / scan;
        std::size_t evals = 0;
        double a = golden_min(delta_at, std::max(-r, best - step), std::min(r, best + step), 1e-6 * r, evals);
        return at(delta_at(a) < best_val ? a : best);
    };

    std::vector<StabilityRow> rows;
    for (double r : r_values) {
        std::vector<double> ratio(dirs.size(), -1.0);
        parallel_for(dirs.size(), opts.workers, [&](std::size_t i) {
            HardyFunction u = ridge[i] ? ridge_point(dirs[i], r) : q + cplx{r} * dirs[i];
            double delta = delta_functional(u, ref);
            if (delta <= opts.delta_floor) return;
            double d = distance_to_orbit(u, ref, opts.search).distance;
            ratio[i] = d * d / delta;
        });
        StabilityRow row;
        row.r = r;
        row.samples = dirs.size();
        double sum = 0.0;
        for (double x : ratio) {
            if (x < 0.0) {
                ++row.excluded;
                continue;
            }
            row.sup_ratio = std::max(row.sup_ratio, x);
            sum += x;
        }
        std::size_t used = row.samples - row.excluded;
        row.mean_ratio = used > 0 ? sum / static_cast<double>(used) : 0.0;
        rows.push_back(row);
    }
    return rows;
}

namespace {

// Shared anchoring logic over n snapshots. gap(i, X) is ||u_i - T_X R|| and
// fit(i) the orbit fit of snapshot i, both in the output units; extra[i] is an
// orthogonal remainder added to the reported distance.
ModulationTrack track(std::size_t n, const std::function<double(std::size_t, const SymmetryElement&)>& gap_of,
                      const std::function<OrbitFit(std::size_t)>& fit_of, const std::vector<double>& extra,
                      double threshold, const ModulationOptions& opts) {
    if (!(threshold > 0.0)) throw ConfigError("track_modulation: threshold must be positive");
    if (!(opts.epsilon >= 0.0)) throw ConfigError("track_modulation: epsilon must be >= 0");
    ModulationTrack out;
    out.anchor.resize(n);
    out.anchor_id.resize(n);
    out.anchor_gap.resize(n);
    out.fits.resize(n);
    out.distance.resize(n);
    std::vector<bool> fitted(n, false);

    SymmetryElement current;
    std::size_t id = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double gap = i == 0 ? INFINITY : gap_of(i, current);
        if (gap > (1.0 + opts.epsilon) * threshold) {
            auto fit = fit_of(i);
            if (fit.distance > 2.0 * threshold) {
                std::ostringstream msg;
                msg << "track_modulation: left the tube at snapshot " << i << " (distance " << fit.distance
                    << ", threshold " << threshold << ")";
                throw NumericalError(msg.str());
            }
            auto next = fit.anchor();
            if (i > 0) {
                out.jumps.push_back(compose(current, next.inverse()).norm());
                ++id;
            }
            current = next;
            out.fits[i] = fit;
            fitted[i] = true;
            gap = gap_of(i, current);
        }
        out.anchor[i] = current;
        out.anchor_id[i] = id;
        out.anchor_gap[i] = gap;
    }
    parallel_for(n, opts.workers, [&](std::size_t i) {
        if (!fitted[i]) out.fits[i] = fit_of(i);
    });
    for (std::size_t i = 0; i < n; ++i) {
        double d = out.fits[i].distance;
        out.distance[i] = std::sqrt(d * d + extra[i] * extra[i]);
        out.sup_distance = std::max(out.sup_distance, out.distance[i]);
    }
    for (double j : out.jumps) out.sup_jump = std::max(out.sup_jump, j);
    return out;
}

}  // namespace

ModulationTrack track_modulation(const HardyTrajectory& traj, double threshold, const ModulationOptions& opts) {
    const auto& u = traj.snapshots;
    return track(
        u.size(), [&](std::size_t i, const SymmetryElement& x) { return orbit_gap(u[i], x, opts.reference); },
        [&](std::size_t i) { return distance_to_orbit(u[i], opts.reference, opts.search); },
        std::vector<double>(u.size(), 0.0), threshold, opts);
}

ModulationTrack track_modulation(const HeisTrajectory& traj, double threshold, const ModulationOptions& opts) {
    std::vector<HardyFunction> parts;
    std::vector<double> extra;
    for (const auto& u : traj.snapshots) {
        parts.push_back(heis::extract_hardy(u));
        extra.push_back(std::sqrt(heis::sobolev2(heis::split_plus(u).rest, 1)));
    }
    const double scale = std::sqrt(kPi);
    return track(
        parts.size(),
        [&](std::size_t i, const SymmetryElement& x) { return scale * orbit_gap(parts[i], x, opts.reference); },
        [&](std::size_t i) {
            auto fit = distance_to_orbit(parts[i], opts.reference, opts.search);
            fit.distance *= scale;
            return fit;
        },
        extra, threshold, opts);
}

ModulationTrack track_modulation(const HeisTrajectory& traj, const RadialField& reference, double threshold,
                                 const ModulationOptions& opts) {
    const auto& u = traj.snapshots;
    return track(
        u.size(), [&](std::size_t i, const SymmetryElement& x) { return orbit_gap(u[i], reference, x); },
        [&](std::size_t i) { return distance_to_orbit(u[i], reference, opts.search); },
        std::vector<double>(u.size(), 0.0), threshold, opts);
}

}  // namespace modulation
}  // namespace heisflow
