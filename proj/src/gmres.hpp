#pragma once

// Restarted GMRES for real-linear operators on real vectors with a caller-supplied inner product.

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace heisflow::detail {

using Vec = std::vector<double>;

struct GmresResult {
    Vec x;
    double relative_residual = 0.0;
    std::size_t iterations = 0;
};

inline GmresResult gmres(const std::function<Vec(const Vec&)>& op, const Vec& b,
                         const std::function<double(const Vec&, const Vec&)>& dot, double rtol,
                         std::size_t restart, std::size_t max_iter) {
    const std::size_t n = b.size();
    GmresResult res;
    res.x.assign(n, 0.0);
    const double bnorm = std::sqrt(dot(b, b));
    if (bnorm == 0.0) return res;

    Vec r = b;
    double beta = bnorm;
    while (res.iterations < max_iter) {
        std::vector<Vec> v;
        v.reserve(restart + 1);
        Vec v0(n);
        for (std::size_t i = 0; i < n; ++i) v0[i] = r[i] / beta;
        v.push_back(std::move(v0));
        std::vector<std::vector<double>> hcol;  // hcol[j] has j+2 entries after rotation
        std::vector<double> cs, sn, g{beta};
        std::size_t j = 0;
        for (; j < restart && res.iterations < max_iter; ++j, ++res.iterations) {
            Vec w = op(v[j]);
            std::vector<double> h(j + 2);
            for (std::size_t i = 0; i <= j; ++i) {
                h[i] = dot(w, v[i]);
                for (std::size_t k = 0; k < n; ++k) w[k] -= h[i] * v[i][k];
            }
            h[j + 1] = std::sqrt(dot(w, w));
            for (std::size_t i = 0; i < j; ++i) {
                double t = cs[i] * h[i] + sn[i] * h[i + 1];
                h[i + 1] = -sn[i] * h[i] + cs[i] * h[i + 1];
                h[i] = t;
            }
            double d = std::hypot(h[j], h[j + 1]);
            cs.push_back(d == 0.0 ? 1.0 : h[j] / d);
            sn.push_back(d == 0.0 ? 0.0 : h[j + 1] / d);
            double hj1 = h[j + 1];
            h[j] = d;
            h[j + 1] = 0.0;
            g.push_back(-sn[j] * g[j]);
            g[j] *= cs[j];
            hcol.push_back(std::move(h));
            if (hj1 > 0.0) {
                for (std::size_t k = 0; k < n; ++k) w[k] /= hj1;
            }
            v.push_back(std::move(w));
            if (std::abs(g[j + 1]) <= rtol * bnorm || hj1 == 0.0) {
                ++j;
                ++res.iterations;
                break;
            }
        }
        // back substitution
        std::vector<double> y(j);
        for (std::size_t i = j; i-- > 0;) {
            double acc = g[i];
            for (std::size_t k = i + 1; k < j; ++k) acc -= hcol[k][i] * y[k];
            y[i] = acc / hcol[i][i];
        }
        for (std::size_t i = 0; i < j; ++i)
            for (std::size_t k = 0; k < n; ++k) res.x[k] += y[i] * v[i][k];
        Vec ax = op(res.x);
        for (std::size_t k = 0; k < n; ++k) r[k] = b[k] - ax[k];
        beta = std::sqrt(dot(r, r));
        res.relative_residual = beta / bnorm;
        if (res.relative_residual <= rtol) break;
    }
    return res;
}

}  // namespace heisflow::detail
