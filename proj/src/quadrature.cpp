#include "heisflow/quadrature.hpp"

#include <cmath>

#include "heisflow/common.hpp"

namespace heisflow::quad {

Rule gauss_legendre(std::size_t n, double a, double b) {
    if (n == 0) throw ConfigError("gauss_legendre: n must be positive");
    Rule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(kPi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
                p0 = p1;
                p1 = pk;
            }
            dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.nodes[i] = mid - half * x;
        r.nodes[n - 1 - i] = mid + half * x;
        r.weights[i] = r.weights[n - 1 - i] = half * w;
    }
    if (n == 1) {
        r.nodes[0] = mid;
        r.weights[0] = b - a;
    }
    return r;
}

static void append(Rule& out, const Rule& panel) {
    out.nodes.insert(out.nodes.end(), panel.nodes.begin(), panel.nodes.end());
    out.weights.insert(out.weights.end(), panel.weights.begin(), panel.weights.end());
}

Rule geometric_panels(double first, double ratio, double end, std::size_t nodes_per_panel) {
    if (!(first > 0.0) || !(ratio > 1.0) || !(end > first))
        throw ConfigError("geometric_panels: need 0 < first < end and ratio > 1");
    Rule out;
    double a = 0.0, b = first;
    while (true) {
        append(out, gauss_legendre(nodes_per_panel, a, b));
        if (b >= end) break;
        a = b;
        b *= ratio;
    }
    return out;
}

Rule uniform_panels(double a, double b, std::size_t panels, std::size_t nodes_per_panel) {
    Rule out;
    double w = (b - a) / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p)
        append(out, gauss_legendre(nodes_per_panel, a + w * p, a + w * (p + 1)));
    return out;
}

}  // namespace heisflow::quad
