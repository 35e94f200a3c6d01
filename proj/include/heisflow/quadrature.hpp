#pragma once

#include <cstddef>
#include <vector>

namespace heisflow::quad {

struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// n-point Gauss-Legendre rule on [a, b].
Rule gauss_legendre(std::size_t n, double a = -1.0, double b = 1.0);

// Gauss-Legendre on panels [0, first], [first, first*ratio], ... until `end` is reached.
Rule geometric_panels(double first, double ratio, double end, std::size_t nodes_per_panel);

// Gauss-Legendre on `panels` equal panels of [a, b].
Rule uniform_panels(double a, double b, std::size_t panels, std::size_t nodes_per_panel);

}  // namespace heisflow::quad
