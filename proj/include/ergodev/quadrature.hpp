#pragma once

#include <vector>

namespace ergodev {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Hermite rule for the standard normal law (weights sum to 1).
QuadratureRule gauss_hermite_normal(int n);

// Gauss-Legendre rule on [-1, 1] (weights sum to 2).
QuadratureRule gauss_legendre(int n);

// Midpoint quantizer of Unif[0,1]: nodes (2i-1)/(2M), weights 1/M.
QuadratureRule midpoint_uniform(int m);

}  // namespace ergodev
