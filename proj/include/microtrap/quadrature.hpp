#pragma once

#include <vector>

namespace microtrap {

struct QuadratureRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;  // sum to 2
};

// Gauss-Legendre rule of order n (exact for polynomials up to degree 2n-1).
QuadratureRule gauss_legendre(int n);

}  // namespace microtrap
