#pragma once

#include <vector>

namespace regobs {

/// 1D quadrature rule: nodes and weights on some interval.
struct Quad1D {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1].
Quad1D gauss_legendre(int n);

/// Composite Gauss-Legendre rule on [a, b] built from 8-point panels,
/// with at least min_points nodes in total.
Quad1D composite_gauss(double a, double b, int min_points);

}  // namespace regobs
