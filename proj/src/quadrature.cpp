#include "regobs/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace regobs {

Quad1D gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    Quad1D q;
    q.nodes.resize(n);
    q.weights.resize(n);
    // Newton iteration on Legendre polynomials, Chebyshev initial guess.
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        q.nodes[i] = -x;
        q.nodes[n - 1 - i] = x;
        q.weights[i] = w;
        q.weights[n - 1 - i] = w;
    }
    return q;
}

Quad1D composite_gauss(double a, double b, int min_points) {
    if (!(b > a)) throw std::invalid_argument("composite_gauss: need b > a");
    if (min_points < 1) min_points = 1;
    constexpr int kPanelOrder = 8;
    const int panels = (min_points + kPanelOrder - 1) / kPanelOrder;
    const Quad1D base = gauss_legendre(kPanelOrder);
    Quad1D q;
    q.nodes.reserve(panels * kPanelOrder);
    q.weights.reserve(panels * kPanelOrder);
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * h;
        for (int i = 0; i < kPanelOrder; ++i) {
            q.nodes.push_back(lo + 0.5 * h * (base.nodes[i] + 1.0));
            q.weights.push_back(0.5 * h * base.weights[i]);
        }
    }
    return q;
}

}  // namespace regobs
