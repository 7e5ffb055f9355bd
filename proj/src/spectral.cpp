#include "regobs/spectral.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "regobs/quadrature.hpp"

namespace regobs {

namespace {

constexpr double kPi = std::numbers::pi;

void check_point(double xi1, double xi2) {
    if (xi1 < 0.0 || xi1 > 1.0 || xi2 < 0.0 || xi2 > 1.0)
        throw std::invalid_argument("point outside the closed unit square");
}

void check_field(const ModalBasis& basis, const ModalField& field) {
    if (field.coeffs.size() != basis.size())
        throw std::invalid_argument("field coefficient count does not match basis");
}

double l2_cos_factor(int n) { return n == 0 ? 1.0 : 0.5; }

// cos(m pi) for the parallel-coordinate value at the far edge.
double edge_cos_sign(int m) { return (m % 2 == 0) ? 1.0 : -1.0; }

}  // namespace

ModalBasis::ModalBasis(int n_max) : n_max_(n_max) {
    if (n_max < 1) throw std::invalid_argument("build_basis: N_max must be >= 1");
    const int count = (n_max + 1) * (n_max + 1);
    modes_.reserve(count);
    eigenvalues_.reserve(count);
    h1_factors_.reserve(count);
    for (int n = 0; n <= n_max; ++n) {
        for (int m = 0; m <= n_max; ++m) {
            modes_.push_back({n, m});
            const double lambda = -static_cast<double>(n * n + m * m) * kPi * kPi;
            eigenvalues_.push_back(lambda);
            const double l2 = l2_cos_factor(n) * l2_cos_factor(m);
            h1_factors_.push_back(1.0 / std::sqrt((1.0 - lambda) * l2));
        }
    }
}

int ModalBasis::index_of(int n, int m) const {
    if (n < 0 || n > n_max_ || m < 0 || m > n_max_)
        throw std::invalid_argument("mode index outside truncation");
    return n * (n_max_ + 1) + m;
}

double ModalBasis::eigenfunction(int k, double xi1, double xi2) const {
    check_point(xi1, xi2);
    const ModeIndex& mi = modes_[k];
    return h1_factors_[k] * std::cos(mi.n * kPi * xi1) * std::cos(mi.m * kPi * xi2);
}

std::array<double, 2> ModalBasis::eigenfunction_gradient(int k, double xi1, double xi2) const {
    check_point(xi1, xi2);
    const ModeIndex& mi = modes_[k];
    const double a = h1_factors_[k];
    const double c1 = std::cos(mi.n * kPi * xi1), s1 = std::sin(mi.n * kPi * xi1);
    const double c2 = std::cos(mi.m * kPi * xi2), s2 = std::sin(mi.m * kPi * xi2);
    return {-a * mi.n * kPi * s1 * c2, -a * mi.m * kPi * c1 * s2};
}

ModalField ModalField::zero(const ModalBasis& basis) {
    ModalField f;
    f.coeffs = Eigen::VectorXd::Zero(basis.size());
    return f;
}

std::array<double, 4> InternalRegion::rect() const {
    switch (region.edge) {
        case Edge::Top: return {region.a, region.b, 1.0 - r, 1.0};
        case Edge::Bottom: return {region.a, region.b, 0.0, r};
        case Edge::Left: return {0.0, r, region.a, region.b};
        case Edge::Right: return {1.0 - r, 1.0, region.a, region.b};
    }
    return {0, 0, 0, 0};
}

std::array<double, 2> GradientTrace::eval(double s) const {
    double tang = 0.0, norm = 0.0;
    for (int k = 1; k <= tangential_sine_coeffs.size(); ++k) {
        const double sk = std::sin(k * kPi * s);
        tang += tangential_sine_coeffs[k - 1] * sk;
        norm += normal_sine_coeffs[k - 1] * sk;
    }
    return {tang, norm};
}

ModalBasis build_basis(int n_max) { return ModalBasis(n_max); }

double field_eval(const ModalBasis& basis, const ModalField& field, double xi1, double xi2) {
    check_field(basis, field);
    double v = 0.0;
    for (int k = 0; k < basis.size(); ++k)
        if (field.coeffs[k] != 0.0) v += field.coeffs[k] * basis.eigenfunction(k, xi1, xi2);
    return v;
}

ModalField semigroup_apply(const ModalBasis& basis, const ModalField& field, double t) {
    check_field(basis, field);
    if (t < 0.0) throw std::invalid_argument("semigroup_apply: t must be >= 0");
    ModalField out = field;
    for (int k = 0; k < basis.size(); ++k)
        out.coeffs[k] *= std::exp(basis.eigenvalue(k) * t);
    return out;
}

ModalField mild_solution_step(const ModalBasis& basis, const ModalField& field,
                              const ModalField& input_vec, double u, double dt,
                              double shift_c) {
    check_field(basis, field);
    check_field(basis, input_vec);
    if (dt <= 0.0) throw std::invalid_argument("mild_solution_step: dt must be > 0");
    ModalField out = field;
    for (int k = 0; k < basis.size(); ++k) {
        const double lam = basis.eigenvalue(k) + shift_c;
        const double e = std::exp(lam * dt);
        // phi1(lam dt) = (e^{lam dt} - 1)/lam, with the lam -> 0 limit dt.
        const double phi1 = (lam == 0.0) ? dt : (e - 1.0) / lam;
        out.coeffs[k] = e * out.coeffs[k] + u * input_vec.coeffs[k] * phi1;
    }
    return out;
}

std::array<double, 2> gradient_field_eval(const ModalBasis& basis, const ModalField& field,
                                          double xi1, double xi2) {
    check_field(basis, field);
    check_point(xi1, xi2);
    double g1 = 0.0, g2 = 0.0;
    for (int k = 0; k < basis.size(); ++k) {
        if (field.coeffs[k] == 0.0) continue;
        const auto g = basis.eigenfunction_gradient(k, xi1, xi2);
        g1 += field.coeffs[k] * g[0];
        g2 += field.coeffs[k] * g[1];
    }
    return {g1, g2};
}

Eigen::MatrixXd gradient_trace_matrix(const ModalBasis& basis, const BoundaryRegion& region) {
    const int nmax = basis.truncation();
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(2 * nmax, basis.size());
    // The tangential derivative along an edge is a pure sine series in the
    // arc parameter; the normal derivative vanishes identically for the
    // Neumann cosine basis (sin(k pi) = 0 at either edge coordinate).
    for (int k = 1; k <= nmax; ++k) {
        for (int j = 0; j <= nmax; ++j) {
            int col;
            double sign;
            switch (region.edge) {
                case Edge::Top:
                    col = basis.index_of(k, j);
                    sign = edge_cos_sign(j);
                    break;
                case Edge::Bottom:
                    col = basis.index_of(k, j);
                    sign = 1.0;
                    break;
                case Edge::Left:
                    col = basis.index_of(j, k);
                    sign = 1.0;
                    break;
                case Edge::Right:
                    col = basis.index_of(j, k);
                    sign = edge_cos_sign(j);
                    break;
                default: continue;
            }
            T(k - 1, col) = -k * kPi * basis.h1_norm_factor(col) * sign;
        }
    }
    return T;
}

GradientTrace gradient_trace(const ModalBasis& basis, const ModalField& field,
                             const BoundaryRegion& region) {
    check_field(basis, field);
    const Eigen::MatrixXd T = gradient_trace_matrix(basis, region);
    const Eigen::VectorXd coeffs = T * field.coeffs;
    const int nmax = basis.truncation();
    GradientTrace tr;
    tr.region = region;
    tr.tangential_sine_coeffs = coeffs.head(nmax);
    tr.normal_sine_coeffs = coeffs.tail(nmax);
    return tr;
}

double trace_norm_L2(const GradientTrace& trace, const BoundaryRegion& region) {
    if (region.edge != trace.region.edge || region.a != trace.region.a ||
        region.b != trace.region.b)
        throw std::invalid_argument("trace_norm_L2: region does not match trace");
    const int nmax = static_cast<int>(trace.tangential_sine_coeffs.size());
    if (region.a == 0.0 && region.b == 1.0) {
        // sin(k pi s) are orthogonal on [0,1] with squared norm 1/2.
        double s = 0.0;
        for (int k = 0; k < nmax; ++k)
            s += trace.tangential_sine_coeffs[k] * trace.tangential_sine_coeffs[k] +
                 trace.normal_sine_coeffs[k] * trace.normal_sine_coeffs[k];
        return std::sqrt(0.5 * s);
    }
    const Quad1D q = composite_gauss(region.a, region.b, 8 * nmax);
    double acc = 0.0;
    for (size_t i = 0; i < q.nodes.size(); ++i) {
        const auto v = trace.eval(q.nodes[i]);
        acc += q.weights[i] * (v[0] * v[0] + v[1] * v[1]);
    }
    return std::sqrt(acc);
}

InternalRegion build_omega_r(const BoundaryRegion& region, double r) {
    if (!(r > 0.0 && r < 1.0))
        throw std::invalid_argument("build_omega_r: r must lie in (0, 1)");
    return {region, r};
}

Eigen::MatrixXd restrict_internal(const ModalBasis& basis, const InternalRegion& omega) {
    const auto rect = omega.rect();
    const int nmax = basis.truncation();
    const int pts = 16 * nmax;
    const Quad1D qx = composite_gauss(rect[0], rect[1], pts);
    const Quad1D qy = composite_gauss(rect[2], rect[3], pts);

    // Per-axis integrals of cos(n pi t) cos(n' pi t) and sin sin; the
    // integrand of the gradient Gram matrix factorizes over the axes.
    const int f = nmax + 1;
    Eigen::MatrixXd Cx = Eigen::MatrixXd::Zero(f, f), Sx = Eigen::MatrixXd::Zero(f, f);
    Eigen::MatrixXd Cy = Eigen::MatrixXd::Zero(f, f), Sy = Eigen::MatrixXd::Zero(f, f);
    auto fill = [](const Quad1D& q, int f, Eigen::MatrixXd& C, Eigen::MatrixXd& S) {
        const int np = static_cast<int>(q.nodes.size());
        Eigen::MatrixXd cosv(f, np), sinv(f, np);
        for (int n = 0; n < f; ++n)
            for (int i = 0; i < np; ++i) {
                cosv(n, i) = std::cos(n * kPi * q.nodes[i]);
                sinv(n, i) = std::sin(n * kPi * q.nodes[i]);
            }
        Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(q.weights.data(), np);
        C = cosv * w.asDiagonal() * cosv.transpose();
        S = sinv * w.asDiagonal() * sinv.transpose();
    };
    fill(qx, f, Cx, Sx);
    fill(qy, f, Cy, Sy);

    const int sz = basis.size();
    Eigen::MatrixXd M(sz, sz);
    for (int j = 0; j < sz; ++j) {
        const ModeIndex& mj = basis.mode(j);
        const double aj = basis.h1_norm_factor(j);
        for (int k = j; k < sz; ++k) {
            const ModeIndex& mk = basis.mode(k);
            const double ak = basis.h1_norm_factor(k);
            const double v = aj * ak * kPi * kPi *
                             (mj.n * mk.n * Sx(mj.n, mk.n) * Cy(mj.m, mk.m) +
                              mj.m * mk.m * Cx(mj.n, mk.n) * Sy(mj.m, mk.m));
            M(j, k) = v;
            M(k, j) = v;
        }
    }
    return M;
}

}  // namespace regobs
