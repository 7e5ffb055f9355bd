#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

namespace regobs {

/// Frequency pair (n, m) of one cosine eigenfunction on the unit square.
struct ModeIndex {
    int n = 0;  ///< xi1 frequency
    int m = 0;  ///< xi2 frequency
};

/// H1-orthonormal eigenbasis of the Neumann Laplacian on (0,1)^2, truncated
/// at order n_max. Eigenfunctions are
///   phi_nm(xi) = alpha_nm * cos(n pi xi1) * cos(m pi xi2)
/// with eigenvalues lambda_nm = -(n^2 + m^2) pi^2 and alpha_nm chosen so that
/// <phi_nm, phi_nm>_{H1} = 1.
class ModalBasis {
public:
    explicit ModalBasis(int n_max);

    int truncation() const { return n_max_; }
    int size() const { return static_cast<int>(modes_.size()); }
    const std::vector<ModeIndex>& modes() const { return modes_; }
    const ModeIndex& mode(int k) const { return modes_[k]; }
    double eigenvalue(int k) const { return eigenvalues_[k]; }
    double h1_norm_factor(int k) const { return h1_factors_[k]; }

    /// Flat position of mode (n, m) in row-major (n, m) order.
    int index_of(int n, int m) const;

    /// phi_k evaluated at xi in the closed unit square.
    double eigenfunction(int k, double xi1, double xi2) const;

    /// (d phi_k / d xi1, d phi_k / d xi2) at xi.
    std::array<double, 2> eigenfunction_gradient(int k, double xi1, double xi2) const;

private:
    int n_max_;
    std::vector<ModeIndex> modes_;
    std::vector<double> eigenvalues_;
    std::vector<double> h1_factors_;
};

/// Coefficient vector of a state over a ModalBasis.
struct ModalField {
    Eigen::VectorXd coeffs;

    static ModalField zero(const ModalBasis& basis);
};

enum class Edge { Bottom, Top, Left, Right };

/// Target region on the boundary of the unit square: an edge plus an arc
/// interval [a, b] in the edge parameter.
struct BoundaryRegion {
    Edge edge = Edge::Top;
    double a = 0.0;
    double b = 1.0;
};

/// Strip of depth r inward from a boundary region (the omega_r construction).
struct InternalRegion {
    BoundaryRegion region;
    double r = 0.0;

    /// Axis-aligned bounding rectangle [x0,x1] x [y0,y1] of the strip.
    std::array<double, 4> rect() const;
};

/// Boundary gradient trace on a region, expanded in sin(k pi s) over the edge
/// arc parameter s, k = 1..n_max. Under Neumann conditions the normal
/// component vanishes identically.
struct GradientTrace {
    BoundaryRegion region;
    Eigen::VectorXd tangential_sine_coeffs;
    Eigen::VectorXd normal_sine_coeffs;

    /// (tangential, normal) gradient components at arc parameter s.
    std::array<double, 2> eval(double s) const;
};

ModalBasis build_basis(int n_max);

double field_eval(const ModalBasis& basis, const ModalField& field, double xi1, double xi2);

/// Diagonal semigroup action: coeff_k <- exp(lambda_k t) coeff_k.
ModalField semigroup_apply(const ModalBasis& basis, const ModalField& field, double t);

/// One exact variation-of-constants step for piecewise-constant input u on
/// [t, t+dt]. input_vec holds the modal representation of B (unit input).
/// shift_c adds a reaction term c I to the generator (same eigenfunctions,
/// spectrum shifted by c).
ModalField mild_solution_step(const ModalBasis& basis, const ModalField& field,
                              const ModalField& input_vec, double u, double dt,
                              double shift_c = 0.0);

std::array<double, 2> gradient_field_eval(const ModalBasis& basis, const ModalField& field,
                                          double xi1, double xi2);

GradientTrace gradient_trace(const ModalBasis& basis, const ModalField& field,
                             const BoundaryRegion& region);

/// L2 norm of the trace over the region. Full-edge regions use the exact
/// sine-orthogonality formula; sub-intervals use composite quadrature.
double trace_norm_L2(const GradientTrace& trace, const BoundaryRegion& region);

InternalRegion build_omega_r(const BoundaryRegion& region, double r);

/// Gram matrix of the gradient restriction to omega_r over the basis:
/// (M)_{jk} = int_{omega_r} grad phi_j . grad phi_k dxi.
Eigen::MatrixXd restrict_internal(const ModalBasis& basis, const InternalRegion& omega);

/// Linear map from modal coefficients to stacked trace sine coefficients
/// (n_max tangential rows then n_max normal rows, the latter all zero).
Eigen::MatrixXd gradient_trace_matrix(const ModalBasis& basis, const BoundaryRegion& region);

}  // namespace regobs
