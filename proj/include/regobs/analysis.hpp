#pragma once

#include <vector>

#include <Eigen/Dense>

#include "regobs/sensing.hpp"
#include "regobs/spectral.hpp"

namespace regobs {

/// Modes sharing one exact eigenvalue (grouped by the integer n^2 + m^2).
struct EigenGroup {
    double eigenvalue = 0.0;
    int lattice_sum = 0;  ///< n^2 + m^2
    std::vector<int> mode_positions;
    int multiplicity = 0;
};

/// Per-group rank data for the sensor-by-eigenfunction matrix G_i.
struct GroupRank {
    EigenGroup group;
    Eigen::MatrixXd G;  ///< q x multiplicity
    int rank = 0;
    double sigma_min = 0.0;
};

struct RankReport {
    std::vector<GroupRank> groups;
    bool strategic = false;
    std::vector<int> failing_groups;  ///< indices into groups
    int q = 0;
    int max_multiplicity = 0;
};

struct DetectabilityReport {
    double shift_c = 0.0;
    std::vector<GroupRank> nonneg_groups;  ///< groups with lambda + c >= 0
    bool detectable = false;
    std::vector<int> failing_groups;
};

/// Observability verdict for one gradient target T: strategic means no
/// target direction is invisible to the output, i.e. the row space of T
/// meets Null(O) only in {0} (the kernel condition Ker K grad* chi* = {0}).
struct StrategicVerdict {
    bool strategic = false;
    double margin = 0.0;  ///< sigma_min of O restricted to Null(T)-orthogonal
    bool fragile = false;  ///< margin below 1e-6
    std::vector<int> failing_modes;  ///< basis positions unobservable but target-visible
    double null_leak = 0.0;  ///< ||T V|| / ||T|| over the numerical null basis V of O
    double bound_constant = 0.0;  ///< finite k with ||T a|| <= k ||O a|| on the tested subspace
};

struct Reconstruction {
    ModalField coeffs;
    GradientTrace trace;
    double residual = 0.0;          ///< ||O a - y||
    double relative_residual = 0.0;
    bool nonstrategic_warning = false;
};

struct RegionComparison {
    StrategicVerdict omega_r;
    StrategicVerdict gamma;
    bool implication_ok = true;  ///< omega_r strategic => gamma strategic
};

/// Relative singular-value threshold for numerical rank decisions.
inline constexpr double kRankEps = 1e-10;
/// Margins below this are flagged fragile (near-non-strategic).
inline constexpr double kFragileMargin = 1e-6;

std::vector<EigenGroup> group_eigenvalues(const ModalBasis& basis);

RankReport rank_condition(const ModalBasis& basis, const std::vector<SensorSpec>& sensors,
                          const std::vector<EigenGroup>& groups);

DetectabilityReport detectability_test(const ModalBasis& basis,
                                       const std::vector<SensorSpec>& sensors, double shift_c);

/// Uniform grid of 4 * mode-count samples on [0, 1].
Eigen::VectorXd default_time_grid(int mode_count);

/// Diagonal map whose Gram is the gradient Gram over the whole domain:
/// row k scales mode k by sqrt(-lambda_k) * alpha_k * ||cos cos||_{L2}.
Eigen::MatrixXd omega_gradient_target(const ModalBasis& basis);

/// Factor T with T^T T = restrict_internal Gram (eigenvalue square root,
/// rows below the rank threshold dropped).
Eigen::MatrixXd internal_gradient_target(const ModalBasis& basis, const InternalRegion& omega);

/// Observability test of an arbitrary target matrix T over the modal space:
/// verdict true iff O has full column rank on the row space of T.
StrategicVerdict strategic_test(const ModalBasis& basis, const std::vector<SensorSpec>& sensors,
                                const Eigen::MatrixXd& target, const Eigen::VectorXd& time_grid);

/// Gradient-trace target on a boundary region (the Gamma* test).
StrategicVerdict strategic_test_gradient(const ModalBasis& basis,
                                         const std::vector<SensorSpec>& sensors,
                                         const BoundaryRegion& region,
                                         const Eigen::VectorXd& time_grid);

/// Minimum-norm least-squares inversion of a free-output record, followed by
/// the gradient trace on the region. Throws InconsistentRecord when the
/// residual exceeds 1e-6 * ||y||.
Reconstruction reconstruct_initial_gradient(const ModalBasis& basis,
                                            const std::vector<SensorSpec>& sensors,
                                            const BoundaryRegion& region,
                                            const OutputRecord& record,
                                            bool strategic_known = true);

/// Runs the inclusion test on omega_r and on Gamma* and checks the
/// internal-implies-boundary implication.
RegionComparison compare_internal_boundary(const ModalBasis& basis,
                                           const std::vector<SensorSpec>& sensors,
                                           const BoundaryRegion& region, double r,
                                           const Eigen::VectorXd& time_grid);

}  // namespace regobs
