#include "regobs/analysis.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "regobs/errors.hpp"

namespace regobs {

namespace {

int numerical_rank(const Eigen::VectorXd& sigma) {
    if (sigma.size() == 0) return 0;
    const double thresh = kRankEps * sigma[0];
    int r = 0;
    for (int i = 0; i < sigma.size(); ++i)
        if (sigma[i] > thresh && sigma[i] > 0.0) ++r;
    return r;
}

double spectral_norm(const Eigen::MatrixXd& m) {
    if (m.size() == 0) return 0.0;
    return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()[0];
}

}  // namespace

std::vector<EigenGroup> group_eigenvalues(const ModalBasis& basis) {
    std::map<int, EigenGroup> by_sum;
    for (int k = 0; k < basis.size(); ++k) {
        const ModeIndex& mi = basis.mode(k);
        const int s = mi.n * mi.n + mi.m * mi.m;
        EigenGroup& g = by_sum[s];
        g.lattice_sum = s;
        g.eigenvalue = basis.eigenvalue(k);
        g.mode_positions.push_back(k);
    }
    std::vector<EigenGroup> groups;
    groups.reserve(by_sum.size());
    for (auto& [s, g] : by_sum) {  // ascending n^2+m^2 = descending eigenvalue
        g.multiplicity = static_cast<int>(g.mode_positions.size());
        groups.push_back(std::move(g));
    }
    return groups;
}

RankReport rank_condition(const ModalBasis& basis, const std::vector<SensorSpec>& sensors,
                          const std::vector<EigenGroup>& groups) {
    if (sensors.empty()) throw std::invalid_argument("rank_condition: need at least one sensor");
    const int q = static_cast<int>(sensors.size());
    Eigen::MatrixXd rows(q, basis.size());
    for (int i = 0; i < q; ++i) rows.row(i) = output_row(basis, sensors[i]).transpose();

    RankReport report;
    report.q = q;
    for (const EigenGroup& g : groups) {
        GroupRank gr;
        gr.group = g;
        gr.G.resize(q, g.multiplicity);
        for (int j = 0; j < g.multiplicity; ++j) gr.G.col(j) = rows.col(g.mode_positions[j]);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(gr.G);
        gr.rank = numerical_rank(svd.singularValues());
        gr.sigma_min = svd.singularValues().size() > 0
                           ? svd.singularValues()[svd.singularValues().size() - 1]
                           : 0.0;
        report.max_multiplicity = std::max(report.max_multiplicity, g.multiplicity);
        if (gr.rank < g.multiplicity)
            report.failing_groups.push_back(static_cast<int>(report.groups.size()));
        report.groups.push_back(std::move(gr));
    }
    report.strategic = report.failing_groups.empty() && report.q >= report.max_multiplicity;
    return report;
}

DetectabilityReport detectability_test(const ModalBasis& basis,
                                       const std::vector<SensorSpec>& sensors, double shift_c) {
    if (shift_c < 0.0) throw std::invalid_argument("detectability_test: shift_c must be >= 0");
    std::vector<EigenGroup> nonneg;
    for (const EigenGroup& g : group_eigenvalues(basis))
        if (g.eigenvalue + shift_c >= -1e-12) nonneg.push_back(g);

    DetectabilityReport report;
    report.shift_c = shift_c;
    if (nonneg.empty()) {
        report.detectable = true;
        return report;
    }
    const RankReport rr = rank_condition(basis, sensors, nonneg);
    report.nonneg_groups = rr.groups;
    report.failing_groups = rr.failing_groups;
    report.detectable = rr.strategic;
    return report;
}

Eigen::VectorXd default_time_grid(int mode_count) {
    const int n = 4 * mode_count;
    Eigen::VectorXd grid(n);
    for (int j = 0; j < n; ++j) grid[j] = static_cast<double>(j) / (n - 1);
    return grid;
}

Eigen::MatrixXd omega_gradient_target(const ModalBasis& basis) {
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(basis.size(), basis.size());
    for (int k = 0; k < basis.size(); ++k) {
        const ModeIndex& mi = basis.mode(k);
        const double l2 = (mi.n == 0 ? 1.0 : 0.5) * (mi.m == 0 ? 1.0 : 0.5);
        T(k, k) = std::sqrt(-basis.eigenvalue(k) * l2) * basis.h1_norm_factor(k);
    }
    return T;
}

Eigen::MatrixXd internal_gradient_target(const ModalBasis& basis, const InternalRegion& omega) {
    const Eigen::MatrixXd M = restrict_internal(basis, omega);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
    const Eigen::VectorXd& ev = es.eigenvalues();
    const double thresh = 1e-12 * std::max(ev.maxCoeff(), 0.0);
    std::vector<int> keep;
    for (int i = 0; i < ev.size(); ++i)
        if (ev[i] > thresh) keep.push_back(i);
    Eigen::MatrixXd T(static_cast<int>(keep.size()), basis.size());
    for (size_t r = 0; r < keep.size(); ++r)
        T.row(static_cast<int>(r)) =
            std::sqrt(ev[keep[r]]) * es.eigenvectors().col(keep[r]).transpose();
    return T;
}

StrategicVerdict strategic_test(const ModalBasis& basis, const std::vector<SensorSpec>& sensors,
                                const Eigen::MatrixXd& target, const Eigen::VectorXd& time_grid) {
    const int modes = basis.size();
    if (time_grid.size() < modes)
        throw std::invalid_argument(
            "strategic_test: time grid needs at least mode-count samples to establish rank");
    const Eigen::MatrixXd O = observation_matrix(basis, sensors, time_grid);

    Eigen::BDCSVD<Eigen::MatrixXd> svd(O, Eigen::ComputeFullV);
    const Eigen::VectorXd& sigma = svd.singularValues();
    const int rank = numerical_rank(sigma);
    const int null_dim = modes - rank;
    const Eigen::MatrixXd V_null = svd.matrixV().rightCols(null_dim);

    const double t_norm = spectral_norm(target);

    StrategicVerdict verdict;
    if (null_dim > 0 && t_norm > 0.0) {
        verdict.null_leak = spectral_norm(target * V_null) / t_norm;
        // Basis directions that are numerically unobservable yet carry a
        // visible target component -- diagnostic for non-strategic setups.
        for (int k = 0; k < modes; ++k) {
            const double in_null = V_null.transpose().col(k).norm();
            if (in_null >= 0.99 && target.col(k).norm() > 1e-8 * t_norm)
                verdict.failing_modes.push_back(k);
        }
    }

    Eigen::BDCSVD<Eigen::MatrixXd> tsvd(target, Eigen::ComputeFullV);
    const int t_rank = numerical_rank(tsvd.singularValues());
    if (t_rank == 0) {
        // Nothing to observe: the verdict holds vacuously.
        verdict.strategic = true;
        verdict.margin = 0.0;
        verdict.bound_constant = 0.0;
        return verdict;
    }

    // Margin: smallest singular value of O on the orthogonal complement of
    // Null(target), i.e. on the row space W of the target. The configuration
    // is strategic exactly when no target direction is invisible, i.e. when
    // O restricted to W has full column rank.
    const Eigen::MatrixXd W = tsvd.matrixV().leftCols(t_rank);
    const Eigen::MatrixXd OW = O * W;
    Eigen::JacobiSVD<Eigen::MatrixXd> wsvd(OW);
    const Eigen::VectorXd& wsigma = wsvd.singularValues();
    verdict.margin = wsigma[wsigma.size() - 1];
    verdict.strategic = verdict.margin > kRankEps * wsigma[0];
    verdict.fragile = verdict.margin < kFragileMargin;

    if (verdict.strategic) {
        // Finite constant k with ||T a|| <= k ||O a|| on range(W): the largest
        // generalized singular value of (T W, O W).
        const Eigen::MatrixXd TW = target * W;
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(
            TW.transpose() * TW, OW.transpose() * OW);
        verdict.bound_constant = std::sqrt(std::max(ges.eigenvalues().maxCoeff(), 0.0));
    } else {
        verdict.bound_constant = std::numeric_limits<double>::infinity();
    }
    return verdict;
}

StrategicVerdict strategic_test_gradient(const ModalBasis& basis,
                                         const std::vector<SensorSpec>& sensors,
                                         const BoundaryRegion& region,
                                         const Eigen::VectorXd& time_grid) {
    return strategic_test(basis, sensors, gradient_trace_matrix(basis, region), time_grid);
}

Reconstruction reconstruct_initial_gradient(const ModalBasis& basis,
                                            const std::vector<SensorSpec>& sensors,
                                            const BoundaryRegion& region,
                                            const OutputRecord& record,
                                            bool strategic_known) {
    const int q = static_cast<int>(sensors.size());
    if (record.samples.rows() != record.times.size() || record.samples.cols() != q)
        throw std::invalid_argument("reconstruct_initial_gradient: record shape mismatch");
    const Eigen::MatrixXd O = observation_matrix(basis, sensors, record.times);
    Eigen::VectorXd y(record.times.size() * q);
    for (int j = 0; j < record.times.size(); ++j)
        for (int i = 0; i < q; ++i) y[j * q + i] = record.samples(j, i);

    Eigen::BDCSVD<Eigen::MatrixXd> svd(O, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(kRankEps);
    Reconstruction rec;
    rec.coeffs.coeffs = svd.solve(y);  // minimum-norm least squares
    rec.residual = (O * rec.coeffs.coeffs - y).norm();
    const double ynorm = y.norm();
    rec.relative_residual = ynorm > 0.0 ? rec.residual / ynorm : 0.0;
    if (ynorm > 0.0 && rec.relative_residual > 1e-6)
        throw InconsistentRecord("output record is not consistent with the model (residual " +
                                 std::to_string(rec.relative_residual) + " relative)");
    rec.trace = gradient_trace(basis, rec.coeffs, region);
    rec.nonstrategic_warning = !strategic_known;
    return rec;
}

RegionComparison compare_internal_boundary(const ModalBasis& basis,
                                           const std::vector<SensorSpec>& sensors,
                                           const BoundaryRegion& region, double r,
                                           const Eigen::VectorXd& time_grid) {
    const InternalRegion omega = build_omega_r(region, r);
    RegionComparison cmp;
    if (sensors.empty()) {
        cmp.implication_ok = true;
        return cmp;
    }
    cmp.omega_r = strategic_test(basis, sensors, internal_gradient_target(basis, omega), time_grid);
    cmp.gamma = strategic_test_gradient(basis, sensors, region, time_grid);
    cmp.implication_ok = !cmp.omega_r.strategic || cmp.gamma.strategic;
    return cmp;
}

}  // namespace regobs
