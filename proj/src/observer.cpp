#include "regobs/observer.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "regobs/analysis.hpp"
#include "regobs/errors.hpp"

namespace regobs {

namespace {

// RK4 real-axis stability limit is ~2.785; keep a margin.
constexpr double kRk4StabilityLimit = 2.5;

Eigen::VectorXd rk4_step(const Eigen::MatrixXd& F, const Eigen::VectorXd& e, double dt) {
    const Eigen::VectorXd k1 = F * e;
    const Eigen::VectorXd k2 = F * (e + 0.5 * dt * k1);
    const Eigen::VectorXd k3 = F * (e + 0.5 * dt * k2);
    const Eigen::VectorXd k4 = F * (e + dt * k3);
    return e + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Eigen::MatrixXd sensor_rows(const ModalBasis& basis, const std::vector<SensorSpec>& sensors) {
    Eigen::MatrixXd C(sensors.size(), basis.size());
    for (size_t i = 0; i < sensors.size(); ++i)
        C.row(static_cast<int>(i)) = output_row(basis, sensors[i]).transpose();
    return C;
}

struct SpectrumSummary {
    double abscissa;
    double radius;
};

SpectrumSummary closed_loop_spectrum(const Eigen::MatrixXd& F) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(F);
    double absc = -std::numeric_limits<double>::infinity();
    double rad = 0.0;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        absc = std::max(absc, es.eigenvalues()[i].real());
        rad = std::max(rad, std::abs(es.eigenvalues()[i]));
    }
    return {absc, rad};
}

void check_step(double dt, double radius) {
    if (dt <= 0.0) throw std::invalid_argument("dt must be > 0");
    const double dt_max = kRk4StabilityLimit / std::max(radius, 1e-300);
    if (dt > dt_max) {
        std::ostringstream os;
        os << "step dt = " << dt << " exceeds the explicit stability guard; use dt <= " << dt_max;
        throw StepTooLarge(os.str(), dt_max);
    }
}

}  // namespace

double Schedule::at(double t) const {
    double v = values.empty() ? 0.0 : values.front();
    for (size_t i = 0; i < knots.size(); ++i)
        if (t >= knots[i]) v = values[i];
    return v;
}

ObserverGain design_gain_pole_placement(const ModalBasis& basis,
                                        const std::vector<SensorSpec>& sensors, double shift_c,
                                        double alpha_target, unsigned seed) {
    if (alpha_target <= 0.0)
        throw std::invalid_argument("design_gain_pole_placement: alpha_target must be > 0");
    const int q = static_cast<int>(sensors.size());
    const Eigen::MatrixXd C = sensor_rows(basis, sensors);

    // Slow block: every eigenvalue group with lambda + c >= -alpha_target.
    std::vector<int> slow;
    std::vector<EigenGroup> slow_groups;
    for (const EigenGroup& g : group_eigenvalues(basis)) {
        if (g.eigenvalue + shift_c < -alpha_target) continue;
        slow_groups.push_back(g);
        for (int k : g.mode_positions) slow.push_back(k);
    }
    if (!slow_groups.empty()) {
        const RankReport rr = rank_condition(basis, sensors, slow_groups);
        if (!rr.strategic) {
            const GroupRank& bad =
                rr.groups[rr.failing_groups.empty() ? 0 : rr.failing_groups.front()];
            std::ostringstream os;
            os << "gain design infeasible: eigenvalue group n^2+m^2 = " << bad.group.lattice_sum
               << " (lambda = " << bad.group.eigenvalue << ", multiplicity "
               << bad.group.multiplicity << ") has rank " << bad.rank << " with q = " << q
               << " sensors";
            throw DesignInfeasible(os.str());
        }
    }

    const int J = static_cast<int>(slow.size());
    ObserverGain gain;
    gain.design = ObserverGain::Design::PolePlacement;
    gain.alpha_target = alpha_target;
    gain.h = Eigen::MatrixXd::Zero(basis.size(), q);

    std::mt19937 rng(seed);
    std::normal_distribution<double> dist;
    double jitter = 0.0;
    for (int attempt = 0; attempt < 2; ++attempt) {
        if (J > 0) {
            Eigen::VectorXd a1(J);
            Eigen::MatrixXd c1(q, J);
            for (int j = 0; j < J; ++j) {
                a1[j] = basis.eigenvalue(slow[j]) + shift_c;
                c1.col(j) = C.col(slow[j]);
            }
            // Distinct targets spread below -alpha_target to avoid defective
            // closed loops.
            Eigen::VectorXd mu(J);
            for (int j = 0; j < J; ++j)
                mu[j] = -alpha_target * (1.0 + (static_cast<double>(j) / J) * 0.1 + jitter) -
                        1e-9 * (j + 1);
            // Sylvester-based placement on the dual pair (A1, C1^T): solve
            // A1 X - X diag(mu) = C1^T G elementwise (A1 diagonal), then
            // F = G X^{-1} places eig(A1 - C1^T F) = mu; H1 = F^T.
            Eigen::MatrixXd G(q, J);
            for (int i = 0; i < q; ++i)
                for (int j = 0; j < J; ++j) G(i, j) = dist(rng);
            Eigen::MatrixXd X(J, J);
            const Eigen::MatrixXd rhs = c1.transpose() * G;
            for (int i = 0; i < J; ++i)
                for (int j = 0; j < J; ++j) X(i, j) = rhs(i, j) / (a1[i] - mu[j]);
            const Eigen::FullPivLU<Eigen::MatrixXd> lu(X);
            if (!lu.isInvertible()) {
                jitter = 0.01;
                continue;
            }
            const Eigen::MatrixXd F = G * lu.inverse();  // q x J
            for (int j = 0; j < J; ++j) gain.h.row(slow[j]) = F.col(j).transpose();
        }
        const Eigen::MatrixXd Fcl = closed_loop_matrix(basis, gain, sensors, shift_c);
        const SpectrumSummary s = closed_loop_spectrum(Fcl);
        gain.spectral_abscissa = s.abscissa;
        gain.spectral_radius = s.radius;
        if (s.abscissa <= -0.9 * alpha_target) return gain;
        jitter = 0.01;
    }
    throw DesignInfeasible("pole placement failed to reach the target decay after retry");
}

ObserverGain design_gain_collocated(const ModalBasis& basis,
                                    const std::vector<SensorSpec>& sensors, double rho,
                                    double shift_c) {
    if (rho <= 0.0) throw std::invalid_argument("design_gain_collocated: rho must be > 0");
    const Eigen::MatrixXd C = sensor_rows(basis, sensors);
    ObserverGain gain;
    gain.design = ObserverGain::Design::Collocated;
    gain.rho = rho;
    gain.h = rho * C.transpose();
    const Eigen::MatrixXd Fcl = closed_loop_matrix(basis, gain, sensors, shift_c);
    const SpectrumSummary s = closed_loop_spectrum(Fcl);
    gain.spectral_abscissa = s.abscissa;
    gain.spectral_radius = s.radius;
    if (gain.spectral_abscissa >= 0.0)
        throw DesignInfeasible("collocated gain does not stabilize (abscissa " +
                               std::to_string(gain.spectral_abscissa) + "); raise rho");
    return gain;
}

Eigen::MatrixXd closed_loop_matrix(const ModalBasis& basis, const ObserverGain& gain,
                                   const std::vector<SensorSpec>& sensors, double shift_c) {
    const Eigen::MatrixXd C = sensor_rows(basis, sensors);
    Eigen::MatrixXd F = -gain.h * C;
    for (int k = 0; k < basis.size(); ++k) F(k, k) += basis.eigenvalue(k) + shift_c;
    return F;
}

double max_stable_dt(const ObserverGain& gain, const ModalBasis& basis, double shift_c) {
    double radius = gain.spectral_radius;
    for (int k = 0; k < basis.size(); ++k)
        radius = std::max(radius, std::abs(basis.eigenvalue(k) + shift_c));
    return kRk4StabilityLimit / std::max(radius, 1e-300);
}

SimulationOutput simulate_observer(const ModalBasis& basis,
                                   const std::vector<SensorSpec>& sensors,
                                   const std::optional<ActuatorSpec>& actuator,
                                   const ObserverGain& gain, const ModalField& x0,
                                   const ModalField& z0, const Schedule& u,
                                   const BoundaryRegion& region, double horizon, double dt,
                                   double shift_c) {
    if (horizon < dt) throw std::invalid_argument("simulate_observer: horizon must be >= dt");
    double radius = gain.spectral_radius;
    for (int k = 0; k < basis.size(); ++k)
        radius = std::max(radius, std::abs(basis.eigenvalue(k) + shift_c));
    check_step(dt, radius);

    const Eigen::MatrixXd F = closed_loop_matrix(basis, gain, sensors, shift_c);
    const ModalField b =
        actuator ? input_vector(basis, *actuator) : ModalField::zero(basis);

    const int steps = static_cast<int>(std::llround(horizon / dt));
    SimulationOutput out;
    out.times.resize(steps + 1);
    out.x_coeffs.resize(steps + 1, basis.size());
    out.z_coeffs.resize(steps + 1, basis.size());
    out.error.times.resize(steps + 1);
    out.error.omega_norm.resize(steps + 1);
    out.error.gamma_grad_norm.resize(steps + 1);

    ModalField x = x0;
    ModalField z = z0;
    // The error is carried explicitly: recomputing x - z after it has decayed
    // many orders below ||x|| would lose the low bits to cancellation.
    ModalField e = ModalField::zero(basis);
    e.coeffs = x0.coeffs - z0.coeffs;
    auto record = [&](int i, double t) {
        out.times[i] = t;
        out.x_coeffs.row(i) = x.coeffs.transpose();
        out.z_coeffs.row(i) = z.coeffs.transpose();
        out.error.times[i] = t;
        out.error.omega_norm[i] = e.coeffs.norm();
        out.error.gamma_grad_norm[i] = trace_norm_L2(gradient_trace(basis, e, region), region);
    };
    record(0, 0.0);

    for (int i = 1; i <= steps; ++i) {
        const double t = (i - 1) * dt;
        e.coeffs = rk4_step(F, e.coeffs, dt);
        x = mild_solution_step(basis, x, b, u.at(t), dt, shift_c);
        z.coeffs = x.coeffs - e.coeffs;
        record(i, i * dt);
    }
    return out;
}

ErrorTrajectory error_dynamics_direct(const ModalBasis& basis, const ObserverGain& gain,
                                      const std::vector<SensorSpec>& sensors, double shift_c,
                                      const ModalField& e0, const BoundaryRegion& region,
                                      double horizon, double dt) {
    if (horizon < dt) throw std::invalid_argument("error_dynamics_direct: horizon must be >= dt");
    double radius = gain.spectral_radius;
    for (int k = 0; k < basis.size(); ++k)
        radius = std::max(radius, std::abs(basis.eigenvalue(k) + shift_c));
    check_step(dt, radius);

    const Eigen::MatrixXd F = closed_loop_matrix(basis, gain, sensors, shift_c);
    const int steps = static_cast<int>(std::llround(horizon / dt));
    ErrorTrajectory traj;
    traj.times.resize(steps + 1);
    traj.omega_norm.resize(steps + 1);
    traj.gamma_grad_norm.resize(steps + 1);

    ModalField e = e0;
    for (int i = 0; i <= steps; ++i) {
        traj.times[i] = i * dt;
        traj.omega_norm[i] = e.coeffs.norm();
        traj.gamma_grad_norm[i] = trace_norm_L2(gradient_trace(basis, e, region), region);
        if (i < steps) e.coeffs = rk4_step(F, e.coeffs, dt);
    }
    return traj;
}

ModalField estimate_output(const Eigen::VectorXd& /*y*/, const ModalField& z) { return z; }

}  // namespace regobs
