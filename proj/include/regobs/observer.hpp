#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "regobs/sensing.hpp"
#include "regobs/spectral.hpp"

namespace regobs {

/// Output-injection gain H over the modal space, with its verified
/// closed-loop spectrum summary.
struct ObserverGain {
    enum class Design { PolePlacement, Collocated };
    Design design = Design::PolePlacement;
    Eigen::MatrixXd h;  ///< modes x q
    double alpha_target = 0.0;  ///< PolePlacement parameter
    double rho = 0.0;           ///< Collocated parameter
    double spectral_abscissa = 0.0;  ///< max Re eig(A + cI - HC), verified
    double spectral_radius = 0.0;    ///< max |eig|, drives the step guard
};

/// Piecewise-constant control schedule: value values[i] on [knots[i], knots[i+1]).
struct Schedule {
    std::vector<double> knots;   // increasing, starts at 0
    std::vector<double> values;  // same length as knots

    double at(double t) const;
    static Schedule constant(double v) { return {{0.0}, {v}}; }
    static Schedule zero() { return constant(0.0); }
};

struct ErrorTrajectory {
    Eigen::VectorXd times;
    Eigen::VectorXd omega_norm;       ///< ||e|| over Omega (modal Euclidean)
    Eigen::VectorXd gamma_grad_norm;  ///< L2 norm of the gradient trace on Gamma*
};

struct SimulationOutput {
    Eigen::VectorXd times;
    Eigen::MatrixXd x_coeffs;  ///< rows = samples
    Eigen::MatrixXd z_coeffs;
    ErrorTrajectory error;
};

/// Output injection on the slow modal block (modes with lambda + c >=
/// -alpha_target), placing each slow eigenvalue near -alpha_target with a
/// small spread; fast modes keep zero gain. Throws DesignInfeasible when a
/// slow eigenvalue group fails the rank condition.
ObserverGain design_gain_pole_placement(const ModalBasis& basis,
                                        const std::vector<SensorSpec>& sensors, double shift_c,
                                        double alpha_target, unsigned seed = 12345);

/// Fallback gain H = rho C^T; the symmetric closed loop is verified and the
/// measured abscissa reported. Throws DesignInfeasible when it is >= 0.
ObserverGain design_gain_collocated(const ModalBasis& basis,
                                    const std::vector<SensorSpec>& sensors, double rho,
                                    double shift_c = 0.0);

/// diag(lambda + c) - H * C.
Eigen::MatrixXd closed_loop_matrix(const ModalBasis& basis, const ObserverGain& gain,
                                   const std::vector<SensorSpec>& sensors, double shift_c);

/// Largest stable step for the RK4 error propagation with this closed loop.
double max_stable_dt(const ObserverGain& gain, const ModalBasis& basis, double shift_c);

/// Coupled plant/observer run. The plant advances exactly (variation of
/// constants per step); the observer error advances by one classical RK4
/// step of the autonomous error dynamics per dt, which realizes the
/// innovation +H(y - Cz) relative to the exactly transported plant state.
SimulationOutput simulate_observer(const ModalBasis& basis,
                                   const std::vector<SensorSpec>& sensors,
                                   const std::optional<ActuatorSpec>& actuator,
                                   const ObserverGain& gain, const ModalField& x0,
                                   const ModalField& z0, const Schedule& u,
                                   const BoundaryRegion& region, double horizon, double dt,
                                   double shift_c);

/// Direct RK4 integration of de/dt = (A + cI - HC) e; the oracle route for
/// the e = x - z algebra.
ErrorTrajectory error_dynamics_direct(const ModalBasis& basis, const ObserverGain& gain,
                                      const std::vector<SensorSpec>& sensors, double shift_c,
                                      const ModalField& e0, const BoundaryRegion& region,
                                      double horizon, double dt);

/// Full-order estimate x_hat = M y + N z with M = 0, N = I: the observer
/// state itself.
ModalField estimate_output(const Eigen::VectorXd& y, const ModalField& z);

}  // namespace regobs
