#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "regobs/errors.hpp"
#include "regobs/observer.hpp"
#include "regobs/spectral.hpp"

using namespace regobs;

namespace {

constexpr double kPi = std::numbers::pi;

SensorSpec pointwise_at(double x, double y) {
    SensorSpec s;
    s.kind = SensorSpec::Kind::Pointwise;
    s.location = {x, y};
    return s;
}

ModalField random_field(const ModalBasis& basis, std::mt19937& rng) {
    std::normal_distribution<double> dist;
    ModalField f = ModalField::zero(basis);
    for (int k = 0; k < basis.size(); ++k) f.coeffs[k] = dist(rng);
    return f;
}

}  // namespace

TEST_CASE("scalar pole placement recovers the textbook gain") {
    // With alpha = 1 only the constant mode is slow: a scalar problem with
    // lambda = 0 and C phi = 1, so driving the loop to -alpha needs exactly
    // h = alpha / C phi = 1.
    const ModalBasis basis = build_basis(1);
    const std::vector<SensorSpec> sensors = {pointwise_at(0.3, 0.7)};
    const ObserverGain g = design_gain_pole_placement(basis, sensors, 0.0, 1.0);
    const int k00 = basis.index_of(0, 0);
    REQUIRE(g.h.cols() == 1);
    CHECK(g.h(k00, 0) == doctest::Approx(1.0).epsilon(1e-6));
    for (int k = 0; k < basis.size(); ++k)
        if (k != k00) CHECK(g.h.row(k).norm() == 0.0);
    CHECK(g.spectral_abscissa == doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("pole placement leaves the fast block untouched") {
    const ModalBasis basis = build_basis(2);
    const std::vector<SensorSpec> sensors = {pointwise_at(0.23, 0.41)};
    const double alpha = 2.0;  // below pi^2: only the constant mode is slow
    const ObserverGain g = design_gain_pole_placement(basis, sensors, 0.0, alpha);
    CHECK(g.spectral_abscissa <= -0.9 * alpha);
    for (int k = 0; k < basis.size(); ++k) {
        const ModeIndex& mi = basis.mode(k);
        if (mi.n != 0 || mi.m != 0) CHECK(g.h.row(k).norm() == 0.0);
    }
    // Fast eigenvalues remain on the open-loop diagonal.
    const Eigen::MatrixXd F = closed_loop_matrix(basis, g, sensors, 0.0);
    Eigen::EigenSolver<Eigen::MatrixXd> es(F);
    int near_open_loop = 0;
    for (int i = 0; i < es.eigenvalues().size(); ++i)
        for (int k = 0; k < basis.size(); ++k)
            if (std::abs(es.eigenvalues()[i] - std::complex<double>(basis.eigenvalue(k), 0.0)) <
                1e-8 * kPi * kPi)
                ++near_open_loop;
    CHECK(near_open_loop >= basis.size() - 1);
}

TEST_CASE("pole placement spreads a multi-mode slow block below the target") {
    const ModalBasis basis = build_basis(3);
    const std::vector<SensorSpec> sensors = {pointwise_at(0.23, 0.41), pointwise_at(0.71, 0.13)};
    const double alpha = 15.0;  // slow block: lattice sums 0 and 1 (three modes)
    const ObserverGain g = design_gain_pole_placement(basis, sensors, 0.0, alpha);
    CHECK(g.spectral_abscissa <= -0.9 * alpha);
    const Eigen::MatrixXd F = closed_loop_matrix(basis, g, sensors, 0.0);
    Eigen::EigenSolver<Eigen::MatrixXd> es(F);
    // Every eigenvalue is either a fast open-loop one or sits in the placed
    // band [-1.2 alpha, -0.9 alpha].
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        const double re = es.eigenvalues()[i].real();
        CHECK(re <= -0.9 * alpha * (1.0 - 1e-9));
    }
}

TEST_CASE("pole placement reports the failing group when infeasible") {
    const ModalBasis basis = build_basis(2);
    const std::vector<SensorSpec> sensors = {pointwise_at(0.23, 0.41)};
    // alpha above pi^2 pulls the double group (0,1)/(1,0) into the slow
    // block; one sensor cannot give it full rank.
    CHECK_THROWS_AS(design_gain_pole_placement(basis, sensors, 0.0, 12.0), DesignInfeasible);
    CHECK_THROWS(design_gain_pole_placement(basis, sensors, 0.0, -1.0));
}

TEST_CASE("collocated gain is symmetric output injection") {
    const ModalBasis basis = build_basis(2);
    const std::vector<SensorSpec> sensors = {pointwise_at(0.29, 0.53)};
    const double rho = 4.0;
    const ObserverGain g = design_gain_collocated(basis, sensors, rho);
    CHECK(g.spectral_abscissa < 0.0);
    const Eigen::VectorXd c = output_row(basis, sensors[0]);
    CHECK((g.h.col(0) - rho * c).norm() < 1e-14);
    // With an unstable reaction shift and a vanishing rho the loop cannot
    // be stable.
    CHECK_THROWS_AS(design_gain_collocated(basis, sensors, 1e-8, 1.0), DesignInfeasible);
    CHECK_THROWS(design_gain_collocated(basis, sensors, 0.0));
}

TEST_CASE("closed-loop matrix is diag(lambda + c) minus output injection") {
    const ModalBasis basis = build_basis(2);
    const std::vector<SensorSpec> sensors = {pointwise_at(0.31, 0.62), pointwise_at(0.57, 0.19)};
    ObserverGain g;
    std::mt19937 rng(3);
    std::normal_distribution<double> dist;
    g.h = Eigen::MatrixXd::NullaryExpr(basis.size(), 2, [&](int, int) { return dist(rng); });
    const double c = 0.7;
    const Eigen::MatrixXd F = closed_loop_matrix(basis, g, sensors, c);
    Eigen::MatrixXd C(2, basis.size());
    C.row(0) = output_row(basis, sensors[0]).transpose();
    C.row(1) = output_row(basis, sensors[1]).transpose();
    Eigen::MatrixXd expected = -g.h * C;
    for (int k = 0; k < basis.size(); ++k) expected(k, k) += basis.eigenvalue(k) + c;
    CHECK((F - expected).norm() < 1e-13);
}

TEST_CASE("step guard rejects unstable steps with a usable suggestion") {
    const ModalBasis basis = build_basis(4);
    const std::vector<SensorSpec> sensors = {pointwise_at(0.23, 0.41)};
    const ObserverGain g = design_gain_pole_placement(basis, sensors, 0.0, 2.0);
    const double dt_max = max_stable_dt(g, basis, 0.0);
    // Open-loop radius dominates here: 32 pi^2.
    CHECK(dt_max == doctest::Approx(2.5 / (32.0 * kPi * kPi)).epsilon(1e-9));

    std::mt19937 rng(11);
    const ModalField x0 = random_field(basis, rng);
    const ModalField z0 = ModalField::zero(basis);
    try {
        simulate_observer(basis, sensors, std::nullopt, g, x0, z0, Schedule::zero(),
                          {Edge::Top, 0.0, 1.0}, 1.0, 2.0 * dt_max, 0.0);
        FAIL("expected StepTooLarge");
    } catch (const StepTooLarge& e) {
        CHECK(e.suggested_dt == doctest::Approx(dt_max).epsilon(1e-12));
    }
    CHECK_THROWS_AS(error_dynamics_direct(basis, g, sensors, 0.0, x0, {Edge::Top, 0.0, 1.0},
                                          1.0, 2.0 * dt_max),
                    StepTooLarge);
}

TEST_CASE("observer error equals the direct error dynamics exactly") {
    const ModalBasis basis = build_basis(3);
    const std::vector<SensorSpec> sensors = {pointwise_at(0.23, 0.41)};
    const BoundaryRegion gamma{Edge::Top, 0.0, 1.0};
    const ObserverGain g = design_gain_pole_placement(basis, sensors, 0.0, 2.0);
    std::mt19937 rng(21);
    ActuatorSpec act;
    act.location = {0.44, 0.56};
    for (int trial = 0; trial < 5; ++trial) {
        const ModalField x0 = random_field(basis, rng);
        const ModalField z0 = random_field(basis, rng);
        ModalField e0 = ModalField::zero(basis);
        e0.coeffs = x0.coeffs - z0.coeffs;
        const double dt = 5e-4, horizon = 0.5;
        const SimulationOutput sim =
            simulate_observer(basis, sensors, act, g, x0, z0,
                              Schedule::constant(1.7), gamma, horizon, dt, 0.0);
        const ErrorTrajectory direct =
            error_dynamics_direct(basis, g, sensors, 0.0, e0, gamma, horizon, dt);
        REQUIRE(sim.error.times.size() == direct.times.size());
        for (int i = 0; i < direct.times.size(); ++i) {
            CHECK(std::abs(sim.error.omega_norm[i] - direct.omega_norm[i]) <=
                  1e-8 * (1.0 + direct.omega_norm[i]));
            CHECK(std::abs(sim.error.gamma_grad_norm[i] - direct.gamma_grad_norm[i]) <=
                  1e-8 * (1.0 + direct.gamma_grad_norm[i]));
        }
        // The recorded states satisfy e = x - z by construction.
        for (int i = 0; i < sim.times.size(); ++i) {
            const double en = (sim.x_coeffs.row(i) - sim.z_coeffs.row(i)).norm();
            CHECK(std::abs(en - sim.error.omega_norm[i]) <= 1e-9 * (1.0 + en));
        }
    }
}

TEST_CASE("observer error is invariant under the control input") {
    const ModalBasis basis = build_basis(2);
    const std::vector<SensorSpec> sensors = {pointwise_at(0.37, 0.59)};
    const BoundaryRegion gamma{Edge::Left, 0.0, 1.0};
    const ObserverGain g = design_gain_pole_placement(basis, sensors, 0.0, 1.5);
    std::mt19937 rng(8);
    const ModalField x0 = random_field(basis, rng);
    const ModalField z0 = random_field(basis, rng);
    ActuatorSpec act;
    act.location = {0.61, 0.33};
    Schedule stepped;
    stepped.knots = {0.0, 0.2, 0.6};
    stepped.values = {1.0, -3.0, 0.5};
    const SimulationOutput with_u = simulate_observer(basis, sensors, act, g, x0, z0, stepped,
                                                      gamma, 1.0, 1e-3, 0.0);
    const SimulationOutput without = simulate_observer(basis, sensors, std::nullopt, g, x0, z0,
                                                       Schedule::zero(), gamma, 1.0, 1e-3, 0.0);
    CHECK((with_u.error.omega_norm - without.error.omega_norm).cwiseAbs().maxCoeff() == 0.0);
    CHECK((with_u.error.gamma_grad_norm - without.error.gamma_grad_norm).cwiseAbs().maxCoeff() ==
          0.0);
    // The states themselves differ: the input does act on the plant.
    CHECK((with_u.x_coeffs - without.x_coeffs).norm() > 1e-6);
}

TEST_CASE("perfect initialization keeps the estimate glued to the plant") {
    const ModalBasis basis = build_basis(2);
    const std::vector<SensorSpec> sensors = {pointwise_at(0.41, 0.27)};
    const ObserverGain g = design_gain_pole_placement(basis, sensors, 0.0, 1.0);
    std::mt19937 rng(55);
    const ModalField x0 = random_field(basis, rng);
    ActuatorSpec act;
    act.location = {0.52, 0.48};
    const SimulationOutput sim =
        simulate_observer(basis, sensors, act, g, x0, x0, Schedule::constant(2.0),
                          {Edge::Bottom, 0.0, 1.0}, 0.5, 1e-3, 0.0);
    CHECK(sim.error.omega_norm.maxCoeff() == 0.0);
    CHECK((sim.x_coeffs - sim.z_coeffs).norm() == 0.0);
}

TEST_CASE("rk4 error propagation matches a diagonalization oracle") {
    const ModalBasis basis = build_basis(2);
    const std::vector<SensorSpec> sensors = {pointwise_at(0.23, 0.41)};
    const ObserverGain g = design_gain_pole_placement(basis, sensors, 0.0, 2.0);
    const Eigen::MatrixXd F = closed_loop_matrix(basis, g, sensors, 0.0);
    std::mt19937 rng(77);
    const ModalField e0 = random_field(basis, rng);
    const double horizon = 0.02, dt = 1e-5;
    const ErrorTrajectory traj =
        error_dynamics_direct(basis, g, sensors, 0.0, e0, {Edge::Top, 0.0, 1.0}, horizon, dt);
    // exp(F t) e0 through the eigendecomposition of F.
    Eigen::EigenSolver<Eigen::MatrixXd> es(F);
    const Eigen::VectorXcd y0 = es.eigenvectors().colPivHouseholderQr().solve(
        e0.coeffs.cast<std::complex<double>>());
    const Eigen::VectorXcd scaled =
        (es.eigenvalues().array() * horizon).exp() * y0.array();
    const Eigen::VectorXd e_end = (es.eigenvectors() * scaled).real();
    CHECK(traj.omega_norm[traj.omega_norm.size() - 1] ==
          doctest::Approx(e_end.norm()).epsilon(1e-8));
}

TEST_CASE("designed decay rate shows up in the trajectory") {
    const ModalBasis basis = build_basis(3);
    const std::vector<SensorSpec> sensors = {pointwise_at(0.23, 0.41)};
    const double alpha = 2.0;
    const ObserverGain g = design_gain_pole_placement(basis, sensors, 0.0, alpha);
    std::mt19937 rng(91);
    const ModalField x0 = random_field(basis, rng);
    const SimulationOutput sim =
        simulate_observer(basis, sensors, std::nullopt, g, x0, ModalField::zero(basis),
                          Schedule::zero(), {Edge::Top, 0.0, 1.0}, 5.0, 1e-3, 0.0);
    const int last = static_cast<int>(sim.error.times.size()) - 1;
    CHECK(sim.error.omega_norm[last] <= 1e-3 * sim.error.omega_norm[0]);
    CHECK(sim.error.gamma_grad_norm[last] <= 1e-3 * sim.error.gamma_grad_norm[0]);
    // Monotone-envelope check on the log of the norm at second granularity.
    for (double t : {1.0, 2.0, 3.0, 4.0}) {
        const int i = static_cast<int>(std::llround(t / 1e-3));
        CHECK(sim.error.omega_norm[i] <=
              10.0 * sim.error.omega_norm[0] * std::exp(-0.9 * alpha * t));
    }
}

TEST_CASE("schedules are right-continuous step functions") {
    Schedule s;
    s.knots = {0.0, 1.0, 2.5};
    s.values = {4.0, -1.0, 0.25};
    CHECK(s.at(0.0) == 4.0);
    CHECK(s.at(0.99) == 4.0);
    CHECK(s.at(1.0) == -1.0);
    CHECK(s.at(2.49) == -1.0);
    CHECK(s.at(2.5) == 0.25);
    CHECK(s.at(100.0) == 0.25);
    CHECK(Schedule::zero().at(3.0) == 0.0);
}

TEST_CASE("full-order estimate is the observer state") {
    const ModalBasis basis = build_basis(1);
    std::mt19937 rng(1);
    const ModalField z = random_field(basis, rng);
    Eigen::VectorXd y(1);
    y << 3.0;
    CHECK((estimate_output(y, z).coeffs - z.coeffs).norm() == 0.0);
}
