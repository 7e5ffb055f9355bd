#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "regobs/sensing.hpp"
#include "regobs/spectral.hpp"

using namespace regobs;

namespace {

constexpr double kPi = std::numbers::pi;

// Dense midpoint quadrature of g over [x0,x1]x[y0,y1] -- independent oracle
// for the zone sensor quadrature.
template <typename F>
double midpoint_2d(F g, double x0, double x1, double y0, double y1, int n) {
    const double hx = (x1 - x0) / n, hy = (y1 - y0) / n;
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            acc += g(x0 + (i + 0.5) * hx, y0 + (j + 0.5) * hy);
    return acc * hx * hy;
}

SensorSpec pointwise_at(double x, double y) {
    SensorSpec s;
    s.kind = SensorSpec::Kind::Pointwise;
    s.location = {x, y};
    return s;
}

}  // namespace

TEST_CASE("pointwise output row samples the eigenfunctions") {
    const ModalBasis basis = build_basis(4);
    const SensorSpec s = pointwise_at(0.23, 0.41);
    const Eigen::VectorXd row = output_row(basis, s);
    REQUIRE(row.size() == basis.size());
    for (int k = 0; k < basis.size(); ++k) {
        const ModeIndex& mi = basis.mode(k);
        const double expected = basis.h1_norm_factor(k) * std::cos(mi.n * kPi * 0.23) *
                                std::cos(mi.m * kPi * 0.41);
        CHECK(row[k] == doctest::Approx(expected).epsilon(1e-14));
    }
}

TEST_CASE("full-domain constant zone sees only the constant mode") {
    const ModalBasis basis = build_basis(5);
    SensorSpec s;
    s.kind = SensorSpec::Kind::Zone;
    s.rect = {0.0, 1.0, 0.0, 1.0};
    s.weight.kind = WeightFn::Kind::Constant;
    s.weight.value = 3.0;
    const Eigen::VectorXd row = output_row(basis, s);
    // integral of cos(n pi x) over [0,1] vanishes for n >= 1.
    CHECK(row[basis.index_of(0, 0)] ==
          doctest::Approx(3.0 * basis.h1_norm_factor(basis.index_of(0, 0))).epsilon(1e-13));
    for (int k = 0; k < basis.size(); ++k) {
        if (k == basis.index_of(0, 0)) continue;
        CHECK(std::abs(row[k]) < 1e-12);
    }
}

TEST_CASE("full-domain coscos zone weight is orthogonal to all but one mode") {
    const ModalBasis basis = build_basis(5);
    SensorSpec s;
    s.kind = SensorSpec::Kind::Zone;
    s.rect = {0.0, 1.0, 0.0, 1.0};
    s.weight.kind = WeightFn::Kind::CosCos;
    s.weight.a = 2;
    s.weight.b = 3;
    const Eigen::VectorXd row = output_row(basis, s);
    const int hit = basis.index_of(2, 3);
    CHECK(row[hit] == doctest::Approx(0.25 * basis.h1_norm_factor(hit)).epsilon(1e-12));
    for (int k = 0; k < basis.size(); ++k) {
        if (k == hit) continue;
        CHECK(std::abs(row[k]) < 1e-12);
    }
}

TEST_CASE("zone quadrature matches a dense midpoint oracle") {
    const ModalBasis basis = build_basis(4);
    SensorSpec s;
    s.kind = SensorSpec::Kind::Zone;
    s.rect = {0.15, 0.55, 0.3, 0.9};
    s.weight.kind = WeightFn::Kind::PolyProduct;
    s.weight.p1 = {0.5, -1.0, 2.0, 0.0, 1.5};
    s.weight.p2 = {1.0, 0.25, 0.0, -0.75, 0.0};
    const Eigen::VectorXd row = output_row(basis, s);
    for (int k : {0, 3, basis.index_of(2, 2), basis.index_of(4, 1), basis.index_of(3, 4)}) {
        const double oracle = midpoint_2d(
            [&](double x, double y) { return s.weight(x, y) * basis.eigenfunction(k, x, y); },
            s.rect[0], s.rect[1], s.rect[2], s.rect[3], 600);
        CHECK(row[k] == doctest::Approx(oracle).epsilon(2e-6));
    }
}

TEST_CASE("filament quadrature matches a dense 1d oracle and scales with length") {
    const ModalBasis basis = build_basis(4);
    SensorSpec s;
    s.kind = SensorSpec::Kind::Filament;
    s.p0 = {0.1, 0.2};
    s.p1 = {0.8, 0.7};
    s.weight.kind = WeightFn::Kind::CosCos;
    s.weight.a = 1;
    s.weight.b = 2;
    const double len = std::hypot(s.p1[0] - s.p0[0], s.p1[1] - s.p0[1]);
    const Eigen::VectorXd row = output_row(basis, s);
    for (int k : {0, 5, basis.index_of(3, 3), basis.index_of(4, 2)}) {
        const int n = 20000;
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            const double t = (i + 0.5) / n;
            const double x = s.p0[0] + t * (s.p1[0] - s.p0[0]);
            const double y = s.p0[1] + t * (s.p1[1] - s.p0[1]);
            acc += s.weight(x, y) * basis.eigenfunction(k, x, y);
        }
        CHECK(row[k] == doctest::Approx(len * acc / n).epsilon(1e-8));
    }
}

TEST_CASE("symmetric horizontal filament annihilates a whole mode family") {
    // Segment [0,1] x {1/4} with weight cos(pi xi1) cos(pi xi2): cosine
    // orthogonality kills every n != 1, and cos(2 pi / 4) = 0 kills m = 2.
    const ModalBasis basis = build_basis(5);
    SensorSpec s;
    s.kind = SensorSpec::Kind::Filament;
    s.p0 = {0.0, 0.25};
    s.p1 = {1.0, 0.25};
    s.weight.kind = WeightFn::Kind::CosCos;
    s.weight.a = 1;
    s.weight.b = 1;
    const Eigen::VectorXd row = output_row(basis, s);
    for (int k = 0; k < basis.size(); ++k) {
        const ModeIndex& mi = basis.mode(k);
        if (mi.n != 1 || mi.m == 2)
            CHECK(std::abs(row[k]) < 1e-13);
    }
    CHECK(std::abs(row[basis.index_of(1, 2)]) < 1e-13);
    CHECK(std::abs(row[basis.index_of(1, 1)]) > 1e-2);
    CHECK(std::abs(row[basis.index_of(1, 0)]) > 1e-2);
}

TEST_CASE("observe is linear in the field") {
    const ModalBasis basis = build_basis(3);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    const std::vector<SensorSpec> sensors = {pointwise_at(0.31, 0.62), pointwise_at(0.77, 0.18)};
    ModalField f{Eigen::VectorXd::NullaryExpr(basis.size(), [&](int) { return dist(rng); })};
    ModalField g{Eigen::VectorXd::NullaryExpr(basis.size(), [&](int) { return dist(rng); })};
    ModalField combo{2.5 * f.coeffs - 0.75 * g.coeffs};
    const Eigen::VectorXd lhs = observe(basis, combo, sensors);
    const Eigen::VectorXd rhs =
        2.5 * observe(basis, f, sensors) - 0.75 * observe(basis, g, sensors);
    CHECK((lhs - rhs).norm() < 1e-12);
}

TEST_CASE("observation matrix stacks decayed output rows") {
    const ModalBasis basis = build_basis(2);
    const std::vector<SensorSpec> sensors = {pointwise_at(0.3, 0.4), pointwise_at(0.6, 0.9)};
    Eigen::VectorXd grid(3);
    grid << 0.0, 0.01, 0.02;
    const Eigen::MatrixXd O = observation_matrix(basis, sensors, grid);
    REQUIRE(O.rows() == 6);
    REQUIRE(O.cols() == basis.size());
    const Eigen::VectorXd r0 = output_row(basis, sensors[0]);
    const Eigen::VectorXd r1 = output_row(basis, sensors[1]);
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < basis.size(); ++k) {
            const double d = std::exp(basis.eigenvalue(k) * grid[j]);
            CHECK(O(2 * j + 0, k) == doctest::Approx(r0[k] * d).epsilon(1e-14));
            CHECK(O(2 * j + 1, k) == doctest::Approx(r1[k] * d).epsilon(1e-14));
        }

    SUBCASE("non-increasing grids are rejected") {
        Eigen::VectorXd bad(2);
        bad << 0.5, 0.5;
        CHECK_THROWS_AS(observation_matrix(basis, sensors, bad), std::invalid_argument);
        bad << -0.1, 0.5;
        CHECK_THROWS_AS(observation_matrix(basis, sensors, bad), std::invalid_argument);
    }
}

TEST_CASE("trapezoid weights reproduce interval lengths") {
    Eigen::VectorXd grid(4);
    grid << 0.0, 0.1, 0.4, 1.0;
    const Eigen::VectorXd w = trapezoid_weights(grid);
    CHECK(w.sum() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(w[0] == doctest::Approx(0.05));
    CHECK(w[1] == doctest::Approx(0.2));
    CHECK(w[2] == doctest::Approx(0.45));
    CHECK(w[3] == doctest::Approx(0.3));
    Eigen::VectorXd single(1);
    single << 0.7;
    CHECK(trapezoid_weights(single)[0] == doctest::Approx(1.0));
}

TEST_CASE("adjoint identity <K a, y>_W = <a, K* y> holds on random data") {
    const ModalBasis basis = build_basis(3);
    const std::vector<SensorSpec> sensors = {pointwise_at(0.23, 0.41), pointwise_at(0.58, 0.12)};
    const int q = 2;
    Eigen::VectorXd grid(9);
    for (int j = 0; j < 9; ++j) grid[j] = 0.003 * j * j + 0.001 * j;
    grid[0] = 0.0;
    const Eigen::MatrixXd O = observation_matrix(basis, sensors, grid);
    const Eigen::VectorXd w = trapezoid_weights(grid);

    std::mt19937 rng(99);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    for (int trial = 0; trial < 25; ++trial) {
        ModalField a{Eigen::VectorXd::NullaryExpr(basis.size(), [&](int) { return dist(rng); })};
        OutputRecord rec;
        rec.times = grid;
        rec.samples = Eigen::MatrixXd::NullaryExpr(grid.size(), q, [&](int, int) { return dist(rng); });

        double lhs = 0.0;
        const Eigen::VectorXd Ka = O * a.coeffs;
        for (int j = 0; j < grid.size(); ++j)
            for (int i = 0; i < q; ++i) lhs += w[j] * Ka[j * q + i] * rec.samples(j, i);
        const ModalField astar = adjoint_apply(basis, sensors, grid, rec);
        const double rhs = a.coeffs.dot(astar.coeffs);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }

    SUBCASE("shape mismatches are rejected") {
        OutputRecord rec;
        rec.times = grid;
        rec.samples = Eigen::MatrixXd::Zero(grid.size(), q + 1);
        CHECK_THROWS_AS(adjoint_apply(basis, sensors, grid, rec), std::invalid_argument);
    }
}

TEST_CASE("sensor validation rejects malformed geometry") {
    SensorSpec p = pointwise_at(0.0, 0.5);
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.location = {0.5, 1.0};
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);

    SensorSpec z;
    z.kind = SensorSpec::Kind::Zone;
    z.rect = {0.4, 0.4, 0.0, 1.0};
    CHECK_THROWS_AS(z.validate(), std::invalid_argument);
    z.rect = {-0.1, 0.5, 0.0, 1.0};
    CHECK_THROWS_AS(z.validate(), std::invalid_argument);

    SensorSpec f;
    f.kind = SensorSpec::Kind::Filament;
    f.p0 = {0.3, 0.3};
    f.p1 = {0.3, 0.3};
    CHECK_THROWS_AS(f.validate(), std::invalid_argument);
    f.p1 = {1.2, 0.3};
    CHECK_THROWS_AS(f.validate(), std::invalid_argument);

    ActuatorSpec a;
    a.location = {0.5, 0.0};
    CHECK_THROWS_AS(a.validate(), std::invalid_argument);
}

TEST_CASE("input vector samples eigenfunctions at the actuator point") {
    const ModalBasis basis = build_basis(3);
    ActuatorSpec a;
    a.location = {0.37, 0.61};
    const ModalField b = input_vector(basis, a);
    for (int k = 0; k < basis.size(); ++k)
        CHECK(b.coeffs[k] == doctest::Approx(basis.eigenfunction(k, 0.37, 0.61)).epsilon(1e-14));
}
