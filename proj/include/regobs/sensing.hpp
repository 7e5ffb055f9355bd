#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "regobs/spectral.hpp"

namespace regobs {

/// Closed-form sensor weight f = P(xi1) * Q(xi2). Three shapes are
/// supported: a constant, a cosine product cos(a pi xi1) cos(b pi xi2),
/// and a product of polynomials of degree <= 4.
struct WeightFn {
    enum class Kind { Constant, CosCos, PolyProduct };
    Kind kind = Kind::Constant;
    double value = 1.0;                       // Constant
    int a = 0, b = 0;                         // CosCos frequencies
    std::array<double, 5> p1{}, p2{};         // PolyProduct coefficients, low order first

    double operator()(double xi1, double xi2) const;
};

struct SensorSpec {
    enum class Kind { Zone, Pointwise, Filament };
    Kind kind = Kind::Pointwise;
    std::string id;

    std::array<double, 2> location{0.5, 0.5};     // Pointwise
    std::array<double, 4> rect{0, 1, 0, 1};       // Zone support [x0,x1]x[y0,y1]
    std::array<double, 2> p0{}, p1{};             // Filament endpoints
    WeightFn weight;                              // Zone / Filament

    void validate() const;  // throws std::invalid_argument with the violated rule
};

struct ActuatorSpec {
    std::array<double, 2> location{0.5, 0.5};

    void validate() const;
};

/// Sampled sensor output: one row per time, one column per sensor.
struct OutputRecord {
    Eigen::VectorXd times;
    Eigen::MatrixXd samples;
};

/// Row of the output operator C over the basis: entry k = C phi_k.
Eigen::VectorXd output_row(const ModalBasis& basis, const SensorSpec& sensor);

/// y_i = <output_row(sensor_i), coeffs>.
Eigen::VectorXd observe(const ModalBasis& basis, const ModalField& field,
                        const std::vector<SensorSpec>& sensors);

/// Modal representation of B for a unit input: coeff_k = phi_k(b).
ModalField input_vector(const ModalBasis& basis, const ActuatorSpec& actuator);

/// Sampled observation operator K: row (j*q + i) holds
/// output_row(sensor_i)_k * exp(lambda_k t_j).
Eigen::MatrixXd observation_matrix(const ModalBasis& basis,
                                   const std::vector<SensorSpec>& sensors,
                                   const Eigen::VectorXd& time_grid);

/// Trapezoidal weights for a strictly increasing grid (single point -> 1).
Eigen::VectorXd trapezoid_weights(const Eigen::VectorXd& time_grid);

/// Discrete adjoint of observation_matrix under the trapezoid-weighted
/// inner product on the output samples.
ModalField adjoint_apply(const ModalBasis& basis, const std::vector<SensorSpec>& sensors,
                         const Eigen::VectorXd& time_grid, const OutputRecord& record);

}  // namespace regobs
