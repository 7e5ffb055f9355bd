#include "regobs/sensing.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "regobs/quadrature.hpp"

namespace regobs {

namespace {

constexpr double kPi = std::numbers::pi;

double poly_eval(const std::array<double, 5>& p, double x) {
    double v = 0.0;
    for (int i = 4; i >= 0; --i) v = v * x + p[i];
    return v;
}

bool interior(double x) { return x > 0.0 && x < 1.0; }
bool in_closed(double x) { return x >= 0.0 && x <= 1.0; }

}  // namespace

double WeightFn::operator()(double xi1, double xi2) const {
    switch (kind) {
        case Kind::Constant: return value;
        case Kind::CosCos: return std::cos(a * kPi * xi1) * std::cos(b * kPi * xi2);
        case Kind::PolyProduct: return poly_eval(p1, xi1) * poly_eval(p2, xi2);
    }
    return 0.0;
}

void SensorSpec::validate() const {
    switch (kind) {
        case Kind::Zone:
            if (!(rect[1] > rect[0] && rect[3] > rect[2]))
                throw std::invalid_argument("zone sensor support must have positive area");
            if (!(in_closed(rect[0]) && in_closed(rect[1]) && in_closed(rect[2]) && in_closed(rect[3])))
                throw std::invalid_argument("zone sensor support must lie inside the unit square");
            break;
        case Kind::Pointwise:
            if (!(interior(location[0]) && interior(location[1])))
                throw std::invalid_argument("pointwise sensor location must be strictly interior");
            break;
        case Kind::Filament:
            if (p0[0] == p1[0] && p0[1] == p1[1])
                throw std::invalid_argument("filament endpoints must be distinct");
            if (!(in_closed(p0[0]) && in_closed(p0[1]) && in_closed(p1[0]) && in_closed(p1[1])))
                throw std::invalid_argument("filament segment must lie in the closed unit square");
            break;
    }
}

void ActuatorSpec::validate() const {
    if (!(interior(location[0]) && interior(location[1])))
        throw std::invalid_argument("actuator location must be strictly interior");
}

Eigen::VectorXd output_row(const ModalBasis& basis, const SensorSpec& sensor) {
    sensor.validate();
    Eigen::VectorXd row(basis.size());
    switch (sensor.kind) {
        case SensorSpec::Kind::Pointwise: {
            for (int k = 0; k < basis.size(); ++k)
                row[k] = basis.eigenfunction(k, sensor.location[0], sensor.location[1]);
            break;
        }
        case SensorSpec::Kind::Zone: {
            const int pts = 16 * basis.truncation();
            const Quad1D qx = composite_gauss(sensor.rect[0], sensor.rect[1], pts);
            const Quad1D qy = composite_gauss(sensor.rect[2], sensor.rect[3], pts);
            for (int k = 0; k < basis.size(); ++k) {
                double acc = 0.0;
                for (size_t i = 0; i < qx.nodes.size(); ++i)
                    for (size_t j = 0; j < qy.nodes.size(); ++j)
                        acc += qx.weights[i] * qy.weights[j] *
                               sensor.weight(qx.nodes[i], qy.nodes[j]) *
                               basis.eigenfunction(k, qx.nodes[i], qy.nodes[j]);
                row[k] = acc;
            }
            break;
        }
        case SensorSpec::Kind::Filament: {
            const double dx = sensor.p1[0] - sensor.p0[0];
            const double dy = sensor.p1[1] - sensor.p0[1];
            const double len = std::hypot(dx, dy);
            const Quad1D q = composite_gauss(0.0, 1.0, 8 * basis.truncation());
            for (int k = 0; k < basis.size(); ++k) {
                double acc = 0.0;
                for (size_t i = 0; i < q.nodes.size(); ++i) {
                    const double x = sensor.p0[0] + q.nodes[i] * dx;
                    const double y = sensor.p0[1] + q.nodes[i] * dy;
                    acc += q.weights[i] * sensor.weight(x, y) * basis.eigenfunction(k, x, y);
                }
                row[k] = acc * len;
            }
            break;
        }
    }
    return row;
}

Eigen::VectorXd observe(const ModalBasis& basis, const ModalField& field,
                        const std::vector<SensorSpec>& sensors) {
    Eigen::VectorXd y(sensors.size());
    for (size_t i = 0; i < sensors.size(); ++i)
        y[static_cast<int>(i)] = output_row(basis, sensors[i]).dot(field.coeffs);
    return y;
}

ModalField input_vector(const ModalBasis& basis, const ActuatorSpec& actuator) {
    actuator.validate();
    ModalField f = ModalField::zero(basis);
    for (int k = 0; k < basis.size(); ++k)
        f.coeffs[k] = basis.eigenfunction(k, actuator.location[0], actuator.location[1]);
    return f;
}

Eigen::MatrixXd observation_matrix(const ModalBasis& basis,
                                   const std::vector<SensorSpec>& sensors,
                                   const Eigen::VectorXd& time_grid) {
    if (time_grid.size() == 0) throw std::invalid_argument("observation_matrix: empty time grid");
    for (int j = 0; j < time_grid.size(); ++j) {
        if (time_grid[j] < 0.0) throw std::invalid_argument("observation_matrix: negative time");
        if (j > 0 && time_grid[j] <= time_grid[j - 1])
            throw std::invalid_argument("observation_matrix: grid must be strictly increasing");
    }
    const int q = static_cast<int>(sensors.size());
    Eigen::MatrixXd rows(q, basis.size());
    for (int i = 0; i < q; ++i) rows.row(i) = output_row(basis, sensors[i]).transpose();

    Eigen::MatrixXd O(q * time_grid.size(), basis.size());
    for (int j = 0; j < time_grid.size(); ++j)
        for (int k = 0; k < basis.size(); ++k) {
            const double decay = std::exp(basis.eigenvalue(k) * time_grid[j]);
            for (int i = 0; i < q; ++i) O(j * q + i, k) = rows(i, k) * decay;
        }
    return O;
}

Eigen::VectorXd trapezoid_weights(const Eigen::VectorXd& time_grid) {
    const int n = static_cast<int>(time_grid.size());
    Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
    if (n == 1) {
        w[0] = 1.0;
        return w;
    }
    for (int j = 0; j + 1 < n; ++j) {
        const double h = time_grid[j + 1] - time_grid[j];
        w[j] += 0.5 * h;
        w[j + 1] += 0.5 * h;
    }
    return w;
}

ModalField adjoint_apply(const ModalBasis& basis, const std::vector<SensorSpec>& sensors,
                         const Eigen::VectorXd& time_grid, const OutputRecord& record) {
    const int q = static_cast<int>(sensors.size());
    if (record.times.size() != time_grid.size() || record.samples.rows() != time_grid.size() ||
        record.samples.cols() != q)
        throw std::invalid_argument("adjoint_apply: record shape does not match grid/sensors");

    const Eigen::MatrixXd O = observation_matrix(basis, sensors, time_grid);
    const Eigen::VectorXd w = trapezoid_weights(time_grid);
    ModalField out = ModalField::zero(basis);
    for (int j = 0; j < time_grid.size(); ++j)
        for (int i = 0; i < q; ++i)
            out.coeffs += w[j] * record.samples(j, i) * O.row(j * q + i).transpose();
    return out;
}

}  // namespace regobs
