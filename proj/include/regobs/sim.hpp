#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "regobs/analysis.hpp"
#include "regobs/observer.hpp"
#include "regobs/sensing.hpp"
#include "regobs/spectral.hpp"

namespace regobs {

/// Closed-form initial-field descriptor; scenarios stay human-auditable and
/// a raw-coefficient escape hatch exists for tests.
struct FieldDescriptor {
    enum class Kind { Zero, Modes, CosCos, Raw };
    struct Term {
        int n = 0, m = 0;
        double value = 0.0;
    };
    Kind kind = Kind::Zero;
    std::vector<Term> terms;        // Modes: value * phi_nm; CosCos: value * cos cos
    std::vector<double> raw_coeffs; // Raw

    ModalField resolve(const ModalBasis& basis) const;
};

struct GainDesignSpec {
    ObserverGain::Design design = ObserverGain::Design::PolePlacement;
    double alpha_target = 1.0;  // PolePlacement
    double rho = 1.0;           // Collocated
};

struct TimeGridSpec {
    double t_end = 1.0;
    int samples = 0;  // 0 -> default 4 * mode count

    Eigen::VectorXd resolve(int mode_count) const;
};

struct Scenario {
    int n_max = 5;
    double shift_c = 0.0;
    std::vector<SensorSpec> sensors;
    std::optional<ActuatorSpec> actuator;
    BoundaryRegion region;
    std::optional<double> omega_r;
    GainDesignSpec gain_design;
    FieldDescriptor x0;
    FieldDescriptor z0;
    Schedule control = Schedule::zero();
    double horizon = 1.0;
    double dt = 1e-3;
    TimeGridSpec time_grid;
    std::uint64_t seed = 1;

    /// Throws ValidationError listing every violated invariant.
    void validate() const;

    /// Deterministic canonical text form (17 significant digits).
    std::string canonical_string() const;
};

struct GainSummary {
    bool designed = false;
    double spectral_abscissa = 0.0;
    std::string infeasible_reason;
};

struct SimulationResult {
    std::uint64_t scenario_hash = 0;
    RankReport rank_report;
    DetectabilityReport detectability_report;
    StrategicVerdict strategic_omega;   ///< gradient on the whole domain
    StrategicVerdict strategic_gamma;   ///< gradient trace on Gamma*
    std::optional<StrategicVerdict> strategic_omega_r;
    bool internal_implication_ok = true;
    GainSummary gain;
    std::optional<ErrorTrajectory> error_trajectory;
    std::optional<SimulationOutput> simulation;
    bool simulation_skipped = false;
    double wall_time_s = 0.0;
};

struct SweepCell {
    double b1 = 0.0, b2 = 0.0;
    double margin = 0.0;
    bool strategic = false;
};

std::uint64_t fnv1a64(const std::string& data);

SimulationResult run_scenario(const Scenario& s);

/// Margin/verdict of the Gamma* gradient test with the first sensor moved
/// over the grid points; cells are evaluated concurrently (capped by
/// max_threads, 0 = hardware default) and emitted in grid order.
std::vector<SweepCell> run_sweep(const Scenario& tpl,
                                 const std::vector<std::array<double, 2>>& grid,
                                 int max_threads = 0);

}  // namespace regobs
