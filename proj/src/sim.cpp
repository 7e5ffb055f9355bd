#include "regobs/sim.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include "regobs/errors.hpp"

namespace regobs {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const char* edge_name(Edge e) {
    switch (e) {
        case Edge::Bottom: return "bottom";
        case Edge::Top: return "top";
        case Edge::Left: return "left";
        case Edge::Right: return "right";
    }
    return "?";
}

void append_weight(std::ostringstream& os, const WeightFn& w) {
    switch (w.kind) {
        case WeightFn::Kind::Constant:
            os << "const(" << fmt17(w.value) << ")";
            break;
        case WeightFn::Kind::CosCos:
            os << "coscos(" << w.a << "," << w.b << ")";
            break;
        case WeightFn::Kind::PolyProduct:
            os << "poly(";
            for (double c : w.p1) os << fmt17(c) << ",";
            os << ";";
            for (double c : w.p2) os << fmt17(c) << ",";
            os << ")";
            break;
    }
}

void append_descriptor(std::ostringstream& os, const FieldDescriptor& d) {
    switch (d.kind) {
        case FieldDescriptor::Kind::Zero:
            os << "zero";
            break;
        case FieldDescriptor::Kind::Modes:
        case FieldDescriptor::Kind::CosCos:
            os << (d.kind == FieldDescriptor::Kind::Modes ? "modes[" : "coscos[");
            for (const auto& t : d.terms)
                os << t.n << "," << t.m << "," << fmt17(t.value) << ";";
            os << "]";
            break;
        case FieldDescriptor::Kind::Raw:
            os << "raw[";
            for (double c : d.raw_coeffs) os << fmt17(c) << ";";
            os << "]";
            break;
    }
}

}  // namespace

ModalField FieldDescriptor::resolve(const ModalBasis& basis) const {
    ModalField f = ModalField::zero(basis);
    switch (kind) {
        case Kind::Zero:
            break;
        case Kind::Modes:
            for (const auto& t : terms) f.coeffs[basis.index_of(t.n, t.m)] += t.value;
            break;
        case Kind::CosCos:
            for (const auto& t : terms) {
                const int k = basis.index_of(t.n, t.m);
                f.coeffs[k] += t.value / basis.h1_norm_factor(k);
            }
            break;
        case Kind::Raw:
            if (static_cast<int>(raw_coeffs.size()) != basis.size())
                throw std::invalid_argument("raw coefficient descriptor length mismatch");
            for (int k = 0; k < basis.size(); ++k) f.coeffs[k] = raw_coeffs[k];
            break;
    }
    return f;
}

Eigen::VectorXd TimeGridSpec::resolve(int mode_count) const {
    const int n = samples > 0 ? samples : 4 * mode_count;
    Eigen::VectorXd grid(n);
    for (int j = 0; j < n; ++j)
        grid[j] = n == 1 ? 0.0 : t_end * static_cast<double>(j) / (n - 1);
    return grid;
}

void Scenario::validate() const {
    std::vector<std::string> v;
    if (n_max < 1) v.push_back("n_max must be >= 1");
    if (shift_c < 0.0) v.push_back("shift_c must be >= 0");
    if (sensors.empty()) v.push_back("sensors: at least one sensor is required");
    for (size_t i = 0; i < sensors.size(); ++i) {
        try {
            sensors[i].validate();
        } catch (const std::exception& e) {
            v.push_back("sensors[" + std::to_string(i) + "]: " + e.what());
        }
    }
    if (actuator) {
        try {
            actuator->validate();
        } catch (const std::exception& e) {
            v.push_back(std::string("actuator: ") + e.what());
        }
    }
    if (!(region.a >= 0.0 && region.a < region.b && region.b <= 1.0))
        v.push_back("region interval must satisfy 0 <= a < b <= 1");
    if (omega_r && !(*omega_r > 0.0 && *omega_r < 1.0))
        v.push_back("omega_r must lie in (0, 1)");
    if (!(dt > 0.0)) v.push_back("dt must be > 0");
    if (horizon < dt) v.push_back("horizon must be >= dt");
    if (time_grid.samples < 0) v.push_back("time_grid.samples must be >= 0");
    if (time_grid.t_end <= 0.0) v.push_back("time_grid.t_end must be > 0");
    if (gain_design.design == ObserverGain::Design::PolePlacement &&
        gain_design.alpha_target <= 0.0)
        v.push_back("gain.alpha_target must be > 0");
    if (gain_design.design == ObserverGain::Design::Collocated && gain_design.rho <= 0.0)
        v.push_back("gain.rho must be > 0");
    if (x0.kind == FieldDescriptor::Kind::Raw &&
        static_cast<int>(x0.raw_coeffs.size()) != (n_max + 1) * (n_max + 1))
        v.push_back("x0 raw coefficient length must equal (n_max+1)^2");
    if (z0.kind == FieldDescriptor::Kind::Raw &&
        static_cast<int>(z0.raw_coeffs.size()) != (n_max + 1) * (n_max + 1))
        v.push_back("z0 raw coefficient length must equal (n_max+1)^2");
    for (const auto& d : {&x0, &z0})
        for (const auto& t : d->terms)
            if (t.n < 0 || t.n > n_max || t.m < 0 || t.m > n_max)
                v.push_back("field descriptor mode (" + std::to_string(t.n) + "," +
                            std::to_string(t.m) + ") outside truncation");
    if (!v.empty()) throw ValidationError(std::move(v));
}

std::string Scenario::canonical_string() const {
    std::ostringstream os;
    os << "v1|n_max=" << n_max << "|c=" << fmt17(shift_c) << "|sensors=[";
    for (const auto& s : sensors) {
        switch (s.kind) {
            case SensorSpec::Kind::Pointwise:
                os << "pt(" << fmt17(s.location[0]) << "," << fmt17(s.location[1]) << ")";
                break;
            case SensorSpec::Kind::Zone:
                os << "zone(" << fmt17(s.rect[0]) << "," << fmt17(s.rect[1]) << ","
                   << fmt17(s.rect[2]) << "," << fmt17(s.rect[3]) << ",";
                append_weight(os, s.weight);
                os << ")";
                break;
            case SensorSpec::Kind::Filament:
                os << "fil(" << fmt17(s.p0[0]) << "," << fmt17(s.p0[1]) << "," << fmt17(s.p1[0])
                   << "," << fmt17(s.p1[1]) << ",";
                append_weight(os, s.weight);
                os << ")";
                break;
        }
        os << ";";
    }
    os << "]|actuator=";
    if (actuator) os << fmt17(actuator->location[0]) << "," << fmt17(actuator->location[1]);
    os << "|region=" << edge_name(region.edge) << "," << fmt17(region.a) << ","
       << fmt17(region.b);
    os << "|omega_r=";
    if (omega_r) os << fmt17(*omega_r);
    os << "|gain=";
    if (gain_design.design == ObserverGain::Design::PolePlacement)
        os << "pole," << fmt17(gain_design.alpha_target);
    else
        os << "colloc," << fmt17(gain_design.rho);
    os << "|x0=";
    append_descriptor(os, x0);
    os << "|z0=";
    append_descriptor(os, z0);
    os << "|u=[";
    for (size_t i = 0; i < control.knots.size(); ++i)
        os << fmt17(control.knots[i]) << ":" << fmt17(control.values[i]) << ";";
    os << "]|T=" << fmt17(horizon) << "|dt=" << fmt17(dt) << "|grid=" << fmt17(time_grid.t_end)
       << "," << time_grid.samples << "|seed=" << seed;
    return os.str();
}

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

SimulationResult run_scenario(const Scenario& s) {
    s.validate();
    const auto t_start = std::chrono::steady_clock::now();

    SimulationResult result;
    result.scenario_hash = fnv1a64(s.canonical_string());

    const ModalBasis basis = build_basis(s.n_max);
    const Eigen::VectorXd grid = s.time_grid.resolve(basis.size());

    result.rank_report = rank_condition(basis, s.sensors, group_eigenvalues(basis));
    result.detectability_report = detectability_test(basis, s.sensors, s.shift_c);
    result.strategic_omega =
        strategic_test(basis, s.sensors, omega_gradient_target(basis), grid);
    result.strategic_gamma = strategic_test_gradient(basis, s.sensors, s.region, grid);
    if (s.omega_r) {
        const RegionComparison cmp =
            compare_internal_boundary(basis, s.sensors, s.region, *s.omega_r, grid);
        result.strategic_omega_r = cmp.omega_r;
        result.internal_implication_ok = cmp.implication_ok;
    }

    std::optional<ObserverGain> gain;
    try {
        if (s.gain_design.design == ObserverGain::Design::PolePlacement)
            gain = design_gain_pole_placement(basis, s.sensors, s.shift_c,
                                             s.gain_design.alpha_target,
                                             static_cast<unsigned>(s.seed));
        else
            gain = design_gain_collocated(basis, s.sensors, s.gain_design.rho, s.shift_c);
        result.gain.designed = true;
        result.gain.spectral_abscissa = gain->spectral_abscissa;
    } catch (const DesignInfeasible& e) {
        result.gain.infeasible_reason = e.what();
        result.simulation_skipped = true;
    }

    if (gain) {
        result.simulation =
            simulate_observer(basis, s.sensors, s.actuator, *gain, s.x0.resolve(basis),
                              s.z0.resolve(basis), s.control, s.region, s.horizon, s.dt,
                              s.shift_c);
        result.error_trajectory = result.simulation->error;
    }

    result.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return result;
}

std::vector<SweepCell> run_sweep(const Scenario& tpl,
                                 const std::vector<std::array<double, 2>>& grid,
                                 int max_threads) {
    if (grid.empty()) throw std::invalid_argument("run_sweep: empty location grid");
    if (tpl.sensors.empty() || tpl.sensors.front().kind != SensorSpec::Kind::Pointwise)
        throw std::invalid_argument("run_sweep: template's first sensor must be pointwise");
    for (const auto& b : grid)
        if (!(b[0] > 0.0 && b[0] < 1.0 && b[1] > 0.0 && b[1] < 1.0))
            throw std::invalid_argument("run_sweep: grid point outside the open unit square");

    const ModalBasis basis = build_basis(tpl.n_max);
    const Eigen::VectorXd tgrid = tpl.time_grid.resolve(basis.size());
    const Eigen::MatrixXd target = gradient_trace_matrix(basis, tpl.region);

    std::vector<SweepCell> cells(grid.size());
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    unsigned nthreads = max_threads > 0 ? static_cast<unsigned>(max_threads) : hw;
    nthreads = std::min<unsigned>(nthreads, static_cast<unsigned>(grid.size()));

    auto worker = [&](size_t begin, size_t stride) {
        for (size_t i = begin; i < grid.size(); i += stride) {
            std::vector<SensorSpec> sensors = tpl.sensors;
            sensors.front().location = {grid[i][0], grid[i][1]};
            const StrategicVerdict v = strategic_test(basis, sensors, target, tgrid);
            cells[i] = {grid[i][0], grid[i][1], v.margin, v.strategic};
        }
    };
    if (nthreads <= 1) {
        worker(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker, t, nthreads);
        for (auto& th : pool) th.join();
    }
    return cells;
}

}  // namespace regobs
