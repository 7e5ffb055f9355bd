#include "regobs/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"

#include "regobs/errors.hpp"

namespace regobs::cli {

namespace {

using nlohmann::json;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void expect_keys(const json& obj, const std::string& ptr,
                 std::initializer_list<const char*> allowed,
                 std::vector<std::string>& errors) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) ok = true;
        if (!ok) errors.push_back(ptr + "/" + it.key() + ": unknown key");
    }
}

double get_num(const json& obj, const std::string& ptr, const char* key,
               std::vector<std::string>& errors, double fallback = 0.0) {
    if (!obj.contains(key) || !obj[key].is_number()) {
        errors.push_back(ptr + "/" + key + ": number required");
        return fallback;
    }
    return obj[key].get<double>();
}

std::array<double, 2> get_point(const json& obj, const std::string& ptr, const char* key,
                                std::vector<std::string>& errors) {
    if (!obj.contains(key) || !obj[key].is_array() || obj[key].size() != 2 ||
        !obj[key][0].is_number() || !obj[key][1].is_number()) {
        errors.push_back(ptr + "/" + key + ": [x, y] required");
        return {0.5, 0.5};
    }
    return {obj[key][0].get<double>(), obj[key][1].get<double>()};
}

WeightFn parse_weight(const json& w, const std::string& ptr, std::vector<std::string>& errors) {
    WeightFn fn;
    if (!w.is_object() || !w.contains("type") || !w["type"].is_string()) {
        errors.push_back(ptr + ": weight object with \"type\" required");
        return fn;
    }
    const std::string type = w["type"].get<std::string>();
    if (type == "constant") {
        expect_keys(w, ptr, {"type", "value"}, errors);
        fn.kind = WeightFn::Kind::Constant;
        fn.value = get_num(w, ptr, "value", errors, 1.0);
    } else if (type == "coscos") {
        expect_keys(w, ptr, {"type", "a", "b"}, errors);
        fn.kind = WeightFn::Kind::CosCos;
        fn.a = static_cast<int>(get_num(w, ptr, "a", errors));
        fn.b = static_cast<int>(get_num(w, ptr, "b", errors));
    } else if (type == "poly") {
        expect_keys(w, ptr, {"type", "p1", "p2"}, errors);
        fn.kind = WeightFn::Kind::PolyProduct;
        for (const char* key : {"p1", "p2"}) {
            auto& dst = std::string(key) == "p1" ? fn.p1 : fn.p2;
            if (!w.contains(key) || !w[key].is_array() || w[key].size() > 5) {
                errors.push_back(ptr + "/" + key + ": array of <= 5 coefficients required");
                continue;
            }
            for (size_t i = 0; i < w[key].size(); ++i) dst[i] = w[key][i].get<double>();
        }
    } else {
        errors.push_back(ptr + "/type: must be constant | coscos | poly");
    }
    return fn;
}

SensorSpec parse_sensor(const json& s, const std::string& ptr,
                        std::vector<std::string>& errors) {
    SensorSpec spec;
    if (!s.is_object() || !s.contains("kind") || !s["kind"].is_string()) {
        errors.push_back(ptr + ": sensor object with \"kind\" required");
        return spec;
    }
    if (s.contains("id") && s["id"].is_string()) spec.id = s["id"].get<std::string>();
    const std::string kind = s["kind"].get<std::string>();
    if (kind == "pointwise") {
        expect_keys(s, ptr, {"kind", "id", "location"}, errors);
        spec.kind = SensorSpec::Kind::Pointwise;
        spec.location = get_point(s, ptr, "location", errors);
    } else if (kind == "zone") {
        expect_keys(s, ptr, {"kind", "id", "rect", "weight"}, errors);
        spec.kind = SensorSpec::Kind::Zone;
        if (!s.contains("rect") || !s["rect"].is_array() || s["rect"].size() != 4) {
            errors.push_back(ptr + "/rect: [x0, x1, y0, y1] required");
        } else {
            for (int i = 0; i < 4; ++i) spec.rect[i] = s["rect"][i].get<double>();
        }
        if (s.contains("weight")) spec.weight = parse_weight(s["weight"], ptr + "/weight", errors);
    } else if (kind == "filament") {
        expect_keys(s, ptr, {"kind", "id", "p0", "p1", "weight"}, errors);
        spec.kind = SensorSpec::Kind::Filament;
        spec.p0 = get_point(s, ptr, "p0", errors);
        spec.p1 = get_point(s, ptr, "p1", errors);
        if (s.contains("weight")) spec.weight = parse_weight(s["weight"], ptr + "/weight", errors);
    } else {
        errors.push_back(ptr + "/kind: must be pointwise | zone | filament");
    }
    return spec;
}

FieldDescriptor parse_descriptor(const json& d, const std::string& ptr,
                                 std::vector<std::string>& errors) {
    FieldDescriptor fd;
    if (!d.is_object() || !d.contains("type") || !d["type"].is_string()) {
        errors.push_back(ptr + ": descriptor object with \"type\" required");
        return fd;
    }
    const std::string type = d["type"].get<std::string>();
    if (type == "zero") {
        expect_keys(d, ptr, {"type"}, errors);
        fd.kind = FieldDescriptor::Kind::Zero;
    } else if (type == "modes" || type == "coscos") {
        expect_keys(d, ptr, {"type", "terms"}, errors);
        fd.kind = type == "modes" ? FieldDescriptor::Kind::Modes : FieldDescriptor::Kind::CosCos;
        if (!d.contains("terms") || !d["terms"].is_array()) {
            errors.push_back(ptr + "/terms: array required");
        } else {
            const char* vkey = type == "modes" ? "coeff" : "amp";
            for (size_t i = 0; i < d["terms"].size(); ++i) {
                const json& t = d["terms"][i];
                const std::string tptr = ptr + "/terms/" + std::to_string(i);
                expect_keys(t, tptr, {"n", "m", type == "modes" ? "coeff" : "amp"}, errors);
                FieldDescriptor::Term term;
                term.n = static_cast<int>(get_num(t, tptr, "n", errors));
                term.m = static_cast<int>(get_num(t, tptr, "m", errors));
                term.value = get_num(t, tptr, vkey, errors);
                fd.terms.push_back(term);
            }
        }
    } else if (type == "raw") {
        expect_keys(d, ptr, {"type", "coeffs"}, errors);
        fd.kind = FieldDescriptor::Kind::Raw;
        if (!d.contains("coeffs") || !d["coeffs"].is_array()) {
            errors.push_back(ptr + "/coeffs: array required");
        } else {
            for (const auto& c : d["coeffs"]) fd.raw_coeffs.push_back(c.get<double>());
        }
    } else {
        errors.push_back(ptr + "/type: must be zero | modes | coscos | raw");
    }
    return fd;
}

Edge parse_edge(const std::string& name, const std::string& ptr,
                std::vector<std::string>& errors) {
    if (name == "bottom") return Edge::Bottom;
    if (name == "top") return Edge::Top;
    if (name == "left") return Edge::Left;
    if (name == "right") return Edge::Right;
    errors.push_back(ptr + ": must be bottom | top | left | right");
    return Edge::Top;
}

const char* edge_name(Edge e) {
    switch (e) {
        case Edge::Bottom: return "bottom";
        case Edge::Top: return "top";
        case Edge::Left: return "left";
        case Edge::Right: return "right";
    }
    return "top";
}

Scenario scenario_from_json(const json& doc) {
    std::vector<std::string> errors;
    Scenario s;
    if (!doc.is_object()) throw ValidationError({"config root must be a JSON object"});
    expect_keys(doc, "",
                {"version", "n_max", "shift_c", "sensors", "actuator", "region", "omega_r",
                 "gain", "x0", "z0", "control", "horizon", "dt", "time_grid", "seed"},
                errors);
    if (!doc.contains("version") || !doc["version"].is_number_integer() ||
        doc["version"].get<int>() != 1)
        errors.push_back("/version: must be the integer 1");
    s.n_max = static_cast<int>(get_num(doc, "", "n_max", errors, 5));
    if (doc.contains("shift_c")) s.shift_c = get_num(doc, "", "shift_c", errors);
    if (!doc.contains("sensors") || !doc["sensors"].is_array() || doc["sensors"].empty()) {
        errors.push_back("/sensors: non-empty array required");
    } else {
        for (size_t i = 0; i < doc["sensors"].size(); ++i)
            s.sensors.push_back(
                parse_sensor(doc["sensors"][i], "/sensors/" + std::to_string(i), errors));
    }
    if (doc.contains("actuator")) {
        ActuatorSpec a;
        expect_keys(doc["actuator"], "/actuator", {"location"}, errors);
        a.location = get_point(doc["actuator"], "/actuator", "location", errors);
        s.actuator = a;
    }
    if (doc.contains("region")) {
        const json& r = doc["region"];
        expect_keys(r, "/region", {"edge", "interval"}, errors);
        if (r.contains("edge") && r["edge"].is_string())
            s.region.edge = parse_edge(r["edge"].get<std::string>(), "/region/edge", errors);
        else
            errors.push_back("/region/edge: string required");
        if (r.contains("interval") && r["interval"].is_array() && r["interval"].size() == 2) {
            s.region.a = r["interval"][0].get<double>();
            s.region.b = r["interval"][1].get<double>();
        } else {
            errors.push_back("/region/interval: [a, b] required");
        }
    } else {
        errors.push_back("/region: required");
    }
    if (doc.contains("omega_r")) s.omega_r = get_num(doc, "", "omega_r", errors);
    if (doc.contains("gain")) {
        const json& g = doc["gain"];
        expect_keys(g, "/gain", {"design", "alpha_target", "rho"}, errors);
        const std::string design =
            g.contains("design") && g["design"].is_string() ? g["design"].get<std::string>() : "";
        if (design == "pole_placement") {
            s.gain_design.design = ObserverGain::Design::PolePlacement;
            s.gain_design.alpha_target = get_num(g, "/gain", "alpha_target", errors, 1.0);
        } else if (design == "collocated") {
            s.gain_design.design = ObserverGain::Design::Collocated;
            s.gain_design.rho = get_num(g, "/gain", "rho", errors, 1.0);
        } else {
            errors.push_back("/gain/design: must be pole_placement | collocated");
        }
    }
    if (doc.contains("x0")) s.x0 = parse_descriptor(doc["x0"], "/x0", errors);
    if (doc.contains("z0")) s.z0 = parse_descriptor(doc["z0"], "/z0", errors);
    if (doc.contains("control")) {
        const json& c = doc["control"];
        expect_keys(c, "/control", {"knots", "values"}, errors);
        if (c.contains("knots") && c.contains("values") && c["knots"].is_array() &&
            c["values"].is_array() && c["knots"].size() == c["values"].size() &&
            !c["knots"].empty()) {
            s.control.knots.clear();
            s.control.values.clear();
            for (const auto& k : c["knots"]) s.control.knots.push_back(k.get<double>());
            for (const auto& v : c["values"]) s.control.values.push_back(v.get<double>());
        } else {
            errors.push_back("/control: equal-length non-empty knots and values required");
        }
    }
    if (doc.contains("horizon")) s.horizon = get_num(doc, "", "horizon", errors, 1.0);
    if (doc.contains("dt")) s.dt = get_num(doc, "", "dt", errors, 1e-3);
    if (doc.contains("time_grid")) {
        const json& g = doc["time_grid"];
        expect_keys(g, "/time_grid", {"t_end", "samples"}, errors);
        if (g.contains("t_end")) s.time_grid.t_end = get_num(g, "/time_grid", "t_end", errors, 1.0);
        if (g.contains("samples"))
            s.time_grid.samples = static_cast<int>(get_num(g, "/time_grid", "samples", errors));
    }
    if (doc.contains("seed")) s.seed = doc["seed"].get<std::uint64_t>();
    if (!errors.empty()) throw ValidationError(std::move(errors));
    s.validate();
    return s;
}

json weight_to_json(const WeightFn& w) {
    switch (w.kind) {
        case WeightFn::Kind::Constant: return {{"type", "constant"}, {"value", w.value}};
        case WeightFn::Kind::CosCos: return {{"type", "coscos"}, {"a", w.a}, {"b", w.b}};
        case WeightFn::Kind::PolyProduct:
            return {{"type", "poly"},
                    {"p1", std::vector<double>(w.p1.begin(), w.p1.end())},
                    {"p2", std::vector<double>(w.p2.begin(), w.p2.end())}};
    }
    return {};
}

json descriptor_to_json(const FieldDescriptor& d) {
    switch (d.kind) {
        case FieldDescriptor::Kind::Zero: return {{"type", "zero"}};
        case FieldDescriptor::Kind::Modes:
        case FieldDescriptor::Kind::CosCos: {
            json terms = json::array();
            const bool modes = d.kind == FieldDescriptor::Kind::Modes;
            for (const auto& t : d.terms)
                terms.push_back(modes ? json{{"n", t.n}, {"m", t.m}, {"coeff", t.value}}
                                      : json{{"n", t.n}, {"m", t.m}, {"amp", t.value}});
            return {{"type", modes ? "modes" : "coscos"}, {"terms", terms}};
        }
        case FieldDescriptor::Kind::Raw: return {{"type", "raw"}, {"coeffs", d.raw_coeffs}};
    }
    return {};
}

json scenario_to_json(const Scenario& s) {
    json doc;
    doc["version"] = 1;
    doc["n_max"] = s.n_max;
    doc["shift_c"] = s.shift_c;
    json sensors = json::array();
    for (const auto& sp : s.sensors) {
        json j;
        if (!sp.id.empty()) j["id"] = sp.id;
        switch (sp.kind) {
            case SensorSpec::Kind::Pointwise:
                j["kind"] = "pointwise";
                j["location"] = {sp.location[0], sp.location[1]};
                break;
            case SensorSpec::Kind::Zone:
                j["kind"] = "zone";
                j["rect"] = {sp.rect[0], sp.rect[1], sp.rect[2], sp.rect[3]};
                j["weight"] = weight_to_json(sp.weight);
                break;
            case SensorSpec::Kind::Filament:
                j["kind"] = "filament";
                j["p0"] = {sp.p0[0], sp.p0[1]};
                j["p1"] = {sp.p1[0], sp.p1[1]};
                j["weight"] = weight_to_json(sp.weight);
                break;
        }
        sensors.push_back(j);
    }
    doc["sensors"] = sensors;
    if (s.actuator) doc["actuator"] = {{"location", {s.actuator->location[0], s.actuator->location[1]}}};
    doc["region"] = {{"edge", edge_name(s.region.edge)}, {"interval", {s.region.a, s.region.b}}};
    if (s.omega_r) doc["omega_r"] = *s.omega_r;
    if (s.gain_design.design == ObserverGain::Design::PolePlacement)
        doc["gain"] = {{"design", "pole_placement"}, {"alpha_target", s.gain_design.alpha_target}};
    else
        doc["gain"] = {{"design", "collocated"}, {"rho", s.gain_design.rho}};
    doc["x0"] = descriptor_to_json(s.x0);
    doc["z0"] = descriptor_to_json(s.z0);
    doc["control"] = {{"knots", s.control.knots}, {"values", s.control.values}};
    doc["horizon"] = s.horizon;
    doc["dt"] = s.dt;
    doc["time_grid"] = {{"t_end", s.time_grid.t_end}, {"samples", s.time_grid.samples}};
    doc["seed"] = s.seed;
    return doc;
}

// ---- output helpers ------------------------------------------------------

class OutputSet {
public:
    OutputSet(const std::filesystem::path& dir, std::uint64_t scenario_hash)
        : dir_(dir), hash_(scenario_hash) {
        std::filesystem::create_directories(dir);
    }

    void write(const std::string& name, const std::string& content) {
        std::ofstream os(dir_ / name, std::ios::binary);
        os << content;
        os.close();
        files_.push_back({name, fnv1a64(content)});
    }

    void note(const std::string& key, const json& value) { notes_[key] = value; }

    void finish() {
        json manifest;
        char stamp[64];
        std::time_t now = std::time(nullptr);
        std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        char hash_hex[32];
        std::snprintf(hash_hex, sizeof hash_hex, "%016llx",
                      static_cast<unsigned long long>(hash_));
        manifest["scenario_hash"] = hash_hex;
        manifest["tool_version"] = kToolVersion;
        manifest["timestamp"] = stamp;
        json files = json::array();
        for (const auto& [name, digest] : files_) {
            char dg[32];
            std::snprintf(dg, sizeof dg, "%016llx", static_cast<unsigned long long>(digest));
            files.push_back({{"name", name}, {"fnv1a64", dg}});
        }
        manifest["files"] = files;
        for (auto& [k, v] : notes_.items()) manifest[k] = v;
        std::ofstream os(dir_ / "manifest.json", std::ios::binary);
        os << manifest.dump(2) << "\n";
    }

private:
    std::filesystem::path dir_;
    std::uint64_t hash_;
    std::vector<std::pair<std::string, std::uint64_t>> files_;
    json notes_;
};

std::string verdict_row(const std::string& target, const StrategicVerdict& v) {
    return target + "," + (v.strategic ? "true" : "false") + "," + fmt17(v.margin) + "\n";
}

json load_json(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ValidationError({"cannot open config file: " + path.string()});
    json doc;
    try {
        is >> doc;
    } catch (const json::parse_error& e) {
        throw ValidationError({std::string("JSON parse error: ") + e.what()});
    }
    return doc;
}

int run_guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const StepTooLarge& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const DesignInfeasible& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInfeasibleGain;
    } catch (const InconsistentRecord& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kBadRecord;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kInternal;
    }
}

int sweep_threads_from_env() {
    const char* env = std::getenv("REGOBS_THREADS");
    if (!env) return 0;
    const int n = std::atoi(env);
    return n > 0 ? n : 1;
}

}  // namespace

Scenario parse_config(const std::filesystem::path& path) {
    return scenario_from_json(load_json(path));
}

std::string serialize_config(const Scenario& s) { return scenario_to_json(s).dump(2) + "\n"; }

int cmd_analyze(const std::filesystem::path& config, const std::filesystem::path& out_dir) {
    return run_guarded([&] {
        const Scenario s = parse_config(config);
        const ModalBasis basis = build_basis(s.n_max);
        const Eigen::VectorXd grid = s.time_grid.resolve(basis.size());

        const RankReport rr = rank_condition(basis, s.sensors, group_eigenvalues(basis));
        const DetectabilityReport det = detectability_test(basis, s.sensors, s.shift_c);
        const StrategicVerdict omega =
            strategic_test(basis, s.sensors, omega_gradient_target(basis), grid);
        const StrategicVerdict gamma = strategic_test_gradient(basis, s.sensors, s.region, grid);

        OutputSet out(out_dir, fnv1a64(s.canonical_string()));
        std::string rank_csv = "eigenvalue,multiplicity,rank,sigma_min\n";
        for (const GroupRank& g : rr.groups)
            rank_csv += fmt17(g.group.eigenvalue) + "," + std::to_string(g.group.multiplicity) +
                        "," + std::to_string(g.rank) + "," + fmt17(g.sigma_min) + "\n";
        out.write("rank_report.csv", rank_csv);

        std::string verdicts = "target,verdict,margin\n";
        verdicts += verdict_row("omega_gradient", omega);
        verdicts += verdict_row("gamma_gradient", gamma);
        if (s.omega_r) {
            const RegionComparison cmp =
                compare_internal_boundary(basis, s.sensors, s.region, *s.omega_r, grid);
            verdicts += verdict_row("omega_r_gradient", cmp.omega_r);
        }
        verdicts += std::string("detectable,") + (det.detectable ? "true" : "false") + ",0\n";
        out.write("verdicts.csv", verdicts);

        json failing = json::array();
        for (int k : omega.failing_modes)
            failing.push_back({{"n", basis.mode(k).n}, {"m", basis.mode(k).m}});
        out.note("omega_failing_modes", failing);
        out.finish();
        return kOk;
    });
}

int cmd_simulate(const std::filesystem::path& config, const std::filesystem::path& out_dir) {
    return run_guarded([&] {
        const Scenario s = parse_config(config);
        const SimulationResult result = run_scenario(s);
        if (!result.gain.designed) {
            std::cerr << "gain design infeasible: " << result.gain.infeasible_reason << "\n";
            std::cerr << "detectability: " << (result.detectability_report.detectable ? "yes" : "no")
                      << ", non-negative groups: " << result.detectability_report.nonneg_groups.size()
                      << "\n";
            return kInfeasibleGain;
        }
        const ErrorTrajectory& tr = *result.error_trajectory;
        std::string csv = "t,err_omega,err_gamma_grad\n";
        for (int i = 0; i < tr.times.size(); ++i)
            csv += fmt17(tr.times[i]) + "," + fmt17(tr.omega_norm[i]) + "," +
                   fmt17(tr.gamma_grad_norm[i]) + "\n";
        OutputSet out(out_dir, result.scenario_hash);
        out.write("trajectory.csv", csv);
        out.note("spectral_abscissa", result.gain.spectral_abscissa);
        out.note("wall_time_s", result.wall_time_s);
        out.finish();
        return kOk;
    });
}

int cmd_reconstruct(const std::filesystem::path& config, const std::filesystem::path& record,
                    const std::filesystem::path& out_dir) {
    return run_guarded([&] {
        const Scenario s = parse_config(config);
        const ModalBasis basis = build_basis(s.n_max);
        const int q = static_cast<int>(s.sensors.size());

        std::ifstream is(record);
        if (!is) throw InconsistentRecord("cannot open record file: " + record.string());
        std::vector<std::vector<double>> rows;
        std::string line;
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            std::vector<double> row;
            std::stringstream ls(line);
            std::string cell;
            bool numeric = true;
            while (std::getline(ls, cell, ',')) {
                try {
                    size_t pos = 0;
                    row.push_back(std::stod(cell, &pos));
                    if (pos != cell.size()) numeric = false;
                } catch (...) {
                    numeric = false;
                }
            }
            if (!numeric) {
                if (rows.empty()) continue;  // header line
                throw InconsistentRecord("non-numeric cell in record: " + line);
            }
            rows.push_back(std::move(row));
        }
        if (rows.empty()) throw InconsistentRecord("record file has no samples");
        for (const auto& row : rows)
            if (static_cast<int>(row.size()) != q + 1)
                throw InconsistentRecord("record must have 1 + sensor-count columns");

        OutputRecord rec;
        rec.times.resize(rows.size());
        rec.samples.resize(rows.size(), q);
        for (size_t j = 0; j < rows.size(); ++j) {
            rec.times[static_cast<int>(j)] = rows[j][0];
            for (int i = 0; i < q; ++i) rec.samples(static_cast<int>(j), i) = rows[j][i + 1];
        }

        const Eigen::VectorXd grid = s.time_grid.resolve(basis.size());
        const StrategicVerdict gamma = strategic_test_gradient(basis, s.sensors, s.region, grid);
        const Reconstruction r =
            reconstruct_initial_gradient(basis, s.sensors, s.region, rec, gamma.strategic);

        std::string csv = "s,tangential,normal\n";
        for (int i = 0; i < 256; ++i) {
            const double arc =
                s.region.a + (s.region.b - s.region.a) * static_cast<double>(i) / 255.0;
            const auto v = r.trace.eval(arc);
            csv += fmt17(arc) + "," + fmt17(v[0]) + "," + fmt17(v[1]) + "\n";
        }
        OutputSet out(out_dir, fnv1a64(s.canonical_string()));
        out.write("trace.csv", csv);
        out.note("residual", r.residual);
        out.note("relative_residual", r.relative_residual);
        out.note("nonstrategic_warning", r.nonstrategic_warning);
        out.finish();
        return kOk;
    });
}

int cmd_sweep(const std::filesystem::path& config, int nx, int ny,
              const std::filesystem::path& out_dir) {
    return run_guarded([&] {
        if (nx < 1 || ny < 1) throw ValidationError({"sweep grid: nx and ny must be >= 1"});
        const Scenario s = parse_config(config);
        // Cell-midpoint grid; locations clip away from the boundary at
        // 1/(2 nx) as required for pointwise sensors.
        std::vector<std::array<double, 2>> grid;
        grid.reserve(static_cast<size_t>(nx) * ny);
        for (int i = 0; i < nx; ++i)
            for (int j = 0; j < ny; ++j)
                grid.push_back({(i + 0.5) / nx, (j + 0.5) / ny});
        const std::vector<SweepCell> cells = run_sweep(s, grid, sweep_threads_from_env());

        std::string csv = "b1,b2,margin,strategic\n";
        for (const SweepCell& c : cells)
            csv += fmt17(c.b1) + "," + fmt17(c.b2) + "," + fmt17(c.margin) + "," +
                   (c.strategic ? "true" : "false") + "\n";
        OutputSet out(out_dir, fnv1a64(s.canonical_string()));
        out.write("sweep.csv", csv);
        out.note("grid", json{{"nx", nx}, {"ny", ny}, {"clipped_to_cell_midpoints", true}});
        out.finish();
        return kOk;
    });
}

int cmd_compare_regions(const std::filesystem::path& config,
                        const std::filesystem::path& out_dir) {
    return run_guarded([&] {
        const Scenario s = parse_config(config);
        if (!s.omega_r) throw ValidationError({"/omega_r: required for compare-regions"});
        const ModalBasis basis = build_basis(s.n_max);
        const Eigen::VectorXd grid = s.time_grid.resolve(basis.size());
        const RegionComparison cmp =
            compare_internal_boundary(basis, s.sensors, s.region, *s.omega_r, grid);

        std::string csv = "target,verdict,margin\n";
        csv += verdict_row("omega_r", cmp.omega_r);
        csv += verdict_row("gamma", cmp.gamma);
        OutputSet out(out_dir, fnv1a64(s.canonical_string()));
        out.write("regions.csv", csv);
        out.note("implication_ok", cmp.implication_ok);
        out.finish();
        if (!cmp.implication_ok) {
            std::cerr << "error: omega_r-strategic configuration is not Gamma*-strategic; "
                         "internal-implies-boundary implication violated\n";
            return kImplicationViolated;
        }
        return kOk;
    });
}

}  // namespace regobs::cli
