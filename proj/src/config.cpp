#include "raman/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "raman/errors.hpp"
#include "raman/units.hpp"

namespace raman {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> tokens(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string t;
    while (in >> t) out.push_back(t);
    return out;
}

double parse_number(const std::string& tok, const std::string& where) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(tok, &used);
    } catch (const std::exception&) {
        throw ConfigError(where + ": not a number: '" + tok + "'");
    }
    if (used != tok.size()) throw ConfigError(where + ": not a number: '" + tok + "'");
    return v;
}

long long parse_integer(const std::string& raw, const std::string& where) {
    const std::string s = trim(raw);
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(s, &used);
    } catch (const std::exception&) {
        throw ConfigError(where + ": not an integer: '" + s + "'");
    }
    if (used != s.size()) throw ConfigError(where + ": not an integer: '" + s + "'");
    return v;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// One key = value line in its section; the same structure is produced from
// JSON input so everything downstream sees a single representation.
struct Entry {
    std::string section;
    std::string key;
    std::string value;
};

std::vector<Entry> parse_ini(const std::string& text) {
    std::vector<Entry> out;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) + ": unterminated section");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ConfigError("line " + std::to_string(lineno) + ": empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        if (section.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": key outside any [section]");
        Entry e{section, trim(line.substr(0, eq)), trim(line.substr(eq + 1))};
        if (e.key.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<Entry> parse_json_entries(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& ex) {
        throw ConfigError(std::string("invalid JSON: ") + ex.what());
    }
    if (!j.is_object()) throw ConfigError("JSON config must be an object of sections");
    std::vector<Entry> out;
    for (const auto& [section, block] : j.items()) {
        if (!block.is_object())
            throw ConfigError(section + ": section must be an object");
        for (const auto& [key, val] : block.items()) {
            std::string value;
            if (val.is_string()) {
                value = val.get<std::string>();
            } else if (val.is_number_integer()) {
                value = std::to_string(val.get<long long>());
            } else if (val.is_number()) {
                value = fmt(val.get<double>());
            } else if (val.is_array()) {
                std::string acc;
                for (const auto& x : val) {
                    if (!x.is_number())
                        throw ConfigError(section + "." + key + ": array entries must be numbers");
                    if (!acc.empty()) acc += ' ';
                    acc += x.is_number_integer() ? std::to_string(x.get<long long>())
                                                 : fmt(x.get<double>());
                }
                value = acc;
            } else {
                throw ConfigError(section + "." + key + ": unsupported value type");
            }
            out.push_back({section, key, value});
        }
    }
    return out;
}

ShapeKind shape_from_string(const std::string& s, const std::string& where) {
    if (s == "sech") return ShapeKind::sech;
    if (s == "gaussian") return ShapeKind::gaussian;
    throw ConfigError(where + ": unknown shape '" + s + "' (sech, gaussian)");
}

std::string to_string(ShapeKind k) {
    switch (k) {
        case ShapeKind::sech: return "sech";
        case ShapeKind::gaussian: return "gaussian";
        case ShapeKind::sampled: return "sampled";
    }
    return "?";
}

cd parse_complex(const std::string& raw, const std::string& where) {
    const auto t = tokens(raw);
    if (t.empty() || t.size() > 2)
        throw ConfigError(where + ": expected 're' or 're im'");
    const double re = parse_number(t[0], where);
    const double im = t.size() == 2 ? parse_number(t[1], where) : 0.0;
    return {re, im};
}

// Pending per-node overrides; [node] feeds both, [node1]/[node2] refine.
struct NodePatch {
    std::optional<double> g_cav, gamma, gamma0, Gamma, delta_zeeman;  // meV
    std::optional<int> n_max;

    void apply(SystemParams& p) const {
        if (g_cav) p.g_cav = energy_to_rate(*g_cav);
        if (gamma) p.gamma = energy_to_rate(*gamma);
        if (gamma0) p.gamma0 = energy_to_rate(*gamma0);
        if (Gamma) p.Gamma_trion = energy_to_rate(*Gamma);
        if (delta_zeeman) p.delta_zeeman = energy_to_rate(*delta_zeeman);
        if (n_max) p.n_max = *n_max;
    }

    void set(const std::string& key, const std::string& value, const std::string& where) {
        if (key == "g_cav") g_cav = parse_energy_mev(value, where);
        else if (key == "gamma") gamma = parse_energy_mev(value, where);
        else if (key == "gamma0") gamma0 = parse_energy_mev(value, where);
        else if (key == "Gamma") Gamma = parse_energy_mev(value, where);
        else if (key == "delta_zeeman") delta_zeeman = parse_energy_mev(value, where);
        else if (key == "n_max") {
            const long long v = parse_integer(value, where);
            if (v < 1 || v > 8) throw ConfigError(where + ": n_max must be in 1..8");
            n_max = static_cast<int>(v);
        } else {
            throw ConfigError(where + ": unknown key");
        }
    }
};

struct GridPatch {
    std::optional<double> t_start, t_end;
    std::optional<int> n_steps;

    void set(const std::string& key, const std::string& value, const std::string& where) {
        if (key == "t_start") t_start = parse_time_ps(value, where);
        else if (key == "t_end") t_end = parse_time_ps(value, where);
        else if (key == "n_steps") {
            const long long v = parse_integer(value, where);
            if (v < 2 || v > 2000000) throw ConfigError(where + ": n_steps must be in 2..2e6");
            n_steps = static_cast<int>(v);
        } else {
            throw ConfigError(where + ": unknown key");
        }
    }

    TimeGrid build(const TimeGrid& base, const std::string& section) const {
        const double a = t_start.value_or(base.t_start);
        const double b = t_end.value_or(base.t_end);
        const int n = n_steps.value_or(base.n_steps);
        if (!(b > a)) throw ConfigError(section + ": t_end must exceed t_start");
        return TimeGrid(a, b, n);
    }
};

// Sweep axis whitelist; the bool marks energy axes, which need a unit.
const std::map<std::string, bool> kSweepAxes = {
    {"node.g_cav", true},          {"node.gamma", true},
    {"node.gamma0", true},         {"node.Gamma", true},
    {"node.delta_zeeman", true},   {"node.n_max", false},
    {"node1.g_cav", true},         {"node1.gamma", true},
    {"node1.gamma0", true},        {"node1.Gamma", true},
    {"node1.delta_zeeman", true},  {"node1.n_max", false},
    {"node2.g_cav", true},         {"node2.gamma", true},
    {"node2.gamma0", true},        {"node2.Gamma", true},
    {"node2.delta_zeeman", true},  {"node2.n_max", false},
    {"trajectory.n_traj", false},
};

const char* kEnergyUnits = "eV, meV, ueV";

bool is_energy_unit(const std::string& u) { return u == "eV" || u == "meV" || u == "ueV"; }

double energy_unit_factor(const std::string& u, const std::string& where) {
    if (u == "eV") return 1000.0;
    if (u == "meV") return 1.0;
    if (u == "ueV") return 1e-3;
    throw ConfigError(where + ": unknown unit '" + u + "' (" + kEnergyUnits + ")");
}

struct SweepPatch {
    std::optional<Scenario> inner;
    std::optional<std::string> axis, unit, spacing;
    std::optional<std::vector<double>> values;
    std::optional<double> from, to;
    std::optional<int> points;

    void set(const std::string& key, const std::string& value, const std::string& where) {
        if (key == "scenario") inner = scenario_from_string(value);
        else if (key == "axis") axis = trim(value);
        else if (key == "unit") unit = trim(value);
        else if (key == "spacing") spacing = trim(value);
        else if (key == "values") {
            auto t = tokens(value);
            if (!t.empty() && is_energy_unit(t.back())) {
                unit = t.back();
                t.pop_back();
            }
            if (t.empty()) throw ConfigError(where + ": empty value list");
            std::vector<double> v;
            for (const auto& tok : t) v.push_back(parse_number(tok, where));
            values = std::move(v);
        } else if (key == "from" || key == "to") {
            auto t = tokens(value);
            if (t.size() == 2 && is_energy_unit(t[1])) {
                unit = t[1];
                t.pop_back();
            }
            if (t.size() != 1) throw ConfigError(where + ": expected a number");
            (key == "from" ? from : to) = parse_number(t[0], where);
        } else if (key == "points") {
            const long long v = parse_integer(value, where);
            if (v < 2 || v > 10000) throw ConfigError(where + ": points must be in 2..10000");
            points = static_cast<int>(v);
        } else {
            throw ConfigError(where + ": unknown key");
        }
    }

    SweepConfig build() const {
        SweepConfig s;
        if (!axis || axis->empty()) throw ConfigError("sweep.axis: required");
        const auto it = kSweepAxes.find(*axis);
        if (it == kSweepAxes.end()) throw ConfigError("sweep.axis: unknown axis '" + *axis + "'");
        s.axis = *axis;
        s.inner = inner.value_or(Scenario::send);
        if (s.inner == Scenario::sweep) throw ConfigError("sweep.scenario: cannot nest sweeps");
        s.unit = unit.value_or("");

        const bool have_range = from || to || points;
        if (values && have_range)
            throw ConfigError("sweep: give either values or from/to/points, not both");
        if (values) {
            s.values = *values;
        } else if (have_range) {
            if (!from || !to || !points)
                throw ConfigError("sweep: from, to and points must all be given");
            const std::string sp = spacing.value_or("linear");
            if (sp != "linear" && sp != "log")
                throw ConfigError("sweep.spacing: 'linear' or 'log'");
            if (sp == "log" && (*from <= 0.0 || *to <= 0.0))
                throw ConfigError("sweep: log spacing needs positive endpoints");
            for (int i = 0; i < *points; ++i) {
                const double u = static_cast<double>(i) / (*points - 1);
                s.values.push_back(sp == "linear"
                                       ? *from + (*to - *from) * u
                                       : std::exp(std::log(*from) +
                                                  (std::log(*to) - std::log(*from)) * u));
            }
        } else {
            throw ConfigError("sweep: values or from/to/points required");
        }

        const bool energy_axis = it->second;
        if (energy_axis && s.unit.empty())
            throw ConfigError("sweep: axis " + s.axis + " needs an energy unit (" +
                              kEnergyUnits + ")");
        if (!energy_axis) {
            if (!s.unit.empty())
                throw ConfigError("sweep: axis " + s.axis + " takes plain integers, no unit");
            for (double v : s.values)
                if (v != std::floor(v) || v < 1.0)
                    throw ConfigError("sweep: axis " + s.axis + " needs positive integers");
        }
        return s;
    }
};

}  // namespace

Scenario scenario_from_string(const std::string& s) {
    if (s == "design") return Scenario::design;
    if (s == "send") return Scenario::send;
    if (s == "receive") return Scenario::receive;
    if (s == "transfer") return Scenario::transfer;
    if (s == "entangle") return Scenario::entangle;
    if (s == "swap") return Scenario::swap;
    if (s == "sweep") return Scenario::sweep;
    throw ConfigError("unknown scenario '" + s +
                      "' (design, send, receive, transfer, entangle, swap, sweep)");
}

std::string to_string(Scenario s) {
    switch (s) {
        case Scenario::design: return "design";
        case Scenario::send: return "send";
        case Scenario::receive: return "receive";
        case Scenario::transfer: return "transfer";
        case Scenario::entangle: return "entangle";
        case Scenario::swap: return "swap";
        case Scenario::sweep: return "sweep";
    }
    return "?";
}

ModelKind model_from_string(const std::string& s) {
    if (s == "reduced") return ModelKind::reduced;
    if (s == "full") return ModelKind::full;
    throw ConfigError("unknown model '" + s + "' (reduced, full)");
}

std::string to_string(ModelKind m) { return m == ModelKind::reduced ? "reduced" : "full"; }

double parse_energy_mev(const std::string& raw, const std::string& where) {
    const auto t = tokens(raw);
    if (t.size() == 1 || (t.size() == 2 && !is_energy_unit(t[1])))
        throw ConfigError(where + ": missing unit, write e.g. '" + t[0] + " meV' (" +
                          kEnergyUnits + ")");
    if (t.size() != 2) throw ConfigError(where + ": expected '<value> <unit>'");
    return parse_number(t[0], where) * energy_unit_factor(t[1], where);
}

double parse_time_ps(const std::string& raw, const std::string& where) {
    auto t = tokens(raw);
    if (t.size() == 2 && t[1] == "ps") t.pop_back();
    if (t.size() != 1) throw ConfigError(where + ": expected '<value> [ps]'");
    return parse_number(t[0], where);
}

double parse_angle_rad(const std::string& raw, const std::string& where) {
    auto t = tokens(raw);
    double factor = 1.0;
    if (t.size() == 2) {
        if (t[1] == "pi") factor = std::numbers::pi;
        else if (t[1] == "rad") factor = 1.0;
        else throw ConfigError(where + ": unknown angle unit '" + t[1] + "' (rad, pi)");
        t.pop_back();
    }
    if (t.size() != 1) throw ConfigError(where + ": expected '<value> [rad|pi]'");
    return parse_number(t[0], where) * factor;
}

void ScenarioConfig::resolve_and_validate() {
    // A sweep is its inner scenario resolved point-wise; adopt the inner
    // resolution wholesale so defaults land the same way they would in a
    // standalone run.
    if (scenario == Scenario::sweep) {
        if (!sweep) throw ConfigError("sweep: sweep block required");
        ScenarioConfig probe = *this;
        probe.scenario = sweep->inner;
        probe.sweep.reset();
        probe.resolve_and_validate();
        const SweepConfig sw = *sweep;
        *this = probe;
        scenario = Scenario::sweep;
        sweep = sw;
        if (sw.axis == "trajectory.n_traj" &&
            !((sw.inner == Scenario::transfer || sw.inner == Scenario::entangle) &&
              model == ModelKind::full))
            throw ConfigError("sweep: axis trajectory.n_traj needs a full-model transfer or "
                              "entangle scenario");
        return;
    }
    if (sweep) throw ConfigError("sweep: block only applies to the sweep scenario");

    try {
        node1.validate();
        node2.validate();
    } catch (const std::invalid_argument& ex) {
        throw ConfigError(std::string("node parameters: ") + ex.what());
    }

    if (target.width_ps == 0.0) {
        if (node1.gamma <= 0.0)
            throw ConfigError("target.width: required when node gamma is zero");
        target.width_ps = 4.0 / node1.gamma;
    }
    if (target.width_ps <= 0.0) throw ConfigError("target.width: must be positive");
    if (target.theta < 0.0 || target.theta > std::numbers::pi / 2.0 + 1e-12)
        throw ConfigError("target.theta: must lie in [0, pi/2]");

    if (incoming) {
        if (scenario != Scenario::receive && scenario != Scenario::swap)
            throw ConfigError("incoming: block only applies to receive and swap");
        if (incoming->photon < 0.0 || incoming->photon > 1.0)
            throw ConfigError("incoming.photon: must lie in [0, 1]");
        if (incoming->width_ps == 0.0) incoming->width_ps = target.width_ps;
        if (incoming->width_ps <= 0.0) throw ConfigError("incoming.width: must be positive");
    } else if (scenario == Scenario::receive) {
        IncomingConfig inc;
        inc.kind = target.kind;
        inc.width_ps = target.width_ps;
        inc.center_ps = target.center_ps;
        inc.photon = 1.0;
        incoming = inc;
    } else if (scenario == Scenario::swap) {
        throw ConfigError("swap: incoming block required (shape of the arriving photon)");
    }

    // The input block names the qubit being consumed: the spin for design,
    // send, transfer and swap, the flying qubit for receive. Entangle fixes
    // its initial state by protocol, so an explicit block is rejected there;
    // design assumes the full excited-state cycle.
    if (scenario == Scenario::entangle || scenario == Scenario::design) {
        if (input_given)
            throw ConfigError("input: block does not apply to " + to_string(scenario) +
                              (scenario == Scenario::entangle
                                   ? " (node 1 starts in the excited state)"
                                   : " (the designer assumes the excited state)"));
        input = QubitAmplitudes::excited();
    } else if (!input_given) {
        if (scenario == Scenario::send)
            input = QubitAmplitudes::excited();
        else if (scenario == Scenario::swap)
            input = QubitAmplitudes::ground();
        else if (scenario == Scenario::receive)
            input = QubitAmplitudes{cd{std::sqrt(std::max(0.0, 1.0 - incoming->photon)), 0.0},
                                    cd{std::sqrt(incoming->photon), 0.0}};
    }
    const double norm = std::sqrt(std::norm(input.c_g) + std::norm(input.c_e));
    if (norm < 1e-12) throw ConfigError("input: amplitudes must not both vanish");
    input.c_g /= norm;
    input.c_e /= norm;
    input_given = scenario != Scenario::entangle && scenario != Scenario::design;

    if (scenario == Scenario::design && model != ModelKind::reduced)
        throw ConfigError("scenario design is reduced-model only (use scenario send for the "
                          "full-model run)");
    if (scenario == Scenario::swap && model != ModelKind::full)
        throw ConfigError("scenario swap is full-model only");

    if (trajectory.n_traj < 0) throw ConfigError("trajectory.n_traj: must be >= 0");
    if (trajectory.n_traj > 0) {
        const bool ok = (scenario == Scenario::transfer || scenario == Scenario::entangle) &&
                        model == ModelKind::full;
        if (!ok)
            throw ConfigError("trajectory.n_traj: trajectories only apply to full-model "
                              "transfer and entangle");
    }

    if (receive_grid && scenario != Scenario::swap)
        throw ConfigError("receive_grid: block only applies to swap");
    if (scenario == Scenario::swap && !receive_grid)
        throw ConfigError("swap: receive_grid block required");
}

ScenarioConfig parse_config_text(const std::string& text, bool json,
                                 const ConfigOverrides& overrides) {
    const std::vector<Entry> entries = json ? parse_json_entries(text) : parse_ini(text);

    static const std::set<std::string> known_sections = {
        "scenario", "node", "node1", "node2", "target", "grid", "receive_grid",
        "input", "link", "trajectory", "incoming", "sweep", "output"};

    std::set<std::string> seen;
    for (const auto& e : entries) {
        if (!known_sections.count(e.section))
            throw ConfigError(e.section + ": unknown section");
        const std::string id = e.section + "." + e.key;
        if (!seen.insert(id).second) throw ConfigError(id + ": duplicate key");
    }

    ScenarioConfig cfg;
    NodePatch node_both, node_one, node_two;
    GridPatch grid_patch, recv_patch;
    SweepPatch sweep_patch;
    bool have_recv_grid = false, have_incoming = false, have_sweep = false;
    IncomingConfig inc;

    bool scenario_given = false;
    for (const auto& e : entries) {
        const std::string where = e.section + "." + e.key;
        if (e.section == "scenario") {
            if (e.key == "kind") {
                cfg.scenario = scenario_from_string(e.value);
                scenario_given = true;
            } else if (e.key == "model") {
                cfg.model = model_from_string(e.value);
            } else {
                throw ConfigError(where + ": unknown key");
            }
        } else if (e.section == "node") {
            node_both.set(e.key, e.value, where);
        } else if (e.section == "node1") {
            node_one.set(e.key, e.value, where);
        } else if (e.section == "node2") {
            node_two.set(e.key, e.value, where);
        } else if (e.section == "target") {
            if (e.key == "shape") cfg.target.kind = shape_from_string(e.value, where);
            else if (e.key == "width") cfg.target.width_ps = parse_time_ps(e.value, where);
            else if (e.key == "center") cfg.target.center_ps = parse_time_ps(e.value, where);
            else if (e.key == "theta") cfg.target.theta = parse_angle_rad(e.value, where);
            else if (e.key == "phi") cfg.target.phi = parse_angle_rad(e.value, where);
            else throw ConfigError(where + ": unknown key");
        } else if (e.section == "grid") {
            grid_patch.set(e.key, e.value, where);
        } else if (e.section == "receive_grid") {
            recv_patch.set(e.key, e.value, where);
            have_recv_grid = true;
        } else if (e.section == "input") {
            if (!cfg.input_given) {
                cfg.input_given = true;
                cfg.input.c_g = 0.0;
                cfg.input.c_e = 0.0;
            }
            if (e.key == "c_g") cfg.input.c_g = parse_complex(e.value, where);
            else if (e.key == "c_e") cfg.input.c_e = parse_complex(e.value, where);
            else throw ConfigError(where + ": unknown key");
        } else if (e.section == "link") {
            if (e.key == "propagation_phase")
                cfg.propagation_phase = parse_angle_rad(e.value, where);
            else if (e.key == "delay") cfg.delay_ps = parse_time_ps(e.value, where);
            else throw ConfigError(where + ": unknown key");
        } else if (e.section == "trajectory") {
            if (e.key == "n_traj") {
                const long long v = parse_integer(e.value, where);
                if (v < 1 || v > 10000000) throw ConfigError(where + ": n_traj must be >= 1");
                cfg.trajectory.n_traj = static_cast<int>(v);
            } else if (e.key == "seed") {
                cfg.trajectory.seed = static_cast<std::uint64_t>(parse_integer(e.value, where));
            } else {
                throw ConfigError(where + ": unknown key");
            }
        } else if (e.section == "incoming") {
            have_incoming = true;
            if (e.key == "shape") inc.kind = shape_from_string(e.value, where);
            else if (e.key == "width") inc.width_ps = parse_time_ps(e.value, where);
            else if (e.key == "center") inc.center_ps = parse_time_ps(e.value, where);
            else if (e.key == "photon") {
                const auto t = tokens(e.value);
                if (t.size() != 1) throw ConfigError(where + ": expected a number");
                inc.photon = parse_number(t[0], where);
            } else {
                throw ConfigError(where + ": unknown key");
            }
        } else if (e.section == "sweep") {
            sweep_patch.set(e.key, e.value, where);
            have_sweep = true;
        } else if (e.section == "output") {
            if (e.key == "dir") cfg.out_dir = e.value;
            else throw ConfigError(where + ": unknown key");
        }
    }

    node_both.apply(cfg.node1);
    node_both.apply(cfg.node2);
    node_one.apply(cfg.node1);
    node_two.apply(cfg.node2);
    cfg.grid = grid_patch.build(cfg.grid, "grid");
    if (have_recv_grid) cfg.receive_grid = recv_patch.build(cfg.grid, "receive_grid");
    if (have_incoming) cfg.incoming = inc;
    if (have_sweep) cfg.sweep = sweep_patch.build();

    if (overrides.scenario) {
        if (scenario_given && cfg.scenario != *overrides.scenario)
            throw ConfigError("scenario: config says " + to_string(cfg.scenario) +
                              " but the command line says " + to_string(*overrides.scenario));
        cfg.scenario = *overrides.scenario;
    }
    if (overrides.model) cfg.model = *overrides.model;
    if (overrides.n_traj) cfg.trajectory.n_traj = *overrides.n_traj;
    if (overrides.seed) cfg.trajectory.seed = *overrides.seed;
    if (overrides.out_dir) cfg.out_dir = *overrides.out_dir;

    cfg.resolve_and_validate();
    return cfg;
}

ScenarioConfig load_config(const std::string& path, const ConfigOverrides& overrides) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    const bool json = path.size() >= 5 && path.substr(path.size() - 5) == ".json";
    return parse_config_text(text, json, overrides);
}

void apply_sweep_value(ScenarioConfig& cfg, double value) {
    if (!cfg.sweep) throw ConfigError("sweep: no sweep block to apply");
    const SweepConfig& sw = *cfg.sweep;
    const auto dot = sw.axis.find('.');
    const std::string head = sw.axis.substr(0, dot);
    const std::string field = sw.axis.substr(dot + 1);

    if (head == "trajectory") {
        cfg.trajectory.n_traj = static_cast<int>(value);
        return;
    }

    std::vector<SystemParams*> nodes;
    if (head == "node" || head == "node1") nodes.push_back(&cfg.node1);
    if (head == "node" || head == "node2") nodes.push_back(&cfg.node2);
    for (SystemParams* p : nodes) {
        if (field == "n_max") {
            if (value > 8.0) throw ConfigError("sweep: n_max at most 8");
            p->n_max = static_cast<int>(value);
            continue;
        }
        const double rate =
            energy_to_rate(value * energy_unit_factor(sw.unit, "sweep.unit"));
        if (field == "g_cav")
            p->g_cav = rate;
        else if (field == "gamma")
            p->gamma = rate;
        else if (field == "gamma0")
            p->gamma0 = rate;
        else if (field == "Gamma")
            p->Gamma_trion = rate;
        else if (field == "delta_zeeman")
            p->delta_zeeman = rate;
    }
    try {
        cfg.node1.validate();
        cfg.node2.validate();
    } catch (const std::invalid_argument& ex) {
        throw ConfigError(std::string("sweep point: ") + ex.what());
    }
}

std::string echo_config(const ScenarioConfig& cfg) {
    std::ostringstream out;
    const auto energy = [](double rate) { return fmt(rate_to_energy(rate)) + " meV"; };

    out << "[scenario]\n";
    out << "kind = " << to_string(cfg.scenario) << "\n";
    out << "model = " << to_string(cfg.model) << "\n\n";

    const auto node_block = [&](const char* name, const SystemParams& p) {
        out << "[" << name << "]\n";
        out << "g_cav = " << energy(p.g_cav.real()) << "\n";
        out << "gamma = " << energy(p.gamma) << "\n";
        out << "gamma0 = " << energy(p.gamma0) << "\n";
        out << "Gamma = " << energy(p.Gamma_trion) << "\n";
        out << "delta_zeeman = " << energy(p.delta_zeeman) << "\n";
        out << "n_max = " << p.n_max << "\n\n";
    };
    node_block("node1", cfg.node1);
    node_block("node2", cfg.node2);

    out << "[target]\n";
    out << "shape = " << to_string(cfg.target.kind) << "\n";
    out << "width = " << fmt(cfg.target.width_ps) << " ps\n";
    out << "center = " << fmt(cfg.target.center_ps) << " ps\n";
    out << "theta = " << fmt(cfg.target.theta) << " rad\n";
    out << "phi = " << fmt(cfg.target.phi) << " rad\n\n";

    out << "[grid]\n";
    out << "t_start = " << fmt(cfg.grid.t_start) << " ps\n";
    out << "t_end = " << fmt(cfg.grid.t_end) << " ps\n";
    out << "n_steps = " << cfg.grid.n_steps << "\n\n";

    if (cfg.input_given) {
        out << "[input]\n";
        out << "c_g = " << fmt(cfg.input.c_g.real()) << " " << fmt(cfg.input.c_g.imag())
            << "\n";
        out << "c_e = " << fmt(cfg.input.c_e.real()) << " " << fmt(cfg.input.c_e.imag())
            << "\n\n";
    }

    out << "[link]\n";
    out << "propagation_phase = " << fmt(cfg.propagation_phase) << " rad\n";
    out << "delay = " << fmt(cfg.delay_ps) << " ps\n\n";

    if (cfg.trajectory.n_traj > 0) {
        out << "[trajectory]\n";
        out << "n_traj = " << cfg.trajectory.n_traj << "\n";
        out << "seed = " << cfg.trajectory.seed << "\n\n";
    }

    if (cfg.incoming) {
        out << "[incoming]\n";
        out << "shape = " << to_string(cfg.incoming->kind) << "\n";
        out << "width = " << fmt(cfg.incoming->width_ps) << " ps\n";
        out << "center = " << fmt(cfg.incoming->center_ps) << " ps\n";
        out << "photon = " << fmt(cfg.incoming->photon) << "\n\n";
    }

    if (cfg.receive_grid) {
        out << "[receive_grid]\n";
        out << "t_start = " << fmt(cfg.receive_grid->t_start) << " ps\n";
        out << "t_end = " << fmt(cfg.receive_grid->t_end) << " ps\n";
        out << "n_steps = " << cfg.receive_grid->n_steps << "\n\n";
    }

    if (cfg.sweep) {
        out << "[sweep]\n";
        out << "scenario = " << to_string(cfg.sweep->inner) << "\n";
        out << "axis = " << cfg.sweep->axis << "\n";
        out << "values =";
        for (double v : cfg.sweep->values) out << " " << fmt(v);
        if (!cfg.sweep->unit.empty()) out << " " << cfg.sweep->unit;
        out << "\n\n";
    }

    out << "[output]\n";
    out << "dir = " << cfg.out_dir << "\n";
    return out.str();
}

}  // namespace raman
