#pragma once

#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "raman/grid.hpp"
#include "raman/hilbert.hpp"
#include "raman/params.hpp"
#include "raman/shapes.hpp"

namespace raman {

enum class Scenario { design, send, receive, transfer, entangle, swap, sweep };
enum class ModelKind { reduced, full };

Scenario scenario_from_string(const std::string& s);
std::string to_string(Scenario s);
ModelKind model_from_string(const std::string& s);
std::string to_string(ModelKind m);

// Emission target block: analytic shape, window-independent parameters. The
// angle theta is the designed emission angle for design/send and the
// protocol angle for entangle; transfer and the swap send stage always run
// the full cycle. phi is the entangle target phase.
struct TargetConfig {
    ShapeKind kind = ShapeKind::sech;
    double width_ps = 0.0;  // 0 = default to 4 / gamma(node 1)
    double center_ps = 0.0;
    double theta = std::numbers::pi / 2.0;
    double phi = 0.0;
};

// Incoming packet for receive and swap: same analytic shapes plus the mean
// photon number of the flying qubit (1 = pure one-photon, 0 = vacuum).
struct IncomingConfig {
    ShapeKind kind = ShapeKind::sech;
    double width_ps = 0.0;
    double center_ps = 0.0;
    double photon = 1.0;
};

struct TrajectoryConfig {
    int n_traj = 0;  // 0 = not requested; master equation runs instead
    std::uint64_t seed = 1;
};

struct SweepConfig {
    Scenario inner = Scenario::send;
    std::string axis;  // dotted key, e.g. "node.delta_zeeman" or "node.n_max"
    std::string unit;  // unit the values were given in (echoed back)
    std::vector<double> values;  // in the unit above; converted when applied
};

// Fully resolved scenario description. Energies are stored as rates inside
// SystemParams; the echo converts them back to meV.
struct ScenarioConfig {
    Scenario scenario = Scenario::design;
    ModelKind model = ModelKind::full;
    SystemParams node1 = SystemParams::standard();
    SystemParams node2 = SystemParams::standard();
    TargetConfig target;
    TimeGrid grid{-150.0, 150.0, 6000};
    // Default when no [input] block is given: |e> for design/send (emission
    // starts from the excited spin), |g> for swap (empty memory), the equal
    // superposition for transfer.
    QubitAmplitudes input = QubitAmplitudes::equal();
    bool input_given = false;
    double propagation_phase = 0.0;
    double delay_ps = 0.0;
    TrajectoryConfig trajectory;
    std::optional<IncomingConfig> incoming;       // receive default; swap required
    std::optional<TimeGrid> receive_grid;         // swap only
    std::optional<SweepConfig> sweep;             // sweep only
    std::string out_dir = ".";

    // Width fallback and cross-block consistency; throws ConfigError.
    void resolve_and_validate();
};

// Command-line overrides, applied after parsing and before validation. The
// positional scenario is authoritative; a conflicting [scenario] kind in the
// file is an error rather than silently ignored.
struct ConfigOverrides {
    std::optional<Scenario> scenario;
    std::optional<ModelKind> model;
    std::optional<int> n_traj;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
};

// Parses the line-oriented [section] / key = value format. JSON files with
// the same section/key structure are accepted as an alternative; values stay
// strings there ("0.1 meV") or plain numbers for unitless keys.
ScenarioConfig load_config(const std::string& path, const ConfigOverrides& overrides = {});
ScenarioConfig parse_config_text(const std::string& text, bool json,
                                 const ConfigOverrides& overrides = {});

// Echo with every default materialized; parsing the echo reproduces the
// configuration exactly (all numbers at full precision).
std::string echo_config(const ScenarioConfig& cfg);

// Overwrites the swept axis on a resolved configuration with one sweep
// value (converted from the sweep unit for energy axes). The sweep loop
// calls this on a fresh copy per point.
void apply_sweep_value(ScenarioConfig& cfg, double value);

// Single-value parsers, exposed for tests. `where` names the offending key
// in error messages. Energies require a unit (eV, meV, ueV); times accept an
// optional "ps"; angles accept "rad" (default) or "pi".
double parse_energy_mev(const std::string& raw, const std::string& where);
double parse_time_ps(const std::string& raw, const std::string& where);
double parse_angle_rad(const std::string& raw, const std::string& where);

}  // namespace raman
