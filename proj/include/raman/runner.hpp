#pragma once

#include <string>
#include <vector>

#include "raman/config.hpp"
#include "raman/protocol_result.hpp"

namespace raman {

// Time-series table for one scenario run: a shared time column plus one
// complex column per signal, serialized as re/im pairs at full precision.
struct TimeSeries {
    std::vector<double> t;
    std::vector<std::string> names;
    std::vector<std::vector<cd>> columns;

    void add(const std::string& name, std::vector<cd> column);
    void add_real(const std::string& name, const std::vector<double>& column);
    std::string to_csv() const;
};

// Runs one resolved non-sweep scenario. Fills `ts` (when non-null) with the
// signals that apply: pulses, field amplitudes, spin and cavity amplitudes,
// phase drift for the single-node runs, block populations for the cascaded
// ones. Sweep points pass null to skip the time-series work.
ProtocolResult run_point(const ScenarioConfig& cfg, TimeSeries* ts);

// Full artifact pipeline: executes the scenario (or the sweep loop) and
// writes config_echo.ini, metrics.json and timeseries.csv (sweep.csv for
// sweeps) into cfg.out_dir.
void run_scenario(const ScenarioConfig& cfg);

}  // namespace raman
