#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "raman/config.hpp"
#include "raman/errors.hpp"
#include "raman/runner.hpp"

// Exit codes: 0 success, 2 infeasible design or schedule, 3 configuration
// error (including command-line misuse), 1 unexpected failure.
int main(int argc, char** argv) {
    CLI::App app{"Cavity-assisted Raman spin-photon interface: pulse design and protocol runs"};
    std::string scenario, config_path, model, out_dir;
    std::uint64_t seed = 0;
    int n_traj = 0;

    app.add_option("scenario", scenario,
                   "design | send | receive | transfer | entangle | swap | sweep")
        ->required();
    app.add_option("--config", config_path, "scenario configuration file")->required();
    auto* out_opt = app.add_option("--out", out_dir, "output directory (overrides [output] dir)");
    auto* seed_opt =
        app.add_option("--seed", seed, "trajectory seed (overrides [trajectory] seed)");
    auto* traj_opt =
        app.add_option("--n-traj", n_traj, "trajectory count (overrides [trajectory] n_traj)");
    auto* model_opt =
        app.add_option("--model", model, "reduced | full (overrides [scenario] model)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 3;
    }

    try {
        raman::ConfigOverrides overrides;
        overrides.scenario = raman::scenario_from_string(scenario);
        if (model_opt->count() > 0) overrides.model = raman::model_from_string(model);
        if (traj_opt->count() > 0) overrides.n_traj = n_traj;
        if (seed_opt->count() > 0) overrides.seed = seed;
        if (out_opt->count() > 0) overrides.out_dir = out_dir;

        const raman::ScenarioConfig cfg = raman::load_config(config_path, overrides);
        raman::run_scenario(cfg);
        return 0;
    } catch (const raman::ConfigError& e) {
        std::cerr << "config error: " << e.what() << std::endl;
        return 3;
    } catch (const raman::InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << std::endl;
        return 2;
    } catch (const raman::ScheduleError& e) {
        std::cerr << "infeasible: " << e.what() << std::endl;
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
}
