#include "raman/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <stdexcept>
#include <utility>

#include <nlohmann/json.hpp>

#include "raman/designer.hpp"
#include "raman/errors.hpp"
#include "raman/node_model.hpp"
#include "raman/protocols.hpp"
#include "raman/reduced.hpp"

namespace raman {
namespace {

using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr double kHalfPi = std::numbers::pi / 2.0;

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("output: cannot open " + path.string() + " for writing");
    f << content;
    f.flush();
    if (!f) throw ConfigError("output: write failed for " + path.string());
}

DesignTarget analytic_target(ShapeKind kind, const TimeGrid& grid, double width_ps,
                             double center_ps, double theta) {
    try {
        return kind == ShapeKind::sech ? DesignTarget::sech(grid, width_ps, center_ps, theta)
                                       : DesignTarget::gaussian(grid, width_ps, center_ps, theta);
    } catch (const std::invalid_argument& ex) {
        // Shape mass outside the window and similar construction failures
        // are configuration problems (grid too narrow for the width).
        throw ConfigError(std::string("target: ") + ex.what());
    }
}

DesignTarget make_target(const ScenarioConfig& cfg) {
    return analytic_target(cfg.target.kind, cfg.grid, cfg.target.width_ps, cfg.target.center_ps,
                           cfg.target.theta);
}

Wavepacket incoming_packet(const IncomingConfig& inc, const TimeGrid& grid) {
    const DesignTarget shape =
        analytic_target(inc.kind, grid, inc.width_ps, inc.center_ps, kHalfPi);
    // Analytic shapes carry the closed-form norm over the whole real line;
    // renormalize on the window so the packet is exactly one flying qubit.
    const Wavepacket unit = Wavepacket::from_raw(shape.shape.envelope);
    return Wavepacket(unit.envelope, inc.photon);
}

TwoNodeConfig link_config(const ScenarioConfig& cfg) {
    TwoNodeConfig link;
    link.node1 = cfg.node1;
    link.node2 = cfg.node2;
    link.propagation_phase = cfg.propagation_phase;
    link.delay_ps = cfg.delay_ps;
    return link;
}

std::vector<cd> scaled(const ComplexEnvelope& env, cd factor) {
    std::vector<cd> out(env.v);
    for (cd& x : out) x *= factor;
    return out;
}

std::vector<double> grid_times(const TimeGrid& g) {
    std::vector<double> t(g.size());
    for (int i = 0; i < g.size(); ++i) t[i] = g.time(i);
    return t;
}

void add_design_metrics(ProtocolResult& res, const DesignResult& des) {
    res.metrics["feasibility_margin"] = des.feasibility_margin;
    res.metrics["predicted_phase"] = des.predicted_phase_phi;
    res.metrics["clipped"] = des.clipped ? 1.0 : 0.0;
    if (des.clipped) res.metrics["clip_time_ps"] = des.clip_time_ps;
}

// ---- single-node scenarios ----

ProtocolResult run_send_reduced(const ScenarioConfig& cfg, TimeSeries* ts) {
    const DesignTarget target = make_target(cfg);
    const DesignResult des = design_send_pulse(target, cfg.node1);
    ReducedState init;
    init.beta_e = cfg.input.c_e;
    const ReducedRun run = integrate_reduced(des.omega, nullptr, init, cfg.node1);
    const double n_design = std::norm(cfg.input.c_e) * des.photon_number;

    ProtocolResult res;
    res.method = "reduced";
    Eigen::Vector2cd v;
    v << cfg.input.c_g, run.states.back().beta_e;
    res.rho_final = v * v.adjoint();
    res.metrics["photon_number"] = run.photon_number;
    res.metrics["design_photon_number"] = n_design;
    res.metrics["p_residual"] = std::norm(run.states.back().beta_e);
    res.metrics["norm_defect"] = run.norm_defect;
    add_design_metrics(res, des);
    if (n_design >= 1e-12) {
        res.metrics["shape_overlap"] =
            std::abs(trapz_inner(target.shape.envelope, run.alpha_out.envelope));
        res.metrics["pulse_fidelity"] =
            std::abs(trapz_inner(target.shape.envelope, run.alpha_out_raw));
    }
    res.amplitudes["beta_e_final"] = run.states.back().beta_e;

    if (ts) {
        ts->t = grid_times(cfg.grid);
        const cd amp = cfg.input.c_e * std::sin(cfg.target.theta);
        std::vector<cd> be(run.states.size()), bc(run.states.size());
        for (std::size_t i = 0; i < run.states.size(); ++i) {
            be[i] = run.states[i].beta_e;
            bc[i] = run.states[i].beta_c;
        }
        ts->add("alpha_out", run.alpha_out_raw.v);
        ts->add("alpha_target", scaled(target.shape.envelope, amp));
        ts->add("beta_e", std::move(be));
        ts->add("beta_c", std::move(bc));
        ts->add("omega", des.omega.v);
    }
    return res;
}

ProtocolResult run_send_full(const ScenarioConfig& cfg, TimeSeries* ts) {
    const DesignTarget target = make_target(cfg);
    const DesignResult des = design_send_pulse(target, cfg.node1);
    const NodeModelOptions opts{};
    const SendOutcome out = send_full(cfg.input, des.omega, cfg.node1, opts, &target);
    const double n_design = std::norm(cfg.input.c_e) * des.photon_number;

    ProtocolResult res;
    res.method = "nojump";
    const NodeSpace space(cfg.node1.n_max);
    Eigen::Vector2cd v;
    v << out.final_state[space.index(Level::g, 0)], out.final_state[space.index(Level::e, 0)];
    res.rho_final = v * v.adjoint();
    res.metrics["photon_number"] = out.p_one;
    res.metrics["design_photon_number"] = n_design;
    res.metrics["p_one"] = out.p_one;
    res.metrics["p_error"] = out.p_error;
    res.metrics["p_spontaneous"] = out.p_spontaneous;
    res.metrics["p_intrinsic"] = out.p_intrinsic;
    res.metrics["p_multi"] = out.p_multi;
    res.metrics["p_residual"] = out.p_residual;
    res.metrics["p_error_offresonant"] = out.p_error_offresonant;
    res.metrics["overall_fidelity"] = out.overall_fidelity;
    res.metrics["phi_g"] = out.phi_g;
    res.metrics["truncation_weight"] = out.truncation_weight;
    res.metrics["truncation_warning"] = out.truncation_warning ? 1.0 : 0.0;
    add_design_metrics(res, des);
    if (n_design >= 1e-12) {
        res.metrics["pulse_fidelity"] = out.pulse_fidelity;
        res.metrics["shape_overlap"] = out.shape_overlap;
    }
    res.amplitudes["amp_vacuum"] = out.amp_vacuum;

    if (ts) {
        const NodeSystem sys = build_node_system(des.omega, cfg.node1, opts);
        VectorXcd psi0 = VectorXcd::Zero(sys.space.dim());
        psi0[sys.space.index(Level::g, 0)] = cfg.input.c_g;
        psi0[sys.space.index(Level::e, 0)] = cfg.input.c_e;
        const NoJumpOutput run = evolve_nojump(sys.h_eff, sys.plan, sys.flux_ops, psi0, cfg.grid);
        const PhaseDriftResult drift = extract_phase_drift(des.omega, cfg.node1, opts);

        const int n = cfg.grid.size();
        std::vector<cd> be(n), bc(n);
        for (int i = 0; i < n; ++i) {
            be[i] = run.psi(sys.space.index(Level::e, 0), i);
            bc[i] = run.psi(sys.space.index(Level::g, 1), i);
        }
        const cd amp = cfg.input.c_e * std::sin(cfg.target.theta);
        ts->t = grid_times(cfg.grid);
        ts->add("alpha_out", out.one_photon.v);
        ts->add("alpha_target", scaled(target.shape.envelope, amp));
        ts->add("beta_e", std::move(be));
        ts->add("beta_c", std::move(bc));
        ts->add("omega", des.omega.v);
        ts->add_real("phi_g", drift.phi);
    }
    return res;
}

ProtocolResult run_receive_reduced(const ScenarioConfig& cfg, TimeSeries* ts) {
    const Wavepacket wp = incoming_packet(*cfg.incoming, cfg.grid);
    const DesignTarget shape = analytic_target(cfg.incoming->kind, cfg.grid,
                                               cfg.incoming->width_ps, cfg.incoming->center_ps,
                                               kHalfPi);
    const DesignResult des = design_receive_pulse(shape, cfg.node1);
    const ReducedRun run = reduced_receive(wp, des.omega, cfg.node1);

    ProtocolResult res;
    res.method = "reduced";
    Eigen::Vector2cd v;
    v << cd{0.0, 0.0}, run.states.back().beta_e;
    res.rho_final = v * v.adjoint();
    res.metrics["absorption"] = run.absorption;
    res.metrics["reflection"] = run.reflection;
    res.metrics["photon_number_in"] = wp.mean_photon_number;
    res.metrics["norm_defect"] = run.norm_defect;
    add_design_metrics(res, des);
    res.amplitudes["beta_e_final"] = run.states.back().beta_e;

    if (ts) {
        std::vector<cd> be(run.states.size()), bc(run.states.size());
        for (std::size_t i = 0; i < run.states.size(); ++i) {
            be[i] = run.states[i].beta_e;
            bc[i] = run.states[i].beta_c;
        }
        ts->t = grid_times(cfg.grid);
        ts->add("alpha_out", run.alpha_out_raw.v);
        ts->add("alpha_in", scaled(wp.envelope, std::sqrt(wp.mean_photon_number)));
        ts->add("beta_e", std::move(be));
        ts->add("beta_c", std::move(bc));
        ts->add("omega", des.omega.v);
    }
    return res;
}

ProtocolResult run_receive_full(const ScenarioConfig& cfg, TimeSeries* ts) {
    const Wavepacket wp = incoming_packet(*cfg.incoming, cfg.grid);
    const DesignTarget shape = analytic_target(cfg.incoming->kind, cfg.grid,
                                               cfg.incoming->width_ps, cfg.incoming->center_ps,
                                               kHalfPi);
    const DesignResult des = design_receive_pulse(shape, cfg.node1);
    const NodeModelOptions opts{};
    ProtocolResult res = receive_full(wp, des.omega, cfg.node1, opts, cfg.input);
    res.metrics["photon_number_in"] = wp.mean_photon_number;
    add_design_metrics(res, des);

    if (ts) {
        const SourceNodeSystem sys =
            build_source_node_system(wp.envelope, des.omega, cfg.node1, opts);
        VectorXcd psi0 = VectorXcd::Zero(sys.dim);
        psi0[sys.index(0, Level::g, 0)] = cfg.input.c_g;
        psi0[sys.index(1, Level::g, 0)] = cfg.input.c_e;
        const NoJumpOutput run = evolve_nojump(sys.h_eff, sys.plan, sys.flux_ops, psi0, cfg.grid);

        const int n = cfg.grid.size();
        const double sq_gamma = cfg.node1.sqrt_gamma();
        std::vector<cd> be(n), bc(n), aout(n);
        for (int i = 0; i < n; ++i) {
            be[i] = run.psi(sys.index(0, Level::e, 0), i);
            bc[i] = run.psi(sys.index(0, Level::g, 1), i);
            aout[i] = sys.kappa[i] * run.psi(sys.index(1, Level::g, 0), i) + sq_gamma * bc[i];
        }
        ts->t = grid_times(cfg.grid);
        ts->add("alpha_out", std::move(aout));
        ts->add("alpha_in", scaled(wp.envelope, std::sqrt(wp.mean_photon_number)));
        ts->add("beta_e", std::move(be));
        ts->add("beta_c", std::move(bc));
        ts->add("omega", des.omega.v);
    }
    return res;
}

// ---- cascaded scenarios ----

// Records vacuum-block populations of the two-spin state at the master
// equation's observer cadence.
struct PopulationRecorder {
    std::vector<int> diag;  // gg, ge, eg, ee indices in the cascade space
    TimeSeries* ts = nullptr;
    const TimeGrid* grid = nullptr;
    const ComplexEnvelope* om1 = nullptr;
    const ComplexEnvelope* om2 = nullptr;
    std::vector<cd> p[5];  // gg, ge, eg, ee, leak

    PopulationRecorder(const ScenarioConfig& cfg, TimeSeries* series,
                       const ComplexEnvelope* o1, const ComplexEnvelope* o2)
        : ts(series), grid(&cfg.grid), om1(o1), om2(o2) {
        const NodeSpace s1(cfg.node1.n_max), s2(cfg.node2.n_max);
        for (Level l1 : {Level::g, Level::e})
            for (Level l2 : {Level::g, Level::e})
                diag.push_back(s1.index(l1, 0) * s2.dim() + s2.index(l2, 0));
    }

    void observe(int step, const MatrixXcd& rho) {
        ts->t.push_back(grid->time(step));
        ts->columns[0].push_back(om1->v[step]);
        ts->columns[1].push_back(om2->v[step]);
        double total = 0.0;
        for (int k = 0; k < 4; ++k) {
            const double pk = rho(diag[k], diag[k]).real();
            total += pk;
            ts->columns[2 + k].push_back(cd{pk, 0.0});
        }
        ts->columns[6].push_back(cd{1.0 - total, 0.0});
    }

    MasterOptions options(int n_steps) {
        ts->names = {"omega1", "omega2", "p_gg", "p_ge", "p_eg", "p_ee", "p_leak"};
        ts->columns.assign(7, {});
        MasterOptions mopts;
        mopts.observe_every = std::max(1, n_steps / 400);
        mopts.observer = [this](int step, const MatrixXcd& rho) { observe(step, rho); };
        return mopts;
    }
};

void add_pulse_series(TimeSeries* ts, const TimeGrid& grid, const ComplexEnvelope& om1,
                      const ComplexEnvelope& om2) {
    ts->t = grid_times(grid);
    ts->add("omega1", om1.v);
    ts->add("omega2", om2.v);
}

ProtocolResult run_two_node(const ScenarioConfig& cfg, TimeSeries* ts, bool entangle) {
    const double theta = entangle ? cfg.target.theta : kHalfPi;
    DesignTarget carrier = make_target(cfg);
    carrier.theta = theta;

    TransferSetup tsetup;
    EntangleSetup esetup;
    if (entangle) {
        esetup.theta = theta;
        esetup.phi_target = cfg.target.phi;
        esetup.carrier = carrier;
        esetup.link = link_config(cfg);
    } else {
        tsetup.initial = cfg.input;
        tsetup.carrier = carrier;
        tsetup.link = link_config(cfg);
    }

    // Same pulse pair the protocol designs internally, for the time series
    // and the feasibility metrics.
    const DesignResult des1 = design_send_pulse(carrier, cfg.node1);
    const DesignResult des2 = design_receive_pulse(carrier, cfg.node2);

    ProtocolResult res;
    if (cfg.model == ModelKind::reduced) {
        res = entangle ? entangle_reduced(esetup) : transfer_reduced(tsetup);
        if (ts) add_pulse_series(ts, cfg.grid, des1.omega, des2.omega);
    } else if (cfg.trajectory.n_traj > 0) {
        TrajectoryOptions topts;
        topts.n_traj = cfg.trajectory.n_traj;
        topts.seed = cfg.trajectory.seed;
        res = entangle ? entangle_trajectories(esetup, topts) : transfer_trajectories(tsetup, topts);
        if (ts) add_pulse_series(ts, cfg.grid, des1.omega, des2.omega);
    } else if (ts) {
        PopulationRecorder rec(cfg, ts, &des1.omega, &des2.omega);
        const MasterOptions mopts = rec.options(cfg.grid.n_steps);
        res = entangle ? entangle_master(esetup, mopts) : transfer_master(tsetup, mopts);
    } else {
        res = entangle ? entangle_master(esetup) : transfer_master(tsetup);
    }
    res.metrics["feasibility_margin_send"] = des1.feasibility_margin;
    res.metrics["feasibility_margin_receive"] = des2.feasibility_margin;
    return res;
}

ProtocolResult run_swap(const ScenarioConfig& cfg, TimeSeries* ts) {
    SwapSetup setup;
    setup.stored = cfg.input;
    setup.outgoing = make_target(cfg);
    setup.outgoing.theta = kHalfPi;
    setup.incoming = incoming_packet(*cfg.incoming, *cfg.receive_grid);
    setup.params = cfg.node1;

    ProtocolResult res = swap_master(setup);

    if (ts) {
        // Sequential windows: the emission drive over the send grid, then
        // the absorption drive over the receive grid.
        const DesignResult d_out = design_send_pulse(setup.outgoing, cfg.node1);
        ComplexEnvelope om_b(*cfg.receive_grid);
        if (!setup.incoming.is_vacuum())
            om_b = design_receive_pulse(setup.incoming, cfg.node1).omega;

        const int na = cfg.grid.size(), nb = cfg.receive_grid->size();
        ts->t = grid_times(cfg.grid);
        const std::vector<double> tb = grid_times(*cfg.receive_grid);
        ts->t.insert(ts->t.end(), tb.begin(), tb.end());

        std::vector<cd> omega(d_out.omega.v);
        omega.insert(omega.end(), om_b.v.begin(), om_b.v.end());
        std::vector<cd> a_target = scaled(setup.outgoing.shape.envelope, cfg.input.c_e);
        a_target.resize(na + nb, cd{0.0, 0.0});
        std::vector<cd> a_in(na, cd{0.0, 0.0});
        const std::vector<cd> in_amp =
            scaled(setup.incoming.envelope, std::sqrt(setup.incoming.mean_photon_number));
        a_in.insert(a_in.end(), in_amp.begin(), in_amp.end());

        ts->add("alpha_target", std::move(a_target));
        ts->add("alpha_in", std::move(a_in));
        ts->add("omega", std::move(omega));
    }
    return res;
}

ProtocolResult dispatch(const ScenarioConfig& cfg, TimeSeries* ts) {
    switch (cfg.scenario) {
        case Scenario::design:
            return run_send_reduced(cfg, ts);
        case Scenario::send:
            return cfg.model == ModelKind::reduced ? run_send_reduced(cfg, ts)
                                                   : run_send_full(cfg, ts);
        case Scenario::receive:
            return cfg.model == ModelKind::reduced ? run_receive_reduced(cfg, ts)
                                                   : run_receive_full(cfg, ts);
        case Scenario::transfer:
            return run_two_node(cfg, ts, false);
        case Scenario::entangle:
            return run_two_node(cfg, ts, true);
        case Scenario::swap:
            return run_swap(cfg, ts);
        case Scenario::sweep:
            break;
    }
    throw std::logic_error("run_point: sweep points must name a concrete scenario");
}

// ---- artifact serialization ----

ordered_json result_json(const ScenarioConfig& cfg, const ProtocolResult& res) {
    ordered_json j;
    j["scenario"] = to_string(cfg.scenario);
    j["model"] = to_string(cfg.model);
    j["method"] = res.method;
    ordered_json m = ordered_json::object();
    for (const auto& [key, value] : res.metrics) m[key] = value;
    j["metrics"] = m;
    if (!res.amplitudes.empty()) {
        ordered_json a = ordered_json::object();
        for (const auto& [key, value] : res.amplitudes)
            a[key] = {{"re", value.real()}, {"im", value.imag()}};
        j["amplitudes"] = a;
    }
    if (!res.stderrs.empty()) {
        ordered_json s = ordered_json::object();
        for (const auto& [key, value] : res.stderrs) s[key] = value;
        j["stderrs"] = s;
    }
    return j;
}

std::string sweep_csv(const SweepConfig& sw, const std::vector<ProtocolResult>& rows) {
    std::set<std::string> metric_keys, err_keys;
    for (const ProtocolResult& r : rows) {
        for (const auto& [key, value] : r.metrics) metric_keys.insert(key);
        for (const auto& [key, value] : r.stderrs) err_keys.insert(key);
    }
    std::string out = sw.axis;
    for (const std::string& k : metric_keys) out += "," + k;
    for (const std::string& k : err_keys) out += ",se_" + k;
    out += "\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out += fmt17(sw.values[i]);
        for (const std::string& k : metric_keys) {
            const auto it = rows[i].metrics.find(k);
            out += "," + (it == rows[i].metrics.end() ? "nan" : fmt17(it->second));
        }
        for (const std::string& k : err_keys) {
            const auto it = rows[i].stderrs.find(k);
            out += "," + (it == rows[i].stderrs.end() ? "nan" : fmt17(it->second));
        }
        out += "\n";
    }
    return out;
}

}  // namespace

void TimeSeries::add(const std::string& name, std::vector<cd> column) {
    if (column.size() != t.size())
        throw std::logic_error("TimeSeries: column " + name + " length mismatch");
    names.push_back(name);
    columns.push_back(std::move(column));
}

void TimeSeries::add_real(const std::string& name, const std::vector<double>& column) {
    std::vector<cd> c(column.size());
    for (std::size_t i = 0; i < column.size(); ++i) c[i] = cd{column[i], 0.0};
    add(name, std::move(c));
}

std::string TimeSeries::to_csv() const {
    std::string out = "t_ps";
    for (const std::string& n : names) out += ",re_" + n + ",im_" + n;
    out += "\n";
    for (std::size_t i = 0; i < t.size(); ++i) {
        out += fmt17(t[i]);
        for (const auto& col : columns) {
            out += "," + fmt17(col[i].real());
            out += "," + fmt17(col[i].imag());
        }
        out += "\n";
    }
    return out;
}

ProtocolResult run_point(const ScenarioConfig& cfg, TimeSeries* ts) { return dispatch(cfg, ts); }

void run_scenario(const ScenarioConfig& cfg) {
    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    if (ec) throw ConfigError("output: cannot create directory " + cfg.out_dir);
    const fs::path out(cfg.out_dir);

    write_file(out / "config_echo.ini", echo_config(cfg));

    if (cfg.scenario == Scenario::sweep) {
        const SweepConfig& sw = *cfg.sweep;
        std::vector<ProtocolResult> rows;
        for (double value : sw.values) {
            ScenarioConfig point = cfg;
            apply_sweep_value(point, value);
            point.scenario = sw.inner;
            point.sweep.reset();
            rows.push_back(run_point(point, nullptr));
        }

        ordered_json j;
        j["scenario"] = "sweep";
        j["inner"] = to_string(sw.inner);
        j["model"] = to_string(cfg.model);
        j["axis"] = sw.axis;
        if (!sw.unit.empty()) j["unit"] = sw.unit;
        ordered_json jrows = ordered_json::array();
        for (std::size_t i = 0; i < rows.size(); ++i) {
            ordered_json row;
            row["value"] = sw.values[i];
            ordered_json m = ordered_json::object();
            for (const auto& [key, v] : rows[i].metrics) m[key] = v;
            row["metrics"] = m;
            if (!rows[i].stderrs.empty()) {
                ordered_json s = ordered_json::object();
                for (const auto& [key, v] : rows[i].stderrs) s[key] = v;
                row["stderrs"] = s;
            }
            jrows.push_back(row);
        }
        j["rows"] = jrows;

        write_file(out / "sweep.csv", sweep_csv(sw, rows));
        write_file(out / "metrics.json", j.dump(2) + "\n");
        return;
    }

    TimeSeries ts;
    const ProtocolResult res = run_point(cfg, &ts);
    write_file(out / "timeseries.csv", ts.to_csv());
    write_file(out / "metrics.json", result_json(cfg, res).dump(2) + "\n");
}

}  // namespace raman
