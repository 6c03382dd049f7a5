#include "raman/protocols.hpp"

#include <Eigen/Eigenvalues>
#include <array>
#include <cmath>
#include <stdexcept>

#include "raman/errors.hpp"

namespace raman {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

void check_qubit(const QubitAmplitudes& q, const char* who) {
    const double n = std::norm(q.c_g) + std::norm(q.c_e);
    if (std::abs(n - 1.0) > 1e-9)
        throw std::invalid_argument(std::string(who) + ": qubit amplitudes must be normalized");
}

// Joint spin-pair indices [g1g2, g1e2, e1g2, e1e2] at zero photons.
std::array<int, 4> pair_indices(const CascadeSystem& sys) {
    return {sys.index(Level::g, 0, Level::g, 0), sys.index(Level::g, 0, Level::e, 0),
            sys.index(Level::e, 0, Level::g, 0), sys.index(Level::e, 0, Level::e, 0)};
}

MatrixXcd extract_block(const MatrixXcd& rho, const std::array<int, 4>& idx) {
    MatrixXcd b(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) b(i, j) = rho(idx[i], idx[j]);
    return b;
}

double block_trace(const MatrixXcd& b) { return b.trace().real(); }

// max over zeta of <T(zeta)|rho|T(zeta)> for T = c0 |i0> + e^{i zeta} c1 |i1>.
// The maximizing zeta is the one relative-phase compensation the protocol is
// allowed; it leaves the fidelity independent of the channel phase.
double two_level_fidelity(const MatrixXcd& block, int i0, int i1, cd c0, cd c1,
                          double* zeta_out = nullptr) {
    const cd cross = std::conj(c0) * block(i0, i1) * c1;
    const double f = std::norm(c0) * block(i0, i0).real() + std::norm(c1) * block(i1, i1).real() +
                     2.0 * std::abs(cross);
    if (zeta_out) *zeta_out = std::abs(cross) > 0.0 ? -std::arg(cross) : 0.0;
    return f;
}

// Same overlap with the compensation phase frozen.
double two_level_fidelity_at(const MatrixXcd& block, int i0, int i1, cd c0, cd c1, double zeta) {
    const cd cross = std::conj(c0) * block(i0, i1) * c1;
    return std::norm(c0) * block(i0, i0).real() + std::norm(c1) * block(i1, i1).real() +
           2.0 * (cross * std::polar(1.0, zeta)).real();
}

struct Dominant {
    double weight = 0.0;
    Eigen::Vector4cd vec;
};

Dominant dominant_eigvec(const MatrixXcd& block) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (block + block.adjoint()));
    Dominant d;
    d.weight = es.eigenvalues()(3);
    d.vec = es.eigenvectors().col(3);
    return d;
}

double binary_entropy_bits(double x) {
    double s = 0.0;
    if (x > 0.0) s -= x * std::log2(x);
    if (x < 1.0) s -= (1.0 - x) * std::log2(1.0 - x);
    return s;
}

struct Link {
    CascadeSystem sys;
    DesignResult send;
    DesignResult recv;
};

// Designs both pulses for the given emission angle and assembles the
// cascade. The carrier sets the packet shape; theta is the protocol's.
Link build_link(const DesignTarget& carrier, double theta, const TwoNodeConfig& link) {
    DesignTarget tgt = carrier;
    tgt.theta = theta;

    Link out;
    out.send = design_send_pulse(tgt, link.node1, link.design);
    out.recv = design_receive_pulse(tgt, link.node2, link.design);

    CascadeSpec spec;
    spec.node1 = link.node1;
    spec.node2 = link.node2;
    spec.propagation_phase = link.propagation_phase;
    spec.delay_ps = link.delay_ps;
    spec.omega1 = out.send.omega;
    spec.omega2 = out.recv.omega;
    spec.opts1 = link.opts1;
    spec.opts2 = link.opts2;
    out.sys = build_cascade_system(spec);
    return out;
}

VectorXcd transfer_initial(const CascadeSystem& sys, const QubitAmplitudes& q) {
    VectorXcd psi0 = VectorXcd::Zero(sys.dim);
    psi0[sys.index(Level::g, 0, Level::g, 0)] = q.c_g;
    psi0[sys.index(Level::e, 0, Level::g, 0)] = q.c_e;
    return psi0;
}

// Trapezoid integral of the photon flux removed by intrinsic cavity loss,
// sum over nodes of gamma0 <a^dag a>. An intrinsic-loss event parks the pair
// back inside the qubit block (usually in |g,g>), so this loss never appears
// in p_leak; it is tracked separately to keep the loss budget auditable.
class IntrinsicLossMeter {
  public:
    IntrinsicLossMeter(const CascadeSystem& sys, const TimeGrid& grid)
        : dt_(grid.dt()), n_(grid.n_steps), w_(sys.dim) {
        const int d2 = sys.s2.dim();
        for (int i = 0; i < sys.dim; ++i)
            w_[i] = sys.spec.node1.gamma0 * sys.s1.photons_of(i / d2) +
                    sys.spec.node2.gamma0 * sys.s2.photons_of(i % d2);
    }

    void accumulate(int step, const MatrixXcd& rho) {
        double f = 0.0;
        for (int i = 0; i < w_.size(); ++i) f += w_[i] * rho(i, i).real();
        integral_ += (step == 0 || step == n_ ? 0.5 : 1.0) * dt_ * f;
    }

    double total() const { return integral_; }

    // Runs the meter every step while preserving the caller's observer at
    // its requested cadence.
    MasterOptions wrap(const MasterOptions& mopts) {
        MasterOptions m = mopts;
        const auto user = mopts.observer;
        const int every = mopts.observe_every;
        const int last = n_;
        m.observe_every = 1;
        m.observer = [this, user, every, last](int step, const MatrixXcd& rho) {
            accumulate(step, rho);
            if (user && every > 0 && (step % every == 0 || step == last)) user(step, rho);
        };
        return m;
    }

  private:
    double dt_;
    int n_;
    Eigen::ArrayXd w_;
    double integral_ = 0.0;
};

void fill_pair_populations(ProtocolResult& res, const MatrixXcd& block) {
    res.metrics["p_gg"] = block(0, 0).real();
    res.metrics["p_ge"] = block(1, 1).real();
    res.metrics["p_eg"] = block(2, 2).real();
    res.metrics["p_ee"] = block(3, 3).real();
    res.metrics["p_leak"] = 1.0 - block_trace(block);
}

// Transfer metrics from the joint qubit block: fidelity against
// |g>_1 (c_g|g> + c_e|e>)_2 with the optimal phase compensation.
void transfer_metrics(ProtocolResult& res, const MatrixXcd& block, const QubitAmplitudes& q) {
    res.rho_final = block;
    fill_pair_populations(res, block);
    double zeta = 0.0;
    res.metrics["fidelity"] = two_level_fidelity(block, 0, 1, q.c_g, q.c_e, &zeta);
    res.metrics["fidelity_amplitude"] = std::sqrt(std::max(0.0, res.metrics["fidelity"]));
    res.metrics["phase_compensation"] = zeta;
    res.metrics["coherence"] = std::abs(block(0, 1));
    res.amplitudes["g1_g2"] = std::sqrt(std::max(0.0, block(0, 0).real()));
    res.amplitudes["g1_e2"] =
        std::sqrt(std::max(0.0, block(1, 1).real())) * std::polar(1.0, std::arg(block(1, 0)));
}

// Entanglement metrics: target cos(theta)|e g> + e^{i phi} sin(theta)|g e>.
// Amplitude-convention fidelity (the overlap of the target with the state,
// not its square), entropy of the pure part projected onto the one-photon
// pair subspace, both leak conventions.
void entangle_metrics(ProtocolResult& res, const MatrixXcd& block, double theta,
                      double phi_target) {
    res.rho_final = block;
    fill_pair_populations(res, block);
    const double c = std::cos(theta), s = std::sin(theta);
    double zeta = 0.0;
    const double f2 = two_level_fidelity(block, 2, 1, cd{c, 0.0}, cd{s, 0.0}, &zeta);
    res.metrics["fidelity"] = std::sqrt(std::max(0.0, f2));
    const double phi_realized = std::abs(block(1, 2)) > 0.0 ? std::arg(block(1, 2)) : 0.0;
    res.metrics["phase_realized"] = phi_realized;
    res.metrics["phase_compensation"] = phi_target - phi_realized;
    res.metrics["coherence"] = std::abs(block(1, 2));
    res.metrics["p_outside_pair"] = 1.0 - block(1, 1).real() - block(2, 2).real();

    const Dominant dom = dominant_eigvec(block);
    res.metrics["dominant_weight"] = dom.weight;
    Eigen::Vector4cd w = Eigen::Vector4cd::Zero();
    w(1) = dom.vec(1);
    w(2) = dom.vec(2);
    const double wn = w.norm();
    double entropy = 0.0, theta_realized = 0.0;
    if (wn > 0.0) {
        w /= wn;
        theta_realized = std::atan2(std::abs(w(1)), std::abs(w(2)));
        const MatrixXcd rho_pair = w * w.adjoint();
        entropy = von_neumann_entropy(partial_trace(rho_pair, 2, 2, 1));
    }
    res.metrics["entropy"] = entropy;
    const double x = std::sin(theta_realized) * std::sin(theta_realized);
    res.metrics["entropy_closed_form"] = binary_entropy_bits(x);
    res.metrics["theta_realized"] = theta_realized;

    res.amplitudes["e1_g2"] = std::sqrt(std::max(0.0, block(2, 2).real()));
    res.amplitudes["g1_e2"] =
        std::sqrt(std::max(0.0, block(1, 1).real())) * std::polar(1.0, phi_realized);
    res.amplitudes["error"] = std::sqrt(std::max(0.0, res.metrics["p_outside_pair"]));
}

}  // namespace

ProtocolResult transfer_reduced(const TransferSetup& setup) {
    check_qubit(setup.initial, "transfer_reduced");
    DesignTarget tgt = setup.carrier;
    tgt.theta = kHalfPi;
    const DesignResult d1 = design_send_pulse(tgt, setup.link.node1, setup.link.design);
    const DesignResult d2 = design_receive_pulse(tgt, setup.link.node2, setup.link.design);

    ReducedState init;
    init.beta_e = 1.0;
    const ReducedRun emit = integrate_reduced(d1.omega, nullptr, init, setup.link.node1);
    const ReducedRun absorb = reduced_receive(emit.alpha_out, d2.omega, setup.link.node2);

    const cd resid = emit.states.back().beta_e;
    const cd eta = absorb.states.back().beta_e * std::polar(1.0, setup.link.propagation_phase);

    Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
    v(0) = setup.initial.c_g;
    v(1) = setup.initial.c_e * eta;
    v(2) = setup.initial.c_e * resid;

    ProtocolResult res;
    res.method = "reduced";
    transfer_metrics(res, v * v.adjoint(), setup.initial);
    res.metrics["photon_number"] = emit.photon_number;
    res.metrics["absorption"] = absorb.absorption;
    res.metrics["norm_defect"] = std::max(emit.norm_defect, absorb.norm_defect);
    return res;
}

ProtocolResult transfer_master(const TransferSetup& setup, const MasterOptions& mopts) {
    check_qubit(setup.initial, "transfer_master");
    const Link link = build_link(setup.carrier, kHalfPi, setup.link);
    const VectorXcd psi0 = transfer_initial(link.sys, setup.initial);
    const TimeGrid& grid = setup.carrier.shape.envelope.grid;
    IntrinsicLossMeter meter(link.sys, grid);
    const MasterRun run = cascade_master(link.sys, psi0, grid, meter.wrap(mopts));

    ProtocolResult res;
    res.method = "master";
    transfer_metrics(res, extract_block(run.rho_final, pair_indices(link.sys)), setup.initial);
    res.metrics["trace_defect"] = run.trace_defect;
    res.metrics["min_eigenvalue"] = run.min_eigenvalue;
    res.metrics["design_photon_number"] = link.send.photon_number;
    res.metrics["p_lost_intrinsic"] = meter.total();
    return res;
}

ProtocolResult transfer_trajectories(const TransferSetup& setup, const TrajectoryOptions& topts) {
    check_qubit(setup.initial, "transfer_trajectories");
    const Link link = build_link(setup.carrier, kHalfPi, setup.link);
    const VectorXcd psi0 = transfer_initial(link.sys, setup.initial);
    const TrajectoryRun run =
        cascade_trajectories(link.sys, psi0, setup.carrier.shape.envelope.grid, topts);

    const std::array<int, 4> idx = pair_indices(link.sys);
    ProtocolResult res;
    res.method = "trajectories";
    transfer_metrics(res, extract_block(run.rho_mean, idx), setup.initial);

    // Per-trajectory estimates are linear in |psi_k><psi_k|: project onto the
    // target with the ensemble's compensation phase frozen, so the sample
    // mean reproduces the reported fidelity and the spread gives its error.
    const double zeta = res.metrics["phase_compensation"];
    Eigen::Vector2cd tvec;
    tvec << setup.initial.c_g, std::polar(1.0, zeta) * setup.initial.c_e;
    const int n = run.n_traj;
    Eigen::ArrayXd f(n), leak(n), pgg(n), pge(n);
    for (int k = 0; k < n; ++k) {
        const cd a0 = run.finals(idx[0], k);
        const cd a1 = run.finals(idx[1], k);
        f[k] = std::norm(std::conj(tvec(0)) * a0 + std::conj(tvec(1)) * a1);
        double in_block = 0.0;
        for (int j = 0; j < 4; ++j) in_block += std::norm(run.finals(idx[j], k));
        leak[k] = 1.0 - in_block;
        pgg[k] = std::norm(a0);
        pge[k] = std::norm(a1);
    }
    auto record = [&](const char* key, const Eigen::ArrayXd& x) {
        const double mean = x.mean();
        const double var = n > 1 ? (x - mean).square().sum() / (n - 1.0) : 0.0;
        res.metrics[key] = mean;
        res.stderrs[key] = std::sqrt(var / n);
    };
    record("fidelity", f);
    record("p_leak", leak);
    record("p_gg", pgg);
    record("p_ge", pge);
    res.metrics["n_traj"] = n;
    return res;
}

MatrixXcd TransferChannel::apply(cd c_g, cd c_e) const {
    return std::norm(c_g) * rho_gg + std::norm(c_e) * rho_ee +
           (c_g * std::conj(c_e) * rho_cross + std::conj(c_g) * c_e * rho_cross.adjoint());
}

TransferChannel transfer_channel(const TransferSetup& setup, const MasterOptions& mopts) {
    const Link link = build_link(setup.carrier, kHalfPi, setup.link);
    const std::array<int, 4> idx = pair_indices(link.sys);
    const TimeGrid& grid = setup.carrier.shape.envelope.grid;

    auto run_block = [&](cd c_g, cd c_e) {
        const VectorXcd psi0 = transfer_initial(link.sys, QubitAmplitudes{c_g, c_e});
        return extract_block(cascade_master(link.sys, psi0, grid, mopts).rho_final, idx);
    };
    const double r = 1.0 / std::sqrt(2.0);
    const MatrixXcd bg = run_block(1.0, 0.0);
    const MatrixXcd be = run_block(0.0, 1.0);
    const MatrixXcd bp = run_block(r, r);
    const MatrixXcd bq = run_block(r, cd{0.0, 1.0} * r);

    // |+><+| and |+i><+i| runs isolate the evolution of the |g><e| input
    // coherence: U = X + X^dag, V = -i(X - X^dag) => X = (U + i V) / 2.
    const MatrixXcd u = 2.0 * bp - bg - be;
    const MatrixXcd v = 2.0 * bq - bg - be;
    TransferChannel chan;
    chan.rho_gg = bg;
    chan.rho_ee = be;
    chan.rho_cross = 0.5 * (u + cd{0.0, 1.0} * v);
    return chan;
}

double channel_fidelity(const TransferChannel& chan, const QubitAmplitudes& input, double* phase) {
    check_qubit(input, "channel_fidelity");
    const MatrixXcd block = chan.apply(input.c_g, input.c_e);
    return two_level_fidelity(block, 0, 1, input.c_g, input.c_e, phase);
}

double cardinal_average_fidelity(const TransferChannel& chan) {
    const double r = 1.0 / std::sqrt(2.0);
    // One compensation frame for all states: the phase optimal for |+>.
    double zeta = 0.0;
    channel_fidelity(chan, QubitAmplitudes{r, r}, &zeta);
    const std::array<QubitAmplitudes, 6> states = {
        QubitAmplitudes{1.0, 0.0},          QubitAmplitudes{0.0, 1.0},
        QubitAmplitudes{r, r},              QubitAmplitudes{r, -r},
        QubitAmplitudes{r, cd{0.0, r}},     QubitAmplitudes{r, cd{0.0, -r}},
    };
    double sum = 0.0;
    for (const QubitAmplitudes& q : states) {
        const MatrixXcd block = chan.apply(q.c_g, q.c_e);
        sum += two_level_fidelity_at(block, 0, 1, q.c_g, q.c_e, zeta);
    }
    return sum / 6.0;
}

ProtocolResult entangle_reduced(const EntangleSetup& setup) {
    DesignTarget tgt = setup.carrier;
    tgt.theta = setup.theta;
    const DesignResult d1 = design_send_pulse(tgt, setup.link.node1, setup.link.design);
    const DesignResult d2 = design_receive_pulse(tgt, setup.link.node2, setup.link.design);

    ReducedState init;
    init.beta_e = 1.0;
    const ReducedRun emit = integrate_reduced(d1.omega, nullptr, init, setup.link.node1);
    const ReducedRun absorb = reduced_receive(emit.alpha_out, d2.omega, setup.link.node2);

    Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
    v(1) = absorb.states.back().beta_e * std::polar(1.0, setup.link.propagation_phase);
    v(2) = emit.states.back().beta_e;

    ProtocolResult res;
    res.method = "reduced";
    entangle_metrics(res, v * v.adjoint(), setup.theta, setup.phi_target);
    res.metrics["photon_number"] = emit.photon_number;
    res.metrics["norm_defect"] = std::max(emit.norm_defect, absorb.norm_defect);
    return res;
}

ProtocolResult entangle_master(const EntangleSetup& setup, const MasterOptions& mopts) {
    const Link link = build_link(setup.carrier, setup.theta, setup.link);
    const VectorXcd psi0 = transfer_initial(link.sys, QubitAmplitudes::excited());
    const TimeGrid& grid = setup.carrier.shape.envelope.grid;
    IntrinsicLossMeter meter(link.sys, grid);
    const MasterRun run = cascade_master(link.sys, psi0, grid, meter.wrap(mopts));

    ProtocolResult res;
    res.method = "master";
    entangle_metrics(res, extract_block(run.rho_final, pair_indices(link.sys)), setup.theta,
                     setup.phi_target);
    res.metrics["trace_defect"] = run.trace_defect;
    res.metrics["min_eigenvalue"] = run.min_eigenvalue;
    res.metrics["design_photon_number"] = link.send.photon_number;
    res.metrics["p_lost_intrinsic"] = meter.total();
    return res;
}

ProtocolResult entangle_trajectories(const EntangleSetup& setup, const TrajectoryOptions& topts) {
    const Link link = build_link(setup.carrier, setup.theta, setup.link);
    const VectorXcd psi0 = transfer_initial(link.sys, QubitAmplitudes::excited());
    const TrajectoryRun run =
        cascade_trajectories(link.sys, psi0, setup.carrier.shape.envelope.grid, topts);

    const std::array<int, 4> idx = pair_indices(link.sys);
    ProtocolResult res;
    res.method = "trajectories";
    entangle_metrics(res, extract_block(run.rho_mean, idx), setup.theta, setup.phi_target);

    // Linear per-trajectory statistics with the ensemble phase frozen; the
    // amplitude-convention fidelity gets its error bar through the delta
    // method, SE(sqrt(X)) = SE(X) / (2 sqrt(X)).
    const double c = std::cos(setup.theta), s = std::sin(setup.theta);
    const double phi_realized = res.metrics["phase_realized"];
    const cd t_eg = cd{c, 0.0};
    const cd t_ge = std::polar(s, -phi_realized);
    const int n = run.n_traj;
    Eigen::ArrayXd f2(n), leak(n), outside(n), pge(n), peg(n);
    for (int k = 0; k < n; ++k) {
        const cd a_ge = run.finals(idx[1], k);
        const cd a_eg = run.finals(idx[2], k);
        f2[k] = std::norm(std::conj(t_eg) * a_eg + std::conj(t_ge) * a_ge);
        double in_block = 0.0;
        for (int j = 0; j < 4; ++j) in_block += std::norm(run.finals(idx[j], k));
        leak[k] = 1.0 - in_block;
        outside[k] = 1.0 - std::norm(a_ge) - std::norm(a_eg);
        pge[k] = std::norm(a_ge);
        peg[k] = std::norm(a_eg);
    }
    auto record = [&](const char* key, const Eigen::ArrayXd& x) {
        const double mean = x.mean();
        const double var = n > 1 ? (x - mean).square().sum() / (n - 1.0) : 0.0;
        res.metrics[key] = mean;
        res.stderrs[key] = std::sqrt(var / n);
        return res.stderrs[key];
    };
    const double se_f2 = record("fidelity_squared", f2);
    res.metrics["fidelity"] = std::sqrt(std::max(0.0, f2.mean()));
    res.stderrs["fidelity"] =
        res.metrics["fidelity"] > 0.0 ? se_f2 / (2.0 * res.metrics["fidelity"]) : 0.0;
    record("p_leak", leak);
    record("p_outside_pair", outside);
    record("p_ge", pge);
    record("p_eg", peg);
    res.metrics["n_traj"] = n;
    return res;
}

ProtocolResult swap_master(const SwapSetup& setup, const MasterOptions& mopts) {
    check_qubit(setup.stored, "swap_master");
    const TimeGrid& grid_a = setup.outgoing.shape.envelope.grid;
    const TimeGrid& grid_b = setup.incoming.envelope.grid;
    if (grid_b.n_steps < 1 || grid_a.n_steps < 1)
        throw std::invalid_argument("swap_master: both windows need a valid grid");
    if (grid_b.t_start < grid_a.t_end - 1e-9 * grid_a.dt())
        throw ScheduleError("swap receive window starts before the send window ends");

    const double p_in = setup.incoming.mean_photon_number;
    if (p_in > 1.0 + 1e-9)
        throw std::invalid_argument("swap_master: incoming packet has photon number > 1");
    const QubitAmplitudes fly = setup.flying.value_or(QubitAmplitudes{
        cd{std::sqrt(std::max(0.0, 1.0 - p_in)), 0.0}, cd{std::sqrt(p_in), 0.0}});
    check_qubit(fly, "swap_master(flying)");

    // Send window: emit the stored qubit onto the outgoing carrier. The
    // no-jump run provides the flying-qubit fidelity, the master run the
    // node's residual state including jump branches.
    DesignTarget tgt = setup.outgoing;
    tgt.theta = kHalfPi;
    const DesignResult d_out = design_send_pulse(tgt, setup.params, setup.design);
    const SendOutcome sent =
        send_full(setup.stored, d_out.omega, setup.params, setup.opts, &tgt);

    const NodeSystem nsys = build_node_system(d_out.omega, setup.params, setup.opts);
    VectorXcd psi_a = VectorXcd::Zero(nsys.space.dim());
    psi_a[nsys.space.index(Level::g, 0)] = setup.stored.c_g;
    psi_a[nsys.space.index(Level::e, 0)] = setup.stored.c_e;
    const MasterRun run_a = master_equation(nsys.h_eff, nsys.plan, node_jump_ops(nsys),
                                            psi_a * psi_a.adjoint(), grid_a, mopts);

    // Receive window: absorb the incoming packet through the virtual source,
    // starting from whatever the send window left in the node.
    ComplexEnvelope om_b;
    if (setup.incoming.is_vacuum()) {
        om_b = ComplexEnvelope::sample(grid_b, [](double) { return cd{0.0, 0.0}; });
    } else {
        om_b = design_receive_pulse(setup.incoming, setup.params, setup.design).omega;
    }
    const SourceNodeSystem ssys =
        build_source_node_system(setup.incoming.envelope, om_b, setup.params, setup.opts);
    const int nd = nsys.space.dim();
    MatrixXcd rho_b0 = MatrixXcd::Zero(ssys.dim, ssys.dim);
    const cd fb[2] = {fly.c_g, fly.c_e};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            rho_b0.block(i * nd, j * nd, nd, nd) = fb[i] * std::conj(fb[j]) * run_a.rho_final;
    const MasterRun run_b = master_equation(ssys.h_eff, ssys.plan, source_node_jump_ops(ssys),
                                            rho_b0, grid_b, mopts);

    // Spin block with the source empty and the cavity in vacuum.
    const int ig = ssys.index(0, Level::g, 0);
    const int ie = ssys.index(0, Level::e, 0);
    MatrixXcd spin(2, 2);
    spin << run_b.rho_final(ig, ig), run_b.rho_final(ig, ie), run_b.rho_final(ie, ig),
        run_b.rho_final(ie, ie);

    ProtocolResult res;
    res.method = "master";
    res.rho_final = spin;
    // Both halves use the amplitude convention of the single-node outcomes
    // they compose (a pure target against a nearly pure state).
    double zeta = 0.0;
    res.metrics["fidelity_squared"] = two_level_fidelity(spin, 0, 1, fly.c_g, fly.c_e, &zeta);
    res.metrics["fidelity"] = std::sqrt(std::max(0.0, res.metrics["fidelity_squared"]));
    res.metrics["phase_compensation"] = zeta;
    res.metrics["fidelity_out"] = sent.overall_fidelity;
    res.metrics["fidelity_product"] = res.metrics["fidelity"] * sent.overall_fidelity;
    res.metrics["p_g"] = spin(0, 0).real();
    res.metrics["p_e"] = spin(1, 1).real();
    res.metrics["coherence"] = std::abs(spin(0, 1));
    res.metrics["p_leak"] = 1.0 - block_trace(spin);
    res.metrics["p_spin_e_after_send"] =
        run_a.rho_final(nsys.space.index(Level::e, 0), nsys.space.index(Level::e, 0)).real();
    res.metrics["photon_number_out"] = sent.p_one;
    res.metrics["trace_defect"] = std::max(run_a.trace_defect, run_b.trace_defect);
    res.metrics["min_eigenvalue"] = std::min(run_a.min_eigenvalue, run_b.min_eigenvalue);
    res.amplitudes["A_g"] = std::sqrt(std::max(0.0, spin(0, 0).real()));
    res.amplitudes["A_e"] =
        std::sqrt(std::max(0.0, spin(1, 1).real())) * std::polar(1.0, std::arg(spin(1, 0)));
    return res;
}

}  // namespace raman
