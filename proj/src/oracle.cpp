#include "qet/oracle.hpp"

#include <cmath>

namespace qet::oracle {

namespace {

void check_oracle_cap(const HistoryState& h, const Tolerances& tol) {
    const auto cap = static_cast<Eigen::Index>(tol.oracle_dimension_cap);
    if (h.joint.dimension > cap) {
        throw resource_error("oracle: joint dimension " +
                             std::to_string(h.joint.dimension) +
                             " exceeds the dense-oracle cap " + std::to_string(cap));
    }
}

HermitianOperator clock_basis_projector_times_pi(const HistoryState& h,
                                                 Eigen::Index k,
                                                 const EventSpec& ev,
                                                 const Tolerances& tol) {
    Eigen::MatrixXcd ekk =
        Eigen::MatrixXcd::Zero(h.clock->d, h.clock->d);
    ekk(k, k) = Complex(1.0, 0.0);
    const HermitianOperator clock_part(h.clock->space, std::move(ekk),
                                       Units::dimensionless, tol);
    return tensor_product(clock_part, ev.projector.op(), tol);
}

} // namespace

Eigen::VectorXd born_rule_joint(const HistoryState& h, const EventSpec& ev,
                                const Tolerances& tol) {
    check_oracle_cap(h, tol);
    if (!(ev.projector.space() == h.system)) {
        throw contract_error("oracle::born_rule_joint: projector space mismatch");
    }
    Eigen::VectorXd p(h.clock->d);
    for (Eigen::Index k = 0; k < h.clock->d; ++k) {
        const HermitianOperator proj = clock_basis_projector_times_pi(h, k, ev, tol);
        double v = expectation(h.psi, proj, tol);
        if (v < -tol.probability_negative) {
            throw numerical_error("oracle::born_rule_joint: negative probability " +
                                  std::to_string(v));
        }
        p[k] = std::max(0.0, v);
    }
    return p;
}

DenseMoments dense_moments(const HistoryState& h, const HermitianOperator& joint_op,
                           const Tolerances& tol) {
    check_oracle_cap(h, tol);
    if (!(joint_op.space().dimension == h.joint.dimension)) {
        throw contract_error("oracle::dense_moments: operator dimension " +
                             std::to_string(joint_op.space().dimension) +
                             " does not match the joint space");
    }
    const Eigen::VectorXcd& psi = h.psi.amplitudes();
    const Eigen::VectorXcd apsi = joint_op.matrix() * psi;
    DenseMoments m;
    m.first = std::real(psi.dot(apsi));
    m.second = std::real(apsi.dot(apsi));
    return m;
}

Eigen::MatrixXcd dft_matrix(const ClockRegister& clock) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(clock.d));
    Eigen::MatrixXcd f(clock.d, clock.d);
    for (Eigen::Index k = 0; k < clock.d; ++k) {
        for (Eigen::Index m = 0; m < clock.d; ++m) {
            f(k, m) = scale * std::exp(Complex(0.0, clock.frequencies[m] *
                                                        clock.times[k]));
        }
    }
    return f;
}

double commutator_residual_dense(const ClockRegister& clock, const StateVector& probe) {
    const Eigen::MatrixXcd& tc = clock.time_op.matrix();
    const Eigen::MatrixXcd& hc = clock.energy_op.matrix();
    const Eigen::MatrixXcd comm = tc * hc - hc * tc;
    const Eigen::VectorXcd r =
        comm * probe.amplitudes() - Complex(0.0, 1.0) * probe.amplitudes();
    return r.norm();
}

EventReport event_report(const HistoryState& h, const EventSpec& ev,
                         const Tolerances& tol) {
    check_oracle_cap(h, tol);
    const Eigen::VectorXd joint = born_rule_joint(h, ev, tol);
    const double p_event = joint.sum();
    if (p_event < tol.probability_floor) {
        throw event_never_happens("oracle: event '" + ev.label +
                                  "' probability below the floor");
    }

    EventReport r;
    r.label = ev.label;
    r.p_event = p_event;
    r.alpha_t = 1.0 / p_event;
    r.times = h.clock->times;
    r.p_conditional = joint / p_event;

    double tm = 0.0, t2 = 0.0;
    for (Eigen::Index k = 0; k < joint.size(); ++k) {
        tm += r.p_conditional[k] * h.clock->times[k];
        t2 += r.p_conditional[k] * h.clock->times[k] * h.clock->times[k];
    }
    r.time = TimeStatistics{tm, std::sqrt(std::max(0.0, t2 - tm * tm))};

    const Eigen::Index n = joint.size();
    const auto edge = static_cast<Eigen::Index>(
        std::floor(static_cast<double>(n) * tol.boundary_window_fraction / 2.0));
    r.boundary_mass =
        edge > 0 ? r.p_conditional.head(edge).sum() + r.p_conditional.tail(edge).sum()
                 : 0.0;
    r.boundary_flag = r.boundary_mass > tol.boundary_mass_threshold;

    // clock-side energy from dense Hπ = Hc⊗Π
    const HermitianOperator h_pi =
        tensor_product(h.clock->energy_op, ev.projector.op(), tol);
    const DenseMoments hm = dense_moments(h, h_pi, tol);
    const double e_mean_clock = -r.alpha_t * hm.first;
    const double e_var_clock =
        r.alpha_t * hm.second - (r.alpha_t * hm.first) * (r.alpha_t * hm.first);
    r.energy_clock_path =
        EnergyMoments{e_mean_clock, std::sqrt(std::max(0.0, e_var_clock))};

    const double gate = commutator_max_norm(ev.projector.op(), h.system_hamiltonian);
    r.commuting = gate <= tol.commuting_gate;
    if (r.commuting) {
        // dense I⊗(ΠHsΠ) moments on |Ψ⟩⟩, conditioned with αT
        const Eigen::MatrixXcd a = ev.projector.matrix() *
                                   h.system_hamiltonian.matrix() *
                                   ev.projector.matrix();
        const HermitianOperator joint_a = tensor_product(
            HermitianOperator::identity(h.clock->space),
            HermitianOperator(h.system, a, Units::energy, tol), tol);
        const DenseMoments am = dense_moments(h, joint_a, tol);
        const double mean = r.alpha_t * am.first;
        const double second = r.alpha_t * am.second;
        r.energy_commuting_path =
            EnergyMoments{mean, std::sqrt(std::max(0.0, second - mean * mean))};
        r.energy = *r.energy_commuting_path;
    } else {
        r.energy = r.energy_clock_path;
    }

    const double sys_mean = expectation(h.initial_state, h.system_hamiltonian, tol);
    const Eigen::VectorXcd hpsi =
        h.system_hamiltonian.matrix() * h.initial_state.amplitudes();
    r.system_energy = EnergyMoments{
        sys_mean,
        std::sqrt(std::max(0.0, hpsi.squaredNorm() - sys_mean * sys_mean))};

    r.product_conditional = r.time.std * r.energy.std;
    r.bound_conditional = 0.5;
    r.product_unconditional = r.time.std * r.system_energy.std;
    r.bound_unconditional = 0.5 * std::sqrt(r.p_event);
    return r;
}

} // namespace qet::oracle
