#include "qet/event_statistics.hpp"

#include <cmath>

namespace qet {

namespace {

void require_event_space(const HistoryState& h, const EventSpec& ev) {
    if (!(ev.projector.space() == h.system)) {
        throw contract_error("event '" + ev.label + "': projector lives on '" +
                             ev.projector.space().name + "', not the system space '" +
                             h.system.name + "'");
    }
}

double edge_mass(const Eigen::VectorXd& p, double window_fraction) {
    const Eigen::Index n = p.size();
    const auto edge = static_cast<Eigen::Index>(
        std::floor(static_cast<double>(n) * window_fraction / 2.0));
    if (edge <= 0) return 0.0;
    return p.head(edge).sum() + p.tail(edge).sum();
}

} // namespace

Eigen::VectorXd joint_time_distribution(const HistoryState& h, const EventSpec& ev,
                                        const Tolerances& tol) {
    require_event_space(h, ev);
    const auto g = h.slices();
    const Eigen::MatrixXcd pg = ev.projector.matrix() * g;
    Eigen::VectorXd p(h.clock->d);
    for (Eigen::Index k = 0; k < h.clock->d; ++k) {
        const double v = std::real(g.col(k).dot(pg.col(k)));
        if (v < -tol.probability_negative) {
            throw numerical_error("joint_time_distribution: p(t_" +
                                  std::to_string(k) + ") = " + std::to_string(v) +
                                  " is negative beyond tolerance");
        }
        p[k] = std::max(0.0, v);
    }
    return p;
}

ConditionalDistribution condition_on_event(const HistoryState& h, const EventSpec& ev,
                                           const Tolerances& tol) {
    Eigen::VectorXd joint = joint_time_distribution(h, ev, tol);
    const double p_event = joint.sum();
    if (p_event < tol.probability_floor) {
        throw event_never_happens("event '" + ev.label + "': probability " +
                                  std::to_string(p_event) +
                                  " is below the probability floor");
    }

    ConditionalDistribution out;
    out.p_event = p_event;
    out.alpha_t = 1.0 / p_event;
    out.p = joint / p_event;
    out.times = h.clock->times;

    const double s = out.p.sum();
    if (std::abs(s - 1.0) > tol.probability_sum) {
        throw numerical_error("condition_on_event: conditional mass " +
                              std::to_string(s) + " differs from 1 beyond tolerance");
    }
    out.boundary_mass = edge_mass(out.p, tol.boundary_window_fraction);
    out.boundary_flag = out.boundary_mass > tol.boundary_mass_threshold;
    return out;
}

TimeStatistics time_statistics(const Eigen::VectorXd& p, const Eigen::VectorXd& times) {
    if (p.size() != times.size()) {
        throw contract_error("time_statistics: distribution and grid sizes differ");
    }
    const double mean = p.dot(times);
    const double second = p.dot(times.cwiseProduct(times));
    return TimeStatistics{mean, std::sqrt(std::max(0.0, second - mean * mean))};
}

EnergyMoments conditional_energy_commuting(const HistoryState& h, const EventSpec& ev,
                                           const Tolerances& tol) {
    require_event_space(h, ev);
    const double gate =
        commutator_max_norm(ev.projector.op(), h.system_hamiltonian);
    if (gate > tol.commuting_gate) {
        throw contract_error("event '" + ev.label + "': ‖[Π,Hs]‖_max = " +
                             std::to_string(gate) +
                             " fails the commuting gate; use the clock-side path");
    }

    const double p_event = condition_on_event(h, ev, tol).p_event;
    const auto g = h.slices();
    const Eigen::MatrixXcd& pi = ev.projector.matrix();
    const Eigen::MatrixXcd a = pi * h.system_hamiltonian.matrix() * pi;
    const Eigen::MatrixXcd ag = a * g;
    const Eigen::MatrixXcd a2g = a * ag;

    // Per-slice moments of ΠHsΠ are time independent when [Π,Hs]=0; assert it.
    const Eigen::Index d = h.clock->d;
    const double dd = static_cast<double>(d);
    double first = 0.0, second = 0.0;
    double first_min = 0.0, first_max = 0.0;
    for (Eigen::Index k = 0; k < d; ++k) {
        const double m1 = std::real(g.col(k).dot(ag.col(k))) * dd; // slice-normalized
        const double m2 = std::real(g.col(k).dot(a2g.col(k))) * dd;
        if (k == 0) {
            first_min = first_max = m1;
        } else {
            first_min = std::min(first_min, m1);
            first_max = std::max(first_max, m1);
        }
        first += m1 / dd;
        second += m2 / dd;
    }
    const double scale = 1.0 + std::abs(first);
    if (first_max - first_min > tol.slice_consistency * scale) {
        throw numerical_error("conditional_energy_commuting: slice moments vary by " +
                              std::to_string(first_max - first_min));
    }

    const double mean = first / p_event;
    const double second_cond = second / p_event;
    return EnergyMoments{mean,
                         std::sqrt(std::max(0.0, second_cond - mean * mean))};
}

EnergyMoments conditional_energy_clock(const HistoryState& h, const EventSpec& ev,
                                       const Tolerances& tol) {
    require_event_space(h, ev);
    const double p_event = condition_on_event(h, ev, tol).p_event;
    const double alpha_t = 1.0 / p_event;

    // Hπ = Hc⊗Π applied to the slice matrix: (Hc⊗Π)G = Π·G·Hcᵀ. Since Hπ² =
    // Hc²⊗Π, the second moment is the squared norm of the same product.
    const auto g = h.slices();
    const Eigen::MatrixXcd m =
        ev.projector.matrix() * g * h.clock->energy_op.matrix().transpose();
    const double h1 = std::real((g.array().conjugate() * m.array()).sum());
    const double h2 = m.squaredNorm();

    const double mean = -alpha_t * h1;
    const double var = alpha_t * h2 - (alpha_t * h1) * (alpha_t * h1);
    return EnergyMoments{mean, std::sqrt(std::max(0.0, var))};
}

EventReport uncertainty_report(const HistoryState& h, const EventSpec& ev,
                               const Tolerances& tol) {
    const ConditionalDistribution cond = condition_on_event(h, ev, tol);

    EventReport r;
    r.label = ev.label;
    r.p_event = cond.p_event;
    r.alpha_t = cond.alpha_t;
    r.times = cond.times;
    r.p_conditional = cond.p;
    r.time = time_statistics(cond.p, cond.times);
    r.boundary_mass = cond.boundary_mass;
    r.boundary_flag = cond.boundary_flag;

    const double gate =
        commutator_max_norm(ev.projector.op(), h.system_hamiltonian);
    r.commuting = gate <= tol.commuting_gate;
    r.energy_clock_path = conditional_energy_clock(h, ev, tol);
    if (r.commuting) {
        r.energy_commuting_path = conditional_energy_commuting(h, ev, tol);
        r.energy = *r.energy_commuting_path;
    } else {
        r.energy = r.energy_clock_path;
    }

    const double sys_mean = expectation(h.initial_state, h.system_hamiltonian, tol);
    const Eigen::VectorXcd hpsi =
        h.system_hamiltonian.matrix() * h.initial_state.amplitudes();
    const double sys_second = hpsi.squaredNorm();
    r.system_energy = EnergyMoments{
        sys_mean, std::sqrt(std::max(0.0, sys_second - sys_mean * sys_mean))};

    r.product_conditional = r.time.std * r.energy.std;
    r.bound_conditional = 0.5;
    r.product_unconditional = r.time.std * r.system_energy.std;
    r.bound_unconditional = 0.5 * std::sqrt(r.p_event);
    return r;
}

} // namespace qet
