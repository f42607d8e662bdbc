#include "qet/history.hpp"

#include <cmath>
#include <utility>

namespace qet {

namespace {

// ⟨Ψ|(A⊗I)|Ψ⟩ and ⟨Ψ|(A⊗I)²|Ψ⟩ via the slice matrix: (A⊗I)G = G·Aᵀ.
struct JointMoments {
    double first;
    double second;
};

JointMoments clock_side_moments(const HistoryState& h, const Eigen::MatrixXcd& a) {
    const auto g = h.slices();
    const Eigen::MatrixXcd ag = g * a.transpose();
    const double first = std::real((g.array().conjugate() * ag.array()).sum());
    const double second = ag.squaredNorm();
    return {first, second};
}

JointMoments system_side_moments(const HistoryState& h, const Eigen::MatrixXcd& b) {
    const auto g = h.slices();
    const Eigen::MatrixXcd bg = b * g;
    const double first = std::real((g.array().conjugate() * bg.array()).sum());
    const double second = bg.squaredNorm();
    return {first, second};
}

} // namespace

HistoryState build_history(std::shared_ptr<const ClockRegister> clock,
                           const HermitianOperator& system_hamiltonian,
                           const StateVector& initial_state,
                           const Tolerances& tol) {
    if (!clock) {
        throw contract_error("build_history: null clock");
    }
    if (!(system_hamiltonian.space() == initial_state.space())) {
        throw contract_error(
            "build_history: Hamiltonian and initial state live on different spaces");
    }
    const HilbertLabel system = initial_state.space();
    const auto cap = static_cast<Eigen::Index>(tol.max_joint_dimension);
    if (clock->d > cap / system.dimension) {
        throw resource_error("build_history: joint dimension " +
                             std::to_string(clock->d) + "*" +
                             std::to_string(system.dimension) + " exceeds cap " +
                             std::to_string(cap));
    }

    const Propagator prop(system_hamiltonian, tol);
    Eigen::MatrixXcd g = prop.evolve_batch(initial_state, clock->times);
    g *= 1.0 / std::sqrt(static_cast<double>(clock->d));

    HilbertLabel joint = HilbertLabel::make(
        clock->space.name + "⊗" + system.name, clock->d * system.dimension);
    Eigen::VectorXcd flat = Eigen::Map<const Eigen::VectorXcd>(g.data(), g.size());

    return HistoryState{
        std::move(clock),
        system,
        joint,
        StateVector(joint, std::move(flat), tol),
        system_hamiltonian,
        initial_state,
    };
}

double constraint_residual(const HistoryState& h) {
    const double e0 = expectation(h.initial_state, h.system_hamiltonian);
    const auto g = h.slices();
    Eigen::MatrixXcd hs = h.system_hamiltonian.matrix();
    hs.diagonal().array() -= Complex(e0, 0.0);
    const Eigen::MatrixXcd r =
        g * h.clock->energy_op.matrix().transpose() + hs * g;
    return r.norm();
}

EnergyEqualityReport energy_equality_check(const HistoryState& h) {
    const JointMoments sys =
        system_side_moments(h, h.system_hamiltonian.matrix());
    const JointMoments clk = clock_side_moments(h, h.clock->energy_op.matrix());

    const auto std_of = [](const JointMoments& m) {
        return std::sqrt(std::max(0.0, m.second - m.first * m.first));
    };
    return EnergyEqualityReport{sys.first, clk.first, std_of(sys), std_of(clk)};
}

} // namespace qet
