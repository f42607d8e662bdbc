#pragma once

#include "qet/event_statistics.hpp"

#include <Eigen/Dense>

namespace qet::oracle {

// Deliberately naive reference implementations: dense joint-space matrices,
// textbook formulas, no slice tricks. They share only the quantum-core
// primitives with the production path, so agreement between the two is
// evidence, not tautology. Joint dimension is capped (oracle_dimension_cap).

// p(t_k, Π) = ⟨Ψ| (|t_k⟩⟨t_k| ⊗ Π) |Ψ⟩ with the projector formed densely.
Eigen::VectorXd born_rule_joint(const HistoryState& h, const EventSpec& ev,
                                const Tolerances& tol = Tolerances::defaults());

struct DenseMoments {
    double first = 0.0;
    double second = 0.0;
};

// ⟨Ψ|A|Ψ⟩ and ⟨Ψ|A²|Ψ⟩ for a dense joint-space operator.
DenseMoments dense_moments(const HistoryState& h, const HermitianOperator& joint_op,
                           const Tolerances& tol = Tolerances::defaults());

// The transform matrix F[k,m] = e^{i ω_m t_k}/√d that conjugates the clock
// energy operator to diag(ω).
Eigen::MatrixXcd dft_matrix(const ClockRegister& clock);

// Dense application of ([Tc,Hc] − i) to a probe, for cross-checking the
// structured commutator_residual.
double commutator_residual_dense(const ClockRegister& clock, const StateVector& probe);

// Full event report assembled exclusively from dense joint-space operators.
EventReport event_report(const HistoryState& h, const EventSpec& ev,
                         const Tolerances& tol = Tolerances::defaults());

} // namespace qet::oracle
