#pragma once

#include "qet/clock.hpp"
#include "qet/core.hpp"

#include <memory>

namespace qet {

// Entangled clock–system state
//   |Ψ⟩⟩ = (1/√d) Σ_k |t_k⟩ ⊗ |ψ(t_k)⟩,   ψ(t) = e^{−iHs t} ψ₀,
// stored clock-major: joint index = k·ds + s. Viewed as a ds×d column-major
// matrix G, column k is the k-th slice ψ(t_k)/√d.
struct HistoryState {
    std::shared_ptr<const ClockRegister> clock;
    HilbertLabel system;
    HilbertLabel joint;
    StateVector psi;
    HermitianOperator system_hamiltonian;
    StateVector initial_state;

    Eigen::Map<const Eigen::MatrixXcd> slices() const {
        return {psi.amplitudes().data(), system.dimension, clock->d};
    }
};

HistoryState build_history(std::shared_ptr<const ClockRegister> clock,
                           const HermitianOperator& system_hamiltonian,
                           const StateVector& initial_state,
                           const Tolerances& tol = Tolerances::defaults());

// ‖(Hc⊗I + I⊗Hs)|Ψ⟩⟩‖ after shifting Hs by −⟨ψ₀|Hs|ψ₀⟩ (the constraint fixes
// the total energy only up to a constant). Zero exactly when every Bohr
// frequency of (Hs, ψ₀) sits on the clock frequency grid 2πn/total_time;
// otherwise the jump of ψ(t) across the grid boundary leaks into all clock
// modes and the residual scales like √d·|sin(πθ)|/total_time per off-grid
// frequency pair with fractional offset θ.
double constraint_residual(const HistoryState& h);

struct EnergyEqualityReport {
    double system_mean = 0.0; // ⟨I⊗Hs⟩ on |Ψ⟩⟩
    double clock_mean = 0.0;  // ⟨Hc⊗I⟩ on |Ψ⟩⟩
    double system_std = 0.0;
    double clock_std = 0.0;

    double mean_discrepancy() const { return system_mean + clock_mean; }
    double std_discrepancy() const { return system_std - clock_std; }
};

// Clock and system energies mirror each other: ⟨Hc⟩ ≈ −⟨Hs⟩ and the spreads
// agree, up to the same boundary leakage as constraint_residual.
EnergyEqualityReport energy_equality_check(const HistoryState& h);

} // namespace qet
