#pragma once

#include <cstddef>

namespace qet {

// Every numerical threshold used by the library, in one place. Scenario files
// may override individual entries; there are no environment-variable knobs.
struct Tolerances {
    double hermiticity = 1e-12;          // ‖A − A†‖_max on construction
    double state_norm = 1e-12;           // |‖ψ‖ − 1| on construction
    double projector_idempotency = 1e-10; // ‖Π² − Π‖_max
    double projector_spectrum = 1e-10;   // eigenvalue distance from {0,1}
    double expectation_imag = 1e-10;     // |Im⟨A⟩| ≤ tol·(1 + ‖A‖_max)
    double probability_floor = 1e-12;    // p_event below this → event never happens
    double probability_negative = 1e-12; // joint probabilities may round to −this
    double probability_sum = 1e-10;      // |Σp − 1| after conditioning
    double commuting_gate = 1e-10;       // ‖[Π,Hs]‖_max for the commuting energy path
    double slice_consistency = 1e-10;    // slice-independence of commuting moments
    double boundary_window_fraction = 0.05; // outer fraction of the grid counted as edge
    double boundary_mass_threshold = 0.01;  // conditional mass in the edge region that trips the flag
    std::size_t max_joint_dimension = std::size_t{1} << 20; // history-state cap
    std::size_t oracle_dimension_cap = std::size_t{1} << 14; // dense-oracle cap

    static const Tolerances& defaults();
};

} // namespace qet
