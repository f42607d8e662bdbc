#pragma once

#include "qet/history.hpp"

#include <optional>
#include <string>

namespace qet {

// An event is "the system is found in range(Π)"; conditioning the clock on it
// turns the history state into a distribution over the time of the event.
struct EventSpec {
    Projector projector;
    std::string label;
};

struct TimeStatistics {
    double mean = 0.0;
    double std = 0.0;
};

struct EnergyMoments {
    double mean = 0.0;
    double std = 0.0;
};

struct ConditionalDistribution {
    double p_event = 0.0;              // Σ_k p(t_k, Π)
    double alpha_t = 0.0;              // 1 / p_event
    Eigen::VectorXd p;                 // p(t_k | Π), sums to 1
    Eigen::VectorXd times;             // the clock grid, for convenience
    double boundary_mass = 0.0;        // conditional mass in the edge region
    bool boundary_flag = false;        // boundary_mass > threshold
};

// Joint distribution p(t_k, Π) = ⟨ψ(t_k)|Π|ψ(t_k)⟩ / d. Entries may round a
// hair below zero; they are clamped after a −tolerance sanity check.
Eigen::VectorXd joint_time_distribution(const HistoryState& h, const EventSpec& ev,
                                        const Tolerances& tol = Tolerances::defaults());

// Bayes step. Throws event_never_happens when p_event is below the floor.
ConditionalDistribution condition_on_event(const HistoryState& h, const EventSpec& ev,
                                           const Tolerances& tol = Tolerances::defaults());

// Mean and standard deviation of a distribution over the given grid.
TimeStatistics time_statistics(const Eigen::VectorXd& p, const Eigen::VectorXd& times);

// Conditional event energy when [Π, Hs] = 0 (max-norm gate): moments of
// Π Hs Π on any single slice, divided by p_event. Slice independence is
// asserted. Throws contract_error when the gate fails.
EnergyMoments conditional_energy_commuting(const HistoryState& h, const EventSpec& ev,
                                           const Tolerances& tol = Tolerances::defaults());

// Conditional event energy from the clock side, valid for any Π:
//   ⟨E⟩ = −αT·⟨Hπ⟩,  ΔE² = αT·⟨Hπ²⟩ − (αT·⟨Hπ⟩)²,  Hπ = Hc⊗Π,
// moments taken on |Ψ⟩⟩ as written (no recentering).
EnergyMoments conditional_energy_clock(const HistoryState& h, const EventSpec& ev,
                                       const Tolerances& tol = Tolerances::defaults());

// Everything the CLI reports for one event. The headline energy comes from
// the commuting path when the gate passes, else from the clock path; both
// are always computed (the commuting one only when defined).
struct EventReport {
    std::string label;
    double p_event = 0.0;
    double alpha_t = 0.0;
    Eigen::VectorXd times;
    Eigen::VectorXd p_conditional;
    TimeStatistics time;
    EnergyMoments energy;               // headline (gated choice)
    bool commuting = false;             // gate result
    EnergyMoments energy_clock_path;    // always present
    std::optional<EnergyMoments> energy_commuting_path;
    EnergyMoments system_energy;        // ⟨Hs⟩, ΔHs on ψ₀ (unconditional)
    double product_conditional = 0.0;   // Δt_ev · ΔE_ev
    double bound_conditional = 0.5;     // ħ/2
    double product_unconditional = 0.0; // Δt_ev · ΔHs(ψ₀)
    double bound_unconditional = 0.0;   // (ħ/2)·√p_event
    double boundary_mass = 0.0;
    bool boundary_flag = false;
};

EventReport uncertainty_report(const HistoryState& h, const EventSpec& ev,
                               const Tolerances& tol = Tolerances::defaults());

} // namespace qet
