#pragma once

#include "qet/core.hpp"

#include <Eigen/Dense>

namespace qet {

// Finite clock on a uniform symmetric grid:
//   times:        t_k = (k − d/2)·dt,            k = 0..d−1
//   frequencies:  ω_m = 2π(m − d/2)/(d·dt),      m = 0..d−1
//   time_op:      Tc  = diag(times)
//   energy_op:    Hc  = F·diag(ω)·F†  with  F[k,m] = e^{i ω_m t_k}/√d
// Hc is circulant in the time basis and exactly conjugate to diag(ω) under the
// centered discrete transform. [Tc, Hc] ≈ i holds on states far from the grid
// edges; it cannot hold exactly on a finite register (tr[Tc,Hc] = 0).
struct ClockRegister {
    Eigen::Index d = 0;
    double dt = 0.0;
    double total_time = 0.0; // d·dt
    HilbertLabel space;
    Eigen::VectorXd times;
    Eigen::VectorXd frequencies;
    HermitianOperator time_op;
    HermitianOperator energy_op;
};

// d must be a power of two ≥ 4 (transform-kernel support), dt > 0. The unit
// clock (dt = 1) is cached per d; Tc scales by dt and Hc by 1/dt, so repeated
// builds at different dt cost one matrix rescale.
ClockRegister build_clock(Eigen::Index d, double dt,
                          const Tolerances& tol = Tolerances::defaults());

// ‖([Tc,Hc] − i)ψ‖ for a probe state. Small for probes that are smooth and
// concentrated away from the grid edges, O(d) for an edge basis state.
double commutator_residual(const ClockRegister& clock, const StateVector& probe);

// Normalized Gaussian amplitude exp(−(t−center)²/(4·width²)) sampled on the
// clock grid; width is the |ψ|² standard deviation in the continuum limit.
StateVector gaussian_probe(const ClockRegister& clock, double center, double width);

// Probe used by the sweep diagnostics: gaussian_probe with width
// min(8·dt, total_time/16), centered mid-grid.
StateVector diagnostic_probe(const ClockRegister& clock);

} // namespace qet
