#pragma once

#include "qet/errors.hpp"
#include "qet/tolerances.hpp"

#include <Eigen/Dense>

#include <complex>

namespace qet {

using Complex = std::complex<double>;

struct EnergyMomentsPhoton {
    double mean = 0.0;
    double std = 0.0;
};

// Single-photon spectral amplitude on a uniform frequency grid of power-of-two
// size: ω_n = omega_min + n·dω. Normalization Σ|φ_n|²·dω/(2π) = 1, matching
// the continuum convention ∫|φ(ω)|² dω/(2π) = 1 (ħ = 1, photon energy = ω).
class SpectralAmplitude {
public:
    SpectralAmplitude(double omega_min, double domega, Eigen::VectorXcd phi,
                      const Tolerances& tol = Tolerances::defaults());

    // Renormalizes instead of rejecting an off-norm input.
    static SpectralAmplitude normalized(double omega_min, double domega,
                                        Eigen::VectorXcd raw,
                                        const Tolerances& tol = Tolerances::defaults());

    // Gaussian |φ|² of standard deviation sigma centered at omega0, sampled on
    // [omega0 − halfwidth, omega0 + halfwidth). The default halfwidth 8σ keeps
    // truncated mass below 1e-8 while the grid stays positive for ω₀ ≥ 8σ.
    static SpectralAmplitude gaussian(double omega0, double sigma, Eigen::Index n,
                                      double halfwidth = 0.0);

    // Gaussian envelope with quadratic spectral phase e^{iβ(ω−ω₀)²}.
    static SpectralAmplitude chirped_gaussian(double omega0, double sigma, double beta,
                                              Eigen::Index n, double halfwidth = 0.0);

    // Flat |φ| over [omega0 − width/2, omega0 + width/2], zero outside; the
    // grid spans `span` half-widths of the band (default 2, i.e. ±width).
    static SpectralAmplitude rectangular(double omega0, double width, Eigen::Index n,
                                         double span = 2.0);

    Eigen::Index size() const { return phi_.size(); }
    double omega_min() const { return omega_min_; }
    double domega() const { return domega_; }
    double omega_center() const; // omega_min + (n/2)·dω
    const Eigen::VectorXd& omega() const { return omega_; }
    const Eigen::VectorXcd& phi() const { return phi_; }

private:
    double omega_min_;
    double domega_;
    Eigen::VectorXd omega_;
    Eigen::VectorXcd phi_;
};

// Arrival of the photon at a fixed screen position z0 (units c = 1): the event
// time is t = z0/c and the amplitude is the Fourier transform of φ. No window
// regularization enters: arrival statistics are T-independent.
struct ArrivalEvent {
    double screen_position = 0.0;
    double speed = 1.0; // c in the chosen units

    double arrival_time() const { return screen_position / speed; }
};

// Dual time grid t_k = (k − N/2)·dt with dt = 2π/(N·dω) and the centered
// transform φ̃(t_k) = (dω/2π)·Σ_n φ_n e^{−iω_n t_k}. Parseval: Σ|φ̃|²·dt = 1.
struct TimeDomainAmplitude {
    Eigen::VectorXd times;
    Eigen::VectorXcd amp;
    double dt = 0.0;
};

TimeDomainAmplitude to_time_domain(const SpectralAmplitude& phi);

// p(t_k) = |φ̃(t_k − t₀)|²·dt, realized by the exact spectral shift
// e^{iωt₀} before transforming. The off-grid flag trips when more than 1% of
// the mass lands in the outer 5% of the dual window (wrap-around warning).
struct ArrivalDistribution {
    Eigen::VectorXd times;
    Eigen::VectorXd p;
    double dt = 0.0;
    bool offgrid_warning = false;
};

ArrivalDistribution arrival_distribution(const SpectralAmplitude& phi,
                                         const ArrivalEvent& ev,
                                         const Tolerances& tol = Tolerances::defaults());

// ⟨ω⟩ and Δω of |φ|²; independent of the arrival position exactly.
EnergyMomentsPhoton photon_energy_statistics(const SpectralAmplitude& phi);

struct TimeBandwidthReport {
    double t_mean = 0.0;
    double t_std = 0.0;
    double e_mean = 0.0;
    double e_std = 0.0;
    double product = 0.0;
    double bound = 0.5; // ħ/2, saturated by transform-limited Gaussians
    bool offgrid_warning = false;
};

TimeBandwidthReport time_bandwidth_report(const SpectralAmplitude& phi,
                                          const ArrivalEvent& ev,
                                          const Tolerances& tol = Tolerances::defaults());

// Conditioning on "the photon has frequency ω₀" (one grid bin). The arrival
// time is then uniform over a regularization window T_total:
//   p_event = |φ(ω₀)|²·dω/(2π)   (bin mass)
//   t_std   = T_total/√12         (analytic uniform moments)
//   e_std   = dω/√12              (single-bin floor; 0 in the ideal limit)
// The product grows linearly and without bound in T_total. p_uniform is the
// realized |transform of the projected bin|² on the dual grid, constant to
// roundoff; it is emitted so uniformity can be checked rather than assumed.
struct FrequencyEventReport {
    double omega_bin = 0.0;  // grid frequency actually used
    double p_event = 0.0;
    double total_time = 0.0;
    double t_std = 0.0;
    double e_std = 0.0;
    double product = 0.0;
    Eigen::VectorXd p_uniform;
};

FrequencyEventReport frequency_event_report(const SpectralAmplitude& phi,
                                            double omega0, double total_time,
                                            const Tolerances& tol = Tolerances::defaults());

} // namespace qet
