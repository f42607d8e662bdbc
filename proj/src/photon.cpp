#include "qet/photon.hpp"

#include "qet/fft.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace qet {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

void require_transform_size(Eigen::Index n) {
    if (n < 4 || !fft::is_power_of_two(static_cast<std::size_t>(n))) {
        throw contract_error("spectral grid: size " + std::to_string(n) +
                             " is not a power of two >= 4");
    }
}

double norm_mass(const Eigen::VectorXcd& phi, double domega) {
    return phi.squaredNorm() * domega / two_pi;
}

} // namespace

SpectralAmplitude::SpectralAmplitude(double omega_min, double domega,
                                     Eigen::VectorXcd phi, const Tolerances& tol)
    : omega_min_(omega_min), domega_(domega), phi_(std::move(phi)) {
    require_transform_size(phi_.size());
    if (!(domega_ > 0.0) || !std::isfinite(domega_) || !std::isfinite(omega_min_)) {
        throw contract_error("spectral grid: dω must be positive and finite");
    }
    const double mass = norm_mass(phi_, domega_);
    if (std::abs(mass - 1.0) > tol.probability_sum) {
        throw contract_error("SpectralAmplitude: Σ|φ|²dω/2π = " +
                             std::to_string(mass) + ", expected 1; use normalized()");
    }
    omega_.resize(phi_.size());
    for (Eigen::Index i = 0; i < phi_.size(); ++i) {
        omega_[i] = omega_min_ + static_cast<double>(i) * domega_;
    }
}

SpectralAmplitude SpectralAmplitude::normalized(double omega_min, double domega,
                                                Eigen::VectorXcd raw,
                                                const Tolerances& tol) {
    require_transform_size(raw.size());
    const double mass = norm_mass(raw, domega);
    if (!(mass > 0.0) || !std::isfinite(mass)) {
        throw contract_error("SpectralAmplitude: cannot normalize zero spectrum");
    }
    raw /= std::sqrt(mass);
    return SpectralAmplitude(omega_min, domega, std::move(raw), tol);
}

SpectralAmplitude SpectralAmplitude::gaussian(double omega0, double sigma,
                                              Eigen::Index n, double halfwidth) {
    return chirped_gaussian(omega0, sigma, 0.0, n, halfwidth);
}

SpectralAmplitude SpectralAmplitude::chirped_gaussian(double omega0, double sigma,
                                                      double beta, Eigen::Index n,
                                                      double halfwidth) {
    require_transform_size(n);
    if (!(sigma > 0.0)) {
        throw contract_error("gaussian spectrum: sigma must be positive");
    }
    if (halfwidth <= 0.0) halfwidth = 8.0 * sigma;
    const double domega = 2.0 * halfwidth / static_cast<double>(n);
    const double omega_min = omega0 - halfwidth;
    Eigen::VectorXcd raw(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double w = omega_min + static_cast<double>(i) * domega - omega0;
        const double envelope = std::exp(-w * w / (4.0 * sigma * sigma));
        raw[i] = envelope * std::exp(Complex(0.0, beta * w * w));
    }
    return normalized(omega_min, domega, std::move(raw));
}

SpectralAmplitude SpectralAmplitude::rectangular(double omega0, double width,
                                                 Eigen::Index n, double span) {
    require_transform_size(n);
    if (!(width > 0.0) || !(span >= 1.0)) {
        throw contract_error("rectangular spectrum: need width > 0 and span >= 1");
    }
    const double halfgrid = span * width / 2.0;
    const double domega = 2.0 * halfgrid / static_cast<double>(n);
    const double omega_min = omega0 - halfgrid;
    Eigen::VectorXcd raw = Eigen::VectorXcd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double w = omega_min + static_cast<double>(i) * domega - omega0;
        if (std::abs(w) <= width / 2.0) raw[i] = 1.0;
    }
    return normalized(omega_min, domega, std::move(raw));
}

double SpectralAmplitude::omega_center() const {
    return omega_min_ + static_cast<double>(size() / 2) * domega_;
}

TimeDomainAmplitude to_time_domain(const SpectralAmplitude& phi) {
    const Eigen::Index n = phi.size();
    const double dt = two_pi / (static_cast<double>(n) * phi.domega());
    const double wc = phi.omega_center();

    // φ̃(t_k) = (dω/2π) Σ_n φ_n e^{−iω_n t_k}
    //         = (dω/2π) e^{−iω_c t_k} · √N · centered_unitary(φ)[k]
    std::vector<Complex> work(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) work[static_cast<std::size_t>(i)] = phi.phi()[i];
    fft::centered_unitary(work, /*inverse=*/false);

    TimeDomainAmplitude out;
    out.dt = dt;
    out.times.resize(n);
    out.amp.resize(n);
    const double scale = phi.domega() / two_pi * std::sqrt(static_cast<double>(n));
    for (Eigen::Index k = 0; k < n; ++k) {
        const double t = (static_cast<double>(k) - static_cast<double>(n) / 2.0) * dt;
        out.times[k] = t;
        out.amp[k] = scale * std::exp(Complex(0.0, -wc * t)) *
                     work[static_cast<std::size_t>(k)];
    }
    return out;
}

ArrivalDistribution arrival_distribution(const SpectralAmplitude& phi,
                                         const ArrivalEvent& ev,
                                         const Tolerances& tol) {
    if (!(ev.speed > 0.0)) {
        throw contract_error("arrival event: propagation speed must be positive");
    }
    const double t0 = ev.arrival_time();

    // exact continuum shift: multiply by e^{iωt₀} in the frequency domain
    Eigen::VectorXcd shifted(phi.size());
    for (Eigen::Index i = 0; i < phi.size(); ++i) {
        shifted[i] = phi.phi()[i] * std::exp(Complex(0.0, phi.omega()[i] * t0));
    }
    const SpectralAmplitude moved(phi.omega_min(), phi.domega(), std::move(shifted), tol);
    const TimeDomainAmplitude td = to_time_domain(moved);

    ArrivalDistribution out;
    out.times = td.times;
    out.dt = td.dt;
    out.p.resize(td.amp.size());
    for (Eigen::Index k = 0; k < td.amp.size(); ++k) {
        out.p[k] = std::norm(td.amp[k]) * td.dt;
    }
    const Eigen::Index n = out.p.size();
    const auto edge = static_cast<Eigen::Index>(
        std::floor(static_cast<double>(n) * tol.boundary_window_fraction / 2.0));
    const double mass_at_edges =
        edge > 0 ? out.p.head(edge).sum() + out.p.tail(edge).sum() : 0.0;
    out.offgrid_warning = mass_at_edges > tol.boundary_mass_threshold;
    return out;
}

EnergyMomentsPhoton photon_energy_statistics(const SpectralAmplitude& phi) {
    const double wsum = phi.phi().squaredNorm();
    double m1 = 0.0, m2 = 0.0;
    for (Eigen::Index i = 0; i < phi.size(); ++i) {
        const double w = phi.omega()[i];
        const double pw = std::norm(phi.phi()[i]) / wsum;
        m1 += w * pw;
        m2 += w * w * pw;
    }
    return EnergyMomentsPhoton{m1, std::sqrt(std::max(0.0, m2 - m1 * m1))};
}

TimeBandwidthReport time_bandwidth_report(const SpectralAmplitude& phi,
                                          const ArrivalEvent& ev,
                                          const Tolerances& tol) {
    const ArrivalDistribution arr = arrival_distribution(phi, ev, tol);
    const double mass = arr.p.sum();
    double m1 = 0.0, m2 = 0.0;
    for (Eigen::Index k = 0; k < arr.p.size(); ++k) {
        const double t = arr.times[k];
        m1 += t * arr.p[k];
        m2 += t * t * arr.p[k];
    }
    m1 /= mass;
    m2 /= mass;
    const EnergyMomentsPhoton e = photon_energy_statistics(phi);

    TimeBandwidthReport r;
    r.t_mean = m1;
    r.t_std = std::sqrt(std::max(0.0, m2 - m1 * m1));
    r.e_mean = e.mean;
    r.e_std = e.std;
    r.product = r.t_std * r.e_std;
    r.offgrid_warning = arr.offgrid_warning;
    return r;
}

FrequencyEventReport frequency_event_report(const SpectralAmplitude& phi,
                                            double omega0, double total_time,
                                            const Tolerances& tol) {
    if (!(total_time > 0.0) || !std::isfinite(total_time)) {
        throw contract_error("frequency event: total_time must be positive");
    }
    const double pos = (omega0 - phi.omega_min()) / phi.domega();
    const auto bin = static_cast<Eigen::Index>(std::llround(pos));
    if (bin < 0 || bin >= phi.size()) {
        throw contract_error("frequency event: ω₀ = " + std::to_string(omega0) +
                             " lies outside the spectral grid");
    }

    const double p_event = std::norm(phi.phi()[bin]) * phi.domega() / two_pi;
    if (p_event < tol.probability_floor) {
        throw event_never_happens("frequency event: |φ(ω₀)|² mass " +
                                  std::to_string(p_event) +
                                  " is below the probability floor");
    }

    // Project onto the single bin and transform: |φ̃| is exactly constant, so
    // the realized conditional arrival distribution is uniform.
    Eigen::VectorXcd projected = Eigen::VectorXcd::Zero(phi.size());
    projected[bin] = phi.phi()[bin];
    const SpectralAmplitude pure =
        SpectralAmplitude::normalized(phi.omega_min(), phi.domega(), std::move(projected), tol);
    const TimeDomainAmplitude td = to_time_domain(pure);
    Eigen::VectorXd uniform(td.amp.size());
    for (Eigen::Index k = 0; k < td.amp.size(); ++k) {
        uniform[k] = std::norm(td.amp[k]) * td.dt;
    }

    FrequencyEventReport r;
    r.omega_bin = phi.omega()[bin];
    r.p_event = p_event;
    r.total_time = total_time;
    r.t_std = total_time / std::sqrt(12.0);
    r.e_std = phi.domega() / std::sqrt(12.0);
    r.product = r.t_std * r.e_std;
    r.p_uniform = std::move(uniform);
    return r;
}

} // namespace qet
