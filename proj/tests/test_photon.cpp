#include "qet/photon.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace qet;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

// O(N²) reference for φ̃(t_k) = (dω/2π) Σ_n φ_n e^{−iω_n t_k}
Eigen::VectorXcd direct_time_domain(const SpectralAmplitude& s, const Eigen::VectorXd& times) {
    Eigen::VectorXcd out(times.size());
    for (Eigen::Index k = 0; k < times.size(); ++k) {
        Complex acc = 0.0;
        for (Eigen::Index i = 0; i < s.size(); ++i) {
            acc += s.phi()[i] * std::exp(Complex(0.0, -s.omega()[i] * times[k]));
        }
        out[k] = acc * s.domega() / two_pi;
    }
    return out;
}

} // namespace

TEST_CASE("spectral grids must be power-of-two and positive") {
    Eigen::VectorXcd ok = Eigen::VectorXcd::Constant(8, Complex(1.0, 0.0));
    CHECK_THROWS_AS(SpectralAmplitude::normalized(0.0, 0.5, Eigen::VectorXcd::Constant(24, Complex(1, 0))),
                    contract_error);
    CHECK_THROWS_AS(SpectralAmplitude::normalized(0.0, 0.5, Eigen::VectorXcd::Constant(2, Complex(1, 0))),
                    contract_error);
    CHECK_THROWS_AS(SpectralAmplitude::normalized(0.0, -0.5, ok), contract_error);
    CHECK_THROWS_AS(SpectralAmplitude::normalized(0.0, 0.5, Eigen::VectorXcd::Zero(8)),
                    contract_error);
    CHECK_THROWS_AS(SpectralAmplitude(0.0, 0.5, ok), contract_error); // mass 8·0.5/2π ≠ 1
}

TEST_CASE("factory grids center on the carrier and normalize the mass") {
    const SpectralAmplitude g = SpectralAmplitude::gaussian(8.0, 1.0, 1024);
    CHECK(g.omega_center() == 8.0);
    CHECK(g.omega_min() == 0.0);
    CHECK(g.domega() == 16.0 / 1024.0);
    CHECK(std::abs(g.phi().squaredNorm() * g.domega() / two_pi - 1.0) < 1e-12);
}

TEST_CASE("fast transform matches the direct definition") {
    const SpectralAmplitude s = SpectralAmplitude::chirped_gaussian(8.0, 1.0, 0.7, 256);
    const TimeDomainAmplitude td = to_time_domain(s);
    const Eigen::VectorXcd ref = direct_time_domain(s, td.times);
    CHECK((td.amp - ref).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(td.dt == doctest::Approx(two_pi / (256.0 * s.domega())).epsilon(1e-15));
}

TEST_CASE("Parseval: arrival probabilities sum to one") {
    const SpectralAmplitude g = SpectralAmplitude::gaussian(8.0, 1.0, 2048);
    const ArrivalDistribution arr = arrival_distribution(g, ArrivalEvent{});
    CHECK(std::abs(arr.p.sum() - 1.0) < 1e-12);
    CHECK_FALSE(arr.offgrid_warning);
}

TEST_CASE("Gaussian packet: time width is 1/(2σ)") {
    const double sigma = 1.0;
    const SpectralAmplitude g = SpectralAmplitude::gaussian(8.0, sigma, 4096);
    const TimeBandwidthReport r = time_bandwidth_report(g, ArrivalEvent{});
    CHECK(std::abs(r.t_mean) < 1e-10);
    CHECK(r.t_std == doctest::Approx(1.0 / (2.0 * sigma)).epsilon(1e-9));
    CHECK(r.e_mean == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(r.e_std == doctest::Approx(sigma).epsilon(1e-9));
    CHECK(r.bound == 0.5);
    CHECK(std::abs(r.product - 0.5) < 1e-9); // transform limited
    CHECK_FALSE(r.offgrid_warning);
}

TEST_CASE("moving the screen shifts the arrival law and nothing else") {
    const SpectralAmplitude g = SpectralAmplitude::gaussian(8.0, 1.0, 1024);
    const ArrivalDistribution base = arrival_distribution(g, ArrivalEvent{});
    const double t0 = 16.0 * base.dt;
    const ArrivalDistribution moved =
        arrival_distribution(g, ArrivalEvent{.screen_position = t0, .speed = 1.0});

    for (Eigen::Index k = 16; k < moved.p.size(); ++k) {
        CHECK(std::abs(moved.p[k] - base.p[k - 16]) < 1e-10);
    }

    const TimeBandwidthReport r0 = time_bandwidth_report(g, ArrivalEvent{});
    const TimeBandwidthReport r1 =
        time_bandwidth_report(g, ArrivalEvent{.screen_position = t0, .speed = 1.0});
    CHECK(std::abs(r1.t_mean - r0.t_mean - t0) < 1e-9);
    CHECK(std::abs(r1.t_std - r0.t_std) < 1e-9);
    CHECK(r1.e_mean == r0.e_mean); // energy statistics never see the screen
    CHECK(r1.e_std == r0.e_std);
}

TEST_CASE("screen position and speed combine into the arrival time") {
    const ArrivalEvent ev{.screen_position = 6.0, .speed = 2.0};
    CHECK(ev.arrival_time() == 3.0);
    const SpectralAmplitude g = SpectralAmplitude::gaussian(8.0, 1.0, 256);
    CHECK_THROWS_AS(arrival_distribution(g, ArrivalEvent{.screen_position = 1.0, .speed = 0.0}),
                    contract_error);
}

TEST_CASE("chirp stretches the packet to √(1/(4σ²) + 4β²σ²)") {
    const SpectralAmplitude c = SpectralAmplitude::chirped_gaussian(8.0, 1.0, 1.0, 4096);
    const TimeBandwidthReport r = time_bandwidth_report(c, ArrivalEvent{});
    CHECK(r.t_std == doctest::Approx(std::sqrt(4.25)).epsilon(1e-6));
    CHECK(r.e_std == doctest::Approx(1.0).epsilon(1e-9)); // spectral phase is invisible to |φ|²
    CHECK(r.product > 0.5);
    CHECK(r.product == doctest::Approx(std::sqrt(4.25)).epsilon(1e-6));
}

TEST_CASE("two-line spectrum has exact energy moments") {
    Eigen::VectorXcd raw = Eigen::VectorXcd::Zero(32);
    raw[8] = 1.0;  // ω = 4
    raw[12] = 1.0; // ω = 6
    const SpectralAmplitude s = SpectralAmplitude::normalized(0.0, 0.5, std::move(raw));
    const EnergyMomentsPhoton e = photon_energy_statistics(s);
    CHECK(e.mean == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(e.std == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("rectangular band: Dirichlet envelope and uniform-band spread") {
    const double width = 2.0;
    const Eigen::Index n = 4096;
    const SpectralAmplitude s = SpectralAmplitude::rectangular(10.0, width, n);

    Eigen::Index support = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (std::abs(s.phi()[i]) > 0.0) ++support;
    }
    CHECK(support == n / 2 + 1); // inclusive band edges

    // discrete uniform over `support` bins, spacing dω
    const double m = static_cast<double>(support);
    const double exact = s.domega() * std::sqrt((m * m - 1.0) / 12.0);
    const EnergyMomentsPhoton e = photon_energy_statistics(s);
    CHECK(e.mean == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(e.std == doctest::Approx(exact).epsilon(1e-10));
    CHECK(e.std == doctest::Approx(width / std::sqrt(12.0)).epsilon(5e-3));

    // sinc structure: deep minimum at t = 2·dt, the first Dirichlet null
    const TimeDomainAmplitude td = to_time_domain(s);
    const Eigen::Index c = n / 2;
    CHECK(std::abs(td.amp[c + 2]) < 1e-3 * std::abs(td.amp[c]));
    CHECK(std::abs(td.amp[c + 2]) < std::abs(td.amp[c + 1]));
    CHECK(std::abs(td.amp[c + 2]) < std::abs(td.amp[c + 3]));

    // hard band edges are far from transform limited
    const TimeBandwidthReport r = time_bandwidth_report(s, ArrivalEvent{});
    CHECK(r.product > 0.5);
}

TEST_CASE("random spectrum: moments agree with direct sums") {
    std::mt19937 rng(411u);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXcd raw(64);
    for (Eigen::Index i = 0; i < 64; ++i) raw[i] = Complex(gauss(rng), gauss(rng));
    const SpectralAmplitude s = SpectralAmplitude::normalized(2.0, 0.25, std::move(raw));

    double m1 = 0.0, m2 = 0.0;
    for (Eigen::Index i = 0; i < 64; ++i) {
        const double pw = std::norm(s.phi()[i]) * s.domega() / two_pi;
        m1 += s.omega()[i] * pw;
        m2 += s.omega()[i] * s.omega()[i] * pw;
    }
    const EnergyMomentsPhoton e = photon_energy_statistics(s);
    CHECK(std::abs(e.mean - m1) < 1e-12);
    CHECK(std::abs(e.std - std::sqrt(m2 - m1 * m1)) < 1e-12);

    const ArrivalDistribution arr = arrival_distribution(s, ArrivalEvent{});
    const Eigen::VectorXcd ref = direct_time_domain(s, arr.times);
    for (Eigen::Index k = 0; k < arr.p.size(); ++k) {
        CHECK(std::abs(arr.p[k] - std::norm(ref[k]) * arr.dt) < 1e-12);
    }
}

TEST_CASE("under-resolved spectrum trips the wrap-around warning") {
    // halfwidth 512 with 64 bins leaves dω = 16: the packet cannot fit the
    // dual window and the edge mass exceeds the threshold
    const SpectralAmplitude bad = SpectralAmplitude::gaussian(8.0, 1.0, 64, 512.0);
    const ArrivalDistribution arr = arrival_distribution(bad, ArrivalEvent{});
    CHECK(arr.offgrid_warning);
}

TEST_CASE("frequency event: uniform arrival over the regularization window") {
    const SpectralAmplitude g = SpectralAmplitude::gaussian(8.0, 1.0, 1024);
    const double total = 10.0;
    const FrequencyEventReport r = frequency_event_report(g, 8.0, total);

    CHECK(r.omega_bin == 8.0);
    CHECK(r.p_event ==
          doctest::Approx(std::norm(g.phi()[512]) * g.domega() / two_pi).epsilon(1e-14));
    CHECK(r.t_std == doctest::Approx(total / std::sqrt(12.0)).epsilon(1e-15));
    CHECK(r.e_std == doctest::Approx(g.domega() / std::sqrt(12.0)).epsilon(1e-15));

    // realized single-bin transform is flat to roundoff and sums to one
    CHECK(r.p_uniform.size() == 1024);
    CHECK(std::abs(r.p_uniform.sum() - 1.0) < 1e-12);
    const double lo = r.p_uniform.minCoeff();
    const double hi = r.p_uniform.maxCoeff();
    CHECK((hi - lo) / hi < 1e-10);

    // the product has no ħ/2 floor: it scales linearly with the window
    const FrequencyEventReport r2 = frequency_event_report(g, 8.0, 2.0 * total);
    CHECK(r2.product == doctest::Approx(2.0 * r.product).epsilon(1e-12));
    CHECK(r2.p_event == r.p_event);
}

TEST_CASE("frequency event: empty bins and foreign frequencies are rejected") {
    const SpectralAmplitude g = SpectralAmplitude::gaussian(8.0, 1.0, 1024);
    // 7.5σ into the tail: the bin mass sits below the probability floor
    CHECK_THROWS_AS(frequency_event_report(g, 15.5, 10.0), event_never_happens);
    // beyond the grid entirely
    CHECK_THROWS_AS(frequency_event_report(g, 17.0, 10.0), contract_error);
    CHECK_THROWS_AS(frequency_event_report(g, -1.0, 10.0), contract_error);
    CHECK_THROWS_AS(frequency_event_report(g, 8.0, 0.0), contract_error);
}
