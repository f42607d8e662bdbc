#include "qet/clock.hpp"

#include "qet/oracle.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace qet;

TEST_CASE("time grid is symmetric with the documented offset") {
    const ClockRegister c = build_clock(4, 1.0);
    CHECK(c.times[0] == -2.0);
    CHECK(c.times[1] == -1.0);
    CHECK(c.times[2] == 0.0);
    CHECK(c.times[3] == 1.0);
    CHECK(c.total_time == 4.0);
    CHECK(c.time_op.matrix()(1, 1) == Complex(-1.0, 0.0));
    CHECK(c.time_op.matrix()(0, 1) == Complex(0.0, 0.0));
}

TEST_CASE("grid parameters are validated") {
    CHECK_THROWS_AS(build_clock(12, 0.1), contract_error);
    CHECK_THROWS_AS(build_clock(3, 0.1), contract_error);
    CHECK_THROWS_AS(build_clock(0, 0.1), contract_error);
    CHECK_THROWS_AS(build_clock(64, 0.0), contract_error);
    CHECK_THROWS_AS(build_clock(64, -1.0), contract_error);
}

TEST_CASE("energy spectrum spans the frequency grid") {
    const Eigen::Index d = 256;
    const double dt = 0.05;
    const ClockRegister c = build_clock(d, dt);

    // grid frequencies: min −π/dt exactly, max π/dt·(1 − 2/d)
    const double pi_dt = std::numbers::pi / dt;
    CHECK(c.frequencies.minCoeff() == doctest::Approx(-pi_dt).epsilon(1e-14));
    CHECK(c.frequencies.maxCoeff() ==
          doctest::Approx(pi_dt * (1.0 - 2.0 / static_cast<double>(d))).epsilon(1e-14));

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(c.energy_op.matrix(),
                                                       Eigen::EigenvaluesOnly);
    REQUIRE(es.info() == Eigen::Success);
    const Eigen::VectorXd evs = es.eigenvalues();
    CHECK(std::abs(evs.minCoeff() - c.frequencies.minCoeff()) < 1e-9);
    CHECK(std::abs(evs.maxCoeff() - c.frequencies.maxCoeff()) < 1e-9);
}

TEST_CASE("energy operator is conjugate to the frequency diagonal") {
    const ClockRegister c = build_clock(64, 0.3);
    const Eigen::MatrixXcd f = oracle::dft_matrix(c);

    // F itself must be unitary
    CHECK((f.adjoint() * f - Eigen::MatrixXcd::Identity(64, 64)).cwiseAbs().maxCoeff() <
          1e-12);

    const Eigen::MatrixXcd diag = f.adjoint() * c.energy_op.matrix() * f;
    Eigen::MatrixXcd want = c.frequencies.cast<Complex>().asDiagonal();
    CHECK((diag - want).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("clock scaling: Tc grows with dt, Hc shrinks") {
    const ClockRegister a = build_clock(32, 0.5);
    const ClockRegister b = build_clock(32, 1.0);
    CHECK((a.time_op.matrix() - 0.5 * b.time_op.matrix()).cwiseAbs().maxCoeff() <
          1e-14);
    CHECK((a.energy_op.matrix() - 2.0 * b.energy_op.matrix()).cwiseAbs().maxCoeff() <
          1e-12);
}

TEST_CASE("smooth centered probes give a tiny commutator residual") {
    const ClockRegister c = build_clock(256, 0.05);
    const StateVector probe = gaussian_probe(c, 0.0, 8.0 * c.dt);
    CHECK(commutator_residual(c, probe) < 1e-6);
}

TEST_CASE("structured residual matches the dense commutator application") {
    const ClockRegister c = build_clock(64, 0.2);
    const StateVector probe = gaussian_probe(c, 0.0, 5.0 * c.dt);
    const double structured = commutator_residual(c, probe);
    const double dense = oracle::commutator_residual_dense(c, probe);
    CHECK(std::abs(structured - dense) < 1e-12);
}

TEST_CASE("an edge basis state is a documented pathology") {
    const ClockRegister c = build_clock(128, 0.1);
    const StateVector edge = StateVector::basis_state(c.space, 0);
    const double res = commutator_residual(c, edge);
    CHECK(res > 1.0); // vs ~1e-13 for smooth centered probes
    CHECK(std::abs(res - oracle::commutator_residual_dense(c, edge)) < 1e-10);
}

TEST_CASE("uniform probe at d = 4: the residual cannot vanish") {
    // tr[Tc,Hc] = 0, so [Tc,Hc] = i·1 is impossible on a finite register.
    const ClockRegister c = build_clock(4, 1.0);
    Eigen::VectorXcd u = Eigen::VectorXcd::Constant(4, Complex(0.5, 0.0));
    const StateVector probe(c.space, u);
    const double res = commutator_residual(c, probe);
    CHECK(res > 0.1);
    CHECK(std::abs(res - oracle::commutator_residual_dense(c, probe)) < 1e-12);
}

TEST_CASE("kink probe residual halves as the grid refines at fixed window") {
    // exp(−|t|/τ) has a spectral tail ∝ 1/ω², so the aliasing error falls off
    // first order in dt; measured residuals ≈ 0.58, 0.29, 0.15, 0.08.
    const double total = 25.6;
    const double tau = total / 16.0;
    double prev = 0.0;
    for (int stage = 0; stage < 4; ++stage) {
        const Eigen::Index d = 64 << stage;
        const ClockRegister c = build_clock(d, total / static_cast<double>(d));
        Eigen::VectorXcd v(d);
        for (Eigen::Index k = 0; k < d; ++k) {
            v[k] = std::exp(-std::abs(c.times[k]) / tau);
        }
        const double res = commutator_residual(c, StateVector::normalized(c.space, v));
        if (stage > 0) {
            CHECK(res < 0.62 * prev); // genuine first-order improvement
        } else {
            CHECK(res < 1.0);
        }
        prev = res;
    }
}

TEST_CASE("gaussian probe requires a positive width") {
    const ClockRegister c = build_clock(16, 0.5);
    CHECK_THROWS_AS(gaussian_probe(c, 0.0, 0.0), contract_error);
    CHECK_THROWS_AS(gaussian_probe(c, 0.0, -1.0), contract_error);
}

TEST_CASE("probe on the wrong space is rejected") {
    const ClockRegister c = build_clock(16, 0.5);
    const ClockRegister other = build_clock(32, 0.5);
    const StateVector probe = gaussian_probe(other, 0.0, 1.0);
    CHECK_THROWS_AS(commutator_residual(c, probe), contract_error);
}
