#include "qet/event_statistics.hpp"

#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>

using namespace qet;

namespace {

const HilbertLabel qubit = HilbertLabel::make("qubit", 2);

Eigen::MatrixXcd pauli_x() {
    Eigen::MatrixXcd m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

Eigen::MatrixXcd pauli_z() {
    Eigen::MatrixXcd m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

std::shared_ptr<const ClockRegister> clock_of(Eigen::Index d, double dt) {
    return std::make_shared<const ClockRegister>(build_clock(d, dt));
}

EventSpec excited_event() {
    return EventSpec{
        Projector::onto_basis_indices(qubit, std::vector<Eigen::Index>{1}),
        "excited"};
}

HistoryState rabi_history(Eigen::Index d, double dt) {
    return build_history(clock_of(d, dt),
                         HermitianOperator(qubit, pauli_x(), Units::energy),
                         StateVector::basis_state(qubit, 0));
}

// equally spaced spectrum with a Gaussian initial profile and a phase-uniform
// event state: the discrete stand-in for a transform-limited wave packet
struct LadderToy {
    HistoryState history;
    EventSpec event;
};

LadderToy ladder_toy(Eigen::Index nsys, double spacing, double sigma_e,
                     Eigen::Index d, double dt) {
    const HilbertLabel sys = HilbertLabel::make("ladder", nsys);
    Eigen::VectorXd omega(nsys);
    for (Eigen::Index n = 0; n < nsys; ++n) {
        omega[n] = (static_cast<double>(n) - static_cast<double>(nsys) / 2.0) * spacing;
    }
    Eigen::MatrixXcd hm = omega.cast<Complex>().asDiagonal();
    HermitianOperator hs(sys, std::move(hm), Units::energy);

    Eigen::VectorXcd c(nsys);
    for (Eigen::Index n = 0; n < nsys; ++n) {
        c[n] = std::exp(-omega[n] * omega[n] / (4.0 * sigma_e * sigma_e));
    }
    StateVector psi0 = StateVector::normalized(sys, std::move(c));

    Eigen::VectorXcd chi =
        Eigen::VectorXcd::Constant(nsys, Complex(1.0 / std::sqrt(static_cast<double>(nsys)), 0.0));
    EventSpec ev{Projector::onto_state(StateVector(sys, chi)), "packet"};

    return LadderToy{build_history(clock_of(d, dt), hs, psi0), std::move(ev)};
}

} // namespace

TEST_CASE("stationary full event: joint distribution is uniform 1/d") {
    const HistoryState h =
        build_history(clock_of(16, 0.5), HermitianOperator::zero(qubit, Units::energy),
                      StateVector::basis_state(qubit, 0));
    const EventSpec all{Projector(HermitianOperator::identity(qubit)), "always"};
    const Eigen::VectorXd joint = joint_time_distribution(h, all);
    for (Eigen::Index k = 0; k < joint.size(); ++k) {
        CHECK(joint[k] == doctest::Approx(1.0 / 16.0).epsilon(1e-14));
    }
}

TEST_CASE("impossible event throws event_never_happens") {
    const HistoryState h =
        build_history(clock_of(16, 0.5), HermitianOperator::zero(qubit, Units::energy),
                      StateVector::basis_state(qubit, 0));
    const EventSpec never{
        Projector::onto_basis_indices(qubit, std::vector<Eigen::Index>{1}), "never"};
    const Eigen::VectorXd joint = joint_time_distribution(h, never);
    CHECK(joint.cwiseAbs().maxCoeff() < 1e-15);
    CHECK_THROWS_AS(condition_on_event(h, never), event_never_happens);
    CHECK_THROWS_AS(uncertainty_report(h, never), event_never_happens);
}

TEST_CASE("Rabi joint distribution is sin²(t_k)/d pointwise") {
    const Eigen::Index d = 256;
    const HistoryState h = rabi_history(d, 0.05);
    const Eigen::VectorXd joint = joint_time_distribution(h, excited_event());
    for (Eigen::Index k = 0; k < d; ++k) {
        const double t = h.clock->times[k];
        const double want = std::sin(t) * std::sin(t) / static_cast<double>(d);
        CHECK(std::abs(joint[k] - want) < 1e-15);
    }
}

TEST_CASE("Rabi event probability approaches the windowed average") {
    const double total = 12.8;
    const Eigen::Index d = 256;
    const HistoryState h = rabi_history(d, total / static_cast<double>(d));
    const ConditionalDistribution cond = condition_on_event(h, excited_event());
    const double continuum = 0.5 - std::sin(total) / (2.0 * total);
    CHECK(std::abs(cond.p_event - continuum) < 1e-4);
    CHECK(cond.alpha_t == doctest::Approx(1.0 / cond.p_event).epsilon(1e-15));
}

TEST_CASE("conditioning renormalizes exactly") {
    const HistoryState h = rabi_history(128, 0.1);
    const ConditionalDistribution cond = condition_on_event(h, excited_event());
    CHECK(std::abs(cond.p.sum() - 1.0) < 1e-12);
    CHECK(cond.times.size() == cond.p.size());
}

TEST_CASE("time statistics: uniform and one-hot distributions") {
    const Eigen::Index d = 512;
    const double dt = 0.05;
    const ClockRegister c = build_clock(d, dt);

    Eigen::VectorXd uniform =
        Eigen::VectorXd::Constant(d, 1.0 / static_cast<double>(d));
    const TimeStatistics us = time_statistics(uniform, c.times);
    // grid mean is −dt/2 (half-open symmetric grid), spread √((T²−dt²)/12)
    CHECK(us.mean == doctest::Approx(-dt / 2.0).epsilon(1e-12));
    const double total = c.total_time;
    CHECK(us.std ==
          doctest::Approx(std::sqrt((total * total - dt * dt) / 12.0)).epsilon(1e-12));

    Eigen::VectorXd onehot = Eigen::VectorXd::Zero(d);
    onehot[17] = 1.0;
    const TimeStatistics os = time_statistics(onehot, c.times);
    CHECK(os.mean == c.times[17]);
    CHECK(os.std == 0.0);
}

TEST_CASE("time statistics recover a sampled Gaussian width") {
    const Eigen::Index d = 512;
    const double dt = 0.05;
    const ClockRegister c = build_clock(d, dt);
    const double sigma = c.total_time / 16.0;
    Eigen::VectorXd p(d);
    for (Eigen::Index k = 0; k < d; ++k) {
        const double t = c.times[k];
        p[k] = std::exp(-t * t / (2.0 * sigma * sigma));
    }
    p /= p.sum();
    const TimeStatistics s = time_statistics(p, c.times);
    CHECK(std::abs(s.mean) < 1e-10);
    CHECK(std::abs(s.std - sigma) / sigma < 1e-4);
}

TEST_CASE("commuting energy path: σz eigenprojector") {
    Eigen::VectorXcd raw(2);
    raw << std::sqrt(0.3), std::sqrt(0.7);
    const HistoryState h =
        build_history(clock_of(64, 0.1),
                      HermitianOperator(qubit, pauli_z(), Units::energy),
                      StateVector(qubit, raw));
    const EventSpec up{
        Projector::onto_basis_indices(qubit, std::vector<Eigen::Index>{0}), "up"};
    const EnergyMoments e = conditional_energy_commuting(h, up);
    CHECK(e.mean == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(e.std) < 1e-7);
}

TEST_CASE("commuting energy path: the trivial projector returns ⟨Hs⟩ and ΔHs") {
    Eigen::VectorXcd raw(2);
    raw << std::sqrt(0.3), std::sqrt(0.7);
    const StateVector psi0(qubit, raw);
    const HermitianOperator hs(qubit, pauli_z(), Units::energy);
    const HistoryState h = build_history(clock_of(64, 0.1), hs, psi0);
    const EventSpec all{Projector(HermitianOperator::identity(qubit)), "always"};
    const EnergyMoments e = conditional_energy_commuting(h, all);
    CHECK(e.mean == doctest::Approx(-0.4).epsilon(1e-12));
    CHECK(e.std == doctest::Approx(std::sqrt(0.84)).epsilon(1e-12));
}

TEST_CASE("commuting energy path: qutrit block projector") {
    const HilbertLabel qutrit = HilbertLabel::make("qutrit", 3);
    Eigen::MatrixXcd hm = Eigen::MatrixXcd::Zero(3, 3);
    hm(1, 1) = 1.0;
    hm(2, 2) = 2.0;
    const HermitianOperator hs(qutrit, hm, Units::energy);
    Eigen::VectorXcd raw = Eigen::VectorXcd::Constant(3, Complex(1.0, 0.0));
    const StateVector psi0 = StateVector::normalized(qutrit, raw);
    const Eigen::Index d = 256;
    const auto clock = clock_of(d, 8.0 * std::numbers::pi / static_cast<double>(d));
    const HistoryState h = build_history(clock, hs, psi0);
    const EventSpec outer{
        Projector::onto_basis_indices(qutrit, std::vector<Eigen::Index>{0, 2}),
        "outer"};

    // conditioned on {|0⟩,|2⟩}: equal weights on energies 0 and 2
    const EnergyMoments e = conditional_energy_commuting(h, outer);
    CHECK(e.mean == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(e.std == doctest::Approx(1.0).epsilon(1e-12));

    // the clock path must agree for on-grid windows
    const EnergyMoments c = conditional_energy_clock(h, outer);
    CHECK(std::abs(c.mean - e.mean) < 1e-9);
    CHECK(std::abs(c.std - e.std) < 1e-9);

    // and the headline report picks the commuting path
    const EventReport r = uncertainty_report(h, outer);
    CHECK(r.commuting);
    REQUIRE(r.energy_commuting_path.has_value());
    CHECK(r.energy.mean == e.mean);
    CHECK(r.energy.std == e.std);
}

TEST_CASE("non-commuting events fail the gate") {
    const HistoryState h = rabi_history(64, 0.1);
    CHECK_THROWS_AS(conditional_energy_commuting(h, excited_event()),
                    contract_error);
    const EventReport r = uncertainty_report(h, excited_event());
    CHECK_FALSE(r.commuting);
    CHECK_FALSE(r.energy_commuting_path.has_value());
    CHECK(r.energy.mean == r.energy_clock_path.mean);
}

TEST_CASE("clock energy path: stationary full event sits in the zero mode") {
    // a uniform clock profile is an exact eigenvector of Hc with eigenvalue 0
    const HistoryState h =
        build_history(clock_of(128, 0.2), HermitianOperator::zero(qubit, Units::energy),
                      StateVector::basis_state(qubit, 0));
    const EventSpec all{Projector(HermitianOperator::identity(qubit)), "always"};
    const EnergyMoments e = conditional_energy_clock(h, all);
    CHECK(std::abs(e.mean) < 1e-10);
    CHECK(e.std < 1e-10);
}

TEST_CASE("clock energy path mirrors a σz eigenstate") {
    const Eigen::Index d = 512;
    const auto clock = clock_of(d, 8.0 * std::numbers::pi / static_cast<double>(d));
    const HistoryState h =
        build_history(clock, HermitianOperator(qubit, pauli_z(), Units::energy),
                      StateVector::basis_state(qubit, 0));
    const EventSpec up{
        Projector::onto_basis_indices(qubit, std::vector<Eigen::Index>{0}), "up"};
    const EnergyMoments e = conditional_energy_clock(h, up);
    CHECK(std::abs(e.mean - 1.0) < 1e-9);
    CHECK(e.std < 1e-8);
}

TEST_CASE("degenerate stationary event: zero spread, flagged boundary") {
    const Eigen::Index d = 256;
    const double dt = 0.1;
    const HistoryState h =
        build_history(clock_of(d, dt), HermitianOperator::zero(qubit, Units::energy),
                      StateVector::basis_state(qubit, 0));
    const EventSpec all{Projector(HermitianOperator::identity(qubit)), "always"};
    const EventReport r = uncertainty_report(h, all);

    const double total = h.clock->total_time;
    CHECK(r.p_event == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(r.time.std ==
          doctest::Approx(std::sqrt((total * total - dt * dt) / 12.0)).epsilon(1e-12));
    CHECK(r.energy.std < 1e-10);          // conditioned on an energy eigenspace
    CHECK(r.product_conditional < 1e-8);  // the bound does not apply here:
    CHECK(r.boundary_flag);               // the event is everywhere, including
    CHECK(r.boundary_mass > 0.04);        // the grid edges
}

TEST_CASE("ladder packet saturates the bound away from the boundary") {
    const LadderToy toy = ladder_toy(64, 0.25, 1.0, 512, 0.025);
    const EventReport r = uncertainty_report(toy.history, toy.event);

    CHECK_FALSE(r.commuting);
    CHECK_FALSE(r.boundary_flag);
    CHECK(r.boundary_mass < 1e-12);
    CHECK(std::abs(r.product_conditional - 0.5) < 1e-4);
    CHECK(r.time.std == doctest::Approx(0.5).epsilon(2e-3));
    CHECK(r.energy.std == doctest::Approx(1.0).epsilon(2e-3));
    CHECK(std::abs(r.time.mean) < 1e-6);

    // unconditional form: Δt·ΔHs ≥ (1/2)√P with room to spare
    CHECK(r.product_unconditional >= r.bound_unconditional - 0.02);
}

TEST_CASE("event probability scales inversely with the window for a localized event") {
    const LadderToy a = ladder_toy(64, 0.25, 1.0, 256, 0.025); // T = 6.4
    const LadderToy b = ladder_toy(64, 0.25, 1.0, 512, 0.025); // T = 12.8
    const EventReport ra = uncertainty_report(a.history, a.event);
    const EventReport rb = uncertainty_report(b.history, b.event);

    const double pa = ra.p_event * a.history.clock->total_time;
    const double pb = rb.p_event * b.history.clock->total_time;
    CHECK(std::abs(pa / pb - 1.0) < 0.01);

    // conditional statistics are window independent once the packet fits
    CHECK(std::abs(ra.time.std - rb.time.std) < 1e-6);
    CHECK(std::abs(ra.energy.std - rb.energy.std) < 1e-6);
}

TEST_CASE("recentered variance identity and the uncentered discrepancy") {
    const HistoryState h = rabi_history(128, 0.1);
    const EventSpec ev = excited_event();
    const EventReport r = uncertainty_report(h, ev);
    const Eigen::VectorXd joint = joint_time_distribution(h, ev);

    const double p = r.p_event;
    const double m1 = joint.dot(h.clock->times);
    const double m2 =
        joint.dot(h.clock->times.cwiseProduct(h.clock->times).eval());

    double recentered = 0.0;
    for (Eigen::Index k = 0; k < joint.size(); ++k) {
        const double dtk = h.clock->times[k] - r.time.mean;
        recentered += dtk * dtk * joint[k];
    }
    const double tvar = r.time.std * r.time.std;
    CHECK(std::abs(tvar - recentered / p) < 1e-12 * (1.0 + tvar));

    const double gap = (m2 - m1 * m1) / p - tvar;
    const double predicted = m1 * m1 * (1.0 - p) / (p * p);
    CHECK(std::abs(gap - predicted) < 1e-12 * (1.0 + std::abs(predicted)));
}

TEST_CASE("projector on a foreign space is rejected") {
    const HistoryState h = rabi_history(16, 0.1);
    const HilbertLabel other = HilbertLabel::make("other", 2);
    const EventSpec bad{
        Projector::onto_basis_indices(other, std::vector<Eigen::Index>{0}), "bad"};
    CHECK_THROWS_AS(joint_time_distribution(h, bad), contract_error);
    CHECK_THROWS_AS(uncertainty_report(h, bad), contract_error);
}
