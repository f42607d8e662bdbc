#include "qet/clock.hpp"

#include "qet/fft.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <vector>

namespace qet {

namespace {

struct UnitClock {
    Eigen::VectorXd times;       // k − d/2
    Eigen::VectorXd frequencies; // 2π(m − d/2)/d
    Eigen::MatrixXcd energy;     // Hc at dt = 1
};

// Hc(dt=1) is circulant: Hc[k,l] = h[(k−l) mod d] with
//   h[r] = (1/d) Σ_m ω_m e^{2πi(m−d/2)r/d} = (−1)^r · conj(DFT[ω])[r] / d.
// Fill the lower triangle from h and mirror, so hermiticity is exact.
std::shared_ptr<const UnitClock> make_unit_clock(Eigen::Index d) {
    auto uc = std::make_shared<UnitClock>();
    uc->times.resize(d);
    uc->frequencies.resize(d);
    const double dd = static_cast<double>(d);
    for (Eigen::Index k = 0; k < d; ++k) {
        uc->times[k] = static_cast<double>(k) - dd / 2.0;
        uc->frequencies[k] = 2.0 * std::numbers::pi * uc->times[k] / dd;
    }

    std::vector<Complex> work(static_cast<std::size_t>(d));
    for (Eigen::Index m = 0; m < d; ++m) work[m] = uc->frequencies[m];
    fft::transform(work, /*inverse=*/false);

    Eigen::VectorXcd h(d);
    for (Eigen::Index r = 0; r < d; ++r) {
        const double sign = (r % 2 == 0) ? 1.0 : -1.0;
        h[r] = sign * std::conj(work[static_cast<std::size_t>(r)]) / dd;
    }

    uc->energy.resize(d, d);
    for (Eigen::Index k = 0; k < d; ++k) {
        uc->energy(k, k) = Complex(h[0].real(), 0.0);
        for (Eigen::Index l = 0; l < k; ++l) {
            const Complex v = h[k - l];
            uc->energy(k, l) = v;
            uc->energy(l, k) = std::conj(v);
        }
    }
    return uc;
}

std::shared_ptr<const UnitClock> unit_clock(Eigen::Index d) {
    static std::mutex mu;
    static std::map<Eigen::Index, std::shared_ptr<const UnitClock>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(d);
    if (it == cache.end()) {
        it = cache.emplace(d, make_unit_clock(d)).first;
    }
    return it->second;
}

} // namespace

ClockRegister build_clock(Eigen::Index d, double dt, const Tolerances& tol) {
    if (!fft::is_power_of_two(static_cast<std::size_t>(d > 0 ? d : 0)) || d < 4) {
        throw contract_error("build_clock: d = " + std::to_string(d) +
                             " is not a power of two >= 4");
    }
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw contract_error("build_clock: dt must be positive and finite");
    }

    const auto uc = unit_clock(d);
    HilbertLabel space = HilbertLabel::make("clock[" + std::to_string(d) + "]", d);

    Eigen::VectorXd times = dt * uc->times;
    Eigen::VectorXd freqs = uc->frequencies / dt;
    Eigen::MatrixXcd tc = times.cast<Complex>().asDiagonal();
    Eigen::MatrixXcd hc = uc->energy / dt;

    return ClockRegister{
        d,
        dt,
        static_cast<double>(d) * dt,
        space,
        std::move(times),
        std::move(freqs),
        HermitianOperator(space, std::move(tc), Units::time, tol),
        HermitianOperator(space, std::move(hc), Units::energy, tol),
    };
}

double commutator_residual(const ClockRegister& clock, const StateVector& probe) {
    if (!(probe.space() == clock.space)) {
        throw contract_error("commutator_residual: probe lives on '" +
                             probe.space().name + "', not the clock space");
    }
    const Eigen::VectorXcd& psi = probe.amplitudes();
    const Eigen::MatrixXcd& hc = clock.energy_op.matrix();
    const Eigen::VectorXcd tpsi = clock.times.cast<Complex>().cwiseProduct(psi);
    Eigen::VectorXcd r = clock.times.cast<Complex>().cwiseProduct(hc * psi) -
                         hc * tpsi - Complex(0.0, 1.0) * psi;
    return r.norm();
}

StateVector gaussian_probe(const ClockRegister& clock, double center, double width) {
    if (!(width > 0.0) || !std::isfinite(width)) {
        throw contract_error("gaussian_probe: width must be positive and finite");
    }
    Eigen::VectorXcd v(clock.d);
    for (Eigen::Index k = 0; k < clock.d; ++k) {
        const double x = (clock.times[k] - center) / (2.0 * width);
        v[k] = std::exp(-x * x);
    }
    return StateVector::normalized(clock.space, std::move(v));
}

StateVector diagnostic_probe(const ClockRegister& clock) {
    const double width = std::min(8.0 * clock.dt, clock.total_time / 16.0);
    return gaussian_probe(clock, -clock.dt / 2.0, width);
}

} // namespace qet
