#pragma once

#include "qet/errors.hpp"
#include "qet/tolerances.hpp"

#include <Eigen/Dense>

#include <complex>
#include <string>
#include <vector>

namespace qet {

using Complex = std::complex<double>;

// Identifies a Hilbert space; two labels agree only if name and dimension both
// match. Operations refuse to mix states and operators from different spaces.
struct HilbertLabel {
    std::string name;
    Eigen::Index dimension = 0;

    static HilbertLabel make(std::string name, Eigen::Index dimension);
    bool operator==(const HilbertLabel&) const = default;
};

enum class Units { energy, time, dimensionless };

// Normalized pure state. Construction rejects vectors whose norm is off by
// more than the state-norm tolerance; `normalized` rescales instead.
class StateVector {
public:
    StateVector(HilbertLabel space, Eigen::VectorXcd amplitudes,
                const Tolerances& tol = Tolerances::defaults());

    static StateVector normalized(HilbertLabel space, Eigen::VectorXcd raw,
                                  const Tolerances& tol = Tolerances::defaults());
    static StateVector basis_state(HilbertLabel space, Eigen::Index k);

    const HilbertLabel& space() const { return space_; }
    Eigen::Index dim() const { return amplitudes_.size(); }
    const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }

private:
    HilbertLabel space_;
    Eigen::VectorXcd amplitudes_;
};

// Dense Hermitian operator tagged with its space and physical units (ħ = 1, so
// energy and inverse time coincide; the tag records intent, not a conversion).
class HermitianOperator {
public:
    HermitianOperator(HilbertLabel space, Eigen::MatrixXcd matrix, Units units,
                      const Tolerances& tol = Tolerances::defaults());

    static HermitianOperator identity(HilbertLabel space,
                                      Units units = Units::dimensionless);
    static HermitianOperator zero(HilbertLabel space,
                                  Units units = Units::dimensionless);

    const HilbertLabel& space() const { return space_; }
    Eigen::Index dim() const { return matrix_.rows(); }
    const Eigen::MatrixXcd& matrix() const { return matrix_; }
    Units units() const { return units_; }

    double max_abs() const;       // ‖A‖_max, largest |entry|
    double spectral_norm() const; // largest |eigenvalue|

private:
    HilbertLabel space_;
    Eigen::MatrixXcd matrix_;
    Units units_;
};

// Orthogonal projector: Hermitian, idempotent, spectrum in {0,1}.
class Projector {
public:
    explicit Projector(HermitianOperator op,
                       const Tolerances& tol = Tolerances::defaults());

    static Projector onto_state(const StateVector& chi,
                                const Tolerances& tol = Tolerances::defaults());
    static Projector onto_basis_indices(HilbertLabel space,
                                        const std::vector<Eigen::Index>& indices,
                                        const Tolerances& tol = Tolerances::defaults());

    const HilbertLabel& space() const { return op_.space(); }
    Eigen::Index dim() const { return op_.dim(); }
    const Eigen::MatrixXcd& matrix() const { return op_.matrix(); }
    const HermitianOperator& op() const { return op_; }
    Eigen::Index rank() const { return rank_; }

private:
    HermitianOperator op_;
    Eigen::Index rank_;
};

// Cached eigendecomposition of a Hamiltonian, for repeated evolution from the
// same generator. evolve(ψ, t) = V e^{−iΛt} V† ψ.
class Propagator {
public:
    explicit Propagator(const HermitianOperator& hamiltonian,
                        const Tolerances& tol = Tolerances::defaults());

    const HilbertLabel& space() const { return space_; }
    const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }

    StateVector evolve(const StateVector& psi0, double t) const;

    // Columns are evolve(psi0, times[k]); cheaper than repeated evolve calls
    // because V†ψ₀ is formed once.
    Eigen::MatrixXcd evolve_batch(const StateVector& psi0,
                                  const Eigen::VectorXd& times) const;

private:
    HilbertLabel space_;
    Eigen::MatrixXcd eigenvectors_;
    Eigen::VectorXd eigenvalues_;
};

// Kronecker products; the first factor owns the slow (major) index. The
// combined space is named "a⊗b" and capped at the joint-dimension limit.
StateVector tensor_product(const StateVector& a, const StateVector& b,
                           const Tolerances& tol = Tolerances::defaults());
HermitianOperator tensor_product(const HermitianOperator& a,
                                 const HermitianOperator& b,
                                 const Tolerances& tol = Tolerances::defaults());

// One-shot evolution, ħ = 1. For many times from one Hamiltonian use Propagator.
StateVector evolve(const StateVector& psi0, const HermitianOperator& hamiltonian,
                   double t, const Tolerances& tol = Tolerances::defaults());

// ⟨ψ|A|ψ⟩ with a guard on the imaginary residual.
double expectation(const StateVector& psi, const HermitianOperator& op,
                   const Tolerances& tol = Tolerances::defaults());

// ‖AB − BA‖_max; both operators must share a space.
double commutator_max_norm(const HermitianOperator& a, const HermitianOperator& b);

} // namespace qet
