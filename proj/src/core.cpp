#include "qet/core.hpp"

#include <cmath>
#include <utility>

namespace qet {

const Tolerances& Tolerances::defaults() {
    static const Tolerances t{};
    return t;
}

namespace {

void require_same_space(const HilbertLabel& a, const HilbertLabel& b,
                        const char* what) {
    if (!(a == b)) {
        throw contract_error(std::string(what) + ": space mismatch, '" + a.name +
                             "' (dim " + std::to_string(a.dimension) + ") vs '" +
                             b.name + "' (dim " + std::to_string(b.dimension) + ")");
    }
}

double max_abs_of(const Eigen::MatrixXcd& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

void check_joint_cap(Eigen::Index da, Eigen::Index db, const Tolerances& tol,
                     const char* what) {
    const auto cap = static_cast<Eigen::Index>(tol.max_joint_dimension);
    if (da > cap / db) {
        throw resource_error(std::string(what) + ": joint dimension " +
                             std::to_string(da) + "*" + std::to_string(db) +
                             " exceeds cap " + std::to_string(cap));
    }
}

} // namespace

HilbertLabel HilbertLabel::make(std::string name, Eigen::Index dimension) {
    if (dimension < 1) {
        throw contract_error("HilbertLabel '" + name + "': dimension " +
                             std::to_string(dimension) + " < 1");
    }
    return HilbertLabel{std::move(name), dimension};
}

StateVector::StateVector(HilbertLabel space, Eigen::VectorXcd amplitudes,
                         const Tolerances& tol)
    : space_(std::move(space)), amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() != space_.dimension) {
        throw contract_error("StateVector '" + space_.name + "': " +
                             std::to_string(amplitudes_.size()) +
                             " amplitudes for dimension " +
                             std::to_string(space_.dimension));
    }
    const double n = amplitudes_.norm();
    if (std::abs(n - 1.0) > tol.state_norm) {
        throw contract_error("StateVector '" + space_.name + "': norm " +
                             std::to_string(n) + " is not 1 within tolerance");
    }
}

StateVector StateVector::normalized(HilbertLabel space, Eigen::VectorXcd raw,
                                    const Tolerances& tol) {
    const double n = raw.norm();
    if (!(n > 0.0) || !std::isfinite(n)) {
        throw contract_error("StateVector '" + space.name +
                             "': cannot normalize a zero or non-finite vector");
    }
    raw /= n;
    return StateVector(std::move(space), std::move(raw), tol);
}

StateVector StateVector::basis_state(HilbertLabel space, Eigen::Index k) {
    if (k < 0 || k >= space.dimension) {
        throw contract_error("basis_state '" + space.name + "': index " +
                             std::to_string(k) + " outside [0, " +
                             std::to_string(space.dimension) + ")");
    }
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(space.dimension);
    v[k] = Complex(1.0, 0.0);
    return StateVector(std::move(space), std::move(v));
}

HermitianOperator::HermitianOperator(HilbertLabel space, Eigen::MatrixXcd matrix,
                                     Units units, const Tolerances& tol)
    : space_(std::move(space)), matrix_(std::move(matrix)), units_(units) {
    if (matrix_.rows() != matrix_.cols()) {
        throw contract_error("HermitianOperator '" + space_.name +
                             "': matrix is not square");
    }
    if (matrix_.rows() != space_.dimension) {
        throw contract_error("HermitianOperator '" + space_.name + "': matrix dim " +
                             std::to_string(matrix_.rows()) + " vs space dim " +
                             std::to_string(space_.dimension));
    }
    const double defect = max_abs_of(matrix_ - matrix_.adjoint());
    if (defect > tol.hermiticity * (1.0 + max_abs_of(matrix_))) {
        throw contract_error("HermitianOperator '" + space_.name +
                             "': hermiticity defect " + std::to_string(defect));
    }
}

HermitianOperator HermitianOperator::identity(HilbertLabel space, Units units) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(space.dimension, space.dimension);
    return HermitianOperator(std::move(space), std::move(m), units);
}

HermitianOperator HermitianOperator::zero(HilbertLabel space, Units units) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(space.dimension, space.dimension);
    return HermitianOperator(std::move(space), std::move(m), units);
}

double HermitianOperator::max_abs() const { return max_abs_of(matrix_); }

double HermitianOperator::spectral_norm() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(matrix_,
                                                           Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw numerical_error("spectral_norm: eigensolver failed on '" +
                              space_.name + "'");
    }
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

Projector::Projector(HermitianOperator op, const Tolerances& tol)
    : op_(std::move(op)), rank_(0) {
    const Eigen::MatrixXcd& p = op_.matrix();
    const double idem = max_abs_of(p * p - p);
    if (idem > tol.projector_idempotency) {
        throw contract_error("Projector '" + op_.space().name +
                             "': idempotency defect " + std::to_string(idem));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(p, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw numerical_error("Projector '" + op_.space().name +
                              "': eigensolver failed");
    }
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
        const double lam = solver.eigenvalues()[i];
        const double dist = std::min(std::abs(lam), std::abs(lam - 1.0));
        if (dist > tol.projector_spectrum) {
            throw contract_error("Projector '" + op_.space().name +
                                 "': eigenvalue " + std::to_string(lam) +
                                 " is not in {0,1} within tolerance");
        }
        if (lam > 0.5) ++rank_;
    }
}

Projector Projector::onto_state(const StateVector& chi, const Tolerances& tol) {
    Eigen::MatrixXcd m = chi.amplitudes() * chi.amplitudes().adjoint();
    return Projector(HermitianOperator(chi.space(), std::move(m),
                                       Units::dimensionless, tol),
                     tol);
}

Projector Projector::onto_basis_indices(HilbertLabel space,
                                        const std::vector<Eigen::Index>& indices,
                                        const Tolerances& tol) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(space.dimension, space.dimension);
    for (Eigen::Index k : indices) {
        if (k < 0 || k >= space.dimension) {
            throw contract_error("Projector '" + space.name + "': basis index " +
                                 std::to_string(k) + " outside [0, " +
                                 std::to_string(space.dimension) + ")");
        }
        m(k, k) = Complex(1.0, 0.0);
    }
    return Projector(HermitianOperator(std::move(space), std::move(m),
                                       Units::dimensionless, tol),
                     tol);
}

Propagator::Propagator(const HermitianOperator& hamiltonian, const Tolerances&)
    : space_(hamiltonian.space()) {
    if (hamiltonian.units() != Units::energy) {
        throw contract_error("Propagator '" + space_.name +
                             "': generator must carry energy units");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(hamiltonian.matrix());
    if (solver.info() != Eigen::Success) {
        throw numerical_error("Propagator '" + space_.name +
                              "': eigensolver failed");
    }
    eigenvectors_ = solver.eigenvectors();
    eigenvalues_ = solver.eigenvalues();
}

StateVector Propagator::evolve(const StateVector& psi0, double t) const {
    require_same_space(space_, psi0.space(), "Propagator::evolve");
    Eigen::VectorXcd c = eigenvectors_.adjoint() * psi0.amplitudes();
    for (Eigen::Index i = 0; i < c.size(); ++i) {
        c[i] *= std::exp(Complex(0.0, -eigenvalues_[i] * t));
    }
    return StateVector(space_, eigenvectors_ * c);
}

Eigen::MatrixXcd Propagator::evolve_batch(const StateVector& psi0,
                                          const Eigen::VectorXd& times) const {
    require_same_space(space_, psi0.space(), "Propagator::evolve_batch");
    const Eigen::VectorXcd c = eigenvectors_.adjoint() * psi0.amplitudes();
    Eigen::MatrixXcd phased(c.size(), times.size());
    for (Eigen::Index k = 0; k < times.size(); ++k) {
        for (Eigen::Index i = 0; i < c.size(); ++i) {
            phased(i, k) = c[i] * std::exp(Complex(0.0, -eigenvalues_[i] * times[k]));
        }
    }
    return eigenvectors_ * phased;
}

StateVector tensor_product(const StateVector& a, const StateVector& b,
                           const Tolerances& tol) {
    check_joint_cap(a.dim(), b.dim(), tol, "tensor_product");
    HilbertLabel joint = HilbertLabel::make(a.space().name + "⊗" + b.space().name,
                                            a.dim() * b.dim());
    Eigen::VectorXcd v(joint.dimension);
    for (Eigen::Index i = 0; i < a.dim(); ++i) {
        v.segment(i * b.dim(), b.dim()) = a.amplitudes()[i] * b.amplitudes();
    }
    return StateVector(std::move(joint), std::move(v), tol);
}

HermitianOperator tensor_product(const HermitianOperator& a,
                                 const HermitianOperator& b,
                                 const Tolerances& tol) {
    check_joint_cap(a.dim(), b.dim(), tol, "tensor_product");
    HilbertLabel joint = HilbertLabel::make(a.space().name + "⊗" + b.space().name,
                                            a.dim() * b.dim());
    Eigen::MatrixXcd m(joint.dimension, joint.dimension);
    for (Eigen::Index i = 0; i < a.dim(); ++i) {
        for (Eigen::Index k = 0; k < a.dim(); ++k) {
            m.block(i * b.dim(), k * b.dim(), b.dim(), b.dim()) =
                a.matrix()(i, k) * b.matrix();
        }
    }
    Units units = Units::dimensionless;
    if (a.units() != Units::dimensionless) units = a.units();
    if (b.units() != Units::dimensionless) units = b.units();
    return HermitianOperator(std::move(joint), std::move(m), units, tol);
}

StateVector evolve(const StateVector& psi0, const HermitianOperator& hamiltonian,
                   double t, const Tolerances& tol) {
    return Propagator(hamiltonian, tol).evolve(psi0, t);
}

double expectation(const StateVector& psi, const HermitianOperator& op,
                   const Tolerances& tol) {
    require_same_space(psi.space(), op.space(), "expectation");
    const Complex val = psi.amplitudes().dot(op.matrix() * psi.amplitudes());
    if (std::abs(val.imag()) > tol.expectation_imag * (1.0 + op.max_abs())) {
        throw numerical_error("expectation on '" + psi.space().name +
                              "': imaginary residual " +
                              std::to_string(val.imag()));
    }
    return val.real();
}

double commutator_max_norm(const HermitianOperator& a, const HermitianOperator& b) {
    require_same_space(a.space(), b.space(), "commutator_max_norm");
    return max_abs_of(a.matrix() * b.matrix() - b.matrix() * a.matrix());
}

} // namespace qet
