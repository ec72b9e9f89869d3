#include "nvmag/spin.hpp"

#include <cassert>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

namespace nvmag {

namespace {

using cd = std::complex<double>;

Matrix2c pauli_x() { return (Matrix2c() << 0, 1, 1, 0).finished(); }
Matrix2c pauli_y() { return (Matrix2c() << 0, cd(0, -1), cd(0, 1), 0).finished(); }
Matrix2c pauli_z() { return (Matrix2c() << 1, 0, 0, -1).finished(); }

}  // namespace

UnitaryOp UnitaryOp::from_matrix(const Matrix2c& u, double tol) {
    const Matrix2c defect = u * u.adjoint() - Matrix2c::Identity();
    if (defect.cwiseAbs().maxCoeff() > tol) {
        throw std::invalid_argument("UnitaryOp: matrix is not unitary");
    }
    return UnitaryOp(u);
}

UnitaryOp UnitaryOp::identity() { return UnitaryOp(Matrix2c::Identity()); }

UnitaryOp UnitaryOp::operator*(const UnitaryOp& rhs) const { return UnitaryOp(u_ * rhs.u_); }

UnitaryOp UnitaryOp::adjoint() const { return UnitaryOp(u_.adjoint()); }

QubitState QubitState::ground() { return QubitState((Matrix2c() << 1, 0, 0, 0).finished()); }
QubitState QubitState::excited() { return QubitState((Matrix2c() << 0, 0, 0, 1).finished()); }
QubitState QubitState::plus() { return QubitState((Matrix2c() << 0.5, 0.5, 0.5, 0.5).finished()); }

QubitState QubitState::from_matrix(const Matrix2c& rho, double tol) {
    QubitState s(rho);
    if (!s.is_valid(tol)) {
        throw std::invalid_argument("QubitState: not a valid density matrix");
    }
    return s;
}

double QubitState::purity() const { return (rho_ * rho_).trace().real(); }

bool QubitState::is_valid(double tol) const {
    if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > tol) return false;
    const cd tr = rho_.trace();
    if (std::abs(tr - cd(1.0)) > tol) return false;
    // Eigenvalues of a 2x2 Hermitian matrix: tr/2 +- sqrt((a-d)^2/4 + |b|^2).
    const double a = rho_(0, 0).real();
    const double d = rho_(1, 1).real();
    const double half_gap = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(rho_(0, 1)));
    const double lo = 0.5 * (a + d) - half_gap;
    if (lo < -tol) return false;
    return purity() <= 1.0 + tol;
}

QubitState QubitState::evolved(const UnitaryOp& u) const {
    QubitState out(u.matrix() * rho_ * u.matrix().adjoint());
    assert(out.is_valid(1e-10));
    return out;
}

DephasingModel::DephasingModel(double t2) : t2_star(t2) {
    if (!(t2 > 0.0)) throw std::invalid_argument("DephasingModel: t2_star must be positive");
}

double DephasingModel::decay(double t) const {
    if (std::isinf(t2_star)) return 1.0;
    const double x = t / t2_star;
    return std::exp(-x * x);
}

DriveParams::DriveParams(double rabi, double qubit) : rabi_freq(rabi), qubit_freq(qubit) {
    if (!(rabi > 0.0) || !(qubit > 0.0)) {
        throw std::invalid_argument("DriveParams: frequencies must be positive");
    }
}

UnitaryOp rotation(const Eigen::Vector3d& axis, double angle) {
    if (std::abs(axis.norm() - 1.0) > 1e-9) {
        throw std::invalid_argument("rotation: axis must be a unit vector");
    }
    const Matrix2c n_sigma = axis.x() * pauli_x() + axis.y() * pauli_y() + axis.z() * pauli_z();
    // (n.sigma)^2 = I, so the exponential has a closed form.
    const Matrix2c u = std::cos(0.5 * angle) * Matrix2c::Identity() - cd(0, 1) * std::sin(0.5 * angle) * n_sigma;
    return UnitaryOp::from_matrix(u);
}

UnitaryOp phase_unitary(double phi, std::int64_t power) {
    if (power < 0) throw std::invalid_argument("phase_unitary: power must be non-negative");
    const double total = phi * static_cast<double>(power);
    Matrix2c u = Matrix2c::Zero();
    u(0, 0) = 1.0;
    u(1, 1) = std::polar(1.0, -total);
    return UnitaryOp::from_matrix(u);
}

UnitaryOp control_phase_unitary(double phi_control) {
    Matrix2c u = Matrix2c::Zero();
    u(0, 0) = 1.0;
    u(1, 1) = std::polar(1.0, phi_control);
    return UnitaryOp::from_matrix(u);
}

QubitState phase_evolution(const QubitState& state, double phi, std::int64_t power) {
    return state.evolved(phase_unitary(phi, power));
}

QubitState apply_dephasing(const QubitState& state, double t, const DephasingModel& model) {
    if (t < 0.0) throw std::invalid_argument("apply_dephasing: negative duration");
    const double d = model.decay(t);
    Matrix2c rho = state.rho();
    rho(0, 1) *= d;
    rho(1, 0) *= d;
    return QubitState(rho);
}

}  // namespace nvmag
