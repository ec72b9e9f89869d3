#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace nvmag {

using Matrix2c = Eigen::Matrix2cd;

/// 2x2 unitary acting on the sensor qubit.
class UnitaryOp {
public:
    /// Throws std::invalid_argument if u u^dagger deviates from identity by more than tol.
    static UnitaryOp from_matrix(const Matrix2c& u, double tol = 1e-12);
    static UnitaryOp identity();

    const Matrix2c& matrix() const { return u_; }
    UnitaryOp operator*(const UnitaryOp& rhs) const;
    UnitaryOp adjoint() const;

private:
    explicit UnitaryOp(const Matrix2c& u) : u_(u) {}
    Matrix2c u_;
};

/// Density operator of the pseudo-spin-1/2 sensor in the {|0>, |1>} basis.
/// Immutable: every operation returns a new state.
struct DephasingModel;

class QubitState {
public:
    static QubitState ground();  ///< |0><0|
    static QubitState excited(); ///< |1><1|
    static QubitState plus();    ///< |+><+|
    /// Validates hermiticity, trace and positivity at tolerance tol.
    static QubitState from_matrix(const Matrix2c& rho, double tol = 1e-12);

    const Matrix2c& rho() const { return rho_; }
    /// <i|rho|i> for i in {0, 1}.
    double population(int i) const { return rho_(i, i).real(); }
    double purity() const;
    bool is_valid(double tol) const;

    QubitState evolved(const UnitaryOp& u) const;

private:
    explicit QubitState(const Matrix2c& rho) : rho_(rho) {}
    friend QubitState apply_dephasing(const QubitState&, double, const DephasingModel&);
    Matrix2c rho_;
};

struct DephasingModel {
    double t2_star;  ///< seconds; +inf disables dephasing

    explicit DephasingModel(double t2);
    /// D(t) = exp(-(t/T2*)^2).
    double decay(double t) const;
};

struct DriveParams {
    double rabi_freq;   ///< rad/s
    double qubit_freq;  ///< rad/s

    DriveParams(double rabi, double qubit);
};

/// exp(-i (sigma . n) angle / 2). Axis must be a unit vector within 1e-9.
UnitaryOp rotation(const Eigen::Vector3d& axis, double angle);

/// U^power with U = |0><0| + exp(-i phi)|1><1|.
UnitaryOp phase_unitary(double phi, std::int64_t power);

/// Feedback rotation R = |0><0| + exp(i Phi)|1><1| (a z-rotation up to global phase).
UnitaryOp control_phase_unitary(double phi_control);

QubitState phase_evolution(const QubitState& state, double phi, std::int64_t power);
QubitState apply_dephasing(const QubitState& state, double t, const DephasingModel& model);

}  // namespace nvmag
