#pragma once

#include <cstdint>

#include "nvmag/pea.hpp"

namespace nvmag {

/// b(t) = b_ac cos(omega t + theta), phase-locked to the sequence trigger at t = 0.
struct ACField {
    double b_ac = 0.0;   ///< T
    double omega = 0.0;  ///< rad/s
    double theta = 0.0;  ///< rad

    void validate() const;
    double at(double t) const;
};

enum class EchoType {
    in_phase,    ///< type-I: starts 3/4 period after the trigger, picks up b_ac cos(theta)
    quadrature,  ///< type-Q: starts 1/2 period after the trigger, picks up b_ac sin(theta)
};

/// Hahn-echo unit cell of one field period: free evolution for half a period, pi pulse,
/// free evolution for the second half. p unit cells are applied back to back.
struct EchoSequence {
    EchoType kind = EchoType::in_phase;
    std::int64_t repetitions = 1;

    double start_time(double omega) const;
    double duration(double omega) const;  ///< p * 2 pi / omega
};

/// gamma_e times the signed integral of b(t) over the sequence (sign flips at each pi pulse).
/// type-I: p (4 gamma_e b_ac / omega) cos(theta); type-Q: p (4 gamma_e b_ac / omega) sin(theta).
double accumulated_phase(const EchoSequence& seq, const ACField& field);

struct ACReadout {
    PEAResult in_phase;
    PEAResult quadrature;
    double phi_i = 0.0;
    double phi_q = 0.0;
    bool aliased = false;
};

/// Two PEA runs, one per sequence type. Stage k uses 2^(k-1) echo unit cells in place of a
/// 2^(k-1)-times longer free evolution; t_min becomes the unit-cell duration 2 pi / omega.
ACReadout run_ac_pea(const PEAConfig& config, const ACField& field, const ReadoutModel& model, TrialRng& rng);

struct ACEstimate {
    double b_est = 0.0;
    double theta_est = 0.0;
    bool undetermined = false;  ///< both readouts below resolution; theta meaningless
};

/// theta = atan2(phi_Q, phi_I), b = omega sqrt(phi_I^2 + phi_Q^2) / (4 p gamma_e).
/// Readouts with magnitude below `resolution` are flagged undetermined.
ACEstimate extract_ac_field(double phi_i, double phi_q, double omega, std::int64_t repetitions = 1,
                            double resolution = 0.0);

}  // namespace nvmag
