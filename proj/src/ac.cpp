#include "nvmag/ac.hpp"

#include <cmath>
#include <stdexcept>

#include "nvmag/constants.hpp"

namespace nvmag {

void ACField::validate() const {
    if (!(omega > 0.0)) throw std::invalid_argument("ACField: omega must be positive");
    if (!(b_ac >= 0.0)) throw std::invalid_argument("ACField: amplitude must be non-negative");
}

double ACField::at(double t) const { return b_ac * std::cos(omega * t + theta); }

double EchoSequence::start_time(double omega) const {
    const double period = two_pi / omega;
    return kind == EchoType::in_phase ? 0.75 * period : 0.5 * period;
}

double EchoSequence::duration(double omega) const {
    return static_cast<double>(repetitions) * two_pi / omega;
}

double accumulated_phase(const EchoSequence& seq, const ACField& field) {
    field.validate();
    if (seq.repetitions < 1) throw std::invalid_argument("accumulated_phase: repetitions must be >= 1");
    // One cell from t0: int_{t0}^{t0+T/2} b - int_{t0+T/2}^{t0+T} b = -4 b_ac sin(omega t0 + theta) / omega.
    const double t0 = seq.start_time(field.omega);
    const double cell = -4.0 * gamma_e * field.b_ac * std::sin(field.omega * t0 + field.theta) / field.omega;
    return static_cast<double>(seq.repetitions) * cell;
}

ACReadout run_ac_pea(const PEAConfig& config, const ACField& field, const ReadoutModel& model, TrialRng& rng) {
    field.validate();
    PEAConfig cfg = config;
    cfg.t_min = two_pi / field.omega;
    ACReadout out;
    const double unit_i = accumulated_phase({EchoType::in_phase, 1}, field);
    const double unit_q = accumulated_phase({EchoType::quadrature, 1}, field);
    out.in_phase = run_pea_phase(cfg, unit_i, model, rng);
    out.quadrature = run_pea_phase(cfg, unit_q, model, rng);
    out.phi_i = out.in_phase.phi_mle;
    out.phi_q = out.quadrature.phi_mle;
    out.aliased = out.in_phase.aliased || out.quadrature.aliased;
    return out;
}

ACEstimate extract_ac_field(double phi_i, double phi_q, double omega, std::int64_t repetitions, double resolution) {
    if (!(omega > 0.0)) throw std::invalid_argument("extract_ac_field: omega must be positive");
    if (repetitions < 1) throw std::invalid_argument("extract_ac_field: repetitions must be >= 1");
    ACEstimate e;
    const double magnitude = std::hypot(phi_i, phi_q);
    e.b_est = omega * magnitude / (4.0 * static_cast<double>(repetitions) * gamma_e);
    if (magnitude <= resolution || magnitude == 0.0) {
        e.undetermined = true;
        e.theta_est = 0.0;
        return e;
    }
    e.theta_est = std::atan2(phi_q, phi_i);
    return e;
}

}  // namespace nvmag
