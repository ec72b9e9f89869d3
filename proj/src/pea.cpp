#include "nvmag/pea.hpp"

#include <cmath>
#include <stdexcept>

#include "nvmag/constants.hpp"
#include "nvmag/spin.hpp"

namespace nvmag {

PhaseSet parse_phase_set(std::string_view name) {
    if (name == "DUAL" || name == "dual") return PhaseSet::dual;
    if (name == "QUAD" || name == "quad") return PhaseSet::quad;
    if (name == "OCT" || name == "oct") return PhaseSet::oct;
    if (name == "VAR" || name == "var") return PhaseSet::var;
    if (name == "SINGLE" || name == "single") return PhaseSet::single;
    throw std::invalid_argument("unknown control-phase set: " + std::string(name));
}

std::string_view to_string(PhaseSet set) {
    switch (set) {
        case PhaseSet::dual: return "DUAL";
        case PhaseSet::quad: return "QUAD";
        case PhaseSet::oct: return "OCT";
        case PhaseSet::var: return "VAR";
        case PhaseSet::single: return "SINGLE";
    }
    return "?";
}

Algorithm parse_algorithm(std::string_view name) {
    if (name == "NAPEA" || name == "napea") return Algorithm::napea;
    if (name == "QPEA" || name == "qpea") return Algorithm::qpea;
    throw std::invalid_argument("unknown algorithm: " + std::string(name));
}

std::string_view to_string(Algorithm algorithm) {
    return algorithm == Algorithm::napea ? "NAPEA" : "QPEA";
}

void PEAConfig::validate() const {
    if (K < 1 || K > 30) throw std::invalid_argument("PEAConfig: K must be in [1, 30]");
    if (m_k < 1) throw std::invalid_argument("PEAConfig: M_K must be >= 1");
    if (f < 0) throw std::invalid_argument("PEAConfig: F must be >= 0");
    if (!(t_min > 0.0)) throw std::invalid_argument("PEAConfig: t_min must be positive");
    if (!(t2_star > 0.0)) throw std::invalid_argument("PEAConfig: t2_star must be positive");
    if (grid_points < 2) throw std::invalid_argument("PEAConfig: grid needs at least 2 points");
    if (algorithm == Algorithm::qpea && phase_set == PhaseSet::var) {
        throw std::invalid_argument("PEAConfig: QPEA sets its own control phases; VAR is NAPEA only");
    }
}

double PEAConfig::longest_time() const { return std::ldexp(t_min, K - 1); }

bool PEAConfig::exceeds_coherence() const { return longest_time() > 3.0 * t2_star; }

std::vector<double> control_phase_set(PhaseSet set, int m) {
    switch (set) {
        case PhaseSet::single: return {0.0};
        case PhaseSet::dual: return {0.0, pi / 2};
        case PhaseSet::quad: return {0.0, pi / 2, pi, 3 * pi / 2};
        case PhaseSet::oct: {
            std::vector<double> out(8);
            for (int i = 0; i < 8; ++i) out[static_cast<std::size_t>(i)] = i * pi / 4;
            return out;
        }
        case PhaseSet::var: {
            if (m < 1) throw std::invalid_argument("control_phase_set: VAR needs m >= 1");
            std::vector<double> out(static_cast<std::size_t>(m));
            for (int i = 0; i < m; ++i) out[static_cast<std::size_t>(i)] = i * pi / m;
            return out;
        }
    }
    throw std::invalid_argument("control_phase_set: unknown set");
}

std::vector<int> measurement_schedule(int K, int m_k, int f) {
    if (K < 1) throw std::invalid_argument("measurement_schedule: K must be >= 1");
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(K));
    for (int k = K; k >= 1; --k) out.push_back(m_k + f * (K - k));
    return out;
}

std::int64_t resource_count(int K, int m_k, int f) {
    if (K < 1 || K > 62) throw std::invalid_argument("resource_count: K out of range");
    const std::int64_t two_k = std::int64_t{1} << K;
    return std::int64_t{m_k} * (two_k - 1) + std::int64_t{f} * (two_k - K - 1);
}

namespace {

// One measurement round: |+> -> U^power -> dephasing(t_k) -> R(Phi) -> (pi/2)_y readout pulse.
// The readout pulse maps the equatorial phase onto populations:
// <0|rho|0> = [1 - D cos(power phi - Phi)] / 2.
class RoundSimulator {
public:
    RoundSimulator(double phi, double t2_star)
        : phi_(phi), dephasing_(t2_star), readout_pulse_(rotation(Eigen::Vector3d(0, 1, 0), pi / 2)) {}

    void set_stage(std::uint64_t power, double t_k) {
        evolved_ = apply_dephasing(phase_evolution(QubitState::plus(), phi_, static_cast<std::int64_t>(power)), t_k,
                                   dephasing_);
    }

    double p0(double phi_control) const {
        return evolved_.evolved(control_phase_unitary(phi_control)).evolved(readout_pulse_).population(0);
    }

private:
    double phi_;
    DephasingModel dephasing_;
    UnitaryOp readout_pulse_;
    QubitState evolved_ = QubitState::plus();
};

double stage_decay(const PEAConfig& config, std::uint64_t power) {
    return DephasingModel(config.t2_star).decay(static_cast<double>(power) * config.t_min);
}

void finish(PEAResult& r, const PEAConfig& config, const ReadoutModel& model, LikelihoodGrid grid) {
    grid.normalize();
    const MleResult m = mle(grid);
    r.phi_mle = m.phi;
    r.degenerate = m.degenerate;
    r.b_mle = to_field(m.phi, config.t_min);
    r.n_resources = resource_count(config.K, config.m_k, config.f);
    r.total_time = static_cast<double>(r.n_resources) * config.t_min * static_cast<double>(model.kappa);
    r.aliased = std::abs(r.phi_true) > pi;
    r.final_grid = std::move(grid);
}

PEAResult run_napea_phase(const PEAConfig& config, double phi, const ReadoutModel& model, TrialRng& rng) {
    PEAResult r;
    r.phi_true = phi;
    LikelihoodGrid grid(config.grid_points);
    RoundSimulator sim(phi, config.t2_star);
    const std::vector<int> schedule = measurement_schedule(config.K, config.m_k, config.f);
    if (config.keep_bits) {
        std::size_t total = 0;
        for (int m : schedule) total += static_cast<std::size_t>(m);
        r.bits.reserve(total);
    }

    for (int k = config.K; k >= 1; --k) {
        const int reps = schedule[static_cast<std::size_t>(config.K - k)];
        const std::vector<double> phases = control_phase_set(config.phase_set, reps);
        const std::uint64_t power = std::uint64_t{1} << (k - 1);
        const double decay = stage_decay(config, power);
        sim.set_stage(power, static_cast<double>(power) * config.t_min);
        for (int m = 0; m < reps; ++m) {
            // The cycle restarts at every new k.
            const double phi_control = phases[static_cast<std::size_t>(m) % phases.size()];
            BitRecord rec = sample_bit(sim.p0(phi_control), model, rng);
            rec.k_index = k;
            rec.phi_control = phi_control;
            grid.update(rec.u, power, decay, phi_control);
            if (config.keep_bits) r.bits.push_back(rec);
        }
    }
    finish(r, config, model, std::move(grid));
    return r;
}

PEAResult run_qpea_phase(const PEAConfig& config, double phi, const ReadoutModel& model, TrialRng& rng) {
    PEAResult r;
    r.phi_true = phi;
    r.voted_bits.assign(static_cast<std::size_t>(config.K), 0);
    LikelihoodGrid grid(config.grid_points);
    RoundSimulator sim(phi, config.t2_star);
    const std::vector<int> schedule = measurement_schedule(config.K, config.m_k, config.f);

    double phi_control = 0.0;
    for (int k = config.K; k >= 1; --k) {
        const int reps = schedule[static_cast<std::size_t>(config.K - k)];
        const std::uint64_t power = std::uint64_t{1} << (k - 1);
        const double decay = stage_decay(config, power);
        sim.set_stage(power, static_cast<double>(power) * config.t_min);
        const double p0 = sim.p0(phi_control);
        int ones = 0;
        for (int m = 0; m < reps; ++m) {
            BitRecord rec = sample_bit(p0, model, rng);
            rec.k_index = k;
            rec.phi_control = phi_control;
            grid.update(rec.u, power, decay, phi_control);
            ones += rec.u;
            if (config.keep_bits) r.bits.push_back(rec);
        }
        // Majority vote; ties (even M) resolve to 0.
        r.voted_bits[static_cast<std::size_t>(k - 1)] = (2 * ones > reps) ? 1 : 0;

        // Feedback for stage k-1: Phi = pi sum_{j > k-1} u_j / 2^(j - k + 1).
        phi_control = 0.0;
        for (int j = k; j <= config.K; ++j) {
            phi_control += pi * r.voted_bits[static_cast<std::size_t>(j - 1)] / std::ldexp(1.0, j - k + 1);
        }
    }
    r.phi_binary = qpea_binary_estimate(r.voted_bits).wrapped;
    finish(r, config, model, std::move(grid));
    return r;
}

}  // namespace

PEAResult run_pea_phase(const PEAConfig& config, double phi, const ReadoutModel& model, TrialRng& rng) {
    config.validate();
    model.validate();
    return config.algorithm == Algorithm::napea ? run_napea_phase(config, phi, model, rng)
                                                : run_qpea_phase(config, phi, model, rng);
}

PEAResult run_napea(const PEAConfig& config, double b_ext, const ReadoutModel& model, TrialRng& rng) {
    if (config.algorithm != Algorithm::napea) throw std::invalid_argument("run_napea: config is not NAPEA");
    return run_pea_phase(config, gamma_e * b_ext * config.t_min, model, rng);
}

PEAResult run_qpea(const PEAConfig& config, double b_ext, const ReadoutModel& model, TrialRng& rng) {
    if (config.algorithm != Algorithm::qpea) throw std::invalid_argument("run_qpea: config is not QPEA");
    return run_pea_phase(config, gamma_e * b_ext * config.t_min, model, rng);
}

LikelihoodGrid posterior_from_bits(std::span<const BitRecord> bits, const PEAConfig& config, std::size_t n_points) {
    LikelihoodGrid grid(n_points);
    for (const BitRecord& b : bits) {
        const std::uint64_t power = std::uint64_t{1} << (b.k_index - 1);
        grid.update(b.u, power, stage_decay(config, power), b.phi_control);
    }
    grid.normalize();
    return grid;
}

BinaryEstimate qpea_binary_estimate(std::span<const int> bits) {
    double frac = 0.0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] != 0 && bits[i] != 1) throw std::invalid_argument("qpea_binary_estimate: bits must be 0 or 1");
        frac += bits[i] * std::ldexp(1.0, -static_cast<int>(i + 1));
    }
    BinaryEstimate e;
    e.unwrapped = two_pi * frac;
    e.wrapped = e.unwrapped > pi ? e.unwrapped - two_pi : e.unwrapped;
    return e;
}

std::vector<double> benchmark_phases() {
    return {pi / 9.789, pi / 7.789, pi / 5.789, pi / 3.789, pi / 1.789};
}

}  // namespace nvmag
