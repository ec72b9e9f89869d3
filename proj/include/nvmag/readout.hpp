#pragma once

#include <cstddef>
#include <cstdint>

#include "nvmag/rng.hpp"
#include "nvmag/spin.hpp"

namespace nvmag {

/// Photon-counting readout. Each bit sums counts over kappa repeated shots and
/// compares the total against a threshold; counts >= threshold give u = 1 (|0>, bright).
struct ReadoutModel {
    double alpha0 = 0.0;       ///< mean photons per shot in |0>
    double alpha1 = 0.0;       ///< mean photons per shot in |1>
    std::int64_t kappa = 1;    ///< shots per bit
    double threshold = 0.0;    ///< counts
    bool projective = false;   ///< ideal single-shot readout: u is the projection outcome

    /// Threshold defaults to kappa (alpha0 + alpha1) / 2.
    static ReadoutModel make(double alpha0, double alpha1, std::int64_t kappa);
    /// kappa = ceil(multiple * kappa_th(alpha0, alpha1)).
    static ReadoutModel at_kappa_multiple(double alpha0, double alpha1, double multiple);
    /// Perfect photon efficiency: u = 1 exactly when the qubit projects onto |0>.
    static ReadoutModel ideal();

    void validate() const;
};

struct BitRecord {
    int u = 0;
    std::int64_t raw_counts = 0;
    int k_index = 0;
    double phi_control = 0.0;
};

/// 1 + 2 (a0 + a1) / (a0 - a1)^2: the photon-efficiency factor at the quadrature working point.
double kappa_threshold(double alpha0, double alpha1);

/// Full working-point-dependent factor, with c = D cos(phi - Phi).
double kappa_threshold(double alpha0, double alpha1, double decay_cos);

enum class SamplingPath {
    fast,      ///< Binomial(kappa, P0) projections, then one Poisson draw for the summed counts
    per_shot,  ///< kappa Bernoulli projections, each followed by its own Poisson draw
};

BitRecord sample_bit(double p0, const ReadoutModel& model, TrialRng& rng,
                     SamplingPath path = SamplingPath::fast);
BitRecord sample_bit(const QubitState& state, const ReadoutModel& model, TrialRng& rng,
                     SamplingPath path = SamplingPath::fast);

/// [P(u=1 | |0>) + P(u=0 | |1>)] / 2 from exact Poisson tail sums at the threshold.
double measurement_fidelity(const ReadoutModel& model);

/// Monte-Carlo estimate of the same quantity from `trials` preparations of each state.
struct FidelityEstimate {
    double fidelity;
    double std_error;
};
FidelityEstimate measurement_fidelity_mc(const ReadoutModel& model, std::size_t trials, TrialRng& rng);

}  // namespace nvmag
