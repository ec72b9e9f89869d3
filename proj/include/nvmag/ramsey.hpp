#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nvmag/readout.hpp"
#include "nvmag/spin.hpp"

namespace nvmag {

/// P(u | phi) = [1 + (-1)^u D(t, T2*) cos(phi - Phi)] / 2.
double ramsey_probability(double phi, double phi_control, double t, double t2_star, int u);

/// <0|rho_f|0> after (pi/2)_y, free evolution, dephasing, R_z(Phi), (pi/2)_y from |0><0|,
/// computed through the density-matrix path.
double ramsey_sequence_p0(double phi, double phi_control, double t, const DephasingModel& dephasing);

enum class FringeSweep { time, field };

struct FringeSweepSpec {
    FringeSweep kind = FringeSweep::time;
    std::vector<double> values;  ///< times (s) or fields (T)
    double fixed = 0.0;          ///< field (T) for a time sweep, time (s) for a field sweep
    double phi_control = 0.0;
    double t2_star = 1200e-9;
};

struct FringePoint {
    double x = 0.0;
    double signal = 0.0;        ///< photon counts mapped onto a P0 estimate
    double std_error = 0.0;
    double bit_fraction = 0.0;  ///< fraction of thresholded bits with u = 1
    double p0_theory = 0.0;
};

/// Monte-Carlo fringe: n_avg independent readouts per grid point. Each point draws from
/// its own stream derived from (seed, point index), so the result is schedule independent.
std::vector<FringePoint> simulate_ramsey_fringe(const FringeSweepSpec& sweep, const ReadoutModel& model,
                                                std::size_t n_avg, std::uint64_t seed);

struct SinusoidFit {
    double frequency = 0.0;  ///< cycles per unit x
    double amplitude = 0.0;
    double phase = 0.0;      ///< y ~ offset + amplitude cos(2 pi f x + phase)
    double offset = 0.0;
    double rms_residual = 0.0;
};

/// Least-squares sinusoid with free amplitude, phase and offset; frequency found by a
/// dense scan over [f_lo, f_hi] followed by golden-section refinement.
SinusoidFit fit_sinusoid(std::span<const double> x, std::span<const double> y, double f_lo, double f_hi);

/// Weighted least-squares scale s of the decay envelope in
/// signal = 1/2 - s D(t) cos(2 pi f t - Phi) / 2, with its standard error.
struct EnvelopeFit {
    double scale = 0.0;
    double std_error = 0.0;
};
EnvelopeFit fit_envelope_scale(std::span<const FringePoint> fringe, double frequency, double phi_control,
                               double t2_star);

/// eta^2 in T^2/Hz with the working-point dependent kappa_th; +inf when sin(phi - Phi) = 0.
double ramsey_sensitivity(double phi, double phi_control, double t, double t2_star, double alpha0,
                          double alpha1);

/// Ideal-efficiency limit (kappa_th = 1) of eta^2 at quadrature: 1 / (gamma^2 t D^2).
double ideal_ramsey_eta_squared(double t, double t2_star);

struct OptimalRamsey {
    double t_opt = 0.0;            ///< numerical minimizer of eta^2 on (0, 3 T2*]
    double eta_numeric = 0.0;      ///< T/sqrt(Hz)
    double eta_stationary = 0.0;   ///< sqrt(2) e^{1/4} / (gamma sqrt(T2*)), from t = T2*/2
    double eta_quoted = 0.0;       ///< e^{1/2} / (gamma sqrt(T2*))
};
OptimalRamsey optimal_ramsey_sensitivity(double t2_star);

/// (pi / 2) sqrt(T / T2).
double ramsey_dynamic_range(double total_time, double coherence_time);

}  // namespace nvmag
