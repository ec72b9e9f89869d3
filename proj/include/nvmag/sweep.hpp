#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nvmag/pea.hpp"
#include "nvmag/readout.hpp"

namespace nvmag {

/// One (configuration, readout, true phase) cell of a Monte-Carlo sweep.
struct SweepPoint {
    PEAConfig config;
    ReadoutModel model;
    double phi = 0.0;
};

struct TrialOutcome {
    double phi_mle = 0.0;
    double phi_binary = 0.0;  ///< QPEA only
    bool degenerate = false;
    bool aliased = false;
};

/// Runs `trials` independent PEA runs per point. Outcome index is point * trials + trial and
/// its stream is derive_trial_rng(seed, index), so results do not depend on thread count.
std::vector<TrialOutcome> run_sweep(std::span<const SweepPoint> points, std::size_t trials, std::uint64_t seed,
                                    bool parallel = true);

struct PointStats {
    double phi_true = 0.0;
    double variance = 0.0;     ///< mean wrapped squared error, rad^2
    double variance_se = 0.0;  ///< standard error of that mean
    double mean_error = 0.0;   ///< mean wrapped error
    std::int64_t n_resources = 0;
    double total_time = 0.0;   ///< N t_min kappa
};

PointStats point_stats(const SweepPoint& point, std::span<const TrialOutcome> outcomes);

/// n cell-centred phases spanning (-fraction pi, fraction pi).
std::vector<double> phase_grid(std::size_t n, double fraction = 1.0);

/// n phases -pi + 2 pi i / n; includes -pi, 0 and +-pi/2 when n is a multiple of 4.
std::vector<double> anchored_phase_grid(std::size_t n);

/// Sample standard deviation.
double sample_std(std::span<const double> values);

}  // namespace nvmag
