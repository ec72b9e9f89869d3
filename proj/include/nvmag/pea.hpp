#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nvmag/estimation.hpp"
#include "nvmag/readout.hpp"
#include "nvmag/rng.hpp"

namespace nvmag {

enum class PhaseSet { dual, quad, oct, var, single };
enum class Algorithm { napea, qpea };

PhaseSet parse_phase_set(std::string_view name);
std::string_view to_string(PhaseSet set);
Algorithm parse_algorithm(std::string_view name);
std::string_view to_string(Algorithm algorithm);

struct PEAConfig {
    int K = 6;          ///< bit depth
    int m_k = 4;        ///< base repetitions M_K
    int f = 4;          ///< weighting increment F
    double t_min = 20e-9;
    double t2_star = 1200e-9;
    PhaseSet phase_set = PhaseSet::oct;
    Algorithm algorithm = Algorithm::napea;
    std::size_t grid_points = 4096;
    bool keep_bits = true;

    /// Throws on K < 1, M_K < 1, F < 0, non-positive times, or QPEA with the VAR set.
    void validate() const;
    double longest_time() const;
    /// 2^(K-1) t_min above 3 T2*.
    bool exceeds_coherence() const;
};

struct PEAResult {
    std::vector<BitRecord> bits;
    double phi_true = 0.0;
    double phi_mle = 0.0;
    double b_mle = 0.0;
    std::int64_t n_resources = 0;
    double total_time = 0.0;
    LikelihoodGrid final_grid{2};
    bool aliased = false;     ///< |phi_true| > pi: the estimate folds back into (-pi, pi]
    bool degenerate = false;  ///< MLE tie between non-adjacent grid points

    // QPEA only.
    std::vector<int> voted_bits;  ///< u_1 .. u_K
    double phi_binary = 0.0;      ///< wrapped binary-fraction estimate
};

/// Table of control phases. For VAR, m is the repetition count of the stage.
std::vector<double> control_phase_set(PhaseSet set, int m = 1);

/// M(K, k) = M_K + F (K - k), listed for k = K down to 1.
std::vector<int> measurement_schedule(int K, int m_k, int f);

/// N = M_K (2^K - 1) + F (2^K - K - 1).
std::int64_t resource_count(int K, int m_k, int f);

/// Runs the algorithm in config.algorithm on the phase phi = gamma_e B t_min.
PEAResult run_pea_phase(const PEAConfig& config, double phi, const ReadoutModel& model, TrialRng& rng);

PEAResult run_napea(const PEAConfig& config, double b_ext, const ReadoutModel& model, TrialRng& rng);
PEAResult run_qpea(const PEAConfig& config, double b_ext, const ReadoutModel& model, TrialRng& rng);

/// Rebuilds the posterior from a bit trace on a grid of n_points.
LikelihoodGrid posterior_from_bits(std::span<const BitRecord> bits, const PEAConfig& config, std::size_t n_points);

struct BinaryEstimate {
    double unwrapped = 0.0;  ///< 2 pi sum_k u_k 2^-k in [0, 2 pi)
    double wrapped = 0.0;    ///< same angle in (-pi, pi]
};

/// Binary fraction 2 pi (0.u_1 u_2 ... u_K)_2, bits[0] = u_1.
BinaryEstimate qpea_binary_estimate(std::span<const int> bits);

/// Benchmark phases averaged in scaling plots.
std::vector<double> benchmark_phases();

}  // namespace nvmag
