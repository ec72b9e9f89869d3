#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "nvmag/kernels.hpp"

namespace nvmag {

/// Wraps an angle into (-pi, pi].
double wrap_phase(double phi);

/// Discretized posterior over (-pi, pi] on the cell-centred grid
/// phi_j = -pi + 2 pi (j + 1/2) / n. Weights are kept as logs; every update shifts
/// them so the maximum is 0, and normalize() makes sum exp(w) * dphi = 1.
class LikelihoodGrid {
public:
    explicit LikelihoodGrid(std::size_t n_points = 4096);
    static LikelihoodGrid from_log_weights(std::vector<double> log_weights);

    std::size_t size() const { return log_w_.size(); }
    double spacing() const;
    double phi(std::size_t j) const;
    std::span<const double> log_weights() const { return log_w_; }
    double density(std::size_t j) const;

    /// Multiplies in P(u | phi, k) = [1 + (-1)^u D cos(power phi - Phi)] / 2.
    void update(int u, std::uint64_t power, double decay, double phi_control);
    void normalize();

    double integral() const;
    /// Differential entropy -int p log p dphi of the normalized density.
    double entropy() const;

    /// Two columns: phi, density (normalized copy).
    void write_csv(std::ostream& os) const;

private:
    std::vector<double> log_w_;
    std::shared_ptr<const kernels::TrigTable> trig_;
};

LikelihoodGrid uniform_prior(std::size_t n_points);

/// Bayes update for stage k_index: power 2^(k-1), decay D(t_k, T2*). Leaves the grid normalized.
void bayes_update(LikelihoodGrid& grid, int u, int k_index, double phi_control, double t_k, double t2_star);

struct MleResult {
    double phi = 0.0;
    std::size_t index = 0;
    /// Another grid point, not adjacent to `index`, ties the maximum.
    bool degenerate = false;
    std::vector<std::size_t> maxima;
};

/// Grid argmax, lowest index on ties. With refine, a parabola through the
/// three log weights around the argmax shifts phi by at most half a cell.
MleResult mle(const LikelihoodGrid& grid, bool refine = false);

/// Height of the tallest local maximum other than the global one, relative to the global peak.
double secondary_peak_ratio(const LikelihoodGrid& grid);

/// B = phi / (gamma_e t_min).
double to_field(double phi, double t_min);

/// Mean of the wrapped squared deviation from phi_true.
double phase_variance(std::span<const double> samples, double phi_true);

struct EstimateStats {
    double phi_mle = 0.0;
    double b_mle = 0.0;
    double variance = 0.0;
    std::size_t sample_count = 0;
};

}  // namespace nvmag
