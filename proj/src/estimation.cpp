#include "nvmag/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "nvmag/constants.hpp"

namespace nvmag {

double wrap_phase(double phi) {
    double w = std::remainder(phi, two_pi);  // [-pi, pi]
    if (w <= -pi) w += two_pi;
    return w;
}

LikelihoodGrid::LikelihoodGrid(std::size_t n_points) : log_w_(n_points, 0.0) {
    if (n_points < 2) throw std::invalid_argument("LikelihoodGrid: need at least 2 points");
    trig_ = kernels::TrigTable::get(n_points);
    normalize();
}

LikelihoodGrid LikelihoodGrid::from_log_weights(std::vector<double> log_weights) {
    LikelihoodGrid g(log_weights.size());
    for (double w : log_weights) {
        if (!std::isfinite(w)) throw std::invalid_argument("LikelihoodGrid: non-finite log weight");
    }
    g.log_w_ = std::move(log_weights);
    g.normalize();
    return g;
}

double LikelihoodGrid::spacing() const { return two_pi / static_cast<double>(log_w_.size()); }

double LikelihoodGrid::phi(std::size_t j) const { return -pi + spacing() * (static_cast<double>(j) + 0.5); }

double LikelihoodGrid::density(std::size_t j) const { return std::exp(log_w_[j]); }

void LikelihoodGrid::update(int u, std::uint64_t power, double decay, double phi_control) {
    const double sign = (u == 0) ? 1.0 : -1.0;
    const double hi = kernels::accumulate_log_likelihood(log_w_, *trig_, sign, decay, power, phi_control);
    for (double& w : log_w_) w -= hi;
}

void LikelihoodGrid::normalize() {
    const double hi = *std::max_element(log_w_.begin(), log_w_.end());
    double sum = 0.0;
    for (double w : log_w_) sum += std::exp(w - hi);
    const double log_z = hi + std::log(sum * spacing());
    for (double& w : log_w_) w -= log_z;
}

double LikelihoodGrid::integral() const {
    double sum = 0.0;
    for (double w : log_w_) sum += std::exp(w);
    return sum * spacing();
}

double LikelihoodGrid::entropy() const {
    LikelihoodGrid g = *this;
    g.normalize();
    double h = 0.0;
    for (double w : g.log_w_) h -= std::exp(w) * w;
    return h * spacing();
}

void LikelihoodGrid::write_csv(std::ostream& os) const {
    LikelihoodGrid g = *this;
    g.normalize();
    os << "phi,density\n";
    os.precision(17);
    for (std::size_t j = 0; j < g.size(); ++j) os << g.phi(j) << ',' << g.density(j) << '\n';
}

LikelihoodGrid uniform_prior(std::size_t n_points) { return LikelihoodGrid(n_points); }

void bayes_update(LikelihoodGrid& grid, int u, int k_index, double phi_control, double t_k, double t2_star) {
    if (k_index < 1 || k_index > 62) throw std::invalid_argument("bayes_update: k_index out of range");
    if (t_k < 0.0) throw std::invalid_argument("bayes_update: negative evolution time");
    const double decay = std::isinf(t2_star) ? 1.0 : std::exp(-(t_k / t2_star) * (t_k / t2_star));
    grid.update(u, std::uint64_t{1} << (k_index - 1), decay, phi_control);
    grid.normalize();
}

MleResult mle(const LikelihoodGrid& grid, bool refine) {
    const auto w = grid.log_weights();
    const std::size_t n = w.size();
    const double hi = *std::max_element(w.begin(), w.end());
    constexpr double tie_tol = 1e-9;

    MleResult r;
    for (std::size_t j = 0; j < n; ++j) {
        if (w[j] >= hi - tie_tol) r.maxima.push_back(j);
    }
    r.index = r.maxima.front();
    for (std::size_t j : r.maxima) {
        const std::size_t d = (j + n - r.index) % n;
        if (d > 1 && d < n - 1) r.degenerate = true;
    }
    r.phi = grid.phi(r.index);
    if (refine) {
        const double l = w[(r.index + n - 1) % n];
        const double c = w[r.index];
        const double rr = w[(r.index + 1) % n];
        const double curv = l - 2.0 * c + rr;
        if (curv < 0.0) {
            const double delta = std::clamp(0.5 * (l - rr) / curv, -0.5, 0.5);
            r.phi = wrap_phase(r.phi + delta * grid.spacing());
        }
    }
    return r;
}

double secondary_peak_ratio(const LikelihoodGrid& grid) {
    const auto w = grid.log_weights();
    const std::size_t n = w.size();
    const double hi = *std::max_element(w.begin(), w.end());
    std::size_t top = 0;
    while (w[top] < hi) ++top;
    // Walk downhill from the global peak in both directions to find its basin.
    std::size_t right = top;
    for (std::size_t steps = 0; steps < n; ++steps) {
        const std::size_t nx = (right + 1) % n;
        if (w[nx] > w[right] || nx == top) break;
        right = nx;
    }
    std::size_t left = top;
    for (std::size_t steps = 0; steps < n; ++steps) {
        const std::size_t nx = (left + n - 1) % n;
        if (w[nx] > w[left] || nx == top) break;
        left = nx;
    }
    double second = -std::numeric_limits<double>::infinity();
    for (std::size_t j = (right + 1) % n; j != left; j = (j + 1) % n) {
        const double l = w[(j + n - 1) % n];
        const double r = w[(j + 1) % n];
        if (w[j] >= l && w[j] >= r) second = std::max(second, w[j]);
    }
    if (!std::isfinite(second)) return 0.0;
    return std::exp(second - hi);
}

double to_field(double phi, double t_min) {
    if (!(t_min > 0.0)) throw std::invalid_argument("to_field: t_min must be positive");
    return phi / (gamma_e * t_min);
}

double phase_variance(std::span<const double> samples, double phi_true) {
    if (samples.empty()) throw std::invalid_argument("phase_variance: no samples");
    double acc = 0.0;
    for (double s : samples) {
        const double d = wrap_phase(s - phi_true);
        acc += d * d;
    }
    return acc / static_cast<double>(samples.size());
}

}  // namespace nvmag
