#include "nvmag/sweep.hpp"

#include <cmath>
#include <stdexcept>

#include "nvmag/constants.hpp"
#include "nvmag/kernels.hpp"

namespace nvmag {

std::vector<TrialOutcome> run_sweep(std::span<const SweepPoint> points, std::size_t trials, std::uint64_t seed,
                                    bool parallel) {
    for (const SweepPoint& p : points) {
        p.config.validate();
        p.model.validate();
    }
    const std::size_t total = points.size() * trials;
    auto one = [&](std::size_t index) {
        const SweepPoint& p = points[index / trials];
        PEAConfig cfg = p.config;
        cfg.keep_bits = false;
        TrialRng rng = derive_trial_rng(seed, index);
        const PEAResult r = run_pea_phase(cfg, p.phi, p.model, rng);
        return TrialOutcome{r.phi_mle, r.phi_binary, r.degenerate, r.aliased};
    };
    return parallel ? kernels::parallel_map<TrialOutcome>(total, one) : kernels::serial_map<TrialOutcome>(total, one);
}

PointStats point_stats(const SweepPoint& point, std::span<const TrialOutcome> outcomes) {
    if (outcomes.empty()) throw std::invalid_argument("point_stats: no outcomes");
    PointStats s;
    s.phi_true = point.phi;
    const double n = static_cast<double>(outcomes.size());
    double sum_sq = 0.0;
    double sum_q = 0.0;
    double sum_e = 0.0;
    for (const TrialOutcome& o : outcomes) {
        const double e = wrap_phase(o.phi_mle - point.phi);
        sum_e += e;
        sum_sq += e * e;
        sum_q += e * e * e * e;
    }
    s.variance = sum_sq / n;
    s.mean_error = sum_e / n;
    const double var_of_sq = outcomes.size() > 1 ? (sum_q - n * s.variance * s.variance) / (n - 1.0) : 0.0;
    s.variance_se = std::sqrt(std::max(var_of_sq, 0.0) / n);
    s.n_resources = resource_count(point.config.K, point.config.m_k, point.config.f);
    s.total_time = static_cast<double>(s.n_resources) * point.config.t_min * static_cast<double>(point.model.kappa);
    return s;
}

std::vector<double> phase_grid(std::size_t n, double fraction) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = fraction * (-pi + two_pi * (static_cast<double>(i) + 0.5) / static_cast<double>(n));
    }
    return out;
}

std::vector<double> anchored_phase_grid(std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = -pi + two_pi * static_cast<double>(i) / static_cast<double>(n);
    return out;
}

double sample_std(std::span<const double> values) {
    if (values.size() < 2) return 0.0;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

}  // namespace nvmag
