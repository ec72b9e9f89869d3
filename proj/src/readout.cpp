#include "nvmag/readout.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <boost/math/distributions/poisson.hpp>

namespace nvmag {

ReadoutModel ReadoutModel::make(double alpha0, double alpha1, std::int64_t kappa) {
    ReadoutModel m;
    m.alpha0 = alpha0;
    m.alpha1 = alpha1;
    m.kappa = kappa;
    m.threshold = static_cast<double>(kappa) * (alpha0 + alpha1) / 2.0;
    m.validate();
    return m;
}

ReadoutModel ReadoutModel::at_kappa_multiple(double alpha0, double alpha1, double multiple) {
    if (!(multiple > 0.0)) throw std::invalid_argument("kappa multiple must be positive");
    const double kth = kappa_threshold(alpha0, alpha1);
    return make(alpha0, alpha1, static_cast<std::int64_t>(std::ceil(multiple * kth)));
}

ReadoutModel ReadoutModel::ideal() {
    ReadoutModel m;
    m.alpha0 = 1.0;
    m.alpha1 = 0.0;
    m.kappa = 1;
    m.threshold = 0.5;
    m.projective = true;
    return m;
}

void ReadoutModel::validate() const {
    if (!(alpha1 >= 0.0) || !(alpha0 >= alpha1)) {
        throw std::invalid_argument("ReadoutModel: require alpha0 >= alpha1 >= 0");
    }
    if (kappa < 1) throw std::invalid_argument("ReadoutModel: kappa must be >= 1");
    if (!std::isfinite(threshold)) throw std::invalid_argument("ReadoutModel: threshold must be finite");
}

double kappa_threshold(double alpha0, double alpha1) { return kappa_threshold(alpha0, alpha1, 0.0); }

double kappa_threshold(double alpha0, double alpha1, double decay_cos) {
    const double contrast = alpha0 - alpha1;
    // Below this the discrimination factor overflows long before it means anything.
    if (!(contrast > 1e-150 * std::max(1.0, alpha0 + alpha1))) {
        throw std::invalid_argument("kappa_threshold: states are indistinguishable (alpha0 <= alpha1)");
    }
    const double c = decay_cos;
    return 1.0 + 2.0 * (alpha0 + alpha1) / (contrast * contrast) + 2.0 * c / contrast - c * c;
}

BitRecord sample_bit(double p0, const ReadoutModel& model, TrialRng& rng, SamplingPath path) {
    p0 = std::clamp(p0, 0.0, 1.0);
    BitRecord rec;
    if (model.projective) {
        std::bernoulli_distribution proj(p0);
        rec.u = proj(rng) ? 1 : 0;
        rec.raw_counts = rec.u;
        return rec;
    }

    std::int64_t counts = 0;
    if (path == SamplingPath::fast) {
        std::binomial_distribution<std::int64_t> projections(model.kappa, p0);
        const std::int64_t n0 = projections(rng);
        const double mean = static_cast<double>(n0) * model.alpha0 +
                            static_cast<double>(model.kappa - n0) * model.alpha1;
        if (mean > 0.0) {
            std::poisson_distribution<std::int64_t> photons(mean);
            counts = photons(rng);
        }
    } else {
        std::bernoulli_distribution proj(p0);
        std::poisson_distribution<std::int64_t> bright(model.alpha0);
        std::poisson_distribution<std::int64_t> dark(model.alpha1 > 0.0 ? model.alpha1 : 1.0);
        for (std::int64_t shot = 0; shot < model.kappa; ++shot) {
            if (proj(rng)) {
                if (model.alpha0 > 0.0) counts += bright(rng);
            } else if (model.alpha1 > 0.0) {
                counts += dark(rng);
            }
        }
    }
    rec.raw_counts = counts;
    rec.u = static_cast<double>(counts) >= model.threshold ? 1 : 0;
    return rec;
}

BitRecord sample_bit(const QubitState& state, const ReadoutModel& model, TrialRng& rng, SamplingPath path) {
    return sample_bit(state.population(0), model, rng, path);
}

namespace {

// P(X >= threshold) for X ~ Poisson(mean), integer counts.
double poisson_at_or_above(double mean, double threshold) {
    const double c = std::ceil(threshold);
    if (c <= 0.0) return 1.0;
    if (mean <= 0.0) return 0.0;
    boost::math::poisson_distribution<double> dist(mean);
    return boost::math::cdf(boost::math::complement(dist, c - 1.0));
}

}  // namespace

double measurement_fidelity(const ReadoutModel& model) {
    model.validate();
    if (model.projective) return 1.0;
    const double k = static_cast<double>(model.kappa);
    const double bright_correct = poisson_at_or_above(k * model.alpha0, model.threshold);
    const double dark_correct = 1.0 - poisson_at_or_above(k * model.alpha1, model.threshold);
    return 0.5 * (bright_correct + dark_correct);
}

FidelityEstimate measurement_fidelity_mc(const ReadoutModel& model, std::size_t trials, TrialRng& rng) {
    if (trials == 0) return {0.5, 0.0};
    std::size_t bright_ok = 0;
    std::size_t dark_ok = 0;
    for (std::size_t i = 0; i < trials; ++i) {
        bright_ok += sample_bit(1.0, model, rng).u == 1;
        dark_ok += sample_bit(0.0, model, rng).u == 0;
    }
    const double n = static_cast<double>(trials);
    const double pb = static_cast<double>(bright_ok) / n;
    const double pd = static_cast<double>(dark_ok) / n;
    const double se = 0.5 * std::sqrt(pb * (1 - pb) / n + pd * (1 - pd) / n);
    return {0.5 * (pb + pd), se};
}

}  // namespace nvmag
