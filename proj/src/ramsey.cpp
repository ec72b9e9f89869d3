#include "nvmag/ramsey.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "nvmag/constants.hpp"

namespace nvmag {

double ramsey_probability(double phi, double phi_control, double t, double t2_star, int u) {
    if (t < 0.0) throw std::invalid_argument("ramsey_probability: negative time");
    if (u != 0 && u != 1) throw std::invalid_argument("ramsey_probability: u must be 0 or 1");
    const double d = DephasingModel(t2_star).decay(t);
    const double sign = (u == 0) ? 1.0 : -1.0;
    return 0.5 * (1.0 + sign * d * std::cos(phi - phi_control));
}

double ramsey_sequence_p0(double phi, double phi_control, double t, const DephasingModel& dephasing) {
    const Eigen::Vector3d y_axis(0, 1, 0);
    const Eigen::Vector3d z_axis(0, 0, 1);
    const UnitaryOp half_pi = rotation(y_axis, pi / 2);
    QubitState s = QubitState::ground().evolved(half_pi);
    s = phase_evolution(s, phi, 1);
    s = apply_dephasing(s, t, dephasing);
    s = s.evolved(rotation(z_axis, phi_control));
    s = s.evolved(half_pi);
    return s.population(0);
}

std::vector<FringePoint> simulate_ramsey_fringe(const FringeSweepSpec& sweep, const ReadoutModel& model,
                                                std::size_t n_avg, std::uint64_t seed) {
    if (sweep.values.empty()) throw std::invalid_argument("simulate_ramsey_fringe: empty grid");
    model.validate();
    const DephasingModel dephasing(sweep.t2_star);
    const auto n = static_cast<std::int64_t>(sweep.values.size());
    std::vector<FringePoint> out(sweep.values.size());
    const double kappa = static_cast<double>(model.kappa);
    const double span = model.projective ? 1.0 : kappa * (model.alpha0 - model.alpha1);
    const double floor = model.projective ? 0.0 : kappa * model.alpha1;

#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < n; ++i) {
        const double x = sweep.values[static_cast<std::size_t>(i)];
        const double t = sweep.kind == FringeSweep::time ? x : sweep.fixed;
        const double b = sweep.kind == FringeSweep::time ? sweep.fixed : x;
        const double phi = gamma_e * b * t;
        const double p0 = ramsey_sequence_p0(phi, sweep.phi_control, t, dephasing);

        TrialRng rng = derive_trial_rng(seed, static_cast<std::uint64_t>(i));
        double sum = 0.0;
        double sum_sq = 0.0;
        std::size_t ones = 0;
        for (std::size_t a = 0; a < n_avg; ++a) {
            const BitRecord rec = sample_bit(p0, model, rng);
            const double s = (static_cast<double>(rec.raw_counts) - floor) / span;
            sum += s;
            sum_sq += s * s;
            ones += static_cast<std::size_t>(rec.u);
        }
        FringePoint& pt = out[static_cast<std::size_t>(i)];
        pt.x = x;
        pt.p0_theory = p0;
        if (n_avg > 0) {
            const double m = static_cast<double>(n_avg);
            pt.signal = sum / m;
            const double var = n_avg > 1 ? (sum_sq - m * pt.signal * pt.signal) / (m - 1.0) : 0.0;
            pt.std_error = std::sqrt(std::max(var, 0.0) / m);
            pt.bit_fraction = static_cast<double>(ones) / m;
        }
    }
    return out;
}

namespace {

struct LinearFit {
    double offset, a, b, sse;
};

// y ~ offset + a cos(w x) + b sin(w x) by normal equations.
LinearFit fit_at(std::span<const double> x, std::span<const double> y, double f) {
    const double w = two_pi * f;
    Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
    Eigen::Vector3d aty = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < x.size(); ++i) {
        const Eigen::Vector3d row(1.0, std::cos(w * x[i]), std::sin(w * x[i]));
        ata += row * row.transpose();
        aty += row * y[i];
    }
    const Eigen::Vector3d c = ata.ldlt().solve(aty);
    double sse = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (c(0) + c(1) * std::cos(w * x[i]) + c(2) * std::sin(w * x[i]));
        sse += r * r;
    }
    return {c(0), c(1), c(2), sse};
}

}  // namespace

SinusoidFit fit_sinusoid(std::span<const double> x, std::span<const double> y, double f_lo, double f_hi) {
    if (x.size() != y.size() || x.size() < 4) throw std::invalid_argument("fit_sinusoid: need >= 4 points");
    if (!(f_hi > f_lo) || !(f_lo > 0.0)) throw std::invalid_argument("fit_sinusoid: bad frequency band");

    constexpr int scan = 2000;
    double best_f = f_lo;
    double best_sse = std::numeric_limits<double>::infinity();
    const double step = (f_hi - f_lo) / scan;
    for (int i = 0; i <= scan; ++i) {
        const double f = f_lo + step * i;
        const double sse = fit_at(x, y, f).sse;
        if (sse < best_sse) {
            best_sse = sse;
            best_f = f;
        }
    }

    // golden section on the bracketing cell
    double lo = std::max(f_lo, best_f - step);
    double hi = std::min(f_hi, best_f + step);
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = hi - g * (hi - lo);
    double d = lo + g * (hi - lo);
    double fc = fit_at(x, y, c).sse;
    double fd = fit_at(x, y, d).sse;
    for (int it = 0; it < 100 && (hi - lo) > 1e-12 * best_f; ++it) {
        if (fc < fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = fit_at(x, y, c).sse;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = fit_at(x, y, d).sse;
        }
    }
    const double f = 0.5 * (lo + hi);
    const LinearFit lf = fit_at(x, y, f);
    SinusoidFit out;
    out.frequency = f;
    out.amplitude = std::hypot(lf.a, lf.b);
    out.phase = std::atan2(-lf.b, lf.a);
    out.offset = lf.offset;
    out.rms_residual = std::sqrt(lf.sse / static_cast<double>(x.size()));
    return out;
}

EnvelopeFit fit_envelope_scale(std::span<const FringePoint> fringe, double frequency, double phi_control,
                               double t2_star) {
    const DephasingModel dephasing(t2_star);
    double num = 0.0;
    double den = 0.0;
    for (const FringePoint& p : fringe) {
        if (!(p.std_error > 0.0)) continue;
        const double w = 1.0 / (p.std_error * p.std_error);
        const double g = 0.5 * dephasing.decay(p.x) * std::cos(two_pi * frequency * p.x - phi_control);
        num += w * g * (0.5 - p.signal);
        den += w * g * g;
    }
    if (!(den > 0.0)) throw std::invalid_argument("fit_envelope_scale: no weighted points");
    return {num / den, 1.0 / std::sqrt(den)};
}

double ramsey_sensitivity(double phi, double phi_control, double t, double t2_star, double alpha0,
                          double alpha1) {
    const double d = DephasingModel(t2_star).decay(t);
    const double s = std::sin(phi - phi_control);
    const double kth = kappa_threshold(alpha0, alpha1, d * std::cos(phi - phi_control));
    const double den = gamma_e * gamma_e * t * d * d * s * s;
    if (!(den > 0.0)) return std::numeric_limits<double>::infinity();
    return kth / den;
}

double ideal_ramsey_eta_squared(double t, double t2_star) {
    const double d = DephasingModel(t2_star).decay(t);
    const double den = gamma_e * gamma_e * t * d * d;
    return den > 0.0 ? 1.0 / den : std::numeric_limits<double>::infinity();
}

OptimalRamsey optimal_ramsey_sensitivity(double t2_star) {
    // eta^2(t) is unimodal on (0, 3 T2*]; golden section on the log-free objective.
    double lo = 1e-6 * t2_star;
    double hi = 3.0 * t2_star;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = hi - g * (hi - lo);
    double d = lo + g * (hi - lo);
    double fc = ideal_ramsey_eta_squared(c, t2_star);
    double fd = ideal_ramsey_eta_squared(d, t2_star);
    for (int it = 0; it < 200; ++it) {
        if (fc < fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = ideal_ramsey_eta_squared(c, t2_star);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = ideal_ramsey_eta_squared(d, t2_star);
        }
    }
    OptimalRamsey out;
    out.t_opt = 0.5 * (lo + hi);
    out.eta_numeric = std::sqrt(ideal_ramsey_eta_squared(out.t_opt, t2_star));
    out.eta_stationary = std::sqrt(2.0) * std::exp(0.25) / (gamma_e * std::sqrt(t2_star));
    out.eta_quoted = std::exp(0.5) / (gamma_e * std::sqrt(t2_star));
    return out;
}

double ramsey_dynamic_range(double total_time, double coherence_time) {
    if (!(total_time > 0.0) || !(coherence_time > 0.0)) {
        throw std::invalid_argument("ramsey_dynamic_range: times must be positive");
    }
    return 0.5 * pi * std::sqrt(total_time / coherence_time);
}

}  // namespace nvmag
