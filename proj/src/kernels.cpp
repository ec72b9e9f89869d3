#include "nvmag/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>

#include <omp.h>

#include "nvmag/constants.hpp"

namespace nvmag::kernels {

TrigTable::TrigTable(std::size_t n_points) : n_(n_points), cos_(2 * n_points), sin_(2 * n_points) {
    if (n_points < 2) throw std::invalid_argument("TrigTable: need at least 2 points");
    for (std::size_t m = 0; m < 2 * n_; ++m) {
        const double a = pi * static_cast<double>(m) / static_cast<double>(n_);
        cos_[m] = std::cos(a);
        sin_[m] = std::sin(a);
    }
}

std::shared_ptr<const TrigTable> TrigTable::get(std::size_t n_points) {
    static std::mutex mu;
    static std::map<std::size_t, std::shared_ptr<const TrigTable>> cache;
    std::lock_guard lock(mu);
    auto& slot = cache[n_points];
    if (!slot) slot = std::make_shared<const TrigTable>(n_points);
    return slot;
}

double accumulate_log_likelihood(std::span<double> log_w, const TrigTable& table, double sign, double decay,
                                 std::uint64_t power, double phi_control) {
    const std::size_t n = table.n_points();
    if (log_w.size() != n) throw std::invalid_argument("accumulate_log_likelihood: size mismatch");
    const std::uint64_t two_n = 2 * n;
    const std::uint64_t p = power % two_n;
    // cos(-p pi + a - Phi) = (-1)^p [cos a cos Phi + sin a sin Phi]
    const double parity = (power % 2 == 0) ? 1.0 : -1.0;
    const double kc = 0.5 * sign * decay * parity * std::cos(phi_control);
    const double ks = 0.5 * sign * decay * parity * std::sin(phi_control);
    const double* c = table.cos_table().data();
    const double* s = table.sin_table().data();

    double hi = -std::numeric_limits<double>::infinity();
    std::uint64_t m = p;            // p (2j + 1) mod 2n at j = 0
    const std::uint64_t dm = (2 * p) % two_n;
    for (std::size_t j = 0; j < n; ++j) {
        const double f = std::max(0.5 + kc * c[m] + ks * s[m], likelihood_floor);
        const double v = log_w[j] + std::log(f);
        log_w[j] = v;
        hi = std::max(hi, v);
        m += dm;
        if (m >= two_n) m -= two_n;
    }
    return hi;
}

namespace reference {

double accumulate_log_likelihood(std::span<double> log_w, double sign, double decay, std::uint64_t power,
                                 double phi_control) {
    const std::size_t n = log_w.size();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
        const double phi = -pi + two_pi * (static_cast<double>(j) + 0.5) / static_cast<double>(n);
        const double f = 0.5 * (1.0 + sign * decay * std::cos(static_cast<double>(power) * phi - phi_control));
        log_w[j] += std::log(std::max(f, likelihood_floor));
        hi = std::max(hi, log_w[j]);
    }
    return hi;
}

}  // namespace reference

int worker_count() { return omp_get_max_threads(); }

void set_worker_count(int n) {
    if (n > 0) omp_set_num_threads(n);
}

}  // namespace nvmag::kernels
