#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace nvmag::kernels {

/// cos and sin of pi m / n for m in [0, 2n). For a cell-centred grid
/// phi_j = -pi + 2 pi (j + 1/2) / n, the angle p phi_j reduces exactly to
/// -p pi + pi m / n with m = p (2j + 1) mod 2n, so any integer power is a lookup.
class TrigTable {
public:
    explicit TrigTable(std::size_t n_points);

    /// Shared, immutable table for grid size n (built once, thread safe).
    static std::shared_ptr<const TrigTable> get(std::size_t n_points);

    std::size_t n_points() const { return n_; }
    const std::vector<double>& cos_table() const { return cos_; }
    const std::vector<double>& sin_table() const { return sin_; }

private:
    std::size_t n_;
    std::vector<double> cos_;
    std::vector<double> sin_;
};

inline constexpr double likelihood_floor = 1e-300;

/// log_w[j] += log max((1 + sign * decay * cos(power phi_j - phi_control)) / 2, 1e-300)
/// and returns max_j log_w[j] after the update. sign = +1 for u = 0, -1 for u = 1.
double accumulate_log_likelihood(std::span<double> log_w, const TrigTable& table, double sign, double decay,
                                 std::uint64_t power, double phi_control);

namespace reference {

/// Direct evaluation with std::cos on power * phi_j; kept as the test oracle for the table path.
double accumulate_log_likelihood(std::span<double> log_w, double sign, double decay, std::uint64_t power,
                                 double phi_control);

}  // namespace reference

/// Runs f(i) for i in [0, n) across OpenMP threads. Results land at index i, so the
/// output is independent of scheduling as long as f(i) is a pure function of i.
template <class R, class F>
std::vector<R> parallel_map(std::size_t n, F&& f) {
    std::vector<R> out(n);
    const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < count; ++i) {
        out[static_cast<std::size_t>(i)] = f(static_cast<std::size_t>(i));
    }
    return out;
}

template <class R, class F>
std::vector<R> serial_map(std::size_t n, F&& f) {
    std::vector<R> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
    return out;
}

/// Number of OpenMP workers currently configured.
int worker_count();
void set_worker_count(int n);

}  // namespace nvmag::kernels
