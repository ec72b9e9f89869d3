#pragma once

#include <numbers>

namespace nvmag {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// NV electron gyromagnetic ratio, rad s^-1 T^-1 (2*pi * 28 GHz/T).
inline constexpr double gamma_e = two_pi * 28e9;

/// mu0 / 4pi in T m / A.
inline constexpr double mu0_over_4pi = 1e-7;
inline constexpr double mu0 = 4.0 * pi * mu0_over_4pi;

// Defaults used by every experiment unless overridden.
inline constexpr double default_t_min = 20e-9;
inline constexpr double default_t2_star = 1200e-9;
inline constexpr double default_alpha0 = 0.010;
inline constexpr double default_alpha1 = 0.007;

}  // namespace nvmag
