#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace nvmag {

enum class Species { electron, proton, carbon13 };

/// Magnetic moments in J/T (CODATA 2018: mu_e = 9.2847647e-24, mu_p = 1.41060680e-26,
/// mu(13C) = 0.7024118 mu_N with mu_N = 5.0507837e-27).
double species_moment(Species s);
Species parse_species(std::string_view name);
std::string_view to_string(Species s);

struct Dipole {
    Eigen::Vector3d position = Eigen::Vector3d::Zero();  ///< m
    Eigen::Vector3d moment = Eigen::Vector3d::Zero();    ///< J/T
    Species species = Species::proton;
};

/// Dipole with moment |m| of its species, pointing along `direction`.
Dipole make_dipole(Species s, const Eigen::Vector3d& position, const Eigen::Vector3d& direction);

struct ScanGrid {
    double x_min = -30e-9, x_max = 30e-9;
    double y_min = -30e-9, y_max = 30e-9;
    std::size_t nx = 256, ny = 256;

    double x(std::size_t i) const;
    double y(std::size_t j) const;
};

/// Point dipoles in the sample plane; the NV is scanned at z = scan_height.
struct DipoleScene {
    std::vector<Dipole> dipoles;
    Eigen::Vector3d nv_axis = Eigen::Vector3d::UnitZ();
    double scan_height = 10e-9;
    ScanGrid grid;

    void validate() const;
    Eigen::Vector3d field_at(const Eigen::Vector3d& point) const;
    /// NV-axis projection of the total field at scan pixel position (x, y).
    double projected_field(double x, double y) const;
};

/// (mu0 / 4 pi) [3 (m . r_hat) r_hat - m] / r^3.
Eigen::Vector3d dipole_field(const Eigen::Vector3d& moment, const Eigen::Vector3d& displacement);

struct Raster {
    std::size_t nx = 0, ny = 0;
    std::vector<std::uint8_t> pixels;  ///< row-major, j * nx + i

    bool at(std::size_t i, std::size_t j) const { return pixels[j * nx + i] != 0; }
    std::size_t count() const;
    void write_csv(std::ostream& os) const;
    /// Plain-text PGM (P2), on pixels black.
    void write_pgm(std::ostream& os) const;
};

inline constexpr double default_linewidth = 30e-12;

/// Pixel set iff |B_proj(x, y) - target| < linewidth. Rows are computed in parallel.
Raster resonance_contour(const DipoleScene& scene, double target_field, double linewidth = default_linewidth);
/// Single-threaded version of the same raster.
Raster resonance_contour_serial(const DipoleScene& scene, double target_field,
                                double linewidth = default_linewidth);

/// |grad B| = 3 (mu0 / 4 pi) m / r^4.
double field_gradient(double moment, double r);

/// linewidth / gradient.
double resolution(double linewidth, double gradient);

struct PositionErrorThreshold {
    double formula = 0.0;       ///< 2 pi^2 r^4 / (3 gamma_e mu0 m T2)
    double fraction_30 = 0.0;   ///< working-point error at 30% of B_max
    double fraction_50 = 0.0;   ///< and at 50%
};

/// NV-position error at which the working-point shift grad(B) * dr reaches B_max = pi / (2 gamma_e T2).
PositionErrorThreshold position_error_threshold(double r, double t2, double moment);

}  // namespace nvmag
