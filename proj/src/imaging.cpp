#include "nvmag/imaging.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "nvmag/constants.hpp"

namespace nvmag {

double species_moment(Species s) {
    switch (s) {
        case Species::electron: return 9.2847647e-24;
        case Species::proton: return 1.41060680e-26;
        case Species::carbon13: return 0.7024118 * 5.0507837e-27;
    }
    throw std::invalid_argument("species_moment: unknown species");
}

Species parse_species(std::string_view name) {
    if (name == "electron" || name == "el" || name == "e") return Species::electron;
    if (name == "proton" || name == "p" || name == "H1") return Species::proton;
    if (name == "carbon13" || name == "C13" || name == "C" || name == "13C") return Species::carbon13;
    throw std::invalid_argument("unknown species: " + std::string(name));
}

std::string_view to_string(Species s) {
    switch (s) {
        case Species::electron: return "electron";
        case Species::proton: return "proton";
        case Species::carbon13: return "carbon13";
    }
    return "?";
}

Dipole make_dipole(Species s, const Eigen::Vector3d& position, const Eigen::Vector3d& direction) {
    if (!(direction.norm() > 0.0)) throw std::invalid_argument("make_dipole: zero direction");
    return {position, species_moment(s) * direction.normalized(), s};
}

double ScanGrid::x(std::size_t i) const {
    return nx == 1 ? 0.5 * (x_min + x_max) : x_min + (x_max - x_min) * static_cast<double>(i) / (nx - 1);
}

double ScanGrid::y(std::size_t j) const {
    return ny == 1 ? 0.5 * (y_min + y_max) : y_min + (y_max - y_min) * static_cast<double>(j) / (ny - 1);
}

void DipoleScene::validate() const {
    if (std::abs(nv_axis.norm() - 1.0) > 1e-9) throw std::invalid_argument("DipoleScene: nv_axis must be unit");
    if (!(scan_height > 0.0)) throw std::invalid_argument("DipoleScene: scan_height must be positive");
    if (grid.nx == 0 || grid.ny == 0) throw std::invalid_argument("DipoleScene: empty scan grid");
}

Eigen::Vector3d dipole_field(const Eigen::Vector3d& moment, const Eigen::Vector3d& displacement) {
    const double r = displacement.norm();
    if (!(r > 0.0)) throw std::domain_error("dipole_field: zero displacement");
    const Eigen::Vector3d r_hat = displacement / r;
    return mu0_over_4pi * (3.0 * moment.dot(r_hat) * r_hat - moment) / (r * r * r);
}

Eigen::Vector3d DipoleScene::field_at(const Eigen::Vector3d& point) const {
    Eigen::Vector3d b = Eigen::Vector3d::Zero();
    for (const Dipole& d : dipoles) b += dipole_field(d.moment, point - d.position);
    return b;
}

double DipoleScene::projected_field(double x, double y) const {
    return nv_axis.dot(field_at(Eigen::Vector3d(x, y, scan_height)));
}

std::size_t Raster::count() const {
    std::size_t c = 0;
    for (auto p : pixels) c += p;
    return c;
}

void Raster::write_csv(std::ostream& os) const {
    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) os << (i ? "," : "") << int{pixels[j * nx + i]};
        os << '\n';
    }
}

void Raster::write_pgm(std::ostream& os) const {
    os << "P2\n" << nx << ' ' << ny << "\n1\n";
    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) os << (i ? " " : "") << (pixels[j * nx + i] ? 0 : 1);
        os << '\n';
    }
}

namespace {

void fill_row(const DipoleScene& scene, double target, double linewidth, std::size_t j, Raster& out) {
    const double y = scene.grid.y(j);
    for (std::size_t i = 0; i < out.nx; ++i) {
        const double b = scene.projected_field(scene.grid.x(i), y);
        out.pixels[j * out.nx + i] = std::abs(b - target) < linewidth ? 1 : 0;
    }
}

Raster empty_raster(const DipoleScene& scene, double linewidth) {
    scene.validate();
    if (!(linewidth > 0.0)) throw std::invalid_argument("resonance_contour: linewidth must be positive");
    Raster r;
    r.nx = scene.grid.nx;
    r.ny = scene.grid.ny;
    r.pixels.assign(r.nx * r.ny, 0);
    return r;
}

}  // namespace

Raster resonance_contour(const DipoleScene& scene, double target_field, double linewidth) {
    Raster r = empty_raster(scene, linewidth);
    const auto rows = static_cast<std::int64_t>(r.ny);
#pragma omp parallel for schedule(static)
    for (std::int64_t j = 0; j < rows; ++j) fill_row(scene, target_field, linewidth, static_cast<std::size_t>(j), r);
    return r;
}

Raster resonance_contour_serial(const DipoleScene& scene, double target_field, double linewidth) {
    Raster r = empty_raster(scene, linewidth);
    for (std::size_t j = 0; j < r.ny; ++j) fill_row(scene, target_field, linewidth, j, r);
    return r;
}

double field_gradient(double moment, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("field_gradient: r must be positive");
    return 3.0 * mu0_over_4pi * moment / std::pow(r, 4);
}

double resolution(double linewidth, double gradient) {
    if (!(gradient > 0.0)) throw std::invalid_argument("resolution: gradient must be positive");
    if (std::isinf(gradient)) return 0.0;
    return linewidth / gradient;
}

PositionErrorThreshold position_error_threshold(double r, double t2, double moment) {
    if (!(r > 0.0) || !(t2 > 0.0) || !(moment > 0.0)) {
        throw std::invalid_argument("position_error_threshold: inputs must be positive");
    }
    PositionErrorThreshold out;
    out.formula = 2.0 * pi * pi * std::pow(r, 4) / (3.0 * gamma_e * mu0 * moment * t2);
    const double b_max = pi / (2.0 * gamma_e * t2);
    const double grad = field_gradient(moment, r);
    out.fraction_30 = 0.3 * b_max / grad;
    out.fraction_50 = 0.5 * b_max / grad;
    return out;
}

}  // namespace nvmag
