// Serial reference vs parallel/table kernels.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "nvmag/estimation.hpp"
#include "nvmag/imaging.hpp"
#include "nvmag/kernels.hpp"
#include "nvmag/pea.hpp"
#include "nvmag/sweep.hpp"

namespace {

template <class F>
double seconds(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(const char* name, double ref, double fast, double max_diff) {
    std::printf("%-28s reference %9.4f s   fast %9.4f s   speedup %6.2fx   max|diff| %.3g\n", name, ref, fast,
                ref / fast, max_diff);
}

}  // namespace

int main(int argc, char** argv) {
    const int reps = argc > 1 ? std::atoi(argv[1]) : 200;
    std::printf("workers: %d\n", nvmag::kernels::worker_count());

    {
        const std::size_t n = 4096;
        auto table = nvmag::kernels::TrigTable::get(n);
        std::vector<double> a(n, 0.0), b(n, 0.0);
        const double t_ref = seconds([&] {
            for (int r = 0; r < reps; ++r) {
                nvmag::kernels::reference::accumulate_log_likelihood(a, r % 2 ? 1.0 : -1.0, 0.9, 1u << (r % 6),
                                                                     0.1 * r);
            }
        });
        const double t_fast = seconds([&] {
            for (int r = 0; r < reps; ++r) {
                nvmag::kernels::accumulate_log_likelihood(b, *table, r % 2 ? 1.0 : -1.0, 0.9, 1u << (r % 6), 0.1 * r);
            }
        });
        double diff = 0.0;
        for (std::size_t j = 0; j < n; ++j) diff = std::max(diff, std::abs(a[j] - b[j]));
        report("likelihood update", t_ref, t_fast, diff);
    }

    {
        nvmag::PEAConfig cfg;
        const auto model = nvmag::ReadoutModel::at_kappa_multiple(0.010, 0.007, 2.0);
        std::vector<nvmag::SweepPoint> points;
        for (double phi : nvmag::phase_grid(8)) points.push_back({cfg, model, phi});
        const std::size_t trials = static_cast<std::size_t>(std::max(1, reps / 8));
        std::vector<nvmag::TrialOutcome> s, p;
        const double t_ser = seconds([&] { s = nvmag::run_sweep(points, trials, 7, false); });
        const double t_par = seconds([&] { p = nvmag::run_sweep(points, trials, 7, true); });
        double diff = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) diff = std::max(diff, std::abs(s[i].phi_mle - p[i].phi_mle));
        report("PEA trial sweep", t_ser, t_par, diff);
    }

    {
        nvmag::DipoleScene scene;
        scene.dipoles.push_back(nvmag::make_dipole(nvmag::Species::proton, {-5e-9, 0, 0}, {0, 0, 1}));
        scene.dipoles.push_back(nvmag::make_dipole(nvmag::Species::carbon13, {5e-9, 0, 0}, {0, 0, 1}));
        const double target = 2e-7 * nvmag::species_moment(nvmag::Species::proton) / 1e-24;
        nvmag::Raster rs, rp;
        const double t_ser = seconds([&] { rs = nvmag::resonance_contour_serial(scene, target); });
        const double t_par = seconds([&] { rp = nvmag::resonance_contour(scene, target); });
        report("resonance raster 256x256", t_ser, t_par, rs.pixels == rp.pixels ? 0.0 : 1.0);
    }
    return 0;
}
