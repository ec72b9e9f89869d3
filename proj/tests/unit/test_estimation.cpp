#include <catch_amalgamated.hpp>

#include <algorithm>

#include "nvmag/constants.hpp"
#include "nvmag/estimation.hpp"
#include "nvmag/pea.hpp"
#include "nvmag/spin.hpp"

using namespace nvmag;
using Catch::Matchers::WithinAbs;

namespace {

double grid_max_abs_diff(const LikelihoodGrid& a, const LikelihoodGrid& b) {
    double d = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) d = std::max(d, std::abs(a.density(j) - b.density(j)));
    return d;
}

}  // namespace

TEST_CASE("wrap_phase maps into (-pi, pi]") {
    CHECK(wrap_phase(pi) == pi);
    CHECK_THAT(wrap_phase(-pi), WithinAbs(pi, 1e-15));
    CHECK_THAT(wrap_phase(3 * pi / 2), WithinAbs(-pi / 2, 1e-15));
    CHECK_THAT(wrap_phase(-7.0), WithinAbs(-7.0 + two_pi, 1e-15));
}

TEST_CASE("uniform prior") {
    const LikelihoodGrid g = uniform_prior(4096);
    for (std::size_t j = 0; j < g.size(); j += 97) CHECK_THAT(g.density(j), WithinAbs(1.0 / two_pi, 1e-12));
    CHECK_THAT(g.integral(), WithinAbs(1.0, 1e-9));
    CHECK_THAT(g.entropy(), WithinAbs(std::log(two_pi), 1e-9));
    const MleResult m = mle(g);
    CHECK(m.index == 0);
    CHECK(m.degenerate);
    CHECK_THROWS_AS(uniform_prior(1), std::invalid_argument);
    CHECK_THAT(g.phi(0), WithinAbs(-pi + pi / 4096, 1e-15));
}

TEST_CASE("single update follows the cosine likelihood shape") {
    for (int u : {0, 1}) {
        LikelihoodGrid g = uniform_prior(1024);
        bayes_update(g, u, 1, 0.0, 0.0, 1200e-9);
        const double sign = u == 0 ? 1.0 : -1.0;
        // Normalized (1 + sign cos)/2 integrates to pi.
        for (std::size_t j = 0; j < g.size(); j += 13) {
            CHECK_THAT(g.density(j), WithinAbs((1.0 + sign * std::cos(g.phi(j))) / 2.0 / pi, 1e-9));
        }
    }
    LikelihoodGrid g = uniform_prior(4096);
    bayes_update(g, 0, 1, 0.0, 0.0, 1200e-9);
    const MleResult m = mle(g);
    CHECK(std::abs(m.phi) <= g.spacing() / 2 + 1e-15);
    CHECK_FALSE(m.degenerate);
}

TEST_CASE("a second control phase breaks the symmetry") {
    LikelihoodGrid single = uniform_prior(4096);
    for (int i = 0; i < 3; ++i) bayes_update(single, 1, 2, 0.0, 20e-9, 1200e-9);
    CHECK(mle(single).degenerate);

    LikelihoodGrid g = uniform_prior(4096);
    bayes_update(g, 0, 1, 0.0, 20e-9, 1200e-9);
    bayes_update(g, 1, 1, pi / 2, 20e-9, 1200e-9);
    const MleResult m = mle(g);
    CHECK_FALSE(m.degenerate);
    // Posterior (1 + D cos)(1 - D sin) peaks at -pi/4.
    CHECK_THAT(m.phi, WithinAbs(-pi / 4, g.spacing()));
    const std::size_t n = g.size();
    double asym = 0.0;
    for (std::size_t j = 0; j < n; ++j) asym = std::max(asym, std::abs(g.density(j) - g.density(n - 1 - j)));
    CHECK(asym > 0.01);
}

TEST_CASE("full NAPEA posterior equals the brute-force product") {
    PEAConfig c;
    c.K = 5;
    c.m_k = 3;
    c.f = 2;
    const auto model = ReadoutModel::at_kappa_multiple(0.010, 0.007, 3.0);
    TrialRng rng = derive_trial_rng(17, 0);
    const PEAResult r = run_pea_phase(c, 0.77, model, rng);
    CHECK_THAT(r.final_grid.integral(), WithinAbs(1.0, 1e-9));

    const std::size_t n = r.final_grid.size();
    std::vector<double> logp(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        const double phi = -pi + two_pi * (static_cast<double>(j) + 0.5) / static_cast<double>(n);
        for (const BitRecord& b : r.bits) {
            const double p = std::ldexp(1.0, b.k_index - 1);
            const double d = DephasingModel(c.t2_star).decay(p * c.t_min);
            const double sign = b.u == 0 ? 1.0 : -1.0;
            logp[j] += std::log(std::max(0.5 * (1.0 + sign * d * std::cos(p * phi - b.phi_control)), 1e-300));
        }
    }
    const LikelihoodGrid oracle = LikelihoodGrid::from_log_weights(logp);
    CHECK(grid_max_abs_diff(oracle, r.final_grid) < 1e-9);
    const LikelihoodGrid rebuilt = posterior_from_bits(r.bits, c, n);
    CHECK(grid_max_abs_diff(rebuilt, r.final_grid) < 1e-12);
}

TEST_CASE("normalization holds after every update") {
    LikelihoodGrid g = uniform_prior(4096);
    TrialRng rng = derive_trial_rng(2, 2);
    for (int i = 0; i < 300; ++i) {
        const int k = 1 + static_cast<int>(rng() % 7);
        bayes_update(g, static_cast<int>(rng() & 1U), k, 0.3 * i, std::ldexp(20e-9, k - 1), 1200e-9);
        REQUIRE_THAT(g.integral(), WithinAbs(1.0, 1e-9));
        for (double w : g.log_weights()) REQUIRE(std::isfinite(w));
    }
}

TEST_CASE("MLE recovers an injected Gaussian bump") {
    const std::size_t n = 4096;
    std::vector<double> w(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double phi = -pi + two_pi * (j + 0.5) / n;
        const double d = wrap_phase(phi - 1.234);
        w[j] = -d * d / (2 * 0.05 * 0.05);
    }
    const LikelihoodGrid g = LikelihoodGrid::from_log_weights(w);
    CHECK(std::abs(mle(g).phi - 1.234) <= two_pi / n);
    CHECK(std::abs(mle(g, true).phi - 1.234) <= 0.1 * two_pi / n);
}

TEST_CASE("field conversion and variance") {
    CHECK(to_field(0.0, 20e-9) == 0.0);
    CHECK_THAT(to_field(0.5028, 20e-9), WithinAbs(142.9e-6, 0.05e-6));
    CHECK_THAT(to_field(pi, 20e-9), WithinAbs(893e-6, 0.5e-6));
    CHECK_THROWS(to_field(1.0, 0.0));

    CHECK(phase_variance(std::vector<double>{0.4, 0.4, 0.4}, 0.4) == 0.0);
    CHECK_THAT(phase_variance(std::vector<double>{0.4 + 0.01, 0.4 - 0.01}, 0.4), WithinAbs(1e-4, 1e-15));
    CHECK_THAT(phase_variance(std::vector<double>{pi - 0.1}, -pi + 0.1), WithinAbs(0.04, 1e-12));
}

TEST_CASE("posterior MLE converges with grid size") {
    PEAConfig c;
    const auto model = ReadoutModel::at_kappa_multiple(0.010, 0.007, 5.0);
    int bad = 0;
    for (std::uint64_t i = 0; i < 100; ++i) {
        TrialRng rng = derive_trial_rng(23, i);
        const double phi = -3.0 + 0.06 * static_cast<double>(i);
        const PEAResult r = run_pea_phase(c, phi, model, rng);
        const LikelihoodGrid fine = posterior_from_bits(r.bits, c, 8192);
        if (std::abs(wrap_phase(mle(fine).phi - r.phi_mle)) >= two_pi / 4096) ++bad;
    }
    CHECK(bad == 0);
}

TEST_CASE("secondary peaks shrink as K grows") {
    const auto model = ReadoutModel::at_kappa_multiple(0.010, 0.007, 5.0);
    std::vector<double> mean_log;
    for (int K = 2; K <= 6; ++K) {
        PEAConfig c;
        c.K = K;
        // Average log10 ratio over phases spread across the circle.
        double sum = 0.0;
        const int runs = 100;
        for (int i = 0; i < runs; ++i) {
            TrialRng rng = derive_trial_rng(29, static_cast<std::uint64_t>(K * 1000 + i));
            const double phi = -pi + two_pi * (i + 0.37) / runs;
            const double r = secondary_peak_ratio(run_pea_phase(c, phi, model, rng).final_grid);
            sum += std::log10(std::max(r, 1e-300));
        }
        mean_log.push_back(sum / runs);
    }
    for (std::size_t i = 1; i < mean_log.size(); ++i) {
        INFO("K = " << i + 2 << " mean log10 ratio " << mean_log[i] << " previous " << mean_log[i - 1]);
        CHECK(mean_log[i] < mean_log[i - 1]);
    }
}

TEST_CASE("grid CSV export") {
    LikelihoodGrid g = uniform_prior(8);
    std::ostringstream os;
    g.write_csv(os);
    const std::string s = os.str();
    CHECK(s.rfind("phi,density\n", 0) == 0);
    CHECK(std::count(s.begin(), s.end(), '\n') == 9);
}
