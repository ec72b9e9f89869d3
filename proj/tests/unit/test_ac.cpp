#include <catch_amalgamated.hpp>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <limits>

#include "nvmag/ac.hpp"
#include "nvmag/constants.hpp"

using namespace nvmag;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// gamma_e times the signed field integral: + before each pi pulse, - after it.
double quadrature_phase(const EchoSequence& seq, const ACField& f) {
    const double period = two_pi / f.omega;
    const double t0 = seq.start_time(f.omega);
    double total = 0.0;
    for (std::int64_t c = 0; c < seq.repetitions; ++c) {
        const double a = t0 + static_cast<double>(c) * period;
        auto b = [&](double t) { return f.at(t); };
        total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(b, a, a + period / 2, 15, 1e-14);
        total -= boost::math::quadrature::gauss_kronrod<double, 31>::integrate(b, a + period / 2, a + period, 15, 1e-14);
    }
    return gamma_e * total;
}

PEAConfig ideal_config() {
    PEAConfig c;
    c.t2_star = std::numeric_limits<double>::infinity();
    return c;
}

}  // namespace

TEST_CASE("closed-form echo phase matches numerical quadrature") {
    for (double theta : {-3.0, -1.2, 0.0, 0.4, 1.7, 2.5, pi}) {
        const ACField f{1.5e-6, two_pi * 1e5, theta};
        for (EchoType kind : {EchoType::in_phase, EchoType::quadrature}) {
            for (std::int64_t p : {1, 2, 4, 7}) {
                const EchoSequence seq{kind, p};
                const double closed = accumulated_phase(seq, f);
                const double numeric = quadrature_phase(seq, f);
                CHECK(std::abs(closed - numeric) <= 1e-10 * std::max(std::abs(closed), 1e-3));
            }
        }
    }
}

TEST_CASE("type-I picks up cos(theta), type-Q sin(theta)") {
    const ACField f0{1.5e-6, two_pi * 1e5, 0.0};
    const double amp = 4.0 * gamma_e * 1.5e-6 / (two_pi * 1e5);
    for (double theta : {-2.0, -0.5, 0.3, 1.1, 3.0}) {
        ACField f = f0;
        f.theta = theta;
        CHECK_THAT(accumulated_phase({EchoType::in_phase, 1}, f), WithinAbs(amp * std::cos(theta), 1e-12));
        CHECK_THAT(accumulated_phase({EchoType::quadrature, 1}, f), WithinAbs(amp * std::sin(theta), 1e-12));
    }
    ACField f = f0;
    for (double theta : {pi / 2, -pi / 2}) {
        f.theta = theta;
        CHECK_THAT(accumulated_phase({EchoType::in_phase, 1}, f), WithinAbs(0.0, 1e-12));
    }
    for (double theta : {0.0, pi}) {
        f.theta = theta;
        CHECK_THAT(accumulated_phase({EchoType::quadrature, 1}, f), WithinAbs(0.0, 1e-12));
    }
    f.theta = 0.7;
    CHECK_THAT(accumulated_phase({EchoType::in_phase, 2}, f), WithinRel(2.0 * accumulated_phase({EchoType::in_phase, 1}, f), 1e-14));
    CHECK_THROWS(accumulated_phase({EchoType::in_phase, 0}, f));
    CHECK_THROWS(accumulated_phase({EchoType::in_phase, 1}, ACField{1e-6, 0.0, 0.0}));
}

TEST_CASE("field extraction") {
    const double omega = two_pi * 1e5;
    CHECK(extract_ac_field(0.8, 0.0, omega).theta_est == 0.0);
    CHECK_THAT(extract_ac_field(0.0, 0.8, omega).theta_est, WithinAbs(pi / 2, 1e-15));
    CHECK_THAT(extract_ac_field(0.8, 0.0, omega).b_est, WithinRel(omega * 0.8 / (4 * gamma_e), 1e-15));
    CHECK(extract_ac_field(0.0, 0.0, omega).undetermined);
    CHECK(extract_ac_field(0.01, 0.01, omega, 1, 0.05).undetermined);

    const ACField f{1.5e-6, omega, 2.5};
    const ACEstimate e = extract_ac_field(accumulated_phase({EchoType::in_phase, 3}, f),
                                          accumulated_phase({EchoType::quadrature, 3}, f), omega, 3);
    CHECK_THAT(e.theta_est, WithinAbs(2.5, 1e-12));
    CHECK_THAT(e.b_est, WithinRel(1.5e-6, 1e-12));
}

TEST_CASE("ideal AC readout recovers the closed-form phases") {
    const PEAConfig c = ideal_config();
    for (int i = 0; i < 16; ++i) {
        const double theta = -pi + two_pi * (i + 1) / 16.0;
        const ACField f{1.5e-6, two_pi * 1e5, theta};
        TrialRng rng = derive_trial_rng(61, static_cast<std::uint64_t>(i));
        const ACReadout r = run_ac_pea(c, f, ReadoutModel::ideal(), rng);
        const double pi_true = accumulated_phase({EchoType::in_phase, 1}, f);
        const double pq_true = accumulated_phase({EchoType::quadrature, 1}, f);
        CHECK(std::abs(wrap_phase(r.phi_i - pi_true)) < two_pi / 64);
        CHECK(std::abs(wrap_phase(r.phi_q - pq_true)) < two_pi / 64);
        CHECK_FALSE(r.aliased);
        // t_min is replaced by the field period.
        CHECK_THAT(r.in_phase.total_time, WithinRel(r.in_phase.n_resources * 1e-5, 1e-12));
    }
}

TEST_CASE("quadrature readout is null at theta = 0") {
    const PEAConfig c = ideal_config();
    const ACField f{1.5e-6, two_pi * 1e5, 0.0};
    double sum = 0.0;
    const int n = 30;
    for (int i = 0; i < n; ++i) {
        TrialRng rng = derive_trial_rng(67, static_cast<std::uint64_t>(i));
        sum += run_ac_pea(c, f, ReadoutModel::ideal(), rng).phi_q;
    }
    CHECK(std::abs(sum / n) < two_pi / 64);
}
