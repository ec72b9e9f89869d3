#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "nvmag/config.hpp"
#include "nvmag/constants.hpp"
#include "nvmag/harness.hpp"
#include "nvmag/kernels.hpp"

using namespace nvmag;
using Catch::Matchers::WithinRel;

namespace {

std::string csv_of(const Table& t) {
    std::ostringstream os;
    t.write_csv(os);
    return os.str();
}

ExperimentSpec small(const std::string& name, std::size_t trials) {
    ExperimentSpec s;
    s.name = name;
    s.trials = trials;
    s.master_seed = 2024;
    return s;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("params parse and serialise") {
    const Params p = Params::parse_ini("[pea]\nK = 5\nalgorithm = QPEA\n[ac]\nt2_star = inf\nlist = 1, 2.5,3\n");
    CHECK(p.get_int("pea.K") == 5);
    CHECK(p.get_string("pea.algorithm") == "QPEA");
    CHECK(std::isinf(p.get_double("ac.t2_star")));
    CHECK(p.get_doubles("ac.list") == std::vector<double>{1.0, 2.5, 3.0});
    CHECK(Params::parse_ini(p.to_ini()) == p);

    const Params d = default_params();
    CHECK(Params::parse_ini(d.to_ini()) == d);
    CHECK_THROWS(d.get_double("pea.algorithm"));
    CHECK_THROWS(d.get_string("pea.nonexistent"));
}

TEST_CASE("assignments and merging") {
    Params p = default_params();
    Params o;
    o.set_assignment("pea.K=3");
    o.set_assignment("readout.ideal = true");
    p.merge_known(o);
    CHECK(p.get_int("pea.K") == 3);
    CHECK(p.get_bool("readout.ideal"));
    CHECK_THROWS(o.set_assignment("no_equals_sign"));
    CHECK_THROWS(o.set_assignment("nosection=1"));

    Params bad;
    bad.set("pea.kk", "1");
    CHECK_THROWS(p.merge_known(bad));
}

TEST_CASE("table csv round trip is exact") {
    Table t;
    t.columns = {"a", "b", "c"};
    t.add_row({Cell{0.1}, Cell{std::int64_t{-7}}, Cell{std::string("0101")}});
    t.add_row({Cell{1.0 / 3.0}, Cell{std::int64_t{42}}, Cell{std::string("x")}});
    t.add_row({Cell{-2.5e-300}, Cell{std::int64_t{0}}, Cell{std::string("")}});
    std::istringstream in(csv_of(t));
    const Table r = Table::read_csv(in);
    REQUIRE(r.columns == t.columns);
    REQUIRE(r.rows.size() == t.rows.size());
    CHECK(r.numbers("a") == t.numbers("a"));
    CHECK(r.numbers("b") == t.numbers("b"));
    CHECK(csv_of(r) == csv_of(t));
    CHECK_THROWS(t.add_row({Cell{1.0}}));
    CHECK_THROWS(t.column("zz"));
    CHECK_THROWS(t.numbers("c"));
}

TEST_CASE("summarize") {
    const Summary s = summarize({1.0, 2.0, 3.0, 4.0});
    CHECK(s.mean == 2.5);
    CHECK_THAT(s.variance, WithinRel(5.0 / 3.0, 1e-15));
    CHECK_THAT(s.std_error, WithinRel(std::sqrt(5.0 / 12.0), 1e-15));
    CHECK(summarize({}).count == 0);
}

TEST_CASE("spec validation") {
    ExperimentSpec s = small("napea", 1);
    CHECK_NOTHROW(s.validate());
    s.name = "nope";
    CHECK_THROWS(run_experiment(s));
    s = small("qpea", 1);
    s.parameters.set("pea.phase_set", "VAR");
    CHECK_THROWS(run_experiment(s));
    s = small("napea", 1);
    s.parameters.set("pea.bogus", "1");
    CHECK_THROWS(run_experiment(s));
    s = small("napea", 1);
    s.parallelism = -1;
    CHECK_THROWS(run_experiment(s));
}

TEST_CASE("zero trials give an empty report") {
    const RunReport r = run_experiment(small("napea", 0));
    CHECK(r.records.rows.empty());
}

TEST_CASE("aggregates recompute from the written records") {
    ExperimentSpec s = small("napea", 40);
    s.parameters.set("pea.phi", "0.7");
    s.parameters.set("readout.kappa_multiple", "2");
    const RunReport r = run_experiment(s);

    const auto dir = std::filesystem::temp_directory_path() / "nvmag_harness_test";
    std::filesystem::remove_all(dir);
    write_report(r, dir.string());
    std::ifstream csv(dir / "napea.csv");
    const Table back = Table::read_csv(csv);
    const nlohmann::json j = nlohmann::json::parse(slurp(dir / "napea.json"));

    const std::vector<double> sq = back.numbers("sq_error_phi");
    double sum = 0.0;
    for (double v : sq) sum += v;
    CHECK(sum / static_cast<double>(sq.size()) == j["aggregates"]["phase_variance"].get<double>());
    const std::vector<double> sqb = back.numbers("sq_error_b");
    sum = 0.0;
    for (double v : sqb) sum += v;
    const double var_b = sum / static_cast<double>(sqb.size());
    CHECK(var_b == j["aggregates"]["field_variance"].get<double>());
    CHECK(var_b * j["aggregates"]["total_time"].get<double>() == j["aggregates"]["eta_squared"].get<double>());
    std::filesystem::remove_all(dir);
}

TEST_CASE("records do not depend on the worker count") {
    const int saved = kernels::worker_count();
    for (const char* name : {"napea", "qpea", "ac"}) {
        ExperimentSpec s = small(name, 12);
        s.parallelism = 1;
        const std::string one = csv_of(run_experiment(s).records);
        s.parallelism = 3;
        const std::string many = csv_of(run_experiment(s).records);
        CHECK(one == many);
        s.master_seed = 2025;
        if (std::string(name) != "ac") CHECK(csv_of(run_experiment(s).records) != one);
    }
    kernels::set_worker_count(saved);
}

TEST_CASE("bloch-siegert bound") {
    const BlochSiegertBound b = bloch_siegert_bound(DriveParams(two_pi * 100e6, two_pi * 1.4e9));
    CHECK_THAT(b.max_rabi, WithinRel(0.2 * two_pi * 1.4e9, 1e-12));
    CHECK_THAT(b.t_min_lower, WithinRel(3.57e-9, 0.01));
    CHECK_THAT(bloch_siegert_bound(DriveParams(two_pi * 100e6, two_pi * 4.3e9)).t_min_lower,
               WithinRel(1.16e-9, 0.01));
    CHECK_THAT(b.shift_factor, WithinRel(1.0 + 0.25 * (1.0 / 14.0) * (1.0 / 14.0), 1e-12));
}

TEST_CASE("every experiment runs at a tiny size") {
    for (const std::string& name : experiment_names()) {
        ExperimentSpec s = small(name, 2);
        s.parameters.set("pea.K", "2");
        s.parameters.set("scaling.k_max", "2");
        s.parameters.set("variance.phi_points", "2");
        s.parameters.set("field.points", "2");
        s.parameters.set("dynamic_range.points", "2");
        s.parameters.set("imaging.pixels", "16");
        s.parameters.set("ac.theta_points", "2");
        s.parameters.set("ramsey.points", "5");
        INFO(name);
        const RunReport r = run_experiment(s);
        CHECK(!r.records.columns.empty());
        CHECK(r.summary()["experiment"] == name);
    }
}
