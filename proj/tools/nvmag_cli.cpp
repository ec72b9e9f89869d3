#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nvmag/config.hpp"
#include "nvmag/harness.hpp"

namespace {

std::string experiment_list() {
    std::string s;
    for (const std::string& n : nvmag::experiment_names()) s += (s.empty() ? "" : ", ") + n;
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"NV-centre magnetometry simulator"};
    app.set_version_flag("--version", std::string(nvmag::toolkit_version));

    std::string experiment;
    std::string experiment_opt;
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 1;
    std::size_t trials = 100;
    int threads = 0;
    std::vector<std::string> overrides;
    bool print_config = false;
    bool list = false;

    app.add_option("name", experiment, "Experiment to run (" + experiment_list() + ")");
    app.add_option("-e,--experiment", experiment_opt, "Same as the positional argument");
    app.add_option("-c,--config", config_path, "INI file with parameter overrides")->check(CLI::ExistingFile);
    app.add_option("-s,--seed", seed, "Master seed");
    app.add_option("-n,--trials", trials, "Trials per point");
    app.add_option("-o,--out-dir", out_dir, "Directory for CSV/JSON output");
    app.add_option("-j,--threads", threads, "Worker threads (default: NVMAG_THREADS or all cores)")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--set", overrides, "Parameter override section.key=value (repeatable)");
    app.add_flag("--print-config", print_config, "Print the resolved parameters and exit");
    app.add_flag("--list", list, "List experiments and exit");

    CLI11_PARSE(app, argc, argv);

    if (list) {
        for (const std::string& n : nvmag::experiment_names()) std::cout << n << '\n';
        return 0;
    }
    if (!experiment_opt.empty()) {
        if (!experiment.empty() && experiment != experiment_opt) {
            std::cerr << "error: conflicting experiment names '" << experiment << "' and '" << experiment_opt << "'\n";
            return 2;
        }
        experiment = experiment_opt;
    }

    try {
        nvmag::Params params = nvmag::default_params();
        if (!config_path.empty()) params.merge_known(nvmag::Params::load(config_path));
        nvmag::Params cli_params;
        for (const std::string& a : overrides) cli_params.set_assignment(a);
        params.merge_known(cli_params);

        if (print_config) {
            std::cout << params.to_ini();
            return 0;
        }
        if (experiment.empty()) {
            std::cerr << "error: no experiment given; choose one of: " << experiment_list() << '\n';
            return 2;
        }
        if (threads == 0) {
            if (const char* env = std::getenv("NVMAG_THREADS")) threads = std::atoi(env);
            if (threads < 0) threads = 0;
        }

        nvmag::ExperimentSpec spec;
        spec.name = experiment;
        spec.parameters = params;
        spec.master_seed = seed;
        spec.trials = trials;
        spec.parallelism = threads;

        const nvmag::RunReport report = nvmag::run_experiment(spec);
        nvmag::write_report(report, out_dir);
        std::cout << experiment << ": " << report.records.rows.size() << " records, " << report.wall_seconds
                  << " s -> " << out_dir << '\n';
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
