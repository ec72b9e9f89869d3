#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "nvmag/config.hpp"
#include "nvmag/spin.hpp"

namespace nvmag {

inline constexpr std::string_view toolkit_version = "0.3.0";

/// Names accepted by run_experiment.
const std::vector<std::string>& experiment_names();

/// Every recognised parameter with its default value.
Params default_params();

struct ExperimentSpec {
    std::string name;
    Params parameters = default_params();
    std::uint64_t master_seed = 1;
    std::size_t trials = 100;
    int parallelism = 0;  ///< worker count; 0 keeps the current OpenMP setting

    void validate() const;
};

using Cell = std::variant<double, std::int64_t, std::string>;

/// Per-trial records with a fixed column order.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> row);
    std::size_t column(std::string_view name) const;
    /// Numeric column values in row order.
    std::vector<double> numbers(std::string_view name) const;
    /// Header row, then one line per record. Doubles use the shortest exact round-trip form; strings are quoted.
    void write_csv(std::ostream& os) const;
    static Table read_csv(std::istream& is);
};

struct RunReport {
    ExperimentSpec spec;
    Table records;
    nlohmann::json aggregates = nlohmann::json::object();
    std::map<std::string, std::string> attachments;  ///< file suffix -> contents
    double wall_seconds = 0.0;

    nlohmann::json summary() const;
};

RunReport run_experiment(const ExperimentSpec& spec);

/// Writes <name>.csv, <name>.json and one <name>_<suffix> file per attachment.
void write_report(const RunReport& report, const std::string& out_dir);

struct BlochSiegertBound {
    double shift_factor = 1.0;      ///< 1 + Omega^2 / (4 omega0^2) at the given drive
    double max_rabi = 0.0;          ///< Omega (rad/s) where the shift factor reaches 1.01
    double t_pi = 0.0;              ///< pi / max_rabi
    double t_min_lower = 0.0;       ///< 2 pi / max_rabi, one full Rabi period
};

BlochSiegertBound bloch_siegert_bound(const DriveParams& drive);

/// Mean, unbiased variance and standard error of the mean, accumulated in order.
struct Summary {
    double mean = 0.0;
    double variance = 0.0;
    double std_error = 0.0;
    std::size_t count = 0;
};
Summary summarize(const std::vector<double>& values);

}  // namespace nvmag
