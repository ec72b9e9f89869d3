#include "nvmag/harness.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "nvmag/constants.hpp"
#include "nvmag/kernels.hpp"
#include "experiments.hpp"

namespace nvmag {

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = {
        "fidelity", "ramsey",       "napea",         "qpea",    "scaling",
        "variance-profile", "field-sensitivity", "dynamic-range", "imaging", "ac",
    };
    return names;
}

Params default_params() {
    static const Params defaults = Params::parse_ini(R"ini(
[readout]
alpha0 = 0.010
alpha1 = 0.007
kappa_multiple = 5
kappa = 0
ideal = false

[pea]
algorithm = NAPEA
K = 6
m_k = 4
f = 4
t_min = 2e-8
t2_star = 1.2e-6
phase_set = OCT
grid_points = 4096
b_ext = 0
phi =
dump_bits = false
dump_grid = false

[fidelity]
kappa_multiples = 1,2,3,4,5,6,7,8,9,10

[ramsey]
sweep = time
b_ext = 1.429e-4
t_max = 1.2e-6
t_fixed = 6.4e-7
b_max = 1.2e-3
points = 121
phi_control = 0

[scaling]
k_max = 9
phases = benchmark

[variance]
phase_sets = DUAL,QUAD,OCT,VAR
phi_points = 32
grid = anchored

[field]
points = 32
range_fraction = 1.0

[dynamic_range]
t_mins = 1e-8,2e-8,4e-8,8e-8
longest = 1.28e-6
weights = 8:8,4:4
points = 16

[drive]
rabi = 6.283185307179586e8
qubit_freq = 8.796459430051421e9

[imaging]
species = proton,carbon13
positions_nm = -5 0 0,5 0 0
nv_axis = 0 0 1
height_nm = 10
window_nm = 60
pixels = 256
linewidth = 3e-11
target = proton
t2 = 0.1
distance_nm = 10

[ac]
b_ac = 1.5e-6
omega = 6.283185307179586e5
theta = 0
theta_points = 16
t2_star = inf
ideal_readout = true
)ini");
    return defaults;
}

void ExperimentSpec::validate() const {
    bool known = false;
    for (const auto& n : experiment_names()) known = known || n == name;
    if (!known) throw std::invalid_argument("unknown experiment: " + name);
    if (parallelism < 0) throw std::invalid_argument("parallelism must be >= 0");
    const Params defaults = default_params();
    for (const std::string& key : parameters.keys()) {
        if (!defaults.has(key)) throw std::invalid_argument("unknown parameter: " + key);
    }
    if (parameters.get_string("pea.algorithm") == "QPEA" && parameters.get_string("pea.phase_set") == "VAR" &&
        (name == "qpea" || name == "field-sensitivity" || name == "scaling")) {
        throw std::invalid_argument("QPEA cannot use the VAR control-phase set");
    }
}

void Table::add_row(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw std::logic_error("Table: row width does not match header");
    rows.push_back(std::move(row));
}

std::size_t Table::column(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == name) return i;
    }
    throw std::invalid_argument("Table: no column " + std::string(name));
}

std::vector<double> Table::numbers(std::string_view name) const {
    const std::size_t c = column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        if (const double* d = std::get_if<double>(&row[c])) {
            out.push_back(*d);
        } else if (const std::int64_t* i = std::get_if<std::int64_t>(&row[c])) {
            out.push_back(static_cast<double>(*i));
        } else {
            throw std::invalid_argument("Table: column " + std::string(name) + " is not numeric");
        }
    }
    return out;
}

namespace {

void write_cell(std::ostream& os, const Cell& cell) {
    if (const double* d = std::get_if<double>(&cell)) {
        char buf[64];
        const auto res = std::to_chars(buf, buf + sizeof buf, *d);
        os.write(buf, res.ptr - buf);
    } else if (const std::int64_t* i = std::get_if<std::int64_t>(&cell)) {
        os << *i;
    } else {
        // Quoted so that digit strings such as bit records stay text on read-back.
        os << '"';
        for (char c : std::get<std::string>(cell)) os << (c == '"' ? "\"\"" : std::string(1, c));
        os << '"';
    }
}

std::vector<std::string> split_csv_line(const std::string& line, std::vector<bool>& quoted) {
    std::vector<std::string> out(1);
    quoted.assign(1, false);
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (in_quotes) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                out.back() += '"';
                ++i;
            } else if (c == '"') {
                in_quotes = false;
            } else {
                out.back() += c;
            }
        } else if (c == '"') {
            in_quotes = true;
            quoted.back() = true;
        } else if (c == ',') {
            out.emplace_back();
            quoted.push_back(false);
        } else {
            out.back() += c;
        }
    }
    return out;
}

}  // namespace

void Table::write_csv(std::ostream& os) const {
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
    os << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) os << ',';
            write_cell(os, row[i]);
        }
        os << '\n';
    }
}

Table Table::read_csv(std::istream& is) {
    Table t;
    std::string line;
    if (!std::getline(is, line)) return t;
    {
        std::istringstream hs(line);
        std::string col;
        while (std::getline(hs, col, ',')) t.columns.push_back(col);
    }
    while (std::getline(is, line)) {
        std::vector<Cell> row;
        std::vector<bool> quoted;
        const std::vector<std::string> fields = split_csv_line(line, quoted);
        for (std::size_t i = 0; i < fields.size(); ++i) {
            const std::string& field = fields[i];
            double v = 0.0;
            const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
            if (!quoted[i] && res.ec == std::errc() && res.ptr == field.data() + field.size()) {
                row.emplace_back(v);
            } else {
                row.emplace_back(field);
            }
        }
        while (row.size() < t.columns.size()) row.emplace_back(std::string());
        t.rows.push_back(std::move(row));
    }
    return t;
}

Summary summarize(const std::vector<double>& values) {
    Summary s;
    s.count = values.size();
    if (values.empty()) return s;
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.variance = ss / static_cast<double>(values.size() - 1);
        s.std_error = std::sqrt(s.variance / static_cast<double>(values.size()));
    }
    return s;
}

nlohmann::json RunReport::summary() const {
    nlohmann::json j;
    j["experiment"] = spec.name;
    j["master_seed"] = spec.master_seed;
    j["trials"] = spec.trials;
    j["threads"] = spec.parallelism;
    j["toolkit_version"] = std::string(toolkit_version);
    j["wall_clock_seconds"] = wall_seconds;
    j["record_count"] = records.rows.size();
    j["readout_tie_break"] = "counts equal to the threshold are assigned u = 1";
    nlohmann::json params = nlohmann::json::object();
    for (const std::string& key : spec.parameters.keys()) params[key] = spec.parameters.get_string(key);
    j["parameters"] = params;
    j["aggregates"] = aggregates;
    return j;
}

RunReport run_experiment(const ExperimentSpec& spec) {
    spec.validate();
    if (spec.parallelism > 0) kernels::set_worker_count(spec.parallelism);

    // Overlay user parameters on the defaults so every key resolves.
    ExperimentSpec resolved = spec;
    resolved.parameters = default_params();
    resolved.parameters.merge_known(spec.parameters);

    const auto start = std::chrono::steady_clock::now();
    RunReport report;
    report.spec = resolved;
    if (resolved.trials > 0) detail::dispatch(resolved, report);
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

void write_report(const RunReport& report, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const fs::path base = fs::path(out_dir) / report.spec.name;
    {
        std::ofstream csv(base.string() + ".csv", std::ios::binary);
        report.records.write_csv(csv);
        if (!csv) throw std::runtime_error("cannot write " + base.string() + ".csv");
    }
    {
        std::ofstream js(base.string() + ".json", std::ios::binary);
        js << report.summary().dump(2) << '\n';
    }
    for (const auto& [suffix, body] : report.attachments) {
        std::ofstream f(base.string() + "_" + suffix, std::ios::binary);
        f << body;
    }
}

BlochSiegertBound bloch_siegert_bound(const DriveParams& drive) {
    BlochSiegertBound b;
    const double ratio = drive.rabi_freq / drive.qubit_freq;
    b.shift_factor = 1.0 + 0.25 * ratio * ratio;
    // 1 + x^2 / 4 = 1.01  =>  Omega / omega0 = 0.2
    b.max_rabi = 2.0 * std::sqrt(0.01) * drive.qubit_freq;
    b.t_pi = pi / b.max_rabi;
    b.t_min_lower = two_pi / b.max_rabi;
    return b;
}

}  // namespace nvmag
