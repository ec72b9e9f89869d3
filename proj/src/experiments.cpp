#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include "nvmag/ac.hpp"
#include "nvmag/constants.hpp"
#include "nvmag/imaging.hpp"
#include "nvmag/kernels.hpp"
#include "nvmag/pea.hpp"
#include "nvmag/ramsey.hpp"
#include "nvmag/readout.hpp"
#include "nvmag/sweep.hpp"

namespace nvmag::detail {
namespace {

using nlohmann::json;
using I = std::int64_t;

ReadoutModel readout_from(const Params& p) {
    if (p.get_bool("readout.ideal")) return ReadoutModel::ideal();
    const double a0 = p.get_double("readout.alpha0");
    const double a1 = p.get_double("readout.alpha1");
    const long long kappa = p.get_int("readout.kappa");
    ReadoutModel m = kappa > 0 ? ReadoutModel::make(a0, a1, kappa)
                               : ReadoutModel::at_kappa_multiple(a0, a1, p.get_double("readout.kappa_multiple"));
    m.validate();
    return m;
}

PEAConfig pea_from(const Params& p) {
    PEAConfig c;
    c.algorithm = parse_algorithm(p.get_string("pea.algorithm"));
    c.K = static_cast<int>(p.get_int("pea.K"));
    c.m_k = static_cast<int>(p.get_int("pea.m_k"));
    c.f = static_cast<int>(p.get_int("pea.f"));
    c.t_min = p.get_double("pea.t_min");
    c.t2_star = p.get_double("pea.t2_star");
    c.phase_set = parse_phase_set(p.get_string("pea.phase_set"));
    c.grid_points = static_cast<std::size_t>(p.get_int("pea.grid_points"));
    c.keep_bits = false;
    c.validate();
    return c;
}

double true_phase(const Params& p, const PEAConfig& c) {
    if (!p.get_string("pea.phi").empty()) return p.get_double("pea.phi");
    return gamma_e * p.get_double("pea.b_ext") * c.t_min;
}

json readout_json(const ReadoutModel& m) {
    json j;
    j["projective"] = m.projective;
    if (!m.projective) {
        j["alpha0"] = m.alpha0;
        j["alpha1"] = m.alpha1;
        j["kappa"] = m.kappa;
        j["threshold"] = m.threshold;
        j["kappa_th"] = kappa_threshold(m.alpha0, m.alpha1);
        j["fidelity"] = measurement_fidelity(m);
    }
    return j;
}

json config_json(const PEAConfig& c) {
    json j;
    j["algorithm"] = std::string(to_string(c.algorithm));
    j["K"] = c.K;
    j["m_k"] = c.m_k;
    j["f"] = c.f;
    j["t_min"] = c.t_min;
    j["t2_star"] = c.t2_star;
    j["phase_set"] = std::string(to_string(c.phase_set));
    j["grid_points"] = c.grid_points;
    j["n_resources"] = resource_count(c.K, c.m_k, c.f);
    j["exceeds_coherence"] = c.exceeds_coherence();
    return j;
}

// Mean of consecutive blocks of `block` values, accumulated in order.
std::vector<double> block_means(const std::vector<double>& v, std::size_t block) {
    std::vector<double> out;
    for (std::size_t start = 0; start + block <= v.size(); start += block) {
        double s = 0.0;
        for (std::size_t i = start; i < start + block; ++i) s += v[i];
        out.push_back(s / static_cast<double>(block));
    }
    return out;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double total_time(const PEAConfig& c, const ReadoutModel& m) {
    return static_cast<double>(resource_count(c.K, c.m_k, c.f)) * c.t_min * static_cast<double>(m.kappa);
}

std::string bits_string(const std::vector<int>& bits) {
    std::string s;
    for (int b : bits) s.push_back(b ? '1' : '0');
    return s;
}

// ---------------------------------------------------------------------------

void run_fidelity(const ExperimentSpec& spec, RunReport& report) {
    const Params& p = spec.parameters;
    const double a0 = p.get_double("readout.alpha0");
    const double a1 = p.get_double("readout.alpha1");
    const std::vector<double> multiples = p.get_doubles("fidelity.kappa_multiples");
    struct Row {
        ReadoutModel model;
        double analytic;
        FidelityEstimate mc;
    };
    const auto rows = kernels::parallel_map<Row>(multiples.size(), [&](std::size_t i) {
        const ReadoutModel m = ReadoutModel::at_kappa_multiple(a0, a1, multiples[i]);
        TrialRng rng = derive_trial_rng(spec.master_seed, i);
        return Row{m, measurement_fidelity(m), measurement_fidelity_mc(m, spec.trials, rng)};
    });
    report.records.columns = {"kappa_multiple", "kappa", "threshold", "fidelity_analytic", "fidelity_mc",
                              "fidelity_mc_se"};
    for (std::size_t i = 0; i < rows.size(); ++i) {
        report.records.add_row({multiples[i], I{rows[i].model.kappa}, rows[i].model.threshold, rows[i].analytic,
                                rows[i].mc.fidelity, rows[i].mc.std_error});
    }
    report.aggregates["kappa_th"] = kappa_threshold(a0, a1);
    report.aggregates["alpha0"] = a0;
    report.aggregates["alpha1"] = a1;
}

void run_ramsey(const ExperimentSpec& spec, RunReport& report) {
    const Params& p = spec.parameters;
    const ReadoutModel model = readout_from(p);
    const auto n = static_cast<std::size_t>(p.get_int("ramsey.points"));
    if (n < 4) throw std::invalid_argument("ramsey.points must be >= 4");
    FringeSweepSpec sweep;
    sweep.phi_control = p.get_double("ramsey.phi_control");
    sweep.t2_star = p.get_double("pea.t2_star");
    double expected_f = 0.0;
    const std::string kind = p.get_string("ramsey.sweep");
    if (kind == "time") {
        sweep.kind = FringeSweep::time;
        sweep.fixed = p.get_double("ramsey.b_ext");
        const double t_max = p.get_double("ramsey.t_max");
        for (std::size_t i = 0; i < n; ++i) sweep.values.push_back(t_max * static_cast<double>(i) / double(n - 1));
        expected_f = gamma_e * std::abs(sweep.fixed) / two_pi;
    } else if (kind == "field") {
        sweep.kind = FringeSweep::field;
        sweep.fixed = p.get_double("ramsey.t_fixed");
        const double b_max = p.get_double("ramsey.b_max");
        for (std::size_t i = 0; i < n; ++i) {
            sweep.values.push_back(-b_max + 2.0 * b_max * static_cast<double>(i) / double(n - 1));
        }
        expected_f = gamma_e * sweep.fixed / two_pi;
    } else {
        throw std::invalid_argument("ramsey.sweep must be time or field");
    }

    const auto fringe = simulate_ramsey_fringe(sweep, model, spec.trials, spec.master_seed);
    report.records.columns = {kind == "time" ? "t" : "b", "signal", "std_error", "bit_fraction", "p0_theory"};
    std::vector<double> xs, ys;
    for (const FringePoint& f : fringe) {
        report.records.add_row({f.x, f.signal, f.std_error, f.bit_fraction, f.p0_theory});
        xs.push_back(f.x);
        ys.push_back(f.signal);
    }
    json agg;
    agg["expected_frequency"] = expected_f;
    if (expected_f > 0.0) {
        const SinusoidFit fit = fit_sinusoid(xs, ys, 0.5 * expected_f, 1.5 * expected_f);
        agg["fit_frequency"] = fit.frequency;
        agg["fit_amplitude"] = fit.amplitude;
        agg["fit_phase"] = fit.phase;
        agg["fit_offset"] = fit.offset;
        agg["fit_rms_residual"] = fit.rms_residual;
        agg["frequency_relative_error"] = std::abs(fit.frequency - expected_f) / expected_f;
        if (sweep.kind == FringeSweep::time) {
            const EnvelopeFit env = fit_envelope_scale(fringe, expected_f, sweep.phi_control, sweep.t2_star);
            agg["envelope_scale"] = env.scale;
            agg["envelope_scale_se"] = env.std_error;
        }
    }
    const OptimalRamsey opt = optimal_ramsey_sensitivity(sweep.t2_star);
    agg["optimal_t"] = opt.t_opt;
    agg["eta_numeric"] = opt.eta_numeric;
    agg["eta_stationary"] = opt.eta_stationary;
    agg["eta_quoted"] = opt.eta_quoted;
    agg["readout"] = readout_json(model);
    report.aggregates = agg;
}

void run_single_pea(const ExperimentSpec& spec, RunReport& report, Algorithm algorithm) {
    const Params& p = spec.parameters;
    PEAConfig cfg = pea_from(p);
    cfg.algorithm = algorithm;
    cfg.validate();
    const ReadoutModel model = readout_from(p);
    const double phi = true_phase(p, cfg);
    const double b_true = to_field(phi, cfg.t_min);
    const bool dump_bits = p.get_bool("pea.dump_bits");

    struct Out {
        TrialOutcome o;
        std::string bits;
        std::vector<BitRecord> trace;
    };
    const auto outs = kernels::parallel_map<Out>(spec.trials, [&](std::size_t i) {
        PEAConfig c = cfg;
        c.keep_bits = dump_bits;
        TrialRng rng = derive_trial_rng(spec.master_seed, i);
        PEAResult r = run_pea_phase(c, phi, model, rng);
        return Out{TrialOutcome{r.phi_mle, r.phi_binary, r.degenerate, r.aliased}, bits_string(r.voted_bits),
                   std::move(r.bits)};
    });

    Table& t = report.records;
    t.columns = {"trial", "phi_true", "b_ext", "phi_mle", "b_mle", "sq_error_phi", "sq_error_b", "degenerate"};
    if (algorithm == Algorithm::qpea) {
        t.columns.push_back("phi_binary");
        t.columns.push_back("bits");
    }
    for (std::size_t i = 0; i < outs.size(); ++i) {
        const TrialOutcome& o = outs[i].o;
        const double e = wrap_phase(o.phi_mle - phi);
        const double b_mle = to_field(o.phi_mle, cfg.t_min);
        std::vector<Cell> row{I(i), phi, b_true, o.phi_mle, b_mle, e * e, (b_mle - b_true) * (b_mle - b_true),
                              I{o.degenerate ? 1 : 0}};
        if (algorithm == Algorithm::qpea) {
            row.emplace_back(o.phi_binary);
            row.emplace_back(outs[i].bits);
        }
        t.add_row(std::move(row));
    }

    const double T = total_time(cfg, model);
    const Summary b = summarize(t.numbers("b_mle"));
    const double var_phi = mean_of(t.numbers("sq_error_phi"));
    const double var_b = mean_of(t.numbers("sq_error_b"));
    json agg;
    agg["config"] = config_json(cfg);
    agg["readout"] = readout_json(model);
    agg["phi_true"] = phi;
    agg["b_true"] = b_true;
    agg["aliased"] = std::abs(phi) > pi;
    agg["b_mean"] = b.mean;
    agg["b_std_error"] = b.std_error;
    agg["phase_variance"] = var_phi;
    agg["field_variance"] = var_b;
    agg["total_time"] = T;
    agg["eta_squared"] = var_b * T;
    agg["degenerate_count"] = static_cast<std::size_t>(std::count_if(
        outs.begin(), outs.end(), [](const Out& o) { return o.o.degenerate; }));

    // 128-bin histogram of the estimate over (-pi, pi].
    std::vector<std::size_t> hist(128, 0);
    for (const Out& o : outs) {
        auto bin = static_cast<std::size_t>((o.o.phi_mle + pi) / two_pi * 128.0);
        hist[std::min<std::size_t>(bin, 127)]++;
    }
    agg["phi_mle_histogram"] = hist;

    if (algorithm == Algorithm::qpea) {
        std::vector<double> binary = t.numbers("phi_binary");
        agg["binary_phase_variance"] = phase_variance(binary, phi);
    }
    report.aggregates = agg;

    if (dump_bits) {
        std::ostringstream os;
        os << "trial,index,k,u,counts,phi_control\n";
        for (std::size_t i = 0; i < outs.size(); ++i) {
            for (std::size_t j = 0; j < outs[i].trace.size(); ++j) {
                const BitRecord& r = outs[i].trace[j];
                os << i << ',' << j << ',' << r.k_index << ',' << r.u << ',' << r.raw_counts << ','
                   << r.phi_control << '\n';
            }
        }
        report.attachments["bits.csv"] = os.str();
    }
    if (p.get_bool("pea.dump_grid")) {
        // Trial 0 rerun on its own stream reproduces the same final posterior.
        TrialRng rng = derive_trial_rng(spec.master_seed, 0);
        PEAConfig c = cfg;
        const PEAResult r = run_pea_phase(c, phi, model, rng);
        std::ostringstream os;
        r.final_grid.write_csv(os);
        report.attachments["grid.csv"] = os.str();
    }
}

std::vector<double> scaling_phases(const Params& p) {
    if (p.get_string("scaling.phases") == "benchmark") return benchmark_phases();
    return p.get_doubles("scaling.phases");
}

void run_scaling(const ExperimentSpec& spec, RunReport& report) {
    const Params& p = spec.parameters;
    const PEAConfig base = pea_from(p);
    const ReadoutModel model = readout_from(p);
    const int k_max = static_cast<int>(p.get_int("scaling.k_max"));
    if (k_max < 1) throw std::invalid_argument("scaling.k_max must be >= 1");
    const std::vector<double> phases = scaling_phases(p);

    std::vector<SweepPoint> points;
    for (int K = 1; K <= k_max; ++K) {
        PEAConfig c = base;
        c.K = K;
        for (double phi : phases) points.push_back({c, model, phi});
    }
    const auto outcomes = run_sweep(points, spec.trials, spec.master_seed);

    Table& t = report.records;
    t.columns = {"K", "n_resources", "phase_index", "phi_true", "trial", "phi_mle", "sq_error"};
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const SweepPoint& pt = points[i / spec.trials];
        const double e = wrap_phase(outcomes[i].phi_mle - pt.phi);
        t.add_row({I{pt.config.K}, resource_count(pt.config.K, pt.config.m_k, pt.config.f),
                   I(i / spec.trials % phases.size()), pt.phi, I(i % spec.trials), outcomes[i].phi_mle, e * e});
    }

    const std::vector<double> per_point = block_means(t.numbers("sq_error"), spec.trials);
    json rows = json::array();
    double c_sql = 0.0, c_heis = 0.0;
    for (int K = 1; K <= k_max; ++K) {
        std::vector<double> v(per_point.begin() + (K - 1) * phases.size(), per_point.begin() + K * phases.size());
        const double var = mean_of(v);
        const auto N = static_cast<double>(resource_count(K, base.m_k, base.f));
        if (K == 1) {
            c_sql = var * N;
            c_heis = var * N * N;
        }
        json r;
        r["K"] = K;
        r["n_resources"] = N;
        r["variance"] = var;
        r["variance_times_n"] = var * N;
        r["variance_times_n2"] = var * N * N;
        r["sql_reference"] = c_sql / N;
        r["heisenberg_reference"] = c_heis / (N * N);
        r["total_time"] = N * base.t_min * static_cast<double>(model.kappa);
        rows.push_back(r);
    }
    report.aggregates["config"] = config_json(base);
    report.aggregates["readout"] = readout_json(model);
    report.aggregates["phases"] = phases;
    report.aggregates["by_K"] = rows;
}

void run_variance_profile(const ExperimentSpec& spec, RunReport& report) {
    const Params& p = spec.parameters;
    const PEAConfig base = pea_from(p);
    const ReadoutModel model = readout_from(p);
    const auto n_phi = static_cast<std::size_t>(p.get_int("variance.phi_points"));
    const std::string grid = p.get_string("variance.grid");
    if (grid != "anchored" && grid != "centred") throw std::invalid_argument("variance.grid must be anchored or centred");
    const std::vector<double> phis = grid == "anchored" ? anchored_phase_grid(n_phi) : phase_grid(n_phi);

    std::vector<PhaseSet> sets;
    json skipped = json::array();
    for (const std::string& name : p.get_strings("variance.phase_sets")) {
        const PhaseSet s = parse_phase_set(name);
        if (s == PhaseSet::var && base.algorithm == Algorithm::qpea) {
            skipped.push_back(name);
            continue;
        }
        sets.push_back(s);
    }
    std::vector<SweepPoint> points;
    for (PhaseSet s : sets) {
        PEAConfig c = base;
        c.phase_set = s;
        for (double phi : phis) points.push_back({c, model, phi});
    }
    const auto outcomes = run_sweep(points, spec.trials, spec.master_seed);

    Table& t = report.records;
    t.columns = {"phase_set", "phi_index", "phi_true", "trial", "phi_mle", "sq_error"};
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const SweepPoint& pt = points[i / spec.trials];
        const double e = wrap_phase(outcomes[i].phi_mle - pt.phi);
        t.add_row({std::string(to_string(pt.config.phase_set)), I(i / spec.trials % n_phi), pt.phi,
                   I(i % spec.trials), outcomes[i].phi_mle, e * e});
    }
    const std::vector<double> per_point = block_means(t.numbers("sq_error"), spec.trials);
    json by_set = json::object();
    for (std::size_t s = 0; s < sets.size(); ++s) {
        std::vector<double> v(per_point.begin() + s * n_phi, per_point.begin() + (s + 1) * n_phi);
        json j;
        j["variance"] = v;
        j["mean_variance"] = mean_of(v);
        j["sigma"] = sample_std(v);
        by_set[std::string(to_string(sets[s]))] = j;
    }
    report.aggregates["config"] = config_json(base);
    report.aggregates["readout"] = readout_json(model);
    report.aggregates["phi"] = phis;
    report.aggregates["by_set"] = by_set;
    report.aggregates["skipped"] = skipped;
}

struct FieldPoints {
    std::vector<double> fields;
    std::vector<SweepPoint> points;
};

FieldPoints field_points(const PEAConfig& c, const ReadoutModel& m, std::size_t n, double fraction) {
    FieldPoints fp;
    for (double phi : phase_grid(n, fraction)) {
        fp.fields.push_back(to_field(phi, c.t_min));
        fp.points.push_back({c, m, phi});
    }
    return fp;
}

void run_field_sensitivity(const ExperimentSpec& spec, RunReport& report) {
    const Params& p = spec.parameters;
    const PEAConfig cfg = pea_from(p);
    const ReadoutModel model = readout_from(p);
    const auto n = static_cast<std::size_t>(p.get_int("field.points"));
    const FieldPoints fp = field_points(cfg, model, n, p.get_double("field.range_fraction"));
    const auto outcomes = run_sweep(fp.points, spec.trials, spec.master_seed);

    Table& t = report.records;
    t.columns = {"field_index", "b_ext", "phi_true", "trial", "phi_mle", "b_mle", "sq_error_phi", "sq_error_b"};
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const std::size_t k = i / spec.trials;
        const double e = wrap_phase(outcomes[i].phi_mle - fp.points[k].phi);
        const double b = to_field(outcomes[i].phi_mle, cfg.t_min);
        t.add_row({I(k), fp.fields[k], fp.points[k].phi, I(i % spec.trials), outcomes[i].phi_mle, b, e * e,
                   (b - fp.fields[k]) * (b - fp.fields[k])});
    }
    const double T = total_time(cfg, model);
    const std::vector<double> var_b = block_means(t.numbers("sq_error_b"), spec.trials);
    const std::vector<double> var_phi = block_means(t.numbers("sq_error_phi"), spec.trials);
    std::vector<double> eta2(var_b.size());
    for (std::size_t i = 0; i < var_b.size(); ++i) eta2[i] = var_b[i] * T;

    json agg;
    agg["config"] = config_json(cfg);
    agg["readout"] = readout_json(model);
    agg["total_time"] = T;
    agg["fields"] = fp.fields;
    agg["field_variance"] = var_b;
    agg["phase_variance"] = var_phi;
    agg["eta_squared"] = eta2;
    agg["eta_squared_mean"] = mean_of(eta2);
    agg["eta_squared_std"] = sample_std(eta2);
    agg["phase_variance_mean"] = mean_of(var_phi);
    agg["phase_variance_sigma"] = sample_std(var_phi);
    report.aggregates = agg;
}

void run_dynamic_range(const ExperimentSpec& spec, RunReport& report) {
    const Params& p = spec.parameters;
    const PEAConfig base = pea_from(p);
    const ReadoutModel model = readout_from(p);
    const double longest = p.get_double("dynamic_range.longest");
    const auto n = static_cast<std::size_t>(p.get_int("dynamic_range.points"));
    const double fraction = p.get_double("field.range_fraction");

    struct Case {
        PEAConfig cfg;
        std::size_t first_point;
    };
    std::vector<Case> cases;
    std::vector<SweepPoint> points;
    std::vector<double> fields;
    for (double t_min : p.get_doubles("dynamic_range.t_mins")) {
        for (const std::string& w : p.get_strings("dynamic_range.weights")) {
            const auto colon = w.find(':');
            if (colon == std::string::npos) throw std::invalid_argument("dynamic_range.weights entries are M:F");
            PEAConfig c = base;
            c.t_min = t_min;
            c.m_k = std::stoi(w.substr(0, colon));
            c.f = std::stoi(w.substr(colon + 1));
            c.K = 1 + static_cast<int>(std::lround(std::log2(longest / t_min)));
            c.validate();
            cases.push_back({c, points.size()});
            const FieldPoints fp = field_points(c, model, n, fraction);
            points.insert(points.end(), fp.points.begin(), fp.points.end());
            fields.insert(fields.end(), fp.fields.begin(), fp.fields.end());
        }
    }
    const auto outcomes = run_sweep(points, spec.trials, spec.master_seed);

    Table& t = report.records;
    t.columns = {"t_min", "K", "m_k", "f", "field_index", "b_ext", "trial", "b_mle", "sq_error_b"};
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const std::size_t k = i / spec.trials;
        const PEAConfig& c = points[k].config;
        const double b = to_field(outcomes[i].phi_mle, c.t_min);
        t.add_row({c.t_min, I{c.K}, I{c.m_k}, I{c.f}, I(k % n), fields[k], I(i % spec.trials), b,
                   (b - fields[k]) * (b - fields[k])});
    }
    const std::vector<double> var_b = block_means(t.numbers("sq_error_b"), spec.trials);

    json rows = json::array();
    for (const Case& cs : cases) {
        const std::vector<double> v(var_b.begin() + cs.first_point, var_b.begin() + cs.first_point + n);
        const double delta_b = std::sqrt(mean_of(v));
        const double T = total_time(cs.cfg, model);
        const double b_max = pi / (gamma_e * cs.cfg.t_min);
        json r;
        r["t_min"] = cs.cfg.t_min;
        r["K"] = cs.cfg.K;
        r["m_k"] = cs.cfg.m_k;
        r["f"] = cs.cfg.f;
        r["total_time"] = T;
        r["b_max"] = b_max;
        r["delta_b"] = delta_b;
        r["eta"] = delta_b * std::sqrt(T);
        r["dynamic_range"] = b_max / delta_b;
        // Ramsey at the longest evolution time, same total time.
        const double eta_r2 = model.projective
                                  ? ideal_ramsey_eta_squared(longest, cs.cfg.t2_star)
                                  : ramsey_sensitivity(pi / 2.0, 0.0, longest, cs.cfg.t2_star, model.alpha0, model.alpha1);
        r["ramsey_eta"] = std::sqrt(eta_r2);
        r["ramsey_dynamic_range"] = pi / (2.0 * gamma_e * longest) * std::sqrt(T) / std::sqrt(eta_r2);
        rows.push_back(r);
    }
    const DriveParams drive(p.get_double("drive.rabi"), p.get_double("drive.qubit_freq"));
    const BlochSiegertBound bs = bloch_siegert_bound(drive);
    json bsj;
    bsj["qubit_freq"] = drive.qubit_freq;
    bsj["rabi"] = drive.rabi_freq;
    bsj["shift_factor"] = bs.shift_factor;
    bsj["max_rabi"] = bs.max_rabi;
    bsj["t_pi"] = bs.t_pi;
    bsj["t_min_lower"] = bs.t_min_lower;
    for (double ghz : {1.4, 4.3}) {
        const BlochSiegertBound alt = bloch_siegert_bound(DriveParams(drive.rabi_freq, two_pi * ghz * 1e9));
        bsj["t_min_lower_at_" + std::to_string(ghz).substr(0, 3) + "GHz"] = alt.t_min_lower;
    }
    report.aggregates["readout"] = readout_json(model);
    report.aggregates["longest"] = longest;
    report.aggregates["cases"] = rows;
    report.aggregates["bloch_siegert"] = bsj;
}

Eigen::Vector3d parse_vec3(const std::string& s, const char* what) {
    std::istringstream is(s);
    Eigen::Vector3d v;
    if (!(is >> v.x() >> v.y() >> v.z())) throw std::invalid_argument(std::string(what) + ": expected three numbers");
    std::string rest;
    if (is >> rest) throw std::invalid_argument(std::string(what) + ": trailing input");
    return v;
}

void run_imaging(const ExperimentSpec& spec, RunReport& report) {
    const Params& p = spec.parameters;
    const std::vector<std::string> species = p.get_strings("imaging.species");
    const std::vector<std::string> positions = p.get_strings("imaging.positions_nm");
    if (species.size() != positions.size()) {
        throw std::invalid_argument("imaging.species and imaging.positions_nm differ in length");
    }
    DipoleScene scene;
    scene.nv_axis = parse_vec3(p.get_string("imaging.nv_axis"), "imaging.nv_axis").normalized();
    scene.scan_height = p.get_double("imaging.height_nm") * 1e-9;
    const double half = 0.5 * p.get_double("imaging.window_nm") * 1e-9;
    const auto px = static_cast<std::size_t>(p.get_int("imaging.pixels"));
    scene.grid = ScanGrid{-half, half, -half, half, px, px};
    for (std::size_t i = 0; i < species.size(); ++i) {
        const Species s = parse_species(species[i]);
        scene.dipoles.push_back(make_dipole(s, parse_vec3(positions[i], "imaging.positions_nm") * 1e-9, scene.nv_axis));
    }
    scene.validate();

    const std::string target_name = p.get_string("imaging.target");
    double target = 0.0;
    try {
        // On-axis field a height h above a lone dipole of the named species.
        const double m = species_moment(parse_species(target_name));
        target = 2.0 * mu0_over_4pi * m / std::pow(scene.scan_height, 3);
    } catch (const std::invalid_argument&) {
        target = p.get_double("imaging.target");
    }
    const double linewidth = p.get_double("imaging.linewidth");
    const Raster raster = resonance_contour(scene, target, linewidth);

    Table& t = report.records;
    t.columns = {"i", "j", "x", "y", "b_proj", "on"};
    for (std::size_t j = 0; j < raster.ny; ++j) {
        for (std::size_t i = 0; i < raster.nx; ++i) {
            const double x = scene.grid.x(i), y = scene.grid.y(j);
            t.add_row({I(i), I(j), x, y, scene.projected_field(x, y), I{raster.at(i, j) ? 1 : 0}});
        }
    }
    std::ostringstream csv, pgm;
    raster.write_csv(csv);
    raster.write_pgm(pgm);
    report.attachments["raster.csv"] = csv.str();
    report.attachments["raster.pgm"] = pgm.str();

    json agg;
    agg["target_field"] = target;
    agg["linewidth"] = linewidth;
    agg["on_pixels"] = raster.count();
    json per = json::array();
    for (const Dipole& d : scene.dipoles) {
        json j;
        j["species"] = std::string(to_string(d.species));
        j["x"] = d.position.x();
        j["y"] = d.position.y();
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t jj = 0; jj < raster.ny; ++jj) {
            for (std::size_t ii = 0; ii < raster.nx; ++ii) {
                if (!raster.at(ii, jj)) continue;
                best = std::min(best, std::hypot(scene.grid.x(ii) - d.position.x(), scene.grid.y(jj) - d.position.y()));
            }
        }
        j["nearest_on_pixel"] = std::isfinite(best) ? json(best) : json(nullptr);
        per.push_back(j);
    }
    agg["dipoles"] = per;

    const double r = p.get_double("imaging.distance_nm") * 1e-9;
    const double t2 = p.get_double("imaging.t2");
    json formulas = json::object();
    for (Species s : {Species::proton, Species::carbon13, Species::electron}) {
        const double m = species_moment(s);
        const double grad = field_gradient(m, r);
        const PositionErrorThreshold pe = position_error_threshold(r, t2, m);
        json j;
        j["gradient"] = grad;
        j["resolution"] = resolution(linewidth, grad);
        j["position_error_formula"] = pe.formula;
        j["position_error_30pct"] = pe.fraction_30;
        j["position_error_50pct"] = pe.fraction_50;
        formulas[std::string(to_string(s))] = j;
    }
    agg["formulas"] = formulas;
    json quoted;
    quoted["position_error_proton"] = 0.75e-9;
    quoted["position_error_carbon13"] = 3.7e-9;
    agg["quoted"] = quoted;
    agg["ramsey_dynamic_range_T14s"] = ramsey_dynamic_range(14.0, t2);
    report.aggregates = agg;
}

void run_ac(const ExperimentSpec& spec, RunReport& report) {
    const Params& p = spec.parameters;
    PEAConfig cfg = pea_from(p);
    cfg.t2_star = p.get_double("ac.t2_star");
    const ReadoutModel model = p.get_bool("ac.ideal_readout") ? ReadoutModel::ideal() : readout_from(p);
    const double b_ac = p.get_double("ac.b_ac");
    const double omega = p.get_double("ac.omega");
    const auto n_theta = static_cast<std::size_t>(p.get_int("ac.theta_points"));
    std::vector<double> thetas;
    if (n_theta <= 1) {
        thetas.push_back(p.get_double("ac.theta"));
    } else {
        for (std::size_t i = 0; i < n_theta; ++i) thetas.push_back(-pi + two_pi * double(i + 1) / double(n_theta));
    }
    const double resolution_phi = two_pi / std::ldexp(1.0, cfg.K);

    struct Out {
        ACReadout r;
        ACEstimate e;
    };
    const std::size_t total = thetas.size() * spec.trials;
    const auto outs = kernels::parallel_map<Out>(total, [&](std::size_t i) {
        const ACField field{b_ac, omega, thetas[i / spec.trials]};
        TrialRng rng = derive_trial_rng(spec.master_seed, i);
        ACReadout r = run_ac_pea(cfg, field, model, rng);
        r.in_phase.final_grid = LikelihoodGrid(2);
        r.quadrature.final_grid = LikelihoodGrid(2);
        return Out{r, extract_ac_field(r.phi_i, r.phi_q, omega, 1, 0.5 * resolution_phi)};
    });

    Table& t = report.records;
    t.columns = {"theta_index", "theta", "trial", "phi_i_true", "phi_q_true", "phi_i", "phi_q",
                 "b_est", "theta_est", "theta_error", "undetermined"};
    for (std::size_t i = 0; i < outs.size(); ++i) {
        const double th = thetas[i / spec.trials];
        const ACField field{b_ac, omega, th};
        const double pi_true = accumulated_phase({EchoType::in_phase, 1}, field);
        const double pq_true = accumulated_phase({EchoType::quadrature, 1}, field);
        const Out& o = outs[i];
        t.add_row({I(i / spec.trials), th, I(i % spec.trials), pi_true, pq_true, o.r.phi_i, o.r.phi_q, o.e.b_est,
                   o.e.theta_est, wrap_phase(o.e.theta_est - th), I{o.e.undetermined ? 1 : 0}});
    }
    double max_err = 0.0;
    std::size_t undetermined = 0;
    for (const Out& o : outs) undetermined += o.e.undetermined ? 1 : 0;
    const std::vector<double> errs = t.numbers("theta_error");
    const std::vector<double> und = t.numbers("undetermined");
    for (std::size_t i = 0; i < errs.size(); ++i) {
        if (und[i] == 0.0) max_err = std::max(max_err, std::abs(errs[i]));
    }
    json agg;
    agg["config"] = config_json(cfg);
    agg["readout"] = readout_json(model);
    agg["b_ac"] = b_ac;
    agg["omega"] = omega;
    agg["unit_cell_phase_amplitude"] = 4.0 * gamma_e * b_ac / omega;
    agg["b_est_mean"] = mean_of(t.numbers("b_est"));
    agg["max_theta_error"] = max_err;
    agg["undetermined_count"] = undetermined;
    agg["phase_resolution"] = resolution_phi;
    report.aggregates = agg;
}

}  // namespace

void dispatch(const ExperimentSpec& spec, RunReport& report) {
    const std::string& n = spec.name;
    if (n == "fidelity") return run_fidelity(spec, report);
    if (n == "ramsey") return run_ramsey(spec, report);
    if (n == "napea") return run_single_pea(spec, report, Algorithm::napea);
    if (n == "qpea") return run_single_pea(spec, report, Algorithm::qpea);
    if (n == "scaling") return run_scaling(spec, report);
    if (n == "variance-profile") return run_variance_profile(spec, report);
    if (n == "field-sensitivity") return run_field_sensitivity(spec, report);
    if (n == "dynamic-range") return run_dynamic_range(spec, report);
    if (n == "imaging") return run_imaging(spec, report);
    if (n == "ac") return run_ac(spec, report);
    throw std::invalid_argument("unknown experiment: " + n);
}

}  // namespace nvmag::detail
