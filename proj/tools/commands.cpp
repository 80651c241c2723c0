#include "commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "holeburn/csv.hpp"
#include "holeburn/errors.hpp"
#include "holeburn/fitters.hpp"
#include "holeburn/synthgen.hpp"
#include "holeburn/trace.hpp"
#include "holeburn/zeeman.hpp"

namespace holeburn::cli {

using nlohmann::json;

namespace {

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json domain_json(const IntegrationDomain& d) {
    return json{{"r_max_m", d.r_max},       {"z_halfwidth_m", d.z_halfwidth},
                {"delta_halfwidth_hz", d.delta_halfwidth}, {"n_r", d.n_r},
                {"n_z", d.n_z},             {"n_delta", d.n_delta}};
}

void emit_csv(const CsvTable& t, const std::string& path, std::ostream& out) {
    if (path.empty() || path == "-")
        write_csv(out, t);
    else
        write_csv_file(path, t);
}

void emit_json(const json& j, const std::string& path, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << j.dump(2) << '\n';
        return;
    }
    std::ofstream f(path);
    if (!f) throw InputError("cannot write '" + path + "'");
    f << j.dump(2) << '\n';
}

std::string fmt(double v) { return format_double(v); }

std::vector<double> column_or(const CsvTable& t, const std::string& requested,
                              std::initializer_list<const char*> fallbacks) {
    if (!requested.empty()) return t.columns[t.column(requested)];
    for (const char* name : fallbacks)
        if (t.has_column(name)) return t.columns[t.column(name)];
    std::string names;
    for (const char* name : fallbacks) names += std::string(names.empty() ? "" : ", ") + name;
    throw InputError("CSV has none of the columns " + names);
}

// Options shared by every command.
struct Common {
    std::string config_path;
    std::string out_path;

    RunConfig load() const {
        return config_path.empty() ? RunConfig{} : load_run_config(config_path);
    }
};

void add_common(CLI::App* cmd, Common& c, const std::string& out_help) {
    cmd->add_option("--config", c.config_path, "INI run configuration");
    cmd->add_option("--out", c.out_path, out_help);
}

NoiseSpec noise_spec(const std::string& kind, std::uint64_t seed, double sigma, double dwell) {
    NoiseSpec n;
    n.kind = parse_noise_kind(kind);
    n.seed = seed;
    n.gaussian_sigma = sigma;
    n.dwell = dwell;
    n.validate();
    return n;
}

std::string power_file_name(double power) {
    const double uw = power * 1e6;
    std::ostringstream os;
    if (std::abs(uw - std::round(uw)) < 1e-9)
        os << "decay_" << static_cast<long long>(std::llround(uw)) << "uW.csv";
    else
        os << "decay_" << fmt(uw) << "uW.csv";
    return os.str();
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
    Common common;
    double power = 0.0;
    double t_end = 200.0;
    double dt = 1.0;
    double tol = 0.0;
    std::string report;
    CLI::Option* power_opt = nullptr;
    CLI::Option* tol_opt = nullptr;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
    RunConfig cfg = a.common.load();
    if (a.power_opt->count()) cfg.power = a.power;
    if (a.tol_opt->count()) cfg.rel_tol = a.tol;
    cfg.validate();

    const auto t = time_grid(a.t_end, a.dt);
    const auto rs = resolve_spectrum(cfg, cfg.power, t);
    const auto model = rs.spectrum.evaluate(t, cfg.rates.gamma_trap);
    const auto scaled = scaled_signal(model, {cfg.scale_a, cfg.background_b, cfg.power});

    Metadata meta{
        {"power_w", fmt(cfg.power)},
        {"gamma_trap_per_s", fmt(cfg.rates.gamma_trap)},
        {"scale_a", fmt(cfg.scale_a)},
        {"background_b_counts_per_s_per_w", fmt(cfg.background_b)},
        {"n_r", std::to_string(rs.signal.domain.n_r)},
        {"n_z", std::to_string(rs.signal.domain.n_z)},
        {"n_delta", std::to_string(rs.signal.domain.n_delta)},
        {"achieved_rel_tol", fmt(rs.signal.achieved_rel_tol)},
    };
    emit_csv(signal_table(t, model, scaled, meta), a.common.out_path, out);

    if (!a.report.empty()) {
        json r{{"command", "simulate"},
               {"status", "ok"},
               {"config", cfg.to_json()},
               {"result",
                {{"points", t.size()},
                 {"initial_scaled_counts_per_s", scaled.front()},
                 {"final_scaled_counts_per_s", scaled.back()},
                 {"final_over_initial", scaled.back() / scaled.front()},
                 {"background_counts_per_s", cfg.background_b * cfg.power},
                 {"domain", domain_json(rs.signal.domain)},
                 {"refinements", rs.signal.refinements},
                 {"achieved_rel_tol", finite_or_null(rs.signal.achieved_rel_tol)},
                 {"warnings", rs.signal.warnings}}}};
        emit_json(r, a.report, out);
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct FitTrapArgs {
    Common common;
    std::vector<std::string> inputs;
    double tol = 0.0;
    CLI::Option* tol_opt = nullptr;
};

int cmd_fit_trap(const FitTrapArgs& a, std::ostream& out) {
    RunConfig cfg = a.common.load();
    if (a.tol_opt->count()) cfg.rel_tol = a.tol;
    cfg.validate();

    std::vector<TrapCurve> curves;
    std::vector<DecaySpectrum> spectra;
    for (const auto& path : a.inputs) {
        auto curve = decay_curve_from_table(read_csv_file(path));
        if (!curve.power) throw InputError(path + ": missing '# power_w = ...' metadata");
        const double p = *curve.power;
        spectra.push_back(resolve_spectrum(cfg, p, curve.time).spectrum);
        curves.push_back({std::move(curve), p});
    }

    const auto fit = fit_trap_model(curves, spectra, cfg.simplex(), cfg.fit.gamma_seed);
    json per_curve = json::array();
    for (std::size_t i = 0; i < curves.size(); ++i)
        per_curve.push_back({{"file", a.inputs[i]},
                             {"power_w", curves[i].power},
                             {"scale_a", fit.scale_a[i]},
                             {"scale_a_sigma", finite_or_null(fit.scale_a_sigma[i])}});
    json r{{"command", "fit trap"},
           {"status", fit.converged ? "ok" : "failed"},
           {"config", cfg.to_json()},
           {"result",
            {{"gamma_trap_per_s", fit.gamma_trap},
             {"gamma_trap_sigma_per_s", finite_or_null(fit.gamma_trap_sigma)},
             {"background_b_counts_per_s_per_w", fit.background_b},
             {"background_b_sigma", finite_or_null(fit.background_b_sigma)},
             {"background_clamped", fit.background_clamped},
             {"curves", per_curve},
             {"residual", fit.residual},
             {"converged", fit.converged},
             {"iterations", fit.iterations},
             {"evaluations", fit.evaluations}}}};
    if (!fit.converged) r["error"] = "simplex did not converge within fit.max_iterations";
    emit_json(r, a.common.out_path, out);
    return fit.converged ? kExitOk : kExitFit;
}

// ---------------------------------------------------------------------------

struct FitHoleArgs {
    Common common;
    std::string input;
    std::string aom_off;
    bool detect_aom_off = false;
    std::string rms_range;
    std::string treated_out;
    double level_above = 0.0;
    CLI::Option* level_opt = nullptr;
};

int cmd_fit_hole(const FitHoleArgs& a, std::ostream& out) {
    RunConfig cfg = a.common.load();
    auto raw = raw_scan_from_table(read_csv_file(a.input));
    if (!a.aom_off.empty())
        raw.aom_off = parse_index_range(a.aom_off);
    else if (a.detect_aom_off)
        raw.aom_off = detect_aom_off(raw.power_monitor);
    if (raw.aom_off.empty())
        throw InputError(a.input + ": no AOM-off range (use --aom-off a:b or --detect-aom-off)");
    raw.validate();

    const auto bg = subtract_background(raw);
    auto scan = normalize_by_power(bg);
    if (!a.treated_out.empty())
        write_csv_file(a.treated_out,
                       treated_scan_table(bg, a.level_opt->count() ? normalize_level_above(scan, a.level_above)
                                                                    : scan));

    std::optional<double> sigma_point;
    if (!a.rms_range.empty()) {
        const auto r = parse_index_range(a.rms_range);
        if (r.end > scan.size()) throw InputError("--rms-range lies outside the scan");
        NormalizedScan part;
        for (std::size_t i = r.begin; i < r.end; ++i) {
            part.freq.push_back(scan.freq[i]);
            part.signal.push_back(scan.signal[i]);
            part.excluded.push_back(scan.excluded[i]);
        }
        sigma_point = point_rms(part);
    }

    std::vector<double> f, s;
    for (std::size_t i = 0; i < scan.size(); ++i)
        if (!scan.excluded[i]) {
            f.push_back(scan.freq[i]);
            s.push_back(scan.signal[i]);
        }
    std::vector<double> sig;
    if (sigma_point && *sigma_point > 0.0) sig.assign(f.size(), *sigma_point);

    json r{{"command", "fit hole"},
           {"config", cfg.to_json()},
           {"input",
            {{"file", a.input},
             {"points", scan.size()},
             {"excluded", scan.size() - scan.included()},
             {"aom_off", format_index_range(raw.aom_off)}}}};
    try {
        const auto fit = fit_hole_lorentzian(f, s, sig, cfg.simplex());
        json res{{"baseline", fit.baseline},
                 {"baseline_sigma", finite_or_null(fit.baseline_sigma)},
                 {"depth", fit.depth},
                 {"depth_sigma", finite_or_null(fit.depth_sigma)},
                 {"center_hz", fit.center},
                 {"center_sigma_hz", finite_or_null(fit.center_sigma)},
                 {"fwhm_hz", fit.fwhm},
                 {"fwhm_sigma_hz", finite_or_null(fit.fwhm_sigma)},
                 {"hom_linewidth_hz", hom_linewidth_from_hole(fit.fwhm)},
                 {"hole_detected", fit.hole_detected},
                 {"residual", fit.residual},
                 {"converged", fit.converged},
                 {"iterations", fit.iterations}};
        if (sigma_point) {
            const auto area = hole_area_with_error(scan, fit.baseline, *sigma_point);
            res["sigma_point"] = *sigma_point;
            res["area"] = area.area;
            res["sigma_area"] = area.sigma_area;
            res["area_hz"] = area.area_hz;
            res["sigma_area_hz"] = area.sigma_area_hz;
        }
        r["status"] = "ok";
        r["result"] = res;
    } catch (const FitError& e) {
        r["status"] = "failed";
        r["error"] = e.what();
        emit_json(r, a.common.out_path, out);
        return kExitFit;
    }
    emit_json(r, a.common.out_path, out);
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct FitExpArgs {
    Common common;
    std::string input;
    std::string x_col, y_col, sigma_col;
    bool with_offset = false;
};

int cmd_fit_expdecay(const FitExpArgs& a, std::ostream& out) {
    RunConfig cfg = a.common.load();
    const auto t = read_csv_file(a.input);
    const auto x = column_or(t, a.x_col, {"wait_s", "time_s", "x"});
    const auto y = column_or(t, a.y_col, {"area", "scaled_counts_per_s", "counts_per_s", "y"});
    std::vector<double> sigma;
    if (!a.sigma_col.empty())
        sigma = t.columns[t.column(a.sigma_col)];
    else if (t.has_column("sigma_area"))
        sigma = t.columns[t.column("sigma_area")];

    json r{{"command", "fit expdecay"}, {"config", cfg.to_json()}, {"input", {{"file", a.input}}}};
    try {
        const auto fit = fit_exponential(x, y, a.with_offset, sigma, cfg.simplex());
        r["status"] = fit.converged ? "ok" : "failed";
        r["result"] = {{"amplitude", fit.amplitude},
                       {"amplitude_sigma", finite_or_null(fit.amplitude_sigma)},
                       {"tau_s", fit.tau},
                       {"tau_sigma_s", finite_or_null(fit.tau_sigma)},
                       {"offset", fit.offset},
                       {"offset_sigma", finite_or_null(fit.offset_sigma)},
                       {"with_offset", fit.with_offset},
                       {"residual", fit.residual},
                       {"converged", fit.converged},
                       {"iterations", fit.iterations}};
        if (!fit.converged) r["error"] = "simplex did not converge within fit.max_iterations";
        emit_json(r, a.common.out_path, out);
        return fit.converged ? kExitOk : kExitFit;
    } catch (const FitError& e) {
        r["status"] = "failed";
        r["error"] = e.what();
        emit_json(r, a.common.out_path, out);
        return kExitFit;
    }
}

// ---------------------------------------------------------------------------

struct FitLinearArgs {
    Common common;
    std::string input;
    std::string x_col = "x";
    std::string y_col = "y";
    double confidence = 0.0;
    CLI::Option* confidence_opt = nullptr;
};

int cmd_fit_linear(const FitLinearArgs& a, std::ostream& out) {
    RunConfig cfg = a.common.load();
    if (a.confidence_opt->count()) cfg.fit.confidence = a.confidence;
    cfg.validate();
    const auto t = read_csv_file(a.input);
    const auto x = t.columns[t.column(a.x_col)];
    const auto y = t.columns[t.column(a.y_col)];

    json r{{"command", "fit linear"}, {"config", cfg.to_json()}, {"input", {{"file", a.input}}}};
    try {
        const auto fit = fit_linear_ci(x, y, cfg.fit.confidence);
        r["status"] = "ok";
        r["result"] = {{"slope", fit.slope},
                       {"slope_ci", fit.slope_ci},
                       {"slope_se", fit.slope_se},
                       {"intercept", fit.intercept},
                       {"intercept_ci", fit.intercept_ci},
                       {"intercept_se", fit.intercept_se},
                       {"confidence", fit.confidence},
                       {"dof", fit.dof},
                       {"residual", fit.residual}};
    } catch (const FitError& e) {
        r["status"] = "failed";
        r["error"] = e.what();
        emit_json(r, a.common.out_path, out);
        return kExitFit;
    }
    emit_json(r, a.common.out_path, out);
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct ZeemanArgs {
    Common common;
    std::vector<double> delta_f;
};

int cmd_zeeman(const ZeemanArgs& a, std::ostream& out) {
    RunConfig cfg = a.common.load();
    cfg.zeeman.validate();
    CsvTable t;
    t.header = {"delta_f_hz",         "b_ground_t",      "b_sum_t",        "b_diff_t",
                "b_ground_applied_t", "b_sum_applied_t", "b_diff_applied_t"};
    t.columns.assign(t.header.size(), {});
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const double df : a.delta_f) {
        const auto rf = resonance_fields(df, cfg.zeeman);
        const double row[] = {rf.delta_f,          rf.b_ground,      rf.b_sum,
                              rf.b_diff.value_or(nan), rf.b_ground_applied, rf.b_sum_applied,
                              rf.b_diff_applied.value_or(nan)};
        for (std::size_t j = 0; j < t.columns.size(); ++j) t.columns[j].push_back(row[j]);
    }
    emit_csv(t, a.common.out_path, out);
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct NoiseArgs {
    std::string kind = "none";
    std::uint64_t seed = 0;
    double sigma = 0.0;
    double dwell = 1.0;
};

void add_noise(CLI::App* cmd, NoiseArgs& n) {
    cmd->add_option("--noise", n.kind, "none | poisson | gaussian")->capture_default_str();
    cmd->add_option("--seed", n.seed, "master seed")->capture_default_str();
    cmd->add_option("--sigma", n.sigma, "gaussian noise sigma, signal units")->capture_default_str();
    cmd->add_option("--dwell", n.dwell, "poisson counting time per point, s")->capture_default_str();
}

struct GenDecayArgs {
    Common common;
    NoiseArgs noise;
    double power = 0.0;
    double t_end = 200.0;
    double dt = 1.0;
    double tol = 0.0;
    bool seven = false;
    std::string out_dir = ".";
    CLI::Option* power_opt = nullptr;
    CLI::Option* tol_opt = nullptr;
};

int cmd_gen_decay(const GenDecayArgs& a, std::ostream& out, std::ostream& err) {
    RunConfig cfg = a.common.load();
    if (a.power_opt->count()) cfg.power = a.power;
    if (a.tol_opt->count()) cfg.rel_tol = a.tol;
    cfg.validate();
    const auto noise = noise_spec(a.noise.kind, a.noise.seed, a.noise.sigma, a.noise.dwell);
    const auto t = time_grid(a.t_end, a.dt);

    auto make = [&](double power, std::uint64_t stream) {
        const auto rs = resolve_spectrum(cfg, power, t);
        const DecayTruth truth{cfg.rates.gamma_trap, cfg.scale_a, cfg.background_b, power};
        return gen_decay_curve(rs.spectrum, truth, t, noise, stream);
    };

    if (!a.seven) {
        emit_csv(decay_curve_table(make(cfg.power, 0)), a.common.out_path, out);
        return kExitOk;
    }
    std::filesystem::create_directories(a.out_dir);
    for (std::size_t i = 0; i < kSevenPowers.size(); ++i) {
        const auto path = std::filesystem::path(a.out_dir) / power_file_name(kSevenPowers[i]);
        write_csv_file(path, decay_curve_table(make(kSevenPowers[i], i)));
        err << "wrote " << path.string() << '\n';
    }
    return kExitOk;
}

struct GenHoleArgs {
    Common common;
    NoiseArgs noise;
    HoleTruth truth;
    HoleScanConfig scan;
    std::string aom_off = "0:50";
};

int cmd_gen_hole(GenHoleArgs a, std::ostream& out) {
    a.scan.aom_off = parse_index_range(a.aom_off);
    const auto noise = noise_spec(a.noise.kind, a.noise.seed, a.noise.sigma, a.noise.dwell);
    emit_csv(raw_scan_table(gen_hole_scan(a.truth, a.scan, noise)), a.common.out_path, out);
    return kExitOk;
}

struct GenHoleDecayArgs {
    Common common;
    NoiseArgs noise;
    double amplitude = 1.0;
    double tau = 0.072;
    double offset = 0.0;
    double t_end = 0.3;
    std::size_t points = 31;
};

int cmd_gen_holedecay(const GenHoleDecayArgs& a, std::ostream& out) {
    if (a.points < 1) throw InputError("--points must be >= 1");
    if (!(a.t_end >= 0.0)) throw InputError("--t-end must be >= 0");
    const auto noise = noise_spec(a.noise.kind, a.noise.seed, a.noise.sigma, a.noise.dwell);
    const auto waits = linspace(0.0, a.t_end, a.points);
    const auto s = gen_hole_decay_series(a.amplitude, a.tau, a.offset, waits, noise);
    CsvTable t;
    t.metadata = s.metadata;
    t.header = {"wait_s", "area"};
    t.columns = {s.wait, s.area};
    emit_csv(t, a.common.out_path, out);
    return kExitOk;
}

} // namespace

// ---------------------------------------------------------------------------

std::vector<double> time_grid(double t_end, double dt) {
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw InputError("--t-end must be >= 0");
    if (!(dt > 0.0)) throw InputError("--dt must be > 0");
    const auto steps = static_cast<std::size_t>(std::floor(t_end / dt * (1.0 + 1e-12)));
    if (steps > 10'000'000) throw InputError("time grid too large");
    std::vector<double> t(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i) t[i] = static_cast<double>(i) * dt;
    if (t.back() < t_end * (1.0 - 1e-12)) t.push_back(t_end);
    return t;
}

ResolvedSpectrum resolve_spectrum(const RunConfig& cfg, double power, std::span<const double> t_grid) {
    const auto model = cfg.trap_model();
    const auto geom = cfg.beam(power);
    ResolvedSpectrum rs;
    if (cfg.rel_tol > 0.0) {
        rs.signal = refine_until_converged(t_grid, model, geom, cfg.rates.gamma_trap, cfg.domain,
                                           cfg.rel_tol, cfg.max_refinements, cfg.spectrum);
        rs.spectrum = build_spectrum(model, geom, rs.signal.domain, cfg.spectrum);
    } else {
        rs.spectrum = build_spectrum(model, geom, cfg.domain, cfg.spectrum);
        rs.signal = detected_signal(t_grid, model, geom, cfg.rates.gamma_trap, cfg.domain, cfg.spectrum);
    }
    return rs;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Spectral hole burning and photoionization trapping toolkit", "holeburn"};
    app.require_subcommand(1);
    std::function<int()> action;

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "integrate the detected fluorescence decay S(t)");
    add_common(simulate, sim.common, "signal CSV path (default stdout)");
    sim.power_opt = simulate->add_option("--power", sim.power, "laser power P0, W (overrides config)");
    simulate->add_option("--t-end", sim.t_end, "last time point, s")->capture_default_str();
    simulate->add_option("--dt", sim.dt, "time step, s")->capture_default_str();
    sim.tol_opt = simulate->add_option("--tol", sim.tol, "grid refinement tolerance (0 disables)");
    simulate->add_option("--report", sim.report, "JSON summary path ('-' for stdout)");
    simulate->callback([&] { action = [&] { return cmd_simulate(sim, out); }; });

    auto* fit = app.add_subcommand("fit", "fit models to measured or synthetic data");
    fit->require_subcommand(1);

    FitTrapArgs ftrap;
    auto* trap = fit->add_subcommand("trap", "global trapping-rate fit over decay curves");
    add_common(trap, ftrap.common, "JSON report path (default stdout)");
    trap->add_option("inputs", ftrap.inputs, "signal CSV files with power_w metadata")->required();
    ftrap.tol_opt = trap->add_option("--tol", ftrap.tol, "grid refinement tolerance (0 disables)");
    trap->callback([&] { action = [&] { return cmd_fit_trap(ftrap, out); }; });

    FitHoleArgs fhole;
    auto* hole = fit->add_subcommand("hole", "background-subtract, power-normalize and fit a hole");
    add_common(hole, fhole.common, "JSON report path (default stdout)");
    hole->add_option("input", fhole.input, "raw scan CSV")->required();
    hole->add_option("--aom-off", fhole.aom_off, "AOM-off index range a:b (half-open)");
    hole->add_flag("--detect-aom-off", fhole.detect_aom_off, "locate the AOM-off run heuristically");
    hole->add_option("--rms-range", fhole.rms_range, "hole-free index range a:b for the point RMS");
    hole->add_option("--treated-out", fhole.treated_out, "write the treated scan CSV here");
    fhole.level_opt = hole->add_option("--level-above", fhole.level_above,
                                       "rescale the treated scan so its mean above this frequency (Hz) is 1");
    hole->callback([&] { action = [&] { return cmd_fit_hole(fhole, out); }; });

    FitExpArgs fexp;
    auto* expdecay = fit->add_subcommand("expdecay", "single-exponential fit");
    add_common(expdecay, fexp.common, "JSON report path (default stdout)");
    expdecay->add_option("input", fexp.input, "CSV file")->required();
    expdecay->add_option("--x-col", fexp.x_col, "time column (default wait_s, time_s or x)");
    expdecay->add_option("--y-col", fexp.y_col, "value column (default area, ... or y)");
    expdecay->add_option("--sigma-col", fexp.sigma_col, "per-point sigma column");
    expdecay->add_flag("--offset", fexp.with_offset, "fit a constant offset too");
    expdecay->callback([&] { action = [&] { return cmd_fit_expdecay(fexp, out); }; });

    FitLinearArgs flin;
    auto* linear = fit->add_subcommand("linear", "straight line with confidence intervals");
    add_common(linear, flin.common, "JSON report path (default stdout)");
    linear->add_option("input", flin.input, "CSV file")->required();
    linear->add_option("--x-col", flin.x_col)->capture_default_str();
    linear->add_option("--y-col", flin.y_col)->capture_default_str();
    flin.confidence_opt = linear->add_option("--confidence", flin.confidence, "two-sided level in (0, 1)");
    linear->callback([&] { action = [&] { return cmd_fit_linear(flin, out); }; });

    ZeemanArgs zee;
    auto* zeeman = app.add_subcommand("zeeman", "two-frequency repumping resonance fields");
    add_common(zeeman, zee.common, "CSV path (default stdout)");
    zeeman->add_option("delta_f", zee.delta_f, "laser frequency differences, Hz");
    zeeman->callback([&] { action = [&] { return cmd_zeeman(zee, out); }; });

    auto* gen = app.add_subcommand("gen", "synthetic data with known ground truth");
    gen->require_subcommand(1);

    GenDecayArgs gdec;
    auto* decay = gen->add_subcommand("decay", "fluorescence decay curve(s)");
    add_common(decay, gdec.common, "CSV path (default stdout)");
    add_noise(decay, gdec.noise);
    gdec.power_opt = decay->add_option("--power", gdec.power, "laser power, W (overrides config)");
    decay->add_option("--t-end", gdec.t_end)->capture_default_str();
    decay->add_option("--dt", gdec.dt)->capture_default_str();
    gdec.tol_opt = decay->add_option("--tol", gdec.tol, "grid refinement tolerance (0 disables)");
    decay->add_flag("--seven-powers", gdec.seven, "write one file per power, 2 to 44 uW");
    decay->add_option("--out-dir", gdec.out_dir, "directory for --seven-powers")->capture_default_str();
    decay->callback([&] { action = [&] { return cmd_gen_decay(gdec, out, err); }; });

    GenHoleArgs ghole;
    auto* hscan = gen->add_subcommand("hole", "raw hole-burning readout scan");
    add_common(hscan, ghole.common, "CSV path (default stdout)");
    add_noise(hscan, ghole.noise);
    hscan->add_option("--baseline", ghole.truth.baseline)->capture_default_str();
    hscan->add_option("--depth", ghole.truth.depth)->capture_default_str();
    hscan->add_option("--center", ghole.truth.center, "Hz")->capture_default_str();
    hscan->add_option("--fwhm", ghole.truth.fwhm, "Hz")->capture_default_str();
    hscan->add_option("--f-start", ghole.scan.f_start, "Hz")->capture_default_str();
    hscan->add_option("--f-stop", ghole.scan.f_stop, "Hz")->capture_default_str();
    hscan->add_option("--points", ghole.scan.points)->capture_default_str();
    hscan->add_option("--power-level", ghole.scan.power_level)->capture_default_str();
    hscan->add_option("--power-slope", ghole.scan.power_slope)->capture_default_str();
    hscan->add_option("--response", ghole.scan.response)->capture_default_str();
    hscan->add_option("--fluor-offset", ghole.scan.fluor_offset)->capture_default_str();
    hscan->add_option("--power-offset", ghole.scan.power_offset)->capture_default_str();
    hscan->add_option("--aom-off", ghole.aom_off, "zero-power index range a:b")->capture_default_str();
    hscan->callback([&] { action = [&] { return cmd_gen_hole(ghole, out); }; });

    GenHoleDecayArgs ghd;
    auto* hdecay = gen->add_subcommand("holedecay", "hole area versus wait time");
    add_common(hdecay, ghd.common, "CSV path (default stdout)");
    add_noise(hdecay, ghd.noise);
    hdecay->add_option("--amplitude", ghd.amplitude)->capture_default_str();
    hdecay->add_option("--tau", ghd.tau, "s")->capture_default_str();
    hdecay->add_option("--offset", ghd.offset)->capture_default_str();
    hdecay->add_option("--t-end", ghd.t_end, "last wait time, s")->capture_default_str();
    hdecay->add_option("--points", ghd.points)->capture_default_str();
    hdecay->callback([&] { action = [&] { return cmd_gen_holedecay(ghd, out); }; });

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& s : args) argv.push_back(s.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        return action ? action() : kExitInput;
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const ConvergenceError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConvergence;
    } catch (const FitError& e) {
        err << "fit failed: " << e.what() << '\n';
        return kExitFit;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kExitUnexpected;
    }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    return run_cli(std::vector<std::string>(argv, argv + argc), out, err);
}

} // namespace holeburn::cli
