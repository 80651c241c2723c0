#include "run_config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "holeburn/errors.hpp"

namespace holeburn::cli {

namespace {

double to_double(const std::string& key, const std::string& text) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw InputError("config key '" + key + "': expected a number, got '" + text + "'");
    return v;
}

long long to_integer(const std::string& key, const std::string& text) {
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw InputError("config key '" + key + "': expected an integer, got '" + text + "'");
    return v;
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

Setter real(double RunConfig::*field) {
    return [field](RunConfig& c, const std::string& k, const std::string& v) { c.*field = to_double(k, v); };
}

template <typename Get>
Setter real_in(Get get) {
    return [get](RunConfig& c, const std::string& k, const std::string& v) { get(c) = to_double(k, v); };
}

template <typename Get>
Setter count_in(Get get) {
    return [get](RunConfig& c, const std::string& k, const std::string& v) {
        const auto n = to_integer(k, v);
        if (n < 0) throw InputError("config key '" + k + "' must be >= 0");
        get(c) = static_cast<std::decay_t<decltype(get(c))>>(n);
    };
}

const std::map<std::string, std::map<std::string, Setter>>& bindings() {
    static const std::map<std::string, std::map<std::string, Setter>> table{
        {"material",
         {
             {"sat_intensity_w_per_m2", real_in([](RunConfig& c) -> double& { return c.material.sat_intensity; })},
             {"sigma_ion_m2", real_in([](RunConfig& c) -> double& { return c.material.sigma_ion; })},
             {"sigma_rec_m2", real_in([](RunConfig& c) -> double& { return c.material.sigma_rec; })},
             {"photoioniz_fwhm_hz", real_in([](RunConfig& c) -> double& { return c.material.photoioniz_fwhm; })},
             {"vac_wavelength_m", real_in([](RunConfig& c) -> double& { return c.material.vac_wavelength; })},
             {"refr_index", real_in([](RunConfig& c) -> double& { return c.material.refr_index; })},
             {"hom_linewidth0_hz", real_in([](RunConfig& c) -> double& { return c.material.hom_linewidth0; })},
             {"ion_density_per_m3_per_hz", real_in([](RunConfig& c) -> double& { return c.material.ion_density; })},
             {"fluor_rate_per_s", real_in([](RunConfig& c) -> double& { return c.material.fluor_rate; })},
             {"g_ratio", real_in([](RunConfig& c) -> double& { return c.material.g_ratio; })},
             {"coll0", real_in([](RunConfig& c) -> double& { return c.material.coll0; })},
         }},
        {"rates",
         {
             {"model",
              [](RunConfig& c, const std::string& k, const std::string& v) {
                  if (v == "reference")
                      c.rates.model = RateModelKind::Reference;
                  else if (v == "cross_sections")
                      c.rates.model = RateModelKind::CrossSections;
                  else
                      throw InputError("config key '" + k + "' must be reference or cross_sections");
              }},
             {"gamma_ion_ref_per_s", real_in([](RunConfig& c) -> double& { return c.rates.gamma_ion_ref; })},
             {"ref_power_w", real_in([](RunConfig& c) -> double& { return c.rates.ref_power; })},
             {"gamma_rec_spon_per_s", real_in([](RunConfig& c) -> double& { return c.rates.gamma_rec_spon; })},
             {"gamma_trap_per_s", real_in([](RunConfig& c) -> double& { return c.rates.gamma_trap; })},
         }},
        {"beam",
         {
             {"power_w", real(&RunConfig::power)},
             {"focus_fwhm_m", real(&RunConfig::focus_fwhm)},
         }},
        {"integration",
         {
             {"r_max_m", real_in([](RunConfig& c) -> double& { return c.domain.r_max; })},
             {"z_halfwidth_m", real_in([](RunConfig& c) -> double& { return c.domain.z_halfwidth; })},
             {"delta_halfwidth_hz", real_in([](RunConfig& c) -> double& { return c.domain.delta_halfwidth; })},
             {"n_r", count_in([](RunConfig& c) -> std::size_t& { return c.domain.n_r; })},
             {"n_z", count_in([](RunConfig& c) -> std::size_t& { return c.domain.n_z; })},
             {"n_delta", count_in([](RunConfig& c) -> std::size_t& { return c.domain.n_delta; })},
             {"rel_tol", real(&RunConfig::rel_tol)},
             {"max_refinements", count_in([](RunConfig& c) -> int& { return c.max_refinements; })},
             {"bin_rel_width", real_in([](RunConfig& c) -> double& { return c.spectrum.bin_rel_width; })},
         }},
        {"signal",
         {
             {"scale_a", real(&RunConfig::scale_a)},
             {"background_b_counts_per_s_per_w", real(&RunConfig::background_b)},
         }},
        {"fit",
         {
             {"max_iterations", count_in([](RunConfig& c) -> int& { return c.fit.max_iterations; })},
             {"x_tol", real_in([](RunConfig& c) -> double& { return c.fit.x_tol; })},
             {"f_tol", real_in([](RunConfig& c) -> double& { return c.fit.f_tol; })},
             {"gamma_seed_per_s", real_in([](RunConfig& c) -> double& { return c.fit.gamma_seed; })},
             {"confidence", real_in([](RunConfig& c) -> double& { return c.fit.confidence; })},
         }},
        {"zeeman",
         {
             {"g_ground_hz_per_t", real_in([](RunConfig& c) -> double& { return c.zeeman.g_ground; })},
             {"g_excited_hz_per_t", real_in([](RunConfig& c) -> double& { return c.zeeman.g_excited; })},
             {"stray_field_t", real_in([](RunConfig& c) -> double& { return c.zeeman.stray_field; })},
             {"field_sign",
              [](RunConfig& c, const std::string& k, const std::string& v) {
                  const auto s = to_integer(k, v);
                  if (s != 1 && s != -1) throw InputError("config key '" + k + "' must be 1 or -1");
                  c.zeeman.field_sign = static_cast<int>(s);
              }},
         }},
    };
    return table;
}

} // namespace

void RunConfig::validate() const {
    material.validate();
    if (!(rates.gamma_trap >= 0.0)) throw InputError("rates.gamma_trap_per_s must be >= 0");
    if (!(rates.gamma_rec_spon >= 0.0)) throw InputError("rates.gamma_rec_spon_per_s must be >= 0");
    if (rates.model == RateModelKind::Reference &&
        (!(rates.gamma_ion_ref > 0.0) || !(rates.ref_power > 0.0)))
        throw InputError("rates.gamma_ion_ref_per_s and rates.ref_power_w must be > 0");
    BeamGeometry::make(power, focus_fwhm, material);
    domain.validate();
    if (!(rel_tol >= 0.0)) throw InputError("integration.rel_tol must be >= 0");
    if (!(spectrum.bin_rel_width >= 0.0)) throw InputError("integration.bin_rel_width must be >= 0");
    ScaledSignalParams{scale_a, background_b, power}.validate();
    if (fit.max_iterations < 1) throw InputError("fit.max_iterations must be >= 1");
    if (!(fit.x_tol > 0.0) || !(fit.f_tol > 0.0)) throw InputError("fit tolerances must be > 0");
    if (!(fit.gamma_seed > 0.0)) throw InputError("fit.gamma_seed_per_s must be > 0");
    if (!(fit.confidence > 0.0 && fit.confidence < 1.0))
        throw InputError("fit.confidence must lie in (0, 1)");
    zeeman.validate();
}

TrapModel RunConfig::trap_model() const {
    if (rates.model == RateModelKind::CrossSections) return TrapModel::from_cross_sections(material);
    const auto ref = BeamGeometry::make(rates.ref_power, focus_fwhm, material);
    return TrapModel::from_reference_rates(material, rates.gamma_ion_ref, ref.peak_intensity(),
                                           rates.gamma_rec_spon);
}

BeamGeometry RunConfig::beam(double power_w) const {
    return BeamGeometry::make(power_w, focus_fwhm, material);
}

SimplexOptions RunConfig::simplex() const {
    SimplexOptions o;
    o.max_iterations = fit.max_iterations;
    o.x_tol = fit.x_tol;
    o.f_tol = fit.f_tol;
    return o;
}

nlohmann::json RunConfig::to_json() const {
    using nlohmann::json;
    return json{
        {"source", source},
        {"material",
         {{"sat_intensity_w_per_m2", material.sat_intensity},
          {"sigma_ion_m2", material.sigma_ion},
          {"sigma_rec_m2", material.sigma_rec},
          {"photoioniz_fwhm_hz", material.photoioniz_fwhm},
          {"vac_wavelength_m", material.vac_wavelength},
          {"refr_index", material.refr_index},
          {"hom_linewidth0_hz", material.hom_linewidth0},
          {"ion_density_per_m3_per_hz", material.ion_density},
          {"fluor_rate_per_s", material.fluor_rate},
          {"g_ratio", material.g_ratio},
          {"coll0", material.coll0}}},
        {"rates",
         {{"model", rates.model == RateModelKind::Reference ? "reference" : "cross_sections"},
          {"gamma_ion_ref_per_s", rates.gamma_ion_ref},
          {"ref_power_w", rates.ref_power},
          {"gamma_rec_spon_per_s", rates.gamma_rec_spon},
          {"gamma_trap_per_s", rates.gamma_trap}}},
        {"beam", {{"power_w", power}, {"focus_fwhm_m", focus_fwhm}}},
        {"integration",
         {{"r_max_m", domain.r_max},
          {"z_halfwidth_m", domain.z_halfwidth},
          {"delta_halfwidth_hz", domain.delta_halfwidth},
          {"n_r", domain.n_r},
          {"n_z", domain.n_z},
          {"n_delta", domain.n_delta},
          {"rel_tol", rel_tol},
          {"max_refinements", max_refinements},
          {"bin_rel_width", spectrum.bin_rel_width}}},
        {"signal", {{"scale_a", scale_a}, {"background_b_counts_per_s_per_w", background_b}}},
        {"fit",
         {{"max_iterations", fit.max_iterations},
          {"x_tol", fit.x_tol},
          {"f_tol", fit.f_tol},
          {"gamma_seed_per_s", fit.gamma_seed},
          {"confidence", fit.confidence}}},
        {"zeeman",
         {{"g_ground_hz_per_t", zeeman.g_ground},
          {"g_excited_hz_per_t", zeeman.g_excited},
          {"stray_field_t", zeeman.stray_field},
          {"field_sign", zeeman.field_sign}}},
    };
}

RunConfig parse_run_config(std::istream& in, const std::string& source) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw InputError(source + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
    }

    RunConfig cfg;
    cfg.source = source;
    const auto& table = bindings();
    for (const auto& [section, keys] : tree) {
        const auto sec = table.find(section);
        if (sec == table.end() || keys.empty())
            throw InputError(source + ": unknown config section or top-level key '" + section + "'");
        for (const auto& [key, node] : keys) {
            const auto it = sec->second.find(key);
            if (it == sec->second.end())
                throw InputError(source + ": unknown config key '" + section + "." + key + "'");
            it->second(cfg, section + "." + key, node.get_value<std::string>());
        }
    }
    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config file '" + path.string() + "'");
    return parse_run_config(in, path.string());
}

} // namespace holeburn::cli
