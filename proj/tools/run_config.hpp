#pragma once

// INI-style run configuration. Every physical quantity is SI with the unit
// in the key name. Unknown sections or keys are rejected.
//
//   [material]     sat_intensity_w_per_m2, sigma_ion_m2, sigma_rec_m2,
//                  photoioniz_fwhm_hz, vac_wavelength_m, refr_index,
//                  hom_linewidth0_hz, ion_density_per_m3_per_hz,
//                  fluor_rate_per_s, g_ratio, coll0
//   [rates]        model (reference | cross_sections), gamma_ion_ref_per_s,
//                  ref_power_w, gamma_rec_spon_per_s, gamma_trap_per_s
//   [beam]         power_w, focus_fwhm_m
//   [integration]  r_max_m, z_halfwidth_m, delta_halfwidth_hz, n_r, n_z,
//                  n_delta, rel_tol, max_refinements, bin_rel_width
//   [signal]       scale_a, background_b_counts_per_s_per_w
//   [fit]          max_iterations, x_tol, f_tol, gamma_seed_per_s, confidence
//   [zeeman]       g_ground_hz_per_t, g_excited_hz_per_t, stray_field_t,
//                  field_sign

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "holeburn/integrator.hpp"
#include "holeburn/model.hpp"
#include "holeburn/simplex.hpp"
#include "holeburn/zeeman.hpp"

namespace holeburn::cli {

enum class RateModelKind { Reference, CrossSections };

struct RateSettings {
    RateModelKind model = RateModelKind::Reference;
    double gamma_ion_ref = kReferenceGammaIon;   // 1/s at the peak of ref_power
    double ref_power = kReferencePower;          // W
    double gamma_rec_spon = kReferenceGammaRecSpon; // 1/s
    double gamma_trap = 7e4;                     // 1/s
};

struct FitSettings {
    int max_iterations = 2000;
    double x_tol = 1e-8;
    double f_tol = 1e-8;
    double gamma_seed = 1e5;
    double confidence = 0.80;
};

struct RunConfig {
    MaterialParams material;
    RateSettings rates;
    double power = 20e-6;      // W
    double focus_fwhm = kDefaultFocusFwhm;
    IntegrationDomain domain;
    double rel_tol = 0.005;
    int max_refinements = 4;
    SpectrumOptions spectrum;
    double scale_a = 0.19;
    double background_b = 9.4e7;
    FitSettings fit;
    ZeemanConfig zeeman;
    std::string source = "<defaults>";

    void validate() const;
    TrapModel trap_model() const;
    BeamGeometry beam(double power_w) const;
    SimplexOptions simplex() const;
    nlohmann::json to_json() const;
};

RunConfig parse_run_config(std::istream& in, const std::string& source = "<stream>");
RunConfig load_run_config(const std::filesystem::path& path);

} // namespace holeburn::cli
