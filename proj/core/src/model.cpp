#include "holeburn/model.hpp"

#include <cmath>
#include <string>

#include "holeburn/constants.hpp"
#include "holeburn/errors.hpp"

namespace holeburn {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw InputError(std::string(name) + " must be finite and > 0, got " + std::to_string(v));
}

double sq(double x) { return x * x; }

} // namespace

void MaterialParams::validate() const {
    require_positive(sat_intensity, "sat_intensity");
    require_positive(sigma_ion, "sigma_ion");
    require_positive(sigma_rec, "sigma_rec");
    require_positive(photoioniz_fwhm, "photoioniz_fwhm");
    require_positive(vac_wavelength, "vac_wavelength");
    require_positive(refr_index, "refr_index");
    require_positive(hom_linewidth0, "hom_linewidth0");
    require_positive(ion_density, "ion_density");
    require_positive(fluor_rate, "fluor_rate");
    require_positive(g_ratio, "g_ratio");
    require_positive(coll0, "coll0");
    if (coll0 > 1.0) throw InputError("coll0 must lie in (0, 1]");
}

BeamGeometry BeamGeometry::make(double power, double focus_fwhm, double vac_wavelength,
                                double refr_index) {
    if (!(power >= 0.0) || !std::isfinite(power)) throw InputError("beam power must be >= 0");
    require_positive(focus_fwhm, "focus_fwhm");
    require_positive(vac_wavelength, "vac_wavelength");
    require_positive(refr_index, "refr_index");

    BeamGeometry g;
    g.power_ = power;
    g.focus_fwhm_ = focus_fwhm;
    g.vac_wavelength_ = vac_wavelength;
    g.refr_index_ = refr_index;
    g.waist_ = focus_fwhm / std::sqrt(2.0 * std::log(2.0));
    g.rayleigh_ = constants::pi * sq(g.waist_) / (vac_wavelength / refr_index);
    return g;
}

double BeamGeometry::radius_at(double z) const {
    return waist_ * std::sqrt(1.0 + sq(z / rayleigh_));
}

double BeamGeometry::peak_intensity() const {
    return 2.0 * power_ / (constants::pi * sq(waist_));
}

BeamGeometry BeamGeometry::with_power(double power) const {
    return make(power, focus_fwhm_, vac_wavelength_, refr_index_);
}

std::optional<double> saturation_ratio(double i_exc, double i_sat) {
    if (!(i_sat > 0.0)) throw InputError("saturation intensity must be > 0");
    if (!(i_exc > 0.0)) return std::nullopt;
    const double r1 = 1.0 + 2.0 * i_sat / i_exc;
    if (!std::isfinite(r1)) return std::nullopt;
    return r1;
}

double photon_energy(double wavelength) {
    return constants::planck * constants::speed_of_light / wavelength;
}

double ionization_rate(double intensity, double sigma_ion, double wavelength) {
    if (intensity <= 0.0 || sigma_ion <= 0.0) return 0.0;
    return sigma_ion * intensity / photon_energy(wavelength);
}

double spont_recombination_rate(double sigma_rec, double delta_f, double lambda_deex,
                                double g_ratio) {
    // Integrated cross-section over angular frequency, flat-top approximation.
    const double sigma0 = sigma_rec * 2.0 * constants::pi * delta_f;
    return 4.0 * sigma0 / sq(lambda_deex) * g_ratio;
}

std::optional<double> cb_ratio(double gamma_rec_spon, double gamma_ion) {
    if (!(gamma_ion > 0.0)) return std::nullopt;
    return 1.0 + gamma_rec_spon / gamma_ion;
}

double steady_state_fractions(double r1, double r2) {
    if (!(r1 >= 1.0) || !(r2 >= 1.0)) throw InputError("steady_state_fractions needs r1, r2 >= 1");
    if (std::isinf(r2)) return 0.0;
    return 1.0 / (r1 * r2 + r2 + 1.0);
}

double trapped_fraction(double t, double gamma_trap, double k) {
    return -std::expm1(-gamma_trap * k * t);
}

double excited_population(double t, double n_total, double r2, double k, double gamma_trap) {
    return r2 * k * n_total * std::exp(-gamma_trap * k * t);
}

double beam_intensity(double r, double z, const BeamGeometry& geom) {
    const double w = geom.radius_at(z);
    return geom.peak_intensity() * sq(geom.waist() / w) * std::exp(-2.0 * sq(r) / sq(w));
}

double collection_efficiency(double r, double z, const BeamGeometry& geom, double coll0) {
    const double w = geom.radius_at(z);
    return coll0 * sq(geom.waist() / w) * std::exp(-2.0 * sq(r) / sq(w));
}

double power_broadened_linewidth(double i_exc, const MaterialParams& params) {
    return params.hom_linewidth0 * std::sqrt(1.0 + i_exc / params.sat_intensity);
}

double detuned_intensity(double i_exc, double delta, double gamma_hom) {
    if (!(gamma_hom > 0.0)) throw InputError("homogeneous linewidth must be > 0");
    const double half = 0.5 * gamma_hom;
    return i_exc * sq(half) / (sq(delta) + sq(half));
}

TrapModel TrapModel::from_cross_sections(const MaterialParams& m) {
    m.validate();
    return TrapModel{m, spont_recombination_rate(m.sigma_rec, m.photoioniz_fwhm,
                                                 m.vac_wavelength, m.g_ratio)};
}

TrapModel TrapModel::from_reference_rates(MaterialParams m, double gamma_ion_ref,
                                          double ref_intensity, double gamma_rec_spon) {
    require_positive(gamma_ion_ref, "gamma_ion_ref");
    require_positive(ref_intensity, "ref_intensity");
    m.sigma_ion = gamma_ion_ref * photon_energy(m.vac_wavelength) / ref_intensity;
    TrapModel model{m, gamma_rec_spon};
    model.validate();
    return model;
}

void TrapModel::validate() const {
    material.validate();
    if (!(gamma_rec_spon >= 0.0) || !std::isfinite(gamma_rec_spon))
        throw InputError("gamma_rec_spon must be finite and >= 0");
}

RateSet TrapModel::local_rates(double intensity, double gamma_trap) const {
    const double g_ion = ionization_rate(intensity, material.sigma_ion, material.vac_wavelength);
    return RateSet{g_ion, g_ion, gamma_rec_spon, gamma_trap};
}

LocalSteadyState TrapModel::local_state(double i_exc, double i_ion) const {
    LocalSteadyState s;
    const auto r1 = saturation_ratio(i_exc, material.sat_intensity);
    if (!r1) return s;
    s.r1 = *r1;
    s.dark = false;

    const double g_ion = ionization_rate(i_ion, material.sigma_ion, material.vac_wavelength);
    if (!(g_ion > 0.0)) {
        // Two-level steady state, nothing reaches the conduction band.
        s.k = 0.0;
        s.n5d_fraction = 1.0 / (s.r1 + 1.0);
        return s;
    }
    // R2*k = 1 / (R1 + 1 + 1/R2) and k = (1/R2) * R2*k; this form stays finite
    // when R2 is huge (weak ionization).
    const double inv_r2 = g_ion / (g_ion + gamma_rec_spon);
    s.n5d_fraction = 1.0 / (s.r1 + 1.0 + inv_r2);
    s.k = inv_r2 * s.n5d_fraction;
    return s;
}

PopulationState TrapModel::populations(double t, const LocalSteadyState& s,
                                       double gamma_trap) const {
    PopulationState p;
    p.total = material.ion_density;
    if (s.dark) {
        p.n_4f = p.total;
        return p;
    }
    const double x = gamma_trap * s.k * t;
    const double untrapped = p.total * std::exp(-x);
    p.n_trap = p.total * -std::expm1(-x);
    p.n_5d = s.n5d_fraction * untrapped;
    p.n_cb = s.k * untrapped;
    p.n_4f = s.r1 * p.n_5d;
    return p;
}

TrapModel reference_rate_model(const MaterialParams& m, double focus_fwhm) {
    const auto geom = BeamGeometry::make(kReferencePower, focus_fwhm, m);
    return TrapModel::from_reference_rates(m, kReferenceGammaIon, geom.peak_intensity(),
                                           kReferenceGammaRecSpon);
}

} // namespace holeburn
