#pragma once

// Closed-form pieces of the four-level (4f, 5d, conduction band, trap)
// rate-equation model. The first three levels are in steady state at every
// instant; only the trap population evolves.

#include <optional>

namespace holeburn {

// Fixed constants of the crystal and the 4f-5d transition, SI units.
struct MaterialParams {
    double sat_intensity = 1.4e7;       // W/m^2
    double sigma_ion = 1e-22;           // m^2, 5d -> conduction band
    double sigma_rec = 1e-20;           // m^2, conduction band -> 5d
    double photoioniz_fwhm = 82e12;     // Hz
    double vac_wavelength = 371e-9;     // m, excitation and de-excitation
    double refr_index = 1.8;
    double hom_linewidth0 = 4e6;        // Hz
    double ion_density = 6e10;          // ions / m^3 / Hz
    double fluor_rate = 1.0 / 40e-9;    // 1/s, inverse 5d lifetime
    double g_ratio = 1.0;               // g_5d / g_cb
    double coll0 = 0.016;               // peak collection efficiency

    // Throws InputError on any violated invariant.
    void validate() const;
};

class BeamGeometry {
public:
    // Gaussian TEM00 focus specified by its intensity FWHM in the crystal.
    static BeamGeometry make(double power, double focus_fwhm, double vac_wavelength,
                             double refr_index);
    static BeamGeometry make(double power, double focus_fwhm, const MaterialParams& m) {
        return make(power, focus_fwhm, m.vac_wavelength, m.refr_index);
    }

    double power() const { return power_; }
    double focus_fwhm() const { return focus_fwhm_; }
    double waist() const { return waist_; }
    double rayleigh() const { return rayleigh_; }

    double radius_at(double z) const;
    double peak_intensity() const;

    BeamGeometry with_power(double power) const;

private:
    double power_ = 0.0;
    double focus_fwhm_ = 0.0;
    double waist_ = 0.0;
    double rayleigh_ = 0.0;
    double vac_wavelength_ = 0.0;
    double refr_index_ = 1.0;
};

struct RateSet {
    double gamma_ion = 0.0;
    double gamma_rec_stim = 0.0;
    double gamma_rec_spon = 0.0;
    double gamma_trap = 0.0;
};

struct PopulationState {
    double n_4f = 0.0;
    double n_5d = 0.0;
    double n_cb = 0.0;
    double n_trap = 0.0;
    double total = 0.0;
};

// N_4f / N_5d for a two-level system driven at i_exc. An unexcited point
// (i_exc == 0, or so small the ratio overflows) yields nullopt: it is dark.
std::optional<double> saturation_ratio(double i_exc, double i_sat);

double photon_energy(double wavelength);
double ionization_rate(double intensity, double sigma_ion, double wavelength);
double spont_recombination_rate(double sigma_rec, double delta_f, double lambda_deex,
                                double g_ratio);

// R2 = N_5d / N_cb. nullopt when gamma_ion == 0: no conduction-band coupling.
std::optional<double> cb_ratio(double gamma_rec_spon, double gamma_ion);

// k = N_cb / (N - N_T).
double steady_state_fractions(double r1, double r2);

double trapped_fraction(double t, double gamma_trap, double k);
double excited_population(double t, double n_total, double r2, double k, double gamma_trap);

double beam_intensity(double r, double z, const BeamGeometry& geom);
double collection_efficiency(double r, double z, const BeamGeometry& geom, double coll0);

double power_broadened_linewidth(double i_exc, const MaterialParams& params);
double detuned_intensity(double i_exc, double delta, double gamma_hom);

// Steady-state quantities at one (point, detuning), independent of time and
// of the trapping rate. n5d_fraction is R2*k: N_5d = n5d_fraction * (N - N_T).
struct LocalSteadyState {
    double r1 = 0.0;
    double k = 0.0;
    double n5d_fraction = 0.0;
    bool dark = true;
};

// The material plus the conduction-band decay rate actually used. The
// spontaneous rate is a free parameter of the model: it can be derived from
// sigma_rec or set directly.
struct TrapModel {
    MaterialParams material;
    double gamma_rec_spon = 0.0;

    static TrapModel from_cross_sections(const MaterialParams& m);

    // Rescales sigma_ion so that ionization_rate(ref_intensity) == gamma_ion_ref.
    static TrapModel from_reference_rates(MaterialParams m, double gamma_ion_ref,
                                          double ref_intensity, double gamma_rec_spon);

    RateSet local_rates(double intensity, double gamma_trap) const;

    // i_exc: detuned 4f-5d intensity; i_ion: 5d-cb intensity at the point.
    LocalSteadyState local_state(double i_exc, double i_ion) const;

    PopulationState populations(double t, const LocalSteadyState& s, double gamma_trap) const;

    void validate() const;
};

// Reference rates for the 200 uW maximum beam: gamma_ion = gamma_rec_stim = 3e4 /s
// at the peak intensity, gamma_rec_spon = 2e8 /s.
inline constexpr double kReferencePower = 200e-6;
inline constexpr double kReferenceGammaIon = 3e4;
inline constexpr double kReferenceGammaRecSpon = 2e8;
inline constexpr double kDefaultFocusFwhm = 1e-6;

TrapModel reference_rate_model(const MaterialParams& m = {},
                               double focus_fwhm = kDefaultFocusFwhm);

} // namespace holeburn
