#pragma once

// Detected fluorescence S(t): local 5d fluorescence times collection
// efficiency, integrated over the focal volume (r, theta, z) and over the
// inhomogeneous detuning. The theta integral is the constant factor 2*pi.
//
// Every grid point decays as exp(-gamma_trap * k * t) with a k that does not
// depend on gamma_trap, so the integral is first reduced to a spectrum of
// decay coefficients. S(t) for any gamma_trap is then a short sum over it.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "holeburn/model.hpp"

namespace holeburn {

enum class SpectralMode {
    Integrated,  // midpoint grid over [-delta_halfwidth, +delta_halfwidth]
    OnResonance, // single detuning Delta = 0, unit weight
};

struct IntegrationDomain {
    double r_max = 4e-6;
    double z_halfwidth = 60e-6;
    double delta_halfwidth = 100e6;
    std::size_t n_r = 32;
    std::size_t n_z = 64;
    std::size_t n_delta = 128;
    SpectralMode spectral = SpectralMode::Integrated;

    static constexpr std::size_t kMinCount = 8;

    void validate() const;
    IntegrationDomain doubled() const;
    IntegrationDomain widened(double factor) const;
    std::size_t points() const;
};

// Spatial excitation intensity and collection efficiency as functions of (r, z).
struct SpatialProfile {
    std::function<double(double r, double z)> intensity;
    std::function<double(double r, double z)> collection;

    static SpatialProfile gaussian(const BeamGeometry& geom, double coll0);
};

// S(t) = constant + sum_i amplitude_i * exp(-gamma_trap * rate_i * t).
class DecaySpectrum {
public:
    struct Component {
        double rate = 0.0;      // k, dimensionless
        double amplitude = 0.0; // model signal units
    };

    DecaySpectrum() = default;
    DecaySpectrum(std::vector<Component> components, double constant);

    double evaluate(double t, double gamma_trap) const;
    std::vector<double> evaluate(std::span<const double> t, double gamma_trap) const;

    // S(0).
    double total() const;
    double constant() const { return constant_; }
    const std::vector<Component>& components() const { return components_; }
    bool has_trapping() const;

private:
    std::vector<Component> components_;
    double constant_ = 0.0;
};

struct SpectrumOptions {
    // Grid points whose k agree to this relative width share one component
    // (amplitude-weighted mean k). The induced absolute error in S(t) is
    // below bin_rel_width^2 * S(0) / 3. 0 keeps every grid point.
    double bin_rel_width = 1e-3;
};

DecaySpectrum build_spectrum(const TrapModel& model, const SpatialProfile& profile,
                             const IntegrationDomain& domain, const SpectrumOptions& opts = {});

DecaySpectrum build_spectrum(const TrapModel& model, const BeamGeometry& geom,
                             const IntegrationDomain& domain, const SpectrumOptions& opts = {});

struct SignalResult {
    std::vector<double> times;
    std::vector<double> model_signal;
    IntegrationDomain domain;
    double gamma_trap = 0.0;
    // Max relative change against the previous refinement level; NaN when
    // the signal came from a single, unrefined grid.
    double achieved_rel_tol = 0.0;
    int refinements = 0;
    bool converged = true;
    std::vector<std::string> warnings;
};

// Heuristic resolution check of a grid against the beam and linewidth scales.
std::vector<std::string> resolution_warnings(const IntegrationDomain& domain,
                                             const BeamGeometry& geom,
                                             const MaterialParams& material);

SignalResult detected_signal(std::span<const double> t_grid, const TrapModel& model,
                             const BeamGeometry& geom, double gamma_trap,
                             const IntegrationDomain& domain, const SpectrumOptions& opts = {});

SignalResult detected_signal(std::span<const double> t_grid, const TrapModel& model,
                             const SpatialProfile& profile, double gamma_trap,
                             const IntegrationDomain& domain, const SpectrumOptions& opts = {});

struct ScaledSignalParams {
    double scale_a = 0.19;        // detected counts per model-signal unit
    double background_b = 9.4e7;  // detected counts / s / W
    double power = 20e-6;         // W

    void validate() const;
};

std::vector<double> scaled_signal(std::span<const double> s_model, const ScaledSignalParams& p);

// Doubles every grid count until the max relative change of S(t) between
// successive levels drops below rel_tol. Throws ConvergenceError if
// max_refinements doublings do not get there (or rel_tol <= 0).
SignalResult refine_until_converged(std::span<const double> t_grid, const TrapModel& model,
                                    const BeamGeometry& geom, double gamma_trap,
                                    const IntegrationDomain& start, double rel_tol,
                                    int max_refinements = 4, const SpectrumOptions& opts = {});

SignalResult refine_until_converged(std::span<const double> t_grid, const TrapModel& model,
                                    const SpatialProfile& profile, double gamma_trap,
                                    const IntegrationDomain& start, double rel_tol,
                                    int max_refinements = 4, const SpectrumOptions& opts = {});

double max_relative_change(std::span<const double> a, std::span<const double> b);

} // namespace holeburn
