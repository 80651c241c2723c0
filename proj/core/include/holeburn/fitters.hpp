#pragma once

#include <optional>
#include <span>
#include <vector>

#include "holeburn/data.hpp"
#include "holeburn/integrator.hpp"
#include "holeburn/model.hpp"
#include "holeburn/simplex.hpp"

namespace holeburn {

// ---------------------------------------------------------------------------
// Trap model: S_scaled,c(t) = A_c * S(t; P_c, gamma_trap) + B * P_c
// ---------------------------------------------------------------------------

struct TrapCurve {
    DecayCurve curve;
    double power = 0.0; // W
};

struct TrapFitConfig {
    TrapModel model = reference_rate_model();
    double focus_fwhm = kDefaultFocusFwhm;
    IntegrationDomain domain;
    SpectrumOptions spectrum;
    SimplexOptions simplex;
    double gamma_seed = 1e5; // 1/s
};

struct TrapFitResult {
    double gamma_trap = 0.0;
    double background_b = 0.0;
    std::vector<double> scale_a;
    double residual = 0.0; // sum of squared errors
    double gamma_trap_sigma = 0.0;
    double background_b_sigma = 0.0;
    std::vector<double> scale_a_sigma;
    bool background_clamped = false;
    bool converged = false;
    int iterations = 0;
    int evaluations = 0;
};

TrapFitResult fit_trap_model(std::span<const TrapCurve> curves, const TrapFitConfig& cfg = {});

// Same fit against precomputed decay spectra, one per curve.
TrapFitResult fit_trap_model(std::span<const TrapCurve> curves,
                             std::span<const DecaySpectrum> spectra,
                             const SimplexOptions& simplex, double gamma_seed);

// ---------------------------------------------------------------------------
// Spectral hole: c - d * (w/2)^2 / ((f - f0)^2 + (w/2)^2)
// ---------------------------------------------------------------------------

struct LorentzianHoleFit {
    double baseline = 0.0;
    double depth = 0.0;
    double center = 0.0; // Hz
    double fwhm = 0.0;   // Hz
    double baseline_sigma = 0.0;
    double depth_sigma = 0.0;
    double center_sigma = 0.0;
    double fwhm_sigma = 0.0;
    double residual = 0.0;
    bool hole_detected = false;
    bool converged = false;
    int iterations = 0;

    double evaluate(double f) const;
};

LorentzianHoleFit fit_hole_lorentzian(std::span<const double> freq, std::span<const double> signal,
                                      std::span<const double> sigma_point = {},
                                      const SimplexOptions& opts = {});

double hom_linewidth_from_hole(double fwhm);

// ---------------------------------------------------------------------------
// a * exp(-t / tau) (+ c)
// ---------------------------------------------------------------------------

struct ExpDecayFit {
    double amplitude = 0.0;
    double tau = 0.0;
    double offset = 0.0;
    double amplitude_sigma = 0.0;
    double tau_sigma = 0.0;
    double offset_sigma = 0.0;
    bool with_offset = false;
    double residual = 0.0;
    bool converged = false;
    int iterations = 0;

    double evaluate(double t) const;
};

ExpDecayFit fit_exponential(std::span<const double> times, std::span<const double> values,
                            bool with_offset, std::span<const double> sigma = {},
                            const SimplexOptions& opts = {});

// ---------------------------------------------------------------------------
// Ordinary least squares line with Student-t confidence intervals.
// ---------------------------------------------------------------------------

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double confidence = 0.80;
    double slope_ci = 0.0;     // half-width
    double intercept_ci = 0.0; // half-width
    double slope_se = 0.0;
    double intercept_se = 0.0;
    double residual = 0.0;
    int dof = 0;
};

LinearFit fit_linear_ci(std::span<const double> x, std::span<const double> y,
                        double confidence = 0.80);

} // namespace holeburn
