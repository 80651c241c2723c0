#include "holeburn/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_map>

#include "holeburn/constants.hpp"
#include "holeburn/errors.hpp"

namespace holeburn {

void IntegrationDomain::validate() const {
    if (!(r_max > 0.0) || !(z_halfwidth > 0.0) || !(delta_halfwidth > 0.0))
        throw InputError("integration limits must be > 0");
    if (n_r < kMinCount || n_z < kMinCount ||
        (spectral == SpectralMode::Integrated && n_delta < kMinCount))
        throw InputError("integration grid counts must be >= 8");
}

IntegrationDomain IntegrationDomain::doubled() const {
    IntegrationDomain d = *this;
    d.n_r *= 2;
    d.n_z *= 2;
    if (spectral == SpectralMode::Integrated) d.n_delta *= 2;
    return d;
}

IntegrationDomain IntegrationDomain::widened(double factor) const {
    if (!(factor > 0.0)) throw InputError("widening factor must be > 0");
    IntegrationDomain d = *this;
    d.r_max *= factor;
    d.z_halfwidth *= factor;
    d.delta_halfwidth *= factor;
    // Keep the grid spacing fixed.
    auto scale = [factor](std::size_t n) {
        return static_cast<std::size_t>(std::ceil(static_cast<double>(n) * factor - 1e-9));
    };
    d.n_r = scale(n_r);
    d.n_z = scale(n_z);
    if (spectral == SpectralMode::Integrated) d.n_delta = scale(n_delta);
    return d;
}

std::size_t IntegrationDomain::points() const {
    return n_r * n_z * (spectral == SpectralMode::Integrated ? n_delta : 1);
}

SpatialProfile SpatialProfile::gaussian(const BeamGeometry& geom, double coll0) {
    return SpatialProfile{
        [geom](double r, double z) { return beam_intensity(r, z, geom); },
        [geom, coll0](double r, double z) { return collection_efficiency(r, z, geom, coll0); },
    };
}

DecaySpectrum::DecaySpectrum(std::vector<Component> components, double constant)
    : components_(std::move(components)), constant_(constant) {}

double DecaySpectrum::evaluate(double t, double gamma_trap) const {
    double s = 0.0;
    for (const auto& c : components_) s += c.amplitude * std::exp(-gamma_trap * c.rate * t);
    return constant_ + s;
}

std::vector<double> DecaySpectrum::evaluate(std::span<const double> t, double gamma_trap) const {
    std::vector<double> out(t.size(), constant_);
    if (t.empty()) return out;

    // Uniform grids: exp(-g k (t0 + i dt)) by repeated multiplication.
    const std::size_t n = t.size();
    const double dt = n > 1 ? (t[n - 1] - t[0]) / static_cast<double>(n - 1) : 0.0;
    const double scale = std::max(std::abs(t[0]), std::abs(t[n - 1]));
    bool uniform = n > 2 && dt > 0.0;
    for (std::size_t i = 1; uniform && i + 1 < n; ++i)
        uniform = std::abs(t[i] - (t[0] + static_cast<double>(i) * dt)) <= 1e-12 * scale;
    if (!uniform) {
        std::transform(t.begin(), t.end(), out.begin(),
                       [&](double ti) { return evaluate(ti, gamma_trap); });
        return out;
    }
    for (const auto& c : components_) {
        const double g = gamma_trap * c.rate;
        const double q = std::exp(-g * dt);
        double term = c.amplitude * std::exp(-g * t[0]);
        for (std::size_t i = 0; i < n && term > 1e-300; ++i) {
            out[i] += term;
            term *= q;
        }
    }
    return out;
}

double DecaySpectrum::total() const {
    double s = constant_;
    for (const auto& c : components_) s += c.amplitude;
    return s;
}

bool DecaySpectrum::has_trapping() const {
    return std::any_of(components_.begin(), components_.end(),
                       [](const Component& c) { return c.rate > 0.0 && c.amplitude > 0.0; });
}

namespace {

// Accumulates (k, amplitude) pairs into log-spaced bins of k.
class SpectrumAccumulator {
public:
    explicit SpectrumAccumulator(double bin_rel_width)
        : exact_(bin_rel_width <= 0.0),
          inv_log_step_(exact_ ? 0.0 : 1.0 / std::log1p(bin_rel_width)) {}

    void add(double k, double amplitude) {
        if (!(amplitude > 0.0)) return;
        if (!(k > 0.0)) {
            constant_ += amplitude;
            return;
        }
        if (exact_) {
            raw_.push_back({k, amplitude});
            return;
        }
        const auto key = static_cast<std::int64_t>(std::floor(std::log(k) * inv_log_step_));
        auto& b = bins_[key];
        b.amplitude += amplitude;
        b.moment += amplitude * k;
    }

    DecaySpectrum finish() && {
        if (exact_) return DecaySpectrum(std::move(raw_), constant_);
        std::vector<std::pair<std::int64_t, Bin>> sorted(bins_.begin(), bins_.end());
        std::sort(sorted.begin(), sorted.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        std::vector<DecaySpectrum::Component> comps;
        comps.reserve(sorted.size());
        for (const auto& [key, b] : sorted) comps.push_back({b.moment / b.amplitude, b.amplitude});
        return DecaySpectrum(std::move(comps), constant_);
    }

private:
    struct Bin {
        double amplitude = 0.0;
        double moment = 0.0;
    };
    bool exact_;
    double inv_log_step_;
    double constant_ = 0.0;
    std::unordered_map<std::int64_t, Bin> bins_;
    std::vector<DecaySpectrum::Component> raw_;
};

} // namespace

DecaySpectrum build_spectrum(const TrapModel& model, const SpatialProfile& profile,
                             const IntegrationDomain& domain, const SpectrumOptions& opts) {
    domain.validate();
    model.validate();
    const auto& mat = model.material;

    const double dr = domain.r_max / static_cast<double>(domain.n_r);
    const double dz = 2.0 * domain.z_halfwidth / static_cast<double>(domain.n_z);
    const bool integrated = domain.spectral == SpectralMode::Integrated;
    const std::size_t n_delta = integrated ? domain.n_delta : 1;
    const double dd = integrated ? 2.0 * domain.delta_halfwidth / static_cast<double>(n_delta) : 1.0;

    std::vector<double> deltas(n_delta, 0.0);
    if (integrated)
        for (std::size_t j = 0; j < n_delta; ++j)
            deltas[j] = -domain.delta_halfwidth + (static_cast<double>(j) + 0.5) * dd;

    SpectrumAccumulator acc(opts.bin_rel_width);
    const double density_scale = mat.fluor_rate * mat.ion_density;

    for (std::size_t iz = 0; iz < domain.n_z; ++iz) {
        const double z = -domain.z_halfwidth + (static_cast<double>(iz) + 0.5) * dz;
        for (std::size_t ir = 0; ir < domain.n_r; ++ir) {
            const double r = (static_cast<double>(ir) + 0.5) * dr;
            const double i_spatial = profile.intensity(r, z);
            const double coll = profile.collection(r, z);
            if (!(i_spatial > 0.0) || !(coll > 0.0)) continue;

            const double volume = 2.0 * constants::pi * r * dr * dz * dd;
            const double gamma_hom = power_broadened_linewidth(i_spatial, mat);
            const double point_scale = density_scale * coll * volume;

            for (double delta : deltas) {
                const double i_exc = detuned_intensity(i_spatial, delta, gamma_hom);
                const auto s = model.local_state(i_exc, i_spatial);
                if (s.dark) continue;
                acc.add(s.k, point_scale * s.n5d_fraction);
            }
        }
    }
    return std::move(acc).finish();
}

DecaySpectrum build_spectrum(const TrapModel& model, const BeamGeometry& geom,
                             const IntegrationDomain& domain, const SpectrumOptions& opts) {
    return build_spectrum(model, SpatialProfile::gaussian(geom, model.material.coll0), domain,
                          opts);
}

std::vector<std::string> resolution_warnings(const IntegrationDomain& domain,
                                             const BeamGeometry& geom,
                                             const MaterialParams& material) {
    std::vector<std::string> w;
    const double dr = domain.r_max / static_cast<double>(domain.n_r);
    const double dz = 2.0 * domain.z_halfwidth / static_cast<double>(domain.n_z);
    if (dr > 0.25 * geom.waist()) w.emplace_back("radial step exceeds waist/4");
    if (dz > 0.5 * geom.rayleigh()) w.emplace_back("axial step exceeds Rayleigh length/2");
    if (domain.r_max < 2.0 * geom.waist()) w.emplace_back("r_max below two beam waists");
    if (domain.spectral == SpectralMode::Integrated) {
        const double dd = 2.0 * domain.delta_halfwidth / static_cast<double>(domain.n_delta);
        if (dd > 0.5 * material.hom_linewidth0)
            w.emplace_back("detuning step exceeds half the homogeneous linewidth");
        if (domain.delta_halfwidth < 5.0 * material.hom_linewidth0)
            w.emplace_back("detuning range below five homogeneous linewidths");
    }
    return w;
}

namespace {

void check_times(std::span<const double> t_grid) {
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (!(t_grid[i] >= 0.0) || !std::isfinite(t_grid[i]))
            throw InputError("time grid must be finite and nonnegative");
        if (i > 0 && t_grid[i] < t_grid[i - 1]) throw InputError("time grid must be ascending");
    }
}

} // namespace

SignalResult detected_signal(std::span<const double> t_grid, const TrapModel& model,
                             const SpatialProfile& profile, double gamma_trap,
                             const IntegrationDomain& domain, const SpectrumOptions& opts) {
    check_times(t_grid);
    if (!(gamma_trap >= 0.0)) throw InputError("gamma_trap must be >= 0");
    const auto spectrum = build_spectrum(model, profile, domain, opts);
    SignalResult res;
    res.times.assign(t_grid.begin(), t_grid.end());
    res.model_signal = spectrum.evaluate(t_grid, gamma_trap);
    res.domain = domain;
    res.gamma_trap = gamma_trap;
    res.achieved_rel_tol = std::numeric_limits<double>::quiet_NaN();
    return res;
}

SignalResult detected_signal(std::span<const double> t_grid, const TrapModel& model,
                             const BeamGeometry& geom, double gamma_trap,
                             const IntegrationDomain& domain, const SpectrumOptions& opts) {
    auto res = detected_signal(t_grid, model, SpatialProfile::gaussian(geom, model.material.coll0),
                               gamma_trap, domain, opts);
    res.warnings = resolution_warnings(domain, geom, model.material);
    res.converged = res.warnings.empty();
    return res;
}

void ScaledSignalParams::validate() const {
    if (!(scale_a > 0.0)) throw InputError("scale A must be > 0");
    if (!(background_b >= 0.0)) throw InputError("background B must be >= 0");
    if (!(power >= 0.0)) throw InputError("power must be >= 0");
}

std::vector<double> scaled_signal(std::span<const double> s_model, const ScaledSignalParams& p) {
    std::vector<double> out(s_model.size());
    const double floor = p.background_b * p.power;
    std::transform(s_model.begin(), s_model.end(), out.begin(),
                   [&](double s) { return p.scale_a * s + floor; });
    return out;
}

double max_relative_change(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw InputError("max_relative_change: size mismatch");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double denom = std::max(std::abs(a[i]), std::abs(b[i]));
        if (denom == 0.0) continue;
        worst = std::max(worst, std::abs(a[i] - b[i]) / denom);
    }
    return worst;
}

namespace {

template <typename Compute>
SignalResult refine_loop(Compute compute, const IntegrationDomain& start, double rel_tol,
                         int max_refinements) {
    if (!(rel_tol > 0.0))
        throw ConvergenceError("relative tolerance must be > 0, refinement cannot converge");

    auto current = compute(start);
    double change = std::numeric_limits<double>::infinity();
    for (int level = 1; level <= max_refinements; ++level) {
        auto next = compute(current.domain.doubled());
        change = max_relative_change(current.model_signal, next.model_signal);
        next.refinements = level;
        next.achieved_rel_tol = change;
        next.converged = change < rel_tol;
        current = std::move(next);
        if (current.converged) return current;
    }
    throw ConvergenceError("integration did not converge to rel_tol " + std::to_string(rel_tol) +
                           " after " + std::to_string(max_refinements) +
                           " refinements (last change " + std::to_string(change) + ")");
}

} // namespace

SignalResult refine_until_converged(std::span<const double> t_grid, const TrapModel& model,
                                    const BeamGeometry& geom, double gamma_trap,
                                    const IntegrationDomain& start, double rel_tol,
                                    int max_refinements, const SpectrumOptions& opts) {
    auto res = refine_loop(
        [&](const IntegrationDomain& d) {
            return detected_signal(t_grid, model, geom, gamma_trap, d, opts);
        },
        start, rel_tol, max_refinements);
    res.warnings = resolution_warnings(res.domain, geom, model.material);
    return res;
}

SignalResult refine_until_converged(std::span<const double> t_grid, const TrapModel& model,
                                    const SpatialProfile& profile, double gamma_trap,
                                    const IntegrationDomain& start, double rel_tol,
                                    int max_refinements, const SpectrumOptions& opts) {
    return refine_loop(
        [&](const IntegrationDomain& d) {
            return detected_signal(t_grid, model, profile, gamma_trap, d, opts);
        },
        start, rel_tol, max_refinements);
}

} // namespace holeburn
