#include "holeburn/fitters.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>

#include "holeburn/errors.hpp"

namespace holeburn {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double sq(double x) { return x * x; }

void check_same_size(std::size_t a, std::size_t b, const char* what) {
    if (a != b) throw InputError(std::string(what) + ": input lengths differ");
}

std::vector<double> weights_from_sigma(std::span<const double> sigma, std::size_t n) {
    std::vector<double> w(n, 1.0);
    if (sigma.empty()) return w;
    check_same_size(sigma.size(), n, "sigma");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(sigma[i] > 0.0) || !std::isfinite(sigma[i]))
            throw InputError("per-point sigma must be finite and > 0");
        w[i] = 1.0 / sq(sigma[i]);
    }
    return w;
}

// Parameter covariance from the Jacobian at the optimum. With absolute
// per-point sigmas the weighted normal matrix is inverted as is; otherwise
// it is scaled by the residual variance RSS / (n - p).
std::vector<double> sigmas_from_jacobian(const Eigen::MatrixXd& jac, const std::vector<double>& w,
                                         double rss, bool absolute_sigma) {
    const auto n = jac.rows();
    const auto p = jac.cols();
    std::vector<double> out(static_cast<std::size_t>(p), kNaN);
    if (p == 0) return out;
    Eigen::MatrixXd jw = jac;
    for (Eigen::Index i = 0; i < n; ++i) jw.row(i) *= w[static_cast<std::size_t>(i)];
    // Column equilibration keeps the rank test meaningful across parameter scales.
    Eigen::VectorXd d = (jac.transpose() * jw).diagonal().cwiseSqrt();
    for (Eigen::Index j = 0; j < p; ++j)
        if (!(d(j) > 0.0) || !std::isfinite(d(j))) return out;
    const Eigen::MatrixXd normal =
        d.cwiseInverse().asDiagonal() * (jac.transpose() * jw) * d.cwiseInverse().asDiagonal();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(normal);
    if (!lu.isInvertible()) return out;
    double scale = 1.0;
    if (!absolute_sigma) {
        if (n <= p) return out;
        scale = rss / static_cast<double>(n - p);
    }
    const Eigen::MatrixXd cov =
        d.cwiseInverse().asDiagonal() * lu.inverse() * d.cwiseInverse().asDiagonal() * scale;
    for (Eigen::Index j = 0; j < p; ++j) out[static_cast<std::size_t>(j)] = std::sqrt(std::max(0.0, cov(j, j)));
    return out;
}

SimplexOptions with_default_steps(SimplexOptions opts, std::vector<double> steps) {
    if (opts.steps.empty()) opts.steps = std::move(steps);
    return opts;
}

// Levenberg-Marquardt on the full parameter vector, started at the simplex
// optimum. eval(p, r, J) fills residuals model - data and, when J is non-null,
// their Jacobian; it returns false outside the admissible region.
template <class Eval>
Eigen::VectorXd polish_least_squares(Eigen::VectorXd p, const std::vector<double>& w, Eval&& eval,
                                     int max_iterations = 60) {
    const auto n = static_cast<Eigen::Index>(w.size());
    Eigen::VectorXd sw(n);
    for (Eigen::Index i = 0; i < n; ++i) sw(i) = std::sqrt(w[static_cast<std::size_t>(i)]);
    Eigen::VectorXd r(n);
    Eigen::MatrixXd jac(n, p.size());
    auto cost_at = [&](const Eigen::VectorXd& q) {
        if (!eval(q, r, &jac)) return std::numeric_limits<double>::infinity();
        r = r.cwiseProduct(sw);
        jac = sw.asDiagonal() * jac;
        const double c = r.squaredNorm();
        return std::isfinite(c) && jac.allFinite() ? c : std::numeric_limits<double>::infinity();
    };
    double cost = cost_at(p);
    if (!std::isfinite(cost)) return p;
    double lambda = 1e-3;
    for (int it = 0; it < max_iterations; ++it) {
        Eigen::MatrixXd a = jac.transpose() * jac;
        const Eigen::VectorXd d = a.diagonal().cwiseSqrt();
        if (!d.allFinite() || (d.array() <= 0.0).any()) break;
        a = d.cwiseInverse().asDiagonal() * a * d.cwiseInverse().asDiagonal();
        const Eigen::VectorXd g = d.cwiseInverse().cwiseProduct(jac.transpose() * r);
        const Eigen::VectorXd r_keep = r;
        const Eigen::MatrixXd jac_keep = jac;
        bool accepted = false;
        Eigen::VectorXd step;
        for (int k = 0; k < 16 && !accepted; ++k) {
            Eigen::MatrixXd m = a;
            m.diagonal().array() += lambda;
            step = -d.cwiseInverse().cwiseProduct(m.ldlt().solve(g));
            const Eigen::VectorXd q = p + step;
            const double c = cost_at(q);
            if (c <= cost) {
                p = q;
                cost = c;
                lambda = std::max(0.1 * lambda, 1e-12);
                accepted = true;
            } else {
                r = r_keep;
                jac = jac_keep;
                lambda *= 10.0;
            }
        }
        if (!accepted || (step.array().abs() <= 1e-15 * p.array().abs()).all()) break;
    }
    return p;
}

// ---- trap model ----------------------------------------------------------

struct TrapLinearSolution {
    std::vector<double> scale_a;
    double background_b = 0.0;
    bool clamped = false;
    double rss = 0.0;
};

TrapLinearSolution solve_trap_linear(std::span<const TrapCurve> curves,
                                     const std::vector<std::vector<double>>& model) {
    const std::size_t nc = curves.size();
    TrapLinearSolution sol;
    sol.scale_a.assign(nc, 0.0);

    // Normal equations in (A_1..A_n, B).
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nc + 1),
                                              static_cast<Eigen::Index>(nc + 1));
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nc + 1));
    std::vector<double> ss(nc), sy(nc), s1(nc);
    const auto ib = static_cast<Eigen::Index>(nc);
    for (std::size_t c = 0; c < nc; ++c) {
        const auto& y = curves[c].curve.counts;
        const auto& s = model[c];
        const double p = curves[c].power;
        double sum_ss = 0.0, sum_sy = 0.0, sum_s = 0.0, sum_y = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            sum_ss += s[i] * s[i];
            sum_sy += s[i] * y[i];
            sum_s += s[i];
            sum_y += y[i];
        }
        ss[c] = sum_ss;
        sy[c] = sum_sy;
        s1[c] = sum_s;
        const auto ic = static_cast<Eigen::Index>(c);
        m(ic, ic) = sum_ss;
        m(ic, ib) = p * sum_s;
        m(ib, ic) = p * sum_s;
        m(ib, ib) += p * p * static_cast<double>(y.size());
        rhs(ic) = sum_sy;
        rhs(ib) += p * sum_y;
    }

    bool use_b = m(ib, ib) > 0.0 && (m.diagonal().array() > 0.0).all();
    if (use_b) {
        const Eigen::VectorXd d = m.diagonal().cwiseSqrt().cwiseInverse();
        const Eigen::MatrixXd ms = d.asDiagonal() * m * d.asDiagonal();
        const Eigen::VectorXd x = d.asDiagonal() * ms.fullPivLu().solve(d.asDiagonal() * rhs);
        if (x.allFinite() && x(ib) >= 0.0) {
            for (std::size_t c = 0; c < nc; ++c) sol.scale_a[c] = x(static_cast<Eigen::Index>(c));
            sol.background_b = x(ib);
        } else {
            use_b = false;
        }
    }
    if (!use_b) {
        sol.clamped = true;
        sol.background_b = 0.0;
        for (std::size_t c = 0; c < nc; ++c) sol.scale_a[c] = ss[c] > 0.0 ? sy[c] / ss[c] : 0.0;
    }

    for (std::size_t c = 0; c < nc; ++c) {
        const auto& y = curves[c].curve.counts;
        const double floor = sol.background_b * curves[c].power;
        for (std::size_t i = 0; i < y.size(); ++i)
            sol.rss += sq(sol.scale_a[c] * model[c][i] + floor - y[i]);
    }
    return sol;
}

} // namespace

TrapFitResult fit_trap_model(std::span<const TrapCurve> curves,
                             std::span<const DecaySpectrum> spectra,
                             const SimplexOptions& simplex, double gamma_seed) {
    if (curves.empty()) throw InputError("trap fit needs at least one curve");
    check_same_size(curves.size(), spectra.size(), "trap fit spectra");
    if (!(gamma_seed > 0.0)) throw InputError("gamma seed must be > 0");
    for (std::size_t c = 0; c < curves.size(); ++c) {
        curves[c].curve.validate();
        const auto& y = curves[c].curve.counts;
        if (std::all_of(y.begin(), y.end(), [](double v) { return v == 0.0; }))
            throw InputError("trap fit: curve " + std::to_string(c) + " is identically zero");
        if (!(spectra[c].total() > 0.0))
            throw InputError("trap fit: curve " + std::to_string(c) + " has no model signal");
    }

    auto model_at = [&](double gamma) {
        std::vector<std::vector<double>> out(curves.size());
        for (std::size_t c = 0; c < curves.size(); ++c)
            out[c] = spectra[c].evaluate(curves[c].curve.time, gamma);
        return out;
    };
    auto profile = [&](std::span<const double> u) {
        const double gamma = gamma_seed * std::exp(u[0]);
        if (!std::isfinite(gamma)) return std::numeric_limits<double>::infinity();
        return solve_trap_linear(curves, model_at(gamma)).rss;
    };

    // Coarse multi-start over half-decades of gamma, the seed included.
    double best_u = 0.0;
    double best_f = profile(std::span<const double>(&best_u, 1));
    for (double lg = 1.0; lg <= 8.0001; lg += 0.5) {
        const double u = std::log(std::pow(10.0, lg) / gamma_seed);
        const double f = profile(std::span<const double>(&u, 1));
        if (f < best_f) {
            best_f = f;
            best_u = u;
        }
    }

    const auto mres = minimize(profile, {best_u}, with_default_steps(simplex, {0.5}));
    TrapFitResult res;
    res.gamma_trap = gamma_seed * std::exp(mres.x[0]);
    res.converged = mres.converged;
    res.iterations = mres.iterations;
    res.evaluations = mres.evaluations;

    const auto model = model_at(res.gamma_trap);
    const auto lin = solve_trap_linear(curves, model);
    res.scale_a = lin.scale_a;
    res.background_b = lin.background_b;
    res.background_clamped = lin.clamped;
    res.residual = lin.rss;

    // Jacobian in (gamma, A_1..A_n[, B]).
    std::size_t rows = 0;
    for (const auto& c : curves) rows += c.curve.time.size();
    const std::size_t nc = curves.size();
    const std::size_t cols = 1 + nc + (lin.clamped ? 0 : 1);
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows),
                                                static_cast<Eigen::Index>(cols));
    Eigen::Index row = 0;
    for (std::size_t c = 0; c < nc; ++c) {
        const auto& t = curves[c].curve.time;
        for (std::size_t i = 0; i < t.size(); ++i, ++row) {
            double ds = 0.0;
            for (const auto& comp : spectra[c].components())
                ds -= comp.amplitude * comp.rate * t[i] * std::exp(-res.gamma_trap * comp.rate * t[i]);
            jac(row, 0) = lin.scale_a[c] * ds;
            jac(row, static_cast<Eigen::Index>(1 + c)) = model[c][i];
            if (!lin.clamped) jac(row, static_cast<Eigen::Index>(1 + nc)) = curves[c].power;
        }
    }
    const auto sig = sigmas_from_jacobian(jac, std::vector<double>(rows, 1.0), lin.rss, false);
    res.gamma_trap_sigma = sig[0];
    res.scale_a_sigma.assign(sig.begin() + 1, sig.begin() + 1 + static_cast<std::ptrdiff_t>(nc));
    res.background_b_sigma = lin.clamped ? 0.0 : sig[1 + nc];
    return res;
}

TrapFitResult fit_trap_model(std::span<const TrapCurve> curves, const TrapFitConfig& cfg) {
    if (curves.empty()) throw InputError("trap fit needs at least one curve");
    std::vector<DecaySpectrum> spectra;
    spectra.reserve(curves.size());
    for (const auto& c : curves) {
        const auto geom = BeamGeometry::make(c.power, cfg.focus_fwhm, cfg.model.material);
        spectra.push_back(build_spectrum(cfg.model, geom, cfg.domain, cfg.spectrum));
    }
    return fit_trap_model(curves, spectra, cfg.simplex, cfg.gamma_seed);
}

// ---- Lorentzian hole --------------------------------------------------------

double LorentzianHoleFit::evaluate(double f) const {
    const double h2 = sq(0.5 * fwhm);
    return baseline - depth * h2 / (sq(f - center) + h2);
}

namespace {

struct HoleLinear {
    double c = 0.0;
    double d = 0.0;
    double rss = 0.0;
};

// Best (c, d >= 0) for fixed center and width; y is mean-centred.
HoleLinear solve_hole_linear(std::span<const double> x, std::span<const double> y,
                             const std::vector<double>& w, double center, double fwhm) {
    const double h2 = sq(0.5 * fwhm);
    double sw = 0.0, sl = 0.0, sll = 0.0, sy = 0.0, sly = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double l = h2 / (sq(x[i] - center) + h2);
        sw += w[i];
        sl += w[i] * l;
        sll += w[i] * l * l;
        sy += w[i] * y[i];
        sly += w[i] * l * y[i];
    }
    HoleLinear s;
    // Model c - d*L, normal equations in (c, d).
    const double det = sw * sll - sl * sl;
    if (det > 1e-12 * sw * sll && det > 0.0) {
        s.c = (sll * sy - sl * sly) / det;
        s.d = (sl * sy - sw * sly) / det;
    }
    if (!(s.d > 0.0)) {
        s.d = 0.0;
        s.c = sy / sw;
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double l = h2 / (sq(x[i] - center) + h2);
        s.rss += w[i] * sq(s.c - s.d * l - y[i]);
    }
    return s;
}

std::size_t argmin_smoothed(std::span<const double> y, std::size_t half) {
    std::size_t best = 0;
    double best_v = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < y.size(); ++i) {
        const std::size_t lo = i >= half ? i - half : 0;
        const std::size_t hi = std::min(y.size(), i + half + 1);
        double s = 0.0;
        for (std::size_t j = lo; j < hi; ++j) s += y[j];
        s /= static_cast<double>(hi - lo);
        if (s < best_v) {
            best_v = s;
            best = i;
        }
    }
    return best;
}

} // namespace

LorentzianHoleFit fit_hole_lorentzian(std::span<const double> freq, std::span<const double> signal,
                                      std::span<const double> sigma_point,
                                      const SimplexOptions& opts) {
    check_same_size(freq.size(), signal.size(), "hole fit");
    const std::size_t n = freq.size();
    if (n < 8) throw InputError("hole fit needs at least 8 points");
    for (std::size_t i = 0; i < n; ++i)
        if (!std::isfinite(freq[i]) || !std::isfinite(signal[i]))
            throw InputError("hole fit input contains non-finite values");
    const auto w = weights_from_sigma(sigma_point, n);

    const auto [fmin_it, fmax_it] = std::minmax_element(freq.begin(), freq.end());
    const double span = *fmax_it - *fmin_it;
    if (!(span > 0.0)) throw InputError("hole fit: frequency axis has zero span");

    const double wsum = std::accumulate(w.begin(), w.end(), 0.0);
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += w[i] * signal[i];
    mean /= wsum;
    std::vector<double> yc(n);
    for (std::size_t i = 0; i < n; ++i) yc[i] = signal[i] - mean;

    // Seeds: center at the signal minimum (raw, and lightly smoothed against
    // single-point noise), width 10% of the scan.
    const std::size_t raw_min = static_cast<std::size_t>(
        std::distance(signal.begin(), std::min_element(signal.begin(), signal.end())));
    const std::size_t smooth_min = argmin_smoothed(signal, std::max<std::size_t>(1, n / 100));
    const double f_ref = freq[raw_min];
    const double w_seed = 0.1 * span;
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = freq[i] - f_ref;

    auto unpack = [&](std::span<const double> u) {
        return std::pair{u[0] * span, w_seed * std::exp(u[1])};
    };
    auto objective = [&](std::span<const double> u) {
        const auto [center, fwhm] = unpack(u);
        if (!(fwhm > 0.0) || !std::isfinite(fwhm)) return std::numeric_limits<double>::infinity();
        return solve_hole_linear(x, yc, w, center, fwhm).rss;
    };

    std::vector<double> start{0.0, 0.0};
    {
        const std::vector<double> alt{(freq[smooth_min] - f_ref) / span, 0.0};
        if (objective(alt) < objective(start)) start = alt;
    }
    const auto mres = minimize(objective, start, with_default_steps(opts, {0.02, 0.5}));

    LorentzianHoleFit fit;
    auto [center_rel, fwhm] = unpack(mres.x);
    auto lin = solve_hole_linear(x, yc, w, center_rel, fwhm);
    if (mres.converged && lin.d > 0.0) {
        Eigen::VectorXd p0(4);
        p0 << lin.c, lin.d, center_rel, fwhm;
        const auto p = polish_least_squares(p0, w, [&](const Eigen::VectorXd& q, Eigen::VectorXd& r,
                                                        Eigen::MatrixXd* jac) {
            if (!(q(1) > 0.0) || !(q(3) > 0.0)) return false;
            const double h = 0.5 * q(3);
            for (std::size_t i = 0; i < n; ++i) {
                const double dx = x[i] - q(2);
                const double den = sq(dx) + sq(h);
                const double l = sq(h) / den;
                const auto k = static_cast<Eigen::Index>(i);
                r(k) = q(0) - q(1) * l - yc[i];
                (*jac)(k, 0) = 1.0;
                (*jac)(k, 1) = -l;
                (*jac)(k, 2) = -q(1) * 2.0 * sq(h) * dx / sq(den);
                (*jac)(k, 3) = -q(1) * h * sq(dx) / sq(den);
            }
            return true;
        });
        lin.c = p(0);
        lin.d = p(1);
        center_rel = p(2);
        fwhm = p(3);
    }
    fit.center = f_ref + center_rel;
    fit.fwhm = fwhm;
    fit.baseline = lin.c + mean;
    fit.depth = lin.d;
    fit.converged = mres.converged;
    fit.iterations = mres.iterations;
    for (std::size_t i = 0; i < n; ++i) fit.residual += w[i] * sq(fit.evaluate(freq[i]) - signal[i]);

    if (!fit.converged)
        throw FitError("Lorentzian hole fit did not converge after " +
                       std::to_string(mres.iterations) + " iterations (residual " +
                       std::to_string(fit.residual) + ", fwhm " + std::to_string(fwhm) + " Hz)");
    if (!(fit.fwhm > 0.0) || !std::isfinite(fit.fwhm))
        throw FitError("Lorentzian hole fit produced a nonpositive width");

    const bool absolute = !sigma_point.empty();
    const double h = 0.5 * fit.fwhm;
    if (fit.depth > 0.0) {
        Eigen::MatrixXd jac(static_cast<Eigen::Index>(n), 4);
        for (std::size_t i = 0; i < n; ++i) {
            const double dx = freq[i] - fit.center;
            const double den = sq(dx) + sq(h);
            const double l = sq(h) / den;
            const auto r = static_cast<Eigen::Index>(i);
            jac(r, 0) = 1.0;
            jac(r, 1) = -l;
            jac(r, 2) = -fit.depth * 2.0 * sq(h) * dx / sq(den);
            jac(r, 3) = -fit.depth * 0.5 * (2.0 * h * sq(dx) / sq(den));
        }
        const auto s = sigmas_from_jacobian(jac, w, fit.residual, absolute);
        fit.baseline_sigma = s[0];
        fit.depth_sigma = s[1];
        fit.center_sigma = s[2];
        fit.fwhm_sigma = s[3];
    } else {
        Eigen::MatrixXd jac(static_cast<Eigen::Index>(n), 2);
        for (std::size_t i = 0; i < n; ++i) {
            const auto r = static_cast<Eigen::Index>(i);
            jac(r, 0) = 1.0;
            jac(r, 1) = -sq(h) / (sq(freq[i] - fit.center) + sq(h));
        }
        const auto s = sigmas_from_jacobian(jac, w, fit.residual, absolute);
        fit.baseline_sigma = s[0];
        fit.depth_sigma = s[1];
        fit.center_sigma = kNaN;
        fit.fwhm_sigma = kNaN;
    }
    fit.hole_detected =
        fit.depth > 0.0 && (!std::isfinite(fit.depth_sigma) || fit.depth > 3.0 * fit.depth_sigma);
    return fit;
}

double hom_linewidth_from_hole(double fwhm) {
    if (!(fwhm > 0.0)) throw InputError("hole FWHM must be > 0");
    return 0.5 * fwhm;
}

// ---- exponential -------------------------------------------------------------

double ExpDecayFit::evaluate(double t) const {
    return amplitude * std::exp(-t / tau) + (with_offset ? offset : 0.0);
}

namespace {

struct ExpLinear {
    double a = 0.0;
    double c = 0.0;
    double rss = 0.0;
};

ExpLinear solve_exp_linear(std::span<const double> t, std::span<const double> y,
                           const std::vector<double>& w, double tau, bool with_offset) {
    double sw = 0.0, se = 0.0, see = 0.0, sy = 0.0, sey = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double e = std::exp(-t[i] / tau);
        sw += w[i];
        se += w[i] * e;
        see += w[i] * e * e;
        sy += w[i] * y[i];
        sey += w[i] * e * y[i];
    }
    ExpLinear s;
    if (with_offset) {
        const double det = sw * see - se * se;
        if (det > 1e-12 * sw * see && det > 0.0) {
            s.a = (sw * sey - se * sy) / det;
            s.c = (see * sy - se * sey) / det;
        } else {
            s.c = sy / sw;
        }
    } else if (see > 0.0) {
        s.a = sey / see;
    }
    for (std::size_t i = 0; i < t.size(); ++i)
        s.rss += w[i] * sq(s.a * std::exp(-t[i] / tau) + s.c - y[i]);
    return s;
}

} // namespace

ExpDecayFit fit_exponential(std::span<const double> times, std::span<const double> values,
                            bool with_offset, std::span<const double> sigma,
                            const SimplexOptions& opts) {
    check_same_size(times.size(), values.size(), "exponential fit");
    const std::size_t n = times.size();
    if (n < 4) throw InputError("exponential fit needs at least 4 points");
    for (std::size_t i = 0; i < n; ++i)
        if (!std::isfinite(times[i]) || !std::isfinite(values[i]))
            throw InputError("exponential fit input contains non-finite values");
    const auto w = weights_from_sigma(sigma, n);

    const auto [tmin_it, tmax_it] = std::minmax_element(times.begin(), times.end());
    const double span = *tmax_it - *tmin_it;
    if (!(span > 0.0)) throw InputError("exponential fit: time axis has zero span");
    const double tau_ref = span / 3.0;

    auto objective = [&](std::span<const double> u) {
        const double tau = tau_ref * std::exp(u[0]);
        if (!(tau > 0.0) || !std::isfinite(tau)) return std::numeric_limits<double>::infinity();
        return solve_exp_linear(times, values, w, tau, with_offset).rss;
    };

    double best_u = 0.0;
    double best_f = objective(std::span<const double>(&best_u, 1));
    for (double u = -7.0; u <= 4.0001; u += 0.25) {
        const double f = objective(std::span<const double>(&u, 1));
        if (f < best_f) {
            best_f = f;
            best_u = u;
        }
    }
    const auto mres = minimize(objective, {best_u}, with_default_steps(opts, {0.1}));

    ExpDecayFit fit;
    fit.with_offset = with_offset;
    fit.tau = tau_ref * std::exp(mres.x[0]);
    const auto lin = solve_exp_linear(times, values, w, fit.tau, with_offset);
    fit.amplitude = lin.a;
    fit.offset = lin.c;
    if (mres.converged && lin.a != 0.0) {
        Eigen::VectorXd p0(with_offset ? 3 : 2);
        p0(0) = lin.a;
        p0(1) = fit.tau;
        if (with_offset) p0(2) = lin.c;
        const auto p = polish_least_squares(p0, w, [&](const Eigen::VectorXd& q, Eigen::VectorXd& r,
                                                        Eigen::MatrixXd* jac) {
            if (!(q(1) > 0.0)) return false;
            for (std::size_t i = 0; i < n; ++i) {
                const double e = std::exp(-times[i] / q(1));
                const auto k = static_cast<Eigen::Index>(i);
                r(k) = q(0) * e + (with_offset ? q(2) : 0.0) - values[i];
                (*jac)(k, 0) = e;
                (*jac)(k, 1) = q(0) * times[i] / sq(q(1)) * e;
                if (with_offset) (*jac)(k, 2) = 1.0;
            }
            return true;
        });
        fit.amplitude = p(0);
        fit.tau = p(1);
        if (with_offset) fit.offset = p(2);
    }
    fit.residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) fit.residual += w[i] * sq(fit.evaluate(times[i]) - values[i]);
    fit.converged = mres.converged;
    fit.iterations = mres.iterations;

    Eigen::MatrixXd jac(static_cast<Eigen::Index>(n), with_offset ? 3 : 2);
    for (std::size_t i = 0; i < n; ++i) {
        const double e = std::exp(-times[i] / fit.tau);
        const auto r = static_cast<Eigen::Index>(i);
        jac(r, 0) = e;
        jac(r, 1) = fit.amplitude * times[i] / sq(fit.tau) * e;
        if (with_offset) jac(r, 2) = 1.0;
    }
    const auto s = sigmas_from_jacobian(jac, w, fit.residual, !sigma.empty());
    fit.amplitude_sigma = s[0];
    fit.tau_sigma = s[1];
    fit.offset_sigma = with_offset ? s[2] : 0.0;
    return fit;
}

// ---- linear ------------------------------------------------------------------

LinearFit fit_linear_ci(std::span<const double> x, std::span<const double> y, double confidence) {
    check_same_size(x.size(), y.size(), "linear fit");
    const std::size_t n = x.size();
    if (n < 3) throw InputError("linear fit needs at least 3 points");
    if (!(confidence > 0.0 && confidence < 1.0))
        throw InputError("confidence level must lie in (0, 1)");

    const double xm = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    const double ym = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, xscale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += sq(x[i] - xm);
        sxy += (x[i] - xm) * (y[i] - ym);
        xscale = std::max(xscale, std::abs(x[i]));
    }
    if (!(sxx > 1e-24 * sq(xscale) * static_cast<double>(n)))
        throw InputError("linear fit is rank deficient: all x values equal");

    LinearFit fit;
    fit.confidence = confidence;
    fit.slope = sxy / sxx;
    fit.intercept = ym - fit.slope * xm;
    for (std::size_t i = 0; i < n; ++i) fit.residual += sq(y[i] - fit.intercept - fit.slope * x[i]);
    fit.dof = static_cast<int>(n) - 2;
    const double s2 = fit.residual / fit.dof;
    fit.slope_se = std::sqrt(s2 / sxx);
    fit.intercept_se = std::sqrt(s2 * (1.0 / static_cast<double>(n) + sq(xm) / sxx));
    const boost::math::students_t dist(fit.dof);
    const double tq = boost::math::quantile(dist, 0.5 * (1.0 + confidence));
    fit.slope_ci = tq * fit.slope_se;
    fit.intercept_ci = tq * fit.intercept_se;
    return fit;
}

} // namespace holeburn
