#include "holeburn/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "holeburn/errors.hpp"

namespace holeburn {

namespace {

constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;

struct Vertex {
    std::vector<double> x;
    double f = 0.0;
};

} // namespace

MinimizeResult minimize(const Objective& f, std::vector<double> x0, const SimplexOptions& opts) {
    const std::size_t n = x0.size();
    if (n == 0) throw InputError("minimize: empty parameter vector");
    if (!opts.steps.empty() && opts.steps.size() != n)
        throw InputError("minimize: steps size must match x0");

    MinimizeResult res;
    auto eval = [&](const std::vector<double>& x) {
        ++res.evaluations;
        const double v = f(std::span<const double>(x));
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };

    std::vector<Vertex> simplex(n + 1);
    simplex[0] = {x0, eval(x0)};
    if (!std::isfinite(simplex[0].f)) throw InputError("minimize: objective not finite at x0");
    const double f_scale = std::abs(simplex[0].f);

    for (std::size_t j = 0; j < n; ++j) {
        auto x = x0;
        if (!opts.steps.empty())
            x[j] += opts.steps[j];
        else
            x[j] = x[j] != 0.0 ? x[j] * (1.0 + opts.initial_step) : opts.zero_step;
        simplex[j + 1] = {x, eval(x)};
    }

    auto order = [&] {
        std::stable_sort(simplex.begin(), simplex.end(),
                         [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
    };
    auto converged = [&] {
        const auto& best = simplex.front();
        double xscale = 1.0;
        for (double v : best.x) xscale = std::max(xscale, std::abs(v));
        double size = 0.0;
        double spread = 0.0;
        for (std::size_t i = 1; i <= n; ++i) {
            for (std::size_t j = 0; j < n; ++j)
                size = std::max(size, std::abs(simplex[i].x[j] - best.x[j]));
            spread = std::max(spread, std::abs(simplex[i].f - best.f));
        }
        return size <= opts.x_tol * xscale &&
               spread <= opts.f_tol * (std::abs(best.f) + f_scale);
    };
    auto affine = [n](const std::vector<double>& c, const std::vector<double>& x, double t) {
        std::vector<double> y(n);
        for (std::size_t j = 0; j < n; ++j) y[j] = c[j] + t * (x[j] - c[j]);
        return y;
    };

    order();
    while (res.iterations < opts.max_iterations) {
        if (converged()) {
            res.converged = true;
            break;
        }
        ++res.iterations;

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i].x[j];
        for (double& c : centroid) c /= static_cast<double>(n);

        auto& worst = simplex[n];
        const double f_best = simplex[0].f;
        const double f_second = simplex[n - 1].f;

        auto xr = affine(centroid, worst.x, -kReflect);
        const double fr = eval(xr);
        if (fr < f_best) {
            auto xe = affine(centroid, worst.x, -kReflect * kExpand);
            const double fe = eval(xe);
            if (fe < fr)
                worst = {std::move(xe), fe};
            else
                worst = {std::move(xr), fr};
        } else if (fr < f_second) {
            worst = {std::move(xr), fr};
        } else {
            bool shrink = false;
            if (fr < worst.f) {
                auto xc = affine(centroid, xr, kContract);
                const double fc = eval(xc);
                if (fc <= fr)
                    worst = {std::move(xc), fc};
                else
                    shrink = true;
            } else {
                auto xcc = affine(centroid, worst.x, kContract);
                const double fcc = eval(xcc);
                if (fcc < worst.f)
                    worst = {std::move(xcc), fcc};
                else
                    shrink = true;
            }
            if (shrink) {
                for (std::size_t i = 1; i <= n; ++i) {
                    simplex[i].x = affine(simplex[0].x, simplex[i].x, kShrink);
                    simplex[i].f = eval(simplex[i].x);
                }
            }
        }
        order();
    }
    if (!res.converged && converged()) res.converged = true;

    res.x = simplex.front().x;
    res.value = simplex.front().f;
    return res;
}

} // namespace holeburn
