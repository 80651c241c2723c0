#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "holeburn/errors.hpp"
#include "holeburn/fitters.hpp"
#include "holeburn/synthgen.hpp"
#include "holeburn/trace.hpp"

using namespace holeburn;
using doctest::Approx;

namespace {

constexpr double kPi = 3.14159265358979323846;

RawScan flat_scan(std::size_t n, double fluor, double power, IndexRange off) {
    RawScan s;
    s.freq = linspace(-100e6, 100e6, n);
    s.fluor_counts.assign(n, fluor);
    s.power_monitor.assign(n, power);
    s.aom_off = off;
    return s;
}

NormalizedScan scan_of(const std::vector<double>& signal) {
    NormalizedScan s;
    s.freq = linspace(0, static_cast<double>(signal.size() - 1), signal.size());
    s.signal = signal;
    s.excluded.assign(signal.size(), false);
    return s;
}

} // namespace

TEST_SUITE("trace") {

TEST_CASE("background subtraction") {
    auto s = flat_scan(100, 100.0, 100.0, {0, 10});
    const auto out = subtract_background(s);
    for (std::size_t i = 0; i < 100; ++i) {
        CHECK(out.fluor_counts[i] == 0.0);
        CHECK(out.power_monitor[i] == 0.0);
    }
    // separate offsets per channel
    s = flat_scan(100, 500.0, 1000.0, {20, 30});
    for (std::size_t i = 20; i < 30; ++i) {
        s.fluor_counts[i] = 40.0;
        s.power_monitor[i] = 7.0;
    }
    const auto t = subtract_background(s);
    CHECK(t.fluor_counts[0] == Approx(460.0));
    CHECK(t.power_monitor[0] == Approx(993.0));
    CHECK(t.fluor_counts[25] == 0.0);

    s.aom_off = {5, 5};
    CHECK_THROWS_AS(subtract_background(s), InputError);
    s.aom_off = {95, 120};
    CHECK_THROWS_AS(subtract_background(s), InputError);
}

TEST_CASE("background subtraction recovers generator truth") {
    HoleScanConfig cfg;
    cfg.points = 2000;
    cfg.aom_off = {0, 40};
    cfg.fluor_offset = 321.0;
    cfg.power_offset = 55.0;
    cfg.power_slope = 0.15;
    const HoleTruth hole;
    const auto raw = gen_hole_scan(hole, cfg, NoiseSpec{});
    auto clean_cfg = cfg;
    clean_cfg.fluor_offset = 0;
    clean_cfg.power_offset = 0;
    const auto clean = gen_hole_scan(hole, clean_cfg, NoiseSpec{});
    const auto bg = subtract_background(raw);
    for (std::size_t i = 0; i < raw.size(); ++i) {
        CHECK(bg.fluor_counts[i] == Approx(clean.fluor_counts[i]).epsilon(1e-12).scale(1.0));
        CHECK(bg.power_monitor[i] == Approx(clean.power_monitor[i]).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("normalization") {
    auto s = flat_scan(100, 0.0, 0.0, {0, 10});
    for (std::size_t i = 10; i < 100; ++i) {
        s.power_monitor[i] = 50.0 + static_cast<double>(i);
        s.fluor_counts[i] = 2.0 * s.power_monitor[i];
    }
    const auto n = normalize_by_power(s);
    for (std::size_t i = 0; i < 100; ++i) {
        CHECK(n.excluded[i] == (i < 10));
        if (i >= 10) CHECK(n.signal[i] == Approx(2.0));
        else CHECK(std::isnan(n.signal[i]));
    }
    CHECK(n.included() == 90);

    // threshold is a fraction of the peak power
    s.power_monitor[50] = 0.5 * kZeroPowerFraction * 149.0;
    CHECK(normalize_by_power(s).excluded[50]);

    // refuses raw data with a background
    auto raw = flat_scan(100, 10.0, 20.0, {0, 10});
    CHECK_THROWS_AS(normalize_by_power(raw), InputError);
    auto dark = flat_scan(100, 0.0, 0.0, {0, 10});
    CHECK_THROWS_AS(normalize_by_power(dark), InputError);
}

TEST_CASE("sloped power with a flat response normalizes flat") {
    HoleScanConfig cfg;
    cfg.points = 1000;
    cfg.aom_off = {0, 20};
    cfg.power_slope = 0.3;
    cfg.fluor_offset = 10.0;
    cfg.power_offset = 4.0;
    HoleTruth flat;
    flat.depth = 0.0;
    const auto n = normalize_by_power(subtract_background(gen_hole_scan(flat, cfg, NoiseSpec{})));
    for (std::size_t i = 0; i < n.size(); ++i)
        if (!n.excluded[i]) CHECK(n.signal[i] == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("treatment is idempotent") {
    HoleScanConfig cfg;
    cfg.points = 800;
    cfg.aom_off = {100, 130};
    cfg.fluor_offset = 77;
    cfg.power_offset = 12;
    cfg.power_slope = -0.2;
    const auto raw = gen_hole_scan(HoleTruth{}, cfg, {NoiseKind::Gaussian, 1, 5.0, 1.0});
    const auto once = subtract_background(raw);
    const auto twice = subtract_background(once);
    const double scale = *std::max_element(once.fluor_counts.begin(), once.fluor_counts.end());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        CHECK(std::abs(twice.fluor_counts[i] - once.fluor_counts[i]) <= 1e-12 * scale);
        CHECK(std::abs(twice.power_monitor[i] - once.power_monitor[i]) <= 1e-12 * 1000);
    }
    const auto a = normalize_by_power(once);
    const auto b = normalize_by_power(twice);
    for (std::size_t i = 0; i < raw.size(); ++i) {
        CHECK(a.excluded[i] == b.excluded[i]);
        if (!a.excluded[i]) CHECK(std::abs(a.signal[i] - b.signal[i]) <= 1e-12);
    }
}

TEST_CASE("AOM-off detection") {
    auto s = flat_scan(300, 0, 100, {0, 1});
    for (std::size_t i = 120; i < 150; ++i) s.power_monitor[i] = 1.0;
    s.power_monitor[10] = 1.0;
    const auto r = detect_aom_off(s.power_monitor);
    CHECK(r.begin == 120);
    CHECK(r.end == 150);
    std::vector<double> none;
    CHECK_THROWS_AS(detect_aom_off(none), InputError);
}

TEST_CASE("moving average") {
    std::vector<double> x{1, 5, 2, 8, 3, 9, 4};
    CHECK(moving_average(x, 1) == x);
    std::vector<double> c(50, 3.5);
    for (double v : moving_average(c, 7)) CHECK(v == Approx(3.5));
    const auto m = moving_average(x, 3);
    CHECK(m[0] == Approx(3.0));       // truncated (1 + 5) / 2
    CHECK(m[1] == Approx(8.0 / 3.0));
    CHECK(m[6] == Approx(6.5));
    const auto e = moving_average(x, 2);
    CHECK(e[1] == Approx(3.0));       // left-biased even window
    CHECK_THROWS_AS(moving_average(x, 0), InputError);
    CHECK_THROWS_AS(moving_average(x, 8), InputError);
    // 100 points of a 200 MHz, 5000-point scan is about 4 MHz
    const auto f = linspace(-100e6, 100e6, 5000);
    CHECK(100 * (f[1] - f[0]) == Approx(4e6).epsilon(0.01));
}

TEST_CASE("moving average keeps the mean of a periodic trace") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(1.0, 0.3);
    std::vector<double> x(1000);
    for (double& v : x) v = g(rng);
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / 1000.0;
    for (std::size_t w : {1u, 3u, 100u, 101u, 999u}) {
        const auto m = moving_average(x, w, EdgeMode::Wrap);
        CHECK(std::abs(std::accumulate(m.begin(), m.end(), 0.0) / 1000.0 - mean) < 1e-12);
    }
}

TEST_CASE("point RMS") {
    CHECK(point_rms(scan_of(std::vector<double>(100, 2.0))) == 0.0);
    std::mt19937_64 rng(17);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> v(5000);
    for (double& x : v) x = 5.0 + g(rng);
    const double s = point_rms(scan_of(v));
    CHECK(s == Approx(1.0).epsilon(0.05));
    auto scaled = v;
    for (double& x : scaled) x *= 3.0;
    CHECK(point_rms(scan_of(scaled)) == Approx(3.0 * s).epsilon(1e-12));
    CHECK_THROWS_AS(point_rms(scan_of(std::vector<double>(15, 1.0))), InputError);
    auto sc = scan_of(v);
    sc.excluded[0] = true;
    sc.signal[0] = NAN;
    CHECK(std::isfinite(point_rms(sc)));
}

TEST_CASE("hole area error propagation") {
    auto s = scan_of(std::vector<double>(400, 1.0));
    const auto a = hole_area_with_error(s, 1.0, 0.03);
    CHECK(a.area == 0.0);
    CHECK(a.sigma_area == Approx(0.03 * std::sqrt(400.0)).epsilon(1e-14));
    CHECK(a.points == 400);
    CHECK(a.freq_step == Approx(1.0));
    s.excluded[3] = true;
    s.signal[3] = NAN;
    const auto b = hole_area_with_error(s, 1.0, 0.03);
    CHECK(b.points == 399);
    CHECK(std::isfinite(b.area));
    std::vector<double> wrong(3, 0.1);
    CHECK_THROWS_AS(hole_area_with_error(s, 1.0, wrong), InputError);
    CHECK_THROWS_AS(hole_area_with_error(s, NAN, 0.1), InputError);
    CHECK_THROWS_AS(hole_area_with_error(s, 1.0, 0.1, IndexRange{0, 401}), InputError);
}

TEST_CASE("zero-depth hole has area within its error") {
    std::vector<double> v(2000);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(1.0, 0.02);
    for (double& x : v) x = g(rng);
    const auto s = scan_of(v);
    const auto a = hole_area_with_error(s, 1.0, point_rms(s));
    CHECK(std::abs(a.area) < 3 * a.sigma_area);
}

TEST_CASE("hole area matches the Lorentzian integral") {
    HoleScanConfig cfg;
    cfg.points = 5000;
    cfg.aom_off = {0, 10};
    HoleTruth hole;
    hole.center = 0.0;
    const auto n = normalize_by_power(subtract_background(gen_hole_scan(hole, cfg, NoiseSpec{})));
    const auto a = hole_area_with_error(n, 1.0, 0.0);
    // depth * pi * (w/2) * (2/pi) atan(span/w) over a finite window
    const double half = 0.5 * hole.fwhm;
    const double analytic = hole.depth * half * 2 * std::atan(100e6 / half);
    CHECK(a.area_hz == Approx(analytic).epsilon(0.01));
}

TEST_CASE("hole area is additive over partitions") {
    std::vector<double> v(1000);
    std::mt19937_64 rng(8);
    std::normal_distribution<double> g(0.9, 0.1);
    for (double& x : v) x = g(rng);
    auto s = scan_of(v);
    s.excluded[500] = true;
    std::vector<double> sig(v.size());
    for (std::size_t i = 0; i < sig.size(); ++i) sig[i] = 0.01 + 1e-5 * static_cast<double>(i);
    const auto all = hole_area_with_error(s, 1.0, sig);
    const auto left = hole_area_with_error(s, 1.0, sig, IndexRange{0, 321});
    const auto right = hole_area_with_error(s, 1.0, sig, IndexRange{321, 1000});
    CHECK(left.area + right.area == Approx(all.area).epsilon(1e-12));
    CHECK(left.sigma_area * left.sigma_area + right.sigma_area * right.sigma_area ==
          Approx(all.sigma_area * all.sigma_area).epsilon(1e-12));
    CHECK(left.points + right.points == all.points);
}

TEST_CASE("level normalization above a frequency") {
    auto s = scan_of(std::vector<double>(100, 4.0));
    s.freq = linspace(-100e6, 100e6, 100);
    s.sigma_point = 0.4;
    const auto n = normalize_level_above(s, 50e6);
    for (double v : n.signal) CHECK(v == Approx(1.0));
    CHECK(*n.sigma_point == Approx(0.1));
    CHECK_THROWS_AS(normalize_level_above(s, 1e9), InputError);
}

TEST_CASE("full treatment chain recovers a noiseless hole") {
    HoleScanConfig cfg;
    cfg.aom_off = {0, 50};
    cfg.power_slope = 0.2;
    cfg.fluor_offset = 100;
    cfg.power_offset = 20;
    const HoleTruth truth;
    const auto n = normalize_by_power(subtract_background(gen_hole_scan(truth, cfg, NoiseSpec{})));
    std::vector<double> f, y;
    for (std::size_t i = 0; i < n.size(); ++i)
        if (!n.excluded[i]) {
            f.push_back(n.freq[i]);
            y.push_back(n.signal[i]);
        }
    const auto fit = fit_hole_lorentzian(f, y);
    CHECK(std::abs(fit.depth - truth.depth) < 1e-6);
    CHECK(std::abs(fit.center - truth.center) < 1e-6 * truth.fwhm);
    CHECK(std::abs(fit.fwhm / truth.fwhm - 1) < 1e-6);
    CHECK(std::abs(fit.baseline - truth.baseline) < 1e-6);
}

} // TEST_SUITE
