#include <doctest.h>

#include <cmath>
#include <numeric>
#include <string>

#include "holeburn/errors.hpp"
#include "holeburn/synthgen.hpp"

using namespace holeburn;
using doctest::Approx;

namespace {

const DecaySpectrum& fig6_spectrum() {
    static const DecaySpectrum spec = [] {
        const auto model = reference_rate_model();
        return build_spectrum(model, BeamGeometry::make(20e-6, 1e-6, model.material), IntegrationDomain{});
    }();
    return spec;
}

} // namespace

TEST_SUITE("synthgen") {

TEST_CASE("noise kinds") {
    CHECK(parse_noise_kind("none") == NoiseKind::None);
    CHECK(parse_noise_kind("poisson") == NoiseKind::Poisson);
    CHECK(parse_noise_kind("gaussian") == NoiseKind::Gaussian);
    CHECK_THROWS_AS(parse_noise_kind("white"), InputError);
    CHECK(to_string(NoiseKind::Poisson) == "poisson");
    NoiseSpec bad{NoiseKind::Gaussian, 0, -1.0, 1.0};
    CHECK_THROWS_AS(bad.validate(), InputError);
    std::vector<double> neg{-1.0};
    CHECK_THROWS_AS(apply_noise(neg, {NoiseKind::Poisson, 0, 0, 1.0}), InputError);
}

TEST_CASE("seed streams") {
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
    CHECK(derive_seed(7, 3) == derive_seed(7, 3));
    std::vector<double> v(100, 1000.0);
    const NoiseSpec n{NoiseKind::Poisson, 42, 0, 1.0};
    CHECK(apply_noise(v, n, 0) == apply_noise(v, n, 0));
    CHECK(apply_noise(v, n, 0) != apply_noise(v, n, 1));
}

TEST_CASE("noiseless decay curve equals the integrator") {
    const auto t = linspace(0, 200, 201);
    const DecayTruth truth;
    const auto c = gen_decay_curve(fig6_spectrum(), truth, t, NoiseSpec{});
    const auto model = fig6_spectrum().evaluate(t, truth.gamma_trap);
    const auto scaled = scaled_signal(model, {truth.scale_a, truth.background_b, truth.power});
    for (std::size_t i = 0; i < t.size(); ++i) CHECK(std::abs(c.counts[i] - scaled[i]) <= 1e-12 * scaled[i]);
    CHECK(std::stod(c.metadata.at("power_w")) == 20e-6);
    CHECK(c.metadata.at("rng") == kRngName);
    CHECK(c.power.value() == 20e-6);
}

TEST_CASE("config overload matches the spectrum overload") {
    IntegrationDomain d;
    d.n_r = 8;
    d.n_z = 8;
    d.n_delta = 8;
    DecayGenConfig cfg;
    cfg.domain = d;
    const auto t = linspace(0, 10, 11);
    const auto a = gen_decay_curve(cfg, DecayTruth{}, t, NoiseSpec{});
    const auto spec = build_spectrum(cfg.model, BeamGeometry::make(20e-6, 1e-6, cfg.model.material), d);
    const auto b = gen_decay_curve(spec, DecayTruth{}, t, NoiseSpec{});
    CHECK(a.counts == b.counts);
}

TEST_CASE("20 uW decay shape") {
    const auto t = linspace(0, 200, 201);
    const auto c = gen_decay_curve(fig6_spectrum(), DecayTruth{}, t, NoiseSpec{});
    CHECK(c.counts.front() > 1e5);
    CHECK(c.counts.front() < 1e6);
    CHECK(c.counts[5] < 0.85 * c.counts.front());
    for (std::size_t i = 1; i < t.size(); ++i) CHECK(c.counts[i] < c.counts[i - 1]);
}

TEST_CASE("Poisson fluctuations scale as one over root counts") {
    std::vector<double> v(20000, 4e4);
    const auto noisy = apply_noise(v, {NoiseKind::Poisson, 3, 0, 1.0});
    const double mean = std::accumulate(noisy.begin(), noisy.end(), 0.0) / noisy.size();
    double var = 0.0;
    for (double x : noisy) var += (x - mean) * (x - mean);
    var /= noisy.size() - 1;
    CHECK(std::sqrt(var) / mean == Approx(1 / std::sqrt(4e4)).epsilon(0.03));
    // dwell scales the counting statistics
    const auto longer = apply_noise(v, {NoiseKind::Poisson, 3, 0, 4.0});
    double m2 = std::accumulate(longer.begin(), longer.end(), 0.0) / longer.size(), v2 = 0.0;
    for (double x : longer) v2 += (x - m2) * (x - m2);
    v2 /= longer.size() - 1;
    CHECK(std::sqrt(v2) / m2 == Approx(1 / std::sqrt(16e4)).epsilon(0.03));
}

TEST_CASE("Poisson mean over many seeds") {
    const std::vector<double> v{3.7, 250.0};
    double s0 = 0, s1 = 0;
    const int n = 10000;
    for (int seed = 0; seed < n; ++seed) {
        const auto x = apply_noise(v, {NoiseKind::Poisson, static_cast<std::uint64_t>(seed), 0, 1.0});
        s0 += x[0];
        s1 += x[1];
    }
    CHECK(std::abs(s0 / n - 3.7) < 3 * std::sqrt(3.7 / n));
    CHECK(std::abs(s1 / n - 250.0) < 3 * std::sqrt(250.0 / n));
}

TEST_CASE("hole scans") {
    HoleScanConfig cfg;
    cfg.points = 200;
    HoleTruth flat;
    flat.depth = 0;
    const auto s = gen_hole_scan(flat, cfg, NoiseSpec{});
    for (double v : s.fluor_counts) CHECK(v == Approx(1000.0));
    CHECK(s.freq.front() == -100e6);
    CHECK(s.freq.back() == 100e6);

    cfg.aom_off = {10, 20};
    cfg.fluor_offset = 5;
    cfg.power_offset = 2;
    const auto o = gen_hole_scan(HoleTruth{}, cfg, NoiseSpec{});
    CHECK(o.fluor_counts[15] == 5.0);
    CHECK(o.power_monitor[15] == 2.0);
    CHECK(o.metadata.at("aom_off") == "10:20");
    const auto a = gen_hole_scan(HoleTruth{}, cfg, {NoiseKind::Gaussian, 9, 3.0, 1.0});
    const auto b = gen_hole_scan(HoleTruth{}, cfg, {NoiseKind::Gaussian, 9, 3.0, 1.0});
    CHECK(a.fluor_counts == b.fluor_counts);
    CHECK(a.power_monitor == o.power_monitor);

    cfg.aom_off = {190, 201};
    CHECK_THROWS_AS(gen_hole_scan(HoleTruth{}, cfg, NoiseSpec{}), InputError);
    cfg.aom_off = {0, 0};
    HoleTruth bad;
    bad.fwhm = 0;
    CHECK_THROWS_AS(gen_hole_scan(bad, cfg, NoiseSpec{}), InputError);
}

TEST_CASE("hole decay series") {
    const auto w = linspace(0, 0.3, 301);
    const auto s = gen_hole_decay_series(1.0, 0.072, 0.1, w, NoiseSpec{});
    for (std::size_t i = 0; i < w.size(); ++i) CHECK(s.area[i] == Approx(std::exp(-w[i] / 0.072) + 0.1).epsilon(1e-14));
    // above-offset part crosses 1/e of its initial value at tau
    std::size_t cross = 0;
    while (s.area[cross] - 0.1 > std::exp(-1.0)) ++cross;
    CHECK(w[cross] == Approx(0.072).epsilon(0.02));
    std::vector<double> late{1e3};
    CHECK(gen_hole_decay_series(1.0, 0.072, 0.0, late, NoiseSpec{}).area[0] == 0.0);
    std::vector<double> unsorted{0.2, 0.1};
    CHECK_THROWS_AS(gen_hole_decay_series(1.0, 0.072, 0.0, unsorted, NoiseSpec{}), InputError);
    CHECK_THROWS_AS(gen_hole_decay_series(1.0, 0.0, 0.0, w, NoiseSpec{}), InputError);
}

TEST_CASE("seven powers") {
    CHECK(kSevenPowers.size() == 7);
    CHECK(kSevenPowers.front() == 2e-6);
    CHECK(kSevenPowers.back() == 44e-6);
}

} // TEST_SUITE
