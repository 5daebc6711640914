#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mesoncp/dataio.hpp"
#include "mesoncp/estimation.hpp"
#include "mesoncp/montecarlo.hpp"
#include "support/oracles.hpp"

using namespace mesoncp;

namespace {

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) g[static_cast<std::size_t>(k)] = a + (b - a) * k / (n - 1);
    return g;
}

IntensitySeries series_from_model(const FitParams& q, const std::vector<double>& grid) {
    IntensitySeries s;
    s.times = grid;
    for (double t : grid) s.values.push_back(intensity_model(t, q));
    s.kind = ModelKind::Renormalized;
    return s;
}

// analytic partial derivatives of the intensity model (test-side oracle)
double analytic_derivative(double t, const FitParams& q, Param which) {
    const double mean = 0.5 * (q.gamma_short + q.gamma_long);
    const double m = q.eps_mod;
    const double osc = std::cos(q.delta_m * t + q.eps_arg);
    const double oscd = -std::sin(q.delta_m * t + q.eps_arg);
    switch (which) {
        case Param::DeltaM: return q.scale * 2.0 * m * std::exp(-mean * t) * oscd * t;
        case Param::EpsMod:
            return q.scale * (2.0 * m * std::exp(-q.gamma_long * t) + 2.0 * std::exp(-mean * t) * osc);
        case Param::EpsArg: return q.scale * 2.0 * m * std::exp(-mean * t) * oscd;
        case Param::GammaS:
            return q.scale * (-t * std::exp(-q.gamma_short * t) -
                              t * m * std::exp(-mean * t) * osc);
        case Param::GammaL:
            return q.scale * (-t * m * m * std::exp(-q.gamma_long * t) -
                              t * m * std::exp(-mean * t) * osc);
        case Param::Scale: return intensity_model(t, q) / q.scale;
    }
    return 0.0;
}

}  // namespace

TEST_CASE("finite-difference jacobian") {
    FitParams kaonish;
    const auto p = builtin_dataset("kaon").params;
    kaonish.delta_m = p.delta_m();
    kaonish.eps_mod = 0.0294;
    kaonish.eps_arg = 0.78;
    kaonish.gamma_short = p.gamma_short;
    kaonish.gamma_long = p.gamma_long;
    kaonish.scale = 0.6;
    const ModelFunction model = [](double t, const FitParams& q) { return intensity_model(t, q); };

    SUBCASE("scale column is independent of the scale value") {
        const auto grid = linspace(0.0, 10.0 * p.tau_short(), 30);
        const std::vector<Param> cols{Param::Scale};
        const auto j1 = finite_difference_jacobian(model, kaonish, cols, grid);
        FitParams doubled = kaonish;
        doubled.scale = 2.0 * kaonish.scale;
        const auto j2 = finite_difference_jacobian(model, doubled, cols, grid);
        for (std::size_t k = 0; k < grid.size(); ++k)
            CHECK(j1[k] == doctest::Approx(j2[k]).epsilon(1e-9));
    }

    SUBCASE("delta_m column vanishes identically at eps_mod = 0") {
        FitParams q = kaonish;
        q.eps_mod = 0.0;
        const auto grid = linspace(0.0, 10.0 * p.tau_short(), 30);
        const auto j = finite_difference_jacobian(model, q, {Param::DeltaM}, grid);
        for (double v : j) CHECK(v == 0.0);
    }

    SUBCASE("matches the analytic jacobian at the kaon point") {
        // times in units of tau_S keep |theta|-scaled steps meaningful
        FitParams q = kaonish;
        q.delta_m = 0.5;
        q.gamma_short = 1.0;
        q.gamma_long = p.gamma_long / p.gamma_short;
        const auto grid = linspace(0.0, 12.0, 60);
        const std::vector<Param> cols{Param::DeltaM, Param::EpsMod, Param::EpsArg,
                                      Param::GammaS, Param::GammaL, Param::Scale};
        const auto j = finite_difference_jacobian(model, q, cols, grid);
        double ref_scale = 0.0;
        for (std::size_t k = 0; k < grid.size(); ++k)
            for (std::size_t c = 0; c < cols.size(); ++c)
                ref_scale = std::max(ref_scale, std::abs(analytic_derivative(grid[k], q, cols[c])));
        for (std::size_t k = 0; k < grid.size(); ++k)
            for (std::size_t c = 0; c < cols.size(); ++c) {
                const double ref = analytic_derivative(grid[k], q, cols[c]);
                CHECK(std::abs(j[k * cols.size() + c] - ref) <= 1e-4 * std::max(std::abs(ref), 1e-6 * ref_scale));
            }
    }
}

TEST_CASE("noiseless round trips") {
    FitParams truth;
    truth.delta_m = 0.5;
    truth.eps_mod = 0.03;
    truth.eps_arg = -0.8;
    truth.gamma_short = 1.0;
    truth.gamma_long = 1.0 / 579.6;
    truth.scale = 0.55;
    const auto grid = linspace(0.0, 18.0, 400);
    const auto data = series_from_model(truth, grid);

    SUBCASE("recovers the generator within 1e-6 from a 15 percent-off start") {
        FitConfig cfg;
        cfg.initial = truth;
        cfg.initial.delta_m *= 1.15;
        cfg.initial.eps_mod *= 0.85;
        cfg.initial.eps_arg += 0.1;
        cfg.initial.scale *= 1.2;
        const auto r = fit_intensity(data, cfg);
        CHECK(r.converged);
        CHECK(r.params.delta_m == doctest::Approx(truth.delta_m).epsilon(1e-6));
        CHECK(r.params.eps_mod == doctest::Approx(truth.eps_mod).epsilon(1e-6));
        CHECK(r.params.eps_arg == doctest::Approx(truth.eps_arg).epsilon(1e-6));
        CHECK(r.params.scale == doctest::Approx(truth.scale).epsilon(1e-6));
        CHECK(r.cost < 1e-12);
        // held parameters pass through untouched
        CHECK(r.params.gamma_short == cfg.initial.gamma_short);
        CHECK(r.params.gamma_long == cfg.initial.gamma_long);
    }

    SUBCASE("identifiability over random admissible generators") {
        Xoshiro256pp rng(101);
        for (int trial = 0; trial < 10; ++trial) {
            FitParams gen;
            gen.gamma_short = 1.0;
            gen.gamma_long = std::exp(-rng.uniform() * std::log(50.0));
            const double mean = 0.5 * (gen.gamma_short + gen.gamma_long);
            const double x = std::exp(std::log(0.3) + rng.uniform() * std::log(100.0));
            gen.delta_m = x * mean;
            gen.eps_mod = std::exp(std::log(1e-3) + rng.uniform() * std::log(300.0));
            gen.eps_arg = (2.0 * rng.uniform() - 1.0) * 3.0;
            gen.scale = 0.5 + 1.5 * rng.uniform();

            const double span = 14.0;
            const int npts = std::max(600, static_cast<int>(20.0 * gen.delta_m * span / (2.0 * pi)));
            const auto g = linspace(0.0, span, npts);
            const auto d = series_from_model(gen, g);

            FitConfig cfg;
            cfg.initial = gen;
            cfg.initial.eps_mod *= 1.0 + 0.2 * (2.0 * rng.uniform() - 1.0);
            cfg.initial.eps_arg += 0.15 * (2.0 * rng.uniform() - 1.0);
            cfg.initial.scale *= 1.0 + 0.2 * (2.0 * rng.uniform() - 1.0);
            const double dm_guess = gen.delta_m * (1.0 + 0.2 * (2.0 * rng.uniform() - 1.0));
            // aliasing basins are ~2 pi/span apart: scan enough starts to cover
            // the 20 percent guess uncertainty
            const double basin = pi / span;
            const int half = std::max(1, static_cast<int>(std::ceil(0.25 * gen.delta_m / basin)));
            std::vector<double> starts;
            for (int k = -half; k <= half; ++k)
                starts.push_back(dm_guess + k * basin);
            const auto r = fit_intensity_scan(d, cfg, starts);
            CHECK(r.params.delta_m == doctest::Approx(gen.delta_m).epsilon(1e-6));
            CHECK(r.params.eps_mod == doctest::Approx(gen.eps_mod).epsilon(1e-6));
            CHECK(std::abs(wrap_angle(r.params.eps_arg - gen.eps_arg)) < 1e-6);
            CHECK(r.params.scale == doctest::Approx(gen.scale).epsilon(1e-6));
        }
    }
}

TEST_CASE("fit mechanics") {
    SUBCASE("constant data with only eps_mod free lands on the boundary") {
        const auto grid = linspace(0.0, 5.0, 50);
        IntensitySeries flat;
        flat.times = grid;
        flat.values.assign(grid.size(), 0.7);
        FitConfig cfg;
        cfg.initial.delta_m = 2.0;
        cfg.initial.eps_mod = 0.4;
        cfg.initial.eps_arg = 0.3;
        cfg.initial.gamma_short = 1.0;
        cfg.initial.gamma_long = 0.9;
        cfg.initial.scale = 1.0;
        cfg.free_params = {Param::EpsMod};
        const auto r = fit_intensity(flat, cfg);
        CHECK(r.params.eps_mod >= 0.0);
        CHECK(r.cost <= r.cost_trace.front());
    }

    SUBCASE("accepted cost is non-increasing") {
        FitParams truth{0.5, 0.03, -0.8, 1.0, 1.0 / 579.6, 0.55};
        const auto grid = linspace(0.0, 15.0, 200);
        auto data = series_from_model(truth, grid);
        // perturb the data so the fit has real work to do
        Xoshiro256pp rng(3);
        data.errors.assign(data.values.size(), 1e-3);
        for (auto& v : data.values) v = std::max(0.0, v + 1e-3 * (2.0 * rng.uniform() - 1.0));
        FitConfig cfg;
        cfg.initial = truth;
        cfg.initial.delta_m *= 1.1;
        cfg.initial.eps_mod *= 1.2;
        const auto r = fit_intensity(data, cfg);
        REQUIRE(r.cost_trace.size() > 1);
        for (std::size_t k = 1; k < r.cost_trace.size(); ++k)
            CHECK(r.cost_trace[k] <= r.cost_trace[k - 1]);
        CHECK(r.iterations + 1 == static_cast<int>(r.cost_trace.size()));
    }

    SUBCASE("scaling the data moves only the scale parameter") {
        FitParams truth{0.5, 0.03, -0.8, 1.0, 1.0 / 579.6, 0.55};
        const auto grid = linspace(0.0, 15.0, 300);
        const auto data = series_from_model(truth, grid);
        IntensitySeries scaled = data;
        for (auto& v : scaled.values) v *= 7.5;
        FitConfig cfg;
        cfg.initial = truth;
        cfg.initial.delta_m *= 1.05;
        cfg.initial.eps_mod *= 0.9;
        const auto r1 = fit_intensity(data, cfg);
        FitConfig cfg2 = cfg;
        cfg2.initial.scale *= 7.5;
        const auto r2 = fit_intensity(scaled, cfg2);
        CHECK(r2.params.scale == doctest::Approx(7.5 * r1.params.scale).epsilon(1e-8));
        CHECK(r2.params.delta_m == doctest::Approx(r1.params.delta_m).epsilon(1e-8));
        CHECK(r2.params.eps_mod == doctest::Approx(r1.params.eps_mod).epsilon(1e-8));
        CHECK(r2.params.eps_arg == doctest::Approx(r1.params.eps_arg).epsilon(1e-8));
    }

    SUBCASE("covariance is symmetric with positive diagonal") {
        FitParams truth{0.5, 0.05, 0.4, 1.0, 0.02, 1.0};
        const auto grid = linspace(0.0, 15.0, 300);
        auto data = series_from_model(truth, grid);
        data.errors.assign(data.values.size(), 1e-3);
        FitConfig cfg;
        cfg.initial = truth;
        const auto r = fit_intensity(data, cfg);
        REQUIRE_FALSE(r.rank_deficient);
        const std::size_t n = r.free_params.size();
        REQUIRE(r.covariance.size() == n * n);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(r.covariance[i * n + i] > 0.0);
            for (std::size_t j = 0; j < n; ++j)
                CHECK(r.covariance[i * n + j] ==
                      doctest::Approx(r.covariance[j * n + i]).epsilon(1e-8));
        }
        const auto se = r.std_errors();
        for (double s : se) CHECK(s > 0.0);
        CHECK(std::abs(r.correlation(0, 1)) <= 1.0 + 1e-12);
    }

    SUBCASE("validation") {
        IntensitySeries tiny;
        tiny.times = {0.0, 1.0};
        tiny.values = {1.0, 0.5};
        FitConfig cfg;
        cfg.initial.gamma_short = 1.0;
        cfg.initial.gamma_long = 0.5;
        CHECK_THROWS_AS(fit_intensity(tiny, cfg), ParameterError);  // too few points
        IntensitySeries bad;
        bad.times = linspace(0.0, 5.0, 20);
        bad.values.assign(20, 1.0);
        bad.errors.assign(20, 0.0);
        CHECK_THROWS_AS(fit_intensity(bad, cfg), ParameterError);  // non-positive errors
    }
}

TEST_CASE("calibration: binned fits on simulated kaon intensities") {
    // Poisson-fluctuated histograms from the standard-intensity sampler. The
    // binned-likelihood information floor at n = 1e6 is sigma(dm) ~ 1.5%,
    // sigma(m) ~ 0.6%, sigma(phi) ~ 2.6 deg; each seed must land within the
    // 3-sigma bands and the seed-averaged pulls must be unbiased.
    const auto p = builtin_dataset("kaon").params;
    const auto eps = epsilon_bare(p);
    const double eth_true = std::abs(epsilon_renormalized(p).value);
    const double arg_true = -std::arg(eps.value);  // phase in the cos(dm t + phi) convention

    double sum_dm = 0.0;
    int n_seeds = 0;
    for (std::uint64_t seed : {11ULL, 12ULL, 13ULL, 14ULL, 15ULL, 16ULL}) {
        const std::size_t n = 1000000;
        const auto sample = sample_intensity(p, eps, n, seed);
        std::vector<double> edges;
        const double tmax = 20.0 * p.tau_short();
        for (int k = 0; k <= 200; ++k) edges.push_back(tmax * k / 200.0);
        const auto hist = histogram(sample, SectorFilter::All, edges);

        FitConfig cfg;
        cfg.initial.delta_m = p.delta_m() * 1.08;
        cfg.initial.eps_mod = std::abs(eps.value) * 1.15;
        cfg.initial.eps_arg = arg_true - 0.1;
        cfg.initial.gamma_short = p.gamma_short;
        cfg.initial.gamma_long = p.gamma_long;
        cfg.initial.scale = hist.series.values[0];
        const auto r = fit_intensity(hist.series, cfg);
        CHECK(r.converged);
        const double dm_rel = r.params.delta_m / p.delta_m() - 1.0;
        CHECK(std::abs(dm_rel) < 0.046);
        const double eth_fit = r.params.eps_mod * std::sqrt(p.gamma_long / p.gamma_short);
        CHECK(std::abs(eth_fit / eth_true - 1.0) < 0.05);
        CHECK(std::abs(wrap_angle(r.params.eps_arg - arg_true)) < 7.8 * pi / 180.0);
        // the reported uncertainty should sit near the observed spread scale
        const auto se = r.std_errors();
        CHECK(se[0] / p.delta_m() > 0.003);
        CHECK(se[0] / p.delta_m() < 0.05);
        sum_dm += dm_rel;
        ++n_seeds;
    }
    CHECK(std::abs(sum_dm / n_seeds) < 0.015);  // ~2.5 sigma of the seed-mean
}
