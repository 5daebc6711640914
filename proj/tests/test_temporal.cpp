#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mesoncp/dataio.hpp"
#include "mesoncp/temporal.hpp"
#include "support/oracles.hpp"

using namespace mesoncp;

namespace {

MesonParams kaon() { return builtin_dataset("kaon").params; }

TemporalWaveFunction kaon_wave() {
    const auto p = kaon();
    return build_wavefunction(p, epsilon_bare(p));
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) g[static_cast<std::size_t>(k)] = a + (b - a) * k / (n - 1);
    return g;
}

}  // namespace

TEST_CASE("survival probability and decay-rate density") {
    CHECK(survival_probability(3.0, 0.0) == 1.0);
    CHECK(survival_probability(1.0, std::log(2.0)) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(survival_probability(2.5, 1.0 / 2.5) == doctest::Approx(1.0 / std::exp(1.0)).epsilon(1e-15));
    CHECK(decay_rate_density(4.0, 0.0) == 4.0);
    CHECK(decay_rate_density(0.0, 7.0) == 0.0);
    CHECK_THROWS_AS(survival_probability(1.0, -0.1), DomainError);
    CHECK_THROWS_AS(decay_rate_density(-1.0, 0.1), DomainError);

    SUBCASE("density equals minus the derivative of the survival law") {
        // central difference at the pinned point
        const double h = 1e-5;
        const double fd = -(survival_probability(2.0, 1.0 + h) - survival_probability(2.0, 1.0 - h)) / (2.0 * h);
        CHECK(fd == doctest::Approx(decay_rate_density(2.0, 1.0)).epsilon(1e-6));
        // and over random rates spanning six decades
        Xoshiro256pp rng(41);
        for (int k = 0; k < 100; ++k) {
            const double g = std::exp(std::log(1e-3) + rng.uniform() * std::log(1e6));
            const double t = (0.1 + 2.0 * rng.uniform()) / g;
            const double step = 1e-3 / g;
            const double d = -(survival_probability(g, t + step) - survival_probability(g, t - step)) / (2.0 * step);
            CHECK(d == doctest::Approx(decay_rate_density(g, t)).epsilon(1e-6));
        }
    }
}

TEST_CASE("standard amplitude psi1") {
    const auto p = kaon();
    const auto zero = make_epsilon({}, Epsilon::Kind::Bare);

    SUBCASE("initial overlap is 1/sqrt2") {
        CHECK(psi1_standard(p, zero, 0.0).real() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
        CHECK(psi1_standard(p, zero, 0.0).imag() == 0.0);
    }

    SUBCASE("single-pole limit") {
        for (double t : {0.3 * p.tau_short(), 2.0 * p.tau_short()}) {
            const auto v = psi1_standard(p, zero, t);
            CHECK(std::norm(v) ==
                  doctest::Approx(0.5 * std::exp(-p.gamma_short * t)).epsilon(1e-13));
        }
    }

    SUBCASE("late times are dominated by the epsilon term") {
        const auto e = epsilon_bare(p);
        const double t = 12.0 * p.tau_short();
        const auto v = psi1_standard(p, e, t);
        const double expected = std::norm(e.value) * std::exp(-p.gamma_long * t) /
                                (2.0 * std::norm(1.0 + e.value));
        CHECK(std::abs(std::norm(v) - expected) < 0.25 * expected);
    }

    SUBCASE("pole and domain errors") {
        CHECK_THROWS_AS(psi1_standard(p, make_epsilon({-1.0, 0.0}, Epsilon::Kind::Bare), 1.0),
                        PoleError);
        CHECK_THROWS_AS(psi1_standard(p, zero, -1.0), DomainError);
    }
}

TEST_CASE("standard intensity") {
    const auto p = kaon();
    const auto e = epsilon_bare(p);
    const auto grid = linspace(0.0, 20.0 * p.tau_short(), 2001);

    SUBCASE("no violation: single exponential") {
        const auto s = intensity_standard(p, make_epsilon({}, Epsilon::Kind::Bare), grid, 2.5);
        for (std::size_t k = 0; k < grid.size(); ++k)
            CHECK(s.values[k] == doctest::Approx(2.5 * std::exp(-p.gamma_short * grid[k])).epsilon(1e-13));
    }

    SUBCASE("exact expansion equals |psi1|^2 pointwise") {
        const auto s = intensity_standard(p, e, grid, 1.0);
        for (std::size_t k = 0; k < grid.size(); k += 7) {
            const double direct = 2.0 * std::norm(psi1_standard(p, e, grid[k]));
            const double scale = std::max(direct, std::exp(-p.gamma_short * grid[k]));
            CHECK(std::abs(s.values[k] - direct) <= 1e-12 * scale);
        }
    }

    SUBCASE("value at t = 0 is the supplied scale") {
        const auto s = intensity_standard(p, e, grid, 3.75);
        CHECK(s.values[0] == doctest::Approx(3.75).epsilon(1e-12));
        // the displayed variant deviates at t = 0 because its interference
        // coefficient is half the exact one
        const auto disp = intensity_standard(p, e, grid, 3.75, true);
        CHECK(disp.values[0] != doctest::Approx(3.75).epsilon(1e-4));
    }

    SUBCASE("interference zeros are spaced by pi/delta_m") {
        // strip the non-oscillating part, undo the envelope, find sign changes
        const auto wide = linspace(0.0, 40.0 * p.tau_short(), 4001);
        const auto s = intensity_standard(p, e, wide, 1.0);
        const double mean = 0.5 * (p.gamma_short + p.gamma_long);
        const double norm1p = std::norm(1.0 + e.value);
        std::vector<double> zeros;
        double prev = 0.0;
        bool have_prev = false;
        for (std::size_t k = 0; k < wide.size(); ++k) {
            const double base = (std::exp(-p.gamma_short * wide[k]) +
                                 std::norm(e.value) * std::exp(-p.gamma_long * wide[k])) / norm1p;
            const double osc = (s.values[k] - base) * std::exp(mean * wide[k]);
            if (have_prev && osc * prev < 0.0)
                zeros.push_back(wide[k]);
            prev = osc;
            have_prev = true;
        }
        REQUIRE(zeros.size() > 3);
        const double dt_grid = wide[1] - wide[0];
        for (std::size_t k = 1; k < zeros.size(); ++k)
            CHECK(std::abs((zeros[k] - zeros[k - 1]) - pi / p.delta_m()) < 2.0 * dt_grid);
    }
}

TEST_CASE("wave-function normalization") {
    SUBCASE("no violation: unit constant") {
        MesonParams p{0.0, 2.0, 3.0, 1.0};
        const auto w = build_wavefunction(p, make_epsilon({}, Epsilon::Kind::Bare));
        CHECK(w.n_tilde == 1.0);
    }

    SUBCASE("symmetric case collapses to (1+eps)^2") {
        MesonParams p{1.0, 1.0, 2.0, 2.0};
        const auto w = build_wavefunction(p, make_epsilon({0.25, 0.0}, Epsilon::Kind::Bare));
        CHECK(w.n_tilde * w.n_tilde == doctest::Approx(1.5625).epsilon(1e-15));
    }

    SUBCASE("closed form agrees with quadrature for the kaon") {
        const auto w = kaon_wave();
        const double q = oracles::decay_probability_quadrature(w);
        CHECK(std::abs(q - 1.0) < 1e-8);
    }

    SUBCASE("normalization property over random parameters") {
        Xoshiro256pp rng(13);
        for (int k = 0; k < 25; ++k) {
            const auto p = oracles::random_params(rng);
            const Complex eps{0.6 * rng.uniform() - 0.3, 0.6 * rng.uniform() - 0.3};
            const auto w = build_wavefunction(p, make_epsilon(eps, Epsilon::Kind::Bare));
            CHECK(std::abs(oracles::decay_probability_quadrature(w) - 1.0) < 1e-8);
        }
    }

    SUBCASE("guards") {
        MesonParams p{0.0, 0.0, 2.0, 2.0};
        CHECK_THROWS_AS(build_wavefunction(p, make_epsilon({-1.0, 0.0}, Epsilon::Kind::Bare)),
                        NormalizationError);
        MesonParams stable{0.0, 1.0, 2.0, 0.0};
        CHECK_THROWS_AS(build_wavefunction(stable, make_epsilon({}, Epsilon::Kind::Bare)),
                        ParameterError);
        CHECK_THROWS_AS(
            build_wavefunction(kaon(), epsilon_renormalized(kaon())),
            ParameterError);
    }
}

TEST_CASE("two-component amplitudes and densities") {
    SUBCASE("initial values with no violation") {
        MesonParams p{0.0, 1.0, 3.0, 0.5};
        const auto w = build_wavefunction(p, make_epsilon({}, Epsilon::Kind::Bare));
        const auto amps = psi_tilde(w, 0.0);
        CHECK(amps[0].real() == doctest::Approx(std::sqrt(1.5)).epsilon(1e-15));
        CHECK(amps[1].real() == doctest::Approx(std::sqrt(0.25)).epsilon(1e-15));
        // |psi1|^2 is then exactly half of a unit-normalized exponential
        for (double t : {0.1, 0.9, 3.0}) {
            const auto a = psi_tilde(w, t);
            CHECK(std::norm(a[0]) == doctest::Approx(0.5 * 3.0 * std::exp(-3.0 * t)).epsilon(1e-13));
        }
    }

    SUBCASE("kaon amplitudes against an extended-precision evaluation") {
        const auto w = kaon_wave();
        const double t = w.params.tau_short();
        const auto amps = psi_tilde(w, t);
        using C = std::complex<long double>;
        const long double gs = w.params.gamma_short, gl = w.params.gamma_long;
        const long double ml = w.params.m_long;
        const C eps{w.epsilon.value.real(), w.epsilon.value.imag()};
        const C es = std::exp(C{-0.5L * gs * t, -0.0L * t});
        const C el = std::exp(C{-0.5L * gl * t, -ml * t});
        const C pref = 1.0L / (std::sqrt(2.0L) * static_cast<long double>(w.n_tilde));
        const C a1 = pref * (std::sqrt(gs) * es + eps * std::sqrt(gl) * el);
        const C a2 = pref * (eps * std::sqrt(gs) * es + std::sqrt(gl) * el);
        CHECK(std::abs(amps[0] - Complex{static_cast<double>(a1.real()), static_cast<double>(a1.imag())}) <
              1e-12 * std::abs(amps[0]));
        CHECK(std::abs(amps[1] - Complex{static_cast<double>(a2.real()), static_cast<double>(a2.imag())}) <
              1e-12 * std::abs(amps[1]));
    }

    SUBCASE("closed-form densities equal the amplitude squares on 1000 points") {
        const auto w = kaon_wave();
        const auto grid = linspace(0.0, 15.0 * w.params.tau_short(), 1000);
        for (int sector : {1, -1}) {
            const auto d = density_cp(w, sector, grid);
            for (std::size_t k = 0; k < grid.size(); ++k) {
                const auto amps = psi_tilde(w, grid[k]);
                const double direct = std::norm(sector == 1 ? amps[0] : amps[1]);
                CHECK(std::abs(d.values[k] - direct) <=
                      1e-12 * std::max(direct, w.params.gamma_short));
            }
        }
    }

    SUBCASE("sector weights: closed form vs quadrature, and they sum to one") {
        const auto w = kaon_wave();
        const auto weights = sector_weights(w);
        CHECK(weights[0] + weights[1] == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(weights[0] == doctest::Approx(oracles::sector_weight_quadrature(w, 1)).epsilon(1e-8));
        CHECK(weights[1] == doctest::Approx(oracles::sector_weight_quadrature(w, -1)).epsilon(1e-8));
    }

    SUBCASE("swapping the widths and masses exchanges the two densities") {
        MesonParams p{0.0, 4.0, 5.0, 0.7};
        MesonParams swapped{p.m_long, p.m_short, p.gamma_long, p.gamma_short};
        const auto e = make_epsilon({0.12, 0.0}, Epsilon::Kind::Bare);
        const auto w1 = build_wavefunction(p, e);
        const auto w2 = build_wavefunction(swapped, e);
        const auto grid = linspace(0.0, 3.0, 101);
        const auto d1p = density_cp(w1, 1, grid);
        const auto d2m = density_cp(w2, -1, grid);
        for (std::size_t k = 0; k < grid.size(); ++k)
            CHECK(d1p.values[k] == doctest::Approx(d2m.values[k]).epsilon(1e-13));
    }
}

TEST_CASE("renormalized intensity") {
    const auto p = kaon();

    SUBCASE("no violation limit") {
        MesonParams stable{0.0, 2.0, 3.0, 0.0};
        const auto grid = linspace(0.0, 2.0, 41);
        const auto s = intensity_renormalized(stable, grid);
        for (std::size_t k = 0; k < grid.size(); ++k)
            CHECK(s.values[k] == doctest::Approx(std::exp(-3.0 * grid[k])).epsilon(1e-13));
    }

    SUBCASE("pointwise proportional to the CP=+1 density") {
        const auto w = kaon_wave();
        const auto grid = linspace(0.0, 18.0 * p.tau_short(), 777);
        const auto num = intensity_renormalized(p, grid, 2.0);
        const auto den = density_cp(w, 1, grid);
        const double ratio0 = num.values[0] / den.values[0];
        for (std::size_t k = 1; k < grid.size(); ++k)
            CHECK(num.values[k] / den.values[k] == doctest::Approx(ratio0).epsilon(1e-10));
    }

    SUBCASE("envelope crossover sits near 13.4 tau_S") {
        // solve exp(-(G_S-G_L)t/2) = |eps_th| by bisection on the two envelopes
        const double eth = std::abs(epsilon_renormalized(p).value);
        const double mean = 0.5 * (p.gamma_short + p.gamma_long);
        auto diff = [&](double t) {
            return eth * std::exp(-mean * t) - eth * eth * std::exp(-p.gamma_long * t);
        };
        double lo = 5.0 * p.tau_short(), hi = 30.0 * p.tau_short();
        REQUIRE(diff(lo) > 0.0);
        REQUIRE(diff(hi) < 0.0);
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (diff(mid) > 0.0 ? lo : hi) = mid;
        }
        const double expected = 2.0 * std::log(1.0 / eth) / (p.gamma_short - p.gamma_long);
        CHECK(lo == doctest::Approx(expected).epsilon(1e-6));
        CHECK(lo / p.tau_short() == doctest::Approx(13.4).epsilon(0.01));
    }

    SUBCASE("the standard and renormalized shapes are genuinely different") {
        const auto w = kaon_wave();
        const auto grid = linspace(0.0, 10.0 * p.tau_short(), 2000);
        const auto std_i = intensity_standard(p, epsilon_bare(p), grid);
        const auto dens = density_cp(w, 1, grid);
        double rmin = 1e300, rmax = 0.0;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const double r = std_i.values[k] / dens.values[k];
            rmin = std::min(rmin, r);
            rmax = std::max(rmax, r);
        }
        CHECK((rmax - rmin) / (0.5 * (rmax + rmin)) > 1e-3);
    }
}
