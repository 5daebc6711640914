#include "mesoncp/montecarlo.hpp"

#include <algorithm>
#include <cmath>

#include "mesoncp/rng.hpp"

namespace mesoncp {

namespace {

// Two-exponential rejection envelope  a*G_S*exp(-G_S t) + b*G_L*exp(-G_L t)
// (a, b are mixture masses). Domination over the three-term densities follows
// from AM-GM on the cross term: 2*sqrt(x*y) <= x + y pointwise.
struct ExpEnvelope {
    double gamma_short = 0.0, gamma_long = 0.0;
    double a = 0.0, b = 0.0;

    double mass() const { return a + b; }

    double value(double t) const {
        double v = 0.0;
        if (a > 0.0) v += a * gamma_short * std::exp(-gamma_short * t);
        if (b > 0.0) v += b * gamma_long * std::exp(-gamma_long * t);
        return v;
    }

    double draw(Xoshiro256pp& rng) const {
        const double pick = rng.uniform() * mass();
        const double g = (pick < a) ? gamma_short : gamma_long;
        return -std::log(rng.uniform_positive()) / g;
    }

    void check() const {
        if (!std::isfinite(mass()) || mass() <= 0.0)
            throw SamplingError("rejection envelope is not normalizable");
    }
};

// Draw one time from an unnormalized density `target` dominated by `env`.
double rejection_draw(const ExpEnvelope& env, Xoshiro256pp& rng, std::uint64_t& proposals,
                      double (*target)(const void*, double), const void* ctx) {
    for (;;) {
        ++proposals;
        const double t = env.draw(rng);
        const double u = rng.uniform() * env.value(t);
        const double d = target(ctx, t);
        if (!std::isfinite(d)) throw SamplingError("non-finite density in rejection sampler");
        if (u <= d) return t;
    }
}

struct TemporalCtx {
    const TemporalWaveFunction* w;
    int sector;
};

double temporal_density(const void* ctx, double t) {
    const auto* c = static_cast<const TemporalCtx*>(ctx);
    const auto amps = psi_tilde(*c->w, t);
    return std::norm(c->sector == 1 ? amps[0] : amps[1]);
}

struct IntensityCtx {
    const MesonParams* p;
    const Epsilon* e;
};

double intensity_density(const void* ctx, double t) {
    const auto* c = static_cast<const IntensityCtx*>(ctx);
    return std::norm(psi1_standard(*c->p, *c->e, t));
}

}  // namespace

DecaySample sample_decays(const TemporalWaveFunction& w, std::size_t n, std::uint64_t seed) {
    if (n < 1) throw ParameterError("sample_decays: need at least one event");

    const double gs = w.params.gamma_short, gl = w.params.gamma_long;
    const double mod = std::abs(w.epsilon.value);
    const double pref = 1.0 / (2.0 * w.n_tilde * w.n_tilde);
    const auto weights = sector_weights(w);
    const double wp = std::clamp(weights[0], 0.0, 1.0);

    // |psi1|^2 <= pref*((1+m)*G_S e^{-G_S t} + (m^2+m)*G_L e^{-G_L t}), same
    // with the coefficients swapped for |psi2|^2.
    const ExpEnvelope env_plus{gs, gl, pref * (1.0 + mod), pref * mod * (1.0 + mod)};
    const ExpEnvelope env_minus{gs, gl, pref * mod * (1.0 + mod), pref * (1.0 + mod)};
    env_plus.check();
    env_minus.check();

    Xoshiro256pp rng(seed);
    DecaySample out;
    out.seed = seed;
    out.times.reserve(n);
    out.sectors.reserve(n);

    TemporalCtx ctx_plus{&w, 1};
    TemporalCtx ctx_minus{&w, -1};
    for (std::size_t k = 0; k < n; ++k) {
        const int sector = (rng.uniform() < wp) ? 1 : -1;
        const auto& env = (sector == 1) ? env_plus : env_minus;
        const auto* ctx = (sector == 1) ? static_cast<const void*>(&ctx_plus)
                                        : static_cast<const void*>(&ctx_minus);
        out.times.push_back(rejection_draw(env, rng, out.proposals, temporal_density, ctx));
        out.sectors.push_back(sector);
    }
    return out;
}

DecaySample sample_intensity(const MesonParams& p, const Epsilon& e, std::size_t n,
                             std::uint64_t seed) {
    if (n < 1) throw ParameterError("sample_intensity: need at least one event");
    p.validate();
    if (!(p.gamma_short > 0.0))
        throw SamplingError("sample_intensity: gamma_short must be positive");
    const double mod = std::abs(e.value);
    if (!(p.gamma_long > 0.0) && mod > 0.0)
        throw SamplingError("sample_intensity: long-lived component is stable, density not normalizable");

    const double gs = p.gamma_short, gl = p.gamma_long;
    const double pref = 1.0 / (2.0 * std::norm(1.0 + e.value));
    // The exponentials here carry no Gamma prefactor; split the cross term as
    // 2 e^{-mean t} <= u e^{-G_S t} + e^{-G_L t}/u with u = sqrt(G_S/G_L) to
    // keep the envelope mass close to the target mass.
    ExpEnvelope env;
    env.gamma_short = gs;
    env.gamma_long = gl;
    if (mod > 0.0) {
        const double u = std::sqrt(gs / gl);
        env.a = pref * (1.0 + mod * u) / gs;
        env.b = pref * (mod * mod + mod / u) / gl;
    } else {
        env.a = pref / gs;
        env.b = 0.0;
    }
    env.check();

    Xoshiro256pp rng(seed);
    DecaySample out;
    out.seed = seed;
    out.times.reserve(n);
    out.sectors.assign(n, 1);

    IntensityCtx ctx{&p, &e};
    for (std::size_t k = 0; k < n; ++k)
        out.times.push_back(rejection_draw(env, rng, out.proposals, intensity_density, &ctx));
    return out;
}

BinnedDensity histogram(const DecaySample& s, SectorFilter filter,
                        const std::vector<double>& bin_edges) {
    if (bin_edges.size() < 2) throw ParameterError("histogram: need at least two bin edges");
    for (std::size_t k = 1; k < bin_edges.size(); ++k)
        if (!(bin_edges[k] > bin_edges[k - 1]))
            throw ParameterError("histogram: bin edges must be strictly ascending");
    if (s.times.size() != s.sectors.size())
        throw ParameterError("histogram: times/sectors length mismatch");

    const std::size_t nbins = bin_edges.size() - 1;
    std::vector<std::size_t> counts(nbins, 0);
    std::size_t overflow = 0, used = 0;

    for (std::size_t k = 0; k < s.times.size(); ++k) {
        if (filter == SectorFilter::CpPlus && s.sectors[k] != 1) continue;
        if (filter == SectorFilter::CpMinus && s.sectors[k] != -1) continue;
        const double t = s.times[k];
        if (t < bin_edges.front() || t >= bin_edges.back()) {
            ++overflow;
            continue;
        }
        const auto it = std::upper_bound(bin_edges.begin(), bin_edges.end(), t);
        counts[static_cast<std::size_t>(it - bin_edges.begin()) - 1] += 1;
        ++used;
    }

    const double n_total = static_cast<double>(s.times.size());
    BinnedDensity out;
    out.edges = bin_edges;
    out.n_total = s.times.size();
    out.n_used = used;
    out.n_overflow = overflow;
    out.series.kind = (filter == SectorFilter::CpPlus)    ? ModelKind::DensityCpPlus
                      : (filter == SectorFilter::CpMinus) ? ModelKind::DensityCpMinus
                                                          : ModelKind::Total;
    out.series.times.reserve(nbins);
    out.series.values.reserve(nbins);
    out.series.errors.reserve(nbins);
    for (std::size_t k = 0; k < nbins; ++k) {
        const double width = bin_edges[k + 1] - bin_edges[k];
        out.series.times.push_back(0.5 * (bin_edges[k] + bin_edges[k + 1]));
        if (n_total == 0.0) {
            out.series.values.push_back(0.0);
            out.series.errors.push_back(0.0);
        } else {
            const double c = static_cast<double>(counts[k]);
            out.series.values.push_back(c / (n_total * width));
            out.series.errors.push_back(std::sqrt(std::max(c, 1.0)) / (n_total * width));
        }
    }
    return out;
}

}  // namespace mesoncp
