#include "mesoncp/temporal.hpp"

#include <algorithm>
#include <cmath>

namespace mesoncp {

namespace {

void check_grid(const std::vector<double>& t) {
    if (t.empty()) throw DomainError("time grid must be non-empty");
    if (t.front() < 0.0) throw DomainError("time grid must be non-negative");
    for (std::size_t k = 1; k < t.size(); ++k)
        if (!(t[k] > t[k - 1])) throw DomainError("time grid must be strictly ascending");
}

// Shared three-term expansion of |a e^{-iE_S t} + b eps e^{-iE_L t}|^2-type
// intensities: leading + |coef|^2 * long + cross. The exact cross term is
// 2*Re(conj(coef) e^{i(m_L-m_S)t}) * e^{-mean_gamma*t}.
struct ThreeTerm {
    double gamma_short, gamma_long, dm_signed;
    Complex coef;

    double exact(double t) const {
        const double mean = 0.5 * (gamma_short + gamma_long);
        const Complex osc = std::polar(1.0, dm_signed * t);
        const double cross = 2.0 * (std::conj(coef) * osc).real() * std::exp(-mean * t);
        return std::exp(-gamma_short * t) + std::norm(coef) * std::exp(-gamma_long * t) + cross;
    }

    // The displayed variant: coefficient |coef| and phase cos(|dm| t + arg coef).
    double displayed(double t) const {
        const double mean = 0.5 * (gamma_short + gamma_long);
        const double cross = std::abs(coef) * std::exp(-mean * t) *
                             std::cos(std::abs(dm_signed) * t + std::arg(coef));
        return std::exp(-gamma_short * t) + std::norm(coef) * std::exp(-gamma_long * t) + cross;
    }
};

}  // namespace

void IntensitySeries::validate() const {
    if (times.size() != values.size())
        throw ParameterError("IntensitySeries: times/values length mismatch");
    if (!errors.empty() && errors.size() != values.size())
        throw ParameterError("IntensitySeries: errors length mismatch");
    check_grid(times);
    for (double v : values)
        if (!std::isfinite(v) || v < 0.0)
            throw ParameterError("IntensitySeries: values must be finite and non-negative");
}

double survival_probability(double gamma, double t) {
    if (gamma < 0.0 || !std::isfinite(gamma))
        throw DomainError("survival_probability: gamma must be non-negative");
    if (t < 0.0) throw DomainError("survival_probability: t must be non-negative");
    return std::exp(-gamma * t);
}

double decay_rate_density(double gamma, double t) {
    if (gamma < 0.0 || !std::isfinite(gamma))
        throw DomainError("decay_rate_density: gamma must be non-negative");
    if (t < 0.0) throw DomainError("decay_rate_density: t must be non-negative");
    return gamma * std::exp(-gamma * t);
}

namespace {

Complex pole_exponential(double m, double gamma, double t) {
    // e^{-i(m - i*gamma/2)t} = e^{-imt} e^{-gamma t/2}
    return std::polar(std::exp(-0.5 * gamma * t), -m * t);
}

}  // namespace

Complex psi1_standard(const MesonParams& p, const Epsilon& e, double t) {
    p.validate();
    if (t < 0.0) throw DomainError("psi1_standard: t must be non-negative");
    const Complex one_plus = 1.0 + e.value;
    if (one_plus == Complex{}) throw PoleError("psi1_standard: epsilon = -1 is a pole");
    const Complex a = pole_exponential(p.m_short, p.gamma_short, t);
    const Complex b = pole_exponential(p.m_long, p.gamma_long, t);
    return (a + e.value * b) / (std::sqrt(2.0) * one_plus);
}

IntensitySeries intensity_standard(const MesonParams& p, const Epsilon& e,
                                   const std::vector<double>& t_grid, double scale,
                                   bool paper_display) {
    p.validate();
    check_grid(t_grid);
    if (!(std::isfinite(scale)) || scale < 0.0)
        throw ParameterError("intensity_standard: scale must be finite and non-negative");
    const Complex one_plus = 1.0 + e.value;
    if (one_plus == Complex{}) throw PoleError("intensity_standard: epsilon = -1 is a pole");

    const ThreeTerm f{p.gamma_short, p.gamma_long, p.delta_m(), e.value};
    const double prefactor = scale / std::norm(one_plus);

    IntensitySeries s;
    s.kind = ModelKind::Standard;
    s.times = t_grid;
    s.values.reserve(t_grid.size());
    for (double t : t_grid) {
        const double v = prefactor * (paper_display ? f.displayed(t) : f.exact(t));
        s.values.push_back(std::max(v, 0.0));
    }
    return s;
}

TemporalWaveFunction build_wavefunction(const MesonParams& p, const Epsilon& e) {
    p.validate();
    if (!(p.gamma_short > 0.0) || !(p.gamma_long > 0.0))
        throw ParameterError("build_wavefunction: both widths must be positive");
    if (e.kind != Epsilon::Kind::Bare)
        throw ParameterError("build_wavefunction: expects the bare epsilon");

    const double gs = p.gamma_short, gl = p.gamma_long;
    const double mean = 0.5 * (gs + gl);
    const double dm = p.delta_m();
    const double n2 = 1.0 + std::norm(e.value) +
                      std::sqrt(gs * gl) * (gs + gl) / (dm * dm + mean * mean) * e.value.real();
    if (!(n2 > 0.0))
        throw NormalizationError("build_wavefunction: non-positive normalization");
    return TemporalWaveFunction{p, e, std::sqrt(n2)};
}

std::array<Complex, 2> psi_tilde(const TemporalWaveFunction& w, double t) {
    if (t < 0.0) throw DomainError("psi_tilde: t must be non-negative");
    const double rs = std::sqrt(w.params.gamma_short);
    const double rl = std::sqrt(w.params.gamma_long);
    const Complex es = pole_exponential(w.params.m_short, w.params.gamma_short, t);
    const Complex el = pole_exponential(w.params.m_long, w.params.gamma_long, t);
    const double pref = 1.0 / (std::sqrt(2.0) * w.n_tilde);
    return {pref * (rs * es + w.epsilon.value * rl * el),
            pref * (w.epsilon.value * rs * es + rl * el)};
}

IntensitySeries density_cp(const TemporalWaveFunction& w, int sector,
                           const std::vector<double>& t_grid) {
    if (sector != 1 && sector != -1) throw ParameterError("density_cp: sector must be +1 or -1");
    check_grid(t_grid);

    const double gs = w.params.gamma_short, gl = w.params.gamma_long;
    const double dm = w.params.delta_m();
    const double mean = 0.5 * (gs + gl);
    const Complex eps = w.epsilon.value;
    const double pref = 1.0 / (2.0 * w.n_tilde * w.n_tilde);
    const double root = std::sqrt(gs * gl);

    IntensitySeries s;
    s.kind = (sector == 1) ? ModelKind::DensityCpPlus : ModelKind::DensityCpMinus;
    s.times = t_grid;
    s.values.reserve(t_grid.size());
    for (double t : t_grid) {
        const Complex osc = std::polar(1.0, dm * t);
        // sector +1 cross carries conj(eps), sector -1 carries eps
        const Complex phase = (sector == 1) ? std::conj(eps) * osc : eps * osc;
        const double cross = 2.0 * root * phase.real() * std::exp(-mean * t);
        const double lead = (sector == 1) ? gs * std::exp(-gs * t) : std::norm(eps) * gs * std::exp(-gs * t);
        const double tail = (sector == 1) ? std::norm(eps) * gl * std::exp(-gl * t) : gl * std::exp(-gl * t);
        s.values.push_back(std::max(pref * (lead + tail + cross), 0.0));
    }
    return s;
}

std::array<double, 2> sector_weights(const TemporalWaveFunction& w) {
    const double gs = w.params.gamma_short, gl = w.params.gamma_long;
    const double dm = w.params.delta_m();
    const double mean = 0.5 * (gs + gl);
    const Complex eps = w.epsilon.value;
    const double root = std::sqrt(gs * gl);
    const double pref = 1.0 / (2.0 * w.n_tilde * w.n_tilde);
    const double denom = mean * mean + dm * dm;
    // integral of 2*Re(conj(eps) e^{i dm t}) e^{-mean t} and the eps analogue
    const double base = 1.0 + std::norm(eps);
    const double wp = pref * (base + 2.0 * root * (mean * eps.real() + dm * eps.imag()) / denom);
    const double wm = pref * (base + 2.0 * root * (mean * eps.real() - dm * eps.imag()) / denom);
    return {wp, wm};
}

IntensitySeries intensity_renormalized(const MesonParams& p, const std::vector<double>& t_grid,
                                       double scale) {
    p.validate();
    check_grid(t_grid);
    if (!(std::isfinite(scale)) || scale < 0.0)
        throw ParameterError("intensity_renormalized: scale must be finite and non-negative");
    const Epsilon eth = epsilon_renormalized(p);
    const Complex one_plus = 1.0 + eth.value;
    if (one_plus == Complex{}) throw PoleError("intensity_renormalized: epsilon^th = -1");

    const ThreeTerm f{p.gamma_short, p.gamma_long, p.delta_m(), eth.value};
    const double prefactor = scale / std::norm(one_plus);

    IntensitySeries s;
    s.kind = ModelKind::Renormalized;
    s.times = t_grid;
    s.values.reserve(t_grid.size());
    for (double t : t_grid) s.values.push_back(std::max(prefactor * f.exact(t), 0.0));
    return s;
}

}  // namespace mesoncp
