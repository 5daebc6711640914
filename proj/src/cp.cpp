#include "mesoncp/cp.hpp"

#include <cmath>

namespace mesoncp {

Epsilon make_epsilon(Complex value, Epsilon::Kind kind) {
    if (!std::isfinite(value.real()) || !std::isfinite(value.imag()))
        throw ParameterError("Epsilon: value must be finite");
    return Epsilon{value, kind, std::abs(value) >= 1.0};
}

Epsilon epsilon_bare(const MesonParams& p) {
    p.validate();
    const Complex denom{p.delta_m(), -0.5 * p.delta_gamma()};
    if (denom == Complex{})
        throw DegenerateParametersError(
            "epsilon_bare: delta_m and delta_gamma both vanish (degenerate levels)");
    const double num = 0.5 * std::sqrt(p.gamma_long * p.gamma_short);
    return make_epsilon(num / denom, Epsilon::Kind::Bare);
}

Epsilon epsilon_from_eigenvector(const EffectiveHamiltonian& h) {
    if (h.basis != Basis::CpEigen)
        throw BasisError("epsilon_from_eigenvector: input must be in the CP eigenbasis");
    const Complex denom = h.matrix(1, 1) - h.matrix(0, 0);
    const double scale = h.matrix.max_abs();
    if (std::abs(denom) < 1e-300 || std::abs(denom) < 1e-15 * scale)
        throw DegenerateParametersError("epsilon_from_eigenvector: degenerate diagonal");
    return make_epsilon(h.matrix(1, 0) / denom, Epsilon::Kind::Bare);
}

Epsilon epsilon_renormalized(const MesonParams& p) {
    p.validate();
    if (!(p.gamma_short > 0.0))
        throw ParameterError("epsilon_renormalized: gamma_short must be positive");
    const Epsilon bare = epsilon_bare(p);
    const double mult = std::sqrt(p.gamma_long / p.gamma_short);
    return make_epsilon(bare.value * mult, Epsilon::Kind::Renormalized);
}

QOverP q_over_p(const Epsilon& e) {
    const Complex num = 1.0 - e.value;
    const Complex den = 1.0 + e.value;
    if (den == Complex{}) throw PoleError("q_over_p: epsilon = -1 is a pole");
    const Complex r = num / den;
    QOverP out;
    out.modulus = std::abs(r);
    out.phase_deg = std::arg(r) * 180.0 / pi;
    if (out.phase_deg <= -180.0) out.phase_deg += 360.0;
    return out;
}

double asymmetry_sl(const Epsilon& e) { return 4.0 * e.value.real(); }

double asymmetry_sl_from_q_over_p(const Epsilon& e) {
    return 2.0 * (1.0 - q_over_p(e).modulus);
}

double production_rate_ratio(const MesonParams& p) {
    p.validate();
    if (!(p.gamma_short > 0.0))
        throw ParameterError("production_rate_ratio: gamma_short must be positive");
    const Epsilon bare = epsilon_bare(p);
    return std::norm(bare.value) * (p.gamma_long / p.gamma_short);
}

}  // namespace mesoncp
