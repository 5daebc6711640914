// CP-violation parameter epsilon, its decay-rate renormalization, and the
// observables derived from it (q/p, semileptonic asymmetry, production-rate
// ratio).
#pragma once

#include "mesoncp/model.hpp"
#include "mesoncp/types.hpp"

namespace mesoncp {

struct Epsilon {
    enum class Kind { Bare, Renormalized };

    Complex value{};
    Kind kind = Kind::Bare;
    // Set when |value| >= 1: the closed forms are outside their small-epsilon
    // regime. Informational only; such values are still returned.
    bool flagged = false;
};

Epsilon make_epsilon(Complex value, Epsilon::Kind kind);

// Closed form from the eigenvalue matching of the two-level model:
//   epsilon = (1/2) sqrt(Gamma_L Gamma_S) / ((m_L - m_S) - (i/2)(Gamma_L - Gamma_S)).
// Throws DegenerateParametersError when delta_m and delta_gamma both vanish.
Epsilon epsilon_bare(const MesonParams& p);

// Same parameter extracted from the effective Hamiltonian entries:
//   epsilon = H21 / (H22 - H11)  (= -i pi conj(l1) l2 / ((w2-w1) - i pi(|l2|^2-|l1|^2))).
// Agrees with epsilon_bare exactly when delta_theta = -pi/2, and in modulus
// for every phase choice. Input must be in the CP eigenbasis.
Epsilon epsilon_from_eigenvector(const EffectiveHamiltonian& h);

// Decay-rate renormalization: epsilon^th = epsilon * sqrt(Gamma_L/Gamma_S).
// The multiplier is a positive real, so the phase is preserved.
Epsilon epsilon_renormalized(const MesonParams& p);

struct QOverP {
    double modulus = 1.0;
    double phase_deg = 0.0;  // in (-180, 180]
};

// |q/p| = |1-eps|/|1+eps| and its phase in degrees.
QOverP q_over_p(const Epsilon& e);

// Semileptonic asymmetry A_SL ~= 4 Re(epsilon).
double asymmetry_sl(const Epsilon& e);

// The same quantity through the |q/p| route, 2*(1 - |q/p|); agrees with
// asymmetry_sl to first order in epsilon.
double asymmetry_sl_from_q_over_p(const Epsilon& e);

// Ratio of CP=+1 production rates long/short: |epsilon|^2 * Gamma_L/Gamma_S.
// Identically |epsilon_renormalized|^2.
double production_rate_ratio(const MesonParams& p);

}  // namespace mesoncp
