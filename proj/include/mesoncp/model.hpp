// Two-level decaying system: physical parameters, the effective non-Hermitian
// Hamiltonian obtained from a two-level/continuum coupling model, the CPT
// constraint on the coupling phases, and an exact memory-kernel evolution used
// to validate the weak-coupling reduction.
#pragma once

#include <vector>

#include "mesoncp/types.hpp"

namespace mesoncp {

// Masses and decay widths of the short- and long-lived eigenstates (hbar = 1,
// so widths and masses share inverse-time units). Only differences of masses
// enter any observable.
struct MesonParams {
    double m_short = 0.0;
    double m_long = 0.0;
    double gamma_short = 0.0;  // Gamma_S = 1/tau_S
    double gamma_long = 0.0;   // Gamma_L = 1/tau_L

    double delta_m() const { return m_long - m_short; }  // signed
    double delta_gamma() const { return gamma_long - gamma_short; }
    double tau_short() const { return 1.0 / gamma_short; }
    double tau_long() const { return 1.0 / gamma_long; }

    // Widths must be finite and non-negative; zero is allowed (stable level).
    void validate() const;
};

// Couplings of the two discrete levels to the decay continuum.
// lambda_j = lambdaj_mod * exp(i*thetaj); omegas are the level energies.
struct Couplings {
    double lambda1_mod = 0.0;
    double lambda2_mod = 0.0;
    double theta1 = 0.0;  // phase of lambda_1, in (-pi, pi]
    double theta2 = 0.0;  // phase of lambda_2, in (-pi, pi]
    double omega1 = 0.0;
    double omega2 = 0.0;

    Complex lambda1() const { return std::polar(lambda1_mod, theta1); }
    Complex lambda2() const { return std::polar(lambda2_mod, theta2); }
    double delta_theta() const { return wrap_angle(theta1 - theta2); }

    void validate() const;
};

// Basis tag for the 2x2 effective Hamiltonian: the CP eigenbasis (decay
// modes K1/K2) or the flavor basis (particle/antiparticle K0/K0bar).
enum class Basis { CpEigen, Flavor };

struct EffectiveHamiltonian {
    Matrix2c matrix;
    Basis basis = Basis::CpEigen;
};

// Continuum form factor |v(omega)|^2. Flat reproduces the Markovian
// (delta-kernel) reduction exactly; Lorentzian = cutoff^2/(omega^2+cutoff^2)
// gives an exponential memory kernel with rate `cutoff`.
struct FormFactor {
    enum class Kind { Flat, Lorentzian };
    Kind kind = Kind::Flat;
    double cutoff = 0.0;  // only used for Lorentzian; must be > 0 there

    void validate() const;
};

// One eigenvalue/eigenvector pair; the eigenvector is normalized so its
// largest-modulus component equals 1.
struct EigenPair {
    Complex value;
    std::array<Complex, 2> vector;
};

struct CptReport {
    bool satisfied = false;
    // normalized residuals: |M11-M22|, |G11-G22|, |M12-conj(M21)|, |G12-conj(G21)|
    std::array<double, 4> residuals{};
};

// Match the model parameters to the observed masses and lifetimes:
// omega1 = m_S, omega2 = m_L, |lambda1| = sqrt(Gamma_S/2pi),
// |lambda2| = sqrt(Gamma_L/2pi); the phases are free inputs.
Couplings couplings_from_params(const MesonParams& p, double theta1, double theta2);

// Weak-coupling effective Hamiltonian in the CP eigenbasis:
//   [[omega1 - i*pi*|l1|^2,  -i*pi*l1*conj(l2)],
//    [-i*pi*conj(l1)*l2,     omega2 - i*pi*|l2|^2]]
EffectiveHamiltonian build_effective_hamiltonian(const Couplings& c);

// Exact eigendecomposition of the 2x2 matrix via the quadratic formula.
// The pair whose eigenvalue is closer to H(0,0) comes first ("+" label).
// Throws DegenerateSpectrumError when the discriminant vanishes within
// 1e-14 * max_abs(H)^2.
std::array<EigenPair, 2> eigensystem(const EffectiveHamiltonian& h);

// Conjugation by T = (1/sqrt2)[[1,1],[1,-1]] (T is its own inverse).
Matrix2c t_conjugate(const Matrix2c& m);

// Change from the CP eigenbasis to the flavor basis: T * H * T.
EffectiveHamiltonian to_flavor_basis(const EffectiveHamiltonian& h);

// CPT conditions on the mass-decay matrix in the flavor basis, with
// M = (H + H^dag)/2 and Gamma = i(H - H^dag): equal diagonals of both parts
// and Hermitian off-diagonals. Residuals are normalized by max_abs(H).
CptReport cpt_check(const EffectiveHamiltonian& h, double tol);

// Coupling-phase differences allowed by CPT: {k*pi + pi/2, k in [k_min,k_max]},
// optionally reduced to (-pi, pi].
std::vector<double> cpt_allowed_phases(int k_min, int k_max, bool reduce = false);

// Integrate the exact memory-kernel equations for the two discrete amplitudes
// (continuum eliminated, g(omega,0) = 0) on the given time grid, which must be
// ascending and start at 0. Flat form factor: delta kernel, equivalent to
// f' = -i H_eff f. Lorentzian: kernel K(s) = pi*cutoff*exp(-cutoff*s), handled
// by augmenting the state with memory variables. Classical fixed-step RK4 with
// step = min(fastest time scale, 1/cutoff)/50.
std::vector<std::array<Complex, 2>> evolve_exact(const Couplings& c, const FormFactor& ff,
                                                 const std::array<Complex, 2>& f0,
                                                 const std::vector<double>& t_grid);

}  // namespace mesoncp
