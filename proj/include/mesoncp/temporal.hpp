// Temporal amplitudes and probability densities: exponential survival law,
// the standard two-pole transition amplitude and its intensity, and the
// two-component temporal wave function whose component squares are the decay
// densities in the two CP sectors.
#pragma once

#include <vector>

#include "mesoncp/cp.hpp"
#include "mesoncp/model.hpp"
#include "mesoncp/types.hpp"

namespace mesoncp {

// Two-component temporal wave function
//   psi1(t) = (1/(sqrt2*N)) (sqrt(G_S) e^{-iE_S t} + eps sqrt(G_L) e^{-iE_L t})
//   psi2(t) = (1/(sqrt2*N)) (eps sqrt(G_S) e^{-iE_S t} + sqrt(G_L) e^{-iE_L t})
// with E = m - i*Gamma/2 and N chosen so the total decay probability is 1.
// `epsilon` is the bare parameter; the sqrt(Gamma) weights generate the
// renormalized combination in the densities.
struct TemporalWaveFunction {
    MesonParams params;
    Epsilon epsilon;
    double n_tilde = 1.0;
};

enum class ModelKind { Standard, Renormalized, DensityCpPlus, DensityCpMinus, Total };

// A curve sampled on a strictly ascending time grid. `errors` is either empty
// or one standard error per value.
struct IntensitySeries {
    std::vector<double> times;
    std::vector<double> values;
    std::vector<double> errors;
    ModelKind kind = ModelKind::Standard;

    void validate() const;
};

// P_s(t) = exp(-gamma*t).
double survival_probability(double gamma, double t);

// p_d(t) = -dP_s/dt = gamma*exp(-gamma*t); integrates to 1 on [0, inf).
double decay_rate_density(double gamma, double t);

// Standard transition amplitude toward the CP=+1 mode:
//   psi1(t) = (1/(sqrt2 (1+eps))) (e^{-iE_S t} + eps e^{-iE_L t}).
Complex psi1_standard(const MesonParams& p, const Epsilon& e, double t);

// Intensity of CP=+1 detections, I(t) = scale * |psi1(t)|^2 / |psi1(0)|^2
// expanded into its three-term closed form. With paper_display = true the
// interference term instead uses the coefficient |eps| (half the exact one)
// and the phase convention cos(|dm| t + arg eps), for comparison plots.
IntensitySeries intensity_standard(const MesonParams& p, const Epsilon& e,
                                   const std::vector<double>& t_grid, double scale = 1.0,
                                   bool paper_display = false);

// Compute the normalization constant
//   N^2 = 1 + |eps|^2 + sqrt(G_S G_L)(G_S+G_L) / (dm^2 + ((G_S+G_L)/2)^2) * Re(eps)
// and assemble the wave function. Requires both widths positive and a bare
// epsilon.
TemporalWaveFunction build_wavefunction(const MesonParams& p, const Epsilon& e);

// Exact amplitudes (psi1(t), psi2(t)).
std::array<Complex, 2> psi_tilde(const TemporalWaveFunction& w, double t);

// |psi1|^2 (sector +1) or |psi2|^2 (sector -1) on a grid, via the three-term
// closed-form expansion.
IntensitySeries density_cp(const TemporalWaveFunction& w, int sector,
                           const std::vector<double>& t_grid);

// Integrated sector probabilities (w_plus, w_minus); they sum to 1.
std::array<double, 2> sector_weights(const TemporalWaveFunction& w);

// Renormalized intensity: same three-term form with eps^th in place of eps and
// prefactor scale/|1+eps^th|^2. Pointwise proportional to density_cp(+1).
IntensitySeries intensity_renormalized(const MesonParams& p, const std::vector<double>& t_grid,
                                       double scale = 1.0);

}  // namespace mesoncp
