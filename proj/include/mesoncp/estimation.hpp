// Weighted least-squares fitting of the oscillating intensity model to binned
// decay data, with a Levenberg-style damping schedule.
#pragma once

#include <functional>
#include <vector>

#include "mesoncp/temporal.hpp"

namespace mesoncp {

// Parameters of the intensity model
//   f(t) = scale * (e^{-gS t} + m^2 e^{-gL t} + 2 m e^{-(gS+gL)t/2} cos(dm t + phi)).
struct FitParams {
    double delta_m = 0.0;
    double eps_mod = 0.0;
    double eps_arg = 0.0;
    double gamma_short = 0.0;
    double gamma_long = 0.0;
    double scale = 1.0;
};

enum class Param { DeltaM, EpsMod, EpsArg, GammaS, GammaL, Scale };

double& param_ref(FitParams& p, Param which);
double param_value(const FitParams& p, Param which);
const char* param_name(Param which);

double intensity_model(double t, const FitParams& p);

struct FitConfig {
    FitParams initial;                      // values for free and held parameters alike
    std::vector<Param> free_params = {Param::DeltaM, Param::EpsMod, Param::EpsArg, Param::Scale};
    int max_iterations = 200;
    double convergence_tol = 1e-10;  // relative decrease of the cost

    void validate() const;
};

struct FitResult {
    FitParams params;
    double cost = 0.0;       // final weighted sum of squares
    int iterations = 0;      // accepted steps
    bool converged = false;
    bool rank_deficient = false;          // singular normal equations at the solution
    std::vector<Param> free_params;
    std::vector<double> covariance;       // row-major n_free x n_free, from the final Jacobian
    std::vector<double> cost_trace;       // cost after each accepted step (non-increasing)

    std::vector<double> std_errors() const;  // sqrt of the covariance diagonal
    double correlation(std::size_t i, std::size_t j) const;
};

using ModelFunction = std::function<double(double, const FitParams&)>;

// Central finite differences of `model` with respect to the listed parameters,
// step max(|theta_i|, 1) * 1e-6. Row-major, rows = t_grid points.
std::vector<double> finite_difference_jacobian(const ModelFunction& model, const FitParams& theta,
                                               const std::vector<Param>& params,
                                               const std::vector<double>& t_grid);

// Minimize sum_k ((y_k - f(t_k; theta)) / sigma_k)^2 over the free parameters.
// Positivity of the widths and the scale is enforced by fitting their logs;
// eps_mod is projected to >= 0 and eps_arg wrapped to (-pi, pi]. Damping is
// multiplied/divided by 10 on reject/accept, starting from 1e-3 times the mean
// diagonal of the normal matrix; accepted cost is non-increasing. Data without
// error bars is fitted unweighted (sigma = 1).
FitResult fit_intensity(const IntensitySeries& data, const FitConfig& cfg);

// Run fit_intensity once per delta_m starting value and keep the lowest-cost
// result. Frequency estimation has aliasing basins spaced by ~2*pi/span, so a
// scan over starting guesses is the sanctioned way to widen the capture range.
FitResult fit_intensity_scan(const IntensitySeries& data, const FitConfig& cfg,
                             const std::vector<double>& delta_m_guesses);

}  // namespace mesoncp
