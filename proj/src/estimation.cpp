#include "mesoncp/estimation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace mesoncp {

double& param_ref(FitParams& p, Param which) {
    switch (which) {
        case Param::DeltaM: return p.delta_m;
        case Param::EpsMod: return p.eps_mod;
        case Param::EpsArg: return p.eps_arg;
        case Param::GammaS: return p.gamma_short;
        case Param::GammaL: return p.gamma_long;
        case Param::Scale: break;
    }
    return p.scale;
}

double param_value(const FitParams& p, Param which) {
    return param_ref(const_cast<FitParams&>(p), which);
}

const char* param_name(Param which) {
    switch (which) {
        case Param::DeltaM: return "delta_m";
        case Param::EpsMod: return "eps_mod";
        case Param::EpsArg: return "eps_arg";
        case Param::GammaS: return "gamma_S";
        case Param::GammaL: return "gamma_L";
        case Param::Scale: break;
    }
    return "scale";
}

double intensity_model(double t, const FitParams& p) {
    const double mean = 0.5 * (p.gamma_short + p.gamma_long);
    const double m = p.eps_mod;
    return p.scale * (std::exp(-p.gamma_short * t) + m * m * std::exp(-p.gamma_long * t) +
                      2.0 * m * std::exp(-mean * t) * std::cos(p.delta_m * t + p.eps_arg));
}

void FitConfig::validate() const {
    const FitParams& q = initial;
    for (double v : {q.delta_m, q.eps_mod, q.eps_arg, q.gamma_short, q.gamma_long, q.scale})
        if (!std::isfinite(v)) throw ParameterError("FitConfig: initial values must be finite");
    if (q.eps_mod < 0.0) throw ParameterError("FitConfig: eps_mod must be non-negative");
    if (!(q.gamma_short > 0.0) || !(q.gamma_long > 0.0))
        throw ParameterError("FitConfig: widths must be positive");
    if (!(q.scale > 0.0)) throw ParameterError("FitConfig: scale must be positive");
    if (free_params.empty()) throw ParameterError("FitConfig: no free parameters");
    for (std::size_t i = 0; i < free_params.size(); ++i)
        for (std::size_t j = i + 1; j < free_params.size(); ++j)
            if (free_params[i] == free_params[j])
                throw ParameterError("FitConfig: duplicate free parameter");
    if (max_iterations < 1) throw ParameterError("FitConfig: max_iterations must be >= 1");
}

std::vector<double> finite_difference_jacobian(const ModelFunction& model, const FitParams& theta,
                                               const std::vector<Param>& params,
                                               const std::vector<double>& t_grid) {
    std::vector<double> jac(t_grid.size() * params.size());
    for (std::size_t j = 0; j < params.size(); ++j) {
        FitParams lo = theta, hi = theta;
        const double v = param_value(theta, params[j]);
        const double h = std::max(std::abs(v), 1.0) * 1e-6;
        param_ref(lo, params[j]) = v - h;
        param_ref(hi, params[j]) = v + h;
        for (std::size_t k = 0; k < t_grid.size(); ++k)
            jac[k * params.size() + j] = (model(t_grid[k], hi) - model(t_grid[k], lo)) / (2.0 * h);
    }
    return jac;
}

namespace {

// Internal (unconstrained) coordinates: widths and scale are fitted in log;
// the remaining parameters are divided by max(|initial|, 1) so the normal
// matrix has comparably scaled directions and the scalar damping works.
bool is_log_param(Param p) {
    return p == Param::GammaS || p == Param::GammaL || p == Param::Scale;
}

std::vector<double> internal_scales(const FitParams& initial, const std::vector<Param>& free) {
    std::vector<double> s(free.size(), 1.0);
    for (std::size_t j = 0; j < free.size(); ++j)
        if (!is_log_param(free[j]))
            s[j] = std::max(std::abs(param_value(initial, free[j])), 1.0);
    return s;
}

FitParams apply_internal(const FitParams& base, const std::vector<Param>& free,
                         const std::vector<double>& scales, const Eigen::VectorXd& u) {
    FitParams q = base;
    for (std::size_t j = 0; j < free.size(); ++j) {
        const double x = u[static_cast<Eigen::Index>(j)];
        double& ref = param_ref(q, free[j]);
        if (is_log_param(free[j]))
            ref = std::exp(x);
        else
            ref = x * scales[j];
    }
    if (q.eps_mod < 0.0) q.eps_mod = 0.0;           // projection to the boundary
    q.eps_arg = wrap_angle(q.eps_arg);
    return q;
}

}  // namespace

std::vector<double> FitResult::std_errors() const {
    const std::size_t n = free_params.size();
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double v = covariance.empty() ? 0.0 : covariance[i * n + i];
        out[i] = v > 0.0 ? std::sqrt(v) : 0.0;
    }
    return out;
}

double FitResult::correlation(std::size_t i, std::size_t j) const {
    const std::size_t n = free_params.size();
    if (covariance.empty() || i >= n || j >= n) return 0.0;
    const double d = covariance[i * n + i] * covariance[j * n + j];
    return d > 0.0 ? covariance[i * n + j] / std::sqrt(d) : 0.0;
}

FitResult fit_intensity(const IntensitySeries& data, const FitConfig& cfg) {
    data.validate();
    cfg.validate();
    const std::size_t npts = data.times.size();
    const std::size_t nfree = cfg.free_params.size();
    if (npts < nfree + 1)
        throw ParameterError("fit_intensity: need more data points than free parameters");

    std::vector<double> sigma(npts, 1.0);
    if (!data.errors.empty()) {
        for (std::size_t k = 0; k < npts; ++k) {
            if (!(data.errors[k] > 0.0))
                throw ParameterError("fit_intensity: error bars must be positive");
            sigma[k] = data.errors[k];
        }
    }

    const auto& free = cfg.free_params;
    const ModelFunction model = [](double t, const FitParams& q) { return intensity_model(t, q); };

    // starting internal coordinates
    const std::vector<double> scales = internal_scales(cfg.initial, free);
    Eigen::VectorXd u(static_cast<Eigen::Index>(nfree));
    for (std::size_t j = 0; j < nfree; ++j) {
        const double v = param_value(cfg.initial, free[j]);
        u[static_cast<Eigen::Index>(j)] = is_log_param(free[j]) ? std::log(v) : v / scales[j];
    }

    auto cost_of = [&](const FitParams& q) {
        double c = 0.0;
        for (std::size_t k = 0; k < npts; ++k) {
            const double r = (data.values[k] - intensity_model(data.times[k], q)) / sigma[k];
            c += r * r;
        }
        return c;
    };

    FitParams theta = apply_internal(cfg.initial, free, scales, u);
    double cost = cost_of(theta);

    FitResult res;
    res.free_params = free;
    res.cost_trace.push_back(cost);

    double damping = -1.0;  // initialized from the first normal matrix
    int accepted = 0;
    bool converged = false;

    const auto nf = static_cast<Eigen::Index>(nfree);
    const auto np = static_cast<Eigen::Index>(npts);

    for (int iter = 0; iter < cfg.max_iterations && !converged; ++iter) {
        // weighted Jacobian in internal coordinates (chain rule for log params)
        const std::vector<double> jext = finite_difference_jacobian(model, theta, free, data.times);
        Eigen::MatrixXd jac(np, nf);
        Eigen::VectorXd resid(np);
        for (std::size_t k = 0; k < npts; ++k) {
            resid[static_cast<Eigen::Index>(k)] =
                (data.values[k] - intensity_model(data.times[k], theta)) / sigma[k];
            for (std::size_t j = 0; j < nfree; ++j) {
                double d = jext[k * nfree + j] / sigma[k];
                d *= is_log_param(free[j]) ? param_value(theta, free[j]) : scales[j];
                jac(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = d;
            }
        }
        const Eigen::MatrixXd normal = jac.transpose() * jac;
        const Eigen::VectorXd grad = jac.transpose() * resid;
        const double mean_diag = normal.trace() / static_cast<double>(nfree);
        if (damping < 0.0) damping = 1e-3 * std::max(mean_diag, 1e-300);

        bool stepped = false;
        while (!stepped) {
            Eigen::MatrixXd a = normal;
            a.diagonal().array() += damping;
            const Eigen::VectorXd step = a.ldlt().solve(grad);
            const Eigen::VectorXd u_try = u + step;
            const FitParams theta_try = apply_internal(cfg.initial, free, scales, u_try);
            const double cost_try = cost_of(theta_try);

            if (std::isfinite(cost_try) && cost_try <= cost) {
                const double decrease = (cost - cost_try) / std::max(cost, 1e-300);
                u = u_try;
                theta = theta_try;
                cost = cost_try;
                damping /= 10.0;
                ++accepted;
                res.cost_trace.push_back(cost);
                stepped = true;
                if (decrease < cfg.convergence_tol) converged = true;
            } else {
                damping *= 10.0;
                if (damping > 1e18 * std::max(mean_diag, 1e-300)) {
                    // no downhill step exists at any damping: treat as stalled
                    converged = true;
                    stepped = true;
                }
            }
        }
    }

    // The model is invariant under (delta_m, eps_arg) -> (-delta_m, -eps_arg);
    // report the representative with delta_m >= 0.
    if (theta.delta_m < 0.0) {
        theta.delta_m = -theta.delta_m;
        theta.eps_arg = wrap_angle(-theta.eps_arg);
    }
    res.params = theta;
    res.cost = cost;
    res.iterations = accepted;
    res.converged = converged;

    // Covariance from the final Jacobian in external coordinates.
    const std::vector<double> jext = finite_difference_jacobian(model, theta, free, data.times);
    Eigen::MatrixXd jac(np, nf);
    for (std::size_t k = 0; k < npts; ++k)
        for (std::size_t j = 0; j < nfree; ++j)
            jac(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) =
                jext[k * nfree + j] / sigma[k];
    const Eigen::MatrixXd normal = jac.transpose() * jac;
    // Rank is judged on the correlation-normalized matrix so that parameter
    // units do not masquerade as degeneracy.
    Eigen::VectorXd d = normal.diagonal().array().sqrt();
    res.rank_deficient = (d.minCoeff() <= 0.0);
    if (!res.rank_deficient) {
        Eigen::MatrixXd corr(nf, nf);
        for (Eigen::Index i = 0; i < nf; ++i)
            for (Eigen::Index j = 0; j < nf; ++j) corr(i, j) = normal(i, j) / (d[i] * d[j]);
        const Eigen::JacobiSVD<Eigen::MatrixXd> svd(corr);
        res.rank_deficient = svd.singularValues().minCoeff() < 1e-12;
    }
    if (!res.rank_deficient) {
        Eigen::MatrixXd corr(nf, nf);
        for (Eigen::Index i = 0; i < nf; ++i)
            for (Eigen::Index j = 0; j < nf; ++j) corr(i, j) = normal(i, j) / (d[i] * d[j]);
        const Eigen::MatrixXd corr_inv = corr.inverse();
        res.covariance.resize(nfree * nfree);
        for (std::size_t i = 0; i < nfree; ++i)
            for (std::size_t j = 0; j < nfree; ++j)
                res.covariance[i * nfree + j] =
                    corr_inv(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) /
                    (d[static_cast<Eigen::Index>(i)] * d[static_cast<Eigen::Index>(j)]);
    }
    return res;
}

FitResult fit_intensity_scan(const IntensitySeries& data, const FitConfig& cfg,
                             const std::vector<double>& delta_m_guesses) {
    if (delta_m_guesses.empty()) return fit_intensity(data, cfg);
    FitResult best;
    bool have = false;
    for (double dm : delta_m_guesses) {
        FitConfig c = cfg;
        c.initial.delta_m = dm;
        const FitResult r = fit_intensity(data, c);
        if (!have || r.cost < best.cost) {
            best = r;
            have = true;
        }
    }
    return best;
}

}  // namespace mesoncp
