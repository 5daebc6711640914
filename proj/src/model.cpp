#include "mesoncp/model.hpp"

#include <algorithm>
#include <cmath>

namespace mesoncp {

void MesonParams::validate() const {
    for (double v : {m_short, m_long, gamma_short, gamma_long})
        if (!std::isfinite(v)) throw ParameterError("MesonParams: all fields must be finite");
    if (gamma_short < 0.0 || gamma_long < 0.0)
        throw ParameterError("MesonParams: decay widths must be non-negative");
}

void Couplings::validate() const {
    for (double v : {lambda1_mod, lambda2_mod, theta1, theta2, omega1, omega2})
        if (!std::isfinite(v)) throw ParameterError("Couplings: all fields must be finite");
    if (lambda1_mod < 0.0 || lambda2_mod < 0.0)
        throw ParameterError("Couplings: coupling moduli must be non-negative");
}

void FormFactor::validate() const {
    if (kind == Kind::Lorentzian && !(cutoff > 0.0 && std::isfinite(cutoff)))
        throw ParameterError("FormFactor: Lorentzian cutoff must be positive and finite");
}

Couplings couplings_from_params(const MesonParams& p, double theta1, double theta2) {
    p.validate();
    if (!std::isfinite(theta1) || !std::isfinite(theta2))
        throw ParameterError("couplings_from_params: phases must be finite");
    Couplings c;
    c.omega1 = p.m_short;
    c.omega2 = p.m_long;
    c.lambda1_mod = std::sqrt(p.gamma_short / (2.0 * pi));
    c.lambda2_mod = std::sqrt(p.gamma_long / (2.0 * pi));
    c.theta1 = wrap_angle(theta1);
    c.theta2 = wrap_angle(theta2);
    return c;
}

EffectiveHamiltonian build_effective_hamiltonian(const Couplings& c) {
    c.validate();
    const Complex l1 = c.lambda1();
    const Complex l2 = c.lambda2();
    const Complex mi_pi{0.0, -pi};
    EffectiveHamiltonian h;
    h.basis = Basis::CpEigen;
    h.matrix(0, 0) = c.omega1 + mi_pi * (c.lambda1_mod * c.lambda1_mod);
    h.matrix(0, 1) = mi_pi * l1 * std::conj(l2);
    h.matrix(1, 0) = mi_pi * std::conj(l1) * l2;
    h.matrix(1, 1) = c.omega2 + mi_pi * (c.lambda2_mod * c.lambda2_mod);
    return h;
}

std::array<EigenPair, 2> eigensystem(const EffectiveHamiltonian& h) {
    const Matrix2c& m = h.matrix;
    if (!m.finite()) throw ParameterError("eigensystem: matrix entries must be finite");
    const double scale = m.max_abs();

    const Complex mean = 0.5 * m.trace();
    // discriminant of the characteristic polynomial: (a-d)^2 + 4bc
    const Complex diff = m(0, 0) - m(1, 1);
    const Complex disc = diff * diff + 4.0 * m(0, 1) * m(1, 0);
    if (std::abs(disc) < 1e-14 * scale * scale)
        throw DegenerateSpectrumError("eigensystem: spectrum degenerate within tolerance");
    const Complex s = 0.5 * std::sqrt(disc);

    const Complex e1 = mean + s;
    const Complex e2 = mean - s;

    auto eigvec = [&m](const Complex& e) -> std::array<Complex, 2> {
        // Rows of (H - e) are proportional; pick the better-conditioned kernel form.
        const std::array<Complex, 2> v1{m(0, 1), e - m(0, 0)};
        const std::array<Complex, 2> v2{e - m(1, 1), m(1, 0)};
        const double n1 = std::abs(v1[0]) + std::abs(v1[1]);
        const double n2 = std::abs(v2[0]) + std::abs(v2[1]);
        std::array<Complex, 2> v = (n1 >= n2) ? v1 : v2;
        if (n1 == 0.0 && n2 == 0.0) {
            // Off-diagonals vanish and e matches a diagonal entry: coordinate vector.
            v = (std::abs(e - m(0, 0)) <= std::abs(e - m(1, 1)))
                    ? std::array<Complex, 2>{1.0, 0.0}
                    : std::array<Complex, 2>{0.0, 1.0};
        }
        // Normalize so the largest-modulus component is exactly 1.
        const int imax = (std::abs(v[0]) >= std::abs(v[1])) ? 0 : 1;
        const Complex pivot = v[static_cast<std::size_t>(imax)];
        return {v[0] / pivot, v[1] / pivot};
    };

    EigenPair p1{e1, eigvec(e1)};
    EigenPair p2{e2, eigvec(e2)};
    // "+" label: the eigenvalue closer to H(0,0).
    if (std::abs(p2.value - m(0, 0)) < std::abs(p1.value - m(0, 0))) std::swap(p1, p2);
    return {p1, p2};
}

Matrix2c t_conjugate(const Matrix2c& m) {
    // T M T with T = (1/sqrt2)[[1,1],[1,-1]]; expanded to avoid the
    // intermediate sqrt(2) factors.
    Matrix2c r;
    r(0, 0) = 0.5 * (m(0, 0) + m(0, 1) + m(1, 0) + m(1, 1));
    r(0, 1) = 0.5 * (m(0, 0) - m(0, 1) + m(1, 0) - m(1, 1));
    r(1, 0) = 0.5 * (m(0, 0) + m(0, 1) - m(1, 0) - m(1, 1));
    r(1, 1) = 0.5 * (m(0, 0) - m(0, 1) - m(1, 0) + m(1, 1));
    return r;
}

EffectiveHamiltonian to_flavor_basis(const EffectiveHamiltonian& h) {
    if (h.basis != Basis::CpEigen)
        throw BasisError("to_flavor_basis: input must be in the CP eigenbasis");
    return EffectiveHamiltonian{t_conjugate(h.matrix), Basis::Flavor};
}

CptReport cpt_check(const EffectiveHamiltonian& h, double tol) {
    if (h.basis != Basis::Flavor) throw BasisError("cpt_check: input must be in the flavor basis");
    const Matrix2c& m = h.matrix;
    const Matrix2c dag = m.adjoint();
    Matrix2c mass, width;  // H = mass - i*width/2
    for (std::size_t k = 0; k < 4; ++k) {
        mass.a[k] = 0.5 * (m.a[k] + dag.a[k]);
        width.a[k] = Complex{0.0, 1.0} * (m.a[k] - dag.a[k]);
    }
    double scale = m.max_abs();
    if (scale == 0.0) scale = 1.0;

    CptReport r;
    r.residuals[0] = std::abs(mass(0, 0) - mass(1, 1)) / scale;
    r.residuals[1] = std::abs(width(0, 0) - width(1, 1)) / scale;
    r.residuals[2] = std::abs(mass(0, 1) - std::conj(mass(1, 0))) / scale;
    r.residuals[3] = std::abs(width(0, 1) - std::conj(width(1, 0))) / scale;
    r.satisfied = std::all_of(r.residuals.begin(), r.residuals.end(),
                              [tol](double x) { return x <= tol; });
    return r;
}

std::vector<double> cpt_allowed_phases(int k_min, int k_max, bool reduce) {
    std::vector<double> out;
    for (int k = k_min; k <= k_max; ++k) {
        const double phase = k * pi + 0.5 * pi;
        out.push_back(reduce ? wrap_angle(phase) : phase);
    }
    return out;
}

namespace {

// State layout for the memory-kernel integrator: (f1, f2) for the flat kernel,
// (f1, f2, m1, m2) for the Lorentzian one, where m_j carries the exponential
// memory integral and obeys m' = -cutoff*m + pi*cutoff*(conj(l1) f1 + conj(l2) f2).
// The conjugation placement matches the weak-coupling matrix above, so the flat
// limit reduces exactly to f' = -i H_eff f.
struct KernelSystem {
    Complex l1, l2;
    double omega1, omega2;
    double cutoff = 0.0;
    bool lorentzian = false;

    void derivative(const std::array<Complex, 4>& y, std::array<Complex, 4>& dy) const {
        const Complex i_unit{0.0, 1.0};
        if (!lorentzian) {
            const Complex drive = pi * (std::conj(l1) * y[0] + std::conj(l2) * y[1]);
            dy[0] = -i_unit * omega1 * y[0] - l1 * drive;
            dy[1] = -i_unit * omega2 * y[1] - l2 * drive;
            dy[2] = dy[3] = Complex{};
        } else {
            const Complex drive = pi * cutoff * (std::conj(l1) * y[0] + std::conj(l2) * y[1]);
            dy[0] = -i_unit * omega1 * y[0] - l1 * y[2];
            dy[1] = -i_unit * omega2 * y[1] - l2 * y[3];
            dy[2] = drive - cutoff * y[2];
            dy[3] = drive - cutoff * y[3];
        }
    }

    void rk4_step(std::array<Complex, 4>& y, double h) const {
        std::array<Complex, 4> k1, k2, k3, k4, tmp;
        derivative(y, k1);
        for (int j = 0; j < 4; ++j) tmp[j] = y[j] + 0.5 * h * k1[j];
        derivative(tmp, k2);
        for (int j = 0; j < 4; ++j) tmp[j] = y[j] + 0.5 * h * k2[j];
        derivative(tmp, k3);
        for (int j = 0; j < 4; ++j) tmp[j] = y[j] + h * k3[j];
        derivative(tmp, k4);
        for (int j = 0; j < 4; ++j)
            y[j] += (h / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    }
};

}  // namespace

std::vector<std::array<Complex, 2>> evolve_exact(const Couplings& c, const FormFactor& ff,
                                                 const std::array<Complex, 2>& f0,
                                                 const std::vector<double>& t_grid) {
    c.validate();
    ff.validate();
    if (!std::isfinite(f0[0].real()) || !std::isfinite(f0[0].imag()) ||
        !std::isfinite(f0[1].real()) || !std::isfinite(f0[1].imag()))
        throw ParameterError("evolve_exact: initial state must be finite");
    if (t_grid.empty() || t_grid.front() != 0.0)
        throw IntegrationError("evolve_exact: time grid must start at 0");
    for (std::size_t k = 1; k < t_grid.size(); ++k)
        if (!(t_grid[k] > t_grid[k - 1]))
            throw IntegrationError("evolve_exact: time grid must be strictly ascending");

    KernelSystem sys;
    sys.l1 = c.lambda1();
    sys.l2 = c.lambda2();
    sys.omega1 = c.omega1;
    sys.omega2 = c.omega2;
    sys.lorentzian = (ff.kind == FormFactor::Kind::Lorentzian);
    sys.cutoff = ff.cutoff;

    // Fastest time scale of the system; the Lorentzian memory adds the cutoff rate.
    double rate = std::max({2.0 * pi * c.lambda1_mod * c.lambda1_mod,
                            2.0 * pi * c.lambda2_mod * c.lambda2_mod, std::abs(c.omega1),
                            std::abs(c.omega2)});
    if (sys.lorentzian) rate = std::max(rate, ff.cutoff);
    const double span = t_grid.back();
    double h = (rate > 0.0) ? 1.0 / (50.0 * rate) : span / 1000.0;
    if (!(h > 0.0)) h = 1.0;  // span == 0: grid is just {0}

    const double f0_norm = std::sqrt(std::norm(f0[0]) + std::norm(f0[1]));
    const double norm_cap = 10.0 * std::max(f0_norm, 1e-300);

    std::array<Complex, 4> y{f0[0], f0[1], Complex{}, Complex{}};
    std::vector<std::array<Complex, 2>> out;
    out.reserve(t_grid.size());
    out.push_back({y[0], y[1]});

    for (std::size_t k = 1; k < t_grid.size(); ++k) {
        const double dt = t_grid[k] - t_grid[k - 1];
        const auto nsub = static_cast<std::size_t>(std::ceil(dt / h));
        const double hs = dt / static_cast<double>(nsub);
        for (std::size_t s = 0; s < nsub; ++s) sys.rk4_step(y, hs);
        const double fn = std::sqrt(std::norm(y[0]) + std::norm(y[1]));
        if (!std::isfinite(fn) || fn > norm_cap)
            throw IntegrationError("evolve_exact: unstable integration (norm growth)");
        out.push_back({y[0], y[1]});
    }
    return out;
}

}  // namespace mesoncp
