// Shared scalar/matrix types and the error hierarchy used across the library.
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mesoncp {

using Complex = std::complex<double>;

inline constexpr double pi = std::numbers::pi;

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParameterError : Error {
    using Error::Error;
};
struct DomainError : Error {
    using Error::Error;
};
struct BasisError : Error {
    using Error::Error;
};
struct DegenerateSpectrumError : Error {
    using Error::Error;
};
struct DegenerateParametersError : Error {
    using Error::Error;
};
struct PoleError : Error {
    using Error::Error;
};
struct IntegrationError : Error {
    using Error::Error;
};
struct NormalizationError : Error {
    using Error::Error;
};
struct SamplingError : Error {
    using Error::Error;
};
struct ParseError : Error {
    using Error::Error;
};
struct LookupError : Error {
    using Error::Error;
};

// Dense 2x2 complex matrix, row-major. Small enough that everything is done
// with closed forms; no external linear-algebra dependency needed here.
struct Matrix2c {
    std::array<Complex, 4> a{};

    Complex& operator()(int i, int j) { return a[static_cast<std::size_t>(2 * i + j)]; }
    const Complex& operator()(int i, int j) const { return a[static_cast<std::size_t>(2 * i + j)]; }

    static Matrix2c of(Complex m00, Complex m01, Complex m10, Complex m11) {
        Matrix2c r;
        r.a = {m00, m01, m10, m11};
        return r;
    }

    static Matrix2c identity() { return of(Complex{1.0}, {}, {}, Complex{1.0}); }

    Matrix2c adjoint() const {
        return Matrix2c{{std::conj(a[0]), std::conj(a[2]), std::conj(a[1]), std::conj(a[3])}};
    }

    Complex trace() const { return a[0] + a[3]; }
    Complex determinant() const { return a[0] * a[3] - a[1] * a[2]; }

    // Largest entry modulus; the scale used for relative tolerances.
    double max_abs() const {
        double m = 0.0;
        for (const auto& z : a) m = std::max(m, std::abs(z));
        return m;
    }

    bool finite() const {
        for (const auto& z : a)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
        return true;
    }

    friend Matrix2c operator+(const Matrix2c& x, const Matrix2c& y) {
        Matrix2c r;
        for (std::size_t k = 0; k < 4; ++k) r.a[k] = x.a[k] + y.a[k];
        return r;
    }
    friend Matrix2c operator-(const Matrix2c& x, const Matrix2c& y) {
        Matrix2c r;
        for (std::size_t k = 0; k < 4; ++k) r.a[k] = x.a[k] - y.a[k];
        return r;
    }
    friend Matrix2c operator*(const Matrix2c& x, const Matrix2c& y) {
        Matrix2c r;
        r.a[0] = x.a[0] * y.a[0] + x.a[1] * y.a[2];
        r.a[1] = x.a[0] * y.a[1] + x.a[1] * y.a[3];
        r.a[2] = x.a[2] * y.a[0] + x.a[3] * y.a[2];
        r.a[3] = x.a[2] * y.a[1] + x.a[3] * y.a[3];
        return r;
    }
    friend Matrix2c operator*(Complex s, const Matrix2c& x) {
        Matrix2c r;
        for (std::size_t k = 0; k < 4; ++k) r.a[k] = s * x.a[k];
        return r;
    }

    std::array<Complex, 2> apply(const std::array<Complex, 2>& v) const {
        return {a[0] * v[0] + a[1] * v[1], a[2] * v[0] + a[3] * v[1]};
    }
};

// Wrap an angle into (-pi, pi].
inline double wrap_angle(double a) {
    double r = std::remainder(a, 2.0 * pi);
    if (r <= -pi) r += 2.0 * pi;
    return r;
}

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw ParameterError(msg);
}

}  // namespace mesoncp
