#pragma once

#include <cmath>

namespace bnorm {

/// Complex number as an explicit pair of reals, with its own division,
/// conjugation and principal-branch log/pow.
struct Complex {
    double re = 0.0;
    double im = 0.0;

    constexpr Complex() = default;
    constexpr Complex(double r) : re(r) {}  // NOLINT(google-explicit-constructor)
    constexpr Complex(double r, double i) : re(r), im(i) {}

    constexpr Complex& operator+=(const Complex& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    constexpr Complex& operator-=(const Complex& o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    constexpr Complex& operator*=(const Complex& o) {
        const double r = re * o.re - im * o.im;
        im = re * o.im + im * o.re;
        re = r;
        return *this;
    }
    constexpr Complex& operator*=(double s) {
        re *= s;
        im *= s;
        return *this;
    }
};

constexpr Complex operator+(Complex a, const Complex& b) { return a += b; }
constexpr Complex operator-(Complex a, const Complex& b) { return a -= b; }
constexpr Complex operator*(Complex a, const Complex& b) { return a *= b; }
constexpr Complex operator*(Complex a, double s) { return a *= s; }
constexpr Complex operator*(double s, Complex a) { return a *= s; }
constexpr Complex operator-(const Complex& a) { return {-a.re, -a.im}; }
constexpr bool operator==(const Complex& a, const Complex& b) { return a.re == b.re && a.im == b.im; }

constexpr Complex conj(const Complex& a) { return {a.re, -a.im}; }
/// |a|^2
constexpr double norm2(const Complex& a) { return a.re * a.re + a.im * a.im; }
inline double abs(const Complex& a) { return std::hypot(a.re, a.im); }
inline double arg(const Complex& a) { return std::atan2(a.im, a.re); }

/// Smith's algorithm; avoids overflow in |b|^2.
inline Complex operator/(const Complex& a, const Complex& b) {
    if (std::fabs(b.re) >= std::fabs(b.im)) {
        const double r = b.im / b.re;
        const double d = b.re + b.im * r;
        return {(a.re + a.im * r) / d, (a.im - a.re * r) / d};
    }
    const double r = b.re / b.im;
    const double d = b.re * r + b.im;
    return {(a.re * r + a.im) / d, (a.im * r - a.re) / d};
}
inline Complex operator/(const Complex& a, double s) { return {a.re / s, a.im / s}; }

inline Complex polar(double rho, double theta) { return {rho * std::cos(theta), rho * std::sin(theta)}; }

/// Principal branch: arg in (-pi, pi].
inline Complex log(const Complex& a) { return {std::log(abs(a)), arg(a)}; }

/// Principal power a^p = exp(p log a); real and positive for a on the positive real axis.
inline Complex pow(const Complex& a, double p) {
    if (a.re == 0.0 && a.im == 0.0) return p == 0.0 ? Complex{1.0} : Complex{0.0};
    return polar(std::pow(abs(a), p), p * arg(a));
}

}  // namespace bnorm
