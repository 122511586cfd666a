#pragma once

// Real special functions: log-Gamma, Pochhammer, real binomial, Gauss 2F1 on
// [0, 1], and the complete elliptic integrals K, E.
//
// Elliptic integrals use the PARAMETER convention m = k^2 throughout:
//   K(m) = int_0^{pi/2} (1 - m sin^2 x)^{-1/2} dx,
//   E(m) = int_0^{pi/2} (1 - m sin^2 x)^{1/2} dx.
// std::comp_ellint_1/2 take the modulus k instead; do not mix them up.

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "bnorm/errors.hpp"

namespace bnorm {

/// ln Gamma(x) for x > 0.
inline double log_gamma(double x) {
    if (!(x > 0.0)) throw DomainError("log_gamma: x must be positive, got " + std::to_string(x));
    return std::lgamma(x);
}

/// ln|Gamma(x)| together with the sign of Gamma(x); x must not be a pole.
struct SignedLogGamma {
    double log_abs;
    int sign;
};

inline bool is_nonpositive_integer(double x) { return x <= 0.0 && std::floor(x) == x; }

inline SignedLogGamma log_gamma_signed(double x) {
    if (is_nonpositive_integer(x)) throw DomainError("log_gamma_signed: pole at " + std::to_string(x));
    int sign = 1;
    const double v = ::lgamma_r(x, &sign);
    return {v, sign};
}

/// Rising factorial (d)_k = d (d+1) ... (d+k-1); (d)_0 = 1.
inline double pochhammer(double d, unsigned k) {
    double p = 1.0;
    for (unsigned j = 0; j < k; ++j) p *= d + j;
    return p;
}

/// Binomial coefficient C(x, n) for real x. Uses the Gamma route when all
/// Gamma arguments are positive and the falling-factorial product otherwise.
inline double real_binomial(double x, unsigned n) {
    if (x + 1.0 > 0.0 && x - n + 1.0 > 0.0) {
        return std::exp(std::lgamma(x + 1.0) - std::lgamma(n + 1.0) - std::lgamma(x - n + 1.0));
    }
    double p = 1.0;
    for (unsigned j = 0; j < n; ++j) p *= (x - j) / (j + 1.0);
    return p;
}

struct HypParams {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double z = 0.0;
};

/// Truncated hypergeometric series sum_{k < terms} (a)_k (b)_k / ((c)_k k!) z^k.
/// Stops early once terms drop below 1e-17 of the partial sum.
inline double hyp2f1_series(double a, double b, double c, double z, std::size_t terms) {
    if (is_nonpositive_integer(c)) throw PreconditionError("hyp2f1_series: c is a non-positive integer");
    double sum = 1.0;
    double term = 1.0;
    for (std::size_t k = 0; k + 1 < terms; ++k) {
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z;
        sum += term;
        if (term == 0.0 || std::fabs(term) < 1e-17 * std::fabs(sum)) break;
    }
    return sum;
}

namespace detail {

inline double euler_integral_2f1(double a, double b, double c, double z) {
    // Gamma(c) / (Gamma(b) Gamma(c-b)) int_0^1 t^{b-1} (1-t)^{c-b-1} (1-tz)^{-a} dt
    thread_local boost::math::quadrature::tanh_sinh<double> integrator;
    const double one_minus_z = 1.0 - z;
    auto f = [&](double t, double tc) {
        // tc is the signed distance to the nearest endpoint; use it for 1-t near t=1.
        const double one_minus_t = tc > 0.0 ? tc : 1.0 - t;
        const double tt = tc < 0.0 ? -tc : t;
        const double denom = one_minus_t + tt * one_minus_z;
        return std::pow(tt, b - 1.0) * std::pow(one_minus_t, c - b - 1.0) * std::pow(denom, -a);
    };
    double err = 0.0;
    const double integral = integrator.integrate(f, 0.0, 1.0, 1e-14, &err);
    const double log_pref = std::lgamma(c) - std::lgamma(b) - std::lgamma(c - b);
    return std::exp(log_pref) * integral;
}

}  // namespace detail

/// Gauss hypergeometric F(a, b, c, z) for z in [0, 1) via the Euler integral
/// (requires c > b > 0). For z <= 0.5 the result is cross-checked against the
/// series to 1e-10 relative; a mismatch raises IntegrationFailure.
inline double hyp2f1(const HypParams& p) {
    if (!(p.z >= 0.0 && p.z < 1.0)) throw DomainError("hyp2f1: z must lie in [0, 1)");
    if (is_nonpositive_integer(p.c)) throw PreconditionError("hyp2f1: c is a non-positive integer");
    if (!(p.c > p.b && p.b > 0.0)) throw PreconditionError("hyp2f1: Euler integral needs c > b > 0");
    if (p.z == 0.0) return 1.0;
    const double value = detail::euler_integral_2f1(p.a, p.b, p.c, p.z);
    if (p.z <= 0.5) {
        const double series = hyp2f1_series(p.a, p.b, p.c, p.z, 4000);
        if (std::fabs(series - value) > 1e-10 * std::fabs(series)) {
            throw IntegrationFailure("hyp2f1: Euler integral and series disagree beyond 1e-10");
        }
    }
    return value;
}

inline double hyp2f1(double a, double b, double c, double z) { return hyp2f1(HypParams{a, b, c, z}); }

/// Gauss summation F(a, b, c, 1) = Gamma(c) Gamma(c-a-b) / (Gamma(c-a) Gamma(c-b)), c > a + b.
inline double hyp2f1_at_1(double a, double b, double c) {
    if (!(c > a + b)) throw DivergenceError("hyp2f1_at_1: series diverges unless c > a + b");
    if (a == 0.0 || b == 0.0) return 1.0;
    // 1/Gamma vanishes at the poles: the series terminates and sums to zero.
    if (is_nonpositive_integer(c - a) || is_nonpositive_integer(c - b)) return 0.0;
    const auto gc = log_gamma_signed(c);
    const auto gcab = log_gamma_signed(c - a - b);
    const auto gca = log_gamma_signed(c - a);
    const auto gcb = log_gamma_signed(c - b);
    const int sign = gc.sign * gcab.sign * gca.sign * gcb.sign;
    return sign * std::exp(gc.log_abs + gcab.log_abs - gca.log_abs - gcb.log_abs);
}

/// Elliptic parameter m = eps^2 in [0, 1].
struct EllipticParam {
    double m;

    explicit EllipticParam(double value) : m(value) {
        if (!(value >= 0.0 && value <= 1.0)) {
            throw DomainError("elliptic parameter m must lie in [0, 1], got " + std::to_string(value));
        }
    }
};

namespace detail {

struct AgmResult {
    double mean;
    double weighted_c2;  // sum_{j >= 0} 2^{j-1} c_j^2
};

inline AgmResult agm(double m) {
    double a = 1.0;
    double b = std::sqrt(1.0 - m);
    double c = std::sqrt(m);
    double weight = 0.5;
    double sum = weight * m;
    for (int it = 0; it < 64 && c > 0.0; ++it) {
        const double an = 0.5 * (a + b);
        // c_{j+1} = (a_j - b_j) / 2, in the cancellation-free form
        c = c * c / (4.0 * an);
        b = std::sqrt(a * b);
        a = an;
        weight *= 2.0;
        const double term = weight * c * c;
        sum += term;
        if (term <= 1e-17 * sum && c <= 1e-16 * a) break;
    }
    return {a, sum};
}

}  // namespace detail

/// Complete elliptic integral of the first kind K(m), 0 <= m < 1.
inline double elliptic_K(EllipticParam p) {
    if (p.m == 1.0) throw DivergenceError("elliptic_K: diverges at m = 1");
    return std::numbers::pi / (2.0 * detail::agm(p.m).mean);
}

/// Complete elliptic integral of the second kind E(m), 0 <= m <= 1.
inline double elliptic_E(EllipticParam p) {
    if (p.m == 1.0) return 1.0;
    const auto r = detail::agm(p.m);
    return std::numbers::pi / (2.0 * r.mean) * (1.0 - r.weighted_c2);
}

}  // namespace bnorm
