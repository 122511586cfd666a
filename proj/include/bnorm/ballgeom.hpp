#pragma once

// The unit ball of C^n, the weighted probability measures v_alpha and the
// involutive automorphisms phi_a.

#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>

#include "bnorm/complex.hpp"
#include "bnorm/errors.hpp"
#include "bnorm/specfun.hpp"

namespace bnorm {

/// Largest supported complex dimension. Points are stored inline so the
/// Monte Carlo inner loops never allocate.
inline constexpr int kMaxDim = 16;

/// A vector in C^n.
class Point {
public:
    Point() = default;
    explicit Point(int n) : n_(checked_dim(n)) {}
    Point(std::initializer_list<Complex> coords) : n_(checked_dim(static_cast<int>(coords.size()))) {
        int k = 0;
        for (const auto& c : coords) v_[k++] = c;
    }

    /// k-th standard basis vector e_{k+1} (zero-based k).
    static Point basis(int n, int k) {
        Point p(n);
        p[k] = 1.0;
        return p;
    }

    int dim() const { return n_; }
    Complex& operator[](int k) { return v_[k]; }
    const Complex& operator[](int k) const { return v_[k]; }

    double norm2() const {
        double s = 0.0;
        for (int k = 0; k < n_; ++k) s += bnorm::norm2(v_[k]);
        return s;
    }
    double norm() const { return std::sqrt(norm2()); }

    Point& operator+=(const Point& o) {
        for (int k = 0; k < n_; ++k) v_[k] += o.v_[k];
        return *this;
    }
    Point& operator-=(const Point& o) {
        for (int k = 0; k < n_; ++k) v_[k] -= o.v_[k];
        return *this;
    }
    Point& operator*=(const Complex& s) {
        for (int k = 0; k < n_; ++k) v_[k] *= s;
        return *this;
    }

private:
    static int checked_dim(int n) {
        if (n < 1 || n > kMaxDim) {
            throw PreconditionError("dimension must lie in [1, " + std::to_string(kMaxDim) + "], got " +
                                    std::to_string(n));
        }
        return n;
    }

    int n_ = 0;
    std::array<Complex, kMaxDim> v_{};
};

inline Point operator+(Point a, const Point& b) { return a += b; }
inline Point operator-(Point a, const Point& b) { return a -= b; }
inline Point operator*(const Complex& s, Point a) { return a *= s; }

inline Point conj(const Point& z) {
    Point r(z.dim());
    for (int k = 0; k < z.dim(); ++k) r[k] = conj(z[k]);
    return r;
}

/// <z, w> = sum_k z_k conj(w_k).
inline Complex inner(const Point& z, const Point& w) {
    if (z.dim() != w.dim()) {
        throw std::invalid_argument("inner: dimension mismatch " + std::to_string(z.dim()) + " vs " +
                                    std::to_string(w.dim()));
    }
    Complex s;
    for (int k = 0; k < z.dim(); ++k) s += z[k] * conj(w[k]);
    return s;
}

/// Dimension n and weight alpha together with the derived constants
/// c_alpha = C(n+alpha, n), theta = n+1+alpha, theta' = c_alpha theta and the
/// sharp Bloch constant C = Gamma(2+n+alpha) / Gamma((2+n+alpha)/2)^2.
class Params {
public:
    Params(int n, double alpha) : n_(n), alpha_(alpha) {
        if (n < 1 || n > kMaxDim) throw DomainError("Params: n must lie in [1, 16]");
        if (!(alpha > -1.0) || !std::isfinite(alpha)) throw DomainError("Params: alpha must be > -1");
        c_alpha_ = real_binomial(n + alpha, static_cast<unsigned>(n));
        theta_ = n + 1.0 + alpha;
        const double h = 0.5 * (2.0 + n + alpha);
        C_ = std::exp(log_gamma(2.0 + n + alpha) - 2.0 * log_gamma(h));
    }

    int n() const { return n_; }
    double alpha() const { return alpha_; }
    double c_alpha() const { return c_alpha_; }
    double theta() const { return theta_; }
    double theta_prime() const { return c_alpha_ * theta_; }
    double C_const() const { return C_; }

private:
    int n_;
    double alpha_;
    double c_alpha_ = 0.0;
    double theta_ = 0.0;
    double C_ = 0.0;
};

/// Guard for automorphism base points: |a| <= 1 - 1e-9.
inline constexpr double kMaxBaseNorm = 1.0 - 1e-9;
/// Below this |a| the automorphism is taken to be -Id.
inline constexpr double kZeroBaseNorm = 1e-14;

/// phi_a(w) = (a - P_a w - s_a Q_a w) / (1 - <w, a>), with P_a the orthogonal
/// projection onto span(a), Q_a = I - P_a, s_a = sqrt(1 - |a|^2); phi_0 = -Id.
class Automorphism {
public:
    explicit Automorphism(const Point& base) : a_(base), a2_(base.norm2()) {
        if (!(std::sqrt(a2_) <= kMaxBaseNorm)) {
            throw DomainError("Automorphism: |a| must not exceed 1 - 1e-9");
        }
        s_ = std::sqrt(1.0 - a2_);
    }

    const Point& base() const { return a_; }
    int dim() const { return a_.dim(); }

    Point apply(const Point& w) const {
        if (!(w.norm2() < 1.0)) throw DomainError("Automorphism::apply: |w| must be < 1");
        return apply_unchecked(w);
    }

    /// Same as apply without the |w| < 1 check; used in hot loops that sample
    /// w from the ball.
    Point apply_unchecked(const Point& w) const {
        const int n = w.dim();
        Point r(n);
        if (std::sqrt(a2_) < kZeroBaseNorm) {
            for (int k = 0; k < n; ++k) r[k] = -w[k];
            return r;
        }
        const Complex wa = inner(w, a_);
        const Complex coef = wa / a2_;
        const Complex denom = Complex{1.0} - wa;
        for (int k = 0; k < n; ++k) {
            const Complex proj = coef * a_[k];
            r[k] = (a_[k] - proj - s_ * (w[k] - proj)) / denom;
        }
        return r;
    }

    Point operator()(const Point& w) const { return apply(w); }

private:
    Point a_;
    double a2_;
    double s_ = 1.0;
};

/// Real Jacobian ((1 - |a|^2) / |1 - <w, a>|^2)^{n+1} of phi_a at w.
inline double real_jacobian(const Automorphism& phi, const Point& w) {
    if (!(w.norm2() < 1.0)) throw DomainError("real_jacobian: |w| must be < 1");
    const Point& a = phi.base();
    const double ratio = (1.0 - a.norm2()) / norm2(Complex{1.0} - inner(w, a));
    return std::pow(ratio, w.dim() + 1);
}

/// Density of the pull-back dv_alpha(phi_a(w)) = density * dv_alpha(w).
inline double pullback_density(const Automorphism& phi, const Point& w, const Params& p) {
    if (!(w.norm2() < 1.0)) throw DomainError("pullback_density: |w| must be < 1");
    const Point& a = phi.base();
    const double ratio = (1.0 - a.norm2()) / norm2(Complex{1.0} - inner(w, a));
    return std::pow(ratio, p.theta());
}

struct IdentityResiduals {
    double relation1;  // |1 - |phi_a(w)|^2 - (1-|a|^2)(1-|w|^2)/|1-<w,a>|^2|
    double relation2;  // |(1 - <w,a>)(1 - <phi_a(w),a>) - (1 - |a|^2)|
};

inline IdentityResiduals identity_checks(const Automorphism& phi, const Point& w) {
    if (!(w.norm2() < 1.0)) throw DomainError("identity_checks: |w| must be < 1");
    const Point& a = phi.base();
    const Point fw = phi.apply_unchecked(w);
    const double a2 = a.norm2();
    const Complex wa = inner(w, a);
    const double lhs1 = 1.0 - fw.norm2();
    const double rhs1 = (1.0 - a2) * (1.0 - w.norm2()) / norm2(Complex{1.0} - wa);
    // phi_0 = -Id: the second identity reads 1 * 1 = 1 exactly.
    const Complex lhs2 = (Complex{1.0} - wa) * (Complex{1.0} - inner(fw, a));
    return {std::fabs(lhs1 - rhs1), abs(lhs2 - Complex{1.0 - a2})};
}

}  // namespace bnorm
