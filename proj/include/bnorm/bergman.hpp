#pragma once

// Weighted Bergman kernel, the projection P_alpha by Monte Carlo, gradients,
// the comparison functions F_zeta, the extremal symbols g_k and Phi(zeta).

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bnorm/ballgeom.hpp"
#include "bnorm/complex.hpp"
#include "bnorm/errors.hpp"
#include "bnorm/integrate.hpp"

namespace bnorm {

/// A bounded measurable function on the ball.
struct Symbol {
    std::function<Complex(const Point&)> eval;
    /// Set when |g| <= 1 everywhere.
    bool bounded = false;
    std::string name;

    Complex operator()(const Point& w) const { return eval(w); }
};

inline Symbol constant_symbol(Complex c) {
    return {[c](const Point&) { return c; }, abs(c) <= 1.0, "constant"};
}

/// Complex gradient (d/dz_1, ..., d/dz_n) and its Euclidean length.
struct GradientValue {
    Point grad;
    double modulus = 0.0;
};

inline GradientValue make_gradient(const Point& g) { return {g, g.norm()}; }

/// Componentwise Monte Carlo estimate of a vector in C^n.
struct VectorEstimate {
    std::vector<ComplexEstimate> comps;

    int dim() const { return static_cast<int>(comps.size()); }
    Point value() const {
        Point r(dim());
        for (int k = 0; k < dim(); ++k) r[k] = comps[k].value();
        return r;
    }
    GradientValue gradient() const { return make_gradient(value()); }
    /// Largest standard error over all real components.
    double max_std_error() const {
        double s = 0.0;
        for (const auto& c : comps) s = std::max(s, c.std_error());
        return s;
    }
};

namespace detail {

inline void require_ball(const Point& z, const char* what) {
    if (!(z.norm2() < 1.0)) throw DomainError(std::string(what) + ": point must lie in the open ball");
}

inline void require_sphere(const Point& z, const char* what) {
    if (!(std::fabs(z.norm() - 1.0) <= 1e-12)) throw DomainError(std::string(what) + ": point must be a unit vector");
}

inline void require_dim(const Point& z, const Params& p, const char* what) {
    if (z.dim() != p.n()) throw PreconditionError(std::string(what) + ": dimension does not match n");
}

/// Number of leading coordinates needed to hold every nonzero entry.
inline int support_dim(std::initializer_list<const Point*> pts) {
    int k = 1;
    for (const Point* z : pts) {
        for (int j = z->dim() - 1; j >= 0; --j) {
            if (!(z->operator[](j) == Complex{})) {
                k = std::max(k, j + 1);
                break;
            }
        }
    }
    return k;
}

inline Point truncate(const Point& z, int k) {
    Point r(k);
    for (int j = 0; j < k; ++j) r[j] = z[j];
    return r;
}

inline ComplexEstimate pair(const std::vector<IntegralEstimate>& e, std::size_t k) { return {e[2 * k], e[2 * k + 1]}; }

/// Stratify along z / |z| once |z| exceeds this.
inline constexpr double kStratifyAbove = 0.9;

}  // namespace detail

/// K_alpha(z, w) = (1 - <z, w>)^{-(n+1+alpha)}, principal branch.
inline Complex kernel(const Point& z, const Point& w, const Params& p) {
    detail::require_ball(z, "kernel");
    detail::require_ball(w, "kernel");
    return pow(Complex{1.0} - inner(z, w), -p.theta());
}

/// grad_z K_alpha(z, w) = (1+n+alpha) conj(w) (1 - <z, w>)^{-(n+2+alpha)}.
inline GradientValue kernel_gradient(const Point& z, const Point& w, const Params& p) {
    detail::require_ball(z, "kernel_gradient");
    detail::require_ball(w, "kernel_gradient");
    const Complex f = p.theta() * pow(Complex{1.0} - inner(z, w), -(p.theta() + 1.0));
    Point g = conj(w);
    g *= f;
    return make_gradient(g);
}

/// P_alpha g(z) = int K_alpha(z, w) g(w) dv_alpha(w).
inline ComplexEstimate project(const Symbol& g, const Point& z, const Params& p, const QuadratureSpec& spec) {
    detail::require_dim(z, p, "project");
    detail::require_ball(z, "project");
    const double theta = p.theta();
    auto f = [&](const Point& w, std::span<double> out) {
        const Complex v = pow(Complex{1.0} - inner(z, w), -theta) * g(w);
        out[0] = v.re;
        out[1] = v.im;
    };
    const double r = z.norm();
    Point dir = z;
    if (r > 0.0) dir *= Complex{1.0 / r};
    const auto e = singular_or_plain_components(2, f, p, theta, spec, r > detail::kStratifyAbove, &dir);
    return detail::pair(e, 0);
}

/// grad (P_alpha g)(z) = int grad_z K_alpha(z, w) g(w) dv_alpha(w).
inline VectorEstimate projection_gradient(const Symbol& g, const Point& z, const Params& p,
                                          const QuadratureSpec& spec) {
    detail::require_dim(z, p, "projection_gradient");
    detail::require_ball(z, "projection_gradient");
    const int n = p.n();
    const double theta = p.theta();
    auto f = [&](const Point& w, std::span<double> out) {
        const Complex s = theta * pow(Complex{1.0} - inner(z, w), -(theta + 1.0)) * g(w);
        for (int k = 0; k < n; ++k) {
            const Complex v = s * conj(w[k]);
            out[2 * k] = v.re;
            out[2 * k + 1] = v.im;
        }
    };
    const double r = z.norm();
    Point dir = z;
    if (r > 0.0) dir *= Complex{1.0 / r};
    const auto e = singular_or_plain_components(2 * n, f, p, theta + 1.0, spec, r > detail::kStratifyAbove, &dir);
    VectorEstimate out;
    for (int k = 0; k < n; ++k) out.comps.push_back(detail::pair(e, k));
    return out;
}

namespace detail {

// Shared driver for integrands of (<z, w>, <w, conj zeta>): reduces to the
// leading coordinates spanned by z and zeta and stratifies along z / |z|.
template <class Body>
IntegralEstimate zeta_integral(const Point& z, const Point& zeta, const Params& p, double q,
                               const QuadratureSpec& spec, Body&& body) {
    const int n = p.n();
    const int k = spec.reduction ? support_dim({&z, &zeta}) : n;
    const Params pk = k < n ? reduce_marginal(p, k) : p;
    const Point zk = truncate(z, k);
    const Point zetak = truncate(zeta, k);
    const Point czeta = conj(zetak);
    auto f = [&](const Point& w, std::span<double> out) { out[0] = body(w, zk, czeta); };
    const double r = zk.norm();
    Point dir = zk;
    if (r > 0.0) dir *= Complex{1.0 / r};
    auto e = singular_or_plain_components(1, f, pk, q, spec, r > kStratifyAbove, &dir);
    if (k < n && e[0].method == Method::mc) e[0].method = Method::mc_reduced;
    return e[0];
}

}  // namespace detail

/// F_zeta(z) = (1+n+alpha)(1-|z|^2) int |<w, conj zeta>| / |1 - <z, w>|^{n+2+alpha} dv_alpha(w).
inline IntegralEstimate F_zeta(const Point& z, const Point& zeta, const Params& p, const QuadratureSpec& spec) {
    detail::require_dim(z, p, "F_zeta");
    detail::require_dim(zeta, p, "F_zeta");
    detail::require_ball(z, "F_zeta");
    detail::require_sphere(zeta, "F_zeta");
    const double theta = p.theta();
    const double pref = theta * (1.0 - z.norm2());
    const double q = theta + 1.0;
    return detail::zeta_integral(z, zeta, p, q, spec, [&](const Point& w, const Point& zk, const Point& czeta) {
        return pref * abs(inner(w, czeta)) * std::pow(abs(Complex{1.0} - inner(zk, w)), -q);
    });
}

/// The same quantity after the substitution w = phi_z(omega):
/// (1+n+alpha) int |<phi_z(omega), conj zeta>| / |1 - <z, omega>|^{n+alpha} dv_alpha(omega).
inline IntegralEstimate F_zeta_transformed(const Point& z, const Point& zeta, const Params& p,
                                           const QuadratureSpec& spec) {
    detail::require_dim(z, p, "F_zeta_transformed");
    detail::require_dim(zeta, p, "F_zeta_transformed");
    detail::require_ball(z, "F_zeta_transformed");
    detail::require_sphere(zeta, "F_zeta_transformed");
    const double theta = p.theta();
    const double q = theta - 1.0;
    // phi_z mixes all coordinates, so no marginal reduction here.
    const Automorphism phi(z);
    const Point czeta = conj(zeta);
    auto f = [&](const Point& w, std::span<double> out) {
        const Point fw = phi.apply_unchecked(w);
        out[0] = theta * abs(inner(fw, czeta)) * std::pow(abs(Complex{1.0} - inner(z, w)), -q);
    };
    const double r = z.norm();
    Point dir = z;
    if (r > 0.0) dir *= Complex{1.0 / r};
    return singular_or_plain_components(1, f, p, q, spec, r > detail::kStratifyAbove, &dir)[0];
}

/// Invariant gradient of f = P_alpha g at a, i.e. grad (f o phi_a)(0):
/// theta int (conj(w) - conj(a)) (1 - <a, w>)^theta g(phi_a(w)) / |1 - <w, a>|^{2 theta} dv_alpha(w).
inline VectorEstimate invariant_gradient(const Symbol& g, const Point& a, const Params& p,
                                         const QuadratureSpec& spec) {
    detail::require_dim(a, p, "invariant_gradient");
    detail::require_ball(a, "invariant_gradient");
    const int n = p.n();
    const double theta = p.theta();
    const Automorphism phi(a);
    auto f = [&](const Point& w, std::span<double> out) {
        const Complex x = Complex{1.0} - inner(a, w);
        const Complex s = theta * pow(x, theta) * std::pow(norm2(x), -theta) * g(phi.apply_unchecked(w));
        for (int k = 0; k < n; ++k) {
            const Complex v = s * conj(w[k] - a[k]);
            out[2 * k] = v.re;
            out[2 * k + 1] = v.im;
        }
    };
    const double r = a.norm();
    Point dir = a;
    if (r > 0.0) dir *= Complex{1.0 / r};
    const auto e = singular_or_plain_components(2 * n, f, p, theta, spec, r > detail::kStratifyAbove, &dir);
    VectorEstimate out;
    for (int k = 0; k < n; ++k) out.comps.push_back(detail::pair(e, k));
    return out;
}

/// z_k = (k / (k+1)) e_1.
inline Point extremal_point(int k, const Params& p) {
    if (k < 1) throw PreconditionError("extremal sequence index must be >= 1");
    Point z(p.n());
    z[0] = static_cast<double>(k) / (k + 1.0);
    return z;
}

/// g_k(w) = (w_1/|w_1|) |1 - <z_k, w>|^{n+2+alpha} / (1 - <w, z_k>)^{n+2+alpha}; g_k = 0 on {w_1 = 0}.
inline Symbol extremal_symbol(int k, const Params& p) {
    const Point z = extremal_point(k, p);
    const double q = p.theta() + 1.0;
    auto eval = [z, q](const Point& w) -> Complex {
        const double m = abs(w[0]);
        if (m == 0.0) return Complex{};
        const Complex x = Complex{1.0} - inner(w, z);
        // |x|^q / x^q = exp(-i q arg x)
        return (w[0] / m) * polar(1.0, -q * arg(x));
    };
    return {eval, true, "g_" + std::to_string(k)};
}

/// G_k = (1+n+alpha) int (1 - |z_k|^2) |w_1| / |1 - <z_k, w>|^{n+2+alpha} dv_alpha(w) = F_{e_1}(z_k).
inline IntegralEstimate G_k(int k, const Params& p, const QuadratureSpec& spec) {
    return F_zeta(extremal_point(k, p), Point::basis(p.n(), 0), p, spec);
}

/// Phi(zeta) = int (conj(w) - conj(zeta)) (1 - <zeta, w>)^theta / |1 - <w, zeta>|^{2 theta} dv_alpha(w).
inline VectorEstimate phi_boundary(const Point& zeta, const Params& p, const QuadratureSpec& spec) {
    detail::require_dim(zeta, p, "phi_boundary");
    detail::require_sphere(zeta, "phi_boundary");
    const int n = p.n();
    const double theta = p.theta();
    auto f = [&](const Point& w, std::span<double> out) {
        const Complex x = Complex{1.0} - inner(zeta, w);
        const Complex s = pow(x, theta) * std::pow(norm2(x), -theta);
        for (int k = 0; k < n; ++k) {
            const Complex v = s * conj(w[k] - zeta[k]);
            out[2 * k] = v.re;
            out[2 * k + 1] = v.im;
        }
    };
    const auto e = singular_or_plain_components(2 * n, f, p, theta, spec, true, &zeta);
    VectorEstimate out;
    for (int k = 0; k < n; ++k) out.comps.push_back(detail::pair(e, k));
    return out;
}

}  // namespace bnorm
