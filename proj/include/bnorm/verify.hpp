#pragma once

// Verification suites: each check compares an estimate or closed form
// against its counterpart and records the verdict.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "bnorm/ballgeom.hpp"
#include "bnorm/bergman.hpp"
#include "bnorm/errors.hpp"
#include "bnorm/integrate.hpp"
#include "bnorm/norms.hpp"
#include "bnorm/rng.hpp"

namespace bnorm {

struct CheckLine {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    /// Standard error of lhs - rhs; zero for deterministic checks.
    double sigma = 0.0;
    double sigma_distance = 0.0;
    /// Human-readable acceptance rule.
    std::string rule;
    bool pass = false;
};

/// |lhs - rhs| <= k sigma.
inline CheckLine check_sigma(std::string name, double lhs, double rhs, double sigma, double k = 3.0) {
    const double d = sigma_distance(lhs, rhs, sigma);
    return {std::move(name), lhs, rhs, sigma, d, "|lhs-rhs| <= " + std::to_string(static_cast<int>(k)) + " sigma",
            d <= k};
}

/// lhs <= rhs + k sigma.
inline CheckLine check_upper(std::string name, double lhs, double rhs, double sigma, double k = 3.0) {
    return {std::move(name), lhs, rhs, sigma, sigma_distance(lhs, rhs, sigma),
            "lhs <= rhs + " + std::to_string(static_cast<int>(k)) + " sigma", lhs <= rhs + k * sigma};
}

/// |lhs - rhs| <= tol |rhs| + k sigma.
inline CheckLine check_relative(std::string name, double lhs, double rhs, double sigma, double tol, double k) {
    const bool ok = std::fabs(lhs - rhs) <= tol * std::fabs(rhs) + k * sigma;
    std::string rule = "|lhs-rhs| <= " + std::to_string(tol) + " |rhs|";
    if (k > 0.0) rule += " + " + std::to_string(static_cast<int>(k)) + " sigma";
    return {std::move(name), lhs, rhs, sigma, sigma_distance(lhs, rhs, sigma), rule, ok};
}

/// |lhs - rhs| <= tol.
inline CheckLine check_absolute(std::string name, double lhs, double rhs, double tol) {
    const double d = std::fabs(lhs - rhs);
    return {std::move(name), lhs, rhs, 0.0, sigma_distance(lhs, rhs, 0.0), "|lhs-rhs| <= " + std::to_string(tol),
            d <= tol};
}

inline bool all_pass(const std::vector<CheckLine>& lines) {
    return std::all_of(lines.begin(), lines.end(), [](const CheckLine& c) { return c.pass; });
}

/// Acceptance thresholds. The boundary limits r -> 1 and k -> infinity are
/// checked at finite surrogates (r = 0.99, k = 200) against a relative band.
struct Tolerances {
    double sigma = 3.0;
    double limit_sigma = 5.0;
    double limit_relative = 0.05;
};

// ---------------------------------------------------------------------------

inline std::vector<CheckLine> verify_identities(const Params& p, const QuadratureSpec& spec, int pairs = 1000) {
    const int n = p.n();
    const Params uniform(n, 0.0);
    CounterRng rng(derive_seed(spec.seed, 0x1D), 0);
    double rel1 = 0.0, rel2 = 0.0, invol = 0.0, pull = 0.0, fixed0 = 0.0, fixeda = 0.0;
    for (int i = 0; i < pairs; ++i) {
        const Point a = sample_ball_valpha(uniform, rng);
        const Point w = sample_ball_valpha(uniform, rng);
        const Automorphism phi(a);
        const auto r = identity_checks(phi, w);
        rel1 = std::max(rel1, r.relation1);
        rel2 = std::max(rel2, r.relation2);
        invol = std::max(invol, (phi.apply(phi.apply(w)) - w).norm());
        fixed0 = std::max(fixed0, (phi.apply(Point(n)) - a).norm());
        fixeda = std::max(fixeda, phi.apply(a).norm());
        const Point fw = phi.apply(w);
        const double via_relation1 =
            std::pow(1.0 - fw.norm2(), p.alpha()) * real_jacobian(phi, w) / std::pow(1.0 - w.norm2(), p.alpha());
        const double direct = pullback_density(phi, w, p);
        pull = std::max(pull, std::fabs(direct - via_relation1) / direct);
    }
    return {check_absolute("relation1 max residual", rel1, 0.0, 1e-10),
            check_absolute("relation2 max residual", rel2, 0.0, 1e-10),
            check_absolute("involution max error", invol, 0.0, 1e-10),
            check_absolute("phi_a(0) = a max error", fixed0, 0.0, 1e-12),
            check_absolute("phi_a(a) = 0 max error", fixeda, 0.0, 1e-10),
            check_absolute("pullback density vs relation1 (relative)", pull, 0.0, 1e-9)};
}

inline std::vector<CheckLine> verify_jct(const Params& p, const QuadratureSpec& spec, const Tolerances& tol = {}) {
    std::vector<CheckLine> out;
    const double c = -1.0;
    for (double t : {0.0, 1.0}) {
        for (double r : {0.0, 0.5, 0.9}) {
            const std::string tag = "c=-1 t=" + std::to_string(static_cast<int>(t)) + " r=" + std::to_string(r).substr(0, 3);
            const double closed = J_ct_closed(c, t, r, p);
            const auto series = J_ct_series(c, t, r, p, 4000);
            auto line = check_relative("J series vs closed " + tag, series.value, closed, 0.0, 1e-8, 0.0);
            line.pass = line.pass && series.tail_bound <= 1e-8 * closed;
            line.rule += " and tail bound <= 1e-8 |rhs|";
            out.push_back(line);
            Point z(p.n());
            z[0] = r;
            const auto mc = J_ct_mc(c, t, z, p, spec);
            out.push_back(check_sigma("J mc vs closed " + tag, mc.value, closed, mc.std_error, tol.sigma));
        }
    }
    const double lhs = p.theta() * p.c_alpha() * J_ct_boundary(-1.0, p.alpha(), p);
    out.push_back(check_relative("(1+n+alpha) c_alpha J(-1, alpha) on the sphere vs C", lhs, C_const(p), 0.0, 1e-10, 0.0));
    return out;
}

inline std::vector<MultiIndex> moment_indices(int n) {
    const std::vector<std::vector<double>> base{{1, 0}, {2, 1}, {3, 0}, {0.5, 0.5}};
    std::vector<MultiIndex> out;
    for (const auto& b : base) {
        std::vector<double> e(n, 0.0);
        for (int i = 0; i < std::min(n, 2); ++i) e[i] = b[i];
        if (n == 1 && b[1] != 0.0 && b[0] != b[1]) continue;  // collapses onto another entry
        out.emplace_back(e);
    }
    return out;
}

inline std::string describe(const MultiIndex& eta) {
    std::string s = "(";
    for (int i = 0; i < eta.dim(); ++i) {
        std::string v = std::to_string(eta[i]);
        v.erase(v.find_last_not_of('0') + 1);
        if (!v.empty() && v.back() == '.') v.pop_back();
        s += (i ? "," : "") + v;
    }
    return s + ")";
}

/// Test integrands of the leading two coordinates for the marginal rule.
inline double marginal_probe(int k, const Point& w) {
    const Complex w1 = w[0];
    const Complex w2 = w.dim() > 1 ? w[1] : Complex{};
    switch (k) {
        case 0: return norm2(w1);
        case 1: return abs(w1) * abs(w2);
        case 2: return std::pow(abs(Complex{1.0} - w1), -0.75);
        case 3: return (w1 * conj(w2)).re + norm2(w2) * norm2(w2);
        default: return std::cos(3.0 * w1.re) * std::exp(w2.im);
    }
}

inline std::vector<CheckLine> verify_moments(const Params& p, const QuadratureSpec& spec, const Tolerances& tol = {}) {
    std::vector<CheckLine> out;
    const int n = p.n();
    const auto etas = moment_indices(n);
    const std::size_t m = etas.size();
    auto sphere = mc_components(
        m, [n](CounterRng& rng) { return sample_sphere(n, rng); },
        [&](const Point& z, std::span<double> v) {
            for (std::size_t i = 0; i < m; ++i) v[i] = etas[i].monomial_abs(z);
        },
        spec.with_seed(derive_seed(spec.seed, 0x51)));
    auto ball = mc_components(
        m, [&](CounterRng& rng) { return sample_ball_valpha(p, rng); },
        [&](const Point& z, std::span<double> v) {
            for (std::size_t i = 0; i < m; ++i) v[i] = etas[i].monomial_abs(z);
        },
        spec.with_seed(derive_seed(spec.seed, 0xB1)));
    for (std::size_t i = 0; i < m; ++i) {
        out.push_back(check_sigma("sphere moment eta=" + describe(etas[i]), sphere[i].value, sphere_moment(etas[i]),
                                  sphere[i].std_error, tol.sigma));
        out.push_back(check_sigma("ball moment eta=" + describe(etas[i]), ball[i].value, ball_moment(etas[i], p),
                                  ball[i].std_error, tol.sigma));
    }
    if (n >= 2) {
        const int k = n >= 3 ? 2 : 1;
        const Params q = reduce_marginal(p, k);
        auto probes = [&](const Point& w, std::span<double> v) {
            for (int i = 0; i < 5; ++i) v[i] = marginal_probe(i, w);
        };
        // With k = 1 only probes of w_1 are meaningful.
        const auto full = mc_components(
            5, [&](CounterRng& rng) {
                Point w = sample_ball_valpha(p, rng);
                if (k == 1) w[1] = Complex{};
                return w;
            },
            probes, spec.with_seed(derive_seed(spec.seed, 0x3A)));
        const auto reduced = mc_components(
            5, [&](CounterRng& rng) {
                const Point u = sample_ball_valpha(q, rng);
                Point w(n);
                for (int j = 0; j < k; ++j) w[j] = u[j];
                return w;
            },
            probes, spec.with_seed(derive_seed(spec.seed, 0x3B)), Method::mc_reduced);
        for (int i = 0; i < 5; ++i) {
            out.push_back(check_sigma("marginal rule k=" + std::to_string(k) + " probe " + std::to_string(i),
                                      reduced[i].value, full[i].value,
                                      combined_sigma(reduced[i].std_error, full[i].std_error), tol.sigma));
        }
    }
    return out;
}

inline constexpr double kFzetaRadii[] = {0.0, 0.3, 0.6, 0.9, 0.99};

inline std::vector<CheckLine> verify_fzeta(const Params& p, const QuadratureSpec& spec, const Tolerances& tol = {}) {
    std::vector<CheckLine> out;
    const double C = C_const(p);
    const Point e1 = Point::basis(p.n(), 0);
    for (double r : kFzetaRadii) {
        Point z(p.n());
        z[0] = r;
        const auto F = F_zeta(z, e1, p, spec);
        const std::string tag = "F_e1(" + std::to_string(r).substr(0, 4) + " e1)";
        out.push_back(check_upper(tag + " <= C", F.value, C, F.std_error, tol.sigma));
        if (r == 0.99) {
            out.push_back(check_relative(tag + " near C", F.value, C, F.std_error, tol.limit_relative, tol.limit_sigma));
        }
    }
    return out;
}

inline constexpr int kExtremalIndices[] = {1, 2, 5, 10, 50, 200};

inline std::vector<CheckLine> verify_extremal(const Params& p, const QuadratureSpec& spec, const Tolerances& tol = {}) {
    std::vector<CheckLine> out;
    const double C = C_const(p);
    // |g_k| = 1 and the G_k integrand is real and nonnegative.
    CounterRng rng(derive_seed(spec.seed, 0xE7), 0);
    double unimod = 0.0, imag = 0.0, negative = 0.0;
    for (int k : kExtremalIndices) {
        const Symbol g = extremal_symbol(k, p);
        const Point zk = extremal_point(k, p);
        for (int i = 0; i < 200; ++i) {
            const Point w = sample_ball_valpha(p, rng);
            const Complex gv = g(w);
            unimod = std::max(unimod, std::fabs(abs(gv) - 1.0));
            const Complex v = kernel_gradient(zk, w, p).grad[0] * gv;
            const double scale = abs(v);
            if (scale > 0.0) {
                imag = std::max(imag, std::fabs(v.im) / scale);
                negative = std::max(negative, -v.re / scale);
            }
        }
    }
    out.push_back(check_absolute("|g_k| - 1 max", unimod, 0.0, 1e-12));
    out.push_back(check_absolute("G_k integrand imaginary part (relative) max", imag, 0.0, 1e-9));
    out.push_back(check_upper("G_k integrand negative part (relative) max", negative, 0.0, 0.0));
    for (int k : kExtremalIndices) {
        const auto G = G_k(k, p, spec);
        out.push_back(check_upper("G_" + std::to_string(k) + " <= C", G.value, C, G.std_error, tol.sigma));
        if (k == 200) {
            out.push_back(check_relative("G_200 near C", G.value, C, G.std_error, tol.limit_relative, tol.limit_sigma));
        }
    }
    return out;
}

inline std::vector<CheckLine> verify_phi(const Params& p, const QuadratureSpec& spec, const Tolerances& tol = {}) {
    std::vector<CheckLine> out;
    for (int j = 0; j < std::min(p.n(), 2); ++j) {
        const auto v = phi_boundary(Point::basis(p.n(), j), p, spec);
        for (int k = 0; k < v.dim(); ++k) {
            const std::string tag = "Phi(e" + std::to_string(j + 1) + ")_" + std::to_string(k + 1);
            out.push_back(check_sigma(tag + " re", v.comps[k].re.value, 0.0, v.comps[k].re.std_error, tol.sigma));
            out.push_back(check_sigma(tag + " im", v.comps[k].im.value, 0.0, v.comps[k].im.std_error, tol.sigma));
        }
    }
    return out;
}

inline const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"identities", "jct", "moments", "fzeta", "extremal", "phi"};
    return names;
}

inline std::vector<CheckLine> run_suite(const std::string& suite, const Params& p, const QuadratureSpec& spec,
                                        const Tolerances& tol = {}) {
    if (suite == "identities") return verify_identities(p, spec);
    if (suite == "jct") return verify_jct(p, spec, tol);
    if (suite == "moments") return verify_moments(p, spec, tol);
    if (suite == "fzeta") return verify_fzeta(p, spec, tol);
    if (suite == "extremal") return verify_extremal(p, spec, tol);
    if (suite == "phi") return verify_phi(p, spec, tol);
    throw PreconditionError("unknown suite '" + suite + "'");
}

}  // namespace bnorm
