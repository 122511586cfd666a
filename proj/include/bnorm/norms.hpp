#pragma once

// Closed forms and bounds around the Bloch-norm constants of P_alpha:
// C_{alpha,n}, the integrals J_{c,t}, sphere and ball moments, the function
// l(t) whose maximum is the invariant norm, and the bound chain.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bnorm/ballgeom.hpp"
#include "bnorm/complex.hpp"
#include "bnorm/errors.hpp"
#include "bnorm/integrate.hpp"
#include "bnorm/specfun.hpp"

namespace bnorm {

/// C_{alpha,n} = Gamma(2+n+alpha) / Gamma((2+n+alpha)/2)^2.
inline double C_const(const Params& p) { return p.C_const(); }

// J_{c,t}(z) = int_B (1 - |w|^2)^t / |1 - <z, w>|^{n+1+t+c} dv(w), v unweighted.

namespace detail {

inline void check_t(double t) {
    if (!(t > -1.0)) throw DomainError("J_ct: t must be > -1");
}

/// Gamma(1+n) Gamma(1+t) / Gamma(1+n+t).
inline double jct_prefactor(int n, double t) {
    return std::exp(log_gamma(1.0 + n) + log_gamma(1.0 + t) - log_gamma(1.0 + n + t));
}

}  // namespace detail

/// Gamma(1+n) Gamma(1+t) / Gamma(1+n+t) * F(lambda, lambda; 1+n+t; r^2), lambda = (n+1+t+c)/2.
inline double J_ct_closed(double c, double t, double r, const Params& p) {
    detail::check_t(t);
    if (!(r >= 0.0 && r < 1.0)) throw DomainError("J_ct_closed: r must lie in [0, 1)");
    const int n = p.n();
    const double lambda = 0.5 * (n + 1.0 + t + c);
    return detail::jct_prefactor(n, t) * hyp2f1(lambda, lambda, 1.0 + n + t, r * r);
}

/// Value on the sphere for c < 0: Gamma(1+n) Gamma(1+t) Gamma(-c) / Gamma((1-c+n+t)/2)^2.
inline double J_ct_boundary(double c, double t, const Params& p) {
    detail::check_t(t);
    if (!(c < 0.0)) throw DivergenceError("J_ct_boundary: unbounded on the sphere unless c < 0");
    const int n = p.n();
    return std::exp(log_gamma(1.0 + n) + log_gamma(1.0 + t) + log_gamma(-c) -
                    2.0 * log_gamma(0.5 * (1.0 - c + n + t)));
}

struct SeriesValue {
    double value = 0.0;
    /// Bound on the omitted tail; infinite when no bound is available.
    double tail_bound = 0.0;
    std::size_t terms = 0;
};

/// Truncated power series in r^2 with an a posteriori tail bound.
/// The coefficient ratio (lambda+k)^2 / ((N+k)(k+1)), N = 1+n+t, stays <= 1
/// once k (1-c) >= lambda^2 - N; from there on the tail is dominated by a
/// geometric series in r^2.
inline SeriesValue J_ct_series(double c, double t, double r, const Params& p, std::size_t terms) {
    detail::check_t(t);
    if (terms < 1) throw PreconditionError("J_ct_series: need at least one term");
    if (!(r >= 0.0 && r < 1.0)) throw DomainError("J_ct_series: r must lie in [0, 1)");
    const int n = p.n();
    const double N = 1.0 + n + t;
    const double lambda = 0.5 * (n + 1.0 + t + c);
    const double z = r * r;
    double term = 1.0;
    double sum = 1.0;
    for (std::size_t k = 0; k + 1 < terms; ++k) {
        term *= (lambda + k) * (lambda + k) / ((N + k) * (k + 1.0)) * z;
        sum += term;
    }
    const double pref = detail::jct_prefactor(n, t);
    double tail = std::numeric_limits<double>::infinity();
    const double last = static_cast<double>(terms - 1);
    if (z == 0.0) {
        tail = 0.0;
    } else if (c < 1.0 && last * (1.0 - c) >= lambda * lambda - N) {
        tail = std::fabs(term) * z / (1.0 - z);
    }
    return {pref * sum, pref * tail, terms};
}

/// Monte Carlo of the defining integral at z (uses the unweighted sampler).
inline IntegralEstimate J_ct_mc(double c, double t, const Point& z, const Params& p, const QuadratureSpec& spec) {
    detail::check_t(t);
    if (z.dim() != p.n()) throw PreconditionError("J_ct_mc: dimension does not match n");
    if (!(z.norm2() < 1.0)) throw DomainError("J_ct_mc: z must lie in the open ball");
    const Params p0(p.n(), 0.0);
    const double q = p.n() + 1.0 + t + c;
    return mc_integrate(
        [&](const Point& w) {
            return std::pow(1.0 - w.norm2(), t) * std::pow(abs(Complex{1.0} - inner(z, w)), -q);
        },
        p0, spec);
}

/// Real multi-index with entries > -1; |z^eta| = prod |z_i|^{eta_i}.
class MultiIndex {
public:
    MultiIndex(std::initializer_list<double> eta) : eta_(eta) { validate(); }
    explicit MultiIndex(std::vector<double> eta) : eta_(std::move(eta)) { validate(); }

    int dim() const { return static_cast<int>(eta_.size()); }
    double operator[](int i) const { return eta_[i]; }
    double total() const {
        double s = 0.0;
        for (double e : eta_) s += e;
        return s;
    }
    const std::vector<double>& entries() const { return eta_; }

    /// prod |z_i|^{eta_i}
    double monomial_abs(const Point& z) const {
        double v = 1.0;
        for (int i = 0; i < dim(); ++i) {
            if (eta_[i] != 0.0) v *= std::pow(abs(z[i]), eta_[i]);
        }
        return v;
    }

private:
    void validate() const {
        if (eta_.empty() || static_cast<int>(eta_.size()) > kMaxDim) {
            throw PreconditionError("MultiIndex: need between 1 and 16 entries");
        }
        for (double e : eta_) {
            if (!(e > -1.0)) throw DomainError("MultiIndex: entries must be > -1");
        }
    }

    std::vector<double> eta_;
};

/// int_S |zeta^eta| dsigma = (n-1)! prod Gamma(1 + eta_i/2) / Gamma(n + |eta|/2).
inline double sphere_moment(const MultiIndex& eta) {
    const int n = eta.dim();
    double lg = log_gamma(n) - log_gamma(n + 0.5 * eta.total());
    for (int i = 0; i < n; ++i) lg += log_gamma(1.0 + 0.5 * eta[i]);
    return std::exp(lg);
}

/// int_B |z^eta| dv_alpha = Gamma(1+alpha+n) prod Gamma(1 + eta_i/2) / Gamma(1 + alpha + n + |eta|/2).
inline double ball_moment(const MultiIndex& eta, const Params& p) {
    if (eta.dim() != p.n()) throw PreconditionError("ball_moment: multi-index length must equal n");
    const int n = p.n();
    double lg = log_gamma(1.0 + p.alpha() + n) - log_gamma(1.0 + p.alpha() + n + 0.5 * eta.total());
    for (int i = 0; i < n; ++i) lg += log_gamma(1.0 + 0.5 * eta[i]);
    return std::exp(lg);
}

// l(t) = (n+1+alpha) int |(1 - w_1) cos t + w_2 sin t| / |w_1 - 1|^{n+1+alpha} dv_alpha(w), n >= 2.

namespace detail {

inline void require_ell_dim(const Params& p) {
    if (p.n() < 2) throw PreconditionError("ell: needs n >= 2");
}

/// Sampling parameters for l: the two-dimensional marginal, or the full ball
/// when reduction is switched off.
inline Params ell_sampling_params(const Params& p, const QuadratureSpec& spec) {
    return spec.reduction ? reduce_marginal(p, 2) : p;
}

inline double ell_integrand(const Point& w, double theta, double ct, double st) {
    const Complex one_minus = Complex{1.0} - w[0];
    return theta * abs(one_minus * ct + w[1] * st) * std::pow(abs(one_minus), -theta);
}

}  // namespace detail

inline IntegralEstimate ell(double t, const Params& p, const QuadratureSpec& spec) {
    detail::require_ell_dim(p);
    if (!(t >= 0.0 && t <= 0.5 * std::numbers::pi)) throw DomainError("ell: t must lie in [0, pi/2]");
    const double theta = p.theta();
    const double ct = t == 0.5 * std::numbers::pi ? 0.0 : std::cos(t);
    const double st = std::sin(t);
    return stratified_singular([&](const Point& w) { return detail::ell_integrand(w, theta, ct, st); },
                               detail::ell_sampling_params(p, spec), theta, spec);
}

struct EllEndpoints {
    double ell0 = 0.0;
    double ell_half_pi = 0.0;
    /// l(pi/2) recomputed from the power series of |1 - w_1|^{-theta}.
    double ell_half_pi_series = 0.0;
};

/// k-th coefficient of the l(pi/2) series relative to its k = 0 term:
/// C(-theta/2, k)^2 * ball_moment((2k, 1, 0, ...)) / ball_moment((0, 1, 0, ...)).
inline double ell_series_ratio(const Params& p, unsigned k) {
    const int n = p.n();
    std::vector<double> eta(n, 0.0);
    eta[1] = 1.0;
    const double m0 = ball_moment(MultiIndex(eta), p);
    eta[0] = 2.0 * k;
    const double mk = ball_moment(MultiIndex(eta), p);
    const double b = real_binomial(-0.5 * p.theta(), k);
    return b * b * mk / m0;
}

/// (C, (pi/2) C), with l(pi/2) also summed in closed form through Gauss's
/// theorem: theta * ball_moment((0,1,0..)) * F(theta/2, theta/2; alpha+n+3/2; 1).
/// Throws IntegrationFailure if the two routes differ by more than 1e-8 relative.
inline EllEndpoints ell_endpoints(const Params& p) {
    detail::require_ell_dim(p);
    const double C = C_const(p);
    const double theta = p.theta();
    const double c = p.alpha() + p.n() + 1.5;
    // The series coefficients must be those of F(theta/2, theta/2; c; .).
    double hyp_term = 1.0;
    for (unsigned k = 1; k <= 8; ++k) {
        hyp_term *= (0.5 * theta + k - 1) * (0.5 * theta + k - 1) / ((c + k - 1) * k);
        const double ratio = ell_series_ratio(p, k);
        if (std::fabs(ratio - hyp_term) > 1e-10 * hyp_term) {
            throw IntegrationFailure("ell_endpoints: series coefficients disagree with the hypergeometric form");
        }
    }
    std::vector<double> eta(p.n(), 0.0);
    eta[1] = 1.0;
    const double series =
        theta * ball_moment(MultiIndex(eta), p) * hyp2f1_at_1(0.5 * theta, 0.5 * theta, c);
    const EllEndpoints e{C, 0.5 * std::numbers::pi * C, series};
    if (std::fabs(e.ell_half_pi - series) > 1e-8 * e.ell_half_pi) {
        throw IntegrationFailure("ell_endpoints: closed form and series route disagree beyond 1e-8");
    }
    return e;
}

/// Bounds proven for l: rotating w_2 by a phase shows
/// l(t) >= max(cos t l(0), sin t l(pi/2)); the triangle inequality gives
/// l(t) <= cos t l(0) + sin t l(pi/2).
inline double ell_lower_bound(double t, const EllEndpoints& e) {
    return std::max(std::cos(t) * e.ell0, std::sin(t) * e.ell_half_pi);
}
inline double ell_upper_bound(double t, const EllEndpoints& e) {
    return std::cos(t) * e.ell0 + std::sin(t) * e.ell_half_pi;
}

struct ScanRow {
    double t = 0.0;
    IntegralEstimate estimate;
    /// l(pi/2) - l(t) on the same samples.
    IntegralEstimate gap_to_half_pi;
    double lower_bound = 0.0;
    double upper_bound = 0.0;
};

struct ScanResult {
    std::vector<ScanRow> rows;
    EllEndpoints endpoints;
    std::size_t argmax = 0;
    double argmax_t = 0.0;
    double max_value = 0.0;
    double max_std_error = 0.0;
    /// sqrt(pi^2 + 4) / 2 * C.
    double esti2_bound = 0.0;
    /// Candidate value (pi/2) C for the invariant norm.
    double conjectured_value = 0.0;
    /// l(pi/2) >= l(t) - 2 sigma(l(pi/2) - l(t)) on the whole grid.
    bool conjecture_holds = false;
    bool endpoints_match = false;       // both endpoint rows within 3 sigma of the closed forms
    bool pointwise_upper_ok = false;    // every row <= upper_bound + 3 sigma
    bool pointwise_lower_ok = false;    // every row >= lower_bound - 3 sigma
    bool max_below_esti2 = false;       // max <= sqrt(pi^2+4)/2 C + 3 sigma
    bool max_above_half_pi_c = false;   // max >= (pi/2) C - 2 sigma
};

/// l at the given points of [0, pi/2], all on the same samples, together
/// with the differences l(pi/2) - l(t).
inline ScanResult ell_scan_points(const Params& p, const std::vector<double>& ts, const QuadratureSpec& spec) {
    detail::require_ell_dim(p);
    if (ts.empty()) throw PreconditionError("ell_scan: need at least one t");
    const double hp = 0.5 * std::numbers::pi;
    for (double t : ts) {
        if (!(t >= 0.0 && t <= hp)) throw DomainError("ell_scan: t must lie in [0, pi/2]");
    }
    const std::size_t G = ts.size();
    const double theta = p.theta();
    std::vector<double> ct(G), st(G);
    for (std::size_t i = 0; i < G; ++i) {
        ct[i] = ts[i] == hp ? 0.0 : std::cos(ts[i]);
        st[i] = std::sin(ts[i]);
    }
    auto f = [&](const Point& w, std::span<double> out) {
        const Complex one_minus = Complex{1.0} - w[0];
        const double s = theta * std::pow(abs(one_minus), -theta);
        const double top = s * abs(w[1]);
        for (std::size_t i = 0; i < G; ++i) {
            out[i] = s * abs(one_minus * ct[i] + w[1] * st[i]);
            out[G + i] = top - out[i];
        }
    };
    const auto est = singular_or_plain_components(2 * G, f, detail::ell_sampling_params(p, spec), theta, spec, true);

    ScanResult res;
    res.endpoints = ell_endpoints(p);
    res.esti2_bound = 0.5 * std::sqrt(std::numbers::pi * std::numbers::pi + 4.0) * C_const(p);
    res.conjectured_value = res.endpoints.ell_half_pi;
    res.conjecture_holds = true;
    res.pointwise_upper_ok = true;
    res.pointwise_lower_ok = true;
    for (std::size_t i = 0; i < G; ++i) {
        ScanRow row;
        row.t = ts[i];
        row.estimate = est[i];
        row.gap_to_half_pi = est[G + i];
        row.lower_bound = ell_lower_bound(ts[i], res.endpoints);
        row.upper_bound = ell_upper_bound(ts[i], res.endpoints);
        if (row.gap_to_half_pi.value < -2.0 * row.gap_to_half_pi.std_error) res.conjecture_holds = false;
        if (row.estimate.value > row.upper_bound + 3.0 * row.estimate.std_error) res.pointwise_upper_ok = false;
        if (row.estimate.value < row.lower_bound - 3.0 * row.estimate.std_error) res.pointwise_lower_ok = false;
        if (i == 0 || row.estimate.value > res.max_value) {
            res.argmax = i;
            res.max_value = row.estimate.value;
            res.max_std_error = row.estimate.std_error;
            res.argmax_t = row.t;
        }
        res.rows.push_back(row);
    }
    res.endpoints_match = true;
    for (const auto& row : res.rows) {
        if (row.t == 0.0 && sigma_distance(row.estimate.value, res.endpoints.ell0, row.estimate.std_error) > 3.0) {
            res.endpoints_match = false;
        }
        if (row.t == hp &&
            sigma_distance(row.estimate.value, res.endpoints.ell_half_pi, row.estimate.std_error) > 3.0) {
            res.endpoints_match = false;
        }
    }
    res.max_below_esti2 = res.max_value <= res.esti2_bound + 3.0 * res.max_std_error;
    res.max_above_half_pi_c = res.max_value >= res.conjectured_value - 2.0 * res.max_std_error;
    return res;
}

/// Uniform grid t_i = (pi/2) i / (grid_points - 1); both endpoints included.
inline std::vector<double> uniform_quarter_grid(int grid_points) {
    if (grid_points < 2) throw PreconditionError("grid needs at least two points");
    std::vector<double> ts(grid_points);
    for (int i = 0; i < grid_points; ++i) {
        ts[i] = i + 1 == grid_points ? 0.5 * std::numbers::pi : 0.5 * std::numbers::pi * i / (grid_points - 1.0);
    }
    return ts;
}

/// l on a uniform grid over [0, pi/2] with common random numbers.
inline ScanResult ell_scan(const Params& p, int grid_points, const QuadratureSpec& spec) {
    detail::require_ell_dim(p);
    if (grid_points < 9) throw PreconditionError("ell_scan: grid_points must be >= 9");
    return ell_scan_points(p, uniform_quarter_grid(grid_points), spec);
}

struct NormBounds {
    double bloch_lower = 0.0;      // C
    double bloch_upper = 0.0;      // 1 + C
    double invariant_lower = 0.0;  // (pi/2) C
    double invariant_upper = 0.0;  // 1 + sqrt(pi^2+4)/2 C
};

inline NormBounds norm_bounds(const Params& p) {
    const double C = C_const(p);
    const double pi = std::numbers::pi;
    return {C, 1.0 + C, 0.5 * pi * C, 1.0 + 0.5 * std::sqrt(pi * pi + 4.0) * C};
}

}  // namespace bnorm
