#pragma once

// Stationarity of I(t) = l(t) / 3 at (n, alpha) = (2, 0).
//
// With a_1 = w_2 / (1 - w_1), a_2 = w_1 = p e^{is} and a_1 = R e^{i sigma},
// I(t) = int |cos t + a_1 sin t| dv(a) over |a_1|^2 <= R0(p, s). The sigma
// integral is the circumference h(t; R) of the ellipse with semi-axes
// cos t + R sin t and |cos t - R sin t|. Note that R0 bounds R^2, not R.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "bnorm/errors.hpp"
#include "bnorm/integrate.hpp"
#include "bnorm/rng.hpp"
#include "bnorm/specfun.hpp"

namespace bnorm {

struct EllipseAxes {
    double a_axis = 0.0;
    double b_axis = 0.0;
    /// Elliptic parameter eps^2 = 1 - b^2/a^2 = 2 R sin(2t) / a^2, clamped to [0, 1].
    double m = 0.0;

    EllipseAxes(double R, double t) {
        if (!(R >= 0.0)) throw DomainError("EllipseAxes: R must be >= 0");
        const double c = std::cos(t);
        const double s = std::sin(t);
        a_axis = c + R * s;
        b_axis = std::fabs(c - R * s);
        m = a_axis > 0.0 ? std::clamp(2.0 * R * std::sin(2.0 * t) / (a_axis * a_axis), 0.0, 1.0) : 0.0;
    }
};

namespace detail {

inline void require_quarter(double t, const char* what) {
    if (!(t >= 0.0 && t <= 0.5 * std::numbers::pi)) throw DomainError(std::string(what) + ": t must lie in [0, pi/2]");
}

/// R0 written in eps = 1 - p: eps (2 - eps) / (eps^2 + 4 p sin^2(s/2)).
inline double R0_eps(double eps, double s) {
    const double p = 1.0 - eps;
    const double h = std::sin(0.5 * s);
    return eps * (2.0 - eps) / (eps * eps + 4.0 * p * h * h);
}

}  // namespace detail

/// R0 = (1 - p^2) / (1 + p^2 - 2 p cos s), the squared radius bound of the substituted domain.
inline double R0(double p, double s) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("R0: p must lie in (0, 1)");
    return detail::R0_eps(1.0 - p, s);
}

/// h(t; R) = int_0^{2 pi} |cos t + R e^{i sigma} sin t| d sigma by adaptive Gauss-Kronrod.
inline double h_direct(double R, double t) {
    if (!(R >= 0.0)) throw DomainError("h_direct: R must be >= 0");
    const double c = std::cos(t);
    const double s = std::sin(t);
    auto f = [&](double sigma) {
        const double v = c * c + R * s * (2.0 * std::cos(sigma) * c + R * s);
        return std::sqrt(std::max(v, 0.0));
    };
    // The integrand is even about pi; its only kink sits at sigma = pi.
    const double half = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, std::numbers::pi, 20, 1e-14);
    return 2.0 * half;
}

/// Ellipse circumference 4 a E(eps^2).
inline double h_closed(double R, double t) {
    detail::require_quarter(t, "h_closed");
    const EllipseAxes e(R, t);
    return 4.0 * e.a_axis * elliptic_E(EllipticParam(e.m));
}

/// dh/dt = 4 [csc(2t) K(m) (R sin t - cos t) + cot(2t) E(m) (cos t + R sin t)] on (0, pi/2).
/// The K term is dropped where its coefficient vanishes (m = 1).
inline double h_prime_closed(double R, double t) {
    if (!(t > 0.0 && t < 0.5 * std::numbers::pi)) {
        throw DomainError("h_prime_closed: t must lie strictly inside (0, pi/2)");
    }
    const EllipseAxes e(R, t);
    const double c = std::cos(t);
    const double s = std::sin(t);
    const double s2 = std::sin(2.0 * t);
    const double c2 = std::cos(2.0 * t);
    const double kcoef = R * s - c;
    double v = c2 / s2 * elliptic_E(EllipticParam(e.m)) * (c + R * s);
    if (e.m < 1.0 && kcoef != 0.0) v += kcoef / s2 * elliptic_K(EllipticParam(e.m));
    return 4.0 * v;
}

namespace detail {

/// One draw of the (eps, s, R) chart: eps = u^2 (so p = 1 - eps),
/// s from the wrapped Cauchy law with density R0(p, s) / (2 pi), R^2 uniform on
/// [0, R0]. The estimator of I(t) is weight * h(t; R).
struct AppendixDraw {
    double weight = 0.0;
    double R = 0.0;
};

inline AppendixDraw appendix_draw(CounterRng& rng) {
    const double u = rng.uniform();
    const double eps = u * u;
    const double p = 1.0 - eps;
    const double beta = eps / (2.0 - eps);
    const double s = 2.0 * std::atan(beta * std::tan(std::numbers::pi * (rng.uniform() - 0.5)));
    const double r0 = R0_eps(eps, s);
    const double R = std::sqrt(r0 * rng.uniform());
    return {4.0 / std::numbers::pi * p * u, R};
}

/// Estimates of sum_j W[i][j] I(t_j) for every row i of W, plus I(t_j) itself
/// first, all on the same samples.
inline std::vector<IntegralEstimate> appendix_components(const std::vector<double>& ts,
                                                         const std::vector<std::vector<double>>& W,
                                                         const QuadratureSpec& spec) {
    for (double t : ts) require_quarter(t, "I_of_t");
    const std::size_t T = ts.size();
    const std::size_t ncomp = T + W.size();
    return mc_components(
        ncomp, [](CounterRng& rng) { return appendix_draw(rng); },
        [&](const AppendixDraw& d, std::span<double> out) {
            for (std::size_t j = 0; j < T; ++j) out[j] = d.weight * h_closed(d.R, ts[j]);
            for (std::size_t i = 0; i < W.size(); ++i) {
                double v = 0.0;
                for (std::size_t j = 0; j < T; ++j) v += W[i][j] * out[j];
                out[T + i] = v;
            }
        },
        spec, Method::mc);
}

/// Solves the 3x3 system A x = b by Cramer's rule.
inline std::array<double, 3> solve3(const std::array<std::array<double, 3>, 3>& A, const std::array<double, 3>& b) {
    auto det = [](const std::array<std::array<double, 3>, 3>& M) {
        return M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) - M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
               M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]);
    };
    const double d = det(A);
    std::array<double, 3> x{};
    for (int k = 0; k < 3; ++k) {
        auto M = A;
        for (int r = 0; r < 3; ++r) M[r][k] = b[r];
        x[k] = det(M) / d;
    }
    return x;
}

}  // namespace detail

/// I(t) = int_{B'} |cos t + a_1 sin t| dv(a), normalized so that I(t) = l(t) / 3.
inline IntegralEstimate I_of_t(double t, const QuadratureSpec& spec) {
    return detail::appendix_components({t}, {}, spec)[0];
}

/// I on several t with common random numbers.
inline std::vector<IntegralEstimate> I_of_t_grid(const std::vector<double>& ts, const QuadratureSpec& spec) {
    return detail::appendix_components(ts, {}, spec);
}

struct SlopeEstimate {
    double step = 0.0;
    IntegralEstimate slope;
};

struct StationarityReport {
    IntegralEstimate I0;
    IntegralEstimate I_half_pi;
    /// Forward differences (I(h) - I(0)) / h.
    std::vector<SlopeEstimate> raw_slopes_at_0;
    /// Backward differences (I(pi/2) - I(pi/2 - h)) / h.
    std::vector<SlopeEstimate> raw_slopes_at_half_pi;
    /// Extrapolated slope at 0 under D(h) = s + b h ln(1/h) + c h.
    IntegralEstimate slope_at_0;
    /// Extrapolated slope at pi/2 under D(h) = s + b h + c h^2.
    IntegralEstimate slope_at_half_pi;
    /// (I(pi/2) - 2 I(pi/2 - h) + I(pi/2 - 2h)) / h^2 with h = 0.04.
    IntegralEstimate second_difference_at_half_pi;
    /// max over R in {0.5, 1, 2} of |h'(R, t)| at t = 1e-4 and t = pi/2 - 1e-4.
    double h_prime_near_0 = 0.0;
    double h_prime_near_half_pi = 0.0;
};

inline constexpr std::array<double, 3> kStationaritySteps{0.02, 0.04, 0.08};

inline StationarityReport stationarity_report(const QuadratureSpec& spec) {
    const double hp = 0.5 * std::numbers::pi;
    const auto& H = kStationaritySteps;
    // base layout: I(0), I(h_0..2), I(pi/2 - h_0..2), I(pi/2)
    const std::vector<double> ts{0.0, H[0], H[1], H[2], hp - H[0], hp - H[1], hp - H[2], hp};
    const std::size_t T = ts.size();
    std::vector<std::vector<double>> W;
    for (int i = 0; i < 3; ++i) {
        std::vector<double> row(T, 0.0);
        row[0] = -1.0 / H[i];
        row[1 + i] = 1.0 / H[i];
        W.push_back(row);
    }
    for (int i = 0; i < 3; ++i) {
        std::vector<double> row(T, 0.0);
        row[7] = 1.0 / H[i];
        row[4 + i] = -1.0 / H[i];
        W.push_back(row);
    }
    std::array<std::array<double, 3>, 3> A0{}, A1{};
    for (int i = 0; i < 3; ++i) {
        A0[0][i] = 1.0;
        A0[1][i] = H[i] * std::log(1.0 / H[i]);
        A0[2][i] = H[i];
        A1[0][i] = 1.0;
        A1[1][i] = H[i];
        A1[2][i] = H[i] * H[i];
    }
    const auto l0 = detail::solve3(A0, {1.0, 0.0, 0.0});
    const auto l1 = detail::solve3(A1, {1.0, 0.0, 0.0});
    std::vector<double> ext0(T, 0.0), ext1(T, 0.0), second(T, 0.0);
    for (int i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < T; ++j) {
            ext0[j] += l0[i] * W[i][j];
            ext1[j] += l1[i] * W[3 + i][j];
        }
    }
    const double h = H[1];
    second[7] = 1.0 / (h * h);
    second[5] = -2.0 / (h * h);
    second[6] = 1.0 / (h * h);
    W.push_back(ext0);
    W.push_back(ext1);
    W.push_back(second);

    const auto est = detail::appendix_components(ts, W, spec);
    StationarityReport r;
    r.I0 = est[0];
    r.I_half_pi = est[7];
    for (int i = 0; i < 3; ++i) {
        r.raw_slopes_at_0.push_back({H[i], est[T + i]});
        r.raw_slopes_at_half_pi.push_back({H[i], est[T + 3 + i]});
    }
    r.slope_at_0 = est[T + 6];
    r.slope_at_half_pi = est[T + 7];
    r.second_difference_at_half_pi = est[T + 8];
    for (double R : {0.5, 1.0, 2.0}) {
        r.h_prime_near_0 = std::max(r.h_prime_near_0, std::fabs(h_prime_closed(R, 1e-4)));
        r.h_prime_near_half_pi = std::max(r.h_prime_near_half_pi, std::fabs(h_prime_closed(R, hp - 1e-4)));
    }
    return r;
}

struct HConsistency {
    /// max |h_closed - h_direct| over the grid.
    double max_closed_vs_direct = 0.0;
    /// max |h_prime_closed - central difference of h_closed| over interior grid points.
    double max_prime_vs_fd = 0.0;
    std::size_t points = 0;
};

/// Compares the closed forms on an N x N grid R in [0, R_max], t in [0, pi/2].
inline HConsistency h_consistency(int N = 20, double R_max = 3.0) {
    if (N < 2) throw PreconditionError("h_consistency: need at least 2 grid points per axis");
    HConsistency out;
    const double hp = 0.5 * std::numbers::pi;
    const double step = 1e-5;
    for (int i = 0; i < N; ++i) {
        const double R = R_max * i / (N - 1.0);
        for (int j = 0; j < N; ++j) {
            const double t = j + 1 == N ? hp : hp * j / (N - 1.0);
            out.max_closed_vs_direct = std::max(out.max_closed_vs_direct, std::fabs(h_closed(R, t) - h_direct(R, t)));
            ++out.points;
            if (t - step > 0.0 && t + step < hp) {
                const double fd = (h_closed(R, t + step) - h_closed(R, t - step)) / (2.0 * step);
                out.max_prime_vs_fd = std::max(out.max_prime_vs_fd, std::fabs(h_prime_closed(R, t) - fd));
            }
        }
    }
    return out;
}

}  // namespace bnorm
