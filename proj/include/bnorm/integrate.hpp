#pragma once

// Sampling and Monte Carlo integration over (B, v_alpha).
//
// Every estimator splits its sample budget into `chunks` independent
// CounterRng streams keyed by (seed, chunk index). Chunks may run on any
// number of threads; their accumulators are merged in chunk order, so the
// result is bit-identical for fixed (seed, samples, chunks).

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "bnorm/ballgeom.hpp"
#include "bnorm/complex.hpp"
#include "bnorm/errors.hpp"
#include "bnorm/rng.hpp"

namespace bnorm {

enum class Method { mc, mc_reduced, mc_stratified, radial_quadrature };

inline std::string_view to_string(Method m) {
    switch (m) {
        case Method::mc: return "mc";
        case Method::mc_reduced: return "mc-reduced";
        case Method::mc_stratified: return "mc-stratified";
        case Method::radial_quadrature: return "radial-quadrature";
    }
    return "unknown";
}

struct QuadratureSpec {
    std::uint64_t seed = 42;
    std::size_t samples = 1'000'000;
    std::size_t chunks = 64;
    /// Integrate over the marginal law of the leading coordinates when the
    /// integrand only depends on them.
    bool reduction = true;
    /// Dyadic stratification around the boundary point of a |1 - w_1|^{-q} kernel.
    bool stratify_singularity = true;
    /// Stratified integration refuses kernels with q > n + 1 + alpha + guard.
    double singular_exponent_guard = 1.0;

    void validate() const {
        if (samples < 1000) throw PreconditionError("QuadratureSpec: samples must be >= 1000");
        if (chunks == 0) throw PreconditionError("QuadratureSpec: chunks must be positive");
        if (samples % chunks != 0) throw PreconditionError("QuadratureSpec: chunks must divide samples");
    }

    QuadratureSpec with_seed(std::uint64_t s) const {
        QuadratureSpec r = *this;
        r.seed = s;
        return r;
    }
    QuadratureSpec with_samples(std::size_t n) const {
        QuadratureSpec r = *this;
        r.samples = n;
        return r;
    }
};

struct IntegralEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t samples = 0;
    Method method = Method::mc;
};

struct ComplexEstimate {
    IntegralEstimate re;
    IntegralEstimate im;

    Complex value() const { return {re.value, im.value}; }
    double modulus() const { return std::hypot(re.value, im.value); }
    /// Larger of the two component standard errors.
    double std_error() const { return std::max(re.std_error, im.std_error); }
};

/// sqrt(s1^2 + s2^2): standard error of the difference of independent estimates.
inline double combined_sigma(double s1, double s2) { return std::hypot(s1, s2); }

/// |a - b| in units of sigma; zero when both agree exactly.
inline double sigma_distance(double a, double b, double sigma) {
    const double d = std::fabs(a - b);
    if (d == 0.0) return 0.0;
    return sigma > 0.0 ? d / sigma : std::numeric_limits<double>::infinity();
}

/// Welford accumulator with Chan's merge.
struct RunningMoments {
    double count = 0.0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        count += 1.0;
        const double d = x - mean;
        mean += d / count;
        m2 += d * (x - mean);
    }

    void merge(const RunningMoments& o) {
        if (o.count == 0.0) return;
        if (count == 0.0) {
            *this = o;
            return;
        }
        const double total = count + o.count;
        const double d = o.mean - mean;
        mean += d * (o.count / total);
        m2 += o.m2 + d * d * (count * o.count / total);
        count = total;
    }

    double variance() const { return count > 1.0 ? m2 / (count - 1.0) : 0.0; }
};

namespace detail {

/// Runs body(chunk) for every chunk index, spreading chunks over the
/// available hardware threads. Bodies must only touch per-chunk state.
template <class Body>
void for_each_chunk(std::size_t chunks, Body&& body) {
    const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t workers = std::min(hw, chunks);
    if (workers <= 1) {
        for (std::size_t c = 0; c < chunks; ++c) body(c);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t t = 0; t < workers; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t c = next++; c < chunks; c = next++) body(c);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

struct ChunkAccumulator {
    std::vector<RunningMoments> comps;
    std::size_t nonfinite = 0;
};

}  // namespace detail

/// Uniform point on the sphere S^{2n-1} (normalized 2n-dimensional Gaussian).
inline Point sample_sphere(int n, CounterRng& rng) {
    Point z(n);
    double r2 = 0.0;
    do {
        r2 = 0.0;
        for (int k = 0; k < n; ++k) {
            const auto [x, y] = rng.normal_pair();
            z[k] = {x, y};
            r2 += x * x + y * y;
        }
    } while (r2 == 0.0);
    z *= Complex{1.0 / std::sqrt(r2)};
    return z;
}

/// Draw from v_alpha: uniform direction, and 1 - r^2 as the product
/// prod_{k<n} U_k^{1/(alpha+1+k)} of inverse-CDF Beta(alpha+1+k, 1) draws,
/// which has the Beta(alpha+1, n) law, i.e. r^2 ~ Beta(n, alpha+1).
inline Point sample_ball_valpha(const Params& p, CounterRng& rng) {
    Point z = sample_sphere(p.n(), rng);
    double log_one_minus_r2 = 0.0;
    for (int k = 0; k < p.n(); ++k) log_one_minus_r2 += std::log(rng.uniform()) / (p.alpha() + 1.0 + k);
    const double r2 = -std::expm1(log_one_minus_r2);
    z *= Complex{std::sqrt(r2)};
    return z;
}

/// Generic chunked Monte Carlo over an arbitrary sampler.
/// draw(CounterRng&) -> X (usually a Point); f(const X&, std::span<double>) fills ncomp values.
template <class Draw, class F>
std::vector<IntegralEstimate> mc_components(std::size_t ncomp, Draw&& draw, F&& f, const QuadratureSpec& spec,
                                            Method method = Method::mc) {
    spec.validate();
    const std::size_t per_chunk = spec.samples / spec.chunks;
    std::vector<detail::ChunkAccumulator> acc(spec.chunks);
    detail::for_each_chunk(spec.chunks, [&](std::size_t c) {
        CounterRng rng(spec.seed, c);
        auto& a = acc[c];
        a.comps.assign(ncomp, {});
        std::vector<double> out(ncomp);
        for (std::size_t i = 0; i < per_chunk; ++i) {
            const auto w = draw(rng);
            f(w, std::span<double>(out));
            for (std::size_t k = 0; k < ncomp; ++k) {
                if (!std::isfinite(out[k])) {
                    ++a.nonfinite;
                    continue;
                }
                a.comps[k].add(out[k]);
            }
        }
    });
    std::vector<RunningMoments> total(ncomp);
    std::size_t nonfinite = 0;
    for (const auto& a : acc) {
        nonfinite += a.nonfinite;
        for (std::size_t k = 0; k < ncomp; ++k) total[k].merge(a.comps[k]);
    }
    if (nonfinite > 0) {
        throw IntegrationFailure("Monte Carlo produced " + std::to_string(nonfinite) + " non-finite samples");
    }
    std::vector<IntegralEstimate> est(ncomp);
    for (std::size_t k = 0; k < ncomp; ++k) {
        const double n = total[k].count;
        est[k] = {total[k].mean, std::sqrt(total[k].variance() / n), spec.samples, method};
    }
    return est;
}

/// Estimate of int_B f dv_alpha by plain Monte Carlo.
template <class F>
IntegralEstimate mc_integrate(F&& f, const Params& p, const QuadratureSpec& spec) {
    auto est = mc_components(
        1, [&](CounterRng& rng) { return sample_ball_valpha(p, rng); },
        [&](const Point& w, std::span<double> out) { out[0] = f(w); }, spec, Method::mc);
    return est[0];
}

/// Effective parameters of the marginal law of the first k coordinates:
/// under v_alpha on B_n, (w_1..w_k) is distributed as v_{alpha+n-k} on B_k.
inline Params reduce_marginal(const Params& p, int k) {
    if (k < 1 || k > p.n()) throw PreconditionError("reduce_marginal: need 1 <= k <= n");
    return Params(k, p.alpha() + p.n() - k);
}

/// Estimate of int_B f(w_1..w_k) dv_alpha for an integrand of the leading k
/// coordinates, sampled from the k-dimensional marginal law.
template <class F>
IntegralEstimate mc_integrate_reduced(F&& f, const Params& p, int k, const QuadratureSpec& spec) {
    const Params q = reduce_marginal(p, k);
    auto est = mc_components(
        1, [&](CounterRng& rng) { return sample_ball_valpha(q, rng); },
        [&](const Point& w, std::span<double> out) { out[0] = f(w); }, spec, Method::mc_reduced);
    return est[0];
}

/// Orthonormal frame of C^n whose first vector is a given unit vector.
class UnitaryFrame {
public:
    /// Identity frame.
    explicit UnitaryFrame(int n) : n_(n), identity_(true) {}

    explicit UnitaryFrame(const Point& u) : n_(u.dim()), identity_(false) {
        const double un = u.norm();
        if (!(std::fabs(un - 1.0) <= 1e-12)) throw DomainError("UnitaryFrame: direction must be a unit vector");
        cols_.push_back(u);
        for (int k = 0; k < n_ && static_cast<int>(cols_.size()) < n_; ++k) {
            Point v = Point::basis(n_, k);
            for (const auto& c : cols_) {
                const Complex proj = inner(v, c);
                Point t = c;
                t *= proj;
                v -= t;
            }
            const double vn = v.norm();
            if (vn < 1e-6) continue;
            v *= Complex{1.0 / vn};
            cols_.push_back(v);
        }
        identity_ = true;
        for (int k = 0; k < n_ && identity_; ++k) {
            for (int j = 0; j < n_; ++j) {
                const Complex expect = j == k ? Complex{1.0} : Complex{0.0};
                if (!(cols_[k][j] == expect)) {
                    identity_ = false;
                    break;
                }
            }
        }
    }

    /// sum_k x_k col_k.
    Point map(const Point& x) const {
        if (identity_) return x;
        Point r(n_);
        for (int k = 0; k < n_; ++k) {
            for (int j = 0; j < n_; ++j) r[j] += x[k] * cols_[k][j];
        }
        return r;
    }

private:
    int n_;
    bool identity_;
    std::vector<Point> cols_;
};

/// Stratification plan around the boundary point e_1 for kernels of the form
/// |1 - w_1|^{-q}. In the polar chart w_1 = 1 - rho e^{i psi} the ball is cut
/// into dyadic shells rho in (2^-j, 2^{1-j}], j < kShells, plus a core
/// rho <= 2^{1-kShells}. Inside a stratum rho has density proportional to
/// rho^{s-1} and psi is uniform; the remaining coordinates are drawn exactly
/// from the conditional law, w' = sqrt(1 - |w_1|^2) u with u ~ v_alpha on B_{n-1}.
class SingularStratification {
public:
    static constexpr int kShells = 30;

    SingularStratification(const Params& p, double q, const QuadratureSpec& spec) : p_(p) {
        spec.validate();
        if (q > p.theta() + spec.singular_exponent_guard) {
            throw PreconditionError("stratified integration: exponent q exceeds n + 1 + alpha + guard");
        }
        const double margin = p.theta() - q + 0.5;
        s_ = std::clamp(margin, 0.1, 1.0);
        const double kappa = std::clamp(margin, 0.25, 1.0);
        beta_ = p.alpha() + p.n() - 1.0;
        std::vector<double> weight(kShells + 1);
        double wsum = 0.0;
        for (int j = 0; j <= kShells; ++j) {
            weight[j] = std::exp2(-kappa * j);
            wsum += weight[j];
        }
        const std::size_t min_per = std::max<std::size_t>(256, 4 * spec.chunks);
        const std::size_t chunks = spec.chunks;
        counts_.resize(kShells + 1);
        for (int j = 0; j <= kShells; ++j) {
            auto nj = static_cast<std::size_t>(std::llround(static_cast<double>(spec.samples) * weight[j] / wsum));
            nj = std::max(nj, min_per);
            nj = (nj + chunks - 1) / chunks * chunks;
            counts_[j] = nj;
            lo_.push_back(j < kShells ? std::exp2(-j) : 0.0);
            hi_.push_back(std::exp2(1 - j));
        }
        if (p.n() > 1) rest_.emplace_back(p.n() - 1, p.alpha());
    }

    int strata() const { return kShells + 1; }
    std::size_t count(int j) const { return counts_[j]; }
    std::size_t total_samples() const {
        std::size_t t = 0;
        for (auto c : counts_) t += c;
        return t;
    }
    double radial_exponent() const { return s_; }

    /// Draws a point of stratum j in the e_1-frame; returns the importance
    /// weight (target density / proposal density), zero outside the ball.
    double draw(int j, CounterRng& rng, Point& w) const {
        const double lo = lo_[j];
        const double hi = hi_[j];
        const double los = std::pow(lo, s_);
        const double his = std::pow(hi, s_);
        const double rho = std::pow(los + rng.uniform() * (his - los), 1.0 / s_);
        const double psi_max = std::acos(std::min(1.0, 0.5 * lo));
        const double psi = (2.0 * rng.uniform() - 1.0) * psi_max;
        const double cps = std::cos(psi);
        const double one_minus_r2 = rho * (2.0 * cps - rho);
        const int n = p_.n();
        w = Point(n);
        if (!(one_minus_r2 > 0.0)) {
            // Consume the conditional draw anyway so streams stay aligned.
            if (n > 1) (void)sample_ball_valpha(rest_.front(), rng);
            return 0.0;
        }
        w[0] = {1.0 - rho * cps, -rho * std::sin(psi)};
        if (n > 1) {
            const Point u = sample_ball_valpha(rest_.front(), rng);
            const double scale = std::sqrt(one_minus_r2);
            for (int k = 1; k < n; ++k) w[k] = u[k - 1] * scale;
        }
        const double proposal = s_ * std::pow(rho, s_ - 1.0) / (his - los) / (2.0 * psi_max);
        const double target = (beta_ + 1.0) / std::numbers::pi * std::pow(one_minus_r2, beta_) * rho;
        return target / proposal;
    }

private:
    Params p_;
    double s_ = 0.5;
    double beta_ = 0.0;
    std::vector<std::size_t> counts_;
    std::vector<double> lo_;
    std::vector<double> hi_;
    std::vector<Params> rest_;
};

namespace detail {

/// Least-squares slope of log2 |mean| over the ten shells above the core.
/// Returns +inf when fewer than three shells carry a nonzero mean.
inline double shell_log2_decay(const std::vector<std::vector<RunningMoments>>& strata, std::size_t k, int S) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int m = 0;
    for (int j = std::max(0, S - 11); j < S - 1; ++j) {
        const double v = std::fabs(strata[j][k].mean);
        if (!(v > 0.0)) continue;
        const double x = j, y = std::log2(v);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    if (m < 3) return std::numeric_limits<double>::infinity();
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace detail

/// Stratified estimate of int_B f dv_alpha for integrands carrying a factor
/// |1 - <w, u>|^{-q} (u = `direction`, default e_1). f fills ncomp values.
/// Throws IntegrationFailure when the deepest strata hold over 1% of the
/// mass and the shell means stop decaying (non-integrable blow-up) or when samples are non-finite.
template <class F>
std::vector<IntegralEstimate> stratified_components(std::size_t ncomp, F&& f, const Params& p, double q,
                                                    const QuadratureSpec& spec, const Point* direction = nullptr) {
    const SingularStratification plan(p, q, spec);
    const UnitaryFrame frame = direction ? UnitaryFrame(*direction) : UnitaryFrame(p.n());
    const int S = plan.strata();
    // acc[chunk][stratum]
    std::vector<std::vector<detail::ChunkAccumulator>> acc(spec.chunks);
    detail::for_each_chunk(spec.chunks, [&](std::size_t c) {
        CounterRng rng(spec.seed, c);
        auto& row = acc[c];
        row.resize(S);
        std::vector<double> out(ncomp);
        Point local;
        for (int j = 0; j < S; ++j) {
            auto& a = row[j];
            a.comps.assign(ncomp, {});
            const std::size_t m = plan.count(j) / spec.chunks;
            for (std::size_t i = 0; i < m; ++i) {
                const double weight = plan.draw(j, rng, local);
                if (weight == 0.0) {
                    for (std::size_t k = 0; k < ncomp; ++k) a.comps[k].add(0.0);
                    continue;
                }
                f(frame.map(local), std::span<double>(out));
                for (std::size_t k = 0; k < ncomp; ++k) {
                    const double v = out[k] * weight;
                    if (!std::isfinite(v)) {
                        ++a.nonfinite;
                        continue;
                    }
                    a.comps[k].add(v);
                }
            }
        }
    });
    std::vector<std::vector<RunningMoments>> strata(S, std::vector<RunningMoments>(ncomp));
    std::size_t nonfinite = 0;
    for (const auto& row : acc) {
        for (int j = 0; j < S; ++j) {
            nonfinite += row[j].nonfinite;
            for (std::size_t k = 0; k < ncomp; ++k) strata[j][k].merge(row[j].comps[k]);
        }
    }
    if (nonfinite > 0) {
        throw IntegrationFailure("stratified integration produced " + std::to_string(nonfinite) +
                                 " non-finite samples");
    }
    std::vector<IntegralEstimate> est(ncomp);
    for (std::size_t k = 0; k < ncomp; ++k) {
        double value = 0.0;
        double var = 0.0;
        double total_abs = 0.0;
        for (int j = 0; j < S; ++j) {
            value += strata[j][k].mean;
            total_abs += std::fabs(strata[j][k].mean);
            var += strata[j][k].variance() / strata[j][k].count;
        }
        // The three deepest strata cover rho < 2^-(kShells-2); an integrable
        // kernel leaves them a vanishing share of the total.
        double tail = 0.0;
        for (int j = S - 3; j < S; ++j) tail += std::fabs(strata[j][k].mean);
        if (total_abs > 0.0 && tail > 1e-2 * total_abs && detail::shell_log2_decay(strata, k, S) > -0.05) {
            throw IntegrationFailure("stratified integration: deepest shells do not decay (non-integrable kernel)");
        }
        est[k] = {value, std::sqrt(var), plan.total_samples(), Method::mc_stratified};
    }
    return est;
}

/// Scalar convenience wrapper; falls back to plain Monte Carlo when
/// spec.stratify_singularity is off.
template <class F>
IntegralEstimate stratified_singular(F&& f, const Params& p, double q, const QuadratureSpec& spec,
                                     const Point* direction = nullptr) {
    if (!spec.stratify_singularity) return mc_integrate(f, p, spec);
    auto est = stratified_components(
        1, [&](const Point& w, std::span<double> out) { out[0] = f(w); }, p, q, spec, direction);
    return est[0];
}

/// Helper: either stratified components or plain components, by flag.
template <class F>
std::vector<IntegralEstimate> singular_or_plain_components(std::size_t ncomp, F&& f, const Params& p, double q,
                                                           const QuadratureSpec& spec, bool stratify,
                                                           const Point* direction = nullptr) {
    if (stratify && spec.stratify_singularity) return stratified_components(ncomp, f, p, q, spec, direction);
    return mc_components(
        ncomp, [&](CounterRng& rng) { return sample_ball_valpha(p, rng); }, f, spec, Method::mc);
}

}  // namespace bnorm
