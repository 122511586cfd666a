#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <gtest/gtest.h>

#include "bnorm/bergman.hpp"

using namespace bnorm;

namespace {

constexpr double kPi = std::numbers::pi;

QuadratureSpec small_spec(std::size_t samples = 256'000) {
    QuadratureSpec s;
    s.samples = samples;
    s.chunks = 16;
    return s;
}

bool within(const IntegralEstimate& e, double ref, double k = 3.0) {
    return std::fabs(e.value - ref) <= k * e.std_error;
}

bool agree(const IntegralEstimate& a, const IntegralEstimate& b, double k = 3.0) {
    return std::fabs(a.value - b.value) <= k * combined_sigma(a.std_error, b.std_error);
}

// Exact F_{e_1}(r e_1) by power series in r^2 (integrand depends on w_1 only,
// whose marginal is v_{alpha+n-1} on the disc).
double series_F(int n, double alpha, double r) {
    const double theta = n + 1.0 + alpha, h = 0.5 * (theta + 1.0), beta = alpha + n - 1.0;
    double sum = 0.0;
    for (int k = 0; k < 200000; ++k) {
        const double lc = std::lgamma(h + k) - std::lgamma(h) - std::lgamma(k + 1.0);
        const double lm = std::lgamma(2.0 + beta) + std::lgamma(k + 1.5) - std::lgamma(k + 2.5 + beta);
        const double t = k == 0 ? std::exp(lm) : std::exp(2.0 * lc + 2.0 * k * std::log(r) + lm);
        sum += t;
        if (k > 10 && t < 1e-16 * sum) break;
    }
    return theta * (1.0 - r * r) * sum;
}

Symbol phase_symbol() {
    return {[](const Point& w) -> Complex {
                const double m = abs(w[0]);
                return m == 0.0 ? Complex{} : w[0] / m;
            },
            true, "w1/|w1|"};
}

}  // namespace

TEST(Kernel, Values) {
    const Params p(1, 0.0);
    const Point z{Complex{0.5}};
    const Complex k = kernel(z, z, p);
    EXPECT_NEAR(k.re, 1.0 / (0.75 * 0.75), 1e-14);
    EXPECT_NEAR(k.im, 0.0, 1e-15);
    EXPECT_DOUBLE_EQ(kernel(Point(1), z, p).re, 1.0);
    const Params q(2, 1.0);
    const Point a{Complex{0.3, 0.1}, Complex{-0.2, 0.4}};
    const Point b{Complex{0.1, -0.5}, Complex{0.6, 0.0}};
    const Complex kab = kernel(a, b, q), kba = kernel(b, a, q);
    EXPECT_NEAR(kab.re, kba.re, 1e-14);
    EXPECT_NEAR(kab.im, -kba.im, 1e-14);
    EXPECT_THROW(kernel(Point{Complex{1.0}}, z, p), DomainError);
}

TEST(Kernel, GradientMatchesFiniteDifference) {
    const Params p(2, 0.5);
    const Point z{Complex{0.3, -0.2}, Complex{0.1, 0.4}};
    const Point w{Complex{-0.5, 0.1}, Complex{0.2, 0.6}};
    const auto g = kernel_gradient(z, w, p);
    const double h = 1e-5;
    for (int j = 0; j < 2; ++j) {
        Point zp = z, zm = z;
        zp[j] = zp[j] + Complex{h};
        zm[j] = zm[j] - Complex{h};
        const Complex fd = (kernel(zp, w, p) - kernel(zm, w, p)) / (2.0 * h);
        EXPECT_NEAR(g.grad[j].re, fd.re, 1e-7);
        EXPECT_NEAR(g.grad[j].im, fd.im, 1e-7);
    }
    const Point zero(2);
    const auto g0 = kernel_gradient(zero, w, p);
    EXPECT_NEAR(g0.grad[0].re, p.theta() * w[0].re, 1e-15);
    EXPECT_NEAR(g0.grad[0].im, -p.theta() * w[0].im, 1e-15);
    EXPECT_DOUBLE_EQ(kernel_gradient(z, zero, p).modulus, 0.0);
    const Params p1(1, 0.0);
    EXPECT_NEAR(kernel_gradient(Point{Complex{0.5}}, Point{Complex{0.5}}, p1).modulus, 2.0 * 0.5 / std::pow(0.75, 3),
                1e-13);
}

TEST(Project, ReproducesHolomorphicSymbols) {
    const Params p(2, 0.0);
    const Point z{Complex{0.5, 0.0}, Complex{0.0, 0.2}};
    const auto c = project(constant_symbol(Complex{1.0}), z, p, small_spec());
    EXPECT_TRUE(within(c.re, 1.0));
    EXPECT_TRUE(within(c.im, 0.0));
    const Symbol w1{[](const Point& w) { return w[0]; }, true, "w1"};
    const auto f = project(w1, z, p, small_spec());
    EXPECT_TRUE(within(f.re, 0.5));
    EXPECT_TRUE(within(f.im, 0.0));
    const Symbol cw1{[](const Point& w) { return conj(w[0]); }, true, "conj w1"};
    const auto a = project(cw1, z, p, small_spec());
    EXPECT_TRUE(within(a.re, 0.0));
    EXPECT_TRUE(within(a.im, 0.0));
    const auto grad = projection_gradient(w1, z, p, small_spec());
    EXPECT_TRUE(within(grad.comps[0].re, 1.0));
    EXPECT_TRUE(within(grad.comps[0].im, 0.0));
    EXPECT_TRUE(within(grad.comps[1].re, 0.0));
    EXPECT_TRUE(within(grad.comps[1].im, 0.0));
    EXPECT_THROW(project(w1, Point(3), p, small_spec()), PreconditionError);
}

TEST(Fzeta, ValueAtOrigin) {
    // theta int |w_1| dv_alpha = theta Gamma(n+alpha+1) Gamma(3/2) / Gamma(n+alpha+3/2)
    for (auto [n, alpha] : std::vector<std::pair<int, double>>{{1, 0.0}, {2, 0.0}, {3, 0.5}}) {
        const Params p(n, alpha);
        const double ref =
            p.theta() * std::tgamma(n + alpha + 1.0) * std::tgamma(1.5) / std::tgamma(n + alpha + 1.5);
        const auto F = F_zeta(Point(n), Point::basis(n, 0), p, small_spec());
        EXPECT_TRUE(within(F, ref)) << n << " " << F.value << " vs " << ref;
    }
    EXPECT_NEAR(series_F(1, 0.0, 0.0), 4.0 / 3.0, 1e-14);
}

TEST(Fzeta, AgainstSeries) {
    for (auto [n, alpha] : std::vector<std::pair<int, double>>{{1, 0.0}, {2, 0.0}, {2, 1.0}}) {
        const Params p(n, alpha);
        for (double r : {0.5, 0.95, 0.995}) {
            const auto F = F_zeta(r * Point::basis(n, 0), Point::basis(n, 0), p, small_spec());
            const double ref = series_F(n, alpha, r);
            EXPECT_TRUE(within(F, ref)) << n << " " << alpha << " " << r << ": " << F.value << " +- " << F.std_error
                                        << " vs " << ref;
            EXPECT_LT(ref, p.C_const());
        }
    }
}

TEST(Fzeta, TransformedRepresentationAgrees) {
    const Params p(2, 1.0);
    Point zeta{Complex{1.0 / std::sqrt(2.0)}, Complex{0.0, 1.0 / std::sqrt(2.0)}};
    for (double r : {0.0, 0.7}) {
        const Point z = r * Point::basis(2, 0);
        const auto a = F_zeta(z, zeta, p, small_spec().with_seed(1));
        const auto b = F_zeta_transformed(z, zeta, p, small_spec().with_seed(2));
        EXPECT_TRUE(agree(a, b)) << r << ": " << a.value << " vs " << b.value;
    }
}

TEST(Fzeta, ReductionIsTransparent) {
    const Params p(3, 0.5);
    const Point z = 0.6 * Point::basis(3, 0);
    const Point zeta = Point::basis(3, 1);
    auto full = small_spec().with_seed(5);
    full.reduction = false;
    const auto a = F_zeta(z, zeta, p, full);
    const auto b = F_zeta(z, zeta, p, small_spec().with_seed(6));
    EXPECT_EQ(b.method, Method::mc_reduced);
    EXPECT_TRUE(agree(a, b));
}

TEST(Fzeta, Preconditions) {
    const Params p(2, 0.0);
    EXPECT_THROW(F_zeta(Point(2), Point(2), p, small_spec()), DomainError);
    EXPECT_THROW(F_zeta(Point::basis(2, 0), Point::basis(2, 0), p, small_spec()), DomainError);
    EXPECT_THROW(F_zeta(Point(1), Point::basis(2, 0), p, small_spec()), PreconditionError);
}

TEST(InvariantGradient, ConstantSymbolGivesZero) {
    const Params p(2, 0.0);
    const Point a{Complex{0.3}, Complex{0.0, 0.2}};
    const auto g = invariant_gradient(constant_symbol(Complex{1.0}), a, p, small_spec());
    for (const auto& c : g.comps) {
        EXPECT_TRUE(within(c.re, 0.0));
        EXPECT_TRUE(within(c.im, 0.0));
    }
}

TEST(InvariantGradient, ChainRuleFiniteDifference) {
    // grad (f o phi_a)(0) with f = P g, by central differences of
    // x -> int K(phi_a(x), w) g(w) dv(w) on common samples.
    const Params p(2, 0.0);
    const Point a{Complex{0.3}, Complex{0.0, 0.2}};
    const Automorphism phi(a);
    const Symbol g = phase_symbol();
    const double h = 1e-3;
    std::vector<Point> xp, xm;
    for (int j = 0; j < 2; ++j) {
        xp.push_back(phi(h * Point::basis(2, j)));
        xm.push_back(phi(-h * Point::basis(2, j)));
    }
    const auto fd = mc_components(
        4, [&](CounterRng& rng) { return sample_ball_valpha(p, rng); },
        [&](const Point& w, std::span<double> out) {
            const Complex gw = g(w);
            for (int j = 0; j < 2; ++j) {
                const Complex d = (kernel(xp[j], w, p) - kernel(xm[j], w, p)) * gw / (2.0 * h);
                out[2 * j] = d.re;
                out[2 * j + 1] = d.im;
            }
        },
        small_spec(512'000).with_seed(11), Method::mc);
    const auto inv = invariant_gradient(g, a, p, small_spec(512'000).with_seed(12));
    for (int j = 0; j < 2; ++j) {
        EXPECT_TRUE(agree(inv.comps[j].re, fd[2 * j])) << j << " re " << inv.comps[j].re.value << " vs "
                                                       << fd[2 * j].value;
        EXPECT_TRUE(agree(inv.comps[j].im, fd[2 * j + 1])) << j << " im " << inv.comps[j].im.value << " vs "
                                                           << fd[2 * j + 1].value;
    }
}

TEST(InvariantGradient, OneDimensionalChainRule) {
    // n = 1: phi_a'(0) = -(1 - |a|^2), so grad~ f(a) = -(1 - |a|^2) f'(a).
    const Params p(1, 0.0);
    const Point a{Complex{0.4, 0.2}};
    const Symbol g = phase_symbol();
    const auto inv = invariant_gradient(g, a, p, small_spec().with_seed(3));
    const auto d = projection_gradient(g, a, p, small_spec().with_seed(4));
    const double s = 1.0 - a.norm2();
    const auto scaled = [s](const IntegralEstimate& e) {
        return IntegralEstimate{-s * e.value, s * e.std_error, e.samples, e.method};
    };
    EXPECT_TRUE(agree(inv.comps[0].re, scaled(d.comps[0].re)));
    EXPECT_TRUE(agree(inv.comps[0].im, scaled(d.comps[0].im)));
}

TEST(Extremal, SymbolProperties) {
    const Params p(2, 0.0);
    for (int k : {1, 5, 200}) {
        const Symbol g = extremal_symbol(k, p);
        EXPECT_TRUE(g.bounded);
        const Point zk = extremal_point(k, p);
        EXPECT_DOUBLE_EQ(zk[0].re, k / (k + 1.0));
        CounterRng rng(1, k);
        for (int i = 0; i < 2000; ++i) {
            const Point w = sample_ball_valpha(p, rng);
            const Complex v = g(w);
            EXPECT_NEAR(abs(v), 1.0, 1e-12);
            // conj(w_1) (1 - <z_k,w>)^{-q} g_k(w) = |w_1| |1 - <z_k,w>|^{-q}
            const double q = p.theta() + 1.0;
            const Complex x = Complex{1.0} - inner(zk, w);
            const Complex integrand = pow(x, -q) * conj(w[0]) * v;
            const double expect = abs(w[0]) * std::pow(abs(x), -q);
            EXPECT_NEAR(integrand.re, expect, 1e-10 * expect);
            EXPECT_NEAR(integrand.im, 0.0, 1e-10 * expect);
        }
        Point axis(2);
        axis[1] = Complex{0.5};
        EXPECT_DOUBLE_EQ(abs(g(axis)), 0.0);
    }
    EXPECT_THROW(extremal_point(0, p), PreconditionError);
}

TEST(Extremal, FirstTermAgainstQuadrature) {
    // n = 1, alpha = 0: G_1 = 2 (3/4) (1/pi) int_disc |w| |1 - w/2|^{-3} dA,
    // Gauss-Legendre in r and the trapezoid rule in the (periodic) angle.
    const Params p(1, 0.0);
    const int M = 256;
    auto radial = [&](double r) {
        double s = 0.0;
        for (int j = 0; j < M; ++j) {
            const double ph = 2.0 * kPi * j / M;
            const double d2 = 1.0 - r * std::cos(ph) + 0.25 * r * r;
            s += std::pow(d2, -1.5);
        }
        return r * r * s * (2.0 * kPi / M);
    };
    const double ref = 1.5 / kPi * boost::math::quadrature::gauss<double, 30>::integrate(radial, 0.0, 1.0);
    const auto G = G_k(1, p, small_spec());
    EXPECT_TRUE(within(G, ref)) << G.value << " +- " << G.std_error << " vs " << ref;
    EXPECT_NEAR(ref, series_F(1, 0.0, 0.5), 1e-10);
    EXPECT_NEAR(ref, 1.4652567604, 1e-9);
}

TEST(Extremal, BelowSharpConstant) {
    const Params p(1, 0.0);
    for (int k : {1, 2, 5, 10, 50, 200}) {
        const auto G = G_k(k, p, small_spec());
        EXPECT_LE(G.value, p.C_const() + 3.0 * G.std_error) << k;
    }
}

TEST(PhiBoundary, VanishesOnTheSphere) {
    for (auto [n, alpha] : std::vector<std::pair<int, double>>{{1, 0.0}, {2, 0.0}, {2, 1.5}}) {
        const Params p(n, alpha);
        for (int j = 0; j < n; ++j) {
            const auto phi = phi_boundary(Point::basis(n, j), p, small_spec());
            for (const auto& c : phi.comps) {
                EXPECT_TRUE(within(c.re, 0.0)) << n << " " << alpha << " " << j;
                EXPECT_TRUE(within(c.im, 0.0)) << n << " " << alpha << " " << j;
            }
        }
    }
    EXPECT_THROW(phi_boundary(0.5 * Point::basis(2, 0), Params(2, 0.0), small_spec()), DomainError);
}
