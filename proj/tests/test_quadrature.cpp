#include "retfield/quadrature.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace retfield;

namespace {

// integral of x^k over [a, b]
double mono(int k, double a, double b) { return (std::pow(b, k + 1) - std::pow(a, k + 1)) / (k + 1); }

// integral of x^a y^b z^c over the ball of radius R centred at the origin
double ball_mono(int a, int b, int c, double R)
{
    if (a % 2 || b % 2 || c % 2)
        return 0.0;
    const int d = a + b + c;
    return 2.0 * std::tgamma((a + 1) / 2.0) * std::tgamma((b + 1) / 2.0) * std::tgamma((c + 1) / 2.0) /
           std::tgamma((d + 3) / 2.0) * std::pow(R, d + 3) / (d + 3);
}

}  // namespace

TEST_CASE("Gauss-Legendre is exact up to degree 2n-1")
{
    for (int n = 1; n <= 32; ++n) {
        const GaussRule1D g = gauss_legendre(n);
        REQUIRE(g.nodes.size() == static_cast<std::size_t>(n));
        for (int k = 0; k <= 2 * n - 1; ++k) {
            double s = 0.0;
            for (int i = 0; i < n; ++i)
                s += g.weights[i] * std::pow(g.nodes[i], k);
            CHECK(std::abs(s - mono(k, -1.0, 1.0)) <= 1e-14);
        }
        for (int i = 0; i < n; ++i)
            CHECK(g.nodes[i] == doctest::Approx(-g.nodes[n - 1 - i]).epsilon(1e-15));
    }
    CHECK_THROWS_AS(gauss_legendre(0), std::invalid_argument);
}

TEST_CASE("Gauss-Jacobi weight sum")
{
    const GaussRule1D g = gauss_jacobi(10, 0.0, 2.0);
    double s = 0.0, s1 = 0.0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        s += g.weights[i];
        s1 += g.weights[i] * g.nodes[i];
    }
    CHECK(s == doctest::Approx(8.0 / 3.0).epsilon(1e-14));
    // integral of x (1 + x)^2 over [-1, 1] = 4/3
    CHECK(s1 == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
    CHECK_THROWS_AS(gauss_jacobi(4, -1.0, 0.0), std::invalid_argument);
}

TEST_CASE("box rule integrates random monomials exactly")
{
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<int> order_dist(1, 12);
    for (int s = 0; s < 1000; ++s) {
        const int n = order_dist(rng);
        std::uniform_int_distribution<int> exp_dist(0, 2 * n - 1);
        const Vec3 lo = testutil::random_vec(rng, -2.0, 0.0);
        const Vec3 hi = lo + testutil::random_vec(rng, 0.2, 2.0);
        const int a = exp_dist(rng), b = exp_dist(rng), c = exp_dist(rng);
        const QuadratureRule rule = build_rule(Domain::box(lo, hi), n);
        const Vec3 v = integrate_vector(
            [&](const Vec3& p) { return Vec3{std::pow(p.x, a) * std::pow(p.y, b) * std::pow(p.z, c), 1.0, 0.0}; },
            rule);
        const double exact = mono(a, lo.x, hi.x) * mono(b, lo.y, hi.y) * mono(c, lo.z, hi.z);
        CHECK(std::abs(v.x - exact) <= 1e-12 * std::max(1.0, std::abs(exact)));
        CHECK(v.y == doctest::Approx(Domain::box(lo, hi).volume()).epsilon(1e-13));
    }
}

TEST_CASE("ball rule integrates monomials of total degree <= 2n-1 exactly")
{
    std::mt19937_64 rng(32);
    for (int s = 0; s < 1000; ++s) {
        const int n = std::uniform_int_distribution<int>(1, 10)(rng);
        const int dmax = 2 * n - 1;
        std::uniform_int_distribution<int> e(0, dmax);
        int a = e(rng), b = e(rng), c = e(rng);
        while (a + b + c > dmax) {
            a = std::max(0, a - 1);
            b = std::max(0, b - 1);
            c = std::max(0, c - 1);
        }
        const double R = std::uniform_real_distribution<double>(0.3, 3.0)(rng);
        const Vec3 center = testutil::random_vec(rng, -1.0, 1.0);
        const QuadratureRule rule = build_rule(Domain::ball(center, R), n);
        const Vec3 v = integrate_vector(
            [&](const Vec3& p) {
                const Vec3 q = p - center;
                return Vec3{std::pow(q.x, a) * std::pow(q.y, b) * std::pow(q.z, c), 0.0, 0.0};
            },
            rule);
        const double exact = ball_mono(a, b, c, R);
        CHECK(std::abs(v.x - exact) <= 1e-12 * std::max(1.0, ball_mono(a + a % 2, b + b % 2, c + c % 2, R)));
    }
}

TEST_CASE("weights sum to the domain volume")
{
    for (int n : {1, 2, 5, 12, 24}) {
        const Domain ball = Domain::ball({1, 2, 3}, 2.5);
        const Domain box = Domain::box({0, 0, 0}, {1, 3, 2});
        for (const Domain& d : {ball, box}) {
            const QuadratureRule r = build_rule(d, n);
            double s = 0.0;
            for (double w : r.weights)
                s += w;
            CHECK(s == doctest::Approx(d.volume()).epsilon(1e-13));
            for (const Vec3& p : r.nodes)
                CHECK(d.contains(p));
        }
    }
}

TEST_CASE("non-finite integrand is reported with the node")
{
    const QuadratureRule r = build_rule(Domain::box({0, 0, 0}, {1, 1, 1}), 3);
    CHECK_THROWS_AS(integrate_vector([](const Vec3&) { return Vec3{std::nan(""), 0, 0}; }, r), QuadratureError);
}

TEST_CASE("refine_estimate: polynomials converge immediately")
{
    const Domain d = Domain::box({-1, 0, 0}, {1, 2, 1});
    const RefinedValue v = refine_estimate([](const Vec3& p) { return Vec3{p.x * p.x * p.y, p.z, 1.0}; }, d, 4, 12);
    CHECK(v.err_estimate < 1e-13);
    CHECK(v.err_history.front() < 1e-13);
    CHECK(v.order == 12);
}

TEST_CASE("refine_estimate: smooth Gaussian error decreases monotonically")
{
    const Domain d = Domain::ball({}, 6.0);
    const RefinedValue v = refine_estimate(
        [](const Vec3& p) { return Vec3{std::exp(-0.5 * dot(p, p)), 0.0, 0.0}; }, d, 4, 20);
    REQUIRE(v.err_history.size() >= 3);
    for (std::size_t i = 2; i < v.err_history.size(); ++i) {
        if (v.err_history[i - 1] < 1e-14)
            break;
        CHECK(v.err_history[i] < v.err_history[i - 1]);
    }
    const double a = 6.0;
    const double exact = std::pow(2 * std::numbers::pi, 1.5) *
                         (std::erf(a / std::numbers::sqrt2) - std::sqrt(2 / std::numbers::pi) * a * std::exp(-a * a / 2));
    CHECK(v.value.x == doctest::Approx(exact).epsilon(1e-12));
}

TEST_CASE("refine_estimate: 1/R^3 kernel one diameter away converges below 1e-8 by order 24")
{
    const Domain d = Domain::ball({}, 1.0);
    const Vec3 x{0.0, 0.0, 3.0};
    const RefinedValue v = refine_estimate(
        [&](const Vec3& p) {
            const Vec3 r = x - p;
            const double R = norm(r);
            return r / (R * R * R * R);
        },
        d, 8, 24);
    CHECK(v.err_estimate < 1e-8 * max_abs(v.value));
}

TEST_CASE("refine_estimate: relative tolerance stops early")
{
    const Domain d = Domain::ball({}, 1.0);
    const RefinedValue v =
        refine_estimate([](const Vec3& p) { return Vec3{std::exp(p.x), 0, 0}; }, d, 2, 30, 1e-12);
    CHECK(v.order < 30);
    CHECK(v.err_estimate <= 1e-12 * std::abs(v.value.x));
}

TEST_CASE("refine_estimate: stalled ladder raises")
{
    // An integrand that changes with every order never settles.
    int calls = 0;
    auto eval = [&](int order) { return Vec3{static_cast<double>(order % 2 ? 1 : -1) * ++calls, 0, 0}; };
    double err = 0;
    int order = 0;
    CHECK_THROWS_AS(detail::refine_ladder<Vec3>(
                        eval, [](const Vec3& a, const Vec3& b) { return max_abs(a - b); },
                        [](const Vec3& a) { return max_abs(a); }, 2, 20, 1e-12, err, order),
                    QuadratureError);
    CHECK_THROWS_AS(refine_estimate([](const Vec3&) { return Vec3{}; }, Domain::ball({}, 1), 4, 4),
                    std::invalid_argument);
}
