#include "retfield/geometry.hpp"

#include "test_util.hpp"

#include <doctest.h>

using namespace retfield;
using testutil::frob;

namespace {

double inv_r(const Vec3& x, const Vec3& xp) { return 1.0 / norm(x - xp); }

Vec3 basis(int i)
{
    Vec3 e;
    e[i] = 1.0;
    return e;
}

// d^2 (1/R) / dx_k dxp_n by central differences in both arguments.
Mat3 mixed_fd(const Vec3& x, const Vec3& xp, double h)
{
    Mat3 out;
    for (int k = 0; k < 3; ++k)
        for (int n = 0; n < 3; ++n) {
            const Vec3 ek = basis(k) * h, en = basis(n) * h;
            out(k, n) = (inv_r(x + ek, xp + en) - inv_r(x + ek, xp - en) - inv_r(x - ek, xp + en) +
                         inv_r(x - ek, xp - en)) /
                        (4.0 * h * h);
        }
    return out;
}

Mat3 minus(const Mat3& a, const Mat3& b)
{
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            r(i, j) = a(i, j) - b(i, j);
    return r;
}

}  // namespace

TEST_CASE("double_gradient_kernel matches finite differences")
{
    std::mt19937_64 rng(11);
    double worst = 0.0;
    for (int s = 0; s < 1000; ++s) {
        const Vec3 xp = testutil::random_vec(rng, -2.0, 2.0);
        const double R = std::exp(std::uniform_real_distribution<double>(std::log(0.5), std::log(50.0))(rng));
        const Vec3 x = xp + testutil::random_unit(rng) * R;
        const Mat3 k = double_gradient_kernel(x, xp);
        const Mat3 fd = mixed_fd(x, xp, 1e-4 * R);
        worst = std::max(worst, frob(minus(k, fd)) / frob(k));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("double_gradient_kernel is symmetric, traceless and scales as R^-3")
{
    std::mt19937_64 rng(12);
    for (int s = 0; s < 1000; ++s) {
        const Vec3 xp = testutil::random_vec(rng, -5.0, 5.0);
        const Vec3 d = testutil::random_unit(rng) * std::uniform_real_distribution<double>(0.1, 20.0)(rng);
        const Mat3 k = double_gradient_kernel(xp + d, xp);
        const double scale = frob(k);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                CHECK(k(i, j) == doctest::Approx(k(j, i)).epsilon(1e-14));
        CHECK(std::abs(k.trace()) <= 1e-14 * scale);

        const double lambda = std::uniform_real_distribution<double>(0.2, 5.0)(rng);
        const Mat3 kl = double_gradient_kernel(xp + d * lambda, xp);
        const Mat3 expect = (1.0 / (lambda * lambda * lambda)) * k;
        CHECK(frob(minus(kl, expect)) <= 1e-13 * frob(expect));

        // even in x - xp
        CHECK(frob(minus(double_gradient_kernel(xp, xp + d), k)) <= 1e-14 * scale);
    }
}

TEST_CASE("double_gradient_kernel rejects coincident points")
{
    const Vec3 p{1.0, 2.0, 3.0};
    CHECK_THROWS_AS(double_gradient_kernel(p, p), DomainError);
    CHECK_THROWS_AS(unit_direction(p, p), DomainError);
    CHECK_THROWS_AS(retarded_time(p, p, 0.0, PhysicalConstants::natural()), DomainError);
}

TEST_CASE("far_kernel is transverse")
{
    std::mt19937_64 rng(13);
    for (int s = 0; s < 1000; ++s) {
        const Vec3 th = testutil::random_unit(rng);
        const Mat3 f = far_kernel(th);
        CHECK(max_abs(f * th) <= 1e-15);
        CHECK(f.trace() == doctest::Approx(-2.0).epsilon(1e-15));
        const Vec3 v = testutil::random_vec(rng, -1.0, 1.0);
        const Vec3 fv = f * v;
        CHECK(std::abs(dot(fv, th)) <= 1e-15 * (1.0 + norm(v)));
        // acting twice equals negating once: (theta theta^T - I)^2 = I - theta theta^T
        CHECK(max_abs(f * fv + fv) <= 1e-14);
    }
    CHECK_THROWS_AS(far_kernel(Vec3{0.0, 0.0, 2.0}), std::invalid_argument);
}

TEST_CASE("retarded time and direction")
{
    const PhysicalConstants c{2.0, 1.0};
    const Vec3 x{3.0, 4.0, 0.0}, xp{0.0, 0.0, 0.0};
    CHECK(retarded_time(x, xp, 10.0, c) == doctest::Approx(10.0 - 2.5));
    const Vec3 u = unit_direction(x, xp);
    CHECK(u.x == doctest::Approx(0.6));
    CHECK(u.y == doctest::Approx(0.8));
}

TEST_CASE("physical constants")
{
    CHECK_NOTHROW(PhysicalConstants::natural().validate());
    CHECK_NOTHROW(PhysicalConstants::si().validate());
    CHECK_THROWS_AS((PhysicalConstants{0.0, 1.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((PhysicalConstants{1.0, -1.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((PhysicalConstants{std::nan(""), 1.0}.validate()), std::invalid_argument);
}
