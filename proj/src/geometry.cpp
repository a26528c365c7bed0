#include "retfield/geometry.hpp"

#include <sstream>

namespace retfield {

namespace {

double separation(const Vec3& x, const Vec3& xp, Vec3& d)
{
    d = x - xp;
    const double r = norm(d);
    if (!(r > 0.0)) {
        std::ostringstream msg;
        msg << "coincident observation and source point (" << x.x << ", " << x.y << ", " << x.z << ")";
        throw DomainError(msg.str());
    }
    return r;
}

}  // namespace

void PhysicalConstants::validate() const
{
    if (!(c > 0.0) || !std::isfinite(c))
        throw std::invalid_argument("speed of light must be positive and finite");
    if (!(inv_4pi_eps0 > 0.0) || !std::isfinite(inv_4pi_eps0))
        throw std::invalid_argument("Coulomb prefactor must be positive and finite");
}

double retarded_time(const Vec3& x, const Vec3& xp, double t, const PhysicalConstants& constants)
{
    Vec3 d;
    return t - separation(x, xp, d) / constants.c;
}

Vec3 unit_direction(const Vec3& x, const Vec3& xp)
{
    Vec3 d;
    const double r = separation(x, xp, d);
    return d / r;
}

Mat3 double_gradient_kernel(const Vec3& x, const Vec3& xp)
{
    Vec3 d;
    const double r = separation(x, xp, d);
    const Vec3 th = d / r;
    const double inv_r3 = 1.0 / (r * r * r);
    Mat3 k;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            k(a, b) = ((a == b ? 1.0 : 0.0) - 3.0 * th[a] * th[b]) * inv_r3;
    return k;
}

Mat3 far_kernel(const Vec3& theta)
{
    if (!(std::abs(norm(theta) - 1.0) <= 1e-12))
        throw std::invalid_argument("far_kernel requires a unit direction");
    Mat3 k;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            k(a, b) = theta[a] * theta[b] - (a == b ? 1.0 : 0.0);
    return k;
}

}  // namespace retfield
