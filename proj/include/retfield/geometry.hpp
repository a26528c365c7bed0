#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace retfield {

/// Raised when a kernel is evaluated at a singular configuration
/// (observation point coincident with a source point).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
    constexpr double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }

    constexpr Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    constexpr Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    constexpr Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }

    friend constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
    friend constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
    friend constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
    friend constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
    friend constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
    friend constexpr Vec3 operator/(const Vec3& a, double s) { return {a.x / s, a.y / s, a.z / s}; }
    friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3& a, const Vec3& b)
{
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline double max_abs(const Vec3& a) { return std::max({std::abs(a.x), std::abs(a.y), std::abs(a.z)}); }
inline bool is_finite(const Vec3& a) { return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z); }

/// 3x3 matrix, row index k, column index n.
struct Mat3 {
    std::array<std::array<double, 3>, 3> m{};

    constexpr double operator()(int k, int n) const { return m[k][n]; }
    constexpr double& operator()(int k, int n) { return m[k][n]; }

    static constexpr Mat3 identity()
    {
        Mat3 r;
        r(0, 0) = r(1, 1) = r(2, 2) = 1.0;
        return r;
    }
    static constexpr Mat3 diag(double a, double b, double c)
    {
        Mat3 r;
        r(0, 0) = a;
        r(1, 1) = b;
        r(2, 2) = c;
        return r;
    }

    constexpr double trace() const { return m[0][0] + m[1][1] + m[2][2]; }

    friend constexpr Vec3 operator*(const Mat3& a, const Vec3& v)
    {
        return {a(0, 0) * v.x + a(0, 1) * v.y + a(0, 2) * v.z,
                a(1, 0) * v.x + a(1, 1) * v.y + a(1, 2) * v.z,
                a(2, 0) * v.x + a(2, 1) * v.y + a(2, 2) * v.z};
    }
    friend constexpr Mat3 operator*(double s, Mat3 a)
    {
        for (auto& row : a.m)
            for (auto& e : row) e *= s;
        return a;
    }
    friend constexpr bool operator==(const Mat3&, const Mat3&) = default;
};

/// Physical constants entering every field term. Natural units by default.
struct PhysicalConstants {
    double c = 1.0;             ///< speed of light
    double inv_4pi_eps0 = 1.0;  ///< Coulomb prefactor 1/(4 pi eps0)

    static PhysicalConstants natural() { return {}; }
    static PhysicalConstants si() { return {299792458.0, 8.9875517873681764e9}; }

    /// Throws std::invalid_argument unless both constants are positive and finite.
    void validate() const;
};

/// t - |x - xp| / c. Throws DomainError when x == xp.
double retarded_time(const Vec3& x, const Vec3& xp, double t, const PhysicalConstants& constants);

/// (x - xp) / |x - xp|. Throws DomainError when x == xp.
Vec3 unit_direction(const Vec3& x, const Vec3& xp);

/// Second mixed derivative of 1/R with respect to x_k and xp_n:
/// (delta_kn - 3 theta_k theta_n) / R^3. Symmetric and traceless.
Mat3 double_gradient_kernel(const Vec3& x, const Vec3& xp);

/// theta theta^T - I, the negated transverse projector. Requires |theta| = 1 to 1e-12.
Mat3 far_kernel(const Vec3& theta);

}  // namespace retfield
