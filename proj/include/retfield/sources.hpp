#pragma once

#include "retfield/geometry.hpp"

#include <string_view>

namespace retfield {

enum class PulseKind { SineSquared, DifferentiatedGaussian };
enum class EnvelopeKind { Gaussian, TruncatedGaussian };
enum class DomainKind { Box, Ball };

std::string_view to_string(PulseKind kind);
std::string_view to_string(EnvelopeKind kind);
std::string_view to_string(DomainKind kind);

/// Temporal factor f(t) of a separable current, with its derivative and its
/// primitive from switch-on. Every quantity is exactly zero for t <= t_on.
///
/// SineSquared: f = sin^2(pi (t - t_on) / tau) on [t_on, t_on + tau], zero
/// elsewhere. The charge it deposits, F(t >= t_on + tau) = tau / 2, stays.
///
/// DifferentiatedGaussian: f = -sqrt(e) u exp(-u^2 / 2), u = (t - t_c) / w,
/// with t_c = t_on + tau / 2 and w = tau / 16, so the pulse is clipped eight
/// widths from its centre on both sides (|f| < 2e-13 at the clip). Peak
/// |f| = 1. F returns to zero after the pulse.
class TimeProfile {
public:
    struct Sample {
        double value = 0.0;       ///< f(t)
        double derivative = 0.0;  ///< f'(t)
        double primitive = 0.0;   ///< F(t), integral of f from t_on
    };

    static TimeProfile sine_squared(double t_on, double tau);
    static TimeProfile differentiated_gaussian(double t_on, double tau);

    PulseKind kind() const { return kind_; }
    double t_on() const { return t_on_; }
    double tau() const { return tau_; }
    double t_end() const { return t_on_ + tau_; }
    /// Gaussian width w (DifferentiatedGaussian only; tau / 16).
    double width() const { return tau_ / 16.0; }

    Sample sample(double t) const;
    double value(double t) const { return sample(t).value; }
    double derivative(double t) const { return sample(t).derivative; }
    double primitive(double t) const { return sample(t).primitive; }

    friend bool operator==(const TimeProfile&, const TimeProfile&) = default;

private:
    TimeProfile(PulseKind kind, double t_on, double tau);

    PulseKind kind_;
    double t_on_;
    double tau_;
};

/// Spatial factor g(x') of a separable current, peak value 1 at the centre.
class SpatialEnvelope {
public:
    static SpatialEnvelope gaussian(const Vec3& center, double sigma);
    /// Gaussian set to zero (no smoothing) outside |x' - center| <= cut_radius.
    static SpatialEnvelope truncated_gaussian(const Vec3& center, double sigma, double cut_radius);

    EnvelopeKind kind() const { return kind_; }
    const Vec3& center() const { return center_; }
    double sigma() const { return sigma_; }
    double cut_radius() const { return cut_radius_; }

    double value(const Vec3& xp) const;
    Vec3 gradient(const Vec3& xp) const;
    Mat3 hessian(const Vec3& xp) const;
    /// Envelope as a function of distance from the centre (monotone non-increasing).
    double radial_value(double distance) const;

    friend bool operator==(const SpatialEnvelope&, const SpatialEnvelope&) = default;

private:
    SpatialEnvelope(EnvelopeKind kind, const Vec3& center, double sigma, double cut_radius);
    bool outside_cut(const Vec3& xp) const;

    EnvelopeKind kind_;
    Vec3 center_;
    double sigma_;
    double cut_radius_;
};

/// Support D of the current: an axis-aligned box or a ball.
class Domain {
public:
    static Domain box(const Vec3& lo, const Vec3& hi);
    static Domain ball(const Vec3& center, double radius);

    DomainKind kind() const { return kind_; }
    const Vec3& lo() const { return lo_; }
    const Vec3& hi() const { return hi_; }
    const Vec3& center() const { return center_; }
    double radius() const { return radius_; }

    double volume() const;
    double diameter() const;
    /// Euclidean distance from x to D; zero for points inside or on the boundary.
    double distance(const Vec3& x) const;
    /// Smallest distance from an interior point p to the boundary of D,
    /// or the distance from p to D when p lies outside.
    double distance_to_boundary(const Vec3& p) const;
    bool contains(const Vec3& x) const { return distance(x) == 0.0; }
    bool strictly_contains(const Vec3& x) const;

    friend bool operator==(const Domain&, const Domain&) = default;

private:
    Domain(DomainKind kind, const Vec3& lo, const Vec3& hi, const Vec3& center, double radius);

    DomainKind kind_;
    Vec3 lo_, hi_;
    Vec3 center_;
    double radius_;
};

/// J(x', t') = amplitude * polarization * g(x') * f(t') restricted to D.
/// The pointwise functions below return zero outside D.
struct SourceModel {
    SpatialEnvelope envelope;
    TimeProfile profile;
    Vec3 polarization;
    double amplitude;
    Domain domain;

    /// Throws std::invalid_argument if the polarization is not a unit vector
    /// (to 1e-12) or the amplitude is not finite.
    void validate() const;
};

Vec3 current(const SourceModel& src, const Vec3& xp, double tp);
Vec3 current_time_derivative(const SourceModel& src, const Vec3& xp, double tp);
Vec3 current_time_primitive(const SourceModel& src, const Vec3& xp, double tp);

/// rho = -div' of the time-integrated current; identically zero at t' <= t_on.
double charge_density(const SourceModel& src, const Vec3& xp, double tp);
/// Spatial gradient of rho at frozen t'.
Vec3 charge_gradient(const SourceModel& src, const Vec3& xp, double tp);

/// max over the boundary of D of |J| divided by max over D of |J|.
/// Zero when the source vanishes on D.
double boundary_leakage(const SourceModel& src);

}  // namespace retfield
