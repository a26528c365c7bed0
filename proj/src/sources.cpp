#include "retfield/sources.hpp"

#include <limits>
#include <numbers>
#include <sstream>

namespace retfield {

namespace {

// exp(-32): envelope of the differentiated Gaussian at the clip points.
const double kClipGaussian = std::exp(-32.0);
const double kSqrtE = std::exp(0.5);

}  // namespace

std::string_view to_string(PulseKind kind)
{
    switch (kind) {
    case PulseKind::SineSquared: return "sine_squared";
    case PulseKind::DifferentiatedGaussian: return "diff_gaussian";
    }
    return "?";
}

std::string_view to_string(EnvelopeKind kind)
{
    switch (kind) {
    case EnvelopeKind::Gaussian: return "gaussian";
    case EnvelopeKind::TruncatedGaussian: return "truncated_gaussian";
    }
    return "?";
}

std::string_view to_string(DomainKind kind)
{
    switch (kind) {
    case DomainKind::Box: return "box";
    case DomainKind::Ball: return "ball";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// TimeProfile

TimeProfile::TimeProfile(PulseKind kind, double t_on, double tau) : kind_(kind), t_on_(t_on), tau_(tau)
{
    if (!std::isfinite(t_on))
        throw std::invalid_argument("pulse switch-on time must be finite");
    if (!(tau > 0.0) || !std::isfinite(tau))
        throw std::invalid_argument("pulse duration must be positive");
}

TimeProfile TimeProfile::sine_squared(double t_on, double tau) { return {PulseKind::SineSquared, t_on, tau}; }

TimeProfile TimeProfile::differentiated_gaussian(double t_on, double tau)
{
    return {PulseKind::DifferentiatedGaussian, t_on, tau};
}

TimeProfile::Sample TimeProfile::sample(double t) const
{
    const double s = t - t_on_;
    Sample out;
    if (!(s > 0.0))
        return out;

    if (kind_ == PulseKind::SineSquared) {
        if (s >= tau_) {
            out.primitive = 0.5 * tau_;
            return out;
        }
        const double phase = std::numbers::pi * s / tau_;
        const double sn = std::sin(phase);
        const double sin2 = std::sin(2.0 * phase);
        out.value = sn * sn;
        out.derivative = (std::numbers::pi / tau_) * sin2;
        out.primitive = 0.5 * s - tau_ / (4.0 * std::numbers::pi) * sin2;
        return out;
    }

    if (s >= tau_)
        return out;
    const double w = width();
    const double u = (s - 0.5 * tau_) / w;
    const double g = std::exp(-0.5 * u * u);
    out.value = -kSqrtE * u * g;
    out.derivative = -(kSqrtE / w) * (1.0 - u * u) * g;
    out.primitive = kSqrtE * w * (g - kClipGaussian);
    return out;
}

// ---------------------------------------------------------------------------
// SpatialEnvelope

SpatialEnvelope::SpatialEnvelope(EnvelopeKind kind, const Vec3& center, double sigma, double cut_radius)
    : kind_(kind), center_(center), sigma_(sigma), cut_radius_(cut_radius)
{
    if (!is_finite(center))
        throw std::invalid_argument("envelope centre must be finite");
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw std::invalid_argument("envelope sigma must be positive");
    if (kind == EnvelopeKind::TruncatedGaussian && !(cut_radius > 0.0))
        throw std::invalid_argument("truncated envelope needs a positive cut radius");
}

SpatialEnvelope SpatialEnvelope::gaussian(const Vec3& center, double sigma)
{
    return {EnvelopeKind::Gaussian, center, sigma, std::numeric_limits<double>::infinity()};
}

SpatialEnvelope SpatialEnvelope::truncated_gaussian(const Vec3& center, double sigma, double cut_radius)
{
    return {EnvelopeKind::TruncatedGaussian, center, sigma, cut_radius};
}

bool SpatialEnvelope::outside_cut(const Vec3& xp) const
{
    return kind_ == EnvelopeKind::TruncatedGaussian && norm(xp - center_) > cut_radius_;
}

double SpatialEnvelope::radial_value(double distance) const
{
    if (kind_ == EnvelopeKind::TruncatedGaussian && distance > cut_radius_)
        return 0.0;
    const double q = distance / sigma_;
    return std::exp(-0.5 * q * q);
}

double SpatialEnvelope::value(const Vec3& xp) const
{
    if (outside_cut(xp))
        return 0.0;
    const Vec3 d = xp - center_;
    return std::exp(-0.5 * dot(d, d) / (sigma_ * sigma_));
}

Vec3 SpatialEnvelope::gradient(const Vec3& xp) const
{
    if (outside_cut(xp))
        return {};
    const Vec3 d = xp - center_;
    const double s2 = sigma_ * sigma_;
    return d * (-std::exp(-0.5 * dot(d, d) / s2) / s2);
}

Mat3 SpatialEnvelope::hessian(const Vec3& xp) const
{
    if (outside_cut(xp))
        return {};
    const Vec3 d = xp - center_;
    const double s2 = sigma_ * sigma_;
    const double g = std::exp(-0.5 * dot(d, d) / s2);
    Mat3 h;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            h(a, b) = g * (d[a] * d[b] / (s2 * s2) - (a == b ? 1.0 / s2 : 0.0));
    return h;
}

// ---------------------------------------------------------------------------
// Domain

Domain::Domain(DomainKind kind, const Vec3& lo, const Vec3& hi, const Vec3& center, double radius)
    : kind_(kind), lo_(lo), hi_(hi), center_(center), radius_(radius)
{
}

Domain Domain::box(const Vec3& lo, const Vec3& hi)
{
    if (!is_finite(lo) || !is_finite(hi) || !(lo.x < hi.x && lo.y < hi.y && lo.z < hi.z))
        throw std::invalid_argument("box domain needs finite corners with lo < hi on every axis");
    return {DomainKind::Box, lo, hi, (lo + hi) * 0.5, 0.5 * norm(hi - lo)};
}

Domain Domain::ball(const Vec3& center, double radius)
{
    if (!is_finite(center) || !(radius > 0.0) || !std::isfinite(radius))
        throw std::invalid_argument("ball domain needs a finite centre and positive radius");
    const Vec3 r{radius, radius, radius};
    return {DomainKind::Ball, center - r, center + r, center, radius};
}

double Domain::volume() const
{
    if (kind_ == DomainKind::Ball)
        return 4.0 / 3.0 * std::numbers::pi * radius_ * radius_ * radius_;
    const Vec3 e = hi_ - lo_;
    return e.x * e.y * e.z;
}

double Domain::diameter() const { return kind_ == DomainKind::Ball ? 2.0 * radius_ : norm(hi_ - lo_); }

double Domain::distance(const Vec3& x) const
{
    if (kind_ == DomainKind::Ball)
        return std::max(0.0, norm(x - center_) - radius_);
    Vec3 d;
    for (int i = 0; i < 3; ++i)
        d[i] = std::max({lo_[i] - x[i], 0.0, x[i] - hi_[i]});
    return norm(d);
}

double Domain::distance_to_boundary(const Vec3& p) const
{
    if (!strictly_contains(p))
        return distance(p);
    if (kind_ == DomainKind::Ball)
        return radius_ - norm(p - center_);
    double d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i)
        d = std::min({d, p[i] - lo_[i], hi_[i] - p[i]});
    return d;
}

bool Domain::strictly_contains(const Vec3& x) const
{
    if (kind_ == DomainKind::Ball)
        return norm(x - center_) < radius_;
    return lo_.x < x.x && x.x < hi_.x && lo_.y < x.y && x.y < hi_.y && lo_.z < x.z && x.z < hi_.z;
}

// ---------------------------------------------------------------------------
// SourceModel

void SourceModel::validate() const
{
    if (!is_finite(polarization) || std::abs(norm(polarization) - 1.0) > 1e-12) {
        std::ostringstream msg;
        msg << "polarization must be unit (|p| = " << norm(polarization) << ")";
        throw std::invalid_argument(msg.str());
    }
    if (!std::isfinite(amplitude))
        throw std::invalid_argument("amplitude must be finite");
}

namespace {

double envelope_on_domain(const SourceModel& src, const Vec3& xp)
{
    return src.domain.contains(xp) ? src.envelope.value(xp) : 0.0;
}

}  // namespace

Vec3 current(const SourceModel& src, const Vec3& xp, double tp)
{
    return src.polarization * (src.amplitude * envelope_on_domain(src, xp) * src.profile.value(tp));
}

Vec3 current_time_derivative(const SourceModel& src, const Vec3& xp, double tp)
{
    return src.polarization * (src.amplitude * envelope_on_domain(src, xp) * src.profile.derivative(tp));
}

Vec3 current_time_primitive(const SourceModel& src, const Vec3& xp, double tp)
{
    return src.polarization * (src.amplitude * envelope_on_domain(src, xp) * src.profile.primitive(tp));
}

double charge_density(const SourceModel& src, const Vec3& xp, double tp)
{
    const double F = src.profile.primitive(tp);
    if (F == 0.0 || !src.domain.contains(xp))
        return 0.0;
    return -src.amplitude * dot(src.polarization, src.envelope.gradient(xp)) * F;
}

Vec3 charge_gradient(const SourceModel& src, const Vec3& xp, double tp)
{
    const double F = src.profile.primitive(tp);
    if (F == 0.0 || !src.domain.contains(xp))
        return {};
    return (src.envelope.hessian(xp) * src.polarization) * (-src.amplitude * F);
}

double boundary_leakage(const SourceModel& src)
{
    if (src.amplitude == 0.0)
        return 0.0;
    const Vec3& c = src.envelope.center();
    const double interior_max = src.envelope.radial_value(src.domain.distance(c));
    if (interior_max == 0.0)
        return 0.0;
    return src.envelope.radial_value(src.domain.distance_to_boundary(c)) / interior_max;
}

}  // namespace retfield
