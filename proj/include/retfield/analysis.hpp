#pragma once

// Post-processing of sampled fields: light-front causality, feature
// arrival times and their radial velocity, and radial power-law fits of the
// individual terms.

#include "retfield/evaluators.hpp"

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace retfield {

using PointEvaluator = std::function<FieldDecomposition(const ObservationPoint&)>;

/// Wraps an evaluation failure with the (r, t) cell that produced it.
class SamplingError : public std::runtime_error {
public:
    SamplingError(const std::string& what, double radius, double time)
        : std::runtime_error(what), radius(radius), time(time)
    {
    }
    double radius;
    double time;
};

struct Ray {
    Vec3 origin;
    Vec3 direction;  ///< unit

    Vec3 at(double r) const { return origin + direction * r; }
};

/// Uniform time grid start + i * step, i < count.
struct TimeGrid {
    double start = 0.0;
    double stop = 0.0;
    std::size_t count = 0;

    std::vector<double> values() const;
    double step() const { return count > 1 ? (stop - start) / static_cast<double>(count - 1) : 0.0; }
};

/// Field samples on a (radius x time) grid along a ray, row-major by radius.
struct WaveformSeries {
    Representation representation = Representation::Budko;
    Ray ray;
    std::vector<double> radii;
    std::vector<double> times;
    std::vector<FieldDecomposition> samples;
    /// Scalar waveform = total . component_axis.
    Vec3 component_axis{0.0, 0.0, 1.0};

    const FieldDecomposition& at(std::size_t ir, std::size_t it) const { return samples[ir * times.size() + it]; }
    double component(std::size_t ir, std::size_t it) const { return dot(at(ir, it).total, component_axis); }
    Vec3 point(std::size_t ir) const { return ray.at(radii[ir]); }
};

/// Evaluates `eval` on every (radius, time) cell with up to `threads` workers.
/// Radii must be strictly increasing and times strictly increasing and uniform.
WaveformSeries sample_waveforms(const PointEvaluator& eval, Representation rep, const Ray& ray,
                                std::vector<double> radii, std::vector<double> times, const Vec3& component_axis,
                                unsigned threads = 1);

/// Earliest time any field can reach x: t_on + dist(x, D) / c.
double light_front_time(const SourceModel& src, const Vec3& x, const PhysicalConstants& constants);

struct FrontCheck {
    double max_precursor = 0.0;  ///< max |component| strictly ahead of the front
    double global_peak = 0.0;    ///< max |component| over the whole series
    bool pass = false;           ///< max_precursor <= 1e-10 * global_peak
    // Same check on the full vector magnitude |E|.
    double max_precursor_magnitude = 0.0;
    double peak_magnitude = 0.0;
    bool magnitude_pass = false;
};

FrontCheck light_front_check(const WaveformSeries& series, const SourceModel& src,
                             const PhysicalConstants& constants);

enum class FeatureKind { Peak, ZeroCrossing };

std::string_view to_string(FeatureKind kind);
FeatureKind feature_from_string(std::string_view name);

struct FeaturePick {
    double radius = 0.0;
    bool found = false;
    double time = 0.0;
    double value = 0.0;
    std::string reason;  ///< why the feature was not found
};

/// Per radius: Peak = argmax of the component inside [window_lo, window_hi],
/// refined with a 3-point parabola; ZeroCrossing = first sign change in the
/// window, refined linearly. Throws std::invalid_argument if the window
/// holds no samples.
std::vector<FeaturePick> feature_arrival_times(const WaveformSeries& series, FeatureKind feature, double window_lo,
                                               double window_hi);

/// Parabolic vertex offset (in samples, within [-1, 1]) through three equally
/// spaced values with the middle one extremal.
double parabolic_offset(double y0, double y1, double y2);

struct VelocityProfile {
    std::vector<double> radii;
    std::vector<double> arrival_times;
    /// (r[i+1] - r[i]) / (t[i+1] - t[i]); +-inf where |dt| < 1e-14.
    std::vector<double> local_velocity;
    std::vector<bool> infinite;
    FeatureKind feature = FeatureKind::Peak;

    /// Indices i of segments [r_i, r_{i+1}] with negative velocity.
    std::vector<std::size_t> negative_segments() const;
    std::optional<double> min_velocity() const;
};

VelocityProfile local_velocity(const std::vector<double>& radii, const std::vector<double>& arrival_times,
                               FeatureKind feature = FeatureKind::Peak);
/// Builds the profile from the found picks only.
VelocityProfile local_velocity(const std::vector<FeaturePick>& picks, FeatureKind feature);

/// Samples at t = offset + r / c along a ray, for comparing radii at a fixed
/// retarded phase. Row-major by radius.
struct RadialSweep {
    Representation representation = Representation::Budko;
    Ray ray;
    std::vector<double> radii;
    std::vector<double> offsets;
    std::vector<FieldDecomposition> samples;

    const FieldDecomposition& at(std::size_t ir, std::size_t j) const { return samples[ir * offsets.size() + j]; }
};

RadialSweep sample_radial_sweep(const PointEvaluator& eval, Representation rep, const Ray& ray,
                                std::vector<double> radii, std::vector<double> offsets, double c,
                                unsigned threads = 1);

struct ScalingFit {
    double exponent = 0.0;
    double intercept = 0.0;
    std::vector<double> amplitudes;  ///< per radius, max |term| over the window
};

/// Least-squares slope of log(max |term| over offsets in the window) against
/// log r. Needs at least 5 radii spanning a decade; throws on zero amplitudes.
ScalingFit zone_scaling_fit(const RadialSweep& sweep, int term, double window_lo, double window_hi);

}  // namespace retfield
