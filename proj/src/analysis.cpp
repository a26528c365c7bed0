#include "retfield/analysis.hpp"

#include "retfield/parallel.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace retfield {

namespace {

void require_increasing(const std::vector<double>& v, const char* what)
{
    if (v.empty())
        throw std::invalid_argument(std::string(what) + " must not be empty");
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i]))
            throw std::invalid_argument(std::string(what) + " must be finite");
        if (i > 0 && !(v[i] > v[i - 1]))
            throw std::invalid_argument(std::string(what) + " must be strictly increasing");
    }
}

void require_unit(const Vec3& d)
{
    if (std::abs(norm(d) - 1.0) > 1e-12)
        throw std::invalid_argument("ray direction must be a unit vector");
}

template <class Cell>
std::vector<FieldDecomposition> evaluate_cells(const PointEvaluator& eval, std::size_t n, unsigned threads,
                                               Cell&& cell)
{
    std::vector<FieldDecomposition> out(n);
    parallel_for(n, threads, [&](std::size_t i) {
        const auto [obs, radius] = cell(i);
        try {
            out[i] = eval(obs);
        } catch (const std::exception& e) {
            std::ostringstream msg;
            msg << e.what() << " [r = " << radius << ", t = " << obs.t << "]";
            throw SamplingError(msg.str(), radius, obs.t);
        }
    });
    return out;
}

}  // namespace

std::vector<double> TimeGrid::values() const
{
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i)
        out[i] = (i + 1 == count && count > 1) ? stop : start + static_cast<double>(i) * step();
    return out;
}

WaveformSeries sample_waveforms(const PointEvaluator& eval, Representation rep, const Ray& ray,
                                std::vector<double> radii, std::vector<double> times, const Vec3& component_axis,
                                unsigned threads)
{
    require_unit(ray.direction);
    require_increasing(radii, "radii");
    require_increasing(times, "times");
    if (times.size() > 2) {
        const double dt = times[1] - times[0];
        for (std::size_t i = 2; i < times.size(); ++i)
            if (std::abs((times[i] - times[i - 1]) - dt) > 1e-9 * std::abs(dt))
                throw std::invalid_argument("times must be a uniform grid");
    }

    WaveformSeries series;
    series.representation = rep;
    series.ray = ray;
    series.radii = std::move(radii);
    series.times = std::move(times);
    series.component_axis = component_axis;

    const std::size_t nt = series.times.size();
    series.samples = evaluate_cells(eval, series.radii.size() * nt, threads, [&](std::size_t i) {
        const double r = series.radii[i / nt];
        return std::pair{ObservationPoint{series.ray.at(r), series.times[i % nt]}, r};
    });
    return series;
}

double light_front_time(const SourceModel& src, const Vec3& x, const PhysicalConstants& constants)
{
    return src.profile.t_on() + src.domain.distance(x) / constants.c;
}

FrontCheck light_front_check(const WaveformSeries& series, const SourceModel& src,
                             const PhysicalConstants& constants)
{
    FrontCheck out;
    for (std::size_t ir = 0; ir < series.radii.size(); ++ir) {
        const double front = light_front_time(src, series.point(ir), constants);
        for (std::size_t it = 0; it < series.times.size(); ++it) {
            const double v = std::abs(series.component(ir, it));
            const double m = norm(series.at(ir, it).total);
            out.global_peak = std::max(out.global_peak, v);
            out.peak_magnitude = std::max(out.peak_magnitude, m);
            if (series.times[it] < front) {
                out.max_precursor = std::max(out.max_precursor, v);
                out.max_precursor_magnitude = std::max(out.max_precursor_magnitude, m);
            }
        }
    }
    out.pass = out.max_precursor <= 1e-10 * out.global_peak;
    out.magnitude_pass = out.max_precursor_magnitude <= 1e-10 * out.peak_magnitude;
    return out;
}

std::string_view to_string(FeatureKind kind) { return kind == FeatureKind::Peak ? "peak" : "zero_crossing"; }

FeatureKind feature_from_string(std::string_view name)
{
    if (name == "peak")
        return FeatureKind::Peak;
    if (name == "zero_crossing")
        return FeatureKind::ZeroCrossing;
    throw std::invalid_argument("unknown feature '" + std::string(name) + "'");
}

double parabolic_offset(double y0, double y1, double y2)
{
    const double den = y0 - 2.0 * y1 + y2;
    if (den == 0.0)
        return 0.0;
    return std::clamp(0.5 * (y0 - y2) / den, -1.0, 1.0);
}

std::vector<FeaturePick> feature_arrival_times(const WaveformSeries& series, FeatureKind feature, double window_lo,
                                               double window_hi)
{
    std::size_t first = series.times.size(), last = 0;
    for (std::size_t it = 0; it < series.times.size(); ++it) {
        if (series.times[it] >= window_lo && series.times[it] <= window_hi) {
            first = std::min(first, it);
            last = it;
        }
    }
    if (first > last || first == series.times.size())
        throw std::invalid_argument("feature window contains no samples");

    const double dt = series.times.size() > 1 ? series.times[1] - series.times[0] : 0.0;
    std::vector<FeaturePick> picks(series.radii.size());
    for (std::size_t ir = 0; ir < series.radii.size(); ++ir) {
        FeaturePick& pick = picks[ir];
        pick.radius = series.radii[ir];
        auto y = [&](std::size_t it) { return series.component(ir, it); };

        if (feature == FeatureKind::Peak) {
            std::size_t best = first;
            bool flat = true;
            for (std::size_t it = first; it <= last; ++it) {
                if (y(it) != y(first))
                    flat = false;
                if (y(it) > y(best))
                    best = it;
            }
            if (flat) {
                pick.reason = "flat window";
            } else if (best == first || best == last) {
                pick.reason = "maximum on the window edge";
            } else {
                const double d = parabolic_offset(y(best - 1), y(best), y(best + 1));
                pick.found = true;
                pick.time = series.times[best] + d * dt;
                pick.value = y(best) - 0.25 * (y(best - 1) - y(best + 1)) * d;
            }
            continue;
        }

        std::optional<std::size_t> prev;
        for (std::size_t it = first; it <= last && !pick.found; ++it) {
            if (y(it) == 0.0)
                continue;
            if (prev && std::signbit(y(*prev)) != std::signbit(y(it))) {
                const double ya = y(*prev), yb = y(it);
                const double ta = series.times[*prev], tb = series.times[it];
                pick.found = true;
                pick.time = ta + (tb - ta) * ya / (ya - yb);
            }
            prev = it;
        }
        if (!pick.found)
            pick.reason = "no sign change in window";
    }
    return picks;
}

std::vector<std::size_t> VelocityProfile::negative_segments() const
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < local_velocity.size(); ++i)
        if (!infinite[i] && local_velocity[i] < 0.0)
            out.push_back(i);
    return out;
}

std::optional<double> VelocityProfile::min_velocity() const
{
    std::optional<double> best;
    for (std::size_t i = 0; i < local_velocity.size(); ++i)
        if (!infinite[i] && (!best || local_velocity[i] < *best))
            best = local_velocity[i];
    return best;
}

VelocityProfile local_velocity(const std::vector<double>& radii, const std::vector<double>& arrival_times,
                               FeatureKind feature)
{
    if (radii.size() != arrival_times.size())
        throw std::invalid_argument("radii and arrival times differ in length");
    if (radii.size() < 2)
        throw std::invalid_argument("local velocity needs at least two radii with features");

    VelocityProfile p;
    p.radii = radii;
    p.arrival_times = arrival_times;
    p.feature = feature;
    for (std::size_t i = 0; i + 1 < radii.size(); ++i) {
        const double dr = radii[i + 1] - radii[i];
        const double dt = arrival_times[i + 1] - arrival_times[i];
        const bool inf = std::abs(dt) < 1e-14;
        p.infinite.push_back(inf);
        p.local_velocity.push_back(inf ? std::copysign(std::numeric_limits<double>::infinity(), dr) : dr / dt);
    }
    return p;
}

VelocityProfile local_velocity(const std::vector<FeaturePick>& picks, FeatureKind feature)
{
    std::vector<double> r, t;
    for (const auto& p : picks)
        if (p.found) {
            r.push_back(p.radius);
            t.push_back(p.time);
        }
    return local_velocity(r, t, feature);
}

RadialSweep sample_radial_sweep(const PointEvaluator& eval, Representation rep, const Ray& ray,
                                std::vector<double> radii, std::vector<double> offsets, double c, unsigned threads)
{
    require_unit(ray.direction);
    require_increasing(radii, "radii");
    require_increasing(offsets, "retarded offsets");

    RadialSweep sweep;
    sweep.representation = rep;
    sweep.ray = ray;
    sweep.radii = std::move(radii);
    sweep.offsets = std::move(offsets);
    const std::size_t no = sweep.offsets.size();
    sweep.samples = evaluate_cells(eval, sweep.radii.size() * no, threads, [&](std::size_t i) {
        const double r = sweep.radii[i / no];
        return std::pair{ObservationPoint{sweep.ray.at(r), sweep.offsets[i % no] + r / c}, r};
    });
    return sweep;
}

ScalingFit zone_scaling_fit(const RadialSweep& sweep, int term, double window_lo, double window_hi)
{
    if (term < 0 || term > 2)
        throw std::invalid_argument("term index must be 0, 1 or 2");
    if (sweep.radii.size() < 5)
        throw std::invalid_argument("scaling fit needs at least 5 radii");
    if (!(sweep.radii.front() > 0.0) || sweep.radii.back() < 10.0 * sweep.radii.front())
        throw std::invalid_argument("scaling fit radii must span at least one decade");

    ScalingFit fit;
    for (std::size_t ir = 0; ir < sweep.radii.size(); ++ir) {
        double amp = 0.0;
        bool any = false;
        for (std::size_t j = 0; j < sweep.offsets.size(); ++j) {
            if (sweep.offsets[j] < window_lo || sweep.offsets[j] > window_hi)
                continue;
            any = true;
            amp = std::max(amp, norm(sweep.at(ir, j).terms[static_cast<std::size_t>(term)]));
        }
        if (!any)
            throw std::invalid_argument("scaling window contains no retarded offsets");
        if (!(amp > 0.0))
            throw std::domain_error("degenerate scaling fit: zero term amplitude");
        fit.amplitudes.push_back(amp);
    }

    const double n = static_cast<double>(sweep.radii.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < sweep.radii.size(); ++i) {
        const double x = std::log(sweep.radii[i]);
        const double y = std::log(fit.amplitudes[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    fit.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.intercept = (sy - fit.exponent * sx) / n;
    return fit;
}

}  // namespace retfield
