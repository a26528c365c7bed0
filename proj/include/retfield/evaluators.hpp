#pragma once

#include "retfield/geometry.hpp"
#include "retfield/kernels.hpp"
#include "retfield/quadrature.hpp"
#include "retfield/sources.hpp"

#include <array>
#include <memory>
#include <string_view>
#include <vector>

namespace retfield {

/// Which integral representation produced a field.
///   Budko     - near / intermediate / far terms (time-integrated current,
///               current, and its time derivative against 1/R^3, 1/R^2, 1/R kernels)
///   Jefimenko - retarded current term and retarded charge-gradient term
///   Dipole    - closed-form point dipole, split like Budko
enum class Representation { Budko, Jefimenko, Dipole };

std::string_view to_string(Representation rep);
Representation representation_from_string(std::string_view name);

/// Electric field at one observation point with its per-term breakdown.
/// `total` is always computed as (terms[0] + terms[1]) + terms[2]; the
/// two-term representation leaves terms[2] at zero.
struct FieldDecomposition {
    Representation representation = Representation::Budko;
    std::array<Vec3, 3> terms{};
    Vec3 total;
    double err_estimate = 0.0;  ///< quadrature error estimate (max norm); 0 if not refined
    int order = 0;              ///< quadrature order used; 0 for closed forms

    int term_count() const { return representation == Representation::Jefimenko ? 2 : 3; }
    std::string_view term_name(int i) const;
    const Vec3& term(std::string_view name) const;

    void finalize() { total = (terms[0] + terms[1]) + terms[2]; }
};

struct ObservationPoint {
    Vec3 x;
    double t = 0.0;
};

enum class TimeDerivativeMode {
    Commuted,          ///< d/dt moved under the integral onto J (default)
    FiniteDifference,  ///< central difference of the retarded current integral in t
};

struct EvaluatorOptions {
    kernels::Backend backend = kernels::default_backend();
    TimeDerivativeMode time_derivative = TimeDerivativeMode::Commuted;
    /// Step of the finite-difference mode as a fraction of the pulse duration.
    double fd_step_fraction = 1e-4;
    /// Observation points must be farther than margin * diameter(D) from D.
    double exterior_margin = 1e-9;
};

/// Evaluates both representations for one source on one quadrature rule.
/// Construction samples the envelope at every node once; evaluation is
/// const and safe to call concurrently.
class FieldEvaluator {
public:
    FieldEvaluator(const SourceModel& src, const QuadratureRule& rule, const PhysicalConstants& constants,
                   EvaluatorOptions options = {});

    FieldDecomposition budko(const ObservationPoint& obs) const;
    FieldDecomposition jefimenko(const ObservationPoint& obs) const;
    FieldDecomposition evaluate(Representation rep, const ObservationPoint& obs) const;

    const SourceModel& source() const { return src_; }
    const PhysicalConstants& constants() const { return constants_; }
    const EvaluatorOptions& options() const { return options_; }
    int order() const { return order_; }

    /// Throws DomainError unless obs.x lies outside the source domain by the margin.
    void check_exterior(const ObservationPoint& obs) const;

private:
    kernels::Probe probe(const ObservationPoint& obs) const;

    SourceModel src_;
    PhysicalConstants constants_;
    EvaluatorOptions options_;
    int order_;
    kernels::NodeArrays nodes_;
};

/// Order-refinement ladder over FieldEvaluators (orders base, base+2, ...,
/// max). Stops once the max-norm change of the total drops below
/// rel_tol * max(|total|_max, floor_fraction * field_scale(x)).
class RefinedFieldEvaluator {
public:
    RefinedFieldEvaluator(const SourceModel& src, const PhysicalConstants& constants, int base_order, int max_order,
                          double rel_tol, EvaluatorOptions options = {});

    FieldDecomposition evaluate(Representation rep, const ObservationPoint& obs) const;
    const FieldEvaluator& at_order(int order) const;

    /// Upper bound on |E| at x over all times: the three terms of a point
    /// moment |A| * integral(g) at dist(x, D) with the profile maxima.
    double field_scale(const Vec3& x) const;
    /// Values below this fraction of field_scale are converged in absolute terms.
    static constexpr double floor_fraction = 1e-3;
    int base_order() const { return base_; }
    int max_order() const { return max_; }

private:
    int base_, max_;
    double rel_tol_;
    SourceModel src_;
    PhysicalConstants constants_;
    double moment_ = 0.0;
    double f_max_[3] = {0.0, 0.0, 0.0};  ///< max |F|, |f|, |f'|
    std::vector<std::unique_ptr<FieldEvaluator>> ladder_;
};

FieldDecomposition budko_field(const SourceModel& src, const ObservationPoint& obs, const QuadratureRule& rule,
                               const PhysicalConstants& constants);
FieldDecomposition jefimenko_field(const SourceModel& src, const ObservationPoint& obs, const QuadratureRule& rule,
                                   const PhysicalConstants& constants);

/// |a.total - b.total| / max(|a.total|, |b.total|, 1e-30).
double relative_residual(const FieldDecomposition& a, const FieldDecomposition& b);

double representation_residual(const SourceModel& src, const ObservationPoint& obs, const QuadratureRule& rule,
                                const PhysicalConstants& constants);

/// Point dipole p(t) = scale * direction * F(t), so dp/dt = scale * direction * f
/// and d2p/dt2 = scale * direction * f'.
struct DipoleMoment {
    TimeProfile profile;
    Vec3 direction;
    double scale = 0.0;

    Vec3 moment(double t) const { return direction * (scale * profile.primitive(t)); }

    /// Dipole moment of a separable source: amplitude * integral of g over D.
    static DipoleMoment from_source(const SourceModel& src);
};

/// Integral of the spatial envelope over the source domain. Closed form for
/// Gaussians on a concentric ball or on a box; quadrature otherwise.
double envelope_integral(const SourceModel& src);

FieldDecomposition dipole_oracle_field(const DipoleMoment& dipole, const Vec3& x0, const ObservationPoint& obs,
                                       const PhysicalConstants& constants);

}  // namespace retfield
