#include "retfield/evaluators.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace retfield {

std::string_view to_string(Representation rep)
{
    switch (rep) {
    case Representation::Budko: return "budko";
    case Representation::Jefimenko: return "jefimenko";
    case Representation::Dipole: return "dipole";
    }
    return "?";
}

Representation representation_from_string(std::string_view name)
{
    if (name == "budko")
        return Representation::Budko;
    if (name == "jefimenko")
        return Representation::Jefimenko;
    if (name == "dipole")
        return Representation::Dipole;
    throw std::invalid_argument("unknown representation '" + std::string(name) + "'");
}

std::string_view FieldDecomposition::term_name(int i) const
{
    static constexpr std::string_view three[] = {"near", "intermediate", "far"};
    static constexpr std::string_view two[] = {"current_term", "charge_term", ""};
    return representation == Representation::Jefimenko ? two[i] : three[i];
}

const Vec3& FieldDecomposition::term(std::string_view name) const
{
    for (int i = 0; i < term_count(); ++i)
        if (term_name(i) == name)
            return terms[i];
    throw std::invalid_argument("no term '" + std::string(name) + "' in " + std::string(to_string(representation)) +
                                " decomposition");
}

// ---------------------------------------------------------------------------
// FieldEvaluator

FieldEvaluator::FieldEvaluator(const SourceModel& src, const QuadratureRule& rule,
                               const PhysicalConstants& constants, EvaluatorOptions options)
    : src_(src), constants_(constants), options_(options), order_(rule.order)
{
    src_.validate();
    constants_.validate();
    if (!(rule.domain == src.domain))
        throw std::invalid_argument("quadrature rule was built on a different domain than the source");
    if (rule.size() == 0)
        throw std::invalid_argument("empty quadrature rule");

    const std::size_t n = rule.size();
    const std::size_t padded = (n + kernels::kLanes - 1) / kernels::kLanes * kernels::kLanes;
    auto& a = nodes_;
    for (auto* v : {&a.x, &a.y, &a.z, &a.wg, &a.whx, &a.why, &a.whz})
        v->assign(padded, 0.0);
    a.count = n;
    for (std::size_t i = 0; i < padded; ++i) {
        const Vec3& p = rule.nodes[i < n ? i : 0];
        a.x[i] = p.x;
        a.y[i] = p.y;
        a.z[i] = p.z;
        if (i >= n)
            continue;
        const double w = rule.weights[i];
        a.wg[i] = w * src.envelope.value(p);
        const Vec3 h = src.envelope.hessian(p) * src.polarization;
        a.whx[i] = w * h.x;
        a.why[i] = w * h.y;
        a.whz[i] = w * h.z;
    }
}

void FieldEvaluator::check_exterior(const ObservationPoint& obs) const
{
    if (!is_finite(obs.x) || !std::isfinite(obs.t))
        throw std::invalid_argument("observation point must be finite");
    const double margin = options_.exterior_margin * src_.domain.diameter();
    if (!(src_.domain.distance(obs.x) > margin)) {
        std::ostringstream msg;
        msg << "observation point (" << obs.x.x << ", " << obs.x.y << ", " << obs.x.z
            << ") is not outside the source domain";
        throw DomainError(msg.str());
    }
}

kernels::Probe FieldEvaluator::probe(const ObservationPoint& obs) const
{
    return {obs.x, obs.t, 1.0 / constants_.c, src_.polarization};
}

FieldDecomposition FieldEvaluator::budko(const ObservationPoint& obs) const
{
    check_exterior(obs);
    const kernels::BudkoSums s = kernels::budko_sums(options_.backend, nodes_, src_.profile, probe(obs));
    const double ka = constants_.inv_4pi_eps0 * src_.amplitude;
    const double c = constants_.c;

    FieldDecomposition out;
    out.representation = Representation::Budko;
    out.order = order_;
    out.terms[0] = s.near * (-ka);
    out.terms[1] = s.intermediate * (-ka / c);
    out.terms[2] = s.far * (ka / (c * c));
    out.finalize();
    return out;
}

FieldDecomposition FieldEvaluator::jefimenko(const ObservationPoint& obs) const
{
    check_exterior(obs);
    const kernels::Probe pr = probe(obs);
    const kernels::JefimenkoSums s = kernels::jefimenko_sums(options_.backend, nodes_, src_.profile, pr);
    const double ka = constants_.inv_4pi_eps0 * src_.amplitude;
    const double c = constants_.c;

    double current_sum = s.current;
    if (options_.time_derivative == TimeDerivativeMode::FiniteDifference) {
        const double h = options_.fd_step_fraction * src_.profile.tau();
        kernels::Probe lo = pr, hi = pr;
        lo.t -= h;
        hi.t += h;
        current_sum = (kernels::retarded_current_sum(nodes_, src_.profile, hi) -
                       kernels::retarded_current_sum(nodes_, src_.profile, lo)) /
                      (2.0 * h);
    }

    FieldDecomposition out;
    out.representation = Representation::Jefimenko;
    out.order = order_;
    out.terms[0] = src_.polarization * (-ka / (c * c) * current_sum);
    out.terms[1] = s.charge * ka;
    out.finalize();
    return out;
}

FieldDecomposition FieldEvaluator::evaluate(Representation rep, const ObservationPoint& obs) const
{
    switch (rep) {
    case Representation::Budko: return budko(obs);
    case Representation::Jefimenko: return jefimenko(obs);
    case Representation::Dipole:
        return dipole_oracle_field(DipoleMoment::from_source(src_), src_.envelope.center(), obs, constants_);
    }
    throw std::invalid_argument("unknown representation");
}

// ---------------------------------------------------------------------------
// RefinedFieldEvaluator

RefinedFieldEvaluator::RefinedFieldEvaluator(const SourceModel& src, const PhysicalConstants& constants,
                                             int base_order, int max_order, double rel_tol, EvaluatorOptions options)
    : base_(base_order), max_(max_order), rel_tol_(rel_tol), src_(src), constants_(constants)
{
    if (base_order < 1)
        throw std::invalid_argument("quadrature order must be >= 1");
    if (!(base_order < max_order))
        throw std::invalid_argument("refinement needs base_order < max_order");
    for (int order = base_order; order <= max_order; order += 2)
        ladder_.push_back(std::make_unique<FieldEvaluator>(src, build_rule(src.domain, order), constants, options));

    moment_ = std::abs(src.amplitude) * envelope_integral(src);
    const TimeProfile& p = src.profile;
    constexpr int n = 4096;
    for (int i = 0; i <= n; ++i) {
        const TimeProfile::Sample s = p.sample(p.t_on() + p.tau() * i / n);
        f_max_[0] = std::max(f_max_[0], std::abs(s.primitive));
        f_max_[1] = std::max(f_max_[1], std::abs(s.value));
        f_max_[2] = std::max(f_max_[2], std::abs(s.derivative));
    }
}

double RefinedFieldEvaluator::field_scale(const Vec3& x) const
{
    const double d = src_.domain.distance(x);
    const double c = constants_.c;
    return constants_.inv_4pi_eps0 * moment_ * (f_max_[0] / (d * d * d) + f_max_[1] / (c * d * d) + f_max_[2] / (c * c * d));
}

const FieldEvaluator& RefinedFieldEvaluator::at_order(int order) const
{
    if (order < base_ || order > max_ || (order - base_) % 2 != 0)
        throw std::out_of_range("order not on the refinement ladder");
    return *ladder_[static_cast<std::size_t>((order - base_) / 2)];
}

FieldDecomposition RefinedFieldEvaluator::evaluate(Representation rep, const ObservationPoint& obs) const
{
    if (rep == Representation::Dipole)
        return ladder_.front()->evaluate(rep, obs);
    double err = 0.0;
    int order = base_;
    FieldDecomposition out = detail::refine_ladder<FieldDecomposition>(
        [&](int k) { return at_order(k).evaluate(rep, obs); },
        [](const FieldDecomposition& a, const FieldDecomposition& b) { return max_abs(a.total - b.total); },
        [](const FieldDecomposition& a) { return max_abs(a.total); }, base_, max_, rel_tol_, err, order, nullptr,
        floor_fraction * field_scale(obs.x));
    out.err_estimate = err;
    out.order = order;
    return out;
}

// ---------------------------------------------------------------------------
// Free functions

FieldDecomposition budko_field(const SourceModel& src, const ObservationPoint& obs, const QuadratureRule& rule,
                               const PhysicalConstants& constants)
{
    return FieldEvaluator(src, rule, constants).budko(obs);
}

FieldDecomposition jefimenko_field(const SourceModel& src, const ObservationPoint& obs, const QuadratureRule& rule,
                                   const PhysicalConstants& constants)
{
    return FieldEvaluator(src, rule, constants).jefimenko(obs);
}

double relative_residual(const FieldDecomposition& a, const FieldDecomposition& b)
{
    const double scale = std::max({norm(a.total), norm(b.total), 1e-30});
    return norm(a.total - b.total) / scale;
}

double representation_residual(const SourceModel& src, const ObservationPoint& obs, const QuadratureRule& rule,
                                const PhysicalConstants& constants)
{
    const FieldEvaluator eval(src, rule, constants);
    return relative_residual(eval.budko(obs), eval.jefimenko(obs));
}

// ---------------------------------------------------------------------------
// Point dipole

double envelope_integral(const SourceModel& src)
{
    const SpatialEnvelope& env = src.envelope;
    const double s = env.sigma();
    const bool plain = env.kind() == EnvelopeKind::Gaussian;

    if (src.domain.kind() == DomainKind::Ball && norm(src.domain.center() - env.center()) == 0.0) {
        const double radius = std::min(src.domain.radius(), plain ? src.domain.radius() : env.cut_radius());
        const double a = radius / s;
        return std::pow(2.0 * std::numbers::pi, 1.5) * s * s * s *
               (std::erf(a / std::numbers::sqrt2) - std::sqrt(2.0 / std::numbers::pi) * a * std::exp(-0.5 * a * a));
    }
    if (src.domain.kind() == DomainKind::Box && plain) {
        double prod = 1.0;
        for (int i = 0; i < 3; ++i) {
            const double k = 1.0 / (s * std::numbers::sqrt2);
            prod *= s * std::sqrt(0.5 * std::numbers::pi) *
                    (std::erf((src.domain.hi()[i] - env.center()[i]) * k) -
                     std::erf((src.domain.lo()[i] - env.center()[i]) * k));
        }
        return prod;
    }
    const QuadratureRule rule = build_rule(src.domain, 48);
    return integrate_vector([&](const Vec3& p) { return Vec3{env.value(p), 0.0, 0.0}; }, rule).x;
}

DipoleMoment DipoleMoment::from_source(const SourceModel& src)
{
    return {src.profile, src.polarization, src.amplitude * envelope_integral(src)};
}

FieldDecomposition dipole_oracle_field(const DipoleMoment& dipole, const Vec3& x0, const ObservationPoint& obs,
                                       const PhysicalConstants& constants)
{
    const Vec3 d = obs.x - x0;
    const double r = norm(d);
    if (!(r > 0.0))
        throw DomainError("dipole field requested at the dipole position");
    const Vec3 n = d / r;
    const double c = constants.c;
    const TimeProfile::Sample s = dipole.profile.sample(obs.t - r / c);

    const Vec3& u = dipole.direction;
    const double nu = dot(n, u);
    const Vec3 longitudinal = n * (3.0 * nu) - u;  // 3 n (n.u) - u
    const Vec3 transverse = n * nu - u;            // n (n.u) - u
    const double k = constants.inv_4pi_eps0 * dipole.scale;

    FieldDecomposition out;
    out.representation = Representation::Dipole;
    out.terms[0] = longitudinal * (k * s.primitive / (r * r * r));
    out.terms[1] = longitudinal * (k * s.value / (c * r * r));
    out.terms[2] = transverse * (k * s.derivative / (c * c * r));
    out.finalize();
    return out;
}

}  // namespace retfield
