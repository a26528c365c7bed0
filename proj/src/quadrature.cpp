#include "retfield/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <numbers>

namespace retfield {

GaussRule1D gauss_jacobi(int n, double alpha, double beta)
{
    if (n < 1)
        throw std::invalid_argument("Gauss rule needs at least one node");
    if (!(alpha > -1.0) || !(beta > -1.0))
        throw std::invalid_argument("Jacobi exponents must exceed -1");

    // Symmetric tridiagonal Jacobi matrix of the three-term recurrence.
    Eigen::VectorXd diag(n);
    Eigen::VectorXd off(std::max(n - 1, 1));
    const double ab = alpha + beta;
    for (int k = 0; k < n; ++k) {
        const double s = 2.0 * k + ab;
        diag(k) = (k == 0) ? (beta - alpha) / (ab + 2.0) : (beta * beta - alpha * alpha) / (s * (s + 2.0));
    }
    for (int k = 1; k < n; ++k) {
        const double s = 2.0 * k + ab;
        const double num = 4.0 * k * (k + alpha) * (k + beta) * (k + ab);
        const double den = s * s * (s + 1.0) * (s - 1.0);
        off(k - 1) = std::sqrt(num / den);
    }

    // Total mass of the weight function.
    const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(alpha + 1.0) + std::lgamma(beta + 1.0) -
                                std::lgamma(ab + 2.0));

    GaussRule1D rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    if (n == 1) {
        rule.nodes[0] = diag(0);
        rule.weights[0] = mu0;
        return rule;
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, off.head(n - 1), Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success)
        throw QuadratureError("Golub-Welsch eigen-decomposition failed");
    for (int k = 0; k < n; ++k) {
        rule.nodes[k] = solver.eigenvalues()(k);
        const double v0 = solver.eigenvectors()(0, k);
        rule.weights[k] = mu0 * v0 * v0;
    }
    return rule;
}

GaussRule1D gauss_legendre(int n)
{
    GaussRule1D rule = gauss_jacobi(n, 0.0, 0.0);
    // Enforce the exact reflection symmetry of the Legendre rule.
    for (int k = 0; k < n / 2; ++k) {
        const int m = n - 1 - k;
        const double x = 0.5 * (rule.nodes[m] - rule.nodes[k]);
        const double w = 0.5 * (rule.weights[m] + rule.weights[k]);
        rule.nodes[k] = -x;
        rule.nodes[m] = x;
        rule.weights[k] = rule.weights[m] = w;
    }
    if (n % 2 == 1)
        rule.nodes[n / 2] = 0.0;
    return rule;
}

namespace {

QuadratureRule build_box(const Domain& domain, int order)
{
    const GaussRule1D gl = gauss_legendre(order);
    const Vec3 half = (domain.hi() - domain.lo()) * 0.5;
    const Vec3 mid = (domain.hi() + domain.lo()) * 0.5;

    QuadratureRule rule;
    rule.order = order;
    rule.domain = domain;
    rule.nodes.reserve(static_cast<std::size_t>(order) * order * order);
    rule.weights.reserve(rule.nodes.capacity());
    const double jac = half.x * half.y * half.z;
    for (int i = 0; i < order; ++i)
        for (int j = 0; j < order; ++j)
            for (int k = 0; k < order; ++k) {
                rule.nodes.push_back({mid.x + half.x * gl.nodes[i], mid.y + half.y * gl.nodes[j],
                                      mid.z + half.z * gl.nodes[k]});
                rule.weights.push_back(jac * gl.weights[i] * gl.weights[j] * gl.weights[k]);
            }
    return rule;
}

QuadratureRule build_ball(const Domain& domain, int order)
{
    const double radius = domain.radius();
    const GaussRule1D radial = gauss_jacobi(order, 0.0, 2.0);  // (1 + x)^2 ~ r^2
    const GaussRule1D polar = gauss_legendre(order);           // in cos(theta)
    const int n_phi = 2 * order;
    const double w_phi = 2.0 * std::numbers::pi / n_phi;
    const double half = 0.5 * radius;
    const double radial_jac = half * half * half;

    QuadratureRule rule;
    rule.order = order;
    rule.domain = domain;
    rule.nodes.reserve(static_cast<std::size_t>(order) * order * n_phi);
    rule.weights.reserve(rule.nodes.capacity());
    for (int i = 0; i < order; ++i) {
        const double r = half * (1.0 + radial.nodes[i]);
        for (int j = 0; j < order; ++j) {
            const double mu = polar.nodes[j];
            const double st = std::sqrt(std::max(0.0, 1.0 - mu * mu));
            for (int k = 0; k < n_phi; ++k) {
                const double phi = (k + 0.5) * w_phi;
                rule.nodes.push_back(domain.center() +
                                     Vec3{r * st * std::cos(phi), r * st * std::sin(phi), r * mu});
                rule.weights.push_back(radial_jac * radial.weights[i] * polar.weights[j] * w_phi);
            }
        }
    }
    return rule;
}

}  // namespace

QuadratureRule build_rule(const Domain& domain, int order)
{
    if (order < 1)
        throw std::invalid_argument("quadrature order must be >= 1");
    return domain.kind() == DomainKind::Box ? build_box(domain, order) : build_ball(domain, order);
}

Vec3 integrate_vector(const std::function<Vec3(const Vec3&)>& fn, const QuadratureRule& rule)
{
    Vec3 sum;
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const Vec3 v = fn(rule.nodes[i]);
        if (!is_finite(v)) {
            const Vec3& p = rule.nodes[i];
            std::ostringstream msg;
            msg << "non-finite integrand at node " << i << " (" << p.x << ", " << p.y << ", " << p.z << ")";
            throw QuadratureError(msg.str());
        }
        sum += v * rule.weights[i];
    }
    return sum;
}

RefinedValue refine_estimate(const std::function<Vec3(const Vec3&)>& fn, const Domain& domain, int base_order,
                             int max_order, double rel_tol)
{
    RefinedValue out;
    out.value = detail::refine_ladder<Vec3>(
        [&](int order) { return integrate_vector(fn, build_rule(domain, order)); },
        [](const Vec3& a, const Vec3& b) { return max_abs(a - b); }, [](const Vec3& a) { return max_abs(a); },
        base_order, max_order, rel_tol, out.err_estimate, out.order, &out.err_history);
    return out;
}

}  // namespace retfield
