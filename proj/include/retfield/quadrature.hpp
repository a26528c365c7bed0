#pragma once

#include "retfield/geometry.hpp"
#include "retfield/sources.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace retfield {

/// Non-finite integrand values or a stalled refinement ladder.
class QuadratureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One-dimensional Gauss rule on [-1, 1].
struct GaussRule1D {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1].
GaussRule1D gauss_legendre(int n);

/// n-point Gauss-Jacobi rule on [-1, 1] for the weight (1 - x)^alpha (1 + x)^beta,
/// via the Golub-Welsch eigenvalue problem.
GaussRule1D gauss_jacobi(int n, double alpha, double beta);

/// Tensor-product rule over a source domain. Box: Gauss-Legendre on each
/// axis (order^3 nodes). Ball: radial Gauss-Jacobi with r^2 weight, polar
/// Gauss-Legendre in cos(theta) and a 2*order-point azimuthal trapezoid.
struct QuadratureRule {
    std::vector<Vec3> nodes;
    std::vector<double> weights;
    int order = 0;
    Domain domain = Domain::box({0, 0, 0}, {1, 1, 1});

    std::size_t size() const { return nodes.size(); }
};

QuadratureRule build_rule(const Domain& domain, int order);

/// Sum of w_i fn(node_i). fn must be pure.
Vec3 integrate_vector(const std::function<Vec3(const Vec3&)>& fn, const QuadratureRule& rule);

struct RefinedValue {
    Vec3 value;
    double err_estimate = 0.0;  ///< max-norm difference of the last two orders
    int order = 0;              ///< order of the returned value
    std::vector<double> err_history;
};

/// Integrates at orders base, base + 2, ... up to max_order. Stops early once
/// err_estimate <= rel_tol * |value|_max (rel_tol = 0 runs the full ladder).
/// Throws QuadratureError if the estimate fails to decrease over three
/// consecutive refinements while still above tolerance.
RefinedValue refine_estimate(const std::function<Vec3(const Vec3&)>& fn, const Domain& domain, int base_order,
                             int max_order, double rel_tol = 0.0);

namespace detail {

/// Shared refinement ladder. `evaluate(order)` returns a value; `distance(a, b)`
/// the max-norm difference; `magnitude(a)` the max norm. Tolerances are taken
/// relative to max(magnitude, magnitude_floor).
template <class Value, class Evaluate, class Distance, class Magnitude>
Value refine_ladder(Evaluate&& evaluate, Distance&& distance, Magnitude&& magnitude, int base_order,
                    int max_order, double rel_tol, double& err_estimate, int& final_order,
                    std::vector<double>* history = nullptr, double magnitude_floor = 0.0)
{
    if (base_order < 1)
        throw std::invalid_argument("quadrature order must be >= 1");
    if (!(base_order < max_order))
        throw std::invalid_argument("refinement needs base_order < max_order");

    Value previous = evaluate(base_order);
    Value current = previous;
    err_estimate = std::numeric_limits<double>::infinity();
    final_order = base_order;
    int stalled = 0;
    double last_err = std::numeric_limits<double>::infinity();

    for (int order = base_order + 2; order <= max_order; order += 2) {
        current = evaluate(order);
        const double err = distance(current, previous);
        const double scale = std::max(magnitude(current), magnitude_floor);
        err_estimate = err;
        final_order = order;
        if (history)
            history->push_back(err);
        if (rel_tol > 0.0 && err <= rel_tol * scale)
            return current;
        // Differences at the rounding level of the value never count as stalls.
        const double noise = 64.0 * std::numeric_limits<double>::epsilon() * scale;
        if (err >= last_err && err > noise) {
            if (++stalled >= 3) {
                std::ostringstream msg;
                msg << "quadrature refinement not converging at order " << order << " (error estimate " << err
                    << ")";
                throw QuadratureError(msg.str());
            }
        } else {
            stalled = 0;
        }
        last_err = err;
        previous = current;
    }
    return current;
}

}  // namespace detail

}  // namespace retfield
