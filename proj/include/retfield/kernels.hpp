#pragma once

// Inner quadrature loops of the two field representations. Each loop has a
// scalar reference implementation and an AVX2/FMA implementation; the
// backend is picked at runtime from the host CPU and can be forced with the
// RETFIELD_SIMD environment variable ("scalar" or "avx2").

#include "retfield/geometry.hpp"
#include "retfield/sources.hpp"

#include <cstddef>
#include <string_view>
#include <vector>

namespace retfield::kernels {

inline constexpr std::size_t kLanes = 4;

enum class Backend { Scalar, Avx2 };

std::string_view backend_name(Backend backend);
bool backend_available(Backend backend);
/// Best backend the CPU supports, unless overridden by RETFIELD_SIMD.
Backend default_backend();

/// Structure-of-arrays source samples. The envelope and the polarized
/// envelope Hessian are folded into the quadrature weights:
///   wg[i]  = w_i g(x_i)
///   wh*[i] = w_i (Hg(x_i) p)
/// Arrays are padded to a multiple of kLanes with zero-weight copies of node 0.
struct NodeArrays {
    std::vector<double> x, y, z;
    std::vector<double> wg;
    std::vector<double> whx, why, whz;
    std::size_t count = 0;

    std::size_t padded() const { return x.size(); }
};

/// Observation point plus the data every node shares.
struct Probe {
    Vec3 x;
    double t = 0.0;
    double inv_c = 1.0;
    Vec3 polarization;
};

/// Unscaled sums of the three-term representation:
///   near         = sum wg F(t_R) (p - 3 theta (theta.p)) / R^3
///   intermediate = sum wg f(t_R) (p - 3 theta (theta.p)) / R^2
///   far          = sum wg f'(t_R) (theta (theta.p) - p) / R
struct BudkoSums {
    Vec3 near, intermediate, far;
};

/// Unscaled sums of the charge/current representation:
///   current = sum wg f'(t_R) / R     (multiplies p)
///   charge  = sum wh F(t_R) / R
struct JefimenkoSums {
    double current = 0.0;
    Vec3 charge;
};

BudkoSums budko_sums(Backend backend, const NodeArrays& nodes, const TimeProfile& pulse, const Probe& probe);
JefimenkoSums jefimenko_sums(Backend backend, const NodeArrays& nodes, const TimeProfile& pulse,
                             const Probe& probe);

/// sum wg f(t_R) / R, scalar only. Used by the finite-difference check of the
/// commuted time derivative.
double retarded_current_sum(const NodeArrays& nodes, const TimeProfile& pulse, const Probe& probe);

}  // namespace retfield::kernels
