#pragma once

// Plain-data interface between the dispatcher and the per-ISA kernels. The
// AVX2 translation unit is compiled with -mavx2 -mfma and includes nothing
// but this header and <immintrin.h>, so no inline library code is emitted
// with wider instructions than the host may support.

#include <cstddef>

namespace retfield::kernels::abi {

enum PulseCode : int { kSineSquared = 0, kDifferentiatedGaussian = 1 };

struct Nodes {
    const double* x;
    const double* y;
    const double* z;
    const double* wg;
    const double* whx;
    const double* why;
    const double* whz;
    std::size_t count;
    std::size_t padded;
};

struct Pulse {
    int kind;
    double t_on;
    double tau;
};

struct Probe {
    double x, y, z;
    double t;
    double inv_c;
    double px, py, pz;
};

struct Budko {
    double near[3];
    double intermediate[3];
    double far[3];
};

struct Jefimenko {
    double current;
    double charge[3];
};

void budko_scalar(const Nodes& nodes, const Pulse& pulse, const Probe& probe, Budko& out);
void jefimenko_scalar(const Nodes& nodes, const Pulse& pulse, const Probe& probe, Jefimenko& out);

#if defined(RETFIELD_HAVE_AVX2)
void budko_avx2(const Nodes& nodes, const Pulse& pulse, const Probe& probe, Budko& out);
void jefimenko_avx2(const Nodes& nodes, const Pulse& pulse, const Probe& probe, Jefimenko& out);
#endif

}  // namespace retfield::kernels::abi
