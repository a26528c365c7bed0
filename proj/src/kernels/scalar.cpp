// Reference kernels. One node at a time, pulse factors from TimeProfile.

#include "kernel_abi.hpp"

#include "retfield/sources.hpp"

#include <cmath>

namespace retfield::kernels::abi {

namespace {

TimeProfile make_profile(const Pulse& pulse)
{
    return pulse.kind == kSineSquared ? TimeProfile::sine_squared(pulse.t_on, pulse.tau)
                                      : TimeProfile::differentiated_gaussian(pulse.t_on, pulse.tau);
}

}  // namespace

void budko_scalar(const Nodes& nodes, const Pulse& pulse, const Probe& probe, Budko& out)
{
    const TimeProfile profile = make_profile(pulse);
    double nx = 0, ny = 0, nz = 0, ix = 0, iy = 0, iz = 0, fx = 0, fy = 0, fz = 0;

    for (std::size_t i = 0; i < nodes.count; ++i) {
        const double dx = probe.x - nodes.x[i];
        const double dy = probe.y - nodes.y[i];
        const double dz = probe.z - nodes.z[i];
        const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
        const double inv_r = 1.0 / r;
        const TimeProfile::Sample s = profile.sample(probe.t - r * probe.inv_c);

        const double tx = dx * inv_r, ty = dy * inv_r, tz = dz * inv_r;
        const double tp = tx * probe.px + ty * probe.py + tz * probe.pz;
        // p - 3 theta (theta.p) and theta (theta.p) - p
        const double lx = probe.px - 3.0 * tp * tx, ly = probe.py - 3.0 * tp * ty, lz = probe.pz - 3.0 * tp * tz;
        const double px = tx * tp - probe.px, py = ty * tp - probe.py, pz = tz * tp - probe.pz;

        const double wr = nodes.wg[i] * inv_r;
        const double a = wr * inv_r * inv_r * s.primitive;
        const double b = wr * inv_r * s.value;
        const double c = wr * s.derivative;
        nx += a * lx; ny += a * ly; nz += a * lz;
        ix += b * lx; iy += b * ly; iz += b * lz;
        fx += c * px; fy += c * py; fz += c * pz;
    }
    out = Budko{{nx, ny, nz}, {ix, iy, iz}, {fx, fy, fz}};
}

void jefimenko_scalar(const Nodes& nodes, const Pulse& pulse, const Probe& probe, Jefimenko& out)
{
    const TimeProfile profile = make_profile(pulse);
    double cur = 0, qx = 0, qy = 0, qz = 0;

    for (std::size_t i = 0; i < nodes.count; ++i) {
        const double dx = probe.x - nodes.x[i];
        const double dy = probe.y - nodes.y[i];
        const double dz = probe.z - nodes.z[i];
        const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
        const double inv_r = 1.0 / r;
        const TimeProfile::Sample s = profile.sample(probe.t - r * probe.inv_c);

        cur += nodes.wg[i] * inv_r * s.derivative;
        const double q = inv_r * s.primitive;
        qx += nodes.whx[i] * q;
        qy += nodes.why[i] * q;
        qz += nodes.whz[i] * q;
    }
    out = Jefimenko{cur, {qx, qy, qz}};
}

}  // namespace retfield::kernels::abi
