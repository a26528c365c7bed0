// AVX2/FMA kernels, four nodes per iteration. The pulse factors use
// Cephes-style polynomial sin/cos/exp; agreement with the scalar reference
// is checked in tests/test_kernels.cpp.

#include "kernel_abi.hpp"

#include <immintrin.h>

namespace retfield::kernels::abi {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrtE = 1.64872127070012814685;
constexpr double kClipGaussian = 1.26641655490941757231e-14;  // exp(-32)

inline __m256d splat(double v) { return _mm256_set1_pd(v); }

inline __m256d poly(__m256d z, double c0, double c1, double c2, double c3, double c4, double c5)
{
    __m256d p = splat(c0);
    p = _mm256_fmadd_pd(p, z, splat(c1));
    p = _mm256_fmadd_pd(p, z, splat(c2));
    p = _mm256_fmadd_pd(p, z, splat(c3));
    p = _mm256_fmadd_pd(p, z, splat(c4));
    return _mm256_fmadd_pd(p, z, splat(c5));
}

// sin and cos of x for |x| well below 2^20.
inline void sincos_pd(__m256d x, __m256d& s, __m256d& c)
{
    const __m256d j = _mm256_round_pd(_mm256_mul_pd(x, splat(2.0 / kPi)), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    // Cody-Waite reduction with a two-part pi/2.
    __m256d r = _mm256_fnmadd_pd(j, splat(1.57079632673412561417e+00), x);
    r = _mm256_fnmadd_pd(j, splat(6.07710050650619224932e-11), r);
    const __m256d z = _mm256_mul_pd(r, r);

    const __m256d ps = poly(z, 1.58962301576546568060e-10, -2.50507477628578072866e-8, 2.75573136213857245213e-6,
                            -1.98412698295895385996e-4, 8.33333333332211858878e-3, -1.66666666666666307295e-1);
    const __m256d sr = _mm256_fmadd_pd(_mm256_mul_pd(r, z), ps, r);
    const __m256d pc = poly(z, -1.13585365213876817300e-11, 2.08757008419747316778e-9, -2.75573141792967388112e-7,
                            2.48015872888517045348e-5, -1.38888888888730564116e-3, 4.16666666666665929218e-2);
    const __m256d cr = _mm256_fmadd_pd(_mm256_mul_pd(z, z), pc, _mm256_fnmadd_pd(splat(0.5), z, splat(1.0)));

    // Quadrant q = j mod 4: sin = {s, c, -s, -c}[q], cos = {c, -s, -c, s}[q].
    const __m256d q = _mm256_sub_pd(j, _mm256_mul_pd(splat(4.0), _mm256_floor_pd(_mm256_mul_pd(j, splat(0.25)))));
    const __m256d odd = _mm256_cmp_pd(_mm256_sub_pd(q, _mm256_mul_pd(splat(2.0), _mm256_floor_pd(_mm256_mul_pd(q, splat(0.5))))),
                                      splat(1.0), _CMP_EQ_OQ);
    const __m256d sin_neg = _mm256_cmp_pd(q, splat(2.0), _CMP_GE_OQ);
    const __m256d cos_neg = _mm256_or_pd(_mm256_cmp_pd(q, splat(1.0), _CMP_EQ_OQ), _mm256_cmp_pd(q, splat(2.0), _CMP_EQ_OQ));
    const __m256d sign_bit = splat(-0.0);

    const __m256d s_abs = _mm256_blendv_pd(sr, cr, odd);
    const __m256d c_abs = _mm256_blendv_pd(cr, sr, odd);
    s = _mm256_xor_pd(s_abs, _mm256_and_pd(sin_neg, sign_bit));
    c = _mm256_xor_pd(c_abs, _mm256_and_pd(cos_neg, sign_bit));
}

// exp(x) for x in [-700, 700].
inline __m256d exp_pd(__m256d x)
{
    const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, splat(1.4426950408889634073599)),
                                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(n, splat(6.93145751953125e-1), x);
    r = _mm256_fnmadd_pd(n, splat(1.42860682030941723212e-6), r);
    const __m256d rr = _mm256_mul_pd(r, r);

    __m256d p = _mm256_fmadd_pd(splat(1.26177193074810590878e-4), rr, splat(3.02994407707441961300e-2));
    p = _mm256_mul_pd(_mm256_fmadd_pd(p, rr, splat(9.99999999999999999910e-1)), r);
    __m256d qv = _mm256_fmadd_pd(splat(3.00198505138664455042e-6), rr, splat(2.52448340349684104192e-3));
    qv = _mm256_fmadd_pd(qv, rr, splat(2.27265548208155028766e-1));
    qv = _mm256_fmadd_pd(qv, rr, splat(2.00000000000000000009e0));
    const __m256d e = _mm256_fmadd_pd(splat(2.0), _mm256_div_pd(p, _mm256_sub_pd(qv, p)), splat(1.0));

    // 2^n: the 1.5 * 2^52 shift leaves n + 1023 in the low mantissa bits.
    const __m256d biased = _mm256_add_pd(n, splat(1023.0 + 6755399441055744.0));
    const __m256d scale = _mm256_castsi256_pd(_mm256_slli_epi64(_mm256_castpd_si256(biased), 52));
    return _mm256_mul_pd(e, scale);
}

struct PulseLanes {
    __m256d value, derivative, primitive;
};

inline PulseLanes pulse_pd(const Pulse& pulse, __m256d t_ret)
{
    const __m256d zero = _mm256_setzero_pd();
    const __m256d tau = splat(pulse.tau);
    const __m256d s = _mm256_sub_pd(t_ret, splat(pulse.t_on));
    const __m256d inside = _mm256_and_pd(_mm256_cmp_pd(s, zero, _CMP_GT_OQ), _mm256_cmp_pd(s, tau, _CMP_LT_OQ));
    const __m256d sc = _mm256_min_pd(_mm256_max_pd(s, zero), tau);

    PulseLanes out;
    if (pulse.kind == kSineSquared) {
        __m256d sn, cs;
        sincos_pd(_mm256_mul_pd(sc, splat(kPi / pulse.tau)), sn, cs);
        const __m256d sin2 = _mm256_mul_pd(splat(2.0), _mm256_mul_pd(sn, cs));
        out.value = _mm256_and_pd(inside, _mm256_mul_pd(sn, sn));
        out.derivative = _mm256_and_pd(inside, _mm256_mul_pd(splat(kPi / pulse.tau), sin2));
        const __m256d prim = _mm256_fnmadd_pd(splat(pulse.tau / (4.0 * kPi)), sin2, _mm256_mul_pd(splat(0.5), s));
        const __m256d after = _mm256_cmp_pd(s, tau, _CMP_GE_OQ);
        out.primitive = _mm256_or_pd(_mm256_and_pd(inside, prim), _mm256_and_pd(after, splat(0.5 * pulse.tau)));
        return out;
    }

    const double w = pulse.tau / 16.0;
    const __m256d u = _mm256_mul_pd(_mm256_sub_pd(sc, splat(0.5 * pulse.tau)), splat(1.0 / w));
    const __m256d uu = _mm256_mul_pd(u, u);
    const __m256d g = exp_pd(_mm256_mul_pd(splat(-0.5), uu));
    out.value = _mm256_and_pd(inside, _mm256_mul_pd(splat(-kSqrtE), _mm256_mul_pd(u, g)));
    out.derivative =
        _mm256_and_pd(inside, _mm256_mul_pd(splat(-kSqrtE / w), _mm256_mul_pd(_mm256_sub_pd(splat(1.0), uu), g)));
    out.primitive = _mm256_and_pd(inside, _mm256_mul_pd(splat(kSqrtE * w), _mm256_sub_pd(g, splat(kClipGaussian))));
    return out;
}

inline double hsum(__m256d v)
{
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d pair = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

}  // namespace

void budko_avx2(const Nodes& nodes, const Pulse& pulse, const Probe& probe, Budko& out)
{
    const __m256d ox = splat(probe.x), oy = splat(probe.y), oz = splat(probe.z);
    const __m256d t = splat(probe.t), inv_c = splat(probe.inv_c);
    const __m256d px = splat(probe.px), py = splat(probe.py), pz = splat(probe.pz);
    const __m256d three = splat(3.0), one = splat(1.0);

    __m256d nx = _mm256_setzero_pd(), ny = nx, nz = nx;
    __m256d ix = nx, iy = nx, iz = nx;
    __m256d fx = nx, fy = nx, fz = nx;

    for (std::size_t i = 0; i < nodes.padded; i += 4) {
        const __m256d dx = _mm256_sub_pd(ox, _mm256_loadu_pd(nodes.x + i));
        const __m256d dy = _mm256_sub_pd(oy, _mm256_loadu_pd(nodes.y + i));
        const __m256d dz = _mm256_sub_pd(oz, _mm256_loadu_pd(nodes.z + i));
        const __m256d r = _mm256_sqrt_pd(_mm256_fmadd_pd(dz, dz, _mm256_fmadd_pd(dy, dy, _mm256_mul_pd(dx, dx))));
        const __m256d inv_r = _mm256_div_pd(one, r);
        const PulseLanes f = pulse_pd(pulse, _mm256_fnmadd_pd(r, inv_c, t));

        const __m256d tx = _mm256_mul_pd(dx, inv_r), ty = _mm256_mul_pd(dy, inv_r), tz = _mm256_mul_pd(dz, inv_r);
        const __m256d tp = _mm256_fmadd_pd(tz, pz, _mm256_fmadd_pd(ty, py, _mm256_mul_pd(tx, px)));
        const __m256d tp3 = _mm256_mul_pd(three, tp);
        const __m256d lx = _mm256_fnmadd_pd(tp3, tx, px), ly = _mm256_fnmadd_pd(tp3, ty, py),
                      lz = _mm256_fnmadd_pd(tp3, tz, pz);
        const __m256d qx = _mm256_fmsub_pd(tx, tp, px), qy = _mm256_fmsub_pd(ty, tp, py),
                      qz = _mm256_fmsub_pd(tz, tp, pz);

        const __m256d wr = _mm256_mul_pd(_mm256_loadu_pd(nodes.wg + i), inv_r);
        const __m256d a = _mm256_mul_pd(_mm256_mul_pd(wr, _mm256_mul_pd(inv_r, inv_r)), f.primitive);
        const __m256d b = _mm256_mul_pd(_mm256_mul_pd(wr, inv_r), f.value);
        const __m256d c = _mm256_mul_pd(wr, f.derivative);

        nx = _mm256_fmadd_pd(a, lx, nx); ny = _mm256_fmadd_pd(a, ly, ny); nz = _mm256_fmadd_pd(a, lz, nz);
        ix = _mm256_fmadd_pd(b, lx, ix); iy = _mm256_fmadd_pd(b, ly, iy); iz = _mm256_fmadd_pd(b, lz, iz);
        fx = _mm256_fmadd_pd(c, qx, fx); fy = _mm256_fmadd_pd(c, qy, fy); fz = _mm256_fmadd_pd(c, qz, fz);
    }

    out = Budko{{hsum(nx), hsum(ny), hsum(nz)}, {hsum(ix), hsum(iy), hsum(iz)}, {hsum(fx), hsum(fy), hsum(fz)}};
}

void jefimenko_avx2(const Nodes& nodes, const Pulse& pulse, const Probe& probe, Jefimenko& out)
{
    const __m256d ox = splat(probe.x), oy = splat(probe.y), oz = splat(probe.z);
    const __m256d t = splat(probe.t), inv_c = splat(probe.inv_c);
    const __m256d one = splat(1.0);

    __m256d cur = _mm256_setzero_pd(), qx = cur, qy = cur, qz = cur;

    for (std::size_t i = 0; i < nodes.padded; i += 4) {
        const __m256d dx = _mm256_sub_pd(ox, _mm256_loadu_pd(nodes.x + i));
        const __m256d dy = _mm256_sub_pd(oy, _mm256_loadu_pd(nodes.y + i));
        const __m256d dz = _mm256_sub_pd(oz, _mm256_loadu_pd(nodes.z + i));
        const __m256d r = _mm256_sqrt_pd(_mm256_fmadd_pd(dz, dz, _mm256_fmadd_pd(dy, dy, _mm256_mul_pd(dx, dx))));
        const __m256d inv_r = _mm256_div_pd(one, r);
        const PulseLanes f = pulse_pd(pulse, _mm256_fnmadd_pd(r, inv_c, t));

        cur = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(nodes.wg + i), inv_r), f.derivative, cur);
        const __m256d q = _mm256_mul_pd(inv_r, f.primitive);
        qx = _mm256_fmadd_pd(_mm256_loadu_pd(nodes.whx + i), q, qx);
        qy = _mm256_fmadd_pd(_mm256_loadu_pd(nodes.why + i), q, qy);
        qz = _mm256_fmadd_pd(_mm256_loadu_pd(nodes.whz + i), q, qz);
    }

    out = Jefimenko{hsum(cur), {hsum(qx), hsum(qy), hsum(qz)}};
}

}  // namespace retfield::kernels::abi
