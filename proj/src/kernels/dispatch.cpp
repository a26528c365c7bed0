#include "retfield/kernels.hpp"

#include "kernel_abi.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace retfield::kernels {

namespace {

abi::Nodes view(const NodeArrays& n)
{
    return {n.x.data(), n.y.data(), n.z.data(), n.wg.data(), n.whx.data(), n.why.data(), n.whz.data(), n.count,
            n.padded()};
}

abi::Pulse view(const TimeProfile& p)
{
    return {p.kind() == PulseKind::SineSquared ? abi::kSineSquared : abi::kDifferentiatedGaussian, p.t_on(), p.tau()};
}

abi::Probe view(const Probe& p)
{
    return {p.x.x, p.x.y, p.x.z, p.t, p.inv_c, p.polarization.x, p.polarization.y, p.polarization.z};
}

bool cpu_has_avx2()
{
#if defined(RETFIELD_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

void require(Backend backend)
{
    if (!backend_available(backend))
        throw std::runtime_error(std::string("SIMD backend not available on this host: ") +
                                 std::string(backend_name(backend)));
}

}  // namespace

std::string_view backend_name(Backend backend)
{
    switch (backend) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
    }
    return "?";
}

bool backend_available(Backend backend)
{
    if (backend == Backend::Scalar)
        return true;
    static const bool avx2 = cpu_has_avx2();
    return avx2;
}

Backend default_backend()
{
    static const Backend chosen = [] {
        if (const char* env = std::getenv("RETFIELD_SIMD")) {
            const std::string want(env);
            if (want == "scalar")
                return Backend::Scalar;
            if (want == "avx2" && backend_available(Backend::Avx2))
                return Backend::Avx2;
        }
        return backend_available(Backend::Avx2) ? Backend::Avx2 : Backend::Scalar;
    }();
    return chosen;
}

BudkoSums budko_sums(Backend backend, const NodeArrays& nodes, const TimeProfile& pulse, const Probe& probe)
{
    require(backend);
    abi::Budko raw{};
    switch (backend) {
    case Backend::Scalar: abi::budko_scalar(view(nodes), view(pulse), view(probe), raw); break;
    case Backend::Avx2:
#if defined(RETFIELD_HAVE_AVX2)
        abi::budko_avx2(view(nodes), view(pulse), view(probe), raw);
#endif
        break;
    }
    return {{raw.near[0], raw.near[1], raw.near[2]},
            {raw.intermediate[0], raw.intermediate[1], raw.intermediate[2]},
            {raw.far[0], raw.far[1], raw.far[2]}};
}

JefimenkoSums jefimenko_sums(Backend backend, const NodeArrays& nodes, const TimeProfile& pulse, const Probe& probe)
{
    require(backend);
    abi::Jefimenko raw{};
    switch (backend) {
    case Backend::Scalar: abi::jefimenko_scalar(view(nodes), view(pulse), view(probe), raw); break;
    case Backend::Avx2:
#if defined(RETFIELD_HAVE_AVX2)
        abi::jefimenko_avx2(view(nodes), view(pulse), view(probe), raw);
#endif
        break;
    }
    return {raw.current, {raw.charge[0], raw.charge[1], raw.charge[2]}};
}

double retarded_current_sum(const NodeArrays& nodes, const TimeProfile& pulse, const Probe& probe)
{
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.count; ++i) {
        const Vec3 d = probe.x - Vec3{nodes.x[i], nodes.y[i], nodes.z[i]};
        const double r = norm(d);
        sum += nodes.wg[i] / r * pulse.value(probe.t - r * probe.inv_c);
    }
    return sum;
}

}  // namespace retfield::kernels
