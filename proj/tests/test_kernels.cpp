#include "retfield/kernels.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <cstdlib>
#include <limits>

using namespace retfield;
using namespace retfield::kernels;

namespace {

NodeArrays random_nodes(std::mt19937_64& rng, std::size_t n)
{
    NodeArrays a;
    const std::size_t padded = (n + kLanes - 1) / kLanes * kLanes;
    for (auto* v : {&a.x, &a.y, &a.z, &a.wg, &a.whx, &a.why, &a.whz})
        v->assign(padded, 0.0);
    a.count = n;
    std::uniform_real_distribution<double> pos(-2.0, 2.0), w(-1.0, 1.0);
    for (std::size_t i = 0; i < padded; ++i) {
        const std::size_t src = i < n ? i : 0;
        if (i < n) {
            a.x[i] = pos(rng);
            a.y[i] = pos(rng);
            a.z[i] = pos(rng);
            a.wg[i] = w(rng);
            a.whx[i] = w(rng);
            a.why[i] = w(rng);
            a.whz[i] = w(rng);
        } else {
            a.x[i] = a.x[src];
            a.y[i] = a.y[src];
            a.z[i] = a.z[src];
        }
    }
    return a;
}

struct Scales {
    double near = 0, intermediate = 0, far = 0, current = 0, charge = 0;
};

// Rounding scale of each sum: 1e-13 of the sum of absolute contributions,
// plus the change of each contribution under a few-ulp shift of the
// retarded time (the two backends round t - R/c independently).
Scales tolerances(const NodeArrays& a, const TimeProfile& p, const Probe& pr)
{
    Scales s;
    for (std::size_t i = 0; i < a.count; ++i) {
        const Vec3 d = pr.x - Vec3{a.x[i], a.y[i], a.z[i]};
        const double R = norm(d);
        const double tr = pr.t - R * pr.inv_c;
        const double dt = 8.0 * std::numeric_limits<double>::epsilon() * (std::abs(pr.t) + R * pr.inv_c);
        const auto v = p.sample(tr);
        const auto lo = p.sample(tr - dt), hi = p.sample(tr + dt);
        auto spread = [&](auto get) {
            return 1e-13 * std::abs(get(v)) + std::max(std::abs(get(hi) - get(v)), std::abs(get(lo) - get(v)));
        };
        const double F = spread([](const auto& x) { return x.primitive; });
        const double f = spread([](const auto& x) { return x.value; });
        const double fp = spread([](const auto& x) { return x.derivative; });
        const double w = std::abs(a.wg[i]);
        s.near += 3 * w * F / (R * R * R);
        s.intermediate += 3 * w * f / (R * R);
        s.far += 2 * w * fp / R;
        s.current += w * fp / R;
        s.charge += (std::abs(a.whx[i]) + std::abs(a.why[i]) + std::abs(a.whz[i])) * F / R;
    }
    return s;
}

bool close(const Vec3& a, const Vec3& b, double tol) { return max_abs(a - b) <= tol + 1e-300; }

}  // namespace

TEST_CASE("backend names and availability")
{
    CHECK(backend_name(Backend::Scalar) == "scalar");
    CHECK(backend_name(Backend::Avx2) == "avx2");
    CHECK(backend_available(Backend::Scalar));
    CHECK(backend_available(default_backend()));
}

TEST_CASE("AVX2 kernels agree with the scalar reference")
{
    if (!backend_available(Backend::Avx2)) {
        MESSAGE("AVX2 backend not available on this machine; equivalence not exercised");
        return;
    }
    std::mt19937_64 rng(41);
    for (PulseKind kind : {PulseKind::SineSquared, PulseKind::DifferentiatedGaussian}) {
        for (int s = 0; s < 300; ++s) {
            const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 203)(rng);
            const NodeArrays nodes = random_nodes(rng, n);
            const double tau = std::uniform_real_distribution<double>(0.5, 30.0)(rng);
            const double t_on = std::uniform_real_distribution<double>(-5.0, 5.0)(rng);
            const TimeProfile p = kind == PulseKind::SineSquared ? TimeProfile::sine_squared(t_on, tau)
                                                                 : TimeProfile::differentiated_gaussian(t_on, tau);
            Probe pr;
            pr.x = testutil::random_unit(rng) * std::uniform_real_distribution<double>(4.0, 60.0)(rng);
            pr.inv_c = std::uniform_real_distribution<double>(0.5, 2.0)(rng);
            // before, during and after the pulse
            pr.t = t_on + std::uniform_real_distribution<double>(-0.5 * tau, 2.0 * tau)(rng) + norm(pr.x) * pr.inv_c;
            pr.polarization = testutil::random_unit(rng);

            const BudkoSums a = budko_sums(Backend::Scalar, nodes, p, pr);
            const BudkoSums b = budko_sums(Backend::Avx2, nodes, p, pr);
            const JefimenkoSums ja = jefimenko_sums(Backend::Scalar, nodes, p, pr);
            const JefimenkoSums jb = jefimenko_sums(Backend::Avx2, nodes, p, pr);
            const Scales sc = tolerances(nodes, p, pr);

            CHECK(close(a.near, b.near, sc.near));
            CHECK(close(a.intermediate, b.intermediate, sc.intermediate));
            CHECK(close(a.far, b.far, sc.far));
            CHECK(std::abs(ja.current - jb.current) <= sc.current + 1e-300);
            CHECK(close(ja.charge, jb.charge, sc.charge));
        }
    }
}

TEST_CASE("padding lanes carry no weight")
{
    std::mt19937_64 rng(42);
    const NodeArrays nodes = random_nodes(rng, 5);
    NodeArrays shuffled = nodes;
    // scribble over padding coordinates: results must not change
    for (std::size_t i = nodes.count; i < nodes.padded(); ++i) {
        shuffled.x[i] = 1e3;
        shuffled.y[i] = -7.0;
    }
    const TimeProfile p = TimeProfile::sine_squared(0.0, 4.0);
    Probe pr{{10.0, 0.0, 0.0}, 11.5, 1.0, {0.0, 0.0, 1.0}};
    for (Backend b : {Backend::Scalar, Backend::Avx2}) {
        if (!backend_available(b))
            continue;
        const BudkoSums x = budko_sums(b, nodes, p, pr);
        const BudkoSums y = budko_sums(b, shuffled, p, pr);
        CHECK(x.near == y.near);
        CHECK(x.far == y.far);
    }
}

TEST_CASE("sums vanish ahead of the front on every backend")
{
    std::mt19937_64 rng(43);
    const NodeArrays nodes = random_nodes(rng, 37);
    const TimeProfile p = TimeProfile::sine_squared(0.0, 4.0);
    // nearest node is at least |x| - 2 sqrt(3) away
    Probe pr{{30.0, 0.0, 0.0}, 30.0 - 2.0 * std::sqrt(3.0) - 1e-9, 1.0, {0.0, 0.0, 1.0}};
    for (Backend b : {Backend::Scalar, Backend::Avx2}) {
        if (!backend_available(b))
            continue;
        const BudkoSums s = budko_sums(b, nodes, p, pr);
        CHECK(s.near == Vec3{});
        CHECK(s.intermediate == Vec3{});
        CHECK(s.far == Vec3{});
        const JefimenkoSums j = jefimenko_sums(b, nodes, p, pr);
        CHECK(j.current == 0.0);
        CHECK(j.charge == Vec3{});
    }
}
