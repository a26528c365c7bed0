#pragma once

#include "retfield/geometry.hpp"

#include <random>

namespace testutil {

inline retfield::Vec3 random_vec(std::mt19937_64& rng, double lo, double hi)
{
    std::uniform_real_distribution<double> u(lo, hi);
    return {u(rng), u(rng), u(rng)};
}

inline retfield::Vec3 random_unit(std::mt19937_64& rng)
{
    std::normal_distribution<double> n;
    const retfield::Vec3 v{n(rng), n(rng), n(rng)};
    return v / retfield::norm(v);
}

inline double frob(const retfield::Mat3& m)
{
    double s = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            s += m(i, j) * m(i, j);
    return std::sqrt(s);
}

}  // namespace testutil
