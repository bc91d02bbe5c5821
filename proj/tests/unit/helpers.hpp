#pragma once

#include "landau/spd.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace test {

inline landau::SymMatrix rows2(double a, double b, double c)
{
    landau::SymMatrix m(2);
    m.set(0, 0, a);
    m.set(0, 1, b);
    m.set(1, 1, c);
    return m;
}

inline landau::SymMatrix diag(std::vector<double> const &d)
{
    return landau::SymMatrix::diagonal(d);
}

inline double max_abs_diff(landau::SymMatrix const &a, landau::SymMatrix const &b)
{
    double m = 0;
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j)
            m = std::max(m, std::abs(a(i, j) - b(i, j)));
    return m;
}

/// G G^* with G d x k standard normal.
inline landau::SymMatrix random_gram(std::mt19937_64 &rng, std::size_t d, std::size_t k)
{
    std::normal_distribution<double> normal;
    std::vector<double> g(d * k);
    for (auto &v : g)
        v = normal(rng);
    landau::SymMatrix a(d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i; j < d; ++j) {
            double s = 0;
            for (std::size_t c = 0; c < k; ++c)
                s += g[i * k + c] * g[j * k + c];
            a.set(i, j, s);
        }
    return a;
}

inline landau::SymMatrix random_symmetric(std::mt19937_64 &rng, std::size_t d)
{
    std::normal_distribution<double> normal;
    landau::SymMatrix a(d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i; j < d; ++j)
            a.set(i, j, normal(rng));
    return a;
}

} // namespace test
