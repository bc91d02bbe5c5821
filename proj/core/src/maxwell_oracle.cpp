#include "landau/maxwell_oracle.hpp"

#include "landau/errors.hpp"
#include "landau/kernels.hpp"

#include <cmath>

namespace landau {

MomentFlow MomentFlow::from_law(InitialLaw const &law)
{
    return from_second_moments(law.second_moments(), law.mean());
}

MomentFlow MomentFlow::from_second_moments(SymMatrix m0, Vec mean0)
{
    MomentFlow f;
    f.dim = m0.dim();
    f.energy = m0.trace();
    f.mean0 = mean0.empty() ? Vec(f.dim, 0.0) : std::move(mean0);
    f.m0 = std::move(m0);
    if (f.mean0.size() != f.dim)
        throw SizeMismatch("MomentFlow: mean dimension differs from moment matrix dimension");
    return f;
}

SymMatrix covariance_flow(MomentFlow const &flow, double t)
{
    if (!(t >= 0))
        throw DomainError("covariance_flow: t must be >= 0");
    auto const d = flow.dim;
    double const decay = std::exp(-2.0 * static_cast<double>(d) * t);
    double const m_inf = flow.energy / static_cast<double>(d);
    SymMatrix m = flow.m0;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i; j < d; ++j) {
            double const inf = i == j ? m_inf : 0.0;
            m.set(i, j, inf + (flow.m0(i, j) - inf) * decay);
        }
    return m;
}

double ellipticity_lower_bound(MomentFlow const &flow, double t)
{
    if (!(t >= 0))
        throw DomainError("ellipticity_lower_bound: t must be >= 0");
    auto const d = static_cast<double>(flow.dim);
    SymMatrix gap = flow.energy * SymMatrix::identity(flow.dim);
    gap -= flow.m0;
    double const lambda0 = min_eig(gap);
    double const lambda1 = (d - 1) / d * flow.energy;
    double const decay = std::exp(-2 * d * t);
    return lambda0 * decay + lambda1 * (1 - decay);
}

McKeanCoefficients mckean_coefficients(MomentFlow const &flow, std::span<double const> x, double t)
{
    double norm2 = 0;
    for (double m : flow.mean0)
        norm2 += m * m;
    if (std::sqrt(norm2) > 1e-12)
        throw NotCentered("mckean_coefficients: initial law has nonzero mean; center it first");
    if (x.size() != flow.dim)
        throw SizeMismatch("mckean_coefficients: point dimension differs from flow dimension");

    KernelSpec const maxwell{flow.dim, Maxwell{}};
    SymMatrix a = a_field(maxwell, x).matrix();
    a += flow.energy * SymMatrix::identity(flow.dim);
    a -= covariance_flow(flow, t);

    auto const d = flow.dim;
    Vec b(d);
    double const c = -static_cast<double>(d - 1);
    for (std::size_t i = 0; i < d; ++i)
        b[i] = c * x[i];
    return {PsdMatrix(std::move(a)), std::move(b)};
}

} // namespace landau
