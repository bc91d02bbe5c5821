#pragma once

// Closed-form laws for Maxwell molecules (kappa = 1).
//
// For a centered law the second-moment matrix obeys
//     d/dt M = 2 m2 I - 2 d M,
// so M(t) relaxes exponentially to (m2 / d) I while m2 = trace M is conserved,
// and a(x, P_t) = a(x) + m2 I - M(t).

#include "landau/ensemble.hpp"
#include "landau/spd.hpp"

#include <span>

namespace landau {

struct MomentFlow {
    std::size_t dim = 0;
    double energy = 0; ///< m2(P0), conserved
    SymMatrix m0;      ///< m2^{ij}(P0)
    Vec mean0;         ///< must be zero for coefficient use

    /// Uses the exact moments of the law; energy = trace(M0).
    static MomentFlow from_law(InitialLaw const &law);
    static MomentFlow from_second_moments(SymMatrix m0, Vec mean0 = {});
};

/// M(t) = M_inf + (M0 - M_inf) exp(-2 d t), M_inf = (energy / d) I.
[[nodiscard]] SymMatrix covariance_flow(MomentFlow const &flow, double t);

/// lambda0 exp(-2 d t) + lambda1 (1 - exp(-2 d t)) with
/// lambda0 = min_eig(energy I - M0), lambda1 = (d - 1) / d * energy.
[[nodiscard]] double ellipticity_lower_bound(MomentFlow const &flow, double t);

struct McKeanCoefficients {
    PsdMatrix a;
    Vec b;
};

/// Exact coefficients of the nonlinear SDE: (a(x) + energy I - M(t), -(d - 1) x).
/// Throws NotCentered when |mean0| > 1e-12.
[[nodiscard]] McKeanCoefficients mckean_coefficients(MomentFlow const &flow, std::span<double const> x, double t);

} // namespace landau
