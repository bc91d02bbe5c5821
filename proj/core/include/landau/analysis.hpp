#pragma once

#include "landau/coefficient_field.hpp"
#include "landau/ensemble.hpp"
#include "landau/integrator.hpp"
#include "landau/kernels.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace landau {

/// W2 between two equal-size 1-D samples via the sorted (monotone) coupling.
[[nodiscard]] double wasserstein2_1d(std::span<double const> xs, std::span<double const> ys);

inline constexpr std::size_t kExactWassersteinCap = 512;

/// Exact W2 between two equal-size empirical measures by optimal assignment.
/// Throws TooLarge beyond kExactWassersteinCap particles.
[[nodiscard]] double wasserstein2_exact(Ensemble const &a, Ensemble const &b);

struct Histogram {
    double lo = 0;
    double hi = 0;
    std::vector<double> density; ///< per bin, normalised by the total sample count
    std::size_t below = 0;       ///< samples < lo
    std::size_t above = 0;       ///< samples >= hi
    std::size_t total = 0;

    [[nodiscard]] double bin_width() const noexcept { return (hi - lo) / static_cast<double>(density.size()); }
    [[nodiscard]] double bin_left(std::size_t k) const noexcept { return lo + bin_width() * static_cast<double>(k); }
    /// Fraction of samples inside [lo, hi).
    [[nodiscard]] double in_range_mass() const noexcept;
};

/// Default bin count and range for equilibrium histograms.
inline constexpr std::size_t kHistogramBins = 80;
inline constexpr double kHistogramLo = -3.0;
inline constexpr double kHistogramHi = 3.0;

[[nodiscard]] Histogram histogram(std::span<double const> samples, std::size_t bins = kHistogramBins,
                                  double lo = kHistogramLo, double hi = kHistogramHi);

/// N(mean, variance) density at x. Throws DomainError for variance <= 0.
[[nodiscard]] double gaussian_density(double mean, double variance, double x);

/// Integral over [lo, hi] of |histogram(x) - density(x)|.
[[nodiscard]] double l1_distance(Histogram const &h, std::function<double(double)> const &density);

/// Coordinate `coord` (0-based) of every particle.
[[nodiscard]] std::vector<double> coordinate(Ensemble const &ens, std::size_t coord);

/// min over particles of min_eig(a(X_i, mu_n)) for one snapshot.
[[nodiscard]] double min_field_eigenvalue(CoefficientField &field, Ensemble const &ens);

/// Per-snapshot min over particles of the smallest eigenvalue of a(X_i, mu_n).
[[nodiscard]] std::vector<double> ellipticity_monitor(KernelSpec const &spec, Trajectory const &trajectory,
                                                      bool exclusion = false, Evaluator evaluator = Evaluator::kAuto);

struct RatePoint {
    double abscissa = 0;
    std::vector<double> replicates; ///< one MSE estimate per replicate

    [[nodiscard]] double mse() const noexcept;
    [[nodiscard]] double standard_error() const noexcept;
};

struct RateSeries {
    std::vector<RatePoint> points;
};

struct RateFit {
    double slope = 0;
    double intercept = 0;
    double ci_low = 0;  ///< 2.5% bootstrap quantile
    double ci_high = 0; ///< 97.5% bootstrap quantile
};

/// Least-squares slope of log(mse) against log(abscissa) with a bootstrap CI
/// that resamples replicates independently at each abscissa.
/// Throws Degenerate for fewer than 4 points or any mse <= 0.
[[nodiscard]] RateFit fit_rate(RateSeries const &series, unsigned bootstrap = 2000, std::uint64_t seed = 20080415);

/// Plain least-squares slope and intercept of y against x.
[[nodiscard]] std::pair<double, double> least_squares(std::span<double const> x, std::span<double const> y);

/// True when consecutive estimates never rise by more than their joint
/// confidence bands allow: mse[k+1] - z se[k+1] <= mse[k] + z se[k].
[[nodiscard]] bool monotone_nonincreasing_within_ci(RateSeries const &series, double z = 1.96);

struct SampleSummary {
    double mean = 0;
    double std_error = 0;
};

/// Mean and standard error of the mean.
[[nodiscard]] SampleSummary summarize(std::span<double const> values);

} // namespace landau
