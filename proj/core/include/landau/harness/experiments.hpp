#pragma once

// Experiment drivers behind the command-line subcommands. Each command writes
// its tables and a manifest.json into the output directory.

#include "landau/analysis.hpp"
#include "landau/harness/config.hpp"
#include "landau/harness/manifest.hpp"
#include "landau/lemmas.hpp"

#include <cstdint>
#include <filesystem>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace landau::harness {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNumeric = 2;
inline constexpr int kExitProperty = 3;

/// Fraction of floored soft-kernel interactions above which a run is flagged.
inline constexpr double kFloorWarnFraction = 1e-3;

/// Moments of one snapshot.
struct MomentRow {
    double t = 0;
    Vec mean;
    SymMatrix m2; ///< about the origin
    double energy = 0;
    double min_field_eig = std::numeric_limits<double>::quiet_NaN();

    [[nodiscard]] SymMatrix covariance() const;
    /// mean_1..d, m2 upper triangle, energy, min_field_eig
    [[nodiscard]] std::vector<double> values() const;
};

/// Column names of moments.csv for dimension d.
[[nodiscard]] std::vector<std::string> moment_columns(std::size_t d);

struct ReplicateResult {
    std::vector<MomentRow> rows;    ///< one per snapshot
    std::vector<Ensemble> kept;     ///< states at the requested keep times, in order
    std::uint64_t floor_events = 0;
    std::uint64_t interactions = 0;
    double seconds_per_step = 0;
};

/// Runs one replicate and reduces every snapshot to moments. Each keep time
/// must be a snapshot time; otherwise DomainError.
[[nodiscard]] ReplicateResult run_replicate(SimConfig const &sim, std::uint32_t replicate, bool monitor,
                                            std::span<double const> keep_times = {});

/// Monitoring default for `run.monitor = auto`.
[[nodiscard]] bool monitor_enabled(RunConfig const &config);

/// Replicate mean and standard error, per snapshot and column.
struct MomentSummary {
    std::vector<double> times;
    std::vector<std::vector<SampleSummary>> cells; ///< [snapshot][column]
};

[[nodiscard]] MomentSummary summarize_moments(std::vector<ReplicateResult> const &runs);

/// Same summary for covariance entries (upper triangle, packed order).
[[nodiscard]] MomentSummary summarize_covariance(std::vector<ReplicateResult> const &runs);

/// Variance of the Gaussian with the law's conserved energy about its mean,
/// spread evenly over the coordinates.
[[nodiscard]] double equilibrium_variance(InitialLaw const &law);

/// MSE of the particle system against the exact reference, one point per n.
[[nodiscard]] RateSeries rate_in_n(RunConfig const &config, std::ostream *log = nullptr);

/// MSE of the refinement sup-gap, one point per N.
[[nodiscard]] RateSeries rate_in_N(RunConfig const &config, std::ostream *log = nullptr);

/// Number of steps per unit time used at particle count n by rate_in_n.
[[nodiscard]] std::uint32_t rate_n_steps(RunConfig const &config, std::size_t n);

struct CommandOutcome {
    int exit_code = kExitOk;
    std::filesystem::path dir;
    RunManifest manifest;
};

[[nodiscard]] CommandOutcome cmd_simulate(RunConfig const &config, std::ostream &log);
[[nodiscard]] CommandOutcome cmd_rate_n(RunConfig const &config, std::ostream &log);
[[nodiscard]] CommandOutcome cmd_rate_N(RunConfig const &config, std::ostream &log);
[[nodiscard]] CommandOutcome cmd_lemmas(RunConfig const &config, std::ostream &log,
                                        SqrtFunction const &sqrt_fn = default_sqrt());
[[nodiscard]] CommandOutcome cmd_hist(RunConfig const &config, std::ostream &log);

} // namespace landau::harness
