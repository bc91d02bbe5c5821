#pragma once

// Euler-Maruyama particle scheme with coefficients frozen at the left grid
// point:
//
//     X_i' = X_i + sigma(X_i, mu_n) dB_i + b(X_i, mu_n) dt,
//
// where mu_n is the previous-step empirical measure (optionally without
// particle i) and sigma sigma^* = a.

#include "landau/coefficient_field.hpp"
#include "landau/ensemble.hpp"
#include "landau/kernels.hpp"
#include "landau/maxwell_oracle.hpp"
#include "landau/noise.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace landau {

enum class SqrtMethod {
    kSymSqrt,
    kCholesky,
};

struct SimConfig {
    KernelSpec kernel;
    InitialLaw law = InitialLaw::paper_sec5();
    std::size_t n = 1000;
    std::uint32_t steps_per_unit = 200; ///< N
    double horizon = 1.0;               ///< T, a multiple of 1/N
    std::uint64_t seed = 1;
    std::uint32_t replicates = 1;
    std::optional<bool> exclusion;      ///< unset: on for Soft, off otherwise
    SqrtMethod sqrt_method = SqrtMethod::kCholesky;
    Evaluator evaluator = Evaluator::kAuto;
    std::uint32_t stride = 1;           ///< snapshot every `stride` steps
    unsigned workers = 1;
    std::string out_dir;

    [[nodiscard]] bool self_exclusion() const noexcept { return exclusion.value_or(kernel.is_soft()); }
    [[nodiscard]] std::uint32_t total_steps() const;
    [[nodiscard]] double dt() const noexcept { return 1.0 / static_cast<double>(steps_per_unit); }
    /// Throws DomainError on inconsistent settings.
    void validate() const;
};

struct StepOptions {
    SqrtMethod sqrt_method = SqrtMethod::kCholesky;
    unsigned workers = 1;
};

/// sigma xi for the configured square root of a.
void apply_sqrt(PsdMatrix const &a, SqrtMethod method, std::span<double const> xi, std::span<double> out);

/// One scheme step. `noise` holds n x d increments (row-major). The field is
/// bound to `ens` before evaluation. Floor events are added to `floor_events`.
/// Throws NonFinite if any new state is not finite.
[[nodiscard]] Ensemble step(CoefficientField &field, Ensemble const &ens, double dt, std::span<double const> noise,
                            StepOptions const &options = {}, std::uint64_t *floor_events = nullptr);

/// Convenience overload using the empirical field of `spec`.
[[nodiscard]] Ensemble step(KernelSpec const &spec, Ensemble const &ens, double dt, std::span<double const> noise,
                            bool exclusion = false, SqrtMethod method = SqrtMethod::kCholesky);

/// Fills n x d increments for coarse step `step_index` using each particle's key.
void fill_noise(NoisePlan const &plan, Ensemble const &ens, std::uint32_t step_index, std::span<double> out,
                unsigned workers = 1);

struct Snapshot {
    Ensemble state;
    std::uint64_t floor_events = 0; ///< cumulative up to this snapshot
};

struct Trajectory {
    std::vector<Snapshot> snapshots; ///< step 0, every `stride` steps, and the final step
    std::uint64_t floor_events = 0;
    std::uint64_t interactions = 0;  ///< pair evaluations performed by pairwise fields
    double seconds_per_step = 0;
};

/// Runs replicate `replicate` of the particle system from sample_initial.
[[nodiscard]] Trajectory simulate(SimConfig const &config, std::uint32_t replicate = 0);

/// Runs `field` from the configured initial draw with the configured noise.
[[nodiscard]] Trajectory simulate_with_field(SimConfig const &config, CoefficientField &field,
                                             std::uint32_t replicate = 0);

/// n independent copies of the discretized nonlinear Maxwell process sharing
/// the initial draws and Brownian streams of simulate(). Throws NotCentered
/// if the flow is not centered, DomainError for a non-Maxwell kernel.
[[nodiscard]] Trajectory simulate_mckean_reference(SimConfig const &config, MomentFlow const &flow,
                                                   std::uint32_t replicate = 0);

struct CoupledRefinement {
    Trajectory coarse;
    Trajectory fine;                 ///< sampled on the coarse snapshot times
    std::vector<double> sup_gap_sq;  ///< per particle, sup over the coarse grid
};

/// Same particles with N and rN steps per unit time; coarse increments are
/// sums of fine ones. Requires a Lipschitz (Maxwell / pseudo-Maxwell) kernel.
[[nodiscard]] CoupledRefinement coupled_time_refinement(SimConfig const &config, std::uint32_t refinement,
                                                        std::uint32_t replicate = 0);

/// Same construction with caller-supplied fields (one per resolution).
[[nodiscard]] CoupledRefinement coupled_time_refinement(SimConfig const &config, std::uint32_t refinement,
                                                        CoefficientField &coarse_field, CoefficientField &fine_field,
                                                        std::uint32_t replicate = 0);

/// Per-particle sup over the grid of |X_i - Y_i|^2 for two fields driven by
/// the same initial draws and increments.
[[nodiscard]] std::vector<double> coupled_sup_gap(SimConfig const &config, CoefficientField &first,
                                                  CoefficientField &second, std::uint32_t replicate = 0);

/// Particle system against the exact McKean reference: one estimate of
/// E[sup |X^{i,n} - X^i|^2] per replicate (average over particles).
[[nodiscard]] std::vector<double> coupled_particle_vs_reference(SimConfig const &config);

/// Mean over particles of the refinement sup-gap, one value per replicate.
[[nodiscard]] std::vector<double> refinement_gap_estimates(SimConfig const &config, std::uint32_t refinement);

/// N_floor(n) = max(500, 8 sqrt(n)), rounded up so that T N is an integer.
[[nodiscard]] std::uint32_t n_floor_steps(std::size_t n, double horizon);

} // namespace landau
