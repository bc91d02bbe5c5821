#pragma once

#include "landau/kernels.hpp"
#include "landau/spd.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace landau {

/// n particle states in R^d at a common grid time.
class Ensemble {
public:
    Ensemble() = default;
    Ensemble(std::size_t dim, std::size_t count);
    /// Takes row-major states (count x dim).
    Ensemble(std::size_t dim, std::vector<double> states);

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] std::size_t size() const noexcept { return dim_ == 0 ? 0 : states_.size() / dim_; }

    [[nodiscard]] std::span<double const> state(std::size_t i) const noexcept
    {
        return {states_.data() + i * dim_, dim_};
    }
    [[nodiscard]] std::span<double> state(std::size_t i) noexcept { return {states_.data() + i * dim_, dim_}; }
    [[nodiscard]] std::span<double const> states() const noexcept { return states_; }
    [[nodiscard]] std::span<double> states() noexcept { return states_; }

    /// Noise key of particle i; defaults to i. Permuting particles together
    /// with their keys permutes the trajectory.
    [[nodiscard]] std::uint32_t key(std::size_t i) const noexcept { return keys_[i]; }
    void set_keys(std::vector<std::uint32_t> keys);

    double time = 0;
    long step_index = 0;
    std::uint64_t seed = 0;
    std::uint32_t replicate = 0;

    /// Throws NonFinite naming the first offending particle.
    void check_finite() const;

    friend bool operator==(Ensemble const &, Ensemble const &) = default;

private:
    std::size_t dim_ = 0;
    std::vector<double> states_;
    std::vector<std::uint32_t> keys_;
};

struct GaussianComponent {
    double mean = 0;
    double std = 1;
};

/// Density (f(x - mean - center) + f(x - mean + center)) / 2 with f = N(0, std^2).
struct Mixture2Component {
    double mean = 0;
    double center = 1;
    double std = 1;
};

using LawComponent = std::variant<GaussianComponent, Mixture2Component>;

/// Product law across coordinates.
struct InitialLaw {
    std::vector<LawComponent> coords;

    /// f(x1) g(x2), f = N(0, 0.1^2), g = (f(x - 1) + f(x + 1)) / 2. Energy 1.02.
    static InitialLaw paper_sec5();
    static InitialLaw isotropic(std::size_t dim, LawComponent const &component);

    [[nodiscard]] std::size_t dim() const noexcept { return coords.size(); }
    [[nodiscard]] Vec mean() const;
    /// Exact m_2^{ij} = E[x_i x_j].
    [[nodiscard]] SymMatrix second_moments() const;
    /// Same law shifted to mean zero.
    [[nodiscard]] InitialLaw centered() const;
};

/// n i.i.d. draws; a pure function of (law, n, seed, replicate).
[[nodiscard]] Ensemble sample_initial(InitialLaw const &law, std::size_t n, std::uint64_t seed,
                                      std::uint32_t replicate = 0);

/// (1/m) sum_k a(x - X_k) over included particles, ascending index order with
/// compensated accumulation. `exclude` drops one index (m = n - 1).
[[nodiscard]] PsdMatrix empirical_a(KernelSpec const &spec, std::span<double const> x, Ensemble const &ens,
                                    std::optional<std::size_t> exclude = std::nullopt, FloorTally *tally = nullptr);

[[nodiscard]] Vec empirical_b(KernelSpec const &spec, std::span<double const> x, Ensemble const &ens,
                              std::optional<std::size_t> exclude = std::nullopt, FloorTally *tally = nullptr);

struct EmpiricalCoefficients {
    PsdMatrix a;
    Vec b;
};

/// Both fields in one pass over the ensemble. Soft kernels use the floor
/// policy and report events through `tally`.
[[nodiscard]] EmpiricalCoefficients empirical_coefficients(KernelSpec const &spec, std::span<double const> x,
                                                           Ensemble const &ens, std::optional<std::size_t> exclude,
                                                           FloorTally *tally = nullptr);

[[nodiscard]] Vec mean(Ensemble const &ens);
/// (1/n) sum |X_k|^k
[[nodiscard]] double moment(Ensemble const &ens, int k);
/// (1/n) sum X_k X_k^* (about the origin).
[[nodiscard]] SymMatrix second_moments(Ensemble const &ens);
/// (1/n) sum (X_k - m)(X_k - m)^*
[[nodiscard]] SymMatrix covariance(Ensemble const &ens);

} // namespace landau
