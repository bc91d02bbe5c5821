#pragma once

// Counter-based Gaussian noise.
//
// Every draw is a pure function of (seed, stream tag, replicate, particle,
// step, slot), so results do not depend on scheduling or worker count.
// Philox4x32-10 supplies the bits; normals come from the inverse normal CDF.

#include <array>
#include <cstdint>
#include <span>

namespace landau {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// Philox4x32 with 10 rounds (Salmon et al., SC'11).
[[nodiscard]] PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) noexcept;

/// Inverse of the standard normal CDF, accurate to a few ulp on (0, 1).
[[nodiscard]] double normal_quantile(double p) noexcept;

/// Stream tag reserved for initial-state sampling. Brownian streams are
/// tagged by their time resolution (steps per unit time), which is >= 1.
inline constexpr std::uint32_t kInitialStream = 0;
inline constexpr std::uint32_t kMaxStreamTag = (1u << 24) - 1;

/// Random-access draws at one (stream, replicate, particle, step) position.
class KeyedDraws {
public:
    KeyedDraws(std::uint64_t seed, std::uint32_t stream, std::uint32_t replicate, std::uint32_t particle,
               std::uint32_t step) noexcept;

    /// Uniform on the open interval (0, 1); slot < 256.
    [[nodiscard]] double uniform(std::uint32_t slot) const noexcept;
    /// Standard normal; slot < 256. Independent of uniform(slot).
    [[nodiscard]] double normal(std::uint32_t slot) const noexcept;

private:
    [[nodiscard]] PhiloxCounter block(std::uint32_t index) const noexcept;

    PhiloxKey key_;
    PhiloxCounter base_;
};

/// Brownian increments for one simulation grid.
///
/// The fine grid has `fine_resolution` steps per unit time; a coarse step is
/// the sum, in ascending order, of `refinement` consecutive fine increments.
struct NoisePlan {
    std::uint64_t seed = 0;
    std::uint32_t fine_resolution = 1;
    std::uint32_t refinement = 1;

    /// Fills out[0..d) with the increment of `particle` over coarse step `step`.
    void increment(std::uint32_t replicate, std::uint32_t particle, std::uint32_t step,
                   std::span<double> out) const noexcept;

    /// Coarse time step 1 / (fine_resolution / refinement).
    [[nodiscard]] double coarse_dt() const noexcept
    {
        return static_cast<double>(refinement) / static_cast<double>(fine_resolution);
    }
};

} // namespace landau
