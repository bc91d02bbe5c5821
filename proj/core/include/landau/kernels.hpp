#pragma once

// Landau coefficient fields
//
//     a(z) = w(z) (|z|^2 I - z z^*),    b(z) = -(d - 1) w(z) z,
//
// where the weight w depends on the kernel family:
//
//     Maxwell        w = 1
//     PseudoMaxwell  w = kappa(|z|^2), kappa = lambda_floor + (1 - lambda_floor) q
//     Soft           w = |z|^gamma           (|z| floored at kSoftFloor)
//     SoftCutoff     w = kappa_eps(|z|)^gamma

#include "landau/spd.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>

namespace landau {

/// |z| below this is treated as a near-collision for the Soft family.
inline constexpr double kSoftFloor = 1e-12;

struct Maxwell {};

/// kappa(r) = lambda_floor + (1 - lambda_floor) q(r), where q ramps from 1 at
/// r <= r0 to 0 at r >= r1 with a C^2 quintic. Here r = |z|^2.
struct PseudoMaxwell {
    double lambda_floor = 0.5;
    double r0 = 1.0;
    double r1 = 4.0;
};

struct Soft {
    double gamma = -1.0;
};

struct SoftCutoff {
    double gamma = -1.0;
    double epsilon = 0.1;
};

using KernelFamily = std::variant<Maxwell, PseudoMaxwell, Soft, SoftCutoff>;

struct KernelSpec {
    std::size_t dim = 2;
    KernelFamily family = Maxwell{};

    /// Throws DomainError on out-of-range parameters.
    void validate() const;

    [[nodiscard]] bool is_maxwell() const noexcept { return std::holds_alternative<Maxwell>(family); }
    [[nodiscard]] bool is_soft() const noexcept { return std::holds_alternative<Soft>(family); }
    /// Maxwell or PseudoMaxwell: the regime with Lipschitz coefficients.
    [[nodiscard]] bool is_lipschitz() const noexcept
    {
        return std::holds_alternative<Maxwell>(family) || std::holds_alternative<PseudoMaxwell>(family);
    }
    /// Config name: maxwell | pseudo_maxwell | soft | soft_cutoff.
    [[nodiscard]] std::string family_name() const;
};

/// What to do when a Soft kernel sees |z| < kSoftFloor.
enum class SingularPolicy {
    kThrow, ///< raise SingularRelativeVelocity unless the limit at z = 0 exists
    kFloor, ///< floor |z| at kSoftFloor and count the event
};

/// Counts Soft-kernel flooring events.
struct FloorTally {
    std::uint64_t events = 0;
};

/// C^2 nondecreasing cutoff: r for r >= eps, eps/2 on [0, eps/2], quintic
/// Hermite blend in between.
[[nodiscard]] double cutoff_kappa(double eps, double r);

/// C^2 ramp from 1 (s <= 0) to 0 (s >= 1) with vanishing first and second
/// derivatives at both ends.
[[nodiscard]] double smooth_ramp_down(double s) noexcept;

/// Pseudo-Maxwell kappa as a function of r = |z|^2.
[[nodiscard]] double pseudo_kappa(PseudoMaxwell const &p, double r) noexcept;

/// Scalar weight w(z) given |z|^2. Shared by a_field, b_field and the
/// empirical kernels so that all paths evaluate the same expression.
[[nodiscard]] double kernel_weight(KernelSpec const &spec, double r2, SingularPolicy policy = SingularPolicy::kThrow,
                                   FloorTally *tally = nullptr);

[[nodiscard]] PsdMatrix a_field(KernelSpec const &spec, std::span<double const> z,
                                SingularPolicy policy = SingularPolicy::kThrow, FloorTally *tally = nullptr);

[[nodiscard]] Vec b_field(KernelSpec const &spec, std::span<double const> z,
                          SingularPolicy policy = SingularPolicy::kThrow, FloorTally *tally = nullptr);

} // namespace landau
