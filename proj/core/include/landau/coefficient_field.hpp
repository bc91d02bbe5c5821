#pragma once

// Coefficient sources for the particle step.
//
// A field is bound to an immutable snapshot and then evaluated concurrently,
// once per particle. Implementations:
//   PairwiseField       direct O(n) sum of a(x - X_k), b(x - X_k), any kernel
//   MaxwellMomentField  O(1) evaluation from the snapshot's mean and covariance
//   ReferenceField      exact Maxwell McKean coefficients a(x, P_t), b(x, P_t)
//   ConstantField       fixed (a, b), used as a test double

#include "landau/ensemble.hpp"
#include "landau/kernels.hpp"
#include "landau/maxwell_oracle.hpp"
#include "landau/spd.hpp"

#include <cstdint>
#include <memory>
#include <span>

namespace landau {

enum class Evaluator {
    kAuto,     ///< moments for Maxwell, pairwise otherwise
    kPairwise,
    kMoments,  ///< Maxwell only
};

struct FieldValue {
    PsdMatrix a;
    Vec b;
    std::uint64_t floor_events = 0;
};

class CoefficientField {
public:
    virtual ~CoefficientField() = default;

    /// Freezes the field on `snapshot`; the snapshot must outlive evaluation.
    virtual void bind(Ensemble const &snapshot) = 0;

    /// Coefficients for particle `i` located at `x`. Safe to call concurrently.
    [[nodiscard]] virtual FieldValue evaluate(std::size_t i, std::span<double const> x) const = 0;
};

class PairwiseField final : public CoefficientField {
public:
    PairwiseField(KernelSpec spec, bool exclusion) : spec_(std::move(spec)), exclusion_(exclusion) {}

    void bind(Ensemble const &snapshot) override { snapshot_ = &snapshot; }
    [[nodiscard]] FieldValue evaluate(std::size_t i, std::span<double const> x) const override;

private:
    KernelSpec spec_;
    bool exclusion_;
    Ensemble const *snapshot_ = nullptr;
};

/// For kappa = 1 the empirical average collapses to
///     a(x, mu_n) = |x - m|^2 I - (x - m)(x - m)^* + tr(C) I - C,
///     b(x, mu_n) = -(d - 1)(x - m),
/// with m, C the snapshot mean and covariance.
class MaxwellMomentField final : public CoefficientField {
public:
    explicit MaxwellMomentField(bool exclusion) : exclusion_(exclusion) {}

    void bind(Ensemble const &snapshot) override;
    [[nodiscard]] FieldValue evaluate(std::size_t i, std::span<double const> x) const override;

private:
    bool exclusion_;
    Ensemble const *snapshot_ = nullptr;
    Vec mean_;
    SymMatrix spread_; // tr(C) I - C
};

class ReferenceField final : public CoefficientField {
public:
    explicit ReferenceField(MomentFlow flow) : flow_(std::move(flow)) {}

    void bind(Ensemble const &snapshot) override { time_ = snapshot.time; }
    [[nodiscard]] FieldValue evaluate(std::size_t i, std::span<double const> x) const override;

private:
    MomentFlow flow_;
    double time_ = 0;
};

class ConstantField final : public CoefficientField {
public:
    ConstantField(PsdMatrix a, Vec b) : a_(std::move(a)), b_(std::move(b)) {}

    void bind(Ensemble const &) override {}
    [[nodiscard]] FieldValue evaluate(std::size_t, std::span<double const>) const override { return {a_, b_, 0}; }

private:
    PsdMatrix a_;
    Vec b_;
};

/// Empirical field for `spec`; kAuto picks the moment path for Maxwell.
/// Throws DomainError when kMoments is requested for a non-Maxwell kernel.
[[nodiscard]] std::unique_ptr<CoefficientField> make_empirical_field(KernelSpec const &spec, bool exclusion,
                                                                     Evaluator evaluator = Evaluator::kAuto);

} // namespace landau
