#include "landau/coefficient_field.hpp"

#include "landau/errors.hpp"

namespace landau {

FieldValue PairwiseField::evaluate(std::size_t i, std::span<double const> x) const
{
    FloorTally tally;
    auto coeffs = empirical_coefficients(spec_, x, *snapshot_, exclusion_ ? std::optional(i) : std::nullopt, &tally);
    return {std::move(coeffs.a), std::move(coeffs.b), tally.events};
}

void MaxwellMomentField::bind(Ensemble const &snapshot)
{
    snapshot_ = &snapshot;
    mean_ = mean(snapshot);
    auto const c = covariance(snapshot);
    spread_ = c.trace() * SymMatrix::identity(snapshot.dim());
    spread_ -= c;
}

FieldValue MaxwellMomentField::evaluate(std::size_t i, std::span<double const> x) const
{
    auto const d = x.size();
    Vec y(d);
    double r2 = 0;
    for (std::size_t k = 0; k < d; ++k) {
        y[k] = x[k] - mean_[k];
        r2 += y[k] * y[k];
    }
    SymMatrix a = spread_;
    for (std::size_t k = 0; k < d; ++k) {
        a.at(k, k) += r2 - y[k] * y[k];
        for (std::size_t l = k + 1; l < d; ++l)
            a.at(k, l) -= y[k] * y[l];
    }
    double const cb = -static_cast<double>(d - 1);
    Vec b(d);
    for (std::size_t k = 0; k < d; ++k)
        b[k] = cb * y[k];

    if (exclusion_) {
        // (1/(n-1)) sum_{k != i} = (n/(n-1)) full - (1/(n-1)) term_i
        auto const n = static_cast<double>(snapshot_->size());
        if (n < 2)
            throw DomainError("self-exclusion needs at least two particles");
        auto const self = snapshot_->state(i);
        Vec z(d);
        double s2 = 0;
        for (std::size_t k = 0; k < d; ++k) {
            z[k] = x[k] - self[k];
            s2 += z[k] * z[k];
        }
        double const scale = n / (n - 1);
        double const drop = 1 / (n - 1);
        a *= scale;
        for (std::size_t k = 0; k < d; ++k) {
            a.at(k, k) -= drop * (s2 - z[k] * z[k]);
            for (std::size_t l = k + 1; l < d; ++l)
                a.at(k, l) += drop * z[k] * z[l];
            b[k] = scale * b[k] - drop * cb * z[k];
        }
    }
    return {PsdMatrix(std::move(a)), std::move(b), 0};
}

FieldValue ReferenceField::evaluate(std::size_t, std::span<double const> x) const
{
    auto c = mckean_coefficients(flow_, x, time_);
    return {std::move(c.a), std::move(c.b), 0};
}

std::unique_ptr<CoefficientField> make_empirical_field(KernelSpec const &spec, bool exclusion, Evaluator evaluator)
{
    switch (evaluator) {
    case Evaluator::kPairwise:
        return std::make_unique<PairwiseField>(spec, exclusion);
    case Evaluator::kMoments:
        if (!spec.is_maxwell())
            throw DomainError("moment evaluator requires the maxwell kernel, got " + spec.family_name());
        return std::make_unique<MaxwellMomentField>(exclusion);
    case Evaluator::kAuto:
        break;
    }
    if (spec.is_maxwell())
        return std::make_unique<MaxwellMomentField>(exclusion);
    return std::make_unique<PairwiseField>(spec, exclusion);
}

} // namespace landau
