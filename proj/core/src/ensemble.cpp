#include "landau/ensemble.hpp"

#include "compensated.hpp"
#include "landau/errors.hpp"
#include "landau/noise.hpp"

#include <array>
#include <cmath>
#include <numeric>
#include <string>

namespace landau {

using detail::KahanSum;

Ensemble::Ensemble(std::size_t dim, std::size_t count) : dim_(dim), states_(dim * count, 0.0), keys_(count)
{
    std::iota(keys_.begin(), keys_.end(), 0u);
}

Ensemble::Ensemble(std::size_t dim, std::vector<double> states) : dim_(dim), states_(std::move(states))
{
    if (dim_ == 0 || states_.size() % dim_ != 0)
        throw SizeMismatch("Ensemble: state buffer is not a multiple of the dimension");
    keys_.resize(states_.size() / dim_);
    std::iota(keys_.begin(), keys_.end(), 0u);
}

void Ensemble::set_keys(std::vector<std::uint32_t> keys)
{
    if (keys.size() != size())
        throw SizeMismatch("Ensemble::set_keys: one key per particle required");
    keys_ = std::move(keys);
}

void Ensemble::check_finite() const
{
    for (std::size_t k = 0; k < states_.size(); ++k)
        if (!std::isfinite(states_[k]))
            throw NonFinite("non-finite state for particle " + std::to_string(k / dim_) + " at step " +
                                std::to_string(step_index),
                            k / dim_, step_index);
}

InitialLaw InitialLaw::paper_sec5()
{
    return InitialLaw{{GaussianComponent{0.0, 0.1}, Mixture2Component{0.0, 1.0, 0.1}}};
}

InitialLaw InitialLaw::isotropic(std::size_t dim, LawComponent const &component)
{
    return InitialLaw{std::vector<LawComponent>(dim, component)};
}

Vec InitialLaw::mean() const
{
    Vec m(dim());
    for (std::size_t i = 0; i < dim(); ++i)
        m[i] = std::visit([](auto const &c) { return c.mean; }, coords[i]);
    return m;
}

SymMatrix InitialLaw::second_moments() const
{
    auto const d = dim();
    auto const m = mean();
    SymMatrix out(d);
    for (std::size_t i = 0; i < d; ++i) {
        double const var = std::visit(
            [](auto const &c) {
                using T = std::decay_t<decltype(c)>;
                if constexpr (std::is_same_v<T, GaussianComponent>)
                    return c.std * c.std;
                else
                    return c.center * c.center + c.std * c.std;
            },
            coords[i]);
        out.set(i, i, var + m[i] * m[i]);
        for (std::size_t j = i + 1; j < d; ++j)
            out.set(i, j, m[i] * m[j]);
    }
    return out;
}

InitialLaw InitialLaw::centered() const
{
    InitialLaw out = *this;
    for (auto &c : out.coords)
        std::visit([](auto &comp) { comp.mean = 0; }, c);
    return out;
}

Ensemble sample_initial(InitialLaw const &law, std::size_t n, std::uint64_t seed, std::uint32_t replicate)
{
    auto const d = law.dim();
    Ensemble ens(d, n);
    ens.seed = seed;
    ens.replicate = replicate;
    for (std::size_t i = 0; i < n; ++i) {
        KeyedDraws const draws(seed, kInitialStream, replicate, static_cast<std::uint32_t>(i), 0);
        auto x = ens.state(i);
        for (std::size_t j = 0; j < d; ++j) {
            auto const slot = static_cast<std::uint32_t>(j);
            x[j] = std::visit(
                [&](auto const &c) {
                    using T = std::decay_t<decltype(c)>;
                    double const z = c.std == 0 ? 0.0 : c.std * draws.normal(slot);
                    if constexpr (std::is_same_v<T, GaussianComponent>)
                        return c.mean + z;
                    else
                        return c.mean + (draws.uniform(slot) < 0.5 ? -c.center : c.center) + z;
                },
                law.coords[j]);
        }
    }
    return ens;
}

namespace {

constexpr std::size_t kChunk = 64;
constexpr std::size_t kLanes = 4;

// Pairwise kernel sums for one target point. Included particles are visited
// in ascending index order; the j-th included particle feeds lane j % 4 of a
// Kahan accumulator, and lanes are merged in fixed order at the end. The
// result therefore depends only on the stored order, never on scheduling.
template <std::size_t kD>
class PairwiseSums {
public:
    static constexpr std::size_t kMaxQ = kD == 0 ? 0 : kD * (kD + 1) / 2 + kD;

    PairwiseSums(KernelSpec const &spec, std::span<double const> x)
        : spec_(spec), x_(x), d_(kD ? kD : x.size()), na_(d_ * (d_ + 1) / 2), q_(na_ + d_)
    {
        if constexpr (kD == 0) {
            values_.resize(q_ * kChunk);
            sum_.assign(q_ * kLanes, 0.0);
            comp_.assign(q_ * kLanes, 0.0);
            z_.resize(d_ * kChunk);
        }
    }

    void run(Ensemble const &ens, std::optional<std::size_t> exclude)
    {
        std::size_t const n = ens.size();
        std::size_t fill = 0;
        for (std::size_t k = 0; k < n; ++k) {
            if (exclude && *exclude == k)
                continue;
            auto const y = ens.state(k);
            double *z = zbuf() + fill * d_;
            double r2 = 0;
            for (std::size_t i = 0; i < d_; ++i) {
                z[i] = x_[i] - y[i];
                r2 += z[i] * z[i];
            }
            r2_[fill] = r2;
            if (++fill == kChunk) {
                flush(fill);
                fill = 0;
            }
            ++count_;
        }
        if (fill)
            flush(fill);
    }

    [[nodiscard]] std::size_t count() const noexcept { return count_; }
    [[nodiscard]] std::uint64_t floor_events() const noexcept { return tally_.events; }

    /// Merged totals: first the packed a entries, then the sum of w z.
    [[nodiscard]] double total(std::size_t q) const noexcept
    {
        KahanSum k;
        for (std::size_t l = 0; l < kLanes; ++l)
            k.add(sum()[q * kLanes + l]);
        for (std::size_t l = 0; l < kLanes; ++l)
            k.add(-comp()[q * kLanes + l]);
        return k.value();
    }

    [[nodiscard]] std::size_t na() const noexcept { return na_; }

private:
    double *zbuf() noexcept { return z_.data(); }
    double *vals() noexcept { return values_.data(); }
    double *sum() noexcept { return sum_.data(); }
    double *comp() noexcept { return comp_.data(); }
    double const *sum() const noexcept { return sum_.data(); }
    double const *comp() const noexcept { return comp_.data(); }

    void weights(std::size_t len)
    {
        auto const index = spec_.family.index();
        if (index == 0) { // Maxwell
            for (std::size_t j = 0; j < len; ++j)
                w_[j] = 1.0;
        } else if (auto const *soft = std::get_if<Soft>(&spec_.family)) {
            double const g = soft->gamma;
            for (std::size_t j = 0; j < len; ++j) {
                double r = std::sqrt(r2_[j]);
                if (r < kSoftFloor) {
                    ++tally_.events;
                    r = kSoftFloor;
                }
                w_[j] = g == -1 ? 1 / r : std::pow(r, g);
            }
        } else {
            for (std::size_t j = 0; j < len; ++j)
                w_[j] = kernel_weight(spec_, r2_[j], SingularPolicy::kFloor, &tally_);
        }
    }

    void flush(std::size_t len)
    {
        weights(len);
        double *v = vals();
        double const *z = zbuf();
        // Pad the tail so every lane group is full; padded entries add zero
        // and are never read back as particles.
        std::size_t const padded = (len + kLanes - 1) / kLanes * kLanes;
        std::size_t q = 0;
        for (std::size_t i = 0; i < d_; ++i)
            for (std::size_t k = i; k < d_; ++k, ++q) {
                for (std::size_t j = 0; j < len; ++j) {
                    double const zz = z[j * d_ + i] * z[j * d_ + k];
                    v[q * kChunk + j] = w_[j] * (i == k ? r2_[j] - zz : -zz);
                }
                for (std::size_t j = len; j < padded; ++j)
                    v[q * kChunk + j] = 0;
            }
        for (std::size_t i = 0; i < d_; ++i, ++q) {
            for (std::size_t j = 0; j < len; ++j)
                v[q * kChunk + j] = w_[j] * z[j * d_ + i];
            for (std::size_t j = len; j < padded; ++j)
                v[q * kChunk + j] = 0;
        }
        for (q = 0; q < q_; ++q) {
            double *s = sum() + q * kLanes;
            double *c = comp() + q * kLanes;
            double const *row = v + q * kChunk;
            for (std::size_t j = 0; j < padded; j += kLanes) {
                for (std::size_t l = 0; l < kLanes; ++l) {
                    double const y = row[j + l] - c[l];
                    double const t = s[l] + y;
                    c[l] = (t - s[l]) - y;
                    s[l] = t;
                }
            }
        }
    }

    KernelSpec const &spec_;
    std::span<double const> x_;
    std::size_t d_, na_, q_;
    std::size_t count_ = 0;
    FloorTally tally_;

    using Buf = std::conditional_t<kD == 0, std::vector<double>, std::array<double, kMaxQ * kChunk>>;
    using LaneBuf = std::conditional_t<kD == 0, std::vector<double>, std::array<double, kMaxQ * kLanes>>;
    using ZBuf = std::conditional_t<kD == 0, std::vector<double>, std::array<double, kD * kChunk>>;
    Buf values_{};
    LaneBuf sum_{};
    LaneBuf comp_{};
    ZBuf z_{};
    std::array<double, kChunk> r2_{};
    std::array<double, kChunk> w_{};
};

template <std::size_t kD>
EmpiricalCoefficients pairwise(KernelSpec const &spec, std::span<double const> x, Ensemble const &ens,
                               std::optional<std::size_t> exclude, FloorTally *tally)
{
    PairwiseSums<kD> sums(spec, x);
    sums.run(ens, exclude);
    auto const d = x.size();
    SymMatrix a(d);
    Vec b(d, 0.0);
    if (tally)
        tally->events += sums.floor_events();
    if (sums.count() == 0)
        return {PsdMatrix::trusted(std::move(a)), std::move(b)};
    double const inv_m = 1.0 / static_cast<double>(sums.count());
    auto packed = a.packed();
    for (std::size_t q = 0; q < sums.na(); ++q)
        packed[q] = sums.total(q) * inv_m;
    double const cb = -static_cast<double>(d - 1) * inv_m;
    for (std::size_t i = 0; i < d; ++i)
        b[i] = cb * sums.total(sums.na() + i);
    return {PsdMatrix(std::move(a)), std::move(b)};
}

void check_exclusion(Ensemble const &ens, std::span<double const> x, std::optional<std::size_t> exclude)
{
    if (x.size() != ens.dim())
        throw SizeMismatch("empirical field: point dimension differs from ensemble dimension");
    if (exclude) {
        if (ens.size() < 2)
            throw DomainError("empirical field: self-exclusion needs at least two particles");
        if (*exclude >= ens.size())
            throw DomainError("empirical field: excluded index out of range");
    }
}

} // namespace

EmpiricalCoefficients empirical_coefficients(KernelSpec const &spec, std::span<double const> x, Ensemble const &ens,
                                             std::optional<std::size_t> exclude, FloorTally *tally)
{
    check_exclusion(ens, x, exclude);
    switch (x.size()) {
    case 2:
        return pairwise<2>(spec, x, ens, exclude, tally);
    case 3:
        return pairwise<3>(spec, x, ens, exclude, tally);
    default:
        return pairwise<0>(spec, x, ens, exclude, tally);
    }
}

PsdMatrix empirical_a(KernelSpec const &spec, std::span<double const> x, Ensemble const &ens,
                      std::optional<std::size_t> exclude, FloorTally *tally)
{
    return empirical_coefficients(spec, x, ens, exclude, tally).a;
}

Vec empirical_b(KernelSpec const &spec, std::span<double const> x, Ensemble const &ens,
                std::optional<std::size_t> exclude, FloorTally *tally)
{
    return empirical_coefficients(spec, x, ens, exclude, tally).b;
}

Vec mean(Ensemble const &ens)
{
    auto const d = ens.dim();
    auto const n = ens.size();
    Vec m(d, 0.0);
    if (n == 0)
        return m;
    for (std::size_t i = 0; i < d; ++i) {
        KahanSum s;
        for (std::size_t k = 0; k < n; ++k)
            s.add(ens.state(k)[i]);
        m[i] = s.value() / static_cast<double>(n);
    }
    return m;
}

double moment(Ensemble const &ens, int k)
{
    auto const n = ens.size();
    if (n == 0)
        return 0;
    KahanSum s;
    for (std::size_t p = 0; p < n; ++p) {
        double r2 = 0;
        for (double v : ens.state(p))
            r2 += v * v;
        s.add(k == 2 ? r2 : std::pow(std::sqrt(r2), k));
    }
    return s.value() / static_cast<double>(n);
}

namespace {

SymMatrix outer_average(Ensemble const &ens, std::span<double const> shift)
{
    auto const d = ens.dim();
    auto const n = ens.size();
    SymMatrix out(d);
    if (n == 0)
        return out;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i; j < d; ++j) {
            KahanSum s;
            for (std::size_t k = 0; k < n; ++k) {
                auto const x = ens.state(k);
                s.add((x[i] - shift[i]) * (x[j] - shift[j]));
            }
            out.set(i, j, s.value() / static_cast<double>(n));
        }
    return out;
}

} // namespace

SymMatrix second_moments(Ensemble const &ens)
{
    Vec zero(ens.dim(), 0.0);
    return outer_average(ens, as_span(zero));
}

SymMatrix covariance(Ensemble const &ens)
{
    auto const m = mean(ens);
    return outer_average(ens, as_span(m));
}

} // namespace landau
