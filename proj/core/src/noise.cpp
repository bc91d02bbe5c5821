#include "landau/noise.hpp"

#include <cmath>
#include <numbers>

namespace landau {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t &hi, std::uint32_t &lo) noexcept
{
    std::uint64_t const p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

inline double to_open_unit(std::uint32_t hi, std::uint32_t lo) noexcept
{
    std::uint64_t const bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

} // namespace

PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) noexcept
{
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kPhiloxW0;
            key[1] += kPhiloxW1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
        mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

double normal_quantile(double p) noexcept
{
    // Acklam's rational approximation followed by one Halley step on erfc.
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                   1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                   6.680131188771972e+01, -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                   -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                   3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    if (!(p > 0))
        return -HUGE_VAL;
    if (!(p < 1))
        return HUGE_VAL;

    double x;
    if (p < p_low) {
        double const q = std::sqrt(-2 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    } else if (p <= 1 - p_low) {
        double const q = p - 0.5;
        double const r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
    } else {
        double const q = std::sqrt(-2 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }

    // Refine against the lower tail for x < 0 and the upper tail otherwise so
    // that the residual is computed without cancellation.
    constexpr double sqrt2pi = 2.5066282746310002;
    if (x < 0) {
        double const e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
        double const u = e * sqrt2pi * std::exp(0.5 * x * x);
        x = x - u / (1 + 0.5 * x * u);
    } else {
        double const e = 0.5 * std::erfc(x / std::numbers::sqrt2) - (1 - p);
        double const u = -e * sqrt2pi * std::exp(0.5 * x * x);
        x = x - u / (1 + 0.5 * x * u);
    }
    return x;
}

KeyedDraws::KeyedDraws(std::uint64_t seed, std::uint32_t stream, std::uint32_t replicate,
                       std::uint32_t particle, std::uint32_t step) noexcept
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      base_{step, particle, replicate, (stream & kMaxStreamTag) << 8}
{
}

PhiloxCounter KeyedDraws::block(std::uint32_t index) const noexcept
{
    PhiloxCounter ctr = base_;
    ctr[3] |= index & 0xFFu;
    return philox4x32_10(ctr, key_);
}

double KeyedDraws::uniform(std::uint32_t slot) const noexcept
{
    // Blocks 128..255 feed uniforms, two per block.
    auto const r = block(128 + (slot >> 1));
    return (slot & 1u) ? to_open_unit(r[2], r[3]) : to_open_unit(r[0], r[1]);
}

double KeyedDraws::normal(std::uint32_t slot) const noexcept
{
    // Blocks 0..127 feed normals, two per block.
    auto const r = block(slot >> 1);
    double const u = (slot & 1u) ? to_open_unit(r[2], r[3]) : to_open_unit(r[0], r[1]);
    return normal_quantile(u);
}

void NoisePlan::increment(std::uint32_t replicate, std::uint32_t particle, std::uint32_t step,
                          std::span<double> out) const noexcept
{
    double const scale = std::sqrt(1.0 / static_cast<double>(fine_resolution));
    for (double &x : out)
        x = 0;
    for (std::uint32_t j = 0; j < refinement; ++j) {
        KeyedDraws const draws(seed, fine_resolution, replicate, particle, step * refinement + j);
        for (std::size_t k = 0; k < out.size(); ++k)
            out[k] += scale * draws.normal(static_cast<std::uint32_t>(k));
    }
}

} // namespace landau
