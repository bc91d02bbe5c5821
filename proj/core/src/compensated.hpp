#pragma once

namespace landau::detail {

/// Kahan-compensated running sum.
struct KahanSum {
    double sum = 0;
    double comp = 0;

    void add(double v) noexcept
    {
        double const y = v - comp;
        double const t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    [[nodiscard]] double value() const noexcept { return sum - comp; }
};

} // namespace landau::detail
