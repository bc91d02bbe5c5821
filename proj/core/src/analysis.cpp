#include "landau/analysis.hpp"

#include "landau/assignment.hpp"
#include "landau/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <random>
#include <string>
#include <tuple>

namespace landau {

double wasserstein2_1d(std::span<double const> xs, std::span<double const> ys)
{
    if (xs.size() != ys.size())
        throw SizeMismatch("wasserstein2_1d: sample sizes differ");
    if (xs.empty())
        return 0;
    std::vector<double> a(xs.begin(), xs.end());
    std::vector<double> b(ys.begin(), ys.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s / static_cast<double>(a.size()));
}

double wasserstein2_exact(Ensemble const &a, Ensemble const &b)
{
    if (a.size() != b.size() || a.dim() != b.dim())
        throw SizeMismatch("wasserstein2_exact: ensembles differ in size or dimension");
    auto const n = a.size();
    if (n > kExactWassersteinCap)
        throw TooLarge("wasserstein2_exact: n = " + std::to_string(n) + " exceeds the cap of " +
                       std::to_string(kExactWassersteinCap));
    if (n == 0)
        return 0;
    std::vector<double> cost(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            auto const x = a.state(i);
            auto const y = b.state(j);
            double c = 0;
            for (std::size_t k = 0; k < a.dim(); ++k)
                c += (x[k] - y[k]) * (x[k] - y[k]);
            cost[i * n + j] = c;
        }
    auto const match = solve_assignment(cost, n);
    return std::sqrt(std::max(match.cost, 0.0) / static_cast<double>(n));
}

double Histogram::in_range_mass() const noexcept
{
    if (total == 0)
        return 0;
    return static_cast<double>(total - below - above) / static_cast<double>(total);
}

Histogram histogram(std::span<double const> samples, std::size_t bins, double lo, double hi)
{
    if (bins < 1)
        throw DomainError("histogram: bins must be >= 1");
    if (!(std::isfinite(lo) && std::isfinite(hi) && hi > lo))
        throw DomainError("histogram: range must be finite with hi > lo");
    Histogram h;
    h.lo = lo;
    h.hi = hi;
    h.total = samples.size();
    std::vector<std::size_t> counts(bins, 0);
    double const width = (hi - lo) / static_cast<double>(bins);
    for (double x : samples) {
        if (x < lo) {
            ++h.below;
        } else if (!(x < hi)) {
            ++h.above;
        } else {
            auto k = static_cast<std::size_t>((x - lo) / width);
            counts[std::min(k, bins - 1)] += 1;
        }
    }
    h.density.resize(bins, 0.0);
    if (h.total > 0)
        for (std::size_t k = 0; k < bins; ++k)
            h.density[k] = static_cast<double>(counts[k]) / (static_cast<double>(h.total) * width);
    return h;
}

double gaussian_density(double mean, double variance, double x)
{
    if (!(variance > 0))
        throw DomainError("gaussian_density: variance must be > 0");
    double const z = x - mean;
    return std::exp(-0.5 * z * z / variance) / std::sqrt(2 * std::numbers::pi * variance);
}

double l1_distance(Histogram const &h, std::function<double(double)> const &density)
{
    // Composite Simpson on each bin; the integrand is smooth inside a bin
    // except where it crosses the bin height, which a fine grid resolves.
    constexpr int kSub = 64;
    double const w = h.bin_width();
    double total = 0;
    for (std::size_t k = 0; k < h.density.size(); ++k) {
        double const left = h.bin_left(k);
        double const step = w / kSub;
        double acc = 0;
        for (int j = 0; j <= kSub; ++j) {
            double const x = left + step * j;
            double const f = std::abs(h.density[k] - density(x));
            double const weight = (j == 0 || j == kSub) ? 1 : (j % 2 ? 4 : 2);
            acc += weight * f;
        }
        total += acc * step / 3;
    }
    return total;
}

std::vector<double> coordinate(Ensemble const &ens, std::size_t coord)
{
    if (coord >= ens.dim())
        throw DomainError("coordinate index out of range");
    std::vector<double> out(ens.size());
    for (std::size_t i = 0; i < ens.size(); ++i)
        out[i] = ens.state(i)[coord];
    return out;
}

double min_field_eigenvalue(CoefficientField &field, Ensemble const &ens)
{
    field.bind(ens);
    double lowest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ens.size(); ++i)
        lowest = std::min(lowest, min_eig(field.evaluate(i, ens.state(i)).a));
    return lowest;
}

std::vector<double> ellipticity_monitor(KernelSpec const &spec, Trajectory const &trajectory, bool exclusion,
                                        Evaluator evaluator)
{
    auto field = make_empirical_field(spec, exclusion, evaluator);
    std::vector<double> out;
    out.reserve(trajectory.snapshots.size());
    for (auto const &snap : trajectory.snapshots)
        out.push_back(min_field_eigenvalue(*field, snap.state));
    return out;
}

SampleSummary summarize(std::span<double const> values)
{
    SampleSummary s;
    auto const n = values.size();
    if (n == 0)
        return s;
    for (double v : values)
        s.mean += v;
    s.mean /= static_cast<double>(n);
    if (n < 2)
        return s;
    double ss = 0;
    for (double v : values)
        ss += (v - s.mean) * (v - s.mean);
    s.std_error = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
    return s;
}

double RatePoint::mse() const noexcept
{
    return summarize(replicates).mean;
}

double RatePoint::standard_error() const noexcept
{
    return summarize(replicates).std_error;
}

std::pair<double, double> least_squares(std::span<double const> x, std::span<double const> y)
{
    auto const n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    double const slope = sxy / sxx;
    return {slope, my - slope * mx};
}

RateFit fit_rate(RateSeries const &series, unsigned bootstrap, std::uint64_t seed)
{
    auto const &pts = series.points;
    if (pts.size() < 4)
        throw Degenerate("fit_rate: at least 4 abscissa values are required");
    std::vector<double> lx, ly;
    for (auto const &p : pts) {
        if (!(p.abscissa > 0))
            throw Degenerate("fit_rate: abscissa values must be positive");
        double const m = p.mse();
        if (!(m > 0))
            throw Degenerate("fit_rate: MSE estimate <= 0 at abscissa " + std::to_string(p.abscissa));
        lx.push_back(std::log(p.abscissa));
        ly.push_back(std::log(m));
    }
    RateFit fit;
    std::tie(fit.slope, fit.intercept) = least_squares(lx, ly);

    std::mt19937_64 rng(seed);
    std::vector<double> slopes;
    slopes.reserve(bootstrap);
    std::vector<double> by(pts.size());
    for (unsigned b = 0; b < bootstrap; ++b) {
        bool ok = true;
        for (std::size_t k = 0; k < pts.size() && ok; ++k) {
            auto const &reps = pts[k].replicates;
            std::uniform_int_distribution<std::size_t> pick(0, reps.size() - 1);
            double s = 0;
            for (std::size_t j = 0; j < reps.size(); ++j)
                s += reps[pick(rng)];
            double const m = s / static_cast<double>(reps.size());
            ok = m > 0;
            by[k] = ok ? std::log(m) : 0;
        }
        if (ok)
            slopes.push_back(least_squares(lx, by).first);
    }
    if (slopes.empty()) {
        fit.ci_low = fit.ci_high = fit.slope;
        return fit;
    }
    std::sort(slopes.begin(), slopes.end());
    auto quantile = [&](double q) {
        double const pos = q * static_cast<double>(slopes.size() - 1);
        auto const lo = static_cast<std::size_t>(std::floor(pos));
        auto const hi = std::min(lo + 1, slopes.size() - 1);
        return slopes[lo] + (pos - static_cast<double>(lo)) * (slopes[hi] - slopes[lo]);
    };
    fit.ci_low = quantile(0.025);
    fit.ci_high = quantile(0.975);
    return fit;
}

bool monotone_nonincreasing_within_ci(RateSeries const &series, double z)
{
    auto const &pts = series.points;
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        double const upper_prev = pts[k].mse() + z * pts[k].standard_error();
        double const lower_next = pts[k + 1].mse() - z * pts[k + 1].standard_error();
        if (lower_next > upper_prev)
            return false;
    }
    return true;
}

} // namespace landau
