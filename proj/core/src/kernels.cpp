#include "landau/kernels.hpp"

#include "landau/errors.hpp"

#include <cmath>

namespace landau {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

double norm2(std::span<double const> z) noexcept
{
    double r2 = 0;
    for (double x : z)
        r2 += x * x;
    return r2;
}

} // namespace

void KernelSpec::validate() const
{
    if (dim < 2)
        throw DomainError("kernel dimension must be >= 2, got " + std::to_string(dim));
    std::visit(overloaded{
                   [](Maxwell const &) {},
                   [](PseudoMaxwell const &p) {
                       if (!(p.lambda_floor > 0))
                           throw DomainError("pseudo_maxwell: lambda_floor must be > 0");
                       if (!(p.r0 >= 0 && p.r1 > p.r0))
                           throw DomainError("pseudo_maxwell: need 0 <= r0 < r1");
                   },
                   [](Soft const &s) {
                       if (!(s.gamma >= -3 && s.gamma < 0))
                           throw DomainError("soft: gamma must lie in [-3, 0)");
                   },
                   [](SoftCutoff const &s) {
                       if (!(s.gamma >= -3 && s.gamma < 0))
                           throw DomainError("soft_cutoff: gamma must lie in [-3, 0)");
                       if (!(s.epsilon > 0))
                           throw DomainError("soft_cutoff: epsilon must be > 0");
                   },
               },
               family);
}

std::string KernelSpec::family_name() const
{
    return std::visit(overloaded{
                          [](Maxwell const &) { return std::string("maxwell"); },
                          [](PseudoMaxwell const &) { return std::string("pseudo_maxwell"); },
                          [](Soft const &) { return std::string("soft"); },
                          [](SoftCutoff const &) { return std::string("soft_cutoff"); },
                      },
                      family);
}

double smooth_ramp_down(double s) noexcept
{
    if (s <= 0)
        return 1;
    if (s >= 1)
        return 0;
    double const s3 = s * s * s;
    return 1 - s3 * (10 + s * (-15 + 6 * s));
}

double cutoff_kappa(double eps, double r)
{
    if (!(eps > 0))
        throw DomainError("cutoff_kappa: epsilon must be > 0");
    if (!(r >= 0))
        throw DomainError("cutoff_kappa: r must be >= 0");
    double const half = 0.5 * eps;
    if (r >= eps)
        return r;
    if (r <= half)
        return half;
    // Hermite data: value eps/2, slope 0, curvature 0 at eps/2;
    // value eps, slope 1, curvature 0 at eps.
    double const s = (r - half) / half;
    double const s3 = s * s * s;
    return half + half * s3 * (6 + s * (-8 + 3 * s));
}

double pseudo_kappa(PseudoMaxwell const &p, double r) noexcept
{
    double const q = smooth_ramp_down((r - p.r0) / (p.r1 - p.r0));
    return p.lambda_floor + (1 - p.lambda_floor) * q;
}

namespace {

// Shared by Soft and SoftCutoff so the two agree exactly where kappa_eps(r) = r.
double soft_power(double r, double gamma) noexcept
{
    if (gamma == -1)
        return 1 / r;
    return std::pow(r, gamma);
}

} // namespace

double kernel_weight(KernelSpec const &spec, double r2, SingularPolicy policy, FloorTally *tally)
{
    return std::visit(
        overloaded{
            [](Maxwell const &) { return 1.0; },
            [&](PseudoMaxwell const &p) { return pseudo_kappa(p, r2); },
            [&](Soft const &s) {
                double r = std::sqrt(r2);
                if (r < kSoftFloor) {
                    if (policy == SingularPolicy::kThrow && r2 != 0)
                        throw SingularRelativeVelocity("soft kernel: |z| = " + std::to_string(r) +
                                                       " below floor");
                    if (tally)
                        ++tally->events;
                    r = kSoftFloor;
                }
                return soft_power(r, s.gamma);
            },
            [&](SoftCutoff const &s) { return soft_power(cutoff_kappa(s.epsilon, std::sqrt(r2)), s.gamma); },
        },
        spec.family);
}

namespace {

// z = 0 with a Soft kernel: a(0) = 0 when gamma > -2, b(0) = 0 when gamma > -1;
// otherwise the field has no limit at the origin.
void check_origin(KernelSpec const &spec, double r2, double threshold, SingularPolicy policy)
{
    if (r2 != 0 || policy != SingularPolicy::kThrow)
        return;
    if (auto const *s = std::get_if<Soft>(&spec.family); s && !(s->gamma > threshold))
        throw SingularRelativeVelocity("soft kernel: field undefined at z = 0 for gamma = " +
                                       std::to_string(s->gamma));
}

} // namespace

PsdMatrix a_field(KernelSpec const &spec, std::span<double const> z, SingularPolicy policy, FloorTally *tally)
{
    auto const d = z.size();
    double const r2 = norm2(z);
    check_origin(spec, r2, -2, policy);
    double const w = kernel_weight(spec, r2, policy, tally);
    SymMatrix a(d);
    for (std::size_t i = 0; i < d; ++i) {
        a.set(i, i, w * (r2 - z[i] * z[i]));
        for (std::size_t j = i + 1; j < d; ++j)
            a.set(i, j, -w * (z[i] * z[j]));
    }
    // Rank d-1 projection scaled by w >= 0: PSD by construction.
    return PsdMatrix::trusted(std::move(a));
}

Vec b_field(KernelSpec const &spec, std::span<double const> z, SingularPolicy policy, FloorTally *tally)
{
    auto const d = z.size();
    double const r2 = norm2(z);
    check_origin(spec, r2, -1, policy);
    double const w = kernel_weight(spec, r2, policy, tally);
    double const c = -static_cast<double>(d - 1) * w;
    Vec b(d);
    for (std::size_t i = 0; i < d; ++i)
        b[i] = c * z[i];
    return b;
}

} // namespace landau
