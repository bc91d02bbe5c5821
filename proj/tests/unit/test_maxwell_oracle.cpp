#include "doctest.h"
#include "helpers.hpp"

#include "landau/ensemble.hpp"
#include "landau/errors.hpp"
#include "landau/kernels.hpp"
#include "landau/maxwell_oracle.hpp"

#include <cmath>
#include <random>

using namespace landau;
using test::diag;
using test::max_abs_diff;

namespace {

MomentFlow preset_flow()
{
    return MomentFlow::from_law(InitialLaw::paper_sec5());
}

// Classical RK4 on dM/dt = 2 E I - 2 d M, independent of the closed form.
SymMatrix rk4_flow(SymMatrix m, double energy, double t, int steps)
{
    auto const d = m.dim();
    auto rhs = [&](SymMatrix const &x) {
        SymMatrix out = 2 * energy * SymMatrix::identity(d);
        out -= (2.0 * static_cast<double>(d)) * x;
        return out;
    };
    double const h = t / steps;
    for (int s = 0; s < steps; ++s) {
        auto const k1 = rhs(m);
        auto const k2 = rhs(m + (h / 2) * k1);
        auto const k3 = rhs(m + (h / 2) * k2);
        auto const k4 = rhs(m + h * k3);
        m += (h / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return m;
}

} // namespace

TEST_SUITE("maxwell_oracle")
{
    TEST_CASE("preset flow")
    {
        auto const flow = preset_flow();
        CHECK(flow.dim == 2);
        CHECK(flow.energy == doctest::Approx(1.02));
        CHECK(max_abs_diff(covariance_flow(flow, 0), diag({0.01, 1.01})) < 1e-15);
        CHECK(max_abs_diff(covariance_flow(flow, 40), 0.51 * SymMatrix::identity(2)) < 1e-15);

        auto const quarter = covariance_flow(flow, 0.25);
        double const e = std::exp(-1.0);
        CHECK(quarter(0, 0) == doctest::Approx(0.51 - 0.5 * e).epsilon(1e-14));
        CHECK(quarter(1, 1) == doctest::Approx(0.51 + 0.5 * e).epsilon(1e-14));
        CHECK(quarter(0, 0) == doctest::Approx(0.3261).epsilon(1e-4));
        CHECK(quarter(1, 1) == doctest::Approx(0.6939).epsilon(1e-4));
        CHECK(quarter(0, 1) == 0.0);
    }

    TEST_CASE("closed form agrees with RK4 on the moment ODE")
    {
        std::mt19937_64 rng(8);
        for (std::size_t d : {2u, 3u}) {
            auto const m0 = test::random_gram(rng, d, d);
            auto const flow = MomentFlow::from_second_moments(m0);
            for (double t : {0.05, 0.25, 1.0, 3.0}) {
                auto const ref = rk4_flow(m0, m0.trace(), t, 4000);
                CHECK(max_abs_diff(covariance_flow(flow, t), ref) <= 1e-12 * opnorm(m0));
                CHECK(covariance_flow(flow, t).trace() == doctest::Approx(m0.trace()).epsilon(1e-14));
            }
        }
    }

    TEST_CASE("finite differences reproduce the ODE right-hand side")
    {
        auto const flow = preset_flow();
        double const h = 1e-5;
        double worst = 0;
        for (int k = 0; k <= 30; ++k) {
            double const t = 0.1 * k;
            auto const m = covariance_flow(flow, t);
            auto fd = covariance_flow(flow, t + h) - m;
            fd *= 1 / h;
            SymMatrix rhs = 2 * flow.energy * SymMatrix::identity(2);
            rhs -= 4.0 * m;
            worst = std::max(worst, max_abs_diff(fd, rhs) / h);
        }
        // second derivative is at most (2d)^2 |M0 - M_inf| / 2 = 8
        CHECK(worst < 10.0);
    }

    TEST_CASE("ellipticity bound")
    {
        auto const flow = preset_flow();
        CHECK(ellipticity_lower_bound(flow, 0) == doctest::Approx(0.01).epsilon(1e-12));
        CHECK(ellipticity_lower_bound(flow, 30) == doctest::Approx(0.51).epsilon(1e-12));
        auto const stationary = MomentFlow::from_second_moments(0.5 * SymMatrix::identity(2));
        for (double t : {0.0, 0.3, 5.0})
            CHECK(ellipticity_lower_bound(stationary, t) == doctest::Approx(0.5));
        CHECK_THROWS_AS((void)ellipticity_lower_bound(flow, -1), DomainError);
        CHECK_THROWS_AS((void)covariance_flow(flow, -0.1), DomainError);
    }

    TEST_CASE("McKean coefficients")
    {
        auto const flow = preset_flow();
        std::vector<double> const origin{0, 0};
        auto const c0 = mckean_coefficients(flow, origin, 0);
        CHECK(max_abs_diff(c0.a, diag({1.01, 0.01})) < 1e-15);
        CHECK(c0.b[0] == 0.0);
        CHECK(c0.b[1] == 0.0);

        std::vector<double> const e1{1, 0};
        auto const inf = mckean_coefficients(flow, e1, 50);
        CHECK(max_abs_diff(inf.a, diag({0.51, 1.51})) < 1e-14);
        CHECK(inf.b[0] == -1.0);
        CHECK(inf.b[1] == 0.0);

        auto const stationary = MomentFlow::from_second_moments(0.51 * SymMatrix::identity(2));
        std::vector<double> const x{0.3, 0.9};
        CHECK(mckean_coefficients(stationary, x, 0).a.matrix() == mckean_coefficients(stationary, x, 2).a.matrix());

        Vec const off{0.1, 0.0};
        auto const shifted = MomentFlow::from_second_moments(diag({1, 1}), off);
        CHECK_THROWS_AS((void)mckean_coefficients(shifted, x, 0), NotCentered);
    }

    TEST_CASE("McKean coefficients respect the ellipticity bound")
    {
        std::mt19937_64 rng(9);
        std::normal_distribution<double> normal;
        std::uniform_real_distribution<double> time(0, 3);
        for (std::size_t d : {2u, 3u}) {
            auto const flow = MomentFlow::from_second_moments(test::random_gram(rng, d, d + 1));
            for (int k = 0; k < 1000; ++k) {
                std::vector<double> x(d);
                for (auto &v : x)
                    v = normal(rng);
                double const t = time(rng);
                double const lo = min_eig(mckean_coefficients(flow, x, t).a);
                CHECK(lo >= ellipticity_lower_bound(flow, t) - 1e-10);
            }
        }
        auto const flow = preset_flow();
        for (int k = 0; k < 1000; ++k) {
            std::vector<double> x{normal(rng), normal(rng)};
            double const t = time(rng);
            CHECK(min_eig(mckean_coefficients(flow, x, t).a) >= ellipticity_lower_bound(flow, t) - 1e-10);
        }
    }

    TEST_CASE("empirical field of Gaussian samples converges to the McKean field")
    {
        auto const flow = preset_flow();
        double const t = 0.25;
        auto const m = covariance_flow(flow, t);
        auto const law = InitialLaw{{GaussianComponent{0, std::sqrt(m(0, 0))}, GaussianComponent{0, std::sqrt(m(1, 1))}}};
        std::size_t const n = 100000;
        auto const ens = sample_initial(law, n, 31);
        KernelSpec const spec{2, Maxwell{}};
        std::vector<double> const x{0.4, -0.2};
        double s[3] = {0, 0, 0}, s2[3] = {0, 0, 0};
        for (std::size_t k = 0; k < n; ++k) {
            std::vector<double> z{x[0] - ens.state(k)[0], x[1] - ens.state(k)[1]};
            auto const a = a_field(spec, z);
            double const v[3] = {a(0, 0), a(0, 1), a(1, 1)};
            for (int q = 0; q < 3; ++q) {
                s[q] += v[q];
                s2[q] += v[q] * v[q];
            }
        }
        auto const want = mckean_coefficients(flow, x, t).a;
        double const target[3] = {want(0, 0), want(0, 1), want(1, 1)};
        double const dn = static_cast<double>(n);
        for (int q = 0; q < 3; ++q) {
            double const mean = s[q] / dn;
            double const se = std::sqrt((s2[q] / dn - mean * mean) / dn);
            CHECK(std::abs(mean - target[q]) <= 4 * se);
        }
    }
}
