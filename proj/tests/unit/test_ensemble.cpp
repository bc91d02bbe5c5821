#include "doctest.h"
#include "helpers.hpp"

#include "landau/coefficient_field.hpp"
#include "landau/ensemble.hpp"
#include "landau/errors.hpp"
#include "landau/kernels.hpp"

#include <algorithm>
#include <numeric>
#include <random>

using namespace landau;
using test::max_abs_diff;

namespace {

Ensemble from_points(std::size_t d, std::vector<double> pts)
{
    return Ensemble(d, std::move(pts));
}

Ensemble random_ensemble(std::mt19937_64 &rng, std::size_t d, std::size_t n, double shift = 0)
{
    std::normal_distribution<double> normal;
    std::vector<double> s(d * n);
    for (auto &v : s)
        v = normal(rng) + shift;
    return Ensemble(d, std::move(s));
}

// Plain double loop over a_field, the reference for the chunked kernel.
SymMatrix naive_a(KernelSpec const &spec, std::span<double const> x, Ensemble const &ens,
                  std::optional<std::size_t> exclude)
{
    auto const d = ens.dim();
    SymMatrix sum(d);
    std::size_t m = 0;
    for (std::size_t k = 0; k < ens.size(); ++k) {
        if (exclude && *exclude == k)
            continue;
        std::vector<double> z(d);
        for (std::size_t i = 0; i < d; ++i)
            z[i] = x[i] - ens.state(k)[i];
        sum += a_field(spec, z, SingularPolicy::kFloor);
        ++m;
    }
    sum *= 1.0 / static_cast<double>(m);
    return sum;
}

} // namespace

TEST_SUITE("ensemble")
{
    TEST_CASE("sampling is deterministic and keyed by replicate")
    {
        auto const law = InitialLaw::paper_sec5();
        auto const a = sample_initial(law, 100, 77, 0);
        auto const b = sample_initial(law, 100, 77, 0);
        auto const c = sample_initial(law, 100, 77, 1);
        CHECK(a == b);
        CHECK_FALSE(a.states()[0] == c.states()[0]);
        CHECK(a.seed == 77);
        CHECK(c.replicate == 1);
        // prefix stability: particle i does not depend on n
        auto const big = sample_initial(law, 200, 77, 0);
        CHECK(std::equal(a.states().begin(), a.states().end(), big.states().begin()));
    }

    TEST_CASE("degenerate Gaussian sits at its mean")
    {
        auto const law = InitialLaw::isotropic(3, GaussianComponent{0.0, 0.0});
        auto const ens = sample_initial(law, 10, 1);
        for (double v : ens.states())
            CHECK(v == 0.0);
        auto const shifted = sample_initial(InitialLaw::isotropic(2, GaussianComponent{1.5, 0.0}), 4, 1);
        for (double v : shifted.states())
            CHECK(v == 1.5);
    }

    TEST_CASE("preset law moments")
    {
        auto const law = InitialLaw::paper_sec5();
        auto const m2 = law.second_moments();
        CHECK(m2(0, 0) == doctest::Approx(0.01));
        CHECK(m2(1, 1) == doctest::Approx(1.01));
        CHECK(m2(0, 1) == 0.0);
        CHECK(m2.trace() == doctest::Approx(1.02));

        std::size_t const n = 100000;
        auto const ens = sample_initial(law, n, 2024);
        // Standard errors from the sample itself.
        double e1 = 0, e2 = 0;
        double c11 = 0, c22 = 0, c12 = 0, s11 = 0, s22 = 0, s12 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            auto const x = ens.state(i);
            double const e = x[0] * x[0] + x[1] * x[1];
            e1 += e;
            e2 += e * e;
            c11 += x[0] * x[0];
            s11 += x[0] * x[0] * x[0] * x[0];
            c22 += x[1] * x[1];
            s22 += x[1] * x[1] * x[1] * x[1];
            c12 += x[0] * x[1];
            s12 += x[0] * x[0] * x[1] * x[1];
        }
        auto se = [n](double s, double s2) {
            double const m = s / static_cast<double>(n);
            return std::sqrt((s2 / static_cast<double>(n) - m * m) / static_cast<double>(n));
        };
        CHECK(std::abs(e1 / n - 1.02) <= 3 * se(e1, e2));
        auto const cov = covariance(ens);
        CHECK(std::abs(cov(0, 0) - 0.01) <= 3 * se(c11, s11) + 1e-4);
        CHECK(std::abs(cov(1, 1) - 1.01) <= 3 * se(c22, s22) + 1e-4);
        CHECK(std::abs(cov(0, 1)) <= 3 * se(c12, s12) + 1e-4);
        CHECK(moment(ens, 2) == doctest::Approx(e1 / n).epsilon(1e-12));
    }

    TEST_CASE("empirical_a examples")
    {
        KernelSpec const maxwell{2, Maxwell{}};
        std::vector<double> const origin{0, 0};
        std::vector<double> const x{0.3, -0.4};

        auto const single = from_points(2, {1.0, 2.0});
        std::vector<double> const z{x[0] - 1.0, x[1] - 2.0};
        CHECK(max_abs_diff(empirical_a(maxwell, x, single), a_field(maxwell, z)) < 1e-15);

        auto const self = from_points(2, {0.3, -0.4});
        CHECK(max_abs_diff(empirical_a(maxwell, x, self), SymMatrix::zero(2)) == 0.0);

        auto const two = from_points(2, {1, 0, 0, 1});
        CHECK(max_abs_diff(empirical_a(maxwell, origin, two), 0.5 * SymMatrix::identity(2)) < 1e-15);
    }

    TEST_CASE("empirical_b examples")
    {
        KernelSpec const maxwell{2, Maxwell{}};
        std::vector<double> const origin{0, 0};
        auto const two = from_points(2, {1, 0, 0, 1});
        auto const b = empirical_b(maxwell, origin, two);
        CHECK(b[0] == doctest::Approx(0.5));
        CHECK(b[1] == doctest::Approx(0.5));

        auto const single = from_points(2, {1.0, 2.0});
        std::vector<double> const x{0.5, 0.5};
        auto const b1 = empirical_b(maxwell, x, single);
        CHECK(b1[0] == doctest::Approx(0.5));
        CHECK(b1[1] == doctest::Approx(1.5));

        std::mt19937_64 rng(1);
        auto const ens = random_ensemble(rng, 2, 50);
        auto const centroid = mean(ens);
        auto const bc = empirical_b(maxwell, as_span(centroid), ens);
        CHECK(std::abs(bc[0]) < 1e-14);
        CHECK(std::abs(bc[1]) < 1e-14);
    }

    TEST_CASE("moment examples")
    {
        auto const sym = from_points(2, {1, 0, -1, 0});
        auto const m = mean(sym);
        CHECK(m[0] == 0.0);
        CHECK(m[1] == 0.0);
        CHECK(moment(sym, 2) == 1.0);
        CHECK(max_abs_diff(covariance(sym), test::diag({1, 0})) == 0.0);
        CHECK(max_abs_diff(second_moments(sym), test::diag({1, 0})) == 0.0);

        auto const origin = from_points(2, {0, 0});
        CHECK(moment(origin, 2) == 0.0);
        CHECK(moment(origin, 4) == 0.0);
        CHECK(max_abs_diff(covariance(origin), SymMatrix::zero(2)) == 0.0);
    }

    TEST_CASE("chunked sums agree with the naive double loop")
    {
        std::mt19937_64 rng(2);
        for (std::size_t d : {2u, 3u, 4u})
            for (auto const &spec : {KernelSpec{d, Maxwell{}}, KernelSpec{d, PseudoMaxwell{}},
                                     KernelSpec{d, Soft{-1.0}}, KernelSpec{d, SoftCutoff{-2.5, 0.2}}})
                for (std::size_t n : {1u, 3u, 63u, 64u, 65u, 130u}) {
                    auto const ens = random_ensemble(rng, d, n);
                    for (std::size_t i = 0; i < std::min<std::size_t>(n, 3); ++i) {
                        std::optional<std::size_t> ex;
                        if (spec.is_soft() || (n > 1 && i == 1))
                            ex = i;
                        if (ex && n < 2)
                            continue;
                        auto const got = empirical_a(spec, ens.state(i), ens, ex);
                        auto const want = naive_a(spec, ens.state(i), ens, ex);
                        CHECK(max_abs_diff(got, want) <= 1e-12 * (1 + opnorm(want)));
                    }
                }
    }

    TEST_CASE("Maxwell decomposition around a centered ensemble")
    {
        std::mt19937_64 rng(3);
        KernelSpec const maxwell{2, Maxwell{}};
        for (int t = 0; t < 50; ++t) {
            auto ens = random_ensemble(rng, 2, 1 + static_cast<std::size_t>(t));
            auto const m = mean(ens);
            for (std::size_t i = 0; i < ens.size(); ++i)
                for (std::size_t k = 0; k < 2; ++k)
                    ens.state(i)[k] -= m[k];
            std::vector<double> const origin{0, 0};
            std::normal_distribution<double> normal;
            std::vector<double> const x{normal(rng), normal(rng)};
            auto const lhs = empirical_a(maxwell, x, ens);
            auto const rhs = a_field(maxwell, x).matrix() + empirical_a(maxwell, origin, ens).matrix();
            CHECK(max_abs_diff(lhs, rhs) <= 1e-10 * opnorm(rhs));
        }
    }

    TEST_CASE("exclusion identity")
    {
        std::mt19937_64 rng(4);
        for (auto const &spec : {KernelSpec{2, Maxwell{}}, KernelSpec{3, PseudoMaxwell{}}, KernelSpec{2, Soft{-1.0}}}) {
            auto const d = spec.dim;
            auto const ens = random_ensemble(rng, d, 40);
            std::normal_distribution<double> normal;
            std::vector<double> x(d);
            for (auto &v : x)
                v = normal(rng);
            double const n = 40;
            for (std::size_t i : {0u, 17u, 39u}) {
                std::vector<double> z(d);
                for (std::size_t k = 0; k < d; ++k)
                    z[k] = x[k] - ens.state(i)[k];
                auto full = empirical_a(spec, x, ens).matrix();
                full *= n;
                auto part = empirical_a(spec, x, ens, i).matrix();
                part *= n - 1;
                part += a_field(spec, z);
                CHECK(max_abs_diff(full, part) <= 1e-12 * opnorm(full));
            }
        }
    }

    TEST_CASE("permutation invariance")
    {
        std::mt19937_64 rng(5);
        KernelSpec const spec{2, SoftCutoff{-1.0, 0.1}};
        auto const ens = random_ensemble(rng, 2, 300);
        std::vector<std::size_t> perm(300);
        std::iota(perm.begin(), perm.end(), 0u);
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<double> shuffled;
        for (auto p : perm)
            for (double v : ens.state(p))
                shuffled.push_back(v);
        Ensemble const other(2, shuffled);
        std::vector<double> const x{0.1, 0.2};
        auto const a1 = empirical_a(spec, x, ens);
        auto const a2 = empirical_a(spec, x, other);
        CHECK(max_abs_diff(a1, a2) <= 1e-12 * opnorm(a1));
    }

    TEST_CASE("moment field matches the pairwise field for Maxwell")
    {
        std::mt19937_64 rng(6);
        for (std::size_t d : {2u, 3u})
            for (bool exclusion : {false, true}) {
                auto const ens = random_ensemble(rng, d, 200, 0.7);
                KernelSpec const spec{d, Maxwell{}};
                PairwiseField pairwise(spec, exclusion);
                MaxwellMomentField moments(exclusion);
                pairwise.bind(ens);
                moments.bind(ens);
                for (std::size_t i = 0; i < ens.size(); i += 13) {
                    auto const p = pairwise.evaluate(i, ens.state(i));
                    auto const m = moments.evaluate(i, ens.state(i));
                    CHECK(max_abs_diff(p.a, m.a) <= 1e-11 * (1 + opnorm(p.a)));
                    for (std::size_t k = 0; k < d; ++k)
                        CHECK(p.b[k] == doctest::Approx(m.b[k]).epsilon(1e-11).scale(1.0));
                }
            }
    }

    TEST_CASE("argument checks")
    {
        KernelSpec const spec{2, Maxwell{}};
        auto const one = from_points(2, {0, 0});
        std::vector<double> const x{0, 0};
        CHECK_THROWS_AS((void)empirical_a(spec, x, one, 0), DomainError);
        std::vector<double> const x3{0, 0, 0};
        CHECK_THROWS_AS((void)empirical_a(spec, x3, one), SizeMismatch);
        CHECK_THROWS_AS((void)make_empirical_field({2, Soft{-1.0}}, true, Evaluator::kMoments), DomainError);
        CHECK_THROWS_AS(Ensemble(2, std::vector<double>{1, 2, 3}), SizeMismatch);

        Ensemble bad = from_points(2, {0, 0, 1, std::nan("")});
        CHECK_THROWS_AS(bad.check_finite(), NonFinite);
    }

    TEST_CASE("soft kernels floor coincident particles and count them")
    {
        KernelSpec const spec{2, Soft{-1.0}};
        auto const ens = from_points(2, {0, 0, 0, 0, 1, 0});
        FloorTally tally;
        std::vector<double> const x{0, 0};
        auto const a = empirical_a(spec, x, ens, 0, &tally);
        CHECK(tally.events == 1);
        CHECK(std::isfinite(a(0, 0)));
    }
}
