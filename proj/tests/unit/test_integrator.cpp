#include "doctest.h"
#include "helpers.hpp"

#include "landau/coefficient_field.hpp"
#include "landau/errors.hpp"
#include "landau/integrator.hpp"
#include "landau/maxwell_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

using namespace landau;
using test::max_abs_diff;

namespace {

SimConfig preset(std::size_t n, std::uint32_t N, double T, std::uint32_t replicates = 1)
{
    SimConfig c;
    c.kernel = {2, Maxwell{}};
    c.law = InitialLaw::paper_sec5();
    c.n = n;
    c.steps_per_unit = N;
    c.horizon = T;
    c.seed = 123;
    c.replicates = replicates;
    return c;
}

struct Stats {
    double mean = 0;
    double se = 0;
};

Stats stats(std::vector<double> const &v)
{
    Stats s;
    for (double x : v)
        s.mean += x;
    s.mean /= static_cast<double>(v.size());
    double ss = 0;
    for (double x : v)
        ss += (x - s.mean) * (x - s.mean);
    s.se = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
    return s;
}

} // namespace

TEST_SUITE("integrator")
{
    TEST_CASE("a lone Maxwell particle never moves")
    {
        KernelSpec const spec{2, Maxwell{}};
        Ensemble ens(2, std::vector<double>{0.4, -1.3});
        std::vector<double> const noise{0.7, -2.2};
        for (auto method : {SqrtMethod::kCholesky, SqrtMethod::kSymSqrt}) {
            auto const next = step(spec, ens, 0.01, noise, false, method);
            CHECK(next.state(0)[0] == 0.4);
            CHECK(next.state(0)[1] == -1.3);
            CHECK(next.step_index == 1);
            CHECK(next.time == 0.01);
        }
    }

    TEST_CASE("noise-free drift step")
    {
        KernelSpec const spec{2, Maxwell{}};
        Ensemble ens(2, std::vector<double>{1, 0, -1, 0});
        std::vector<double> const noise(4, 0.0);
        auto const next = step(spec, ens, 0.01, noise);
        CHECK(next.state(0)[0] == doctest::Approx(0.99).epsilon(1e-15));
        CHECK(next.state(0)[1] == 0.0);
        CHECK(next.state(1)[0] == doctest::Approx(-0.99).epsilon(1e-15));
        // the moment path gives the same numbers
        MaxwellMomentField moments(false);
        auto const alt = step(moments, ens, 0.01, noise);
        CHECK(alt.state(0)[0] == doctest::Approx(0.99).epsilon(1e-15));
    }

    TEST_CASE("identity test double gives a pure Brownian step")
    {
        ConstantField field(PsdMatrix(SymMatrix::identity(2)), Vec{0.0, 0.0});
        Ensemble ens(2, std::vector<double>{1, 2, 3, 4});
        std::vector<double> const noise{0.1, 0.2, -0.3, 0.4};
        for (auto method : {SqrtMethod::kCholesky, SqrtMethod::kSymSqrt}) {
            auto const next = step(field, ens, 0.5, noise, {method, 1});
            CHECK(next.state(0)[0] == 1.1);
            CHECK(next.state(0)[1] == 2.2);
            CHECK(next.state(1)[0] == 2.7);
            CHECK(next.state(1)[1] == 4.4);
        }
    }

    TEST_CASE("non-finite states abort the step")
    {
        ConstantField field(PsdMatrix(SymMatrix::identity(2)), Vec{1e308, 0.0});
        Ensemble ens(2, std::vector<double>{1e308, 0});
        std::vector<double> const noise{0, 0};
        CHECK_THROWS_AS((void)step(field, ens, 10.0, noise), NonFinite);
        CHECK_THROWS_AS((void)step(field, ens, 0.1, std::vector<double>{0.0}), SizeMismatch);
    }

    TEST_CASE("config validation")
    {
        auto c = preset(10, 10, 0.25);
        CHECK_THROWS_AS(c.validate(), DomainError); // 2.5 steps
        c.horizon = 0.3;
        CHECK_NOTHROW(c.validate());
        CHECK(c.total_steps() == 3);
        c.kernel = {2, Soft{-1.0}};
        CHECK(c.self_exclusion());
        c.exclusion = false;
        CHECK_THROWS_AS(c.validate(), DomainError);
        c.exclusion.reset();
        c.n = 1;
        CHECK_THROWS_AS(c.validate(), DomainError);
        c = preset(10, 10, 1);
        c.kernel.dim = 3;
        CHECK_THROWS_AS(c.validate(), DomainError);
        c = preset(10, 10, 1);
        c.kernel = {2, PseudoMaxwell{}};
        c.evaluator = Evaluator::kMoments;
        CHECK_THROWS_AS(c.validate(), DomainError);
        CHECK_FALSE(preset(10, 10, 1).self_exclusion());
    }

    TEST_CASE("simulate is deterministic and worker-count independent")
    {
        for (auto const &kernel : {KernelSpec{2, Maxwell{}}, KernelSpec{2, SoftCutoff{-1.0, 0.1}}}) {
            auto c = preset(150, 20, 0.5);
            c.kernel = kernel;
            c.stride = 3;
            auto const a = simulate(c);
            auto const b = simulate(c);
            c.workers = 3;
            auto const w = simulate(c);
            REQUIRE(a.snapshots.size() == b.snapshots.size());
            CHECK(a.snapshots.size() == 1 + 3 + 1); // 0, 3, 6, 9, 10
            for (std::size_t k = 0; k < a.snapshots.size(); ++k) {
                CHECK(a.snapshots[k].state == b.snapshots[k].state);
                CHECK(a.snapshots[k].state == w.snapshots[k].state);
            }
            CHECK(a.snapshots.back().state.time == doctest::Approx(0.5));
        }
    }

    TEST_CASE("pairwise and moment evaluators drive the same Maxwell dynamics")
    {
        auto c = preset(80, 20, 0.5);
        c.evaluator = Evaluator::kPairwise;
        auto const p = simulate(c);
        c.evaluator = Evaluator::kMoments;
        auto const m = simulate(c);
        CHECK(p.interactions == 80u * 80u * 10u);
        CHECK(m.interactions == 0u);
        auto const &x = p.snapshots.back().state;
        auto const &y = m.snapshots.back().state;
        for (std::size_t k = 0; k < x.states().size(); ++k)
            CHECK(x.states()[k] == doctest::Approx(y.states()[k]).epsilon(1e-9).scale(1.0));
    }

    TEST_CASE("exchangeability: permuting particles with their keys permutes the step")
    {
        std::mt19937_64 rng(17);
        auto const ens = sample_initial(InitialLaw::paper_sec5(), 60, 5);
        std::vector<std::uint32_t> perm(60);
        std::iota(perm.begin(), perm.end(), 0u);
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<double> states;
        for (auto p : perm)
            for (double v : ens.state(p))
                states.push_back(v);
        Ensemble permuted(2, states);
        permuted.set_keys(perm);

        NoisePlan const plan{5, 10, 1};
        for (auto const &spec : {KernelSpec{2, Maxwell{}}, KernelSpec{2, PseudoMaxwell{}}}) {
            auto field = make_empirical_field(spec, false, Evaluator::kPairwise);
            std::vector<double> n1(120), n2(120);
            fill_noise(plan, ens, 0, n1);
            fill_noise(plan, permuted, 0, n2);
            auto const a = step(*field, ens, 0.1, n1);
            auto const b = step(*field, permuted, 0.1, n2);
            for (std::size_t i = 0; i < 60; ++i)
                for (std::size_t k = 0; k < 2; ++k)
                    CHECK(b.state(i)[k] == doctest::Approx(a.state(perm[i])[k]).epsilon(1e-12).scale(1.0));
        }
    }

    TEST_CASE("conservation in mean across replicates")
    {
        auto c = preset(500, 200, 1.0);
        std::vector<double> m1, m2, energy;
        for (std::uint32_t r = 0; r < 32; ++r) {
            auto const traj = simulate(c, r);
            auto const &last = traj.snapshots.back().state;
            auto const m = mean(last);
            m1.push_back(m[0]);
            m2.push_back(m[1]);
            energy.push_back(moment(last, 2));
        }
        auto const s1 = stats(m1), s2 = stats(m2), se = stats(energy);
        CHECK(std::abs(s1.mean) <= 3 * s1.se);
        CHECK(std::abs(s2.mean) <= 3 * s2.se);
        CHECK(std::abs(se.mean - 1.02) <= 3 * se.se);
    }

    TEST_CASE("reference process")
    {
        auto c = preset(10000, 100, 1.0);
        c.stride = 100;
        auto const flow = MomentFlow::from_law(c.law);
        auto const ref = simulate_mckean_reference(c, flow);
        auto const particles = simulate(preset(10000, 100, 0.0));
        CHECK(ref.snapshots.front().state == particles.snapshots.front().state);

        ReferenceField field(flow);
        Ensemble probe(2, std::vector<double>{0.3, 0.1});
        probe.time = 0.4;
        field.bind(probe);
        auto const v = field.evaluate(0, probe.state(0));
        auto const want = mckean_coefficients(flow, probe.state(0), 0.4);
        CHECK(max_abs_diff(v.a, want.a) <= 1e-12);
        CHECK(v.b[0] == want.b[0]);

        auto const &last = ref.snapshots.back().state;
        auto const cov = covariance(last);
        auto const target = covariance_flow(flow, 1.0);
        // entrywise standard errors of the sample covariance
        std::size_t const n = last.size();
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = i; j < 2; ++j) {
                double s = 0, s2 = 0;
                for (std::size_t k = 0; k < n; ++k) {
                    double const v2 = last.state(k)[i] * last.state(k)[j];
                    s += v2;
                    s2 += v2 * v2;
                }
                double const m = s / static_cast<double>(n);
                double const se = std::sqrt((s2 / static_cast<double>(n) - m * m) / static_cast<double>(n));
                CHECK(std::abs(cov(i, j) - target(i, j)) <= 4 * se);
            }

        c.law = InitialLaw::isotropic(2, GaussianComponent{0.5, 1.0});
        auto const shifted = MomentFlow::from_law(c.law);
        CHECK_THROWS_AS((void)simulate_mckean_reference(c, shifted), NotCentered);
        c = preset(10, 10, 1.0);
        c.kernel = {2, PseudoMaxwell{}};
        CHECK_THROWS_AS((void)simulate_mckean_reference(c, flow), DomainError);
    }

    TEST_CASE("time refinement with constant coefficients has no gap")
    {
        auto c = preset(50, 10, 1.0);
        SymMatrix s(2);
        s.set(0, 0, 2.0);
        s.set(0, 1, 0.5);
        s.set(1, 1, 1.0);
        ConstantField coarse(PsdMatrix(s), Vec{0.3, -0.1});
        ConstantField fine(PsdMatrix(s), Vec{0.3, -0.1});
        auto const out = coupled_time_refinement(c, 4, coarse, fine);
        for (double g : out.sup_gap_sq)
            CHECK(g <= 1e-26);
    }

    TEST_CASE("time refinement is deterministic and shrinks with N")
    {
        auto c = preset(100, 10, 1.0);
        auto const a = coupled_time_refinement(c, 2);
        auto const b = coupled_time_refinement(c, 2);
        CHECK(a.sup_gap_sq == b.sup_gap_sq);
        CHECK(a.coarse.snapshots.size() == 11);
        CHECK(a.fine.snapshots.back().state.time == doctest::Approx(1.0));
        c.replicates = 4;
        auto const coarse_gap = stats(refinement_gap_estimates(c, 2)).mean;
        c.steps_per_unit = 80;
        auto const fine_gap = stats(refinement_gap_estimates(c, 2)).mean;
        CHECK(fine_gap < coarse_gap / 3);

        c.kernel = {2, Soft{-1.0}};
        CHECK_THROWS_AS((void)coupled_time_refinement(c, 2), DomainError);
    }

    TEST_CASE("particles against reference")
    {
        auto c = preset(100, 50, 0.5);
        c.replicates = 3;
        auto const est = coupled_particle_vs_reference(c);
        REQUIRE(est.size() == 3);
        for (double e : est) {
            CHECK(e > 0);
            CHECK(std::isfinite(e));
        }
        // coupling collapses when the particle field is the reference field itself
        auto const flow = MomentFlow::from_law(c.law);
        ReferenceField r1(flow), r2(flow);
        for (double g : coupled_sup_gap(c, r1, r2))
            CHECK(g == 0.0);
    }

    TEST_CASE("N floor for the particle-number experiment")
    {
        CHECK(n_floor_steps(50, 0.5) == 500);
        CHECK(n_floor_steps(1600, 0.5) == 500);
        CHECK(n_floor_steps(10000, 1.0) == 800);
        CHECK(n_floor_steps(50, 0.3) == 500);
        auto const odd = n_floor_steps(50, 1.0 / 3.0);
        CHECK(odd % 3 == 0);
        CHECK(odd == 501);
    }

    TEST_CASE("square-root choice changes paths but not the step law")
    {
        auto c = preset(2000, 20, 0.5);
        auto const chol = simulate(c);
        c.sqrt_method = SqrtMethod::kSymSqrt;
        auto const sym = simulate(c);
        CHECK_FALSE(chol.snapshots.back().state == sym.snapshots.back().state);
        auto const a = covariance(chol.snapshots.back().state);
        auto const b = covariance(sym.snapshots.back().state);
        CHECK(max_abs_diff(a, b) < 0.15);
    }
}
