#include "doctest.h"

#include "landau/errors.hpp"
#include "landau/lemmas.hpp"

#include <cmath>

using namespace landau;

namespace {

// Square root with the root of the smallest eigenvalue negated: it still
// squares back to A but is no longer continuous in A.
SymMatrix flipped_sqrt(PsdMatrix const &a)
{
    auto const e = eigen_decompose(a.matrix());
    std::size_t const d = a.dim();
    SymMatrix s(d);
    for (std::size_t k = 0; k < d; ++k) {
        double const root = std::sqrt(std::max(0.0, e.values[k])) * (k == 0 ? -1.0 : 1.0);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = i; j < d; ++j)
                s.at(i, j) += root * e.vectors[i * d + k] * e.vectors[j * d + k];
    }
    return s;
}

} // namespace

TEST_SUITE("lemmas")
{
    TEST_CASE("all suites pass for the library square root")
    {
        LemmaOptions options;
        options.trials = 10000;
        for (auto const &r : run_lemma_suites(options)) {
            INFO(r.name << " worst excess " << r.worst_excess << "\n" << r.counterexample);
            CHECK(r.passed());
            CHECK(r.trials == 10000);
            CHECK(r.counterexample.empty());
        }
    }

    TEST_CASE("a discontinuous square root is caught with a counterexample")
    {
        LemmaOptions options;
        options.trials = 2000;
        auto const holder = check_sqrt_holder(options, flipped_sqrt);
        CHECK_FALSE(holder.passed());
        CHECK(holder.worst_excess > 0);
        CHECK(holder.counterexample.find("A") != std::string::npos);
        // squaring back still works, so reconstruction alone cannot tell
        CHECK(check_sqrt_reconstruction(options, flipped_sqrt).passed());
    }

    TEST_CASE("a scaled square root fails reconstruction")
    {
        LemmaOptions options;
        options.trials = 200;
        auto const scaled = [](PsdMatrix const &a) { return 1.01 * sym_sqrt(a).matrix(); };
        auto const r = check_sqrt_reconstruction(options, scaled);
        CHECK(r.violations == r.trials);
        CHECK_FALSE(r.counterexample.empty());
    }

    TEST_CASE("suites are reproducible for a seed")
    {
        LemmaOptions options;
        options.trials = 500;
        options.seed = 77;
        auto const a = check_w2_identity_bound(options);
        auto const b = check_w2_identity_bound(options);
        CHECK(a.worst_excess == b.worst_excess);
        CHECK(a.passed());
    }

    TEST_CASE("zero trials is a configuration error")
    {
        LemmaOptions options;
        options.trials = 0;
        CHECK_THROWS_AS((void)check_sqrt_holder(options), ConfigError);
        CHECK_THROWS_AS((void)run_lemma_suites(options), ConfigError);
    }
}
