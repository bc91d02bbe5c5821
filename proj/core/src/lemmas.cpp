#include "landau/lemmas.hpp"

#include "landau/analysis.hpp"
#include "landau/ensemble.hpp"
#include "landau/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>

namespace landau {

namespace {

using Rng = std::mt19937_64;

// A = G G^* with G of size d x k. k < d gives a singular matrix.
SymMatrix random_gram(Rng &rng, std::size_t d, std::size_t k, double scale = 1.0)
{
    std::normal_distribution<double> normal;
    std::vector<double> g(d * k);
    for (auto &v : g)
        v = scale * normal(rng);
    SymMatrix a(d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i; j < d; ++j) {
            double s = 0;
            for (std::size_t c = 0; c < k; ++c)
                s += g[i * k + c] * g[j * k + c];
            a.set(i, j, s);
        }
    return a;
}

std::size_t random_dim(Rng &rng)
{
    return std::uniform_int_distribution<std::size_t>(2, 3)(rng);
}

// Pairs that mix generic, nearby and rank-deficient cases.
std::pair<SymMatrix, SymMatrix> random_psd_pair(Rng &rng, std::size_t d, bool definite)
{
    std::uniform_int_distribution<int> kind(0, 3);
    std::size_t const kmin = definite ? d : 1;
    std::uniform_int_distribution<std::size_t> rank(kmin, d + 1);
    switch (kind(rng)) {
    case 0:
        return {random_gram(rng, d, rank(rng)), random_gram(rng, d, rank(rng))};
    case 1: {
        auto a = random_gram(rng, d, rank(rng));
        auto b = a + random_gram(rng, d, rank(rng), 1e-3);
        return {a, b};
    }
    case 2: {
        // Small matrices, where the Holder bound is nearly tight.
        return {random_gram(rng, d, rank(rng), 1e-3), random_gram(rng, d, rank(rng), 1e-2)};
    }
    default: {
        auto a = random_gram(rng, d, rank(rng));
        auto b = a;
        b *= std::uniform_real_distribution<double>(0.5, 2.0)(rng);
        return {a, b};
    }
    }
}

std::string describe(char const *label, SymMatrix const &m)
{
    return std::string(label) + " =\n" + format_matrix(m);
}

void record(SuiteResult &r, double lhs, double rhs, std::string const &detail)
{
    double const excess = lhs - rhs;
    if (r.trials == 1 || excess > r.worst_excess)
        r.worst_excess = excess;
    if (excess > 0) {
        if (r.violations == 0) {
            std::ostringstream os;
            os << std::setprecision(17) << detail << "lhs = " << lhs << "\nrhs = " << rhs << '\n';
            r.counterexample = os.str();
        }
        ++r.violations;
    }
}

void require_trials(LemmaOptions const &options)
{
    if (options.trials == 0)
        throw ConfigError("lemmas.trials", "trial count must be positive");
}

} // namespace

SqrtFunction default_sqrt()
{
    return [](PsdMatrix const &a) { return SymMatrix(sym_sqrt(a)); };
}

std::string format_matrix(SymMatrix const &m)
{
    std::ostringstream os;
    os << std::setprecision(17);
    for (std::size_t i = 0; i < m.dim(); ++i) {
        os << "  [";
        for (std::size_t j = 0; j < m.dim(); ++j)
            os << (j ? ", " : "") << m(i, j);
        os << "]\n";
    }
    return os.str();
}

SuiteResult check_sqrt_holder(LemmaOptions const &options, SqrtFunction const &sqrt_fn)
{
    require_trials(options);
    SuiteResult r;
    r.name = "sqrt_holder";
    Rng rng(options.seed);
    for (std::size_t t = 0; t < options.trials; ++t) {
        auto const d = random_dim(rng);
        auto const [a, b] = random_psd_pair(rng, d, false);
        auto const sa = sqrt_fn(PsdMatrix::trusted(a));
        auto const sb = sqrt_fn(PsdMatrix::trusted(b));
        double const lhs = opnorm(sa - sb);
        double const rhs = std::sqrt(opnorm(a - b)) + options.tolerance;
        ++r.trials;
        record(r, lhs, rhs, describe("A", a) + describe("B", b));
    }
    return r;
}

SuiteResult check_sqrt_lipschitz(LemmaOptions const &options, SqrtFunction const &sqrt_fn)
{
    require_trials(options);
    SuiteResult r;
    r.name = "sqrt_lipschitz";
    Rng rng(options.seed + 1);
    for (std::size_t t = 0; t < options.trials; ++t) {
        auto const d = random_dim(rng);
        auto [a, b] = random_psd_pair(rng, d, true);
        // Keep the spectrum away from zero so the bound is finite.
        double const shift = std::uniform_real_distribution<double>(1e-3, 1.0)(rng);
        a += shift * SymMatrix::identity(d);
        b += shift * SymMatrix::identity(d);
        double const inv = std::min(1.0 / min_eig(a), 1.0 / min_eig(b));
        auto const sa = sqrt_fn(PsdMatrix::trusted(a));
        auto const sb = sqrt_fn(PsdMatrix::trusted(b));
        double const lhs = opnorm(sa - sb);
        double const rhs = std::sqrt(inv) * opnorm(a - b) + options.tolerance;
        ++r.trials;
        record(r, lhs, rhs, describe("A", a) + describe("B", b));
    }
    return r;
}

SuiteResult check_w2_identity_bound(LemmaOptions const &options)
{
    require_trials(options);
    SuiteResult r;
    r.name = "w2_identity_bound";
    Rng rng(options.seed + 2);
    std::normal_distribution<double> normal;
    std::uniform_int_distribution<std::size_t> size_1d(1, 64);
    std::uniform_int_distribution<std::size_t> size_nd(1, 8);
    for (std::size_t t = 0; t < options.trials; ++t) {
        bool const exact = t % 2 == 1;
        std::size_t const d = exact ? random_dim(rng) : 1;
        std::size_t const n = exact ? size_nd(rng) : size_1d(rng);
        Ensemble xs(d, n), ys(d, n);
        double paired = 0;
        for (std::size_t i = 0; i < n; ++i) {
            auto x = xs.state(i);
            auto y = ys.state(i);
            for (std::size_t k = 0; k < d; ++k) {
                x[k] = normal(rng);
                y[k] = 2.0 * normal(rng) + 0.5;
                paired += (x[k] - y[k]) * (x[k] - y[k]);
            }
        }
        paired /= static_cast<double>(n);
        double w2 = 0;
        if (exact) {
            w2 = wasserstein2_exact(xs, ys);
        } else {
            w2 = wasserstein2_1d(xs.states(), ys.states());
        }
        ++r.trials;
        double const lhs = w2 * w2;
        double const rhs = paired * (1 + 1e-12) + 1e-14;
        if (lhs > rhs) {
            std::ostringstream os;
            os << std::setprecision(17) << (exact ? "exact" : "1-D") << " solver, d = " << d << ", n = " << n
               << "\nx = ";
            for (double v : xs.states())
                os << v << ' ';
            os << "\ny = ";
            for (double v : ys.states())
                os << v << ' ';
            os << '\n';
            record(r, lhs, rhs, os.str());
        } else {
            record(r, lhs, rhs, {});
        }
    }
    return r;
}

SuiteResult check_sqrt_reconstruction(LemmaOptions const &options, SqrtFunction const &sqrt_fn)
{
    require_trials(options);
    SuiteResult r;
    r.name = "sqrt_reconstruction";
    Rng rng(options.seed + 3);
    std::uniform_int_distribution<std::size_t> extra(0, 1);
    for (std::size_t t = 0; t < options.trials; ++t) {
        auto const d = random_dim(rng);
        auto const a = random_gram(rng, d, d + extra(rng));
        auto const s = sqrt_fn(PsdMatrix::trusted(a));
        SymMatrix square(d);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = i; j < d; ++j) {
                double v = 0;
                for (std::size_t k = 0; k < d; ++k)
                    v += s(i, k) * s(k, j);
                square.set(i, j, v);
            }
        double const lhs = opnorm(square - a);
        double const rhs = options.reconstruction_tolerance * opnorm(a);
        ++r.trials;
        record(r, lhs, rhs, describe("A", a) + describe("S", s));
    }
    return r;
}

SuiteResult check_cholesky_reconstruction(LemmaOptions const &options)
{
    require_trials(options);
    SuiteResult r;
    r.name = "cholesky_reconstruction";
    Rng rng(options.seed + 4);
    std::uniform_int_distribution<std::size_t> rank_extra(0, 2);
    for (std::size_t t = 0; t < options.trials; ++t) {
        auto const d = random_dim(rng);
        // Ranks from d - 1 to d + 1 so the singular path is exercised too.
        auto const a = random_gram(rng, d, d - 1 + rank_extra(rng));
        auto const l = cholesky_psd(PsdMatrix::trusted(a));
        double const lhs = opnorm(l.gram() - a);
        double const rhs = options.reconstruction_tolerance * opnorm(a);
        ++r.trials;
        record(r, lhs, rhs, describe("A", a));
    }
    return r;
}

std::vector<SuiteResult> run_lemma_suites(LemmaOptions const &options, SqrtFunction const &sqrt_fn)
{
    require_trials(options);
    return {check_sqrt_holder(options, sqrt_fn), check_sqrt_lipschitz(options, sqrt_fn),
            check_w2_identity_bound(options), check_sqrt_reconstruction(options, sqrt_fn),
            check_cholesky_reconstruction(options)};
}

} // namespace landau
