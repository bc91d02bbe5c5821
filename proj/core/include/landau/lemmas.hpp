#pragma once

// Randomized property suites for the matrix square-root and Wasserstein
// bounds. Each suite reports the first violation it finds in readable form.

#include "landau/spd.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace landau {

/// Square root under test. The default is sym_sqrt.
using SqrtFunction = std::function<SymMatrix(PsdMatrix const &)>;

struct LemmaOptions {
    std::size_t trials = 10000;
    std::uint64_t seed = 1;
    double tolerance = 1e-8;                ///< absolute slack on the sqrt bounds
    double reconstruction_tolerance = 1e-10; ///< relative, in operator norm
};

struct SuiteResult {
    std::string name;
    std::size_t trials = 0;
    std::size_t violations = 0;
    double worst_excess = 0; ///< max of lhs - rhs over all trials
    std::string counterexample; ///< first violation, empty when none

    [[nodiscard]] bool passed() const noexcept { return violations == 0; }
};

[[nodiscard]] SqrtFunction default_sqrt();

/// |sqrt(A) - sqrt(B)| <= sqrt(|A - B|) over random PSD pairs, d in {2, 3}.
[[nodiscard]] SuiteResult check_sqrt_holder(LemmaOptions const &options, SqrtFunction const &sqrt_fn = default_sqrt());

/// |sqrt(A) - sqrt(B)| <= sqrt(min(|A^-1|, |B^-1|)) |A - B| over random
/// positive definite pairs.
[[nodiscard]] SuiteResult check_sqrt_lipschitz(LemmaOptions const &options,
                                               SqrtFunction const &sqrt_fn = default_sqrt());

/// W2^2 <= (1/n) sum |x_i - y_i|^2 for the 1-D and the exact solver.
[[nodiscard]] SuiteResult check_w2_identity_bound(LemmaOptions const &options);

/// |S S - A| <= tol |A| for S the square root under test.
[[nodiscard]] SuiteResult check_sqrt_reconstruction(LemmaOptions const &options,
                                                    SqrtFunction const &sqrt_fn = default_sqrt());

/// |L L^* - A| <= tol |A| for cholesky_psd.
[[nodiscard]] SuiteResult check_cholesky_reconstruction(LemmaOptions const &options);

/// All suites in a fixed order. Throws ConfigError when trials == 0.
[[nodiscard]] std::vector<SuiteResult> run_lemma_suites(LemmaOptions const &options,
                                                        SqrtFunction const &sqrt_fn = default_sqrt());

/// Text rendering of a matrix, one row per line, full precision.
[[nodiscard]] std::string format_matrix(SymMatrix const &m);

} // namespace landau
