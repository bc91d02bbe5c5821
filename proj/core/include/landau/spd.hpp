#pragma once

// Dense symmetric / positive semidefinite matrices of small dimension.
//
// The d = 2 case has closed-form spectral routines; larger d goes through a
// cyclic Jacobi eigensolver. Storage is the packed upper triangle, so symmetry
// holds by construction.

#include <boost/container/small_vector.hpp>

#include <cstddef>
#include <optional>
#include <span>

namespace landau {

/// Small dense vector; no heap allocation for d <= 4.
using Vec = boost::container::small_vector<double, 4>;

/// Contiguous view of a small_vector (its iterators are not pointers, so
/// std::span cannot deduce from it directly).
template <class V>
[[nodiscard]] auto as_span(V &v) noexcept
{
    return std::span(v.data(), v.size());
}

/// Eigenvalues in [-kPsdTolerance * opnorm, 0) are clamped to zero.
inline constexpr double kPsdTolerance = 1e-12;

class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(std::size_t dim) : dim_(dim), packed_(dim * (dim + 1) / 2, 0.0) {}

    static SymMatrix zero(std::size_t dim) { return SymMatrix(dim); }
    static SymMatrix identity(std::size_t dim);
    static SymMatrix diagonal(std::span<double const> diag);
    /// Builds from a row-major d x d array, reading only the upper triangle.
    static SymMatrix from_rows(std::size_t dim, std::span<double const> rows);

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }

    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const noexcept { return packed_[index(i, j)]; }
    double &at(std::size_t i, std::size_t j) noexcept { return packed_[index(i, j)]; }
    void set(std::size_t i, std::size_t j, double v) noexcept { packed_[index(i, j)] = v; }

    [[nodiscard]] double trace() const noexcept;

    /// Packed upper triangle, row by row: (0,0), (0,1), ..., (0,d-1), (1,1), ...
    [[nodiscard]] std::span<double const> packed() const noexcept { return as_span(packed_); }
    [[nodiscard]] std::span<double> packed() noexcept { return as_span(packed_); }

    SymMatrix &operator+=(SymMatrix const &rhs) noexcept;
    SymMatrix &operator-=(SymMatrix const &rhs) noexcept;
    SymMatrix &operator*=(double s) noexcept;

    friend SymMatrix operator+(SymMatrix lhs, SymMatrix const &rhs) noexcept { return lhs += rhs; }
    friend SymMatrix operator-(SymMatrix lhs, SymMatrix const &rhs) noexcept { return lhs -= rhs; }
    friend SymMatrix operator*(double s, SymMatrix m) noexcept { return m *= s; }

    /// y = A x
    void multiply(std::span<double const> x, std::span<double> y) const noexcept;
    /// (A x, x)
    [[nodiscard]] double quadratic_form(std::span<double const> x) const noexcept;

    friend bool operator==(SymMatrix const &, SymMatrix const &) = default;

private:
    [[nodiscard]] std::size_t index(std::size_t i, std::size_t j) const noexcept
    {
        if (i > j)
            std::swap(i, j);
        return i * dim_ - i * (i + 1) / 2 + j;
    }

    std::size_t dim_ = 0;
    boost::container::small_vector<double, 10> packed_;
};

/// Symmetric matrix whose spectrum is nonnegative (after clamping roundoff).
class PsdMatrix {
public:
    PsdMatrix() = default;

    /// Throws NotPsd when an eigenvalue is below -kPsdTolerance * opnorm.
    explicit PsdMatrix(SymMatrix m);

    /// Skips the spectral check. The caller guarantees positive semidefiniteness.
    static PsdMatrix trusted(SymMatrix m) noexcept
    {
        PsdMatrix p;
        p.m_ = std::move(m);
        return p;
    }

    [[nodiscard]] SymMatrix const &matrix() const noexcept { return m_; }
    [[nodiscard]] std::size_t dim() const noexcept { return m_.dim(); }
    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const noexcept { return m_(i, j); }

    operator SymMatrix const &() const noexcept { return m_; }

private:
    SymMatrix m_;
};

/// Lower-triangular factor, row-major packed: (0,0), (1,0), (1,1), (2,0), ...
class LowerTriangular {
public:
    LowerTriangular() = default;
    explicit LowerTriangular(std::size_t dim) : dim_(dim), packed_(dim * (dim + 1) / 2, 0.0) {}

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const noexcept
    {
        return j > i ? 0.0 : packed_[i * (i + 1) / 2 + j];
    }
    double &at(std::size_t i, std::size_t j) noexcept { return packed_[i * (i + 1) / 2 + j]; }

    /// y = L x
    void multiply(std::span<double const> x, std::span<double> y) const noexcept;
    /// L L^*
    [[nodiscard]] SymMatrix gram() const;

private:
    std::size_t dim_ = 0;
    boost::container::small_vector<double, 10> packed_;
};

struct SymmetricEigen {
    Vec values;                                       // ascending
    boost::container::small_vector<double, 16> vectors; // column k = eigenvector of values[k], row-major d x d
};

/// Full eigendecomposition: closed form for d <= 2, cyclic Jacobi otherwise.
[[nodiscard]] SymmetricEigen eigen_decompose(SymMatrix const &a);

/// Ascending eigenvalues only.
[[nodiscard]] Vec eigenvalues(SymMatrix const &a);

/// Operator norm max |lambda|.
[[nodiscard]] double opnorm(SymMatrix const &a);

/// Smallest eigenvalue.
[[nodiscard]] double min_eig(SymMatrix const &a);

/// |A^{-1}| = 1 / min_eig(A); empty when A is singular (min_eig <= 0).
[[nodiscard]] std::optional<double> inv_norm(SymMatrix const &a);

/// The unique PSD square root.
[[nodiscard]] PsdMatrix sym_sqrt(PsdMatrix const &a);

/// Lower-triangular sigma with sigma sigma^* = A. Rank-deficient input is
/// handled by zero-column continuation.
[[nodiscard]] LowerTriangular cholesky_psd(PsdMatrix const &a);

} // namespace landau
