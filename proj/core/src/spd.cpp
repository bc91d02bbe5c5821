#include "landau/spd.hpp"

#include "landau/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace landau {

namespace {

// a*c - b*b with a single rounding (Kahan's fma trick).
double det2(double a, double b, double c) noexcept
{
    double const w = b * b;
    double const e = std::fma(-b, b, w);
    double const f = std::fma(a, c, -w);
    return f + e;
}

struct Spectrum2 {
    double lo, hi, cos_t, sin_t; // (cos_t, sin_t) is the eigenvector of hi
};

Spectrum2 spectrum2(double a, double b, double c) noexcept
{
    double const mean = 0.5 * (a + c);
    double const r = std::hypot(0.5 * (a - c), b);
    double const det = det2(a, b, c);
    Spectrum2 s{};
    // The eigenvalue of larger magnitude is computed directly, the other one
    // through the determinant so that nearly singular matrices keep accuracy.
    if (mean >= 0) {
        s.hi = mean + r;
        s.lo = s.hi != 0 ? det / s.hi : 0.0;
    } else {
        s.lo = mean - r;
        s.hi = det / s.lo;
    }
    double const theta = 0.5 * std::atan2(2 * b, a - c);
    s.cos_t = std::cos(theta);
    s.sin_t = std::sin(theta);
    return s;
}

// Dense row-major working copy for the Jacobi solver.
using Dense = boost::container::small_vector<double, 16>;

Dense to_dense(SymMatrix const &a)
{
    auto const d = a.dim();
    Dense m(d * d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            m[i * d + j] = a(i, j);
    return m;
}

SymmetricEigen jacobi(SymMatrix const &a)
{
    auto const d = a.dim();
    Dense m = to_dense(a);
    Dense v(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
        v[i * d + i] = 1.0;

    double frob = 0;
    for (double x : m)
        frob += x * x;

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0;
        for (std::size_t p = 0; p < d; ++p)
            for (std::size_t q = p + 1; q < d; ++q)
                off += m[p * d + q] * m[p * d + q];
        if (off <= 1e-32 * frob || off == 0)
            break;
        for (std::size_t p = 0; p < d; ++p) {
            for (std::size_t q = p + 1; q < d; ++q) {
                double const apq = m[p * d + q];
                if (apq == 0)
                    continue;
                double const app = m[p * d + p];
                double const aqq = m[q * d + q];
                double const tau = (aqq - app) / (2 * apq);
                double const t = std::copysign(1.0, tau) / (std::abs(tau) + std::sqrt(1 + tau * tau));
                double const c = 1 / std::sqrt(1 + t * t);
                double const s = t * c;
                for (std::size_t k = 0; k < d; ++k) {
                    double const mkp = m[k * d + p];
                    double const mkq = m[k * d + q];
                    m[k * d + p] = c * mkp - s * mkq;
                    m[k * d + q] = s * mkp + c * mkq;
                }
                for (std::size_t k = 0; k < d; ++k) {
                    double const mpk = m[p * d + k];
                    double const mqk = m[q * d + k];
                    m[p * d + k] = c * mpk - s * mqk;
                    m[q * d + k] = s * mpk + c * mqk;
                }
                m[p * d + q] = m[q * d + p] = 0;
                for (std::size_t k = 0; k < d; ++k) {
                    double const vkp = v[k * d + p];
                    double const vkq = v[k * d + q];
                    v[k * d + p] = c * vkp - s * vkq;
                    v[k * d + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    boost::container::small_vector<std::size_t, 4> order(d);
    for (std::size_t i = 0; i < d; ++i)
        order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return m[x * d + x] < m[y * d + y]; });

    SymmetricEigen out;
    out.values.resize(d);
    out.vectors.resize(d * d);
    for (std::size_t k = 0; k < d; ++k) {
        out.values[k] = m[order[k] * d + order[k]];
        for (std::size_t i = 0; i < d; ++i)
            out.vectors[i * d + k] = v[i * d + order[k]];
    }
    return out;
}

SymMatrix reconstruct(SymmetricEigen const &e, auto &&transform)
{
    auto const d = e.values.size();
    SymMatrix out(d);
    for (std::size_t k = 0; k < d; ++k) {
        double const w = transform(e.values[k]);
        if (w == 0)
            continue;
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = i; j < d; ++j)
                out.at(i, j) += w * e.vectors[i * d + k] * e.vectors[j * d + k];
    }
    return out;
}

} // namespace

SymMatrix SymMatrix::identity(std::size_t dim)
{
    SymMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i)
        m.set(i, i, 1.0);
    return m;
}

SymMatrix SymMatrix::diagonal(std::span<double const> diag)
{
    SymMatrix m(diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i)
        m.set(i, i, diag[i]);
    return m;
}

SymMatrix SymMatrix::from_rows(std::size_t dim, std::span<double const> rows)
{
    if (rows.size() != dim * dim)
        throw SizeMismatch("SymMatrix::from_rows: expected " + std::to_string(dim * dim) + " entries");
    SymMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = i; j < dim; ++j)
            m.set(i, j, rows[i * dim + j]);
    return m;
}

double SymMatrix::trace() const noexcept
{
    double t = 0;
    for (std::size_t i = 0; i < dim_; ++i)
        t += (*this)(i, i);
    return t;
}

SymMatrix &SymMatrix::operator+=(SymMatrix const &rhs) noexcept
{
    for (std::size_t k = 0; k < packed_.size(); ++k)
        packed_[k] += rhs.packed_[k];
    return *this;
}

SymMatrix &SymMatrix::operator-=(SymMatrix const &rhs) noexcept
{
    for (std::size_t k = 0; k < packed_.size(); ++k)
        packed_[k] -= rhs.packed_[k];
    return *this;
}

SymMatrix &SymMatrix::operator*=(double s) noexcept
{
    for (double &x : packed_)
        x *= s;
    return *this;
}

void SymMatrix::multiply(std::span<double const> x, std::span<double> y) const noexcept
{
    for (std::size_t i = 0; i < dim_; ++i) {
        double acc = 0;
        for (std::size_t j = 0; j < dim_; ++j)
            acc += (*this)(i, j) * x[j];
        y[i] = acc;
    }
}

double SymMatrix::quadratic_form(std::span<double const> x) const noexcept
{
    double acc = 0;
    for (std::size_t i = 0; i < dim_; ++i) {
        acc += (*this)(i, i) * x[i] * x[i];
        for (std::size_t j = i + 1; j < dim_; ++j)
            acc += 2 * (*this)(i, j) * x[i] * x[j];
    }
    return acc;
}

PsdMatrix::PsdMatrix(SymMatrix m)
{
    auto const d = m.dim();
    if (d == 0) {
        m_ = std::move(m);
        return;
    }
    if (d == 1) {
        if (m(0, 0) < 0)
            throw NotPsd("PsdMatrix: negative 1x1 entry " + std::to_string(m(0, 0)));
        m_ = std::move(m);
        return;
    }
    auto const e = eigen_decompose(m);
    double const norm = std::max(std::abs(e.values.front()), std::abs(e.values.back()));
    double const lowest = e.values.front();
    if (lowest < -kPsdTolerance * norm)
        throw NotPsd("PsdMatrix: eigenvalue " + std::to_string(lowest) + " below tolerance (opnorm " +
                     std::to_string(norm) + ")");
    if (lowest < 0)
        m = reconstruct(e, [](double l) { return std::max(l, 0.0); });
    m_ = std::move(m);
}

void LowerTriangular::multiply(std::span<double const> x, std::span<double> y) const noexcept
{
    for (std::size_t i = 0; i < dim_; ++i) {
        double acc = 0;
        for (std::size_t j = 0; j <= i; ++j)
            acc += (*this)(i, j) * x[j];
        y[i] = acc;
    }
}

SymMatrix LowerTriangular::gram() const
{
    SymMatrix out(dim_);
    for (std::size_t i = 0; i < dim_; ++i)
        for (std::size_t j = i; j < dim_; ++j) {
            double acc = 0;
            for (std::size_t k = 0; k <= i; ++k)
                acc += (*this)(i, k) * (*this)(j, k);
            out.set(i, j, acc);
        }
    return out;
}

SymmetricEigen eigen_decompose(SymMatrix const &a)
{
    auto const d = a.dim();
    SymmetricEigen out;
    if (d == 0)
        return out;
    if (d == 1) {
        out.values = {a(0, 0)};
        out.vectors = {1.0};
        return out;
    }
    if (d == 2) {
        auto const s = spectrum2(a(0, 0), a(0, 1), a(1, 1));
        out.values = {s.lo, s.hi};
        // columns: lo -> (-sin, cos), hi -> (cos, sin)
        out.vectors = {-s.sin_t, s.cos_t, s.cos_t, s.sin_t};
        return out;
    }
    return jacobi(a);
}

Vec eigenvalues(SymMatrix const &a)
{
    if (a.dim() == 2) {
        auto const s = spectrum2(a(0, 0), a(0, 1), a(1, 1));
        return {s.lo, s.hi};
    }
    return eigen_decompose(a).values;
}

double opnorm(SymMatrix const &a)
{
    if (a.dim() == 0)
        return 0;
    auto const v = eigenvalues(a);
    return std::max(std::abs(v.front()), std::abs(v.back()));
}

double min_eig(SymMatrix const &a)
{
    if (a.dim() == 0)
        return 0;
    return eigenvalues(a).front();
}

std::optional<double> inv_norm(SymMatrix const &a)
{
    double const m = min_eig(a);
    if (!(m > 0))
        return std::nullopt;
    return 1 / m;
}

PsdMatrix sym_sqrt(PsdMatrix const &psd)
{
    auto const &a = psd.matrix();
    auto const d = a.dim();
    SymMatrix r(d);
    if (d == 1) {
        r.set(0, 0, std::sqrt(std::max(a(0, 0), 0.0)));
    } else if (d == 2) {
        // R = (A + sqrt(det) I) / sqrt(tr + 2 sqrt(det)), from Cayley-Hamilton.
        double const s = std::sqrt(std::max(det2(a(0, 0), a(0, 1), a(1, 1)), 0.0));
        double const t2 = a(0, 0) + a(1, 1) + 2 * s;
        if (t2 > 0) {
            double const inv_t = 1 / std::sqrt(t2);
            r.set(0, 0, (a(0, 0) + s) * inv_t);
            r.set(0, 1, a(0, 1) * inv_t);
            r.set(1, 1, (a(1, 1) + s) * inv_t);
        }
    } else if (d > 2) {
        r = reconstruct(eigen_decompose(a), [](double l) { return std::sqrt(std::max(l, 0.0)); });
    }
    return PsdMatrix::trusted(std::move(r));
}

LowerTriangular cholesky_psd(PsdMatrix const &psd)
{
    auto const &a = psd.matrix();
    auto const d = a.dim();
    LowerTriangular l(d);
    if (d == 0)
        return l;

    double scale = 0;
    for (std::size_t i = 0; i < d; ++i)
        scale = std::max(scale, std::abs(a(i, i)));
    double const pivot_floor = 1e-14 * scale;

    if (d == 2) {
        double const p = a(0, 0);
        if (p > pivot_floor) {
            double const l00 = std::sqrt(p);
            l.at(0, 0) = l00;
            l.at(1, 0) = a(0, 1) / l00;
            l.at(1, 1) = std::sqrt(std::max(det2(a(0, 0), a(0, 1), a(1, 1)), 0.0) / p);
        } else {
            l.at(1, 1) = std::sqrt(std::max(a(1, 1), 0.0));
        }
        return l;
    }

    for (std::size_t j = 0; j < d; ++j) {
        double s = a(j, j);
        for (std::size_t k = 0; k < j; ++k)
            s -= l(j, k) * l(j, k);
        if (s <= pivot_floor)
            continue; // zero column
        double const ljj = std::sqrt(s);
        l.at(j, j) = ljj;
        for (std::size_t i = j + 1; i < d; ++i) {
            double v = a(i, j);
            for (std::size_t k = 0; k < j; ++k)
                v -= l(i, k) * l(j, k);
            l.at(i, j) = v / ljj;
        }
    }
    return l;
}

} // namespace landau
