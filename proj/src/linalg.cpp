// SPDX-License-Identifier: Apache-2.0
#include "rankreduce/linalg.hpp"

#include "rankreduce/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rankreduce {

CMatrix CMatrix::identity(std::size_t n, double scale)
{
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        m(i, i) = scale;
    return m;
}

CVector CMatrix::column(std::size_t c) const
{
    CVector out(rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        out[r] = (*this)(r, c);
    return out;
}

CMatrix CMatrix::adjoint() const
{
    CMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c)
            out(c, r) = std::conj((*this)(r, c));
    return out;
}

CMatrix operator*(const CMatrix& a, const CMatrix& b)
{
    if (a.cols() != b.rows())
        throw InputError("matrix product: inner dimensions differ");
    CMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const cplx aik = a(i, k);
            if (aik == cplx{})
                continue;
            for (std::size_t j = 0; j < b.cols(); ++j)
                out(i, j) += aik * b(k, j);
        }
    return out;
}

CMatrix operator+(const CMatrix& a, const CMatrix& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw InputError("matrix sum: shapes differ");
    CMatrix out = a;
    for (std::size_t i = 0; i < a.rows() * a.cols(); ++i)
        out.data()[i] += b.data()[i];
    return out;
}

CMatrix operator-(const CMatrix& a, const CMatrix& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw InputError("matrix difference: shapes differ");
    CMatrix out = a;
    for (std::size_t i = 0; i < a.rows() * a.cols(); ++i)
        out.data()[i] -= b.data()[i];
    return out;
}

CVector operator*(const CMatrix& a, std::span<const cplx> x)
{
    if (x.size() != a.cols())
        throw InputError("matrix-vector product: length mismatch");
    CVector y(a.rows());
    kernels::gemv(a.data(), a.rows(), a.cols(), a.cols(), x, y);
    return y;
}

CVector adjoint_times(const CMatrix& a, std::span<const cplx> x)
{
    if (x.size() != a.rows())
        throw InputError("adjoint product: length mismatch");
    CVector y(a.cols());
    kernels::gemv_h(a.data(), a.rows(), a.cols(), a.cols(), x, y);
    return y;
}

cplx inner(std::span<const cplx> a, std::span<const cplx> b)
{
    if (a.size() != b.size())
        throw InputError("inner product: length mismatch");
    return kernels::dotc(a, b);
}

CMatrix outer(std::span<const cplx> u, std::span<const cplx> v)
{
    CMatrix out(u.size(), v.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j)
            out(i, j) = u[i] * std::conj(v[j]);
    return out;
}

void add_to_diagonal(CMatrix& a, double value)
{
    const std::size_t n = std::min(a.rows(), a.cols());
    for (std::size_t i = 0; i < n; ++i)
        a(i, i) += value;
}

void make_hermitian(CMatrix& a)
{
    if (a.rows() != a.cols())
        throw InputError("make_hermitian: matrix is not square");
    const std::size_t n = a.rows();
    for (std::size_t i = 0; i < n; ++i) {
        a(i, i) = a(i, i).real();
        for (std::size_t j = i + 1; j < n; ++j) {
            const cplx avg = 0.5 * (a(i, j) + std::conj(a(j, i)));
            a(i, j) = avg;
            a(j, i) = std::conj(avg);
        }
    }
}

double hermitian_defect(const CMatrix& a)
{
    const double scale = max_abs(a);
    if (scale == 0.0)
        return 0.0;
    double worst = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i; j < a.cols(); ++j)
            worst = std::max(worst, std::abs(a(i, j) - std::conj(a(j, i))));
    return worst / scale;
}

double max_abs(const CMatrix& a)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows() * a.cols(); ++i)
        m = std::max(m, std::abs(a.data()[i]));
    return m;
}

double max_abs_diff(const CMatrix& a, const CMatrix& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw InputError("max_abs_diff: shapes differ");
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows() * a.cols(); ++i)
        m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

double norm2(std::span<const cplx> v)
{
    double s = 0.0;
    for (const cplx& z : v)
        s += std::norm(z);
    return std::sqrt(s);
}

bool all_finite(std::span<const cplx> v)
{
    return std::all_of(v.begin(), v.end(),
                       [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

bool all_finite(const CMatrix& a) { return all_finite(std::span<const cplx>(a.data(), a.rows() * a.cols())); }

double trace_real(const CMatrix& a)
{
    double t = 0.0;
    for (std::size_t i = 0; i < std::min(a.rows(), a.cols()); ++i)
        t += a(i, i).real();
    return t;
}

namespace {

double norm1(const CMatrix& a)
{
    double best = 0.0;
    for (std::size_t c = 0; c < a.cols(); ++c) {
        double s = 0.0;
        for (std::size_t r = 0; r < a.rows(); ++r)
            s += std::abs(a(r, c));
        best = std::max(best, s);
    }
    return best;
}

} // namespace

LuSolver::LuSolver(const CMatrix& a, double rcond_floor) : lu_(a), perm_(a.rows())
{
    if (a.rows() != a.cols() || a.rows() == 0)
        throw InputError("LuSolver: matrix must be square and non-empty");
    if (!all_finite(a))
        throw NumericalError("LuSolver: matrix has non-finite entries");
    const std::size_t n = a.rows();
    for (std::size_t i = 0; i < n; ++i)
        perm_[i] = i;

    const double anorm = norm1(a);
    bool singular = anorm == 0.0;
    for (std::size_t k = 0; k < n && !singular; ++k) {
        std::size_t piv = k;
        double best = std::abs(lu_(k, k));
        for (std::size_t r = k + 1; r < n; ++r)
            if (const double v = std::abs(lu_(r, k)); v > best) {
                best = v;
                piv = r;
            }
        if (best == 0.0) {
            singular = true;
            break;
        }
        if (piv != k) {
            std::swap_ranges(lu_.row(k).begin(), lu_.row(k).end(), lu_.row(piv).begin());
            std::swap(perm_[k], perm_[piv]);
        }
        const cplx pivot = lu_(k, k);
        for (std::size_t r = k + 1; r < n; ++r) {
            const cplx f = lu_(r, k) / pivot;
            lu_(r, k) = f;
            if (f == cplx{})
                continue;
            for (std::size_t c = k + 1; c < n; ++c)
                lu_(r, c) -= f * lu_(k, c);
        }
    }

    if (!singular) {
        const double inv_norm = norm1(inverse());
        rcond_ = (std::isfinite(inv_norm) && inv_norm > 0.0) ? 1.0 / (anorm * inv_norm) : 0.0;
    }
    if (singular || rcond_ < rcond_floor) {
        std::ostringstream msg;
        msg << "singular matrix (" << n << "x" << n << ", rcond estimate " << rcond_ << ")";
        throw NumericalError(msg.str());
    }
}

void LuSolver::solve_in_place(std::span<cplx> x) const
{
    const std::size_t n = lu_.rows();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j)
            x[i] -= lu_(i, j) * x[j];
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t j = i + 1; j < n; ++j)
            x[i] -= lu_(i, j) * x[j];
        x[i] /= lu_(i, i);
    }
}

CVector LuSolver::solve(std::span<const cplx> b) const
{
    if (b.size() != lu_.rows())
        throw InputError("LuSolver::solve: right-hand side length mismatch");
    CVector x(b.size());
    for (std::size_t i = 0; i < b.size(); ++i)
        x[i] = b[perm_[i]];
    solve_in_place(x);
    return x;
}

CMatrix LuSolver::solve(const CMatrix& b) const
{
    if (b.rows() != lu_.rows())
        throw InputError("LuSolver::solve: right-hand side row mismatch");
    CMatrix out(b.rows(), b.cols());
    CVector col(b.rows());
    for (std::size_t c = 0; c < b.cols(); ++c) {
        for (std::size_t i = 0; i < b.rows(); ++i)
            col[i] = b(perm_[i], c);
        solve_in_place(col);
        for (std::size_t i = 0; i < b.rows(); ++i)
            out(i, c) = col[i];
    }
    return out;
}

CMatrix LuSolver::inverse() const { return solve(CMatrix::identity(lu_.rows())); }

} // namespace rankreduce
