// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rankreduce {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

// Caller supplied inconsistent shapes or out-of-range parameters.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A solve or recursion hit a singular or non-finite quantity.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Dense row-major complex matrix.
class CMatrix {
public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols, cplx fill = {})
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static CMatrix identity(std::size_t n, double scale = 1.0);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    cplx* data() noexcept { return data_.data(); }
    const cplx* data() const noexcept { return data_.data(); }

    std::span<cplx> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const cplx> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    CVector column(std::size_t c) const;

    CMatrix adjoint() const;

    bool operator==(const CMatrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

CMatrix operator*(const CMatrix& a, const CMatrix& b);
CMatrix operator+(const CMatrix& a, const CMatrix& b);
CMatrix operator-(const CMatrix& a, const CMatrix& b);
CVector operator*(const CMatrix& a, std::span<const cplx> x);

// A^H x
CVector adjoint_times(const CMatrix& a, std::span<const cplx> x);
// sum_i conj(a_i) b_i
cplx inner(std::span<const cplx> a, std::span<const cplx> b);
// u v^H
CMatrix outer(std::span<const cplx> u, std::span<const cplx> v);

void add_to_diagonal(CMatrix& a, double value);
// In-place (A + A^H) / 2.
void make_hermitian(CMatrix& a);
// max |A_ij - conj(A_ji)| / max |A_ij|; 0 for the zero matrix.
double hermitian_defect(const CMatrix& a);
double max_abs(const CMatrix& a);
double max_abs_diff(const CMatrix& a, const CMatrix& b);
double norm2(std::span<const cplx> v);
bool all_finite(std::span<const cplx> v);
bool all_finite(const CMatrix& a);
double trace_real(const CMatrix& a);

// LU factorization with partial pivoting. Throws NumericalError when the
// matrix is singular to working precision; the message carries the
// reciprocal 1-norm condition estimate.
class LuSolver {
public:
    explicit LuSolver(const CMatrix& a, double rcond_floor = 1e-14);

    CVector solve(std::span<const cplx> b) const;
    // Solves A X = B column by column.
    CMatrix solve(const CMatrix& b) const;
    CMatrix inverse() const;
    double rcond() const noexcept { return rcond_; }

private:
    void solve_in_place(std::span<cplx> x) const;

    CMatrix lu_;
    std::vector<std::size_t> perm_;
    double rcond_ = 0.0;
};

} // namespace rankreduce
