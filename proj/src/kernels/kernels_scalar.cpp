// SPDX-License-Identifier: Apache-2.0
#include "kernels_impl.hpp"

namespace rankreduce::kernels::detail {

cplx dotc_scalar(const cplx* a, const cplx* b, std::size_t n)
{
    double re = 0.0;
    double im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double ar = a[i].real(), ai = a[i].imag();
        const double br = b[i].real(), bi = b[i].imag();
        re += ar * br + ai * bi;
        im += ar * bi - ai * br;
    }
    return {re, im};
}

void gemv_scalar(const cplx* a, std::size_t rows, std::size_t cols, std::size_t lda,
                 const cplx* x, cplx* y)
{
    for (std::size_t r = 0; r < rows; ++r) {
        const cplx* row = a + r * lda;
        double re = 0.0;
        double im = 0.0;
        for (std::size_t c = 0; c < cols; ++c) {
            const double ar = row[c].real(), ai = row[c].imag();
            const double xr = x[c].real(), xi = x[c].imag();
            re += ar * xr - ai * xi;
            im += ar * xi + ai * xr;
        }
        y[r] = {re, im};
    }
}

void gemv_h_scalar(const cplx* a, std::size_t rows, std::size_t cols, std::size_t lda,
                   const cplx* x, cplx* y)
{
    for (std::size_t c = 0; c < cols; ++c)
        y[c] = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        const cplx* row = a + r * lda;
        const double sr = x[r].real(), si = x[r].imag();
        for (std::size_t c = 0; c < cols; ++c) {
            const double ar = row[c].real(), ai = row[c].imag();
            y[c] += cplx{ar * sr + ai * si, ar * si - ai * sr};
        }
    }
}

void ger_scalar(cplx* a, std::size_t rows, std::size_t cols, std::size_t lda, double scale,
                const cplx* u, const cplx* v)
{
    for (std::size_t r = 0; r < rows; ++r) {
        cplx* row = a + r * lda;
        const double ur = u[r].real(), ui = u[r].imag();
        for (std::size_t c = 0; c < cols; ++c) {
            const double vr = v[c].real(), vi = v[c].imag();
            row[c] = {scale * row[c].real() + (ur * vr - ui * vi),
                      scale * row[c].imag() + (ur * vi + ui * vr)};
        }
    }
}

} // namespace rankreduce::kernels::detail
