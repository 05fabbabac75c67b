// SPDX-License-Identifier: Apache-2.0
//
// AVX2/FMA variants. One __m256d register holds two complex doubles laid out
// as [re0, im0, re1, im1], which matches std::complex<double> storage.
// This translation unit is the only one compiled with -mavx2 -mfma.

#include "kernels_impl.hpp"

#include <immintrin.h>

namespace rankreduce::kernels::detail {

namespace {

inline __m256d load2(const cplx* p) { return _mm256_loadu_pd(reinterpret_cast<const double*>(p)); }
inline void store2(cplx* p, __m256d v) { _mm256_storeu_pd(reinterpret_cast<double*>(p), v); }

// Broadcast one complex scalar into [re, re, re, re] and [im, im, im, im].
inline void splat(cplx s, __m256d& re, __m256d& im)
{
    re = _mm256_set1_pd(s.real());
    im = _mm256_set1_pd(s.imag());
}

// s * x for two packed complex values, s pre-splatted.
inline __m256d cmul_splat(__m256d x, __m256d s_re, __m256d s_im)
{
    const __m256d swapped = _mm256_permute_pd(x, 0b0101);
    // [xr*sr - xi*si, xi*sr + xr*si]
    return _mm256_fmaddsub_pd(x, s_re, _mm256_mul_pd(swapped, s_im));
}

inline double hsum(__m256d v)
{
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// lane0 - lane1 + lane2 - lane3
inline double halt(__m256d v)
{
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_sub_sd(s, _mm_unpackhi_pd(s, s)));
}

} // namespace

cplx dotc_avx2(const cplx* a, const cplx* b, std::size_t n)
{
    // conj(a)*b: re = ar*br + ai*bi, im = ar*bi - ai*br
    __m256d acc_re = _mm256_setzero_pd();
    __m256d acc_im = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d va = load2(a + i);
        const __m256d vb = load2(b + i);
        acc_re = _mm256_fmadd_pd(va, vb, acc_re);
        acc_im = _mm256_fmadd_pd(va, _mm256_permute_pd(vb, 0b0101), acc_im);
    }
    double re = hsum(acc_re);
    double im = halt(acc_im);
    for (; i < n; ++i) {
        const double ar = a[i].real(), ai = a[i].imag();
        const double br = b[i].real(), bi = b[i].imag();
        re += ar * br + ai * bi;
        im += ar * bi - ai * br;
    }
    return {re, im};
}

void gemv_avx2(const cplx* a, std::size_t rows, std::size_t cols, std::size_t lda,
               const cplx* x, cplx* y)
{
    for (std::size_t r = 0; r < rows; ++r) {
        const cplx* row = a + r * lda;
        // a*x: re = ar*xr - ai*xi, im = ar*xi + ai*xr
        __m256d acc_re = _mm256_setzero_pd();
        __m256d acc_im = _mm256_setzero_pd();
        std::size_t c = 0;
        for (; c + 2 <= cols; c += 2) {
            const __m256d va = load2(row + c);
            const __m256d vx = load2(x + c);
            acc_re = _mm256_fmadd_pd(va, vx, acc_re);
            acc_im = _mm256_fmadd_pd(va, _mm256_permute_pd(vx, 0b0101), acc_im);
        }
        double re = halt(acc_re);
        double im = hsum(acc_im);
        for (; c < cols; ++c) {
            const double ar = row[c].real(), ai = row[c].imag();
            const double xr = x[c].real(), xi = x[c].imag();
            re += ar * xr - ai * xi;
            im += ar * xi + ai * xr;
        }
        y[r] = {re, im};
    }
}

void gemv_h_avx2(const cplx* a, std::size_t rows, std::size_t cols, std::size_t lda,
                 const cplx* x, cplx* y)
{
    for (std::size_t c = 0; c < cols; ++c)
        y[c] = 0.0;
    const __m256d conj_mask = _mm256_set_pd(-0.0, 0.0, -0.0, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        const cplx* row = a + r * lda;
        __m256d s_re, s_im;
        splat(x[r], s_re, s_im);
        std::size_t c = 0;
        for (; c + 2 <= cols; c += 2) {
            const __m256d va = _mm256_xor_pd(load2(row + c), conj_mask);
            store2(y + c, _mm256_add_pd(load2(y + c), cmul_splat(va, s_re, s_im)));
        }
        for (; c < cols; ++c) {
            const double ar = row[c].real(), ai = row[c].imag();
            const double sr = x[r].real(), si = x[r].imag();
            y[c] += cplx{ar * sr + ai * si, ar * si - ai * sr};
        }
    }
}

void ger_avx2(cplx* a, std::size_t rows, std::size_t cols, std::size_t lda, double scale,
              const cplx* u, const cplx* v)
{
    const __m256d vscale = _mm256_set1_pd(scale);
    for (std::size_t r = 0; r < rows; ++r) {
        cplx* row = a + r * lda;
        __m256d u_re, u_im;
        splat(u[r], u_re, u_im);
        std::size_t c = 0;
        for (; c + 2 <= cols; c += 2) {
            const __m256d prod = cmul_splat(load2(v + c), u_re, u_im);
            store2(row + c, _mm256_fmadd_pd(vscale, load2(row + c), prod));
        }
        for (; c < cols; ++c) {
            const double ur = u[r].real(), ui = u[r].imag();
            const double vr = v[c].real(), vi = v[c].imag();
            row[c] = {scale * row[c].real() + (ur * vr - ui * vi),
                      scale * row[c].imag() + (ur * vi + ui * vr)};
        }
    }
}

} // namespace rankreduce::kernels::detail
