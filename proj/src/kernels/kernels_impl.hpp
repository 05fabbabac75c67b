// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "rankreduce/kernels.hpp"

namespace rankreduce::kernels::detail {

cplx dotc_scalar(const cplx* a, const cplx* b, std::size_t n);
void gemv_scalar(const cplx* a, std::size_t rows, std::size_t cols, std::size_t lda,
                 const cplx* x, cplx* y);
void gemv_h_scalar(const cplx* a, std::size_t rows, std::size_t cols, std::size_t lda,
                   const cplx* x, cplx* y);
void ger_scalar(cplx* a, std::size_t rows, std::size_t cols, std::size_t lda, double scale,
                const cplx* u, const cplx* v);

#if defined(RANKREDUCE_HAVE_AVX2)
cplx dotc_avx2(const cplx* a, const cplx* b, std::size_t n);
void gemv_avx2(const cplx* a, std::size_t rows, std::size_t cols, std::size_t lda,
               const cplx* x, cplx* y);
void gemv_h_avx2(const cplx* a, std::size_t rows, std::size_t cols, std::size_t lda,
                 const cplx* x, cplx* y);
void ger_avx2(cplx* a, std::size_t rows, std::size_t cols, std::size_t lda, double scale,
              const cplx* u, const cplx* v);
#endif

} // namespace rankreduce::kernels::detail
