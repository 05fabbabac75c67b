// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

// Complex double-precision BLAS-1/2 style kernels used by the RLS recursions.
//
// Every kernel has a portable scalar reference implementation and, on x86-64,
// an AVX2/FMA variant. The variant is chosen once per process from the CPU
// feature flags; RANKREDUCE_KERNELS=scalar forces the reference path.
// Matrices are dense row-major with an explicit leading dimension.

namespace rankreduce::kernels {

using cplx = std::complex<double>;

struct KernelTable {
    std::string_view name;
    // sum_i conj(a[i]) * b[i]
    cplx (*dotc)(const cplx* a, const cplx* b, std::size_t n);
    // y = A x, A is rows x cols
    void (*gemv)(const cplx* a, std::size_t rows, std::size_t cols, std::size_t lda,
                 const cplx* x, cplx* y);
    // y = A^H x, A is rows x cols, y has cols entries
    void (*gemv_h)(const cplx* a, std::size_t rows, std::size_t cols, std::size_t lda,
                   const cplx* x, cplx* y);
    // A = scale * A + u v^T (v is used as-is, not conjugated)
    void (*ger)(cplx* a, std::size_t rows, std::size_t cols, std::size_t lda, double scale,
                const cplx* u, const cplx* v);
};

const KernelTable& scalar_table() noexcept;
// nullptr when the binary was built without AVX2 support or the CPU lacks it.
const KernelTable* avx2_table() noexcept;
// The table selected for this process.
const KernelTable& active_table() noexcept;

// Complex multiply-accumulate counter, per thread. Every dispatched kernel call
// adds the number of complex multiply-adds it performs.
std::uint64_t op_count() noexcept;
void reset_op_count() noexcept;

cplx dotc(std::span<const cplx> a, std::span<const cplx> b);
void gemv(const cplx* a, std::size_t rows, std::size_t cols, std::size_t lda,
          std::span<const cplx> x, std::span<cplx> y);
void gemv_h(const cplx* a, std::size_t rows, std::size_t cols, std::size_t lda,
            std::span<const cplx> x, std::span<cplx> y);
void ger(cplx* a, std::size_t rows, std::size_t cols, std::size_t lda, double scale,
         std::span<const cplx> u, std::span<const cplx> v);

} // namespace rankreduce::kernels
