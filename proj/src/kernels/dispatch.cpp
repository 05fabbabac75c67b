// SPDX-License-Identifier: Apache-2.0
#include "kernels_impl.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string_view>

namespace rankreduce::kernels {

namespace {

thread_local std::uint64_t g_ops = 0;

const KernelTable kScalar{"scalar", detail::dotc_scalar, detail::gemv_scalar, detail::gemv_h_scalar,
                          detail::ger_scalar};

#if defined(RANKREDUCE_HAVE_AVX2)
const KernelTable kAvx2{"avx2", detail::dotc_avx2, detail::gemv_avx2, detail::gemv_h_avx2,
                        detail::ger_avx2};
#endif

const KernelTable& select_table() noexcept
{
    if (const char* env = std::getenv("RANKREDUCE_KERNELS"); env && std::string_view(env) == "scalar")
        return kScalar;
    if (const KernelTable* t = avx2_table())
        return *t;
    return kScalar;
}

} // namespace

const KernelTable& scalar_table() noexcept { return kScalar; }

const KernelTable* avx2_table() noexcept
{
#if defined(RANKREDUCE_HAVE_AVX2)
    static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return supported ? &kAvx2 : nullptr;
#else
    return nullptr;
#endif
}

const KernelTable& active_table() noexcept
{
    static const KernelTable& table = select_table();
    return table;
}

std::uint64_t op_count() noexcept { return g_ops; }
void reset_op_count() noexcept { g_ops = 0; }

cplx dotc(std::span<const cplx> a, std::span<const cplx> b)
{
    if (a.size() != b.size())
        throw std::invalid_argument("dotc: length mismatch");
    g_ops += a.size();
    return active_table().dotc(a.data(), b.data(), a.size());
}

void gemv(const cplx* a, std::size_t rows, std::size_t cols, std::size_t lda,
          std::span<const cplx> x, std::span<cplx> y)
{
    if (x.size() != cols || y.size() != rows)
        throw std::invalid_argument("gemv: shape mismatch");
    g_ops += rows * cols;
    active_table().gemv(a, rows, cols, lda, x.data(), y.data());
}

void gemv_h(const cplx* a, std::size_t rows, std::size_t cols, std::size_t lda,
            std::span<const cplx> x, std::span<cplx> y)
{
    if (x.size() != rows || y.size() != cols)
        throw std::invalid_argument("gemv_h: shape mismatch");
    g_ops += rows * cols;
    active_table().gemv_h(a, rows, cols, lda, x.data(), y.data());
}

void ger(cplx* a, std::size_t rows, std::size_t cols, std::size_t lda, double scale,
         std::span<const cplx> u, std::span<const cplx> v)
{
    if (u.size() != rows || v.size() != cols)
        throw std::invalid_argument("ger: shape mismatch");
    g_ops += rows * cols;
    active_table().ger(a, rows, cols, lda, scale, u.data(), v.data());
}

} // namespace rankreduce::kernels
