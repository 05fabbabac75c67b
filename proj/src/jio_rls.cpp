// SPDX-License-Identifier: Apache-2.0
#include "rankreduce/jio_rls.hpp"

#include "rankreduce/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rankreduce {

namespace {

void check_finite(cplx d)
{
    if (!std::isfinite(d.real()) || !std::isfinite(d.imag()))
        throw InputError("desired value is not finite");
}

// gain = lambda^{-1} inv x / (1 + lambda^{-1} x^H inv x); nothing is modified
// when the denominator is unusable.
void rls_gain(const CMatrix& inv, std::span<const cplx> x, double lambda, std::span<cplx> gain,
              const char* what)
{
    const std::size_t n = x.size();
    kernels::gemv(inv.data(), n, n, n, x, gain);
    const double inv_lambda = 1.0 / lambda;
    const cplx denom = 1.0 + inv_lambda * kernels::dotc(x, gain);
    if (!std::isfinite(denom.real()) || !std::isfinite(denom.imag()) || denom == cplx{})
        throw NumericalError(std::string(what) + ": gain denominator is not finite");
    const cplx scale = inv_lambda / denom;
    for (cplx& g : gain)
        g *= scale;
    if (!all_finite(gain))
        throw NumericalError(std::string(what) + ": gain vector is not finite");
}

// inv = lambda^{-1} inv - lambda^{-1} gain (x^H inv)
void rls_inverse_update(CMatrix& inv, std::span<const cplx> gain, std::span<const cplx> x, double lambda,
                        std::span<cplx> scratch_row, std::span<cplx> scratch_gain)
{
    const std::size_t n = x.size();
    // x^H inv is the conjugate of inv^H x.
    kernels::gemv_h(inv.data(), n, n, n, x, scratch_row);
    for (cplx& v : scratch_row)
        v = std::conj(v);
    const double inv_lambda = 1.0 / lambda;
    for (std::size_t i = 0; i < n; ++i)
        scratch_gain[i] = -inv_lambda * gain[i];
    kernels::ger(inv.data(), n, n, n, inv_lambda, scratch_gain, scratch_row);
}

void rls_inverse_update(CMatrix& inv, std::span<const cplx> gain, std::span<const cplx> x, double lambda)
{
    CVector row(x.size()), g(x.size());
    rls_inverse_update(inv, gain, x, lambda, row, g);
}

void check_params(const JioParams& p)
{
    if (p.D == 0 || p.D > p.M)
        throw InputError("rank D must satisfy 1 <= D <= M (D=" + std::to_string(p.D) +
                         ", M=" + std::to_string(p.M) + ")");
    if (!(p.lambda > 0.0 && p.lambda <= 1.0))
        throw InputError("forgetting factor must lie in (0, 1]");
    if (!(p.delta > 0.0 && p.delta_bar > 0.0 && p.delta_w > 0.0))
        throw InputError("inverse initializations delta, delta_bar, delta_w must be positive");
}

} // namespace

JioState jio_init(const JioParams& params)
{
    check_params(params);
    JioState s;
    s.S = initial_projection(params.M, params.D);
    s.wbar = initial_weights(params.D);
    s.P = CMatrix::identity(params.M, 1.0 / params.delta);
    s.Phibar = CMatrix::identity(params.D, 1.0 / params.delta_bar);
    s.Qw = CMatrix::identity(params.D, 1.0 / params.delta_w);
    s.lambda = params.lambda;
    s.adapt_projection = params.adapt_projection;
    s.normalize_weight_correlation = params.normalize_weight_correlation;
    return s;
}

CVector project(const ProjectionMatrix& S, std::span<const cplx> r)
{
    if (r.size() != S.rows())
        throw InputError("project: observation length " + std::to_string(r.size()) +
                         " does not match projection rows " + std::to_string(S.rows()));
    CVector rbar(S.cols());
    kernels::gemv_h(S.data(), S.rows(), S.cols(), S.cols(), r, rbar);
    return rbar;
}

CVector reduced_gain(const JioState& state, std::span<const cplx> rbar)
{
    if (rbar.size() != state.D())
        throw InputError("reduced_gain: projected vector must have length D");
    CVector k(rbar.size());
    rls_gain(state.Phibar, rbar, state.lambda, k, "reduced gain");
    return k;
}

ReducedUpdate reduced_update(const JioState& state, std::span<const cplx> rbar, cplx d)
{
    check_finite(d);
    const CVector k = reduced_gain(state, rbar);
    ReducedUpdate out{state.wbar, state.Phibar, d - kernels::dotc(state.wbar, rbar)};
    for (std::size_t j = 0; j < k.size(); ++j)
        out.wbar[j] += k[j] * std::conj(out.xi);
    rls_inverse_update(out.Phibar, k, rbar, state.lambda);
    return out;
}

CVector projection_gain(const JioState& state, std::span<const cplx> r)
{
    if (r.size() != state.M())
        throw InputError("projection_gain: observation must have length M");
    CVector k(r.size());
    rls_gain(state.P, r, state.lambda, k, "projection gain");
    return k;
}

TvecUpdate tvec_update(const JioState& state)
{
    TvecUpdate out{CVector(state.D()), state.Qw};
    rls_gain(state.Qw, state.wbar, state.lambda, out.t, "t vector");
    rls_inverse_update(out.Qw, out.t, state.wbar, state.lambda);
    return out;
}

double tvec_scale(const JioState& state) noexcept
{
    return state.normalize_weight_correlation ? state.lambda * state.weight_mass + 1.0 : 1.0;
}

ProjectionUpdate projection_update(const JioState& state, std::span<const cplx> r,
                                   std::span<const cplx> rbar, cplx d, std::span<const cplx> t,
                                   std::span<const cplx> k)
{
    const std::size_t M = state.M(), D = state.D();
    if (r.size() != M || k.size() != M || rbar.size() != D || t.size() != D)
        throw InputError("projection_update: r and k need length M, rbar and t length D");
    check_finite(d);
    ProjectionUpdate out{state.S, state.P};
    const double tscale = tvec_scale(state);
    CVector v(D);
    for (std::size_t j = 0; j < D; ++j)
        v[j] = std::conj(d) * tscale * std::conj(t[j]) - std::conj(rbar[j]);
    kernels::ger(out.S.data(), M, D, D, 1.0, k, v);
    rls_inverse_update(out.P, k, r, state.lambda);
    return out;
}

StepOutput jio_step(JioState& state, std::span<const cplx> r, cplx d)
{
    check_finite(d);
    return jio_step(state, r, [d](cplx) { return d; });
}

StepOutput jio_step(JioState& state, std::span<const cplx> r, const DesiredFn& desired)
{
    const std::size_t M = state.M(), D = state.D();
    if (r.size() != M)
        throw InputError("jio_step: observation length " + std::to_string(r.size()) + ", expected " +
                         std::to_string(M));

    CVector rbar(D);
    kernels::gemv_h(state.S.data(), M, D, D, r, rbar);
    const cplx x = kernels::dotc(state.wbar, rbar);
    const cplx d = desired(x);
    check_finite(d);
    const cplx xi = d - x;

    // Everything that can fail is computed before the first write to state.
    CVector kbar(D);
    rls_gain(state.Phibar, rbar, state.lambda, kbar, "reduced gain");
    CVector wnew = state.wbar;
    for (std::size_t j = 0; j < D; ++j)
        wnew[j] += kbar[j] * std::conj(xi);
    if (!all_finite(wnew))
        throw NumericalError("jio_step: reduced weights became non-finite");

    CVector k, t;
    if (state.adapt_projection) {
        k.resize(M);
        t.resize(D);
        rls_gain(state.P, r, state.lambda, k, "projection gain");
        rls_gain(state.Qw, kTvecUsesUpdatedWeights ? std::span<const cplx>(wnew)
                                                   : std::span<const cplx>(state.wbar),
                 state.lambda, t, "t vector");
    }

    CVector row(std::max(M, D)), scratch(std::max(M, D));
    rls_inverse_update(state.Phibar, kbar, rbar, state.lambda, std::span(row).first(D),
                       std::span(scratch).first(D));
    if (state.adapt_projection) {
        rls_inverse_update(state.Qw, t, kTvecUsesUpdatedWeights ? wnew : state.wbar, state.lambda,
                           std::span(row).first(D), std::span(scratch).first(D));
        const double tscale = tvec_scale(state);
        state.weight_mass = state.lambda * state.weight_mass + 1.0;
        CVector v(D);
        for (std::size_t j = 0; j < D; ++j)
            v[j] = std::conj(d) * tscale * std::conj(t[j]) - std::conj(rbar[j]);
        kernels::ger(state.S.data(), M, D, D, 1.0, k, v);
        rls_inverse_update(state.P, k, r, state.lambda, std::span(row).first(M), std::span(scratch).first(M));
    }
    state.wbar = std::move(wnew);
    ++state.step_index;
    return {x, xi};
}

CVector effective_weights(const JioState& state) { return state.S * state.wbar; }

FullRankState full_rank_init(std::size_t M, double lambda, double delta)
{
    if (M == 0)
        throw InputError("full-rank filter length must be positive");
    if (!(lambda > 0.0 && lambda <= 1.0))
        throw InputError("forgetting factor must lie in (0, 1]");
    if (!(delta > 0.0))
        throw InputError("delta must be positive");
    return {CVector(M), CMatrix::identity(M, 1.0 / delta), lambda, 0};
}

StepOutput full_rank_rls_step(FullRankState& state, std::span<const cplx> r, cplx d)
{
    check_finite(d);
    return full_rank_rls_step(state, r, [d](cplx) { return d; });
}

StepOutput full_rank_rls_step(FullRankState& state, std::span<const cplx> r, const DesiredFn& desired)
{
    const std::size_t M = state.w.size();
    if (r.size() != M)
        throw InputError("full_rank_rls_step: observation length mismatch");
    const cplx x = kernels::dotc(state.w, r);
    const cplx d = desired(x);
    check_finite(d);
    const cplx xi = d - x;

    CVector k(M);
    rls_gain(state.P, r, state.lambda, k, "full-rank gain");
    for (std::size_t j = 0; j < M; ++j)
        state.w[j] += k[j] * std::conj(xi);
    rls_inverse_update(state.P, k, r, state.lambda);
    ++state.step_index;
    return {x, xi};
}

} // namespace rankreduce
