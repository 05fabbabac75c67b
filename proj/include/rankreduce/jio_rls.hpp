// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "rankreduce/estimation.hpp"
#include "rankreduce/linalg.hpp"

#include <cstddef>
#include <functional>
#include <span>

// Streaming recursions for the jointly optimized projection / reduced-rank
// filter pair, and the conventional full-rank RLS baseline.
//
// Per sample i the joint filter runs, in this order:
//   1. rbar = S[i-1]^H r
//   2. x = wbar[i-1]^H rbar, xi = d - x
//   3. reduced-rank RLS: wbar[i], Phibar[i]
//   4. projection gain k from P[i-1]
//   5. t and Qw[i] from the just-updated wbar[i]
//   6. S[i] = S[i-1] + k (d^* t^H - rbar^H), P[i]
// Every gain denominator is checked before any state is touched, so a failing
// step leaves the state exactly as it was.

namespace rankreduce {

// Step 5 consumes wbar[i] rather than wbar[i-1].
inline constexpr bool kTvecUsesUpdatedWeights = true;

struct JioParams {
    std::size_t M = 0;
    std::size_t D = 0;
    double lambda = 0.998;
    double delta = 0.01;     // P[0] = I / delta
    double delta_bar = 0.01; // Phibar[0] = I / delta_bar
    double delta_w = 0.01;   // Qw[0] = I / delta_w
    // When false only the reduced-rank filter adapts; S, P and Qw stay frozen.
    bool adapt_projection = true;
    // Scale t by the accumulated weight mass sum lambda^l so the S recursion
    // sees the same normalization as the cross-correlation it pairs with.
    // false gives the unnormalized recursion, whose S and wbar drift in scale.
    bool normalize_weight_correlation = true;
};

struct JioState {
    ProjectionMatrix S; // M x D
    ReducedWeights wbar;
    CMatrix P;      // ~ R^{-1}, M x M
    CMatrix Phibar; // ~ Rbar^{-1}, D x D
    CMatrix Qw;     // ~ Rw^{-1}, D x D
    double lambda = 1.0;
    std::size_t step_index = 0;
    bool adapt_projection = true;
    bool normalize_weight_correlation = true;
    double weight_mass = 0.0; // sum of lambda^l over projection updates so far

    std::size_t M() const noexcept { return S.rows(); }
    std::size_t D() const noexcept { return S.cols(); }
};

struct FullRankState {
    CVector w;
    CMatrix P;
    double lambda = 1.0;
    std::size_t step_index = 0;
};

struct StepOutput {
    cplx x;  // a-priori filter output
    cplx xi; // d - x
};

// Maps the a-priori output to the desired value used for adaptation.
using DesiredFn = std::function<cplx(cplx)>;

JioState jio_init(const JioParams& params);

// S^H r
CVector project(const ProjectionMatrix& S, std::span<const cplx> r);

// lambda^{-1} Phibar rbar / (1 + lambda^{-1} rbar^H Phibar rbar)
CVector reduced_gain(const JioState& state, std::span<const cplx> rbar);

struct ReducedUpdate {
    ReducedWeights wbar;
    CMatrix Phibar;
    cplx xi;
};
ReducedUpdate reduced_update(const JioState& state, std::span<const cplx> rbar, cplx d);

// lambda^{-1} P r / (1 + lambda^{-1} r^H P r)
CVector projection_gain(const JioState& state, std::span<const cplx> r);

struct TvecUpdate {
    CVector t;
    CMatrix Qw;
};
// Uses state.wbar as the weight vector for the Qw recursion.
TvecUpdate tvec_update(const JioState& state);

// Factor applied to t in the S update of the next step: 1 when unnormalized.
double tvec_scale(const JioState& state) noexcept;

struct ProjectionUpdate {
    ProjectionMatrix S;
    CMatrix P;
};
ProjectionUpdate projection_update(const JioState& state, std::span<const cplx> r,
                                   std::span<const cplx> rbar, cplx d, std::span<const cplx> t,
                                   std::span<const cplx> k);

StepOutput jio_step(JioState& state, std::span<const cplx> r, cplx d);
// Decision-directed form: d = desired(x).
StepOutput jio_step(JioState& state, std::span<const cplx> r, const DesiredFn& desired);

// S wbar, the equivalent full-rank filter.
CVector effective_weights(const JioState& state);

FullRankState full_rank_init(std::size_t M, double lambda, double delta);
StepOutput full_rank_rls_step(FullRankState& state, std::span<const cplx> r, cplx d);
StepOutput full_rank_rls_step(FullRankState& state, std::span<const cplx> r, const DesiredFn& desired);

// Thin receiver wrappers sharing one step contract.
class JioReceiver {
public:
    explicit JioReceiver(const JioParams& params) : state_(jio_init(params)) {}

    StepOutput step(std::span<const cplx> r, const DesiredFn& desired) { return jio_step(state_, r, desired); }
    CVector weights() const { return effective_weights(state_); }
    const JioState& state() const noexcept { return state_; }

private:
    JioState state_;
};

class FullRankReceiver {
public:
    FullRankReceiver(std::size_t M, double lambda, double delta) : state_(full_rank_init(M, lambda, delta)) {}

    StepOutput step(std::span<const cplx> r, const DesiredFn& desired)
    {
        return full_rank_rls_step(state_, r, desired);
    }
    CVector weights() const { return state_.w; }
    const FullRankState& state() const noexcept { return state_; }

private:
    FullRankState state_;
};

} // namespace rankreduce
