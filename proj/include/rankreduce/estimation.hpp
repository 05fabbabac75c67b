// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "rankreduce/linalg.hpp"

#include <cstddef>
#include <vector>

// Batch least-squares machinery for the joint projection / reduced-rank
// filter model x = wbar^H S^H r. Everything here is a pure function of its
// arguments; the streaming recursions in jio_rls.hpp are checked against it.

namespace rankreduce {

// Full-rank observation r[l]; length M.
using ObservationVector = CVector;
// M x D bank of full-rank filters, one per column.
using ProjectionMatrix = CMatrix;
// D-tap filter applied to the projected observation.
using ReducedWeights = CVector;

struct Sample {
    ObservationVector r;
    cplx d;
};

struct SampleHistory {
    std::vector<Sample> samples;
    double forgetting = 1.0;

    std::size_t dimension() const { return samples.empty() ? 0 : samples.front().r.size(); }
    // Throws InputError on an empty history, ragged lengths or a forgetting
    // factor outside (0, 1].
    void validate() const;
};

struct CorrelationPair {
    CMatrix R;       // sum lambda^{i-l} r r^H
    CVector p;       // sum lambda^{i-l} d^* r
    double sigma2_d; // sum lambda^{i-l} |d|^2
};

struct ReducedCorrelationPair {
    CMatrix Rbar; // S^H R S
    CVector pbar; // S^H p
    CMatrix PD;   // M x D cross matrix
    CMatrix Rw;   // D x D weight correlation
};

CorrelationPair accumulate_correlation(const SampleHistory& history);

// Ridge of 1e-8 times the mean diagonal of R.
double default_ridge(const CorrelationPair& corr);

// Reduced quantities for a weight vector held fixed over the whole history.
// PD = p wbar^H and Rw = wbar wbar^H; with these, batch_projection returns the
// exact minimizer of the weighted cost over S for that wbar.
ReducedCorrelationPair reduce_correlation(const CorrelationPair& corr, const ProjectionMatrix& S,
                                          const ReducedWeights& wbar);

// (S^H R S + ridge I)^{-1} S^H p
ReducedWeights batch_reduced_weights(const ProjectionMatrix& S, const CorrelationPair& corr,
                                     double ridge);

// (R + ridge I)^{-1} PD (Rw + ridge I)^{-1}
ProjectionMatrix batch_projection(const CorrelationPair& corr, const ReducedCorrelationPair& red,
                                  double ridge);

// sigma2_d - pbar^H Rbar^{-1} pbar
double ses(const ReducedCorrelationPair& red, double sigma2_d);

// sum lambda^{i-l} |d[l] - wbar^H S^H r[l]|^2 evaluated directly over the history.
double weighted_cost(const SampleHistory& history, const ProjectionMatrix& S,
                     const ReducedWeights& wbar);

// [I_D; 0], the M x D truncation projection.
ProjectionMatrix initial_projection(std::size_t M, std::size_t D);
// [1, 0, ..., 0]
ReducedWeights initial_weights(std::size_t D);

struct AlternatingResult {
    ProjectionMatrix S;
    ReducedWeights wbar;
    double initial_cost = 0.0;      // cost at (init, initial_weights(D))
    std::vector<double> cost_trace; // cost after each sweep
};

// Coordinate descent on the weighted cost: each sweep solves for wbar with S
// fixed, then for S with the new wbar fixed.
AlternatingResult alternating_ls(const SampleHistory& history, std::size_t D, std::size_t iters,
                                 const ProjectionMatrix& init, double ridge);

} // namespace rankreduce
