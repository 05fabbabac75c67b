// SPDX-License-Identifier: Apache-2.0
#include "rankreduce/estimation.hpp"

#include <cmath>
#include <string>

namespace rankreduce {

void SampleHistory::validate() const
{
    if (samples.empty())
        throw InputError("sample history is empty");
    if (!(forgetting > 0.0 && forgetting <= 1.0))
        throw InputError("forgetting factor must lie in (0, 1], got " + std::to_string(forgetting));
    const std::size_t M = samples.front().r.size();
    if (M == 0)
        throw InputError("observation vectors must be non-empty");
    for (std::size_t l = 0; l < samples.size(); ++l)
        if (samples[l].r.size() != M)
            throw InputError("sample " + std::to_string(l) + " has length " +
                             std::to_string(samples[l].r.size()) + ", expected " + std::to_string(M));
}

CorrelationPair accumulate_correlation(const SampleHistory& history)
{
    history.validate();
    const std::size_t M = history.dimension();
    CorrelationPair out{CMatrix(M, M), CVector(M), 0.0};

    // Horner form: acc <- lambda * acc + new term, oldest sample first.
    const double lambda = history.forgetting;
    for (const Sample& s : history.samples) {
        for (std::size_t i = 0; i < M; ++i) {
            for (std::size_t j = 0; j < M; ++j)
                out.R(i, j) = lambda * out.R(i, j) + s.r[i] * std::conj(s.r[j]);
            out.p[i] = lambda * out.p[i] + std::conj(s.d) * s.r[i];
        }
        out.sigma2_d = lambda * out.sigma2_d + std::norm(s.d);
    }
    make_hermitian(out.R);
    return out;
}

double default_ridge(const CorrelationPair& corr)
{
    const std::size_t M = corr.R.rows();
    return M == 0 ? 0.0 : 1e-8 * trace_real(corr.R) / static_cast<double>(M);
}

ReducedCorrelationPair reduce_correlation(const CorrelationPair& corr, const ProjectionMatrix& S,
                                          const ReducedWeights& wbar)
{
    if (S.rows() != corr.R.rows())
        throw InputError("projection row count does not match observation length");
    if (wbar.size() != S.cols())
        throw InputError("reduced weights length does not match projection rank");
    ReducedCorrelationPair red;
    const CMatrix Sh = S.adjoint();
    red.Rbar = Sh * (corr.R * S);
    make_hermitian(red.Rbar);
    red.pbar = adjoint_times(S, corr.p);
    red.PD = outer(corr.p, wbar);
    red.Rw = outer(wbar, wbar);
    return red;
}

ReducedWeights batch_reduced_weights(const ProjectionMatrix& S, const CorrelationPair& corr,
                                     double ridge)
{
    if (S.rows() != corr.R.rows() || S.cols() == 0 || S.cols() > S.rows())
        throw InputError("projection must be M x D with 1 <= D <= M");
    if (ridge < 0.0)
        throw InputError("ridge must be non-negative");
    CMatrix Rbar = S.adjoint() * (corr.R * S);
    make_hermitian(Rbar);
    add_to_diagonal(Rbar, ridge);
    const CVector pbar = adjoint_times(S, corr.p);
    try {
        return LuSolver(Rbar).solve(pbar);
    } catch (const NumericalError& e) {
        throw NumericalError(std::string("reduced covariance: ") + e.what());
    }
}

ProjectionMatrix batch_projection(const CorrelationPair& corr, const ReducedCorrelationPair& red,
                                  double ridge)
{
    const std::size_t M = corr.R.rows();
    const std::size_t D = red.Rw.rows();
    if (red.PD.rows() != M || red.PD.cols() != D || red.Rw.cols() != D)
        throw InputError("cross matrix must be M x D and weight correlation D x D");
    if (ridge < 0.0)
        throw InputError("ridge must be non-negative");

    CMatrix R = corr.R;
    add_to_diagonal(R, ridge);
    CMatrix Rw = red.Rw;
    make_hermitian(Rw);
    add_to_diagonal(Rw, ridge);

    try {
        // X = R^{-1} PD, then S = X Rw^{-1}, i.e. S^H = Rw^{-H} X^H.
        const CMatrix X = LuSolver(R).solve(red.PD);
        return LuSolver(Rw.adjoint()).solve(X.adjoint()).adjoint();
    } catch (const NumericalError& e) {
        throw NumericalError(std::string("projection solve: ") + e.what());
    }
}

double ses(const ReducedCorrelationPair& red, double sigma2_d)
{
    try {
        const CVector sol = LuSolver(red.Rbar).solve(red.pbar);
        return sigma2_d - inner(red.pbar, sol).real();
    } catch (const NumericalError& e) {
        throw NumericalError(std::string("SES: ") + e.what());
    }
}

double weighted_cost(const SampleHistory& history, const ProjectionMatrix& S,
                     const ReducedWeights& wbar)
{
    history.validate();
    if (S.rows() != history.dimension() || S.cols() != wbar.size())
        throw InputError("cost: projection / weight shapes do not match the history");
    const CVector g = S * wbar;
    double cost = 0.0;
    for (const Sample& s : history.samples)
        cost = history.forgetting * cost + std::norm(s.d - inner(g, s.r));
    return cost;
}

ProjectionMatrix initial_projection(std::size_t M, std::size_t D)
{
    if (D == 0 || D > M)
        throw InputError("rank D must satisfy 1 <= D <= M");
    ProjectionMatrix S(M, D);
    for (std::size_t d = 0; d < D; ++d)
        S(d, d) = 1.0;
    return S;
}

ReducedWeights initial_weights(std::size_t D)
{
    if (D == 0)
        throw InputError("rank D must be at least 1");
    ReducedWeights w(D);
    w[0] = 1.0;
    return w;
}

AlternatingResult alternating_ls(const SampleHistory& history, std::size_t D, std::size_t iters,
                                 const ProjectionMatrix& init, double ridge)
{
    history.validate();
    if (iters == 0)
        throw InputError("alternating_ls needs at least one iteration");
    if (init.rows() != history.dimension() || init.cols() != D)
        throw InputError("initial projection must be M x D");

    const CorrelationPair corr = accumulate_correlation(history);
    AlternatingResult out{init, initial_weights(D), 0.0, {}};
    out.initial_cost = weighted_cost(history, out.S, out.wbar);
    out.cost_trace.reserve(iters);
    for (std::size_t it = 0; it < iters; ++it) {
        out.wbar = batch_reduced_weights(out.S, corr, ridge);
        out.S = batch_projection(corr, reduce_correlation(corr, out.S, out.wbar), ridge);
        out.cost_trace.push_back(weighted_cost(history, out.S, out.wbar));
    }
    return out;
}

} // namespace rankreduce
