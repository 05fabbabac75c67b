// SPDX-License-Identifier: Apache-2.0
#include "rankreduce/cdma.hpp"

#include "rankreduce/kernels.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace rankreduce::cdma {

void ScenarioParams::validate() const
{
    if (N == 0 || K == 0 || J == 0 || Lp == 0)
        throw InputError("N, K, J and Lp must all be positive");
    if (total_symbols == 0)
        throw InputError("total_symbols must be positive");
    if (std::isnan(snr_db) || snr_db == -std::numeric_limits<double>::infinity())
        throw InputError("snr_db must be a number or +inf");
    if (!(doppler >= 0.0 && doppler < 0.5))
        throw InputError("normalized Doppler must lie in [0, 0.5)");
    if (paths == 0 || paths > path_powers_db.size())
        throw InputError("paths must be between 1 and 3");
    if (oscillators == 0)
        throw InputError("need at least one fading oscillator");
    if (!(power_spread_db >= 0.0))
        throw InputError("power spread must be non-negative");
}

std::vector<UserSignature> gen_signatures(std::size_t N, std::size_t K, Rng& rng)
{
    if (N == 0)
        throw InputError("spreading gain must be positive");
    std::bernoulli_distribution coin(0.5);
    const double amp = 1.0 / std::sqrt(static_cast<double>(N));
    std::vector<UserSignature> out(K);
    for (UserSignature& s : out) {
        s.chips.resize(N);
        for (double& c : s.chips)
            c = coin(rng) ? amp : -amp;
    }
    return out;
}

double ConvolutionMatrices::at(SymbolOffset which, std::size_t row, std::size_t col) const
{
    const std::vector<double>& block =
        which == SymbolOffset::previous ? prev : which == SymbolOffset::current ? cur : next;
    return block[row * Lp + col];
}

std::vector<double> ConvolutionMatrices::dense(SymbolOffset which) const
{
    const std::size_t m = M();
    const std::size_t rows = J * m, cols = J * Lp;
    std::vector<double> out(rows * cols, 0.0);
    for (std::size_t j = 0; j < J; ++j)
        for (std::size_t r = 0; r < m; ++r)
            for (std::size_t c = 0; c < Lp; ++c)
                out[(j * m + r) * cols + j * Lp + c] = at(which, r, c);
    return out;
}

ConvolutionMatrices build_convolution_matrices(const UserSignature& sig, std::size_t Lp, std::size_t J)
{
    if (Lp == 0 || J == 0 || sig.chips.empty())
        throw InputError("convolution matrices need Lp >= 1, J >= 1 and a non-empty signature");
    ConvolutionMatrices f;
    f.N = sig.chips.size();
    f.Lp = Lp;
    f.J = J;
    const std::size_t N = f.N, M = f.M();
    f.prev.assign(M * Lp, 0.0);
    f.cur.assign(M * Lp, 0.0);
    f.next.assign(M * Lp, 0.0);
    // Column m is the signature delayed by m chips. Window chip n of symbol i
    // sees chip n-m of symbol i, chip n-m+N of symbol i-1 and chip n-m-N of
    // symbol i+1.
    for (std::size_t m = 0; m < Lp; ++m)
        for (std::size_t n = 0; n < M; ++n) {
            const long own = static_cast<long>(n) - static_cast<long>(m);
            const long before = own + static_cast<long>(N);
            const long after = own - static_cast<long>(N);
            if (own >= 0 && own < static_cast<long>(N))
                f.cur[n * Lp + m] = sig.chips[own];
            if (before >= 0 && before < static_cast<long>(N))
                f.prev[n * Lp + m] = sig.chips[before];
            if (after >= 0 && after < static_cast<long>(N))
                f.next[n * Lp + m] = sig.chips[after];
        }
    return f;
}

ClarkeProcess::ClarkeProcess(double doppler, std::size_t oscillators, Rng& rng)
    : omega_(oscillators), phase_(oscillators), norm_(1.0 / std::sqrt(static_cast<double>(oscillators)))
{
    // Arrival angles stratified over the circle, one per sector.
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t n = 0; n < oscillators; ++n) {
        const double alpha = two_pi * (static_cast<double>(n) + unit(rng)) / static_cast<double>(oscillators);
        omega_[n] = two_pi * doppler * std::cos(alpha);
        phase_[n] = two_pi * unit(rng);
    }
}

cplx ClarkeProcess::gain(double symbol_index) const
{
    double re = 0.0, im = 0.0;
    for (std::size_t n = 0; n < omega_.size(); ++n) {
        const double arg = omega_[n] * symbol_index + phase_[n];
        re += std::cos(arg);
        im += std::sin(arg);
    }
    return {norm_ * re, norm_ * im};
}

ChannelModel::ChannelModel(const ScenarioParams& params, Rng& rng)
    : J_(params.J), Lp_(params.Lp), doppler_(params.doppler), powers_db_(params.path_powers_db)
{
    params.validate();
    std::uniform_int_distribution<int> spacing(1, 2);
    std::uniform_real_distribution<double> doa(0.0, 2.0 * std::numbers::pi / 3.0);

    std::size_t delay = 0;
    double total = 0.0;
    for (std::size_t p = 0; p < params.paths; ++p) {
        if (p > 0)
            delay += static_cast<std::size_t>(spacing(rng));
        const double angle = doa(rng);
        // Paths beyond the channel length bound are dropped.
        if (delay >= params.Lp)
            continue;
        delays_.push_back(delay);
        doas_.push_back(angle);
        powers_.push_back(std::pow(10.0, params.path_powers_db[p] / 10.0));
        total += powers_.back();
    }
    for (double& p : powers_)
        p /= total;
    for (std::size_t p = 0; p < delays_.size(); ++p)
        fading_.emplace_back(params.doppler, params.oscillators, rng);
    if (!params.rayleigh)
        fading_.clear();
}

cplx ChannelModel::array_phase(std::size_t path, std::size_t antenna) const
{
    return std::polar(1.0, -std::numbers::pi * static_cast<double>(antenna) * std::sin(doas_[path]));
}

SpaceTimeChannel ChannelModel::at(double symbol_index) const
{
    SpaceTimeChannel ch;
    ch.taps = CMatrix(J_, Lp_);
    ch.path_delays = delays_;
    ch.doas = doas_;
    ch.doppler = doppler_;
    for (std::size_t p = 0; p < delays_.size(); ++p) {
        ch.path_powers_db.push_back(10.0 * std::log10(powers_[p]));
        const cplx g = std::sqrt(powers_[p]) * (fading_.empty() ? cplx{1.0} : path_gain(p, symbol_index));
        for (std::size_t j = 0; j < J_; ++j)
            ch.taps(j, delays_[p]) += g * array_phase(p, j);
    }
    return ch;
}

ChannelModel gen_channel(const ScenarioParams& params, Rng& rng) { return ChannelModel(params, rng); }

TrialScenario::TrialScenario(const ScenarioParams& params, std::uint64_t seed) : params_(params), seed_(seed)
{
    params_.validate();
    Rng rng(seed);
    const std::size_t K = params_.K, T = params_.total_symbols;

    signatures_ = gen_signatures(params_.N, K, rng);
    for (const UserSignature& s : signatures_)
        conv_.push_back(build_convolution_matrices(s, params_.Lp, params_.J));
    for (std::size_t k = 0; k < K; ++k)
        channels_.push_back(gen_channel(params_, rng));

    std::normal_distribution<double> power_db(0.0, params_.power_spread_db);
    for (std::size_t k = 0; k < K; ++k)
        amplitudes_.push_back(std::pow(10.0, power_db(rng) / 20.0));
    sigma2_ = std::isinf(params_.snr_db) ? 0.0
                                         : amplitudes_[0] * amplitudes_[0] / std::pow(10.0, params_.snr_db / 10.0);

    std::bernoulli_distribution coin(0.5);
    bits_.assign(K, std::vector<double>(T + 2));
    for (auto& stream : bits_)
        for (double& b : stream)
            b = coin(rng) ? 1.0 : -1.0;

    // Fading gains for every channel time the snapshots touch, [-1, T].
    path_gains_.assign(K * 3 * (T + 2), cplx{1.0});
    if (params_.rayleigh)
        for (std::size_t k = 0; k < K; ++k)
            for (std::size_t p = 0; p < channels_[k].delays().size(); ++p)
                for (std::size_t t = 0; t < T + 2; ++t)
                    path_gains_[(k * 3 + p) * (T + 2) + t] =
                        channels_[k].path_gain(p, static_cast<double>(t) - 1.0);

    const std::size_t JM = params_.observation_length();
    noise_.assign(T * JM, cplx{});
    if (sigma2_ > 0.0) {
        std::normal_distribution<double> gauss(0.0, std::sqrt(sigma2_ / 2.0));
        for (cplx& z : noise_) {
            const double re = gauss(rng);
            z = {re, gauss(rng)};
        }
    }
}

double TrialScenario::symbol(std::size_t user, long i) const
{
    return bits_.at(user).at(static_cast<std::size_t>(i + 1));
}

std::span<const cplx> TrialScenario::noise(std::size_t i) const
{
    const std::size_t JM = params_.observation_length();
    if (i >= params_.total_symbols)
        throw InputError("symbol index beyond the generated stream");
    return {noise_.data() + i * JM, JM};
}

cplx TrialScenario::tap_gain(std::size_t user, std::size_t path, long time) const
{
    return path_gains_[(user * 3 + path) * (params_.total_symbols + 2) + static_cast<std::size_t>(time + 1)];
}

CVector TrialScenario::spatial_signature(std::size_t user, SymbolOffset offset, std::size_t i) const
{
    const std::size_t M = params_.chips_per_block();
    const ChannelModel& ch = channels_.at(user);
    const ConvolutionMatrices& F = conv_.at(user);
    const long time = static_cast<long>(i) + static_cast<int>(offset);
    CVector out(params_.J * M);
    // Only the path delays carry non-zero taps.
    for (std::size_t p = 0; p < ch.delays().size(); ++p) {
        const cplx g = amplitudes_[user] * std::sqrt(ch.powers()[p]) * tap_gain(user, p, time);
        const std::size_t col = ch.delays()[p];
        for (std::size_t j = 0; j < params_.J; ++j) {
            const cplx h = g * ch.array_phase(p, j);
            for (std::size_t n = 0; n < M; ++n)
                if (const double f = F.at(offset, n, col); f != 0.0)
                    out[j * M + n] += f * h;
        }
    }
    return out;
}

std::vector<SignalTerm> TrialScenario::signal_terms(std::size_t i) const
{
    std::vector<SignalTerm> terms;
    terms.reserve(3 * params_.K);
    for (std::size_t k = 0; k < params_.K; ++k)
        for (SymbolOffset o : {SymbolOffset::previous, SymbolOffset::current, SymbolOffset::next})
            terms.push_back({k, o, spatial_signature(k, o, i)});
    return terms;
}

ObservationVector assemble_observation(const TrialScenario& scenario, std::size_t i,
                                       const std::vector<SignalTerm>& terms)
{
    const std::span<const cplx> n = scenario.noise(i);
    ObservationVector r(n.begin(), n.end());
    for (const SignalTerm& t : terms) {
        const double b = scenario.symbol(t.user, static_cast<long>(i) + static_cast<int>(t.offset));
        for (std::size_t m = 0; m < r.size(); ++m)
            r[m] += b * t.vec[m];
    }
    return r;
}

Snapshot received_vector(const TrialScenario& scenario, std::size_t i)
{
    return {assemble_observation(scenario, i, scenario.signal_terms(i)), scenario.symbol(0, static_cast<long>(i))};
}

std::size_t TrialResult::post_training_errors() const
{
    std::size_t n = 0;
    for (std::size_t i = train_len; i < errors.size(); ++i)
        n += errors[i];
    return n;
}

double TrialResult::ber() const
{
    const std::size_t n = errors.size() > train_len ? errors.size() - train_len : 0;
    return n == 0 ? 0.0 : static_cast<double>(post_training_errors()) / static_cast<double>(n);
}

double output_sinr(std::span<const cplx> w, const std::vector<SignalTerm>& terms, double sigma2)
{
    double signal = 0.0;
    double interference = sigma2 * std::pow(norm2(w), 2);
    for (const SignalTerm& t : terms) {
        const double power = std::norm(kernels::active_table().dotc(w.data(), t.vec.data(), w.size()));
        if (t.user == 0 && t.offset == SymbolOffset::current)
            signal += power;
        else
            interference += power;
    }
    if (interference == 0.0)
        return signal > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    return signal / interference;
}

} // namespace rankreduce::cdma
