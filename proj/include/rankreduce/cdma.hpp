// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "rankreduce/jio_rls.hpp"
#include "rankreduce/linalg.hpp"

#include <array>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

// DS-CDMA uplink with a J-element half-wavelength array, chip-rate sampling
// after the chip matched filter, and one symbol of ISI on either side.
//
// Each snapshot holds J blocks of M = N + Lp - 1 chips:
//   r[i] = sum_k A_k (b_k[i-1] Fprev H_k[i-1] + b_k[i] Fcur H_k[i] + b_k[i+1] Fnext H_k[i+1]) + n[i]
// User 0 is the desired user.

namespace rankreduce::cdma {

using Rng = std::mt19937_64;

struct ScenarioParams {
    std::size_t N = 16;  // spreading gain
    std::size_t K = 6;   // users
    std::size_t J = 2;   // antenna elements
    std::size_t Lp = 9;  // channel length upper bound, in chips
    double snr_db = 12.0; // A_0^2 / sigma^2; +inf for a noiseless channel
    double doppler = 0.001; // normalized Doppler f_d T, per symbol
    std::size_t total_symbols = 1500;
    double power_spread_db = 1.5; // std-dev of the log-normal user powers
    std::array<double, 3> path_powers_db{0.0, -3.0, -6.0};
    std::size_t oscillators = 16;
    std::size_t paths = 3;  // leading entries of path_powers_db that are used
    bool rayleigh = true;   // false: every path gain is exactly 1

    std::size_t chips_per_block() const noexcept { return N + Lp - 1; }
    std::size_t observation_length() const noexcept { return J * chips_per_block(); }
    void validate() const;
};

struct UserSignature {
    std::vector<double> chips; // +-1/sqrt(N)
};

std::vector<UserSignature> gen_signatures(std::size_t N, std::size_t K, Rng& rng);

enum class SymbolOffset : int { previous = -1, current = 0, next = 1 };

// The three M x Lp blocks of the block-diagonal convolution matrices; the
// same block is repeated on each of the J antennas.
struct ConvolutionMatrices {
    std::size_t N = 0, Lp = 0, J = 0;
    std::vector<double> prev, cur, next; // row-major, M x Lp each

    std::size_t M() const noexcept { return N + Lp - 1; }
    double at(SymbolOffset which, std::size_t row, std::size_t col) const;
    // Full (J M) x (J Lp) block-diagonal matrix.
    std::vector<double> dense(SymbolOffset which) const;
};

ConvolutionMatrices build_convolution_matrices(const UserSignature& sig, std::size_t Lp, std::size_t J);

// Sum-of-sinusoids Rayleigh process with Clarke's Bessel autocorrelation:
// g(i) = N^{-1/2} sum_n exp(j (2 pi f_d i cos(alpha_n) + phi_n)).
class ClarkeProcess {
public:
    ClarkeProcess(double doppler, std::size_t oscillators, Rng& rng);
    cplx gain(double symbol_index) const;

private:
    std::vector<double> omega_;
    std::vector<double> phase_;
    double norm_ = 1.0;
};

struct SpaceTimeChannel {
    CMatrix taps; // J x Lp
    std::vector<std::size_t> path_delays;
    std::vector<double> path_powers_db;
    std::vector<double> doas;
    double doppler = 0.0;
};

// Random multipath geometry of one user plus its fading processes.
class ChannelModel {
public:
    ChannelModel(const ScenarioParams& params, Rng& rng);

    SpaceTimeChannel at(double symbol_index) const;

    const std::vector<std::size_t>& delays() const noexcept { return delays_; }
    const std::vector<double>& doas() const noexcept { return doas_; }
    // Linear path powers, summing to one.
    const std::vector<double>& powers() const noexcept { return powers_; }
    // Fading gain of one path (unit average power) and the array phase e^{-j pi j sin(doa)}.
    cplx path_gain(std::size_t path, double symbol_index) const { return fading_[path].gain(symbol_index); }
    cplx array_phase(std::size_t path, std::size_t antenna) const;

private:
    std::size_t J_ = 1, Lp_ = 1;
    double doppler_ = 0.0;
    std::array<double, 3> powers_db_{};
    std::vector<std::size_t> delays_;
    std::vector<double> doas_;
    std::vector<double> powers_;
    std::vector<ClarkeProcess> fading_;
};

ChannelModel gen_channel(const ScenarioParams& params, Rng& rng);

struct Snapshot {
    ObservationVector r;
    double d = 0.0; // b_0[i], known only during training
};

// One user / symbol-offset term of the received vector, A_k F H_k, without the symbol.
struct SignalTerm {
    std::size_t user;
    SymbolOffset offset;
    CVector vec;
};

class TrialScenario {
public:
    TrialScenario(const ScenarioParams& params, std::uint64_t seed);

    const ScenarioParams& params() const noexcept { return params_; }
    std::uint64_t seed() const noexcept { return seed_; }
    double noise_variance() const noexcept { return sigma2_; }
    const std::vector<double>& amplitudes() const noexcept { return amplitudes_; }
    const std::vector<UserSignature>& signatures() const noexcept { return signatures_; }
    const std::vector<ChannelModel>& channels() const noexcept { return channels_; }
    const ConvolutionMatrices& convolution(std::size_t user) const { return conv_[user]; }

    // b_k[i] for i in [-1, total_symbols].
    double symbol(std::size_t user, long i) const;
    std::span<const cplx> noise(std::size_t i) const;

    // All 3K signal terms at symbol i.
    std::vector<SignalTerm> signal_terms(std::size_t i) const;
    // A_k F (J-antenna stacked) H_k at the channel time matching the offset.
    CVector spatial_signature(std::size_t user, SymbolOffset offset, std::size_t i) const;

private:
    cplx tap_gain(std::size_t user, std::size_t path, long time) const;

    ScenarioParams params_;
    std::uint64_t seed_;
    double sigma2_ = 0.0;
    std::vector<UserSignature> signatures_;
    std::vector<ConvolutionMatrices> conv_;
    std::vector<ChannelModel> channels_;
    std::vector<double> amplitudes_;
    std::vector<std::vector<double>> bits_;  // [user][i + 1]
    std::vector<cplx> path_gains_;          // [user][path][time + 1]
    std::vector<cplx> noise_;               // [i][JM]
};

Snapshot received_vector(const TrialScenario& scenario, std::size_t i);
// sum of b * term over the given terms, plus the noise of symbol i.
ObservationVector assemble_observation(const TrialScenario& scenario, std::size_t i,
                                       const std::vector<SignalTerm>& terms);

// Sign of the real part, ties to +1.
inline double decide(cplx x) { return x.real() >= 0.0 ? 1.0 : -1.0; }

template <class R>
concept StepReceiver = requires(R rx, std::span<const cplx> r, const DesiredFn& f) {
    { rx.step(r, f) } -> std::same_as<StepOutput>;
    { rx.weights() } -> std::convertible_to<CVector>;
};

struct TrialResult {
    std::vector<std::uint8_t> errors; // per symbol, training included
    std::vector<double> sinr;         // linear output SINR of the weights used at each symbol
    std::size_t train_len = 0;

    std::size_t post_training_errors() const;
    double ber() const; // over post-training symbols
};

// Output SINR of weights w against the known terms at symbol i.
double output_sinr(std::span<const cplx> w, const std::vector<SignalTerm>& terms, double sigma2);

// Training with b_0[i] for i < train_len, decision-directed afterwards.
template <StepReceiver R>
TrialResult run_ber_trial(const TrialScenario& scenario, R& receiver, std::size_t train_len,
                          std::size_t total_len)
{
    if (train_len >= total_len)
        throw InputError("training length must be shorter than the trial");
    if (total_len > scenario.params().total_symbols)
        throw InputError("trial longer than the generated symbol stream");

    TrialResult out;
    out.train_len = train_len;
    out.errors.resize(total_len);
    out.sinr.resize(total_len);
    for (std::size_t i = 0; i < total_len; ++i) {
        const std::vector<SignalTerm> terms = scenario.signal_terms(i);
        const ObservationVector r = assemble_observation(scenario, i, terms);
        const CVector w = receiver.weights();
        out.sinr[i] = output_sinr(w, terms, scenario.noise_variance());

        const double truth = scenario.symbol(0, static_cast<long>(i));
        double decision = 0.0;
        const bool training = i < train_len;
        receiver.step(r, [&](cplx x) {
            decision = decide(x);
            return cplx{training ? truth : decision};
        });
        out.errors[i] = decision != truth ? 1 : 0;
    }
    return out;
}

} // namespace rankreduce::cdma
