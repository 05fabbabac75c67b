// SPDX-License-Identifier: Apache-2.0
#include "oracle.hpp"
#include "rankreduce/cdma.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

using namespace rankreduce;
using namespace rankreduce::cdma;

namespace {

ScenarioParams clean_single_user(std::size_t Lp = 1)
{
    ScenarioParams p;
    p.K = 1;
    p.Lp = Lp;
    p.snr_db = std::numeric_limits<double>::infinity();
    p.doppler = 0.0;
    p.paths = 1;
    p.rayleigh = false;
    p.total_symbols = 400;
    return p;
}

struct ZeroReceiver {
    std::size_t M;
    StepOutput step(std::span<const cplx>, const DesiredFn& f)
    {
        const cplx d = f(0.0);
        return {0.0, d};
    }
    CVector weights() const { return CVector(M); }
};

} // namespace

TEST_CASE("signatures")
{
    Rng rng(1);
    for (const UserSignature& s : gen_signatures(4, 5, rng)) {
        double e = 0.0;
        for (double c : s.chips) {
            CHECK(std::abs(c) == 0.5);
            e += c * c;
        }
        CHECK(std::abs(e - 1.0) <= 1e-12);
    }
    Rng a(9), b(9);
    const auto sa = gen_signatures(16, 6, a), sb = gen_signatures(16, 6, b);
    for (std::size_t k = 0; k < 6; ++k)
        CHECK(sa[k].chips == sb[k].chips);

    std::set<std::vector<double>> distinct;
    for (const UserSignature& s : sa)
        distinct.insert(s.chips);
    CHECK(distinct.size() == 6);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = i + 1; j < 6; ++j) {
            double c = 0.0;
            for (std::size_t n = 0; n < 16; ++n)
                c += sa[i].chips[n] * sa[j].chips[n];
            CHECK(std::abs(c) < 1.0);
        }
}

TEST_CASE("single tap convolution has no ISI")
{
    const UserSignature s{{0.5, -0.5, 0.5, 0.5}};
    const ConvolutionMatrices f = build_convolution_matrices(s, 1, 2);
    REQUIRE(f.M() == 4);
    for (std::size_t n = 0; n < 4; ++n) {
        CHECK(f.at(SymbolOffset::current, n, 0) == s.chips[n]);
        CHECK(f.at(SymbolOffset::previous, n, 0) == 0.0);
        CHECK(f.at(SymbolOffset::next, n, 0) == 0.0);
    }
}

TEST_CASE("two chip signature, two taps")
{
    const double a = 0.6, b = -0.8;
    const ConvolutionMatrices f = build_convolution_matrices(UserSignature{{a, b}}, 2, 1);
    REQUIRE(f.M() == 3);
    const double cur[3][2] = {{a, 0}, {b, a}, {0, b}};
    for (std::size_t n = 0; n < 3; ++n)
        for (std::size_t m = 0; m < 2; ++m)
            CHECK(f.at(SymbolOffset::current, n, m) == cur[n][m]);
    // next symbol starts at chip 2 of the window; the previous one spills its last chip into the delayed tap
    CHECK(f.at(SymbolOffset::next, 2, 0) == a);
    CHECK(f.at(SymbolOffset::previous, 0, 1) == b);
    double others = 0.0;
    for (std::size_t n = 0; n < 3; ++n)
        for (std::size_t m = 0; m < 2; ++m)
            others += std::abs(f.at(SymbolOffset::next, n, m)) + std::abs(f.at(SymbolOffset::previous, n, m));
    CHECK(others == doctest::Approx(std::abs(a) + std::abs(b)));
}

TEST_CASE("convolution energy per column")
{
    Rng rng(3);
    const UserSignature s = gen_signatures(16, 1, rng)[0];
    const ConvolutionMatrices f = build_convolution_matrices(s, 9, 2);
    for (std::size_t m = 0; m < 9; ++m) {
        double cur = 0.0, symbol_span = 0.0;
        for (std::size_t n = 0; n < f.M(); ++n)
            cur += std::pow(f.at(SymbolOffset::current, n, m), 2);
        // One symbol interval of the window holds the whole signature, split
        // between the current symbol and the previous one's tail.
        for (std::size_t n = 0; n < f.N; ++n)
            symbol_span += std::pow(f.at(SymbolOffset::current, n, m), 2) + std::pow(f.at(SymbolOffset::previous, n, m), 2);
        CHECK(std::abs(cur - 1.0) <= 1e-12);
        CHECK(std::abs(symbol_span - 1.0) <= 1e-12);
        for (std::size_t n = 1; n < f.M(); ++n) // one-chip shift structure
            if (m > 0)
                CHECK(f.at(SymbolOffset::current, n, m) == f.at(SymbolOffset::current, n - 1, m - 1));
    }
    const std::vector<double> dense = f.dense(SymbolOffset::current);
    CHECK(dense.size() == 48 * 18);
    CHECK(dense[(24 + 3) * 18 + 9 + 2] == f.at(SymbolOffset::current, 3, 2));
    CHECK(dense[3 * 18 + 9 + 2] == 0.0); // off-diagonal antenna block
}

TEST_CASE("channel geometry")
{
    ScenarioParams p;
    Rng rng(4);
    for (int rep = 0; rep < 200; ++rep) {
        const ChannelModel ch = gen_channel(p, rng);
        REQUIRE(ch.delays().size() == 3);
        CHECK(ch.delays()[0] == 0);
        for (std::size_t k = 1; k < 3; ++k) {
            const std::size_t gap = ch.delays()[k] - ch.delays()[k - 1];
            CHECK((gap == 1 || gap == 2));
        }
        CHECK(ch.delays().back() < p.Lp);
        double total = 0.0;
        for (double w : ch.powers())
            total += w;
        CHECK(std::abs(total - 1.0) < 1e-12);
        for (double a : ch.doas())
            CHECK((a >= 0.0 && a < 2.0 * std::numbers::pi / 3.0));
        const SpaceTimeChannel st = ch.at(10.0);
        for (std::size_t j = 0; j < p.J; ++j) {
            std::size_t nonzero = 0;
            for (std::size_t l = 0; l < p.Lp; ++l)
                nonzero += st.taps(j, l) != cplx{};
            CHECK(nonzero <= 3);
        }
    }
}

TEST_CASE("paths beyond the channel length are dropped")
{
    ScenarioParams p;
    p.Lp = 2;
    Rng rng(5);
    for (int rep = 0; rep < 50; ++rep) {
        const ChannelModel ch = gen_channel(p, rng);
        CHECK(ch.delays().size() >= 1);
        CHECK(ch.delays().back() < 2);
    }
}

TEST_CASE("static channel is constant and a single antenna has no array phase")
{
    ScenarioParams p;
    p.doppler = 0.0;
    p.J = 1;
    Rng rng(6);
    const ChannelModel ch = gen_channel(p, rng);
    const SpaceTimeChannel a = ch.at(0.0), b = ch.at(1234.0);
    CHECK(a.taps == b.taps);
    for (std::size_t k = 0; k < ch.delays().size(); ++k) {
        CHECK(ch.array_phase(k, 0) == cplx{1.0});
        const cplx expect = std::sqrt(ch.powers()[k]) * ch.path_gain(k, 0.0);
        CHECK(std::abs(a.taps(0, ch.delays()[k]) - expect) < 1e-15);
    }
}

TEST_CASE("Clarke autocorrelation follows the Bessel profile")
{
    const double fd = 0.001;
    const std::size_t T = 10000, reps = 50;
    Rng rng(7);
    const std::size_t lags[] = {0, 50, 100, 200, 300, 400, 600, 800, 1000};
    std::vector<double> acc(std::size(lags), 0.0);
    for (std::size_t rep = 0; rep < reps; ++rep) {
        const ClarkeProcess g(fd, 16, rng);
        std::vector<cplx> x(T);
        for (std::size_t i = 0; i < T; ++i)
            x[i] = g.gain(static_cast<double>(i));
        for (std::size_t k = 0; k < std::size(lags); ++k) {
            cplx s{};
            for (std::size_t i = 0; i + lags[k] < T; ++i)
                s += x[i + lags[k]] * std::conj(x[i]);
            acc[k] += s.real() / static_cast<double>(T - lags[k]) / reps;
        }
    }
    for (std::size_t k = 0; k < std::size(lags); ++k) {
        const double ref = std::cyl_bessel_j(0.0, 2.0 * std::numbers::pi * fd * static_cast<double>(lags[k]));
        CHECK_MESSAGE(std::abs(acc[k] - ref) < 0.1, "lag " << lags[k] << ": " << acc[k] << " vs " << ref);
    }
}

TEST_CASE("empirical path power profile")
{
    ScenarioParams p;
    p.J = 1;
    Rng rng(8);
    double power[3] = {0, 0, 0};
    const int n = 10000;
    for (int rep = 0; rep < n; ++rep) {
        const ChannelModel ch = gen_channel(p, rng);
        const SpaceTimeChannel st = ch.at(0.0);
        for (std::size_t k = 0; k < 3; ++k)
            power[k] += std::norm(st.taps(0, ch.delays()[k])) / n;
    }
    const double profile[3] = {0.0, -3.0, -6.0};
    for (std::size_t k = 0; k < 3; ++k)
        CHECK(std::abs(10.0 * std::log10(power[k] / power[0]) - profile[k]) < 0.2);
}

TEST_CASE("noise covariance")
{
    ScenarioParams p;
    p.N = 4;
    p.Lp = 1;
    p.J = 1;
    p.K = 1;
    p.snr_db = 3.0;
    p.total_symbols = 10000;
    const TrialScenario sc(p, 10);
    const std::size_t M = p.observation_length();
    oracle::Mat C = oracle::Mat::Zero(M, M);
    for (std::size_t i = 0; i < p.total_symbols; ++i) {
        const std::span<const cplx> n = sc.noise(i);
        oracle::Vec v(M);
        for (std::size_t m = 0; m < M; ++m)
            v(m) = n[m];
        C += v * v.adjoint() / static_cast<double>(p.total_symbols);
    }
    const oracle::Mat ref = sc.noise_variance() * oracle::Mat::Identity(M, M);
    CHECK((C - ref).norm() <= 0.03 * ref.norm());
    CHECK(sc.noise_variance() == doctest::Approx(std::pow(sc.amplitudes()[0], 2) / std::pow(10.0, 0.3)));
}

TEST_CASE("observation length")
{
    ScenarioParams p;
    CHECK(p.observation_length() == 48);
    const TrialScenario sc(p, 1);
    CHECK(received_vector(sc, 0).r.size() == 48);
    for (std::size_t J : {1u, 3u})
        for (std::size_t Lp : {1u, 4u}) {
            ScenarioParams q;
            q.J = J;
            q.Lp = Lp;
            q.total_symbols = 5;
            const TrialScenario s(q, 2);
            CHECK(received_vector(s, 4).r.size() == J * (16 + Lp - 1));
        }
}

TEST_CASE("clean single user snapshot is the phased signature")
{
    const ScenarioParams p = clean_single_user();
    const TrialScenario sc(p, 11);
    const ChannelModel& ch = sc.channels()[0];
    for (std::size_t i = 0; i < 5; ++i) {
        const Snapshot s = received_vector(sc, i);
        CHECK(s.d == sc.symbol(0, static_cast<long>(i)));
        for (std::size_t j = 0; j < p.J; ++j)
            for (std::size_t n = 0; n < p.N; ++n) {
                const cplx expect = sc.amplitudes()[0] * s.d * sc.signatures()[0].chips[n] * ch.array_phase(0, j);
                CHECK(std::abs(s.r[j * p.N + n] - expect) < 1e-14);
            }
    }
}

TEST_CASE("energy accounting on static unit-power channels")
{
    ScenarioParams p;
    p.snr_db = std::numeric_limits<double>::infinity();
    p.doppler = 0.0;
    p.rayleigh = false;
    p.total_symbols = 10000;
    const TrialScenario sc(p, 12);
    double expected = 0.0;
    for (const SignalTerm& t : sc.signal_terms(0))
        expected += std::pow(norm2(t.vec), 2);
    double measured = 0.0;
    for (std::size_t i = 0; i < p.total_symbols; ++i)
        measured += std::pow(norm2(received_vector(sc, i).r), 2) / static_cast<double>(p.total_symbols);
    CHECK(std::abs(measured - expected) <= 0.03 * expected);

    // each user contributes A_k^2 times its composite energy
    double by_user = 0.0;
    for (std::size_t k = 0; k < p.K; ++k) {
        double composite = 0.0;
        for (SymbolOffset o : {SymbolOffset::previous, SymbolOffset::current, SymbolOffset::next})
            composite += std::pow(norm2(sc.spatial_signature(k, o, 0)) / sc.amplitudes()[k], 2);
        by_user += std::pow(sc.amplitudes()[k], 2) * composite;
    }
    CHECK(by_user == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("same seed, same scenario")
{
    ScenarioParams p;
    p.total_symbols = 50;
    const TrialScenario a(p, 77), b(p, 77), c(p, 78);
    bool differs = false;
    for (std::size_t i = 0; i < 50; ++i) {
        CHECK(received_vector(a, i).r == received_vector(b, i).r);
        differs = differs || received_vector(a, i).r != received_vector(c, i).r;
    }
    CHECK(differs);
}

TEST_CASE("noiseless single user is recovered exactly")
{
    ScenarioParams p = clean_single_user(9);
    p.paths = 3;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const TrialScenario sc(p, seed);
        FullRankReceiver full(p.observation_length(), 0.998, 0.01);
        CHECK(run_ber_trial(sc, full, 200, 400).post_training_errors() == 0);
        JioParams jp;
        jp.M = p.observation_length();
        jp.D = 4;
        JioReceiver jio(jp);
        CHECK(run_ber_trial(sc, jio, 200, 400).post_training_errors() == 0);
    }
}

TEST_CASE("a receiver that always outputs zero decides +1")
{
    ScenarioParams p;
    p.total_symbols = 4000;
    const TrialScenario sc(p, 13);
    ZeroReceiver rx{p.observation_length()};
    const TrialResult res = run_ber_trial(sc, rx, 200, 4000);
    std::size_t minus = 0;
    for (std::size_t i = 200; i < 4000; ++i)
        minus += sc.symbol(0, static_cast<long>(i)) < 0.0;
    CHECK(res.post_training_errors() == minus);
    CHECK(std::abs(res.ber() - 0.5) < 0.05);
    CHECK(res.sinr[300] == 0.0);
}

TEST_CASE("output SINR of the matched filter in a clean single-user link")
{
    ScenarioParams p = clean_single_user();
    p.snr_db = 10.0;
    const TrialScenario sc(p, 14);
    const std::vector<SignalTerm> terms = sc.signal_terms(3);
    const CVector w = sc.spatial_signature(0, SymbolOffset::current, 3);
    // |w^H w|^2 / (sigma^2 |w|^2) = |w|^2 / sigma^2 = J * A^2 / sigma^2
    CHECK(output_sinr(w, terms, sc.noise_variance()) == doctest::Approx(p.J * std::pow(10.0, 1.0)).epsilon(1e-12));
}

TEST_CASE("trial argument checks")
{
    ScenarioParams p;
    p.total_symbols = 100;
    const TrialScenario sc(p, 1);
    FullRankReceiver rx(p.observation_length(), 0.998, 0.01);
    CHECK_THROWS_AS(run_ber_trial(sc, rx, 100, 100), InputError);
    CHECK_THROWS_AS(run_ber_trial(sc, rx, 10, 200), InputError);
    ScenarioParams bad;
    bad.doppler = 0.7;
    CHECK_THROWS_AS(TrialScenario(bad, 1), InputError);
}
