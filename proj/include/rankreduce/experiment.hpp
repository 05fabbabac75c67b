// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "rankreduce/cdma.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace rankreduce::experiment {

enum class ReceiverKind { jio, full_rank };

std::string_view receiver_name(ReceiverKind kind);

// Every experiment parameter. Defaults are a desk-scale operating point.
struct SimConfig {
    std::size_t N = 16;
    std::size_t K = 6;
    std::size_t J = 2;
    std::size_t Lp = 9;
    double snr_db = 12.0;
    double lambda = 0.998;
    std::vector<std::size_t> ranks{4}; // key "D"; a list for rank sweeps
    std::size_t train_symbols = 200;
    std::size_t total_symbols = 1500;
    std::size_t runs = 100;
    double doppler = 0.001;
    double delta = 0.01;
    double delta_bar = 0.01;
    double delta_w = 0.01;
    std::uint64_t seed = 1;
    std::vector<ReceiverKind> receivers{ReceiverKind::jio, ReceiverKind::full_rank};

    std::size_t observation_length() const noexcept { return J * (N + Lp - 1); }
    // Throws ConfigError describing the first violated constraint.
    void validate() const;
    bool operator==(const SimConfig&) const = default;
};

class ConfigError : public InputError {
public:
    using InputError::InputError;
};

// key=value per line, '#' starts a comment. Unknown keys, malformed lines and
// out-of-range values raise ConfigError naming the line.
SimConfig parse_config(std::string_view text);
// Canonical key=value lines; parse_config of their concatenation reproduces cfg.
std::vector<std::string> config_lines(const SimConfig& cfg);

cdma::ScenarioParams scenario_params(const SimConfig& cfg);

// One receiver over one scenario, training then decision-directed.
cdma::TrialResult run_receiver_trial(const SimConfig& cfg, const cdma::TrialScenario& scenario,
                                     ReceiverKind kind, std::size_t D);

// Calls body(run) for run in [0, runs) on a pool of threads (0 = hardware
// concurrency). The first exception is rethrown, tagged with run and seed.
void for_each_run(const SimConfig& cfg, unsigned threads, const std::function<void(std::size_t)>& body);

struct ResultRow {
    std::string experiment;
    std::string receiver;
    std::size_t D = 0;
    std::size_t index = 0;
    double ber = 0.0;
    double sinr_db = 0.0;
    std::size_t runs = 0;
    std::uint64_t seed = 0;
};

// Mean post-training BER and SINR per rank. Full-rank, when requested, is
// reported once with D equal to the observation length.
std::vector<ResultRow> run_rank_sweep(const SimConfig& cfg, unsigned threads = 0);

// Per-symbol BER and SINR averaged over runs, for each configured receiver.
std::vector<ResultRow> run_convergence(const SimConfig& cfg, unsigned threads = 0);

// Shortest round-trip decimal form; 0 prints as "0".
std::string format_number(double v);

// '#'-prefixed echo lines, then the header, then one line per row.
void write_csv(const std::vector<ResultRow>& rows, const std::vector<std::string>& echo, std::ostream& out);
void write_csv(const std::vector<ResultRow>& rows, const std::vector<std::string>& echo,
               const std::string& path);

// Parses the '#' echo lines at the top of a CSV written by write_csv.
SimConfig parse_echo(std::string_view csv_text);

inline constexpr std::string_view kCsvHeader = "experiment,receiver,D,index,ber,sinr_db,runs,seed";

} // namespace rankreduce::experiment
