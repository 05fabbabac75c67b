// SPDX-License-Identifier: Apache-2.0
#include "rankreduce/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace rankreduce::experiment {

std::string_view receiver_name(ReceiverKind kind)
{
    return kind == ReceiverKind::jio ? "jio" : "full_rank";
}

void SimConfig::validate() const
{
    auto fail = [](const std::string& msg) { throw ConfigError(msg); };
    if (N == 0 || K == 0 || J == 0 || Lp == 0)
        fail("N, K, J and Lp must be positive");
    if (runs == 0 || train_symbols == 0 || total_symbols == 0)
        fail("runs, train_symbols and total_symbols must be positive");
    if (train_symbols >= total_symbols)
        fail("train_symbols must be smaller than total_symbols");
    if (!(lambda > 0.0 && lambda <= 1.0))
        fail("lambda must lie in (0, 1]");
    if (!(delta > 0.0 && delta_bar > 0.0 && delta_w > 0.0))
        fail("delta, delta_bar and delta_w must be positive");
    if (!(doppler >= 0.0 && doppler < 0.5))
        fail("doppler must lie in [0, 0.5)");
    if (std::isnan(snr_db) || snr_db == -INFINITY)
        fail("snr_db must be a number or inf");
    if (ranks.empty())
        fail("D needs at least one rank");
    for (std::size_t d : ranks)
        if (d == 0 || d > observation_length())
            fail("D=" + std::to_string(d) + " outside [1, J*(N+Lp-1)=" + std::to_string(observation_length()) + "]");
    if (receivers.empty())
        fail("receivers must name at least one of jio, full_rank");
}

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return parts;
}

template <class T>
bool parse_number(std::string_view text, T& out)
{
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, out);
    return ec == std::errc() && ptr == end;
}

std::vector<std::size_t> parse_ranks(std::string_view text)
{
    std::vector<std::size_t> out;
    for (std::string_view item : split(text, ',')) {
        std::size_t lo = 0, hi = 0;
        if (const auto dots = item.find(".."); dots != std::string_view::npos) {
            if (!parse_number(trim(item.substr(0, dots)), lo) || !parse_number(trim(item.substr(dots + 2)), hi) ||
                lo > hi)
                throw ConfigError("bad rank range '" + std::string(item) + "'");
        } else if (parse_number(item, lo)) {
            hi = lo;
        } else {
            throw ConfigError("bad rank '" + std::string(item) + "'");
        }
        for (std::size_t d = lo; d <= hi; ++d)
            out.push_back(d);
    }
    return out;
}

std::vector<ReceiverKind> parse_receivers(std::string_view text)
{
    std::vector<ReceiverKind> out;
    for (std::string_view item : split(text, ',')) {
        ReceiverKind kind;
        if (item == "jio")
            kind = ReceiverKind::jio;
        else if (item == "full_rank")
            kind = ReceiverKind::full_rank;
        else
            throw ConfigError("unknown receiver '" + std::string(item) + "'");
        if (std::find(out.begin(), out.end(), kind) != out.end())
            throw ConfigError("receiver '" + std::string(item) + "' listed twice");
        out.push_back(kind);
    }
    return out;
}

void apply(SimConfig& cfg, std::string_view key, std::string_view value)
{
    auto count = [&](std::size_t& field) {
        if (!parse_number(value, field))
            throw ConfigError("expected a non-negative integer for " + std::string(key));
    };
    auto real = [&](double& field) {
        if (!parse_number(value, field))
            throw ConfigError("expected a number for " + std::string(key));
    };

    if (key == "N") count(cfg.N);
    else if (key == "K") count(cfg.K);
    else if (key == "J") count(cfg.J);
    else if (key == "Lp") count(cfg.Lp);
    else if (key == "snr_db") real(cfg.snr_db);
    else if (key == "lambda") real(cfg.lambda);
    else if (key == "D") cfg.ranks = parse_ranks(value);
    else if (key == "train_symbols") count(cfg.train_symbols);
    else if (key == "total_symbols") count(cfg.total_symbols);
    else if (key == "runs") count(cfg.runs);
    else if (key == "doppler") real(cfg.doppler);
    else if (key == "delta") real(cfg.delta);
    else if (key == "delta_bar") real(cfg.delta_bar);
    else if (key == "delta_w") real(cfg.delta_w);
    else if (key == "seed") {
        if (!parse_number(value, cfg.seed))
            throw ConfigError("expected an unsigned 64-bit integer for seed");
    } else if (key == "receivers") cfg.receivers = parse_receivers(value);
    else throw ConfigError("unknown key '" + std::string(key) + "'");
}

// Range checks that can be pinned to the offending key.
void check_key(const SimConfig& cfg, std::string_view key)
{
    if (key == "lambda" && !(cfg.lambda > 0.0 && cfg.lambda <= 1.0))
        throw ConfigError("lambda must lie in (0, 1]");
    if ((key == "delta" && !(cfg.delta > 0.0)) || (key == "delta_bar" && !(cfg.delta_bar > 0.0)) ||
        (key == "delta_w" && !(cfg.delta_w > 0.0)))
        throw ConfigError(std::string(key) + " must be positive");
    if (key == "doppler" && !(cfg.doppler >= 0.0 && cfg.doppler < 0.5))
        throw ConfigError("doppler must lie in [0, 0.5)");
    if ((key == "N" && cfg.N == 0) || (key == "K" && cfg.K == 0) || (key == "J" && cfg.J == 0) ||
        (key == "Lp" && cfg.Lp == 0) || (key == "runs" && cfg.runs == 0) ||
        (key == "train_symbols" && cfg.train_symbols == 0) || (key == "total_symbols" && cfg.total_symbols == 0))
        throw ConfigError(std::string(key) + " must be positive");
    if (key == "D" && std::find(cfg.ranks.begin(), cfg.ranks.end(), std::size_t{0}) != cfg.ranks.end())
        throw ConfigError("D must be at least 1");
}

} // namespace

SimConfig parse_config(std::string_view text)
{
    SimConfig cfg;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto nl = text.find('\n', start);
        std::string_view line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
        start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
        try {
            apply(cfg, key, value);
            check_key(cfg, key);
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(line_no) + ": " + std::string(key) + ": " + e.what());
        }
    }
    cfg.validate();
    return cfg;
}

std::string format_number(double v)
{
    if (v == 0.0)
        return "0";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

std::vector<std::string> config_lines(const SimConfig& cfg)
{
    auto join = [](const auto& items, auto to_text) {
        std::string out;
        for (const auto& item : items) {
            if (!out.empty())
                out += ',';
            out += to_text(item);
        }
        return out;
    };
    return {
        "N=" + std::to_string(cfg.N),
        "K=" + std::to_string(cfg.K),
        "J=" + std::to_string(cfg.J),
        "Lp=" + std::to_string(cfg.Lp),
        "snr_db=" + format_number(cfg.snr_db),
        "lambda=" + format_number(cfg.lambda),
        "D=" + join(cfg.ranks, [](std::size_t d) { return std::to_string(d); }),
        "train_symbols=" + std::to_string(cfg.train_symbols),
        "total_symbols=" + std::to_string(cfg.total_symbols),
        "runs=" + std::to_string(cfg.runs),
        "doppler=" + format_number(cfg.doppler),
        "delta=" + format_number(cfg.delta),
        "delta_bar=" + format_number(cfg.delta_bar),
        "delta_w=" + format_number(cfg.delta_w),
        "seed=" + std::to_string(cfg.seed),
        "receivers=" + join(cfg.receivers, [](ReceiverKind k) { return std::string(receiver_name(k)); }),
    };
}

cdma::ScenarioParams scenario_params(const SimConfig& cfg)
{
    cdma::ScenarioParams p;
    p.N = cfg.N;
    p.K = cfg.K;
    p.J = cfg.J;
    p.Lp = cfg.Lp;
    p.snr_db = cfg.snr_db;
    p.doppler = cfg.doppler;
    p.total_symbols = cfg.total_symbols;
    return p;
}

cdma::TrialResult run_receiver_trial(const SimConfig& cfg, const cdma::TrialScenario& scenario,
                                     ReceiverKind kind, std::size_t D)
{
    const std::size_t M = cfg.observation_length();
    if (kind == ReceiverKind::jio) {
        JioParams params{M, D, cfg.lambda, cfg.delta, cfg.delta_bar, cfg.delta_w, true};
        JioReceiver rx(params);
        return cdma::run_ber_trial(scenario, rx, cfg.train_symbols, cfg.total_symbols);
    }
    FullRankReceiver rx(M, cfg.lambda, cfg.delta);
    return cdma::run_ber_trial(scenario, rx, cfg.train_symbols, cfg.total_symbols);
}

void for_each_run(const SimConfig& cfg, unsigned threads, const std::function<void(std::size_t)>& body)
{
    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, cfg.runs));

    std::atomic<std::size_t> next{0};
    std::mutex failure_mutex;
    std::exception_ptr failure;
    std::size_t failed_run = 0;

    auto worker = [&] {
        for (std::size_t run = next++; run < cfg.runs; run = next++) {
            try {
                body(run);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure || run < failed_run) {
                    failure = std::current_exception();
                    failed_run = run;
                }
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back(worker);
    }
    if (failure) {
        try {
            std::rethrow_exception(failure);
        } catch (const std::exception& e) {
            throw std::runtime_error("run " + std::to_string(failed_run) + " (seed " +
                                     std::to_string(cfg.seed + failed_run) + "): " + e.what());
        }
    }
}

namespace {

double mean_post_training_sinr(const cdma::TrialResult& t)
{
    double s = 0.0;
    for (std::size_t i = t.train_len; i < t.sinr.size(); ++i)
        s += t.sinr[i];
    return s / static_cast<double>(t.sinr.size() - t.train_len);
}

double to_db(double linear) { return 10.0 * std::log10(linear); }

} // namespace

std::vector<ResultRow> run_rank_sweep(const SimConfig& cfg, unsigned threads)
{
    cfg.validate();
    const cdma::ScenarioParams params = scenario_params(cfg);
    const bool with_jio = std::find(cfg.receivers.begin(), cfg.receivers.end(), ReceiverKind::jio) != cfg.receivers.end();
    const bool with_full = std::find(cfg.receivers.begin(), cfg.receivers.end(), ReceiverKind::full_rank) !=
                           cfg.receivers.end();

    struct Point {
        ReceiverKind kind;
        std::size_t D;
    };
    std::vector<Point> points;
    if (with_jio)
        for (std::size_t d : cfg.ranks)
            points.push_back({ReceiverKind::jio, d});
    if (with_full)
        points.push_back({ReceiverKind::full_rank, cfg.observation_length()});

    // [run][point] -> (ber, mean sinr)
    std::vector<std::vector<std::pair<double, double>>> per_run(cfg.runs);
    for_each_run(cfg, threads, [&](std::size_t run) {
        const cdma::TrialScenario scenario(params, cfg.seed + run);
        auto& out = per_run[run];
        for (const Point& pt : points) {
            const cdma::TrialResult t = run_receiver_trial(cfg, scenario, pt.kind, pt.D);
            out.emplace_back(t.ber(), mean_post_training_sinr(t));
        }
    });

    std::vector<ResultRow> rows;
    for (std::size_t p = 0; p < points.size(); ++p) {
        double ber = 0.0, sinr = 0.0;
        for (std::size_t run = 0; run < cfg.runs; ++run) {
            ber += per_run[run][p].first;
            sinr += per_run[run][p].second;
        }
        const double n = static_cast<double>(cfg.runs);
        rows.push_back({"rank-sweep", std::string(receiver_name(points[p].kind)), points[p].D, points[p].D, ber / n,
                        to_db(sinr / n), cfg.runs, cfg.seed});
    }
    std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
        return a.receiver != b.receiver ? a.receiver == "jio" : a.D < b.D;
    });
    return rows;
}

std::vector<ResultRow> run_convergence(const SimConfig& cfg, unsigned threads)
{
    cfg.validate();
    if (cfg.ranks.size() != 1)
        throw ConfigError("convergence mode takes a single rank D");
    const cdma::ScenarioParams params = scenario_params(cfg);
    const std::size_t D = cfg.ranks.front();
    const std::size_t T = cfg.total_symbols;

    // [run][receiver] -> trial
    std::vector<std::vector<cdma::TrialResult>> per_run(cfg.runs);
    for_each_run(cfg, threads, [&](std::size_t run) {
        const cdma::TrialScenario scenario(params, cfg.seed + run);
        for (ReceiverKind kind : cfg.receivers)
            per_run[run].push_back(run_receiver_trial(cfg, scenario, kind, D));
    });

    std::vector<ResultRow> rows;
    rows.reserve(cfg.receivers.size() * T);
    const double n = static_cast<double>(cfg.runs);
    for (std::size_t r = 0; r < cfg.receivers.size(); ++r) {
        const ReceiverKind kind = cfg.receivers[r];
        const std::size_t reported_d = kind == ReceiverKind::jio ? D : cfg.observation_length();
        for (std::size_t i = 0; i < T; ++i) {
            double errors = 0.0, sinr = 0.0;
            for (std::size_t run = 0; run < cfg.runs; ++run) {
                errors += per_run[run][r].errors[i];
                sinr += per_run[run][r].sinr[i];
            }
            rows.push_back({"convergence", std::string(receiver_name(kind)), reported_d, i, errors / n, to_db(sinr / n),
                            cfg.runs, cfg.seed});
        }
    }
    return rows;
}

void write_csv(const std::vector<ResultRow>& rows, const std::vector<std::string>& echo, std::ostream& out)
{
    if (rows.empty())
        throw InputError("write_csv: no rows to write");
    for (const std::string& line : echo)
        out << "# " << line << '\n';
    out << kCsvHeader << '\n';
    for (const ResultRow& r : rows)
        out << r.experiment << ',' << r.receiver << ',' << std::to_string(r.D) << ',' << std::to_string(r.index) << ','
            << format_number(r.ber) << ',' << format_number(r.sinr_db) << ',' << std::to_string(r.runs) << ','
            << std::to_string(r.seed) << '\n';
}

void write_csv(const std::vector<ResultRow>& rows, const std::vector<std::string>& echo, const std::string& path)
{
    std::ostringstream buffer;
    write_csv(rows, echo, buffer);
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    file << buffer.str();
    file.flush();
    if (!file)
        throw std::runtime_error("failed writing '" + path + "'");
}

SimConfig parse_echo(std::string_view csv_text)
{
    std::string config;
    while (!csv_text.empty() && csv_text.front() == '#') {
        const std::size_t eol = csv_text.find('\n');
        std::string_view line = csv_text.substr(1, eol == std::string_view::npos ? std::string_view::npos : eol - 1);
        if (!line.empty() && line.front() == ' ')
            line.remove_prefix(1);
        config.append(line);
        config += '\n';
        csv_text.remove_prefix(eol == std::string_view::npos ? csv_text.size() : eol + 1);
    }
    return parse_config(config);
}

} // namespace rankreduce::experiment
