// SPDX-License-Identifier: Apache-2.0
//
// radcom: secrecy-constrained waveform design for joint passive radar and
// communications.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef RADCOM_EXPERIMENTS_HPP
#define RADCOM_EXPERIMENTS_HPP

// Monte Carlo sweeps over secrecy thresholds and channel draws, CSV output
// and the JSON views used by the command line tool.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "radcom/nonoverlap_solver.hpp"
#include "radcom/overlap_solver.hpp"

namespace radcom {

// ---------------------------------------------------------------------------
// Logging

enum class LogLevel { error = 0, info = 1, debug = 2 };

inline LogLevel log_level_from_env()
{
    const char* v = std::getenv("RADCOM_LOG_LEVEL");
    if (!v)
        return LogLevel::error;
    const std::string s(v);
    if (s == "debug")
        return LogLevel::debug;
    if (s == "info")
        return LogLevel::info;
    return LogLevel::error;
}

inline void log_message(LogLevel level, const std::string& msg)
{
    static const LogLevel threshold = log_level_from_env();
    static std::mutex mu;
    if (static_cast<int>(level) > static_cast<int>(threshold))
        return;
    static const char* names[] = {"error", "info", "debug"};
    std::lock_guard<std::mutex> lock(mu);
    std::cerr << "[radcom " << names[static_cast<int>(level)] << "] " << msg << '\n';
}

// ---------------------------------------------------------------------------
// Sweep description

enum class SolverKind { alg1, alg2, overlap };

inline const char* to_string(SolverKind k)
{
    switch (k) {
    case SolverKind::alg1: return "alg1";
    case SolverKind::alg2: return "alg2";
    case SolverKind::overlap: return "overlap";
    }
    return "unknown";
}

inline SolverKind solver_from_string(const std::string& s)
{
    if (s == "alg1")
        return SolverKind::alg1;
    if (s == "alg2")
        return SolverKind::alg2;
    if (s == "overlap")
        return SolverKind::overlap;
    throw Error(ErrorCode::invalid_argument, "solvers: unknown solver '" + s + "' (expected alg1, alg2, overlap)");
}

// Overlap rows are repeated under this label with r_m and secrecy divided by L.
inline constexpr const char* kOverlapPerUseLabel = "overlap_per_use";

struct RunRecord {
    std::string solver;
    double r_m = 0.0;
    std::uint64_t seed = 0;
    double sinr = 0.0; // linear
    double secrecy_bits = 0.0;
    bool feasible = false;
    int outer_iters = 0;
    double runtime_ms = 0.0;
    // diagnostics, not written to CSV
    SolveStatus status = SolveStatus::ok;
    double trace_q = 0.0;
    std::vector<double> history; // tr(Q) per round (non-overlap) or relaxed objective (overlap)
    double tightness_gap = 0.0;
    double eig_ratio = 0.0;
    std::string error;
};

struct SweepSpec {
    ScenarioConfig config;
    std::vector<double> thresholds;
    int n_runs = 100;
    std::uint64_t base_seed = 0;
    std::vector<SolverKind> solvers{SolverKind::alg2};
    SolverOptions options;
    int jobs = 1;
    bool record_runtime = false; // off: runtime_ms is written as 0 so CSVs are reproducible
    // Replaces run_single when set; used to exercise per-run failure handling.
    std::function<RunRecord(const ScenarioConfig&, const RadarOperators&, SolverKind, double, std::uint64_t,
                            const SolverOptions&, bool)>
        runner;
};

inline void validate(const SweepSpec& spec)
{
    validate(spec.config);
    if (spec.thresholds.empty())
        throw Error(ErrorCode::invalid_argument, "thresholds: must be non-empty");
    for (double r : spec.thresholds)
        if (!(r >= 0.0) || !std::isfinite(r))
            throw Error(ErrorCode::invalid_argument, "thresholds: values must be finite and >= 0");
    if (spec.n_runs < 1)
        throw Error(ErrorCode::invalid_argument, "runs: must be >= 1");
    if (spec.solvers.empty())
        throw Error(ErrorCode::invalid_argument, "solvers: must be non-empty");
    if (spec.jobs < 1)
        throw Error(ErrorCode::invalid_argument, "jobs: must be >= 1");
}


struct TradeoffPoint {
    std::string solver;
    double r_m = 0.0;
    double mean_sinr_db = 0.0;
    double mean_secrecy_bits = 0.0;
    double feasible_fraction = 0.0;
    int runs = 0;
    double mean_runtime_ms = 0.0; // not part of the summary CSV
};

struct SweepResult {
    std::vector<TradeoffPoint> points;
    std::vector<RunRecord> records;
};

inline std::string format_number(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v == 0.0 ? 0.0 : v); // no "-0"
    return buf;
}

// Floor for zero SINR in dB columns.
inline constexpr double kSinrDbFloor = -300.0;

inline double sinr_db_value(double sinr) { return sinr > 0.0 ? std::max(kSinrDbFloor, db_from_linear(sinr)) : kSinrDbFloor; }

// ---------------------------------------------------------------------------
// One solve

inline RunRecord run_single(const ScenarioConfig& cfg, const RadarOperators& ops, SolverKind kind, double r_m,
                            std::uint64_t seed, const SolverOptions& opts, bool record_runtime)
{
    RunRecord rec;
    rec.solver = to_string(kind);
    rec.r_m = r_m;
    rec.seed = seed;
    const auto t0 = std::chrono::steady_clock::now();
    const ChannelRealization chan = sample_channel(cfg, seed);
    if (kind == SolverKind::overlap) {
        OverlapOptions oo;
        oo.rng_seed = seed;
        const auto res = ao_overlap(chan, ops, cfg, r_m, opts, oo);
        rec.sinr = res.sinr;
        rec.secrecy_bits = res.achieved_secrecy;
        rec.feasible = res.feasible;
        rec.outer_iters = res.outer_iters;
        rec.status = res.status;
        rec.trace_q = res.raw_trace_q;
        rec.history = res.objective_history;
        rec.tightness_gap = res.max_tightness_gap;
        rec.eig_ratio = res.eig_ratio;
    } else {
        const auto params = make_secrecy_params(r_m, cfg.sigma2_r, cfg.sigma2_c, cfg.n_rr, cfg.n_cr);
        std::vector<double> hist;
        const OuterSink sink = [&hist](const OuterRecord& r) { hist.push_back(r.trace_q); };
        const auto res = kind == SolverKind::alg1 ? algorithm1(chan, ops, cfg, params, opts, sink)
                                                  : algorithm2(chan, ops, cfg, params, opts, sink);
        rec.sinr = res.sinr;
        rec.secrecy_bits = res.achieved_secrecy;
        rec.feasible = res.feasible;
        rec.outer_iters = res.outer_iters;
        rec.status = res.status;
        rec.trace_q = res.raw_trace_q;
        rec.history = std::move(hist);
    }
    if (record_runtime)
        rec.runtime_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

// ---------------------------------------------------------------------------
// Sweep

namespace detail {

inline std::vector<TradeoffPoint> aggregate(const std::vector<RunRecord>& records)
{
    std::vector<TradeoffPoint> points;
    auto find = [&](const std::string& solver, double r_m) -> TradeoffPoint& {
        for (auto& p : points)
            if (p.solver == solver && p.r_m == r_m)
                return p;
        points.push_back({solver, r_m, 0.0, 0.0, 0.0, 0, 0.0});
        return points.back();
    };
    for (const auto& r : records) {
        auto& p = find(r.solver, r.r_m);
        p.mean_sinr_db += sinr_db_value(r.sinr);
        p.mean_secrecy_bits += r.secrecy_bits;
        p.feasible_fraction += r.feasible ? 1.0 : 0.0;
        p.mean_runtime_ms += r.runtime_ms;
        ++p.runs;
    }
    for (auto& p : points) {
        p.mean_sinr_db /= p.runs;
        p.mean_secrecy_bits /= p.runs;
        p.feasible_fraction /= p.runs;
        p.mean_runtime_ms /= p.runs;
    }
    return points;
}

inline RunRecord per_use_view(const RunRecord& r, int block_len)
{
    RunRecord out = r;
    out.solver = kOverlapPerUseLabel;
    out.r_m = r.r_m / block_len;
    out.secrecy_bits = r.secrecy_bits / block_len;
    return out;
}

} // namespace detail

// Runs every (solver, threshold, seed) triple. Run i uses seed base_seed + i
// for every solver and threshold. Records are ordered by (solver, r_m, seed)
// before aggregation, so the output depends neither on `jobs` nor on the order
// solvers and thresholds were listed in.
inline SweepResult run_sweep(const SweepSpec& spec)
{
    validate(spec);
    const RadarOperators ops = build_operators(spec.config);
    const std::size_t n_thr = spec.thresholds.size();
    const std::size_t n_runs = static_cast<std::size_t>(spec.n_runs);
    const std::size_t total = spec.solvers.size() * n_thr * n_runs;

    std::vector<RunRecord> slots(total);
    std::atomic<std::size_t> next{0};

    auto worker = [&]() {
        for (;;) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= total)
                return;
            const std::size_t s = idx / (n_thr * n_runs);
            const std::size_t t = (idx / n_runs) % n_thr;
            const std::size_t i = idx % n_runs;
            const std::uint64_t seed = spec.base_seed + i;
            RunRecord& rec = slots[idx];
            try {
                rec = spec.runner ? spec.runner(spec.config, ops, spec.solvers[s], spec.thresholds[t], seed,
                                                spec.options, spec.record_runtime)
                                  : run_single(spec.config, ops, spec.solvers[s], spec.thresholds[t], seed,
                                               spec.options, spec.record_runtime);
            } catch (const std::exception& e) {
                // kept as an infeasible run with zero SINR
                rec = RunRecord{};
                rec.solver = to_string(spec.solvers[s]);
                rec.r_m = spec.thresholds[t];
                rec.seed = seed;
                rec.status = SolveStatus::inner_not_converged;
                rec.error = e.what();
                log_message(LogLevel::error, rec.solver + " seed=" + std::to_string(seed) + ": " + rec.error);
            }
            log_message(LogLevel::debug, rec.solver + " r_m=" + format_number(rec.r_m) + " seed=" +
                                             std::to_string(seed) + " status=" + to_string(rec.status));
        }
    };

    const int jobs = std::max(1, std::min<int>(spec.jobs, static_cast<int>(total)));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(jobs));
        for (int j = 0; j < jobs; ++j)
            pool.emplace_back(worker);
        for (auto& th : pool)
            th.join();
    }

    SweepResult out;
    out.records = std::move(slots);
    const bool has_overlap =
        std::find(spec.solvers.begin(), spec.solvers.end(), SolverKind::overlap) != spec.solvers.end();
    if (has_overlap) {
        std::vector<RunRecord> per_use;
        for (const auto& r : out.records)
            if (r.solver == to_string(SolverKind::overlap))
                per_use.push_back(detail::per_use_view(r, spec.config.block_len));
        out.records.insert(out.records.end(), per_use.begin(), per_use.end());
    }
    std::stable_sort(out.records.begin(), out.records.end(), [](const RunRecord& a, const RunRecord& b) {
        if (a.solver != b.solver)
            return a.solver < b.solver;
        if (a.r_m != b.r_m)
            return a.r_m < b.r_m;
        return a.seed < b.seed;
    });
    out.points = detail::aggregate(out.records);
    for (const auto& p : out.points)
        log_message(LogLevel::info, p.solver + " r_m=" + std::to_string(p.r_m) + " feasible=" +
                                        std::to_string(p.feasible_fraction) + " mean_sinr_db=" +
                                        std::to_string(p.mean_sinr_db));
    return out;
}

// ---------------------------------------------------------------------------
// CSV

inline constexpr const char* kSummaryHeader = "solver,r_m,mean_sinr_db,mean_secrecy_bits,feasible_fraction,runs";
inline constexpr const char* kRunsHeader = "solver,r_m,seed,sinr_db,secrecy_bits,feasible,outer_iters,runtime_ms";

inline std::string summary_csv(const std::vector<TradeoffPoint>& points)
{
    std::string out = std::string(kSummaryHeader) + "\n";
    for (const auto& p : points)
        out += p.solver + "," + format_number(p.r_m) + "," + format_number(p.mean_sinr_db) + "," +
               format_number(p.mean_secrecy_bits) + "," + format_number(p.feasible_fraction) + "," +
               std::to_string(p.runs) + "\n";
    return out;
}

inline std::string runs_csv(const std::vector<RunRecord>& records)
{
    std::string out = std::string(kRunsHeader) + "\n";
    for (const auto& r : records)
        out += r.solver + "," + format_number(r.r_m) + "," + std::to_string(r.seed) + "," +
               format_number(sinr_db_value(r.sinr)) + "," + format_number(r.secrecy_bits) + "," +
               (r.feasible ? "1" : "0") + "," + std::to_string(r.outer_iters) + "," + format_number(r.runtime_ms) +
               "\n";
    return out;
}

struct CsvPaths {
    std::filesystem::path summary;
    std::filesystem::path runs;
};

inline void write_text_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw Error(ErrorCode::io, "cannot open " + path.string() + " for writing");
    f << text;
    if (!f)
        throw Error(ErrorCode::io, "write failed: " + path.string());
}

// Writes summary.csv and runs.csv into `dir` (created if missing).
inline CsvPaths emit_csv(const std::vector<TradeoffPoint>& points, const std::vector<RunRecord>& records,
                         const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw Error(ErrorCode::io, "cannot create " + dir.string() + ": " + ec.message());
    CsvPaths paths{dir / "summary.csv", dir / "runs.csv"};
    write_text_file(paths.summary, summary_csv(points));
    write_text_file(paths.runs, runs_csv(records));
    return paths;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const
    {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name)
                return i;
        throw Error(ErrorCode::invalid_argument, "csv: missing column " + name);
    }
};

inline std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ','))
        out.push_back(cell);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

inline CsvTable read_csv(const std::filesystem::path& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw Error(ErrorCode::io, "cannot open " + path.string());
    CsvTable t;
    std::string line;
    if (!std::getline(f, line))
        throw Error(ErrorCode::invalid_argument, "csv: empty file " + path.string());
    t.header = split_csv_line(line);
    while (std::getline(f, line)) {
        if (line.empty())
            continue;
        auto row = split_csv_line(line);
        if (row.size() != t.header.size())
            throw Error(ErrorCode::invalid_argument, "csv: ragged row in " + path.string());
        t.rows.push_back(std::move(row));
    }
    return t;
}

// ---------------------------------------------------------------------------
// JSON views

inline nlohmann::json to_json_value(const SolverOptions& o)
{
    return {{"max_outer_iters", o.max_outer_iters}, {"tol", o.tol},           {"barrier_mu", o.barrier_mu},
            {"newton_tol", o.newton_tol},           {"max_newton", o.max_newton}, {"gap_tol", o.gap_tol},
            {"feasibility_cap", o.feasibility_cap}};
}

inline SolverOptions solver_options_from_json(const nlohmann::json& doc)
{
    SolverOptions o;
    if (!doc.is_object())
        throw Error(ErrorCode::invalid_argument, "solver_options: expected a JSON object");
    auto field = [&](const char* name, auto& target) {
        if (!doc.contains(name))
            return;
        try {
            doc.at(name).get_to(target);
        } catch (const nlohmann::json::exception&) {
            throw Error(ErrorCode::invalid_argument, std::string("solver_options.") + name + ": wrong type");
        }
    };
    field("max_outer_iters", o.max_outer_iters);
    field("tol", o.tol);
    field("barrier_mu", o.barrier_mu);
    field("newton_tol", o.newton_tol);
    field("max_newton", o.max_newton);
    field("gap_tol", o.gap_tol);
    field("feasibility_cap", o.feasibility_cap);
    if (o.max_outer_iters < 1)
        throw Error(ErrorCode::invalid_argument, "solver_options.max_outer_iters: must be >= 1");
    if (o.max_newton < 1)
        throw Error(ErrorCode::invalid_argument, "solver_options.max_newton: must be >= 1");
    if (!(o.tol > 0.0))
        throw Error(ErrorCode::invalid_argument, "solver_options.tol: must be > 0");
    if (!(o.barrier_mu > 1.0))
        throw Error(ErrorCode::invalid_argument, "solver_options.barrier_mu: must be > 1");
    if (!(o.newton_tol > 0.0))
        throw Error(ErrorCode::invalid_argument, "solver_options.newton_tol: must be > 0");
    if (!(o.gap_tol > 0.0))
        throw Error(ErrorCode::invalid_argument, "solver_options.gap_tol: must be > 0");
    if (!(o.feasibility_cap > 0.0))
        throw Error(ErrorCode::invalid_argument, "solver_options.feasibility_cap: must be > 0");
    return o;
}

// A run configuration file: scenario fields at top level plus an optional
// "solver_options" object.
struct RunConfig {
    ScenarioConfig scenario;
    SolverOptions options;
};

inline RunConfig run_config_from_json(const nlohmann::json& doc)
{
    RunConfig rc;
    rc.scenario = config_from_json(doc);
    if (doc.contains("solver_options"))
        rc.options = solver_options_from_json(doc.at("solver_options"));
    return rc;
}

inline RunConfig load_run_config(const std::filesystem::path& path)
{
    std::ifstream f(path);
    if (!f)
        throw Error(ErrorCode::invalid_argument, "config: cannot open " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(f);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::invalid_argument, std::string("config: malformed JSON: ") + e.what());
    }
    return run_config_from_json(doc);
}

inline nlohmann::json complex_vector_json(const CVec& v)
{
    auto arr = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        arr.push_back({v(i).real(), v(i).imag()});
    return arr;
}

inline nlohmann::json complex_matrix_json(const CMat& m)
{
    auto rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        auto row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back({m(i, j).real(), m(i, j).imag()});
        rows.push_back(row);
    }
    return rows;
}

inline nlohmann::json to_json_value(const SolveResult& r)
{
    return {{"feasible", r.feasible},
            {"status", to_string(r.status)},
            {"sinr", r.sinr},
            {"sinr_db", sinr_db_value(r.sinr)},
            {"achieved_secrecy", r.achieved_secrecy},
            {"p_r", r.p_r},
            {"trace_q", trace_real(r.q_c)},
            {"outer_iters", r.outer_iters},
            {"inner_iters_total", r.inner_iters_total},
            {"q_c", complex_matrix_json(r.q_c)},
            {"s_r", complex_vector_json(r.s_r)}};
}

inline nlohmann::json to_json_value(const OverlapSolveResult& r)
{
    auto j = to_json_value(static_cast<const SolveResult&>(r));
    j["achieved_secrecy_per_use"] = r.achieved_secrecy_per_use;
    j["eig_ratio"] = r.eig_ratio;
    j["randomized"] = r.randomized;
    j["max_tightness_gap"] = r.max_tightness_gap;
    j["objective_history"] = r.objective_history;
    return j;
}

inline nlohmann::json to_json_value(const OuterRecord& r, bool overlap)
{
    nlohmann::json j{{"iteration", r.iteration}, {"lambda", r.lambda}, {"g", r.g},
                     {"secrecy", r.secrecy_bits}, {"sinr", r.sinr}};
    if (overlap)
        j["objective"] = r.objective;
    else
        j["trace_q"] = r.trace_q;
    return j;
}

} // namespace radcom

#endif // RADCOM_EXPERIMENTS_HPP
