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

// radcom command line: sweep, solve-one, verify.
// Exit codes: 0 success, 1 solver error, 2 bad arguments.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "radcom/experiments.hpp"
#include "radcom/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSolver = 1;
constexpr int kExitArgs = 2;

constexpr const char* kGainNote =
    "Gains: |gamma_d|^2 = 10^(snr_direct_db/10), |gamma_t|^2 = 10^(snr_surv_db/10); "
    "each entry of the transmitter-to-CR channel has variance sigma2_c * 10^(snr_comm_db/10).";

struct BadArgs : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<double> parse_thresholds(const std::string& csv)
{
    std::vector<double> out;
    for (const auto& cell : radcom::split_csv_line(csv)) {
        try {
            std::size_t used = 0;
            const double v = std::stod(cell, &used);
            if (used != cell.size())
                throw std::invalid_argument(cell);
            out.push_back(v);
        } catch (const std::exception&) {
            throw BadArgs("--thresholds: cannot parse '" + cell + "'");
        }
    }
    return out;
}

std::vector<radcom::SolverKind> parse_solvers(const std::string& csv)
{
    std::vector<radcom::SolverKind> out;
    for (const auto& cell : radcom::split_csv_line(csv))
        out.push_back(radcom::solver_from_string(cell));
    return out;
}

radcom::RunConfig load_config_or_default(const std::string& path)
{
    if (path.empty())
        return {};
    return radcom::load_run_config(path);
}

int run_sweep_cmd(const std::string& config, const std::string& thresholds, int runs, std::uint64_t seed,
                  const std::string& solvers, const std::string& out_dir, int jobs, bool timing)
{
    const auto rc = load_config_or_default(config);
    radcom::SweepSpec spec;
    spec.config = rc.scenario;
    spec.options = rc.options;
    spec.thresholds = parse_thresholds(thresholds);
    spec.n_runs = runs;
    spec.base_seed = seed;
    spec.solvers = parse_solvers(solvers);
    spec.jobs = jobs;
    spec.record_runtime = timing;
    radcom::validate(spec);

    const auto result = radcom::run_sweep(spec);
    const auto paths = radcom::emit_csv(result.points, result.records, out_dir);
    std::cout << "wrote " << paths.summary.string() << " and " << paths.runs.string() << '\n';
    return kExitOk;
}

int run_solve_one(const std::string& config, double r_m, std::uint64_t seed, const std::string& solver,
                  const std::string& trace_path)
{
    const auto rc = load_config_or_default(config);
    const auto kind = radcom::solver_from_string(solver);
    if (!(r_m >= 0.0))
        throw BadArgs("--r-m: must be >= 0");
    const auto& cfg = rc.scenario;
    const auto ops = radcom::build_operators(cfg);
    const auto chan = radcom::sample_channel(cfg, seed);

    std::optional<std::ofstream> trace;
    if (!trace_path.empty()) {
        trace.emplace(trace_path, std::ios::binary | std::ios::trunc);
        if (!*trace)
            throw radcom::Error(radcom::ErrorCode::io, "cannot open " + trace_path + " for writing");
    }
    const bool overlap = kind == radcom::SolverKind::overlap;
    const radcom::OuterSink sink = [&](const radcom::OuterRecord& r) {
        if (trace)
            *trace << radcom::to_json_value(r, overlap).dump() << '\n';
    };

    nlohmann::json out;
    if (overlap) {
        radcom::OverlapOptions oo;
        oo.rng_seed = seed;
        const auto res = radcom::ao_overlap(chan, ops, cfg, r_m, rc.options, oo, sink);
        out = radcom::to_json_value(res);
    } else {
        const auto params = radcom::make_secrecy_params(r_m, cfg.sigma2_r, cfg.sigma2_c, cfg.n_rr, cfg.n_cr);
        const auto res = kind == radcom::SolverKind::alg1 ? radcom::algorithm1(chan, ops, cfg, params, rc.options, sink)
                                                          : radcom::algorithm2(chan, ops, cfg, params, rc.options, sink);
        out = radcom::to_json_value(res);
    }
    out["solver"] = radcom::to_string(kind);
    out["r_m"] = r_m;
    out["seed"] = seed;
    std::cout << out.dump(2) << '\n';
    return kExitOk;
}

int run_verify()
{
    bool ok = true;
    for (const auto& r : radcom::verify::run_quick_suite()) {
        std::cout << radcom::verify::describe(r) << '\n';
        ok = ok && r.passed;
    }
    return ok ? kExitOk : kExitSolver;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Radar SINR versus secrecy-rate tradeoff for a joint passive radar / communications transmitter"};
    app.footer(kGainNote);
    app.require_subcommand(1);

    std::string config, thresholds = "0", solvers = "alg2", out_dir = "results", solver = "alg2", trace_path;
    int runs = 100, jobs = 1;
    std::uint64_t seed = 0;
    double r_m = 0.0;
    bool timing = false;

    auto* sweep = app.add_subcommand("sweep", "Monte Carlo sweep over secrecy thresholds; writes summary.csv and runs.csv");
    sweep->add_option("--config", config, "scenario JSON (defaults when omitted)")->check(CLI::ExistingFile);
    sweep->add_option("--thresholds", thresholds, "comma-separated r_m values in bits")->required();
    sweep->add_option("--runs", runs, "channel draws per threshold")->check(CLI::PositiveNumber);
    sweep->add_option("--seed", seed, "base seed; run i uses seed + i");
    sweep->add_option("--solvers", solvers, "comma-separated subset of alg1,alg2,overlap");
    sweep->add_option("--out", out_dir, "output directory");
    sweep->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    sweep->add_flag("--timing", timing, "record wall-clock runtime_ms (output is then not byte-reproducible)");

    auto* one = app.add_subcommand("solve-one", "Solve one seeded instance and print the result as JSON");
    one->add_option("--config", config, "scenario JSON (defaults when omitted)")->check(CLI::ExistingFile);
    one->add_option("--r-m", r_m, "secrecy threshold in bits (per block for overlap)")->required();
    one->add_option("--seed", seed, "channel seed");
    one->add_option("--solver", solver, "alg1, alg2 or overlap");
    one->add_option("--trace", trace_path, "write per-iteration JSON lines to this file");

    auto* ver = app.add_subcommand("verify", "Run the numerical self-checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitArgs;
    }

    try {
        if (sweep->parsed())
            return run_sweep_cmd(config, thresholds, runs, seed, solvers, out_dir, jobs, timing);
        if (one->parsed())
            return run_solve_one(config, r_m, seed, solver, trace_path);
        if (ver->parsed())
            return run_verify();
    } catch (const BadArgs& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitArgs;
    } catch (const radcom::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.code() == radcom::ErrorCode::invalid_argument ? kExitArgs : kExitSolver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitSolver;
    }
    return kExitArgs;
}
