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

#ifndef RADCOM_OVERLAP_SOLVER_HPP
#define RADCOM_OVERLAP_SOLVER_HPP

// Shared-resource design. The radar waveform and the information signal
// occupy the same resource elements, so each interferes with the other. The
// waveform Gram matrix is relaxed to a PSD matrix S, and the AO alternates
// closed-form auxiliary matrices with the relaxed convex subproblem. A
// rank-one waveform is extracted at the end.

#include <cstdint>
#include <random>
#include <vector>

#include "radcom/convex_core.hpp"
#include "radcom/nonoverlap_solver.hpp"

namespace radcom {

struct AuxMatrices {
    CMat x_mat;    // C(Q)^{-1}
    CMat ybar_mat; // (Hd (S + I(x)Q) Hd^H + sr I)^{-1}
    CMat z_mat;    // (Hc S Hc^H + sc I)^{-1}
};

struct OverlapIterate {
    CMat s_bar;
    CMat q_c;
    CMat x_mat, ybar_mat, z_mat;
    double objective = 0.0;
};

inline OverlapProblemData make_overlap_data(const RadarOperators& ops, const ChannelRealization& chan,
                                            const ScenarioConfig& cfg)
{
    OverlapProblemData d;
    d.ops = &ops;
    d.h_c = chan.h_c;
    d.h_d = chan.h_d;
    d.sigma2_c = cfg.sigma2_c;
    d.sigma2_r = cfg.sigma2_r;
    d.block_len = cfg.block_len;
    return d;
}

inline AuxMatrices aux_update(const OverlapProblemData& data, const CMat& s_bar, const CMat& q_c)
{
    require_psd(s_bar, "aux_update");
    require_psd(q_c, "aux_update");
    const Eigen::Index L = data.block_len;
    const CMat hbar_c = block_diag_repeat(L, data.h_c);
    const CMat hbar_d = block_diag_repeat(L, data.h_d);
    const CMat total = s_bar + block_diag_repeat(L, q_c);
    AuxMatrices aux;
    aux.x_mat = hpd_inverse_refined(build_c_of_q(*data.ops, q_c, data.sigma2_r));
    aux.ybar_mat = hpd_inverse(hbar_d * total * hbar_d.adjoint() +
                               data.sigma2_r * CMat::Identity(hbar_d.rows(), hbar_d.rows()));
    aux.z_mat = hpd_inverse(hbar_c * s_bar * hbar_c.adjoint() +
                            data.sigma2_c * CMat::Identity(hbar_c.rows(), hbar_c.rows()));
    return aux;
}

// ln det(C(Q) + D^H S D) - ln det C(Q); equals ln(1 + SINR) when S = s s^H.
inline double overlap_relaxed_objective(const OverlapProblemData& data, const CMat& s_bar, const CMat& q_c)
{
    const CMat cq = build_c_of_q(*data.ops, q_c, data.sigma2_r);
    return hpd_logdet(cq + data.ops->d_mat.adjoint() * s_bar * data.ops->d_mat) - hpd_logdet(cq);
}

// Surrogate objective with the auxiliary X: the relaxed objective with
// -ln det C(Q) replaced by ln det X - tr(X C(Q)) + LN.
inline double overlap_surrogate_objective(const OverlapProblemData& data, const CMat& x_mat, const CMat& s_bar,
                                          const CMat& q_c)
{
    return overlap_inner_objective(data, x_mat, s_bar, q_c) + hpd_logdet(x_mat) +
           static_cast<double>(x_mat.rows());
}

// ---------------------------------------------------------------------------
// Rank-one extraction

// What a candidate waveform is judged by: SINR against the final covariance
// and the block secrecy threshold.
struct RankOneContext {
    const OverlapProblemData* data = nullptr;
    CMat q_c;
    double r_tilde = 0.0; // bits per block
    double secrecy_tol = 1e-3;
};

struct RankOneResult {
    CVec s_r;
    double eig_ratio = 0.0; // lambda_2 / lambda_1 of S
    bool randomized = false;
    double sinr = 0.0;
    double secrecy = 0.0; // bits per block
};

namespace detail {

inline double candidate_secrecy(const RankOneContext& ctx, const CVec& s)
{
    return block_secrecy_rate(ctx.data->h_c, ctx.data->h_d, s, ctx.q_c, ctx.data->sigma2_c, ctx.data->sigma2_r,
                              ctx.data->block_len);
}

} // namespace detail

inline double eigenvalue_ratio(const CMat& s_bar)
{
    const RVec ev = hermitian_eigenvalues(s_bar); // ascending
    if (ev.size() < 2 || !(ev(ev.size() - 1) > 0.0))
        return 0.0;
    return std::max(0.0, ev(ev.size() - 2)) / ev(ev.size() - 1);
}

// Principal component when S is numerically rank one; otherwise the best of
// `draws` Gaussian candidates s = S^{1/2} z rescaled to ||s||^2 = tr(S) that
// meet the secrecy threshold. Throws no_feasible_candidate when none does.
inline RankOneResult rank_one_extract(const CMat& s_bar, const RankOneContext& ctx, std::mt19937_64& rng,
                                      int draws = 100, double rank_tol = 1e-6)
{
    require_psd(s_bar, "rank_one_extract");
    RankOneResult res;
    const double power = std::max(0.0, trace_real(s_bar));
    res.eig_ratio = eigenvalue_ratio(s_bar);

    auto evaluate = [&](const CVec& s, double& sinr, double& sec) {
        sinr = sinr_overlap(*ctx.data->ops, s, ctx.q_c, ctx.data->sigma2_r);
        sec = detail::candidate_secrecy(ctx, s);
    };

    if (res.eig_ratio < rank_tol) {
        const Eigenpair top = principal_eigenpair(s_bar);
        res.s_r = std::sqrt(std::max(0.0, top.value)) * top.vector;
        if (power > 0.0 && res.s_r.squaredNorm() > 0.0)
            res.s_r *= std::sqrt(power) / res.s_r.norm();
        evaluate(res.s_r, res.sinr, res.secrecy);
        return res;
    }

    res.randomized = true;
    const CMat root = psd_sqrt(s_bar);
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
    bool found = false;
    for (int k = 0; k < draws; ++k) {
        CVec z(s_bar.rows());
        for (Eigen::Index i = 0; i < z.size(); ++i) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            z(i) = cplx(re, im);
        }
        CVec s = root * z;
        const double nrm = s.norm();
        if (!(nrm > 0.0))
            continue;
        s *= std::sqrt(power) / nrm;
        double sinr = 0.0, sec = 0.0;
        evaluate(s, sinr, sec);
        if (sec < ctx.r_tilde - ctx.secrecy_tol)
            continue;
        if (!found || sinr > res.sinr) {
            found = true;
            res.s_r = s;
            res.sinr = sinr;
            res.secrecy = sec;
        }
    }
    if (!found)
        throw Error(ErrorCode::no_feasible_candidate, "rank_one_extract: no candidate meets the secrecy threshold");
    return res;
}

// ---------------------------------------------------------------------------
// Alternating optimization

struct OverlapSolveResult : SolveResult {
    CMat s_bar;
    double eig_ratio = 0.0;
    bool randomized = false;
    double achieved_secrecy_per_use = 0.0;
    std::vector<double> objective_history; // relaxed objective after each round
    double max_tightness_gap = 0.0;        // surrogate vs true value right after each aux update
};

struct OverlapOptions {
    int rank_one_draws = 100;
    double rank_tol = 1e-6;
    std::uint64_t rng_seed = 0;
};

namespace detail {

inline OverlapSolveResult finalize_overlap_infeasible(OverlapSolveResult res, const RadarOperators& ops,
                                                      const ScenarioConfig& cfg, SolveStatus status)
{
    res.status = status;
    res.feasible = false;
    res.achieved_secrecy = 0.0;
    res.achieved_secrecy_per_use = 0.0;
    res.q_c = CMat::Zero(cfg.n_tx, cfg.n_tx);
    res.p_r = cfg.p_total;
    res.s_r = optimal_waveform(ops, cfg.p_total).s_r;
    res.sinr = sinr_overlap(ops, res.s_r, res.q_c, cfg.sigma2_r);
    return res;
}

} // namespace detail

// r_tilde in bits per block of L uses.
inline OverlapSolveResult ao_overlap(const ChannelRealization& chan, const RadarOperators& ops,
                                     const ScenarioConfig& cfg, double r_tilde, const SolverOptions& opts,
                                     const OverlapOptions& oopts = {}, const OuterSink& sink = {})
{
    if (!(r_tilde >= 0.0))
        throw Error(ErrorCode::invalid_argument, "r_tilde: secrecy threshold must be >= 0");
    const OverlapProblemData data = make_overlap_data(ops, chan, cfg);
    const Eigen::Index nt = cfg.n_tx;
    const Eigen::Index lnt = cfg.block_len * nt;
    const double r_hat = r_tilde * kLn2;

    OverlapSolveResult res;
    OverlapIterate it;
    it.s_bar = (0.5 * cfg.p_total / static_cast<double>(lnt)) * CMat::Identity(lnt, lnt);
    it.q_c = (0.5 * cfg.p_total / static_cast<double>(nt)) * CMat::Identity(nt, nt);
    it.objective = overlap_relaxed_objective(data, it.s_bar, it.q_c);

    bool have_feasible = false;
    int inner_total = 0;
    int round = 0;
    for (round = 1; round <= opts.max_outer_iters; ++round) {
        const AuxMatrices aux = aux_update(data, it.s_bar, it.q_c);
        it.x_mat = aux.x_mat;
        it.ybar_mat = aux.ybar_mat;
        it.z_mat = aux.z_mat;

        const double true_obj = overlap_relaxed_objective(data, it.s_bar, it.q_c);
        const double true_sec =
            block_secrecy_expansion_gram(chan.h_c, chan.h_d, it.s_bar, it.q_c, cfg.sigma2_c, cfg.sigma2_r,
                                         cfg.block_len) * kLn2;
        const double sur_obj = overlap_surrogate_objective(data, aux.x_mat, it.s_bar, it.q_c);
        const double sur_sec = overlap_secrecy_surrogate(data, aux.ybar_mat, aux.z_mat, it.s_bar, it.q_c);
        res.max_tightness_gap =
            std::max({res.max_tightness_gap, std::abs(true_obj - sur_obj), std::abs(true_sec - sur_sec)});

        OverlapInnerResult inner;
        try {
            inner = solve_overlap_inner(data, aux.x_mat, aux.ybar_mat, aux.z_mat, r_hat, cfg.p_total, opts,
                                        std::make_pair(it.s_bar, it.q_c));
        } catch (const Error& e) {
            res.outer_iters = round;
            res.inner_iters_total = inner_total;
            res.s_bar = it.s_bar;
            if (have_feasible && e.code() == ErrorCode::not_converged)
                break; // keep the last feasible round
            const auto status = e.code() == ErrorCode::not_converged ? SolveStatus::inner_not_converged
                                                                     : SolveStatus::constraint_infeasible;
            return detail::finalize_overlap_infeasible(std::move(res), ops, cfg, status);
        }
        inner_total += inner.newton_iters;

        const double new_obj = overlap_relaxed_objective(data, inner.s_bar.value, inner.q_c.value);
        const double prev_obj = it.objective;
        // The previous iterate is feasible for this subproblem once a
        // feasible round exists, so a lower value is round-off only.
        if (have_feasible && new_obj < prev_obj) {
            res.objective_history.push_back(prev_obj);
            break;
        }
        it.s_bar = inner.s_bar.value;
        it.q_c = inner.q_c.value;
        it.objective = new_obj;
        res.objective_history.push_back(new_obj);

        if (sink) {
            OuterRecord rec;
            rec.iteration = round;
            rec.trace_q = trace_real(it.q_c);
            rec.lambda = inner.secrecy_multiplier;
            rec.g = -inner.constraint;
            rec.secrecy_bits = block_secrecy_expansion_gram(chan.h_c, chan.h_d, it.s_bar, it.q_c, cfg.sigma2_c,
                                                            cfg.sigma2_r, cfg.block_len);
            rec.sinr = std::expm1(new_obj);
            rec.objective = new_obj;
            sink(rec);
        }
        const bool was_feasible = have_feasible;
        have_feasible = true;
        if (was_feasible && std::abs(new_obj - prev_obj) <= opts.tol * std::max(std::abs(prev_obj), 1e-12))
            break;
    }
    res.outer_iters = std::min(round, opts.max_outer_iters);
    res.inner_iters_total = inner_total;
    res.s_bar = it.s_bar;
    res.eig_ratio = eigenvalue_ratio(it.s_bar);

    RankOneContext ctx{&data, it.q_c, r_tilde};
    std::mt19937_64 rng(oopts.rng_seed);
    RankOneResult r1;
    try {
        r1 = rank_one_extract(it.s_bar, ctx, rng, oopts.rank_one_draws, oopts.rank_tol);
    } catch (const Error&) {
        return detail::finalize_overlap_infeasible(std::move(res), ops, cfg, SolveStatus::no_rank_one);
    }
    res.randomized = r1.randomized;
    res.q_c = it.q_c;
    res.raw_trace_q = trace_real(it.q_c);
    res.s_r = r1.s_r;
    res.p_r = r1.s_r.squaredNorm();
    res.sinr = r1.sinr;
    res.achieved_secrecy = r1.secrecy;
    res.achieved_secrecy_per_use = r1.secrecy / static_cast<double>(cfg.block_len);
    res.status = SolveStatus::ok;
    if (res.p_r + res.raw_trace_q > cfg.p_total + 1e-6)
        res.status = SolveStatus::over_budget;
    else if (r1.secrecy < r_tilde - 1e-3)
        res.status = SolveStatus::secrecy_shortfall;
    res.feasible = res.status == SolveStatus::ok;
    if (!res.feasible)
        return detail::finalize_overlap_infeasible(std::move(res), ops, cfg, res.status);
    return res;
}

} // namespace radcom

#endif // RADCOM_OVERLAP_SOLVER_HPP
