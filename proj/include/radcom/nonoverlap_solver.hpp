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

#ifndef RADCOM_NONOVERLAP_SOLVER_HPP
#define RADCOM_NONOVERLAP_SOLVER_HPP

// Orthogonal-resource design: the radar SINR depends only on the radar power
// P_r = P_T - tr(Q_c), so the problem reduces to the smallest-trace
// information covariance meeting the secrecy threshold. Both solvers
// alternate between the variational matrix Y and a covariance update; they
// differ in the covariance step (barrier solve vs. water-filling with a
// bisection on the multiplier).

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "radcom/convex_core.hpp"
#include "radcom/radar_rx.hpp"
#include "radcom/scenario.hpp"
#include "radcom/secrecy.hpp"

namespace radcom {

enum class SolveStatus {
    ok,
    over_budget,          // tr(Q_c) > P_T at convergence
    constraint_infeasible, // inner problem has no solution (bisection / phase one)
    inner_not_converged,
    secrecy_shortfall,    // converged but true secrecy below threshold
    no_rank_one,          // overlap: randomization found no feasible waveform
};

inline const char* to_string(SolveStatus s)
{
    switch (s) {
    case SolveStatus::ok: return "ok";
    case SolveStatus::over_budget: return "over_budget";
    case SolveStatus::constraint_infeasible: return "constraint_infeasible";
    case SolveStatus::inner_not_converged: return "inner_not_converged";
    case SolveStatus::secrecy_shortfall: return "secrecy_shortfall";
    case SolveStatus::no_rank_one: return "no_rank_one";
    }
    return "unknown";
}

struct SolveResult {
    CMat q_c;
    double p_r = 0.0;
    CVec s_r;
    double sinr = 0.0;             // linear
    double achieved_secrecy = 0.0; // bits per use (non-overlap), bits per block (overlap)
    bool feasible = false;
    SolveStatus status = SolveStatus::ok;
    int outer_iters = 0;
    int inner_iters_total = 0;
    double raw_trace_q = 0.0; // tr(Q_c) the solver ended with, before infeasibility accounting
};

// Per-outer-iteration diagnostics.
struct OuterRecord {
    int iteration = 0;
    double trace_q = 0.0;
    double lambda = 0.0;
    double g = 0.0;
    double secrecy_bits = 0.0;
    double sinr = 0.0;
    double objective = 0.0;
};

using OuterSink = std::function<void(const OuterRecord&)>;

// Y = (H_d Q H_d^H + sigma2_r I)^{-1}.
inline CMat update_y(const CMat& h_d, const CMat& q_c, double sigma2_r)
{
    require_psd(q_c, "update_y");
    return hpd_inverse(h_d * q_c * h_d.adjoint() + sigma2_r * CMat::Identity(h_d.rows(), h_d.rows()));
}

// ln det Y - tr(Y (H_d Q H_d^H + sigma2_r I)) + N; maximized at Y = update_y
// where it equals -ln det(H_d Q H_d^H + sigma2_r I).
inline double variational_bracket(const CMat& h_d, const CMat& q_c, const CMat& y_mat, double sigma2_r)
{
    const Eigen::Index n = h_d.rows();
    const CMat k = h_d * q_c * h_d.adjoint() + sigma2_r * CMat::Identity(n, n);
    return hpd_logdet(y_mat) - trace_product_real(y_mat, k) + static_cast<double>(n);
}

struct WaterfillSolution {
    double lambda = 0.0;
    CMat p_mat;      // I + lambda H_d^H Y H_d
    CMat p_inv_sqrt; // P^{-1/2}
    CMat u_mat;      // left singular vectors of H_c P^{-1/2}
    CMat v_mat;      // right singular vectors
    RVec d_vals;     // retained singular values, descending
    RVec mu_vals;    // water levels
    CMat q_c;
};

// Minimizer over Q >= 0 of the Lagrangian
//   tr(Q) + lambda (r_bar - ln det Y - n_bar + tr(Y(Hd Q Hd^H + sr I)) - ln det(Hc Q Hc^H + sc I))
// for fixed lambda >= 0 and Y: whiten by P = I + lambda Hd^H Y Hd, diagonalize
// H_c P^{-1/2} and water-fill mu_i = [lambda - sigma2_c / d_i^2]^+.
inline WaterfillSolution waterfill_qc(double lambda, const CMat& y_mat, const CMat& h_c, const CMat& h_d,
                                      double sigma2_c)
{
    if (!(lambda >= 0.0))
        throw Error(ErrorCode::invalid_argument, "waterfill_qc: lambda must be >= 0");
    require_psd(y_mat, "waterfill_qc");
    const Eigen::Index nt = h_c.cols();
    const Eigen::Index m = h_c.rows();
    const Eigen::Index r = std::min(m, nt);

    WaterfillSolution sol;
    sol.lambda = lambda;
    sol.p_mat = hermitian_part(CMat::Identity(nt, nt) + lambda * (h_d.adjoint() * y_mat * h_d));
    sol.p_inv_sqrt = hpd_inv_sqrt(sol.p_mat);

    Eigen::JacobiSVD<CMat> svd(h_c * sol.p_inv_sqrt, Eigen::ComputeFullU | Eigen::ComputeFullV);
    sol.u_mat = svd.matrixU();
    sol.v_mat = svd.matrixV();
    sol.d_vals = svd.singularValues().head(r);
    sol.mu_vals = RVec::Zero(r);
    for (Eigen::Index i = 0; i < r; ++i) {
        const double d2 = sol.d_vals(i) * sol.d_vals(i);
        sol.mu_vals(i) = d2 > 0.0 ? std::max(0.0, lambda - sigma2_c / d2) : 0.0;
    }

    RVec levels = RVec::Zero(nt);
    levels.head(r) = sol.mu_vals;
    const CMat q_tilde = sol.v_mat * levels.asDiagonal() * sol.v_mat.adjoint();
    sol.q_c = hermitian_part(sol.p_inv_sqrt * q_tilde * sol.p_inv_sqrt);
    return sol;
}

// The Lagrangian above, evaluated at an arbitrary PSD Q.
inline double secrecy_lagrangian(const CMat& q_c, double lambda, const CMat& y_mat, const CMat& h_c,
                                 const CMat& h_d, const SecrecyConstraintParams& params, double sigma2_c,
                                 double sigma2_r)
{
    const double surrogate = linearized_secrecy_nats(h_c, h_d, y_mat, q_c, params, sigma2_c, sigma2_r);
    return trace_real(q_c) + lambda * (params.r_bar - surrogate);
}

// g(lambda): threshold minus linearized secrecy at Q_c(lambda). Zero when
// the constraint is exactly active.
inline double g_lambda(double lambda, const CMat& y_mat, const CMat& h_c, const CMat& h_d,
                       const SecrecyConstraintParams& params, double sigma2_c, double sigma2_r,
                       WaterfillSolution* out = nullptr)
{
    auto sol = waterfill_qc(lambda, y_mat, h_c, h_d, sigma2_c);
    const double g = params.r_bar - linearized_secrecy_nats(h_c, h_d, y_mat, sol.q_c, params, sigma2_c, sigma2_r);
    if (out)
        *out = std::move(sol);
    return g;
}

struct BisectionResult {
    double lambda = 0.0;
    double g = 0.0;
    int iterations = 0; // bisection halvings
    int doublings = 0;  // bracket expansions
    double initial_width = 0.0;
    WaterfillSolution solution;
};

struct BisectionOptions {
    double bracket_cap = 1e6;
    double g_tol = 1e-6;
    double interval_tol = 1e-9;
};

// Root tolerance used inside the alternating loop. With |g| ~ 1e-6 the
// covariance trace jitters by ~1e-9 between rounds; the tighter root keeps
// the trace sequence monotone. The search also stops once the bracket can
// no longer be split in floating point.
inline constexpr BisectionOptions kPolishedBisection{1e6, 1e-12, 0.0};

// Bracket from lambda_min = 0 by doubling lambda_max from 1, then bisect.
// When g(0) <= 0 the threshold is already met by Q = 0 and lambda = 0 is
// returned. The returned point is on the feasible side (g <= 0) unless
// |g| <= g_tol ended the search.
inline BisectionResult bisect_lambda(const CMat& y_mat, const CMat& h_c, const CMat& h_d,
                                     const SecrecyConstraintParams& params, double sigma2_c, double sigma2_r,
                                     const BisectionOptions& bopts = {})
{
    auto g_of = [&](double lam, WaterfillSolution* sol) {
        return g_lambda(lam, y_mat, h_c, h_d, params, sigma2_c, sigma2_r, sol);
    };

    BisectionResult res;
    WaterfillSolution sol_lo;
    const double g0 = g_of(0.0, &sol_lo);
    if (g0 <= 0.0) {
        res.lambda = 0.0;
        res.g = g0;
        res.solution = std::move(sol_lo);
        return res;
    }

    double lo = 0.0;
    double hi = 1.0;
    WaterfillSolution sol_hi;
    double g_hi = g_of(hi, &sol_hi);
    while (g0 * g_hi >= 0.0) {
        lo = hi;
        hi *= 2.0;
        ++res.doublings;
        if (hi > bopts.bracket_cap)
            throw Error(ErrorCode::infeasible, "bisect_lambda: no sign change of g below the bracket cap");
        g_hi = g_of(hi, &sol_hi);
    }
    res.initial_width = hi - lo;

    while (true) {
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) {
            res.lambda = hi;
            res.g = g_hi;
            res.solution = std::move(sol_hi);
            return res;
        }
        WaterfillSolution sol_mid;
        const double g_mid = g_of(mid, &sol_mid);
        ++res.iterations;
        if (std::abs(g_mid) <= bopts.g_tol) {
            res.lambda = mid;
            res.g = g_mid;
            res.solution = std::move(sol_mid);
            return res;
        }
        if (g_mid * g_hi < 0.0) {
            lo = mid;
        } else {
            hi = mid;
            g_hi = g_mid;
            sol_hi = std::move(sol_mid);
        }
        if (hi - lo <= bopts.interval_tol) {
            res.lambda = hi;
            res.g = g_hi;
            res.solution = std::move(sol_hi);
            return res;
        }
    }
}

namespace detail {

// Inner covariance step: returns the new Q_c for the given Y and reports the
// multiplier / g value / inner iteration count through the out-params.
using CovarianceStep = std::function<CMat(const CMat& y_mat, double& lambda, double& g, int& inner_iters)>;

inline SolveResult finalize_nonoverlap(const ChannelRealization& chan, const RadarOperators& ops,
                                       const ScenarioConfig& cfg, const SecrecyConstraintParams& params,
                                       CMat q_c, SolveStatus status, int outer, int inner)
{
    SolveResult res;
    res.outer_iters = outer;
    res.inner_iters_total = inner;
    res.raw_trace_q = trace_real(q_c);
    res.status = status;

    if (status == SolveStatus::ok && res.raw_trace_q > cfg.p_total + 1e-9)
        res.status = SolveStatus::over_budget;
    if (res.status == SolveStatus::ok) {
        const double achieved = secrecy_capacity(chan.h_c, chan.h_d, q_c, cfg.sigma2_c, cfg.sigma2_r);
        if (achieved < params.r_m - 1e-3)
            res.status = SolveStatus::secrecy_shortfall;
        res.achieved_secrecy = achieved;
    }
    res.feasible = res.status == SolveStatus::ok;
    if (!res.feasible) {
        res.achieved_secrecy = 0.0;
        q_c = CMat::Zero(cfg.n_tx, cfg.n_tx);
    }
    res.q_c = q_c;
    res.p_r = std::max(0.0, cfg.p_total - trace_real(q_c));
    const auto wf = optimal_waveform(ops, res.p_r);
    res.s_r = wf.s_r;
    res.sinr = sinr_nonoverlap(ops, res.s_r, cfg.sigma2_r);
    return res;
}

inline SolveResult run_nonoverlap_ao(const ChannelRealization& chan, const RadarOperators& ops,
                                     const ScenarioConfig& cfg, const SecrecyConstraintParams& params,
                                     const SolverOptions& opts, const CovarianceStep& step, const OuterSink& sink)
{
    const Eigen::Index nt = cfg.n_tx;
    if (params.r_m <= 0.0) {
        // The clipped secrecy rate is never negative: Q_c = 0 is optimal.
        return finalize_nonoverlap(chan, ops, cfg, params, CMat::Zero(nt, nt), SolveStatus::ok, 0, 0);
    }

    CMat q = (cfg.p_total / (2.0 * static_cast<double>(nt))) * CMat::Identity(nt, nt);
    int inner_total = 0;
    int outer = 0;
    for (outer = 1; outer <= opts.max_outer_iters; ++outer) {
        const CMat y = update_y(chan.h_d, q, cfg.sigma2_r);
        double lambda = 0.0, g = 0.0;
        int inner = 0;
        CMat q_next;
        try {
            q_next = step(y, lambda, g, inner);
        } catch (const Error& e) {
            inner_total += inner;
            const auto status = e.code() == ErrorCode::not_converged ? SolveStatus::inner_not_converged
                                                                     : SolveStatus::constraint_infeasible;
            return finalize_nonoverlap(chan, ops, cfg, params, q, status, outer, inner_total);
        }
        inner_total += inner;
        const double tr_prev = trace_real(q);
        q = q_next;
        if (sink) {
            OuterRecord rec;
            rec.iteration = outer;
            rec.trace_q = trace_real(q);
            rec.lambda = lambda;
            rec.g = g;
            rec.secrecy_bits = secrecy_capacity(chan.h_c, chan.h_d, q, cfg.sigma2_c, cfg.sigma2_r);
            const double pr = std::max(0.0, cfg.p_total - rec.trace_q);
            rec.sinr = pr * max_eigenvalue(waveform_gain_matrix(ops)) / cfg.sigma2_r;
            rec.objective = rec.trace_q;
            sink(rec);
        }
        if (std::abs(trace_real(q) - tr_prev) <= opts.tol)
            break;
    }
    return finalize_nonoverlap(chan, ops, cfg, params, q, SolveStatus::ok, std::min(outer, opts.max_outer_iters),
                               inner_total);
}

} // namespace detail

// Alternating optimization with the water-filling covariance step and a
// bisection on the multiplier.
inline SolveResult algorithm2(const ChannelRealization& chan, const RadarOperators& ops, const ScenarioConfig& cfg,
                              const SecrecyConstraintParams& params, const SolverOptions& opts,
                              const OuterSink& sink = {}, const BisectionOptions& bopts = kPolishedBisection)
{
    auto step = [&](const CMat& y, double& lambda, double& g, int& inner) {
        const auto b = bisect_lambda(y, chan.h_c, chan.h_d, params, cfg.sigma2_c, cfg.sigma2_r, bopts);
        lambda = b.lambda;
        g = b.g;
        inner = b.iterations + b.doublings;
        return b.solution.q_c;
    };
    return detail::run_nonoverlap_ao(chan, ops, cfg, params, opts, step, sink);
}

// Alternating optimization with the barrier-method covariance step.
inline SolveResult algorithm1(const ChannelRealization& chan, const RadarOperators& ops, const ScenarioConfig& cfg,
                              const SecrecyConstraintParams& params, const SolverOptions& opts,
                              const OuterSink& sink = {})
{
    auto step = [&](const CMat& y, double& lambda, double& g, int& inner) {
        const auto r = solve_min_trace_logdet(chan.h_c, chan.h_d, y, params, cfg.sigma2_c, cfg.sigma2_r,
                                              cfg.p_total, opts);
        lambda = r.lambda;
        g = -r.constraint;
        inner = r.newton_iters;
        return r.q_c.value;
    };
    return detail::run_nonoverlap_ao(chan, ops, cfg, params, opts, step, sink);
}

} // namespace radcom

#endif // RADCOM_NONOVERLAP_SOLVER_HPP
