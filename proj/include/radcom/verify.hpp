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

#ifndef RADCOM_VERIFY_HPP
#define RADCOM_VERIFY_HPP

// Numerical self-checks. Each check compares a library routine against an
// independent evaluation (dense formulas, a first-order minimizer, brute
// force) and reports the worst deviation seen.

#include <chrono>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "radcom/experiments.hpp"

namespace radcom::verify {

struct CheckResult {
    std::string name;
    bool passed = false;
    double worst = 0.0;     // worst deviation against the tolerance
    double tolerance = 0.0;
    double seconds = 0.0;
    std::string detail;
};

inline std::string describe(const CheckResult& r)
{
    std::ostringstream os;
    os << (r.passed ? "PASS " : "FAIL ") << r.name << "  worst=" << r.worst << " tol=" << r.tolerance
       << " time=" << r.seconds << "s";
    if (!r.detail.empty())
        os << "  " << r.detail;
    return os.str();
}

template <class F>
CheckResult timed(const std::string& name, F&& body)
{
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult r;
    try {
        r = body();
    } catch (const std::exception& e) {
        r.passed = false;
        r.detail = std::string("exception: ") + e.what();
    }
    r.name = name;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

// ---------------------------------------------------------------------------
// Random objects

inline CMat gaussian_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols, double variance = 1.0)
{
    std::normal_distribution<double> g(0.0, std::sqrt(variance / 2.0));
    CMat m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) {
            const double re = g(rng);
            const double im = g(rng);
            m(i, j) = cplx(re, im);
        }
    return m;
}

// Wishart-like PSD matrix of the given rank and trace.
inline CMat random_psd(std::mt19937_64& rng, Eigen::Index n, Eigen::Index rank, double trace)
{
    const CMat g = gaussian_matrix(rng, n, rank);
    CMat q = hermitian_part(g * g.adjoint());
    return q * (trace / trace_real(q));
}

inline CVec random_vector(std::mt19937_64& rng, Eigen::Index n, double norm)
{
    CVec v = gaussian_matrix(rng, n, 1).col(0);
    return v * (norm / v.norm());
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

// ---------------------------------------------------------------------------
// Variational identity: bracket(Y) = ln det Y - tr(Y K) + N is maximized at
// Y* = K^{-1} with value -ln det K.

inline CheckResult variational_identity(int n_q = 50, int n_perturb = 100, std::uint64_t seed = 11)
{
    CheckResult r;
    r.tolerance = 1e-9;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const Eigen::Index n = 4, nt = 4;
    const double sigma2 = 1.0;
    double worst_eq = 0.0, worst_excess = -1e300;
    for (int k = 0; k < n_q; ++k) {
        const CMat h_d = gaussian_matrix(rng, n, nt, 10.0);
        const CMat q = random_psd(rng, nt, 1 + static_cast<Eigen::Index>(k % nt), 30.0 * unif(rng) + 0.1);
        const CMat kmat = hermitian_part(h_d * q * h_d.adjoint()) + sigma2 * CMat::Identity(n, n);
        const CMat y_star = update_y(h_d, q, sigma2);
        const double target = -hpd_logdet(kmat);
        const double at_star = variational_bracket(h_d, q, y_star, sigma2);
        worst_eq = std::max(worst_eq, rel_diff(at_star, target));
        for (int p = 0; p < n_perturb; ++p) {
            // mix of small and large Hermitian perturbations, kept positive definite
            const double scale = std::pow(10.0, -6.0 + 6.0 * unif(rng));
            const CMat e = hermitian_part(gaussian_matrix(rng, n, n));
            CMat y = y_star + scale * e * (y_star.norm() / e.norm());
            if (min_eigenvalue(y) <= 1e-14)
                y = y_star + scale * e * e.adjoint() * (y_star.norm() / (e * e.adjoint()).norm());
            const double v = variational_bracket(h_d, q, y, sigma2);
            worst_excess = std::max(worst_excess, v - at_star);
        }
    }
    r.worst = std::max(worst_eq, std::max(0.0, worst_excess));
    r.passed = worst_eq <= r.tolerance && worst_excess <= r.tolerance;
    std::ostringstream os;
    os << "equality=" << worst_eq << " max_excess=" << worst_excess;
    r.detail = os.str();
    return r;
}

// ---------------------------------------------------------------------------
// Water-filling against accelerated projected gradient on the PSD cone.

namespace detail {

inline CMat project_psd(const CMat& m)
{
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(m));
    const RVec ev = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

// Gradient (w.r.t. Q, Hermitian) of
//   tr(Q) - lambda ln det(Hc Q Hc^H + sc I) + lambda tr(Y Hd Q Hd^H).
inline CMat lagrangian_gradient(const CMat& q, double lambda, const CMat& y, const CMat& h_c, const CMat& h_d,
                                double sigma2_c)
{
    const Eigen::Index m = h_c.rows();
    const CMat kc = hermitian_part(h_c * q * h_c.adjoint()) + sigma2_c * CMat::Identity(m, m);
    const CMat kc_inv = hpd_inverse(kc);
    return hermitian_part(CMat::Identity(q.rows(), q.cols()) + lambda * (h_d.adjoint() * y * h_d) -
                          lambda * (h_c.adjoint() * kc_inv * h_c));
}

} // namespace detail

struct PgResult {
    CMat q;
    double value = 0.0;
};

// FISTA with adaptive restart; fixed step 1/L from a bound on the Hessian.
inline PgResult projected_gradient_min(double lambda, const CMat& y, const CMat& h_c, const CMat& h_d,
                                       const SecrecyConstraintParams& params, double sigma2_c, double sigma2_r,
                                       int steps)
{
    const Eigen::Index nt = h_c.cols();
    const double hc2 = h_c.squaredNorm(); // >= ||Hc||_2^2
    const double lip = std::max(1e-12, lambda * hc2 * hc2 / (sigma2_c * sigma2_c));
    const double step = 1.0 / lip;
    auto value = [&](const CMat& q) { return secrecy_lagrangian(q, lambda, y, h_c, h_d, params, sigma2_c, sigma2_r); };

    CMat x = CMat::Zero(nt, nt);
    CMat z = x;
    double t = 1.0;
    double fx = value(x);
    for (int k = 0; k < steps; ++k) {
        const CMat g = detail::lagrangian_gradient(z, lambda, y, h_c, h_d, sigma2_c);
        const CMat x_new = detail::project_psd(z - step * g);
        const double f_new = value(x_new);
        if (f_new > fx) { // restart momentum
            t = 1.0;
            z = x;
            continue;
        }
        const double t_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        z = x_new + ((t - 1.0) / t_new) * (x_new - x);
        x = x_new;
        fx = f_new;
        t = t_new;
    }
    return {x, fx};
}

inline CheckResult waterfill_oracle(int n_inst = 20, int pg_steps = 100000, std::uint64_t seed = 23)
{
    CheckResult r;
    r.tolerance = 1e-4;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const Eigen::Index nt = 4, m = 4, n = 4;
    const double sigma2_c = 1.0, sigma2_r = 1.0;
    const auto params = make_secrecy_params(2.0, sigma2_r, sigma2_c, n, m);
    double worst_val = 0.0, worst_diag = 0.0;
    for (int k = 0; k < n_inst; ++k) {
        const CMat h_c = gaussian_matrix(rng, m, nt);
        const CMat h_d = gaussian_matrix(rng, n, nt, 0.5);
        const CMat y = hpd_inverse(random_psd(rng, n, n, 4.0 * (0.5 + unif(rng))) + CMat::Identity(n, n));
        const double lambda = 0.2 + 5.0 * unif(rng);

        const auto sol = waterfill_qc(lambda, y, h_c, h_d, sigma2_c);
        const double wf = secrecy_lagrangian(sol.q_c, lambda, y, h_c, h_d, params, sigma2_c, sigma2_r);
        const auto pg = projected_gradient_min(lambda, y, h_c, h_d, params, sigma2_c, sigma2_r, pg_steps);
        worst_val = std::max(worst_val, std::abs(wf - pg.value) / std::max(1.0, std::abs(pg.value)));

        // U^H (Hc Q Hc^H + sc I) U must be diagonal.
        const CMat kc = sol.u_mat.adjoint() *
                        (hermitian_part(h_c * sol.q_c * h_c.adjoint()) + sigma2_c * CMat::Identity(m, m)) *
                        sol.u_mat;
        const double off = (kc - CMat(kc.diagonal().asDiagonal())).norm() / kc.norm();
        worst_diag = std::max(worst_diag, off);
    }
    r.worst = worst_val;
    r.passed = worst_val <= r.tolerance && worst_diag < 1e-9;
    std::ostringstream os;
    os << "value_rel=" << worst_val << " offdiag=" << worst_diag;
    r.detail = os.str();
    return r;
}

// ---------------------------------------------------------------------------
// Algorithm agreement at a positive threshold.

// Largest step-to-step increase, relative to max(1, |previous|).
inline double worst_increase(const std::vector<double>& v)
{
    double w = 0.0;
    for (std::size_t i = 1; i < v.size(); ++i)
        w = std::max(w, (v[i] - v[i - 1]) / std::max(1.0, std::abs(v[i - 1])));
    return w;
}

inline bool non_increasing(const std::vector<double>& v, double slack)
{
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[i - 1] + slack * std::max(1.0, std::abs(v[i - 1])))
            return false;
    return true;
}

inline CheckResult algorithm_agreement(int n_inst = 20, double r_m = 2.0, std::uint64_t seed = 0,
                                       int max_seeds = 200)
{
    CheckResult r;
    r.tolerance = 1e-3;
    const ScenarioConfig cfg;
    const RadarOperators ops = build_operators(cfg);
    const auto params = make_secrecy_params(r_m, cfg.sigma2_r, cfg.sigma2_c, cfg.n_rr, cfg.n_cr);
    const SolverOptions opts;
    int used = 0, skipped = 0;
    double worst_tr = 0.0, worst_sec = 0.0, worst_rise = 0.0;
    bool monotone = true;
    for (int s = 0; s < max_seeds && used < n_inst; ++s) {
        const auto chan = sample_channel(cfg, seed + static_cast<std::uint64_t>(s));
        std::vector<double> h1, h2;
        const auto a1 = algorithm1(chan, ops, cfg, params, opts, [&](const OuterRecord& o) { h1.push_back(o.trace_q); });
        const auto a2 = algorithm2(chan, ops, cfg, params, opts, [&](const OuterRecord& o) { h2.push_back(o.trace_q); });
        if (!a1.feasible || !a2.feasible) {
            ++skipped;
            continue;
        }
        ++used;
        worst_tr = std::max(worst_tr, std::abs(trace_real(a1.q_c) - trace_real(a2.q_c)));
        worst_sec = std::max(worst_sec, std::max(std::abs(a1.achieved_secrecy - r_m), std::abs(a2.achieved_secrecy - r_m)));
        monotone = monotone && non_increasing(h1, 1e-7) && non_increasing(h2, 1e-7);
        worst_rise = std::max({worst_rise, worst_increase(h1), worst_increase(h2)});
    }
    r.worst = std::max(worst_tr, worst_sec);
    r.passed = used == n_inst && worst_tr <= r.tolerance && worst_sec <= r.tolerance && monotone;
    std::ostringstream os;
    os << "instances=" << used << " skipped=" << skipped << " trace_diff=" << worst_tr << " secrecy_dev=" << worst_sec
       << " monotone=" << (monotone ? "yes" : "no") << " largest_trace_rise=" << worst_rise;
    r.detail = os.str();
    return r;
}

// ---------------------------------------------------------------------------
// Zero threshold: all power to the radar, SINR = P_T lambda_max(D C^{-1} D^H) / sigma_r^2.

inline double zero_threshold_oracle(const ScenarioConfig& cfg)
{
    // Dense rebuild of D and C straight from the steering vectors.
    const Eigen::Index L = cfg.block_len;
    const CVec a_r = steering_vector(cfg.theta_r, cfg.n_rr);
    const CVec a_t = steering_vector(cfg.theta_t, cfg.n_tx);
    const CVec a_r0 = steering_vector(cfg.theta_r0, cfg.n_rr);
    const CVec a_t0 = steering_vector(cfg.theta_t0, cfg.n_tx);
    const CMat eye_l = CMat::Identity(L, L);
    const CMat a = cfg.gamma_d * kron(eye_l, a_r * a_t.adjoint());
    const CMat as = cfg.gamma_t * kron(eye_l, a_r0 * a_t0.adjoint());
    const CMat ad = a.adjoint() * a;
    const CMat c = as * ad * as.adjoint() + CMat::Identity(as.rows(), as.rows());
    const CMat d = ad.adjoint() * as.adjoint();
    const CMat g = d * c.inverse() * d.adjoint();
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(g));
    return cfg.p_total * es.eigenvalues().maxCoeff() / cfg.sigma2_r;
}

inline std::vector<ScenarioConfig> zero_threshold_configs(int n_random, std::uint64_t seed)
{
    std::vector<ScenarioConfig> out;
    out.emplace_back();
    ScenarioConfig six;
    six.n_tx = 6;
    out.push_back(six);
    ScenarioConfig small;
    small.n_tx = 2;
    small.n_rr = 3;
    small.n_cr = 3;
    small.block_len = 3;
    out.push_back(small);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ang(-60.0, 60.0), snr(-5.0, 25.0), pw(1.0, 50.0), sig(0.5, 2.0);
    std::uniform_int_distribution<int> dim(1, 6), blk(1, 5);
    for (int k = 0; k < n_random; ++k) {
        ScenarioConfig c;
        c.n_tx = dim(rng);
        c.n_rr = dim(rng);
        c.n_cr = dim(rng);
        c.block_len = blk(rng);
        c.theta_t = ang(rng);
        c.theta_r = ang(rng);
        c.theta_t0 = ang(rng);
        c.theta_r0 = ang(rng);
        c.snr_direct_db = snr(rng);
        c.snr_surv_db = snr(rng);
        c.snr_comm_db = snr(rng);
        c.p_total = pw(rng);
        c.sigma2_r = sig(rng);
        c.sigma2_c = sig(rng);
        c.apply_snr_gains();
        out.push_back(c);
    }
    return out;
}

inline CheckResult zero_threshold(int n_random = 10, std::uint64_t seed = 5)
{
    CheckResult r;
    r.tolerance = 1e-8;
    double worst = 0.0;
    int cases = 0;
    for (const auto& cfg : zero_threshold_configs(n_random, seed)) {
        const RadarOperators ops = build_operators(cfg);
        const double oracle = zero_threshold_oracle(cfg);
        const auto chan = sample_channel(cfg, 1);
        const auto params = make_secrecy_params(0.0, cfg.sigma2_r, cfg.sigma2_c, cfg.n_rr, cfg.n_cr);
        const SolverOptions opts;
        for (const auto& res : {algorithm1(chan, ops, cfg, params, opts), algorithm2(chan, ops, cfg, params, opts)}) {
            worst = std::max(worst, std::abs(res.sinr - oracle) / oracle);
            if (!res.feasible || res.achieved_secrecy < 0.0)
                worst = std::max(worst, 1.0);
            ++cases;
        }
    }
    r.worst = worst;
    r.passed = worst <= r.tolerance;
    r.detail = "cases=" + std::to_string(cases);
    return r;
}

// ---------------------------------------------------------------------------
// Extended-precision helpers for the reference side of identity checks. The
// receiver operators reach condition numbers near 1e8, which puts double
// precision log-determinants right at the 1e-8 level.

using xcplx = std::complex<long double>;
using XMat = Eigen::Matrix<xcplx, Eigen::Dynamic, Eigen::Dynamic>;

inline long double logdet_ext(const XMat& m)
{
    Eigen::PartialPivLU<XMat> lu(m);
    const XMat& f = lu.matrixLU();
    long double acc = 0.0L;
    for (Eigen::Index i = 0; i < f.rows(); ++i)
        acc += std::log(std::abs(f(i, i)));
    return acc;
}

// ---------------------------------------------------------------------------
// Receiver identities on random instances:
//   closed-form SINR vs the per-term expression at the optimal weight;
//   ln det(I + D^H s s^H D C(Q)^{-1}) = ln det C(Q)^{-1} + ln det(C(Q) + D^H s s^H D)
//   and 1 + SINR_overlap = det(I + D^H s s^H D C(Q)^{-1}).

inline CheckResult receiver_identities(int n_inst = 100, std::uint64_t seed = 31)
{
    CheckResult r;
    r.tolerance = 1e-8;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double worst_sinr = 0.0, worst_logdet = 0.0, worst_det = 0.0;
    for (int k = 0; k < n_inst; ++k) {
        ScenarioConfig cfg;
        cfg.n_tx = 2 + k % 3;
        cfg.n_rr = 2 + (k / 3) % 3;
        cfg.block_len = 1 + k % 4;
        cfg.theta_t = -60.0 + 120.0 * unif(rng);
        cfg.theta_r = -60.0 + 120.0 * unif(rng);
        cfg.theta_t0 = -60.0 + 120.0 * unif(rng);
        cfg.theta_r0 = -60.0 + 120.0 * unif(rng);
        cfg.sigma2_r = 0.5 + unif(rng);
        const RadarOperators ops = build_operators(cfg);
        const Eigen::Index lnt = cfg.block_len * cfg.n_tx;
        const CVec s = random_vector(rng, lnt, std::sqrt(cfg.p_total * unif(rng) + 0.1));

        // closed form vs per-term evaluation
        const double closed = sinr_nonoverlap(ops, s, cfg.sigma2_r);
        const auto w = optimal_weight(ops.c_mat, ops.d_mat, s);
        const double direct = sinr_nonoverlap_direct(ops, s, w.w, cfg.sigma2_r);
        worst_sinr = std::max(worst_sinr, std::abs(closed - direct) / std::max(closed, 1e-300));

        // log-det split with a covariance, both sides in extended precision
        const CMat q = random_psd(rng, cfg.n_tx, cfg.n_tx, cfg.p_total * unif(rng));
        const CMat c_q = build_c_of_q(ops, q, cfg.sigma2_r);
        const XMat cx = c_q.cast<xcplx>();
        const XMat tx = (ops.d_mat.adjoint() * s).cast<xcplx>();
        const XMat dx = tx * tx.adjoint(); // D^H s s^H D
        const XMat ix = XMat::Identity(cx.rows(), cx.cols());
        const long double lhs = logdet_ext(ix + dx * cx.inverse());
        const long double rhs = logdet_ext(cx + dx) - logdet_ext(cx);
        worst_logdet = std::max(worst_logdet, static_cast<double>(std::abs(lhs - rhs) / std::max<long double>(1.0L, std::abs(lhs))));
        // library overlap SINR: 1 + SINR = det(I + D^H s s^H D C(Q)^{-1})
        const double sinr_ov = sinr_overlap(ops, s, q, cfg.sigma2_r);
        const long double ref = std::expm1(rhs);
        worst_det = std::max(worst_det, static_cast<double>(std::abs(static_cast<long double>(sinr_ov) - ref) / ref));
    }
    r.worst = std::max(worst_sinr, std::max(worst_logdet, worst_det));
    r.passed = r.worst <= r.tolerance;
    std::ostringstream os;
    os << "sinr=" << worst_sinr << " logdet=" << worst_logdet << " det=" << worst_det;
    r.detail = os.str();
    return r;
}

// ---------------------------------------------------------------------------
// CSV self-consistency on a tiny sweep.

inline CheckResult csv_consistency(std::uint64_t seed = 7)
{
    CheckResult r;
    r.tolerance = 1e-9;
    SweepSpec spec;
    spec.thresholds = {0.0, 2.0};
    spec.n_runs = 3;
    spec.base_seed = seed;
    spec.solvers = {SolverKind::alg2};
    const auto res = run_sweep(spec);
    const std::string a = runs_csv(res.records) + summary_csv(res.points);
    const auto again = run_sweep(spec);
    const std::string b = runs_csv(again.records) + summary_csv(again.points);
    double worst = 0.0;
    for (const auto& p : res.points) {
        double sum = 0.0;
        int n = 0;
        for (const auto& rec : res.records)
            if (rec.solver == p.solver && rec.r_m == p.r_m) {
                sum += sinr_db_value(rec.sinr);
                ++n;
            }
        worst = std::max(worst, std::abs(sum / n - p.mean_sinr_db));
    }
    r.worst = worst;
    r.passed = worst <= r.tolerance && a == b;
    r.detail = a == b ? "repeatable" : "outputs differ between runs";
    return r;
}

// The fast suite behind the command line `verify`.
inline std::vector<CheckResult> run_quick_suite()
{
    std::vector<CheckResult> out;
    out.push_back(timed("variational identity", [] { return variational_identity(20, 50); }));
    out.push_back(timed("water-filling optimality", [] { return waterfill_oracle(5, 20000); }));
    out.push_back(timed("algorithm agreement", [] { return algorithm_agreement(3); }));
    out.push_back(timed("zero-threshold closed form", [] { return zero_threshold(3); }));
    out.push_back(timed("receiver identities", [] { return receiver_identities(30); }));
    out.push_back(timed("sweep csv consistency", [] { return csv_consistency(); }));
    return out;
}

} // namespace radcom::verify

#endif // RADCOM_VERIFY_HPP
