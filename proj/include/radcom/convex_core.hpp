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

#ifndef RADCOM_CONVEX_CORE_HPP
#define RADCOM_CONVEX_CORE_HPP

// Log-barrier interior point method for small concave log-det programs over
// Hermitian PSD matrix variables, and the two subproblems built on it:
// trace minimization under a log-det secrecy constraint, and the relaxed
// joint waveform/covariance problem of the shared-resource case.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "radcom/radar_rx.hpp"
#include "radcom/scenario.hpp"
#include "radcom/secrecy.hpp"

namespace radcom {

struct SolverOptions {
    int max_outer_iters = 100; // alternating-optimization rounds
    double tol = 0.01;         // AO stopping tolerance
    double barrier_mu = 10.0;  // barrier parameter growth per stage
    double newton_tol = 1e-7;  // half squared Newton decrement that ends a stage
    int max_newton = 50;       // Newton steps per stage
    double gap_tol = 1e-8;     // final duality-gap bound nu / t, relative to max(1, |objective|)
    double feasibility_cap = 1e6;
};

struct PsdVariable {
    CMat value;
    Eigen::Index dim = 0;
};

inline PsdVariable make_psd_variable(CMat m)
{
    PsdVariable v;
    v.dim = m.rows();
    v.value = hermitian_part(m);
    return v;
}

// Eigenvalue clipping at zero: the Frobenius-nearest PSD matrix.
inline PsdVariable psd_project(const CMat& m)
{
    require_hermitian(m, "psd_project");
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(m));
    const RVec ev = es.eigenvalues();
    if (ev.size() == 0 || ev.minCoeff() >= 0.0)
        return make_psd_variable(m);
    const RVec clipped = ev.cwiseMax(0.0);
    return make_psd_variable(es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().adjoint());
}

// Gradient of ln det(H Q H^H + sigma2 I) with respect to Q:
// H^H (H Q H^H + sigma2 I)^{-1} H.
inline CMat logdet_gradient(const CMat& h, const CMat& q, double sigma2)
{
    const CMat m = h * q * h.adjoint() + sigma2 * CMat::Identity(h.rows(), h.rows());
    const auto llt = hpd_factor(m);
    return hermitian_part(h.adjoint() * llt.solve(h));
}

// One record per Newton step.
struct IterationRecord {
    int stage = 0;
    int iteration = 0;
    double barrier_t = 0.0;
    double objective = 0.0;
    double barrier_value = 0.0;
    double min_slack = 0.0;
    double step = 0.0;
    double decrement = 0.0; // squared Newton decrement before the step
};

using TraceSink = std::function<void(const IterationRecord&)>;

// ---------------------------------------------------------------------------
// Hermitian coordinates

// Real coordinates for a tuple of Hermitian blocks. Within a block of size
// d: d diagonal entries, then (Re, Im) of each strictly upper entry.
class HermitianSpace {
public:
    explicit HermitianSpace(std::vector<Eigen::Index> dims) : dims_(std::move(dims))
    {
        offsets_.reserve(dims_.size());
        Eigen::Index off = 0;
        for (auto d : dims_) {
            offsets_.push_back(off);
            off += d * d;
        }
        size_ = off;
    }

    Eigen::Index size() const { return size_; }
    std::size_t blocks() const { return dims_.size(); }
    Eigen::Index dim(std::size_t b) const { return dims_[b]; }
    Eigen::Index offset(std::size_t b) const { return offsets_[b]; }

    struct Entry {
        enum Kind { diag, re, im } kind;
        Eigen::Index i, j;
    };

    static Entry entry(Eigen::Index d, Eigen::Index k)
    {
        if (k < d)
            return {Entry::diag, k, k};
        k -= d;
        const Eigen::Index pair = k / 2;
        // enumerate (i, j), i < j, row-major
        Eigen::Index i = 0, rem = pair;
        while (rem >= d - 1 - i) {
            rem -= d - 1 - i;
            ++i;
        }
        return {k % 2 == 0 ? Entry::re : Entry::im, i, i + 1 + rem};
    }

    CMat block_matrix(const RVec& x, std::size_t b) const
    {
        const Eigen::Index d = dims_[b];
        CMat m = CMat::Zero(d, d);
        for (Eigen::Index k = 0; k < d * d; ++k) {
            const double v = x(offsets_[b] + k);
            const Entry e = entry(d, k);
            switch (e.kind) {
            case Entry::diag: m(e.i, e.i) += v; break;
            case Entry::re:
                m(e.i, e.j) += v;
                m(e.j, e.i) += v;
                break;
            case Entry::im:
                m(e.i, e.j) += cplx(0.0, v);
                m(e.j, e.i) -= cplx(0.0, v);
                break;
            }
        }
        return m;
    }

    void set_block(RVec& x, std::size_t b, const CMat& m) const
    {
        const Eigen::Index d = dims_[b];
        for (Eigen::Index k = 0; k < d * d; ++k) {
            const Entry e = entry(d, k);
            double v = 0.0;
            switch (e.kind) {
            case Entry::diag: v = m(e.i, e.i).real(); break;
            case Entry::re: v = 0.5 * (m(e.i, e.j).real() + m(e.j, e.i).real()); break;
            case Entry::im: v = 0.5 * (m(e.i, e.j).imag() - m(e.j, e.i).imag()); break;
            }
            x(offsets_[b] + k) = v;
        }
    }

    // Coordinates of G as a linear functional: k -> Re tr(G B_k).
    RVec functional(std::size_t b, const CMat& g) const
    {
        const Eigen::Index d = dims_[b];
        RVec out(d * d);
        for (Eigen::Index k = 0; k < d * d; ++k) {
            const Entry e = entry(d, k);
            switch (e.kind) {
            case Entry::diag: out(k) = g(e.i, e.i).real(); break;
            case Entry::re: out(k) = (g(e.i, e.j) + g(e.j, e.i)).real(); break;
            case Entry::im: out(k) = (cplx(0.0, 1.0) * (g(e.j, e.i) - g(e.i, e.j))).real(); break;
            }
        }
        return out;
    }

    // A B_k A^H for one basis element.
    static CMat congruence(const CMat& a, Eigen::Index d, Eigen::Index k)
    {
        const Entry e = entry(d, k);
        const CVec ai = a.col(e.i);
        switch (e.kind) {
        case Entry::diag: return ai * ai.adjoint();
        case Entry::re: {
            const CVec aj = a.col(e.j);
            const CMat t = ai * aj.adjoint();
            return t + t.adjoint();
        }
        case Entry::im: {
            const CVec aj = a.col(e.j);
            const CMat t = cplx(0.0, 1.0) * (ai * aj.adjoint());
            return t + t.adjoint();
        }
        }
        return {};
    }

private:
    std::vector<Eigen::Index> dims_;
    std::vector<Eigen::Index> offsets_;
    Eigen::Index size_ = 0;
};

// X_b -> sum_a A_a X_b A_a^H
struct BlockMap {
    std::size_t block = 0;
    std::vector<CMat> factors;
};

// weight * ln det(M0 + sum_k x_k Img_k) with the images precomputed.
struct LogDetTerm {
    double weight = 1.0;
    CMat m0;
    std::vector<Eigen::Index> support;
    std::vector<CMat> images;

    LogDetTerm(const HermitianSpace& space, CMat base, const std::vector<BlockMap>& maps, double w = 1.0)
        : weight(w), m0(std::move(base))
    {
        for (const auto& map : maps) {
            const Eigen::Index d = space.dim(map.block);
            for (Eigen::Index k = 0; k < d * d; ++k) {
                CMat img = CMat::Zero(m0.rows(), m0.cols());
                for (const auto& a : map.factors)
                    img += HermitianSpace::congruence(a, d, k);
                const Eigen::Index idx = space.offset(map.block) + k;
                auto it = std::find(support.begin(), support.end(), idx);
                if (it == support.end()) {
                    support.push_back(idx);
                    images.push_back(std::move(img));
                } else {
                    images[static_cast<std::size_t>(it - support.begin())] += img;
                }
            }
        }
    }

    CMat matrix(const RVec& x) const
    {
        CMat m = m0;
        for (std::size_t s = 0; s < support.size(); ++s)
            if (x(support[s]) != 0.0)
                m += x(support[s]) * images[s];
        return m;
    }
};

namespace detail {

// Adds weight * ln det(M(x)) and its derivatives. False outside the domain.
inline bool accumulate_logdet(const LogDetTerm& term, const RVec& x, double& value, RVec* grad, RMat* hess)
{
    const CMat m = hermitian_part(term.matrix(x));
    Eigen::LLT<CMat> llt(m);
    if (llt.info() != Eigen::Success)
        return false;
    const RVec diag = llt.matrixLLT().diagonal().real();
    if (!(diag.minCoeff() > 0.0) || !std::isfinite(diag.maxCoeff()))
        return false;
    value += term.weight * 2.0 * diag.array().log().sum();
    if (!grad && !hess)
        return true;
    const CMat minv = llt.solve(CMat::Identity(m.rows(), m.cols()));
    std::vector<CMat> w;
    if (hess)
        w.reserve(term.support.size());
    for (std::size_t s = 0; s < term.support.size(); ++s) {
        if (grad)
            (*grad)(term.support[s]) += term.weight * trace_product_real(minv, term.images[s]);
        if (hess)
            w.push_back(minv * term.images[s]);
    }
    if (hess) {
        for (std::size_t a = 0; a < w.size(); ++a) {
            for (std::size_t b = a; b < w.size(); ++b) {
                const double h = -term.weight * trace_product_real(w[a], w[b]);
                (*hess)(term.support[a], term.support[b]) += h;
                if (a != b)
                    (*hess)(term.support[b], term.support[a]) += h;
            }
        }
    }
    return true;
}

} // namespace detail

// sum of weighted log-dets + linear + constant; concave when all weights > 0.
struct ConcaveFunction {
    std::vector<LogDetTerm> logdets;
    RVec linear;
    double constant = 0.0;

    // Returns nullopt outside the domain (some log-det argument not PD).
    std::optional<double> evaluate(const RVec& x, RVec* grad = nullptr, RMat* hess = nullptr) const
    {
        double value = constant + (linear.size() ? linear.dot(x) : 0.0);
        if (grad)
            *grad = linear.size() ? linear : RVec::Zero(x.size());
        if (hess)
            hess->setZero(x.size(), x.size());
        for (const auto& term : logdets)
            if (!detail::accumulate_logdet(term, x, value, grad, hess))
                return std::nullopt;
        return value;
    }
};

// maximize objective(x) s.t. constraints[i](x) >= 0, every block PSD.
struct ConvexProgram {
    HermitianSpace space;
    ConcaveFunction objective;
    std::vector<ConcaveFunction> constraints;

    explicit ConvexProgram(HermitianSpace s) : space(std::move(s)) {}

    double barrier_degree() const
    {
        double nu = static_cast<double>(constraints.size());
        for (std::size_t b = 0; b < space.blocks(); ++b)
            nu += static_cast<double>(space.dim(b));
        for (const auto& c : constraints)
            for (const auto& term : c.logdets)
                nu += static_cast<double>(term.m0.rows());
        return nu;
    }
};

enum class BarrierStatus { converged, stalled, not_converged };

struct BarrierResult {
    RVec x;
    BarrierStatus status = BarrierStatus::not_converged;
    double t = 0.0;
    double objective = 0.0;
    double gap_bound = 0.0;
    RVec constraint_values;
    int newton_iters = 0;
    bool stopped_early = false;
};

namespace detail {

class BarrierEvaluator {
public:
    explicit BarrierEvaluator(const ConvexProgram& prog) : prog_(prog)
    {
        psd_terms_.reserve(prog.space.blocks());
        for (std::size_t b = 0; b < prog.space.blocks(); ++b) {
            const Eigen::Index d = prog.space.dim(b);
            psd_terms_.emplace_back(prog.space, CMat::Zero(d, d),
                                    std::vector<BlockMap>{{b, {CMat::Identity(d, d)}}});
        }
        // -ln(ln det A - y) alone is not self-concordant; together with
        // -ln det A it is the barrier of the log-det hypograph.
        for (const auto& c : prog.constraints)
            for (const auto& term : c.logdets) {
                psd_terms_.push_back(term);
                psd_terms_.back().weight = 1.0;
            }
    }

    // t * (-objective) - sum ln c_i - sum ln det X_b
    std::optional<double> value(const RVec& x, double t, RVec* grad, RMat* hess, double* obj_out = nullptr,
                                RVec* cons_out = nullptr) const
    {
        const Eigen::Index n = x.size();
        RVec g_obj, g_tmp;
        RMat h_obj, h_tmp;
        auto obj = prog_.objective.evaluate(x, grad ? &g_obj : nullptr, hess ? &h_obj : nullptr);
        if (!obj)
            return std::nullopt;
        double f = -t * (*obj);
        if (grad)
            *grad = -t * g_obj;
        if (hess)
            *hess = -t * h_obj;
        if (cons_out)
            cons_out->resize(static_cast<Eigen::Index>(prog_.constraints.size()));
        for (std::size_t i = 0; i < prog_.constraints.size(); ++i) {
            auto c = prog_.constraints[i].evaluate(x, grad ? &g_tmp : nullptr, hess ? &h_tmp : nullptr);
            if (!c || !(*c > 0.0))
                return std::nullopt;
            if (cons_out)
                (*cons_out)(static_cast<Eigen::Index>(i)) = *c;
            f -= std::log(*c);
            if (grad)
                *grad -= g_tmp / *c;
            if (hess)
                *hess += (g_tmp * g_tmp.transpose()) / (*c * *c) - h_tmp / *c;
        }
        for (const auto& term : psd_terms_) {
            double ld = 0.0;
            if (grad)
                g_tmp.setZero(n);
            if (hess)
                h_tmp.setZero(n, n);
            if (!accumulate_logdet(term, x, ld, grad ? &g_tmp : nullptr, hess ? &h_tmp : nullptr))
                return std::nullopt;
            f -= ld;
            if (grad)
                *grad -= g_tmp;
            if (hess)
                *hess -= h_tmp;
        }
        if (obj_out)
            *obj_out = *obj;
        return f;
    }

private:
    const ConvexProgram& prog_;
    std::vector<LogDetTerm> psd_terms_;
};

} // namespace detail

// Barrier path following from a strictly feasible x0. `early_stop`, when
// given, is checked after each Newton step on (objective, x) and ends the
// solve successfully when it returns true.
inline BarrierResult solve_barrier(const ConvexProgram& prog, const RVec& x0, const SolverOptions& opts,
                                   const TraceSink& sink = {},
                                   const std::function<bool(double, const RVec&)>& early_stop = {})
{
    constexpr double kArmijo = 1e-4;
    constexpr double kShrink = 0.5;

    detail::BarrierEvaluator eval(prog);
    const double nu = prog.barrier_degree();

    BarrierResult res;
    res.x = x0;
    if (!eval.value(res.x, 1.0, nullptr, nullptr))
        throw Error(ErrorCode::invalid_argument, "solve_barrier: start point is not strictly feasible");

    // Start at the t for which x0 is closest to centered (least squares in
    // the barrier's local norm), never above 1. A start far from the
    // optimum then costs O(nu) damped steps instead of O(objective gap).
    double t = 1.0;
    {
        RVec g0, g1;
        RMat h0, h1;
        eval.value(res.x, 0.0, &g0, &h0);
        eval.value(res.x, 1.0, &g1, &h1);
        const RVec g_obj = g1 - g0;
        Eigen::LDLT<RMat> ldlt(h0);
        if (ldlt.info() == Eigen::Success) {
            const RVec hg = ldlt.solve(g_obj);
            const double den = g_obj.dot(hg);
            const double ts = den > 0.0 ? -g0.dot(hg) / den : 0.0;
            if (std::isfinite(ts) && ts > 0.0)
                t = std::clamp(ts, 1e-8, 1.0);
        }
    }

    const int max_stages =
        static_cast<int>(std::ceil(std::log(nu / (t * opts.gap_tol)) / std::log(opts.barrier_mu))) + 2;
    bool last_stage_centered = false;

    for (int stage = 0; stage < max_stages; ++stage) {
        last_stage_centered = false;
        for (int it = 0; it < opts.max_newton; ++it) {
            RVec g;
            RMat h;
            double obj = 0.0;
            RVec cons;
            const auto f = eval.value(res.x, t, &g, &h, &obj, &cons);
            if (!f)
                throw Error(ErrorCode::not_converged, "solve_barrier: iterate left the domain");
            res.objective = obj;
            res.constraint_values = cons;

            if (early_stop && early_stop(obj, res.x)) {
                res.t = t;
                res.status = BarrierStatus::converged;
                res.stopped_early = true;
                res.gap_bound = nu / t;
                return res;
            }

            Eigen::LDLT<RMat> ldlt(h);
            RVec dx = ldlt.solve(-g);
            if (ldlt.info() != Eigen::Success || !dx.allFinite()) {
                const double reg = 1e-12 * std::max(1.0, h.diagonal().cwiseAbs().maxCoeff());
                Eigen::LDLT<RMat> ldlt2(h + reg * RMat::Identity(h.rows(), h.cols()));
                dx = ldlt2.solve(-g);
            }
            const double dec2 = -g.dot(dx);
            if (dec2 / 2.0 <= opts.newton_tol || !(dec2 > 0.0)) {
                last_stage_centered = true;
                break;
            }

            // Below `noise` the barrier values no longer resolve the Armijo
            // decrease; there the slope along dx at the trial point decides.
            const double noise = 1e-12 * (1.0 + std::abs(*f));
            double step = 1.0;
            bool accepted = false;
            while (step > 1e-16) {
                const RVec trial = res.x + step * dx;
                const auto ft = eval.value(trial, t, nullptr, nullptr);
                bool ok = ft && *ft <= *f - kArmijo * step * dec2;
                if (!ok && ft && kArmijo * step * dec2 < noise && *ft <= *f + noise) {
                    RVec gt;
                    if (eval.value(trial, t, &gt, nullptr))
                        ok = gt.dot(dx) <= 0.5 * dec2;
                }
                if (ok) {
                    res.x = trial;
                    accepted = true;
                    if (sink)
                        sink({stage, it, t, obj, *ft, cons.size() ? cons.minCoeff() : 0.0, step, dec2});
                    break;
                }
                step *= kShrink;
            }
            ++res.newton_iters;
            // Rounding noise blocks progress. Inside the unit Dikin ellipsoid
            // (decrement below 1) the point is close enough to the center.
            if (!accepted || step < 1e-3) {
                last_stage_centered = dec2 < 1.0;
                if (!accepted || last_stage_centered)
                    break;
            }
        }
        if (nu / t <= opts.gap_tol * std::max(1.0, std::abs(res.objective)))
            break;
        t *= opts.barrier_mu;
    }

    // Final bookkeeping at the returned point.
    double obj = 0.0;
    RVec cons;
    eval.value(res.x, t, nullptr, nullptr, &obj, &cons);
    res.objective = obj;
    res.constraint_values = cons;
    res.t = t;
    res.gap_bound = nu / t;
    res.status = last_stage_centered ? BarrierStatus::converged : BarrierStatus::stalled;
    if (!last_stage_centered && res.gap_bound > 1e3 * opts.gap_tol * std::max(1.0, std::abs(obj)))
        res.status = BarrierStatus::not_converged;
    return res;
}

namespace detail {

// Finds a point with constraints[which] > 0 starting from x0, which must be
// strictly feasible for every other constraint. Returns nullopt when the
// supremum of that constraint over the remaining feasible set is <= 0.
inline std::optional<RVec> phase_one(const ConvexProgram& prog, std::size_t which, const RVec& x0,
                                     const SolverOptions& opts, double target_slack)
{
    ConvexProgram p1(prog.space);
    p1.objective = prog.constraints[which];
    for (std::size_t i = 0; i < prog.constraints.size(); ++i)
        if (i != which)
            p1.constraints.push_back(prog.constraints[i]);

    SolverOptions o = opts;
    o.gap_tol = std::max(opts.gap_tol, 1e-8);
    const auto res = solve_barrier(p1, x0, o, {}, [&](double obj, const RVec&) { return obj >= target_slack; });
    if (res.objective > 0.0)
        return res.x;
    return std::nullopt;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Trace minimization under the linearized secrecy constraint

struct MinTraceResult {
    PsdVariable q_c;
    double lambda = 0.0;     // multiplier estimate of the secrecy constraint
    double gap_bound = 0.0;  // nu / t at termination
    double constraint = 0.0; // constraint value at q_c, nats above the threshold
    int newton_iters = 0;
};

// Value of the linearized constraint (nats), threshold not subtracted:
//   ln det(Hc Q Hc^H + sc I) - tr(Y (Hd Q Hd^H + sr I)) + ln det Y + n_bar.
inline double linearized_secrecy_nats(const CMat& h_c, const CMat& h_d, const CMat& y_mat, const CMat& q_c,
                                      const SecrecyConstraintParams& params, double sigma2_c, double sigma2_r)
{
    const CMat kc = h_c * q_c * h_c.adjoint() + sigma2_c * CMat::Identity(h_c.rows(), h_c.rows());
    const CMat kd = h_d * q_c * h_d.adjoint() + sigma2_r * CMat::Identity(h_d.rows(), h_d.rows());
    return hpd_logdet(kc) - trace_product_real(y_mat, kd) + hpd_logdet(y_mat) + params.n_bar;
}

// min tr(Q) s.t. linearized secrecy >= r_bar, Q PSD. Throws infeasible when
// the constraint cannot be met with tr(Q) below the feasibility cap.
inline MinTraceResult solve_min_trace_logdet(const CMat& h_c, const CMat& h_d, const CMat& y_mat,
                                             const SecrecyConstraintParams& params, double sigma2_c,
                                             double sigma2_r, double p_total, const SolverOptions& opts,
                                             const TraceSink& sink = {})
{
    require_psd(y_mat, "solve_min_trace_logdet");
    const Eigen::Index nt = h_c.cols();
    const Eigen::Index m = h_c.rows();
    HermitianSpace space({nt});
    const Eigen::Index n = space.size();

    ConvexProgram prog(space);
    prog.objective.linear = -space.functional(0, CMat::Identity(nt, nt));

    ConcaveFunction secrecy;
    secrecy.logdets.emplace_back(space, sigma2_c * CMat::Identity(m, m), std::vector<BlockMap>{{0, {h_c}}});
    secrecy.linear = -space.functional(0, hermitian_part(h_d.adjoint() * y_mat * h_d));
    secrecy.constant = -sigma2_r * trace_real(y_mat) + hpd_logdet(y_mat) + params.n_bar - params.r_bar;
    prog.constraints.push_back(secrecy);

    ConcaveFunction cap;
    cap.linear = -space.functional(0, CMat::Identity(nt, nt));
    cap.constant = opts.feasibility_cap;
    prog.constraints.push_back(cap);

    RVec x0 = RVec::Zero(n);
    space.set_block(x0, 0, (p_total / (10.0 * static_cast<double>(nt))) * CMat::Identity(nt, nt));

    auto slack = secrecy.evaluate(x0);
    if (!slack || !(*slack > 0.0)) {
        auto start = detail::phase_one(prog, 0, x0, opts, 1e-3 * (1.0 + std::abs(params.r_bar)));
        if (!start)
            throw Error(ErrorCode::infeasible, "solve_min_trace_logdet: secrecy constraint cannot be met");
        x0 = *start;
    }

    const auto res = solve_barrier(prog, x0, opts, sink);
    if (res.status == BarrierStatus::not_converged)
        throw Error(ErrorCode::not_converged, "solve_min_trace_logdet: barrier method did not converge");

    MinTraceResult out;
    out.q_c = psd_project(space.block_matrix(res.x, 0));
    out.constraint = res.constraint_values(0);
    out.lambda = 1.0 / (res.t * res.constraint_values(0));
    out.gap_bound = res.gap_bound;
    out.newton_iters = res.newton_iters;
    return out;
}

// ---------------------------------------------------------------------------
// Relaxed shared-resource subproblem

struct OverlapInnerResult {
    PsdVariable s_bar;
    PsdVariable q_c;
    double objective = 0.0;       // ln det(C(Q) + D^H S D) - tr(X C(Q))
    double constraint = 0.0;      // secrecy surrogate minus r_hat (nats); +inf when dropped
    double secrecy_multiplier = 0.0;
    double power_multiplier = 0.0;
    double gap_bound = 0.0;
    int newton_iters = 0;
};

// Everything the relaxed subproblem needs besides the auxiliary matrices.
struct OverlapProblemData {
    const RadarOperators* ops = nullptr;
    CMat h_c;
    CMat h_d;
    double sigma2_c = 1.0;
    double sigma2_r = 1.0;
    Eigen::Index block_len = 1;
};

namespace detail {

inline std::vector<CMat> column_blocks(const CMat& a, Eigen::Index L, Eigen::Index width)
{
    std::vector<CMat> out;
    out.reserve(static_cast<std::size_t>(L));
    for (Eigen::Index l = 0; l < L; ++l)
        out.push_back(a.middleCols(l * width, width));
    return out;
}

// Coordinates of Q -> tr(G * sum_l A_l Q A_l^H).
inline RVec repeated_functional(const HermitianSpace& space, std::size_t block, const std::vector<CMat>& factors,
                                const CMat& g)
{
    CMat acc = CMat::Zero(factors.front().cols(), factors.front().cols());
    for (const auto& a : factors)
        acc += a.adjoint() * g * a;
    return space.functional(block, hermitian_part(acc));
}

struct OverlapProgramParts {
    ConcaveFunction objective;
    ConcaveFunction secrecy; // threshold included
    ConcaveFunction power;
};

inline OverlapProgramParts build_overlap_parts(const HermitianSpace& space, const OverlapProblemData& data,
                                               const CMat& x_mat, const CMat& ybar_mat, const CMat& z_mat,
                                               double r_hat, double p_total)
{
    const RadarOperators& ops = *data.ops;
    const Eigen::Index L = data.block_len;
    const Eigen::Index lnt = space.dim(0);
    const Eigen::Index nt = space.dim(1);
    const Eigen::Index n = space.size();
    const Eigen::Index ln = ops.c_mat.rows();

    const CMat as_ad = ops.as_ad();
    const auto interference = column_blocks(as_ad, L, nt);
    const CMat hbar_c = block_diag_repeat(L, data.h_c);
    const CMat hbar_d = block_diag_repeat(L, data.h_d);
    const auto hc_blocks = column_blocks(hbar_c, L, nt);
    const auto hd_blocks = column_blocks(hbar_d, L, nt);
    const Eigen::Index lm = hbar_c.rows();
    const Eigen::Index lnr = hbar_d.rows();

    OverlapProgramParts parts;

    // ln det(C(Q) + D^H S D) - tr(X C(Q))
    const CMat c0 = data.sigma2_r * ops.c_mat;
    parts.objective.logdets.emplace_back(
        space, c0, std::vector<BlockMap>{{0, {ops.d_mat.adjoint()}}, {1, interference}});
    parts.objective.linear = RVec::Zero(n);
    parts.objective.linear.segment(space.offset(1), nt * nt) =
        -repeated_functional(space, 1, interference, x_mat);
    parts.objective.constant = -trace_product_real(x_mat, c0);

    // ln det(Hc(S + I(x)Q)Hc^H + sc I) + ln det Ybar - tr(Ybar(Hd(S + I(x)Q)Hd^H + sr I)) + LN
    //   + ln det(Hd S Hd^H + sr I) + ln det Z - tr(Z(Hc S Hc^H + sc I)) + LM - r_hat
    parts.secrecy.logdets.emplace_back(space, data.sigma2_c * CMat::Identity(lm, lm),
                                       std::vector<BlockMap>{{0, {hbar_c}}, {1, hc_blocks}});
    parts.secrecy.logdets.emplace_back(space, data.sigma2_r * CMat::Identity(lnr, lnr),
                                       std::vector<BlockMap>{{0, {hbar_d}}});
    parts.secrecy.linear = RVec::Zero(n);
    parts.secrecy.linear.segment(space.offset(0), lnt * lnt) =
        -space.functional(0, hermitian_part(hbar_d.adjoint() * ybar_mat * hbar_d)) -
        space.functional(0, hermitian_part(hbar_c.adjoint() * z_mat * hbar_c));
    parts.secrecy.linear.segment(space.offset(1), nt * nt) = -repeated_functional(space, 1, hd_blocks, ybar_mat);
    parts.secrecy.constant = hpd_logdet(ybar_mat) - data.sigma2_r * trace_real(ybar_mat) +
                             static_cast<double>(lnr) + hpd_logdet(z_mat) - data.sigma2_c * trace_real(z_mat) +
                             static_cast<double>(lm) - r_hat;
    (void)ln;

    // P_T - tr(S) - tr(Q)
    parts.power.linear = RVec::Zero(n);
    parts.power.linear.segment(space.offset(0), lnt * lnt) = -space.functional(0, CMat::Identity(lnt, lnt));
    parts.power.linear.segment(space.offset(1), nt * nt) = -space.functional(1, CMat::Identity(nt, nt));
    parts.power.constant = p_total;
    return parts;
}

} // namespace detail

// Value of the relaxed-subproblem secrecy surrogate (nats, threshold not
// subtracted) at (S, Q) for fixed auxiliary matrices.
inline double overlap_secrecy_surrogate(const OverlapProblemData& data, const CMat& ybar_mat, const CMat& z_mat,
                                        const CMat& s_bar, const CMat& q_c)
{
    const Eigen::Index L = data.block_len;
    const CMat hbar_c = block_diag_repeat(L, data.h_c);
    const CMat hbar_d = block_diag_repeat(L, data.h_d);
    const CMat total = s_bar + block_diag_repeat(L, q_c);
    const Eigen::Index lm = hbar_c.rows();
    const Eigen::Index lnr = hbar_d.rows();
    const CMat ic = CMat::Identity(lm, lm);
    const CMat id = CMat::Identity(lnr, lnr);
    return hpd_logdet(hbar_c * total * hbar_c.adjoint() + data.sigma2_c * ic) + hpd_logdet(ybar_mat) -
           trace_product_real(ybar_mat, hbar_d * total * hbar_d.adjoint() + data.sigma2_r * id) +
           static_cast<double>(lnr) + hpd_logdet(hbar_d * s_bar * hbar_d.adjoint() + data.sigma2_r * id) +
           hpd_logdet(z_mat) - trace_product_real(z_mat, hbar_c * s_bar * hbar_c.adjoint() + data.sigma2_c * ic) +
           static_cast<double>(lm);
}

// ln det(C(Q) + D^H S D) - tr(X C(Q)).
inline double overlap_inner_objective(const OverlapProblemData& data, const CMat& x_mat, const CMat& s_bar,
                                      const CMat& q_c)
{
    const CMat cq = build_c_of_q(*data.ops, q_c, data.sigma2_r);
    return hpd_logdet(cq + data.ops->d_mat.adjoint() * s_bar * data.ops->d_mat) -
           trace_product_real_extended(x_mat, cq);
}

// Maximizes the relaxed objective over (S, Q) PSD subject to the secrecy
// surrogate >= r_hat and tr(S) + tr(Q) <= p_total. With r_hat <= 0 the
// secrecy constraint is vacuous (the clipped secrecy rate is never negative)
// and is dropped. `start` (S, Q), when given, seeds the interior start.
inline OverlapInnerResult solve_overlap_inner(const OverlapProblemData& data, const CMat& x_mat,
                                              const CMat& ybar_mat, const CMat& z_mat, double r_hat,
                                              double p_total, const SolverOptions& opts,
                                              const std::optional<std::pair<CMat, CMat>>& start = std::nullopt,
                                              const TraceSink& sink = {})
{
    require_psd(x_mat, "solve_overlap_inner: X");
    require_psd(ybar_mat, "solve_overlap_inner: Ybar");
    require_psd(z_mat, "solve_overlap_inner: Z");
    if (!(p_total > 0.0))
        throw Error(ErrorCode::invalid_argument, "solve_overlap_inner: p_total must be > 0");

    const Eigen::Index nt = data.h_c.cols();
    const Eigen::Index lnt = data.block_len * nt;
    HermitianSpace space({lnt, nt});
    auto parts = detail::build_overlap_parts(space, data, x_mat, ybar_mat, z_mat, r_hat, p_total);
    const bool with_secrecy = r_hat > 0.0;

    ConvexProgram prog(space);
    prog.objective = parts.objective;
    if (with_secrecy)
        prog.constraints.push_back(parts.secrecy);
    prog.constraints.push_back(parts.power);

    // Interior start: blend of the seed and a scaled identity at half budget.
    const double kappa = p_total / (2.0 * static_cast<double>(lnt + nt));
    CMat s0 = kappa * CMat::Identity(lnt, lnt);
    CMat q0 = kappa * CMat::Identity(nt, nt);
    if (start) {
        s0 = 0.9 * start->first + 0.1 * s0;
        q0 = 0.9 * start->second + 0.1 * q0;
        const double tr = trace_real(s0) + trace_real(q0);
        if (tr >= 0.99 * p_total) {
            s0 *= 0.95 * p_total / tr;
            q0 *= 0.95 * p_total / tr;
        }
    }
    RVec x0 = RVec::Zero(space.size());
    space.set_block(x0, 0, s0);
    space.set_block(x0, 1, q0);

    if (with_secrecy) {
        auto slack = parts.secrecy.evaluate(x0);
        if (!slack || !(*slack > 0.0)) {
            auto found = detail::phase_one(prog, 0, x0, opts, 1e-3 * (1.0 + std::abs(r_hat)));
            if (!found)
                throw Error(ErrorCode::infeasible, "solve_overlap_inner: secrecy constraint cannot be met");
            x0 = *found;
        }
    }

    const auto res = solve_barrier(prog, x0, opts, sink);
    if (res.status == BarrierStatus::not_converged)
        throw Error(ErrorCode::not_converged, "solve_overlap_inner: barrier method did not converge");

    OverlapInnerResult out;
    out.s_bar = psd_project(space.block_matrix(res.x, 0));
    out.q_c = psd_project(space.block_matrix(res.x, 1));
    out.objective = res.objective;
    out.gap_bound = res.gap_bound;
    out.newton_iters = res.newton_iters;
    if (with_secrecy) {
        out.constraint = res.constraint_values(0);
        out.secrecy_multiplier = 1.0 / (res.t * res.constraint_values(0));
        out.power_multiplier = 1.0 / (res.t * res.constraint_values(1));
    } else {
        out.constraint = std::numeric_limits<double>::infinity();
        out.power_multiplier = 1.0 / (res.t * res.constraint_values(0));
    }
    return out;
}

} // namespace radcom

#endif // RADCOM_CONVEX_CORE_HPP
