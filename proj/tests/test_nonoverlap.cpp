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

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace radcom {
namespace {

using testing::gaussian_matrix;
using testing::max_abs;
using testing::random_psd;

TEST(UpdateY, ZeroCovarianceUnitNoise)
{
    std::mt19937_64 rng(1);
    const CMat hd = gaussian_matrix(rng, 4, 4);
    EXPECT_LT(max_abs(update_y(hd, CMat::Zero(4, 4), 1.0) - CMat::Identity(4, 4)), 1e-15);
}

TEST(UpdateY, InverseContractAndBracketValue)
{
    std::mt19937_64 rng(2);
    for (int k = 0; k < 20; ++k) {
        const CMat hd = gaussian_matrix(rng, 4, 4, 3.0);
        const CMat q = random_psd(rng, 4, 1 + k % 4, 10.0);
        const double s2 = 0.5 + 0.1 * k;
        const CMat kmat = hd * q * hd.adjoint() + s2 * CMat::Identity(4, 4);
        const CMat y = update_y(hd, q, s2);
        EXPECT_LT(max_abs(y * kmat - CMat::Identity(4, 4)), 1e-10);
        EXPECT_NEAR(variational_bracket(hd, q, y, s2), hpd_logdet(y), 1e-10 * std::max(1.0, std::abs(hpd_logdet(y))));
    }
}

TEST(Waterfill, AllLevelsClippedBelowThreshold)
{
    std::mt19937_64 rng(3);
    const CMat hc = gaussian_matrix(rng, 4, 4);
    const CMat hd = gaussian_matrix(rng, 4, 4);
    const CMat y = CMat::Identity(4, 4);
    const auto probe = waterfill_qc(1.0, y, hc, hd, 1.0);
    // d_i depend on lambda through P; pick lambda below sigma2 / d_max^2 at that lambda
    double lam = 1.0;
    for (int it = 0; it < 60; ++it) {
        const auto s = waterfill_qc(lam, y, hc, hd, 1.0);
        const double limit = 1.0 / (s.d_vals(0) * s.d_vals(0));
        if (lam <= limit)
            break;
        lam *= 0.5;
    }
    const auto sol = waterfill_qc(lam, y, hc, hd, 1.0);
    EXPECT_LE(lam, 1.0 / (sol.d_vals(0) * sol.d_vals(0)));
    EXPECT_EQ(sol.q_c.norm(), 0.0);
    EXPECT_GT(probe.d_vals.size(), 0);
}

TEST(Waterfill, ScalarClosedForm)
{
    const cplx hc(1.3, -0.4), hd(0.2, 0.5);
    const double y = 0.8, lambda = 2.5, s2c = 0.7;
    CMat hcm(1, 1), hdm(1, 1), ym(1, 1);
    hcm(0, 0) = hc;
    hdm(0, 0) = hd;
    ym(0, 0) = y;
    const auto sol = waterfill_qc(lambda, ym, hcm, hdm, s2c);
    const double p = 1.0 + lambda * y * std::norm(hd);
    const double d2 = std::norm(hc) / p;
    const double expected = std::max(0.0, lambda - s2c / d2) / p;
    EXPECT_NEAR(sol.q_c(0, 0).real(), expected, 1e-13);
    EXPECT_NEAR(sol.q_c(0, 0).imag(), 0.0, 1e-15);
}

TEST(Waterfill, StructuralInvariants)
{
    std::mt19937_64 rng(4);
    for (int k = 0; k < 20; ++k) {
        const Eigen::Index m = 2 + k % 3, nt = 4;
        const CMat hc = gaussian_matrix(rng, m, nt);
        const CMat hd = gaussian_matrix(rng, 4, nt);
        const CMat y = update_y(hd, random_psd(rng, nt, 2, 3.0), 1.0);
        const double lambda = 0.5 + 0.3 * k;
        const double s2c = 0.8;
        const auto sol = waterfill_qc(lambda, y, hc, hd, s2c);
        ASSERT_EQ(sol.d_vals.size(), std::min(m, nt));
        for (Eigen::Index i = 1; i < sol.d_vals.size(); ++i)
            EXPECT_GE(sol.d_vals(i - 1), sol.d_vals(i));
        for (Eigen::Index i = 0; i < sol.d_vals.size(); ++i)
            EXPECT_NEAR(sol.mu_vals(i), std::max(0.0, lambda - s2c / (sol.d_vals(i) * sol.d_vals(i))), 1e-12);
        EXPECT_TRUE(is_psd(sol.q_c));
        EXPECT_LT(max_abs(sol.p_inv_sqrt * sol.p_mat * sol.p_inv_sqrt - CMat::Identity(nt, nt)), 1e-10);
    }
}

TEST(Waterfill, BeatsRandomCovariances)
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const CMat hc = gaussian_matrix(rng, 4, 4);
    const CMat hd = gaussian_matrix(rng, 4, 4, 0.5);
    const CMat y = update_y(hd, random_psd(rng, 4, 4, 2.0), 1.0);
    const auto params = make_secrecy_params(2.0, 1.0, 1.0, 4, 4);
    const double lambda = 3.0;
    const auto sol = waterfill_qc(lambda, y, hc, hd, 1.0);
    const double best = secrecy_lagrangian(sol.q_c, lambda, y, hc, hd, params, 1.0, 1.0);
    for (int k = 0; k < 1000; ++k) {
        const CMat q = random_psd(rng, 4, 1 + k % 4, 10.0 * unif(rng));
        EXPECT_LE(best, secrecy_lagrangian(q, lambda, y, hc, hd, params, 1.0, 1.0) + 1e-12);
    }
}

TEST(Waterfill, ProjectedGradientOracle)
{
    const auto r = verify::waterfill_oracle(5, 100000, 8);
    EXPECT_TRUE(r.passed) << verify::describe(r);
}

TEST(GLambda, ClosedFormAtZero)
{
    std::mt19937_64 rng(6);
    const CMat hc = gaussian_matrix(rng, 3, 4);
    const CMat hd = gaussian_matrix(rng, 4, 4);
    const CMat y = update_y(hd, random_psd(rng, 4, 4, 2.0), 1.3);
    const double s2c = 0.6, s2r = 1.3;
    const auto params = make_secrecy_params(2.0, s2r, s2c, 4, 3);
    WaterfillSolution sol;
    const double g = g_lambda(0.0, y, hc, hd, params, s2c, s2r, &sol);
    EXPECT_EQ(sol.q_c.norm(), 0.0);
    const double hand = params.r_bar - hpd_logdet(y) - params.n_bar + s2r * trace_real(y) - 3.0 * std::log(s2c);
    EXPECT_NEAR(g, hand, 1e-10);
}

TEST(GLambda, Continuity)
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const CMat hc = gaussian_matrix(rng, 4, 4);
    const CMat hd = gaussian_matrix(rng, 4, 4);
    const CMat y = update_y(hd, random_psd(rng, 4, 4, 2.0), 1.0);
    const auto params = make_secrecy_params(2.0, 1.0, 1.0, 4, 4);
    for (int k = 0; k < 50; ++k) {
        const double lam = 20.0 * unif(rng);
        EXPECT_LT(std::abs(g_lambda(lam + 1e-6, y, hc, hd, params, 1.0, 1.0) - g_lambda(lam, y, hc, hd, params, 1.0, 1.0)),
                  1e-3);
    }
}

TEST(Bisection, RootIsPositiveAndActive)
{
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        std::mt19937_64 rng(seed);
        const CMat hc = gaussian_matrix(rng, 4, 4);
        const CMat hd = gaussian_matrix(rng, 4, 4, 0.3);
        const CMat y = update_y(hd, random_psd(rng, 4, 4, 1.0), 1.0);
        const double r_m = 2.0;
        const auto params = make_secrecy_params(r_m, 1.0, 1.0, 4, 4);
        const auto b = bisect_lambda(y, hc, hd, params, 1.0, 1.0);
        EXPECT_GT(b.lambda, 0.0);
        EXPECT_LE(std::abs(b.g), 1e-6);
        const double lin_bits =
            (linearized_secrecy_nats(hc, hd, y, b.solution.q_c, params, 1.0, 1.0)) / kLn2;
        EXPECT_NEAR(lin_bits, r_m, 1e-3);
        // the linearized rate lower-bounds the true one
        EXPECT_GE(secrecy_capacity(hc, hd, b.solution.q_c, 1.0, 1.0), r_m - 1e-3);
    }
}

TEST(Bisection, DegradedEavesdropperNeedsLittlePower)
{
    std::mt19937_64 rng(21);
    const CMat hc = gaussian_matrix(rng, 4, 4);
    const CMat hd = 1e-3 * gaussian_matrix(rng, 4, 4);
    const CMat y = update_y(hd, CMat::Identity(4, 4), 1.0);
    const auto params = make_secrecy_params(1.0, 1.0, 1.0, 4, 4);
    const auto b = bisect_lambda(y, hc, hd, params, 1.0, 1.0);
    const auto direct = solve_min_trace_logdet(hc, hd, y, params, 1.0, 1.0, 30.0, SolverOptions{});
    EXPECT_LT(trace_real(b.solution.q_c), 2.0);
    EXPECT_NEAR(trace_real(b.solution.q_c), trace_real(direct.q_c.value), 1e-4);
}

TEST(Bisection, UnreachableThresholdThrows)
{
    std::mt19937_64 rng(22);
    const CMat h = gaussian_matrix(rng, 4, 4);
    const CMat y = update_y(h, CMat::Identity(4, 4), 1.0);
    const auto params = make_secrecy_params(5.0, 1.0, 1.0, 4, 4);
    // identical channels: no secrecy at any power
    EXPECT_THROW(bisect_lambda(y, h, h, params, 1.0, 1.0), Error);
}

struct SolverFixture {
    ScenarioConfig cfg;
    RadarOperators ops = build_operators(cfg);
    SolverOptions opts;
};

TEST(Algorithm2, ZeroThresholdClosedForm)
{
    SolverFixture fx;
    const auto chan = sample_channel(fx.cfg, 3);
    const auto params = make_secrecy_params(0.0, 1.0, 1.0, 4, 4);
    const auto r = algorithm2(chan, fx.ops, fx.cfg, params, fx.opts);
    EXPECT_TRUE(r.feasible);
    EXPECT_EQ(r.q_c.norm(), 0.0);
    EXPECT_EQ(r.p_r, fx.cfg.p_total);
    const double oracle = verify::zero_threshold_oracle(fx.cfg);
    EXPECT_LT(std::abs(r.sinr - oracle) / oracle, 1e-8);
}

TEST(Algorithm2, TraceMonotonePowerAndSinrAccounting)
{
    SolverFixture fx;
    const CMat g = waveform_gain_matrix(fx.ops);
    const double lmax = max_eigenvalue(g);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto chan = sample_channel(fx.cfg, seed);
        const auto params = make_secrecy_params(4.0, 1.0, 1.0, 4, 4);
        std::vector<double> tr;
        const auto r = algorithm2(chan, fx.ops, fx.cfg, params, fx.opts,
                                  [&](const OuterRecord& o) { tr.push_back(o.trace_q); });
        ASSERT_TRUE(r.feasible) << "seed " << seed;
        ASSERT_FALSE(tr.empty());
        for (std::size_t i = 1; i < tr.size(); ++i)
            EXPECT_LE(tr[i], tr[i - 1] + 1e-9);
        EXPECT_NEAR(r.p_r + trace_real(r.q_c), fx.cfg.p_total, 1e-9);
        EXPECT_LT(std::abs(r.sinr - r.p_r * lmax / fx.cfg.sigma2_r) / r.sinr, 1e-8);
        const auto w = optimal_weight(fx.ops.c_mat, fx.ops.d_mat, r.s_r);
        EXPECT_LT(std::abs(r.sinr - sinr_nonoverlap_direct(fx.ops, r.s_r, w.w, fx.cfg.sigma2_r)) / r.sinr, 1e-8);
        EXPECT_NEAR(r.achieved_secrecy, 4.0, 1e-3);
        EXPECT_NEAR(secrecy_capacity(chan.h_c, chan.h_d, r.q_c, 1.0, 1.0), r.achieved_secrecy, 1e-12);
    }
}

TEST(Algorithm2, InfeasibleRunAccounting)
{
    SolverFixture fx;
    const auto chan = sample_channel(fx.cfg, 0);
    const auto params = make_secrecy_params(60.0, 1.0, 1.0, 4, 4);
    const auto r = algorithm2(chan, fx.ops, fx.cfg, params, fx.opts);
    EXPECT_FALSE(r.feasible);
    EXPECT_NE(r.status, SolveStatus::ok);
    EXPECT_EQ(r.achieved_secrecy, 0.0);
    EXPECT_EQ(r.q_c.norm(), 0.0);
    EXPECT_EQ(r.p_r, fx.cfg.p_total);
    const double oracle = verify::zero_threshold_oracle(fx.cfg);
    EXPECT_LT(std::abs(r.sinr - oracle) / oracle, 1e-8);
}

TEST(Algorithm2, MeanSecrecyMeetsModerateThreshold)
{
    SolverFixture fx;
    const auto params = make_secrecy_params(4.0, 1.0, 1.0, 4, 4);
    double acc = 0.0;
    int feasible = 0;
    const int n = 20;
    for (std::uint64_t seed = 0; seed < n; ++seed) {
        const auto r = algorithm2(sample_channel(fx.cfg, seed), fx.ops, fx.cfg, params, fx.opts);
        acc += r.achieved_secrecy;
        feasible += r.feasible ? 1 : 0;
    }
    EXPECT_EQ(feasible, n);
    EXPECT_NEAR(acc / n, 4.0, 1e-2);
}

TEST(Algorithm1, AgreesWithAlgorithm2)
{
    const auto r = verify::algorithm_agreement(5, 2.0, 100);
    EXPECT_TRUE(r.passed) << verify::describe(r);
}

TEST(Algorithm1, ZeroThresholdAndInfeasibleAccounting)
{
    SolverFixture fx;
    const auto chan = sample_channel(fx.cfg, 1);
    const double oracle = verify::zero_threshold_oracle(fx.cfg);
    const auto zero = algorithm1(chan, fx.ops, fx.cfg, make_secrecy_params(0.0, 1.0, 1.0, 4, 4), fx.opts);
    EXPECT_TRUE(zero.feasible);
    EXPECT_LT(std::abs(zero.sinr - oracle) / oracle, 1e-8);
    const auto high = algorithm1(chan, fx.ops, fx.cfg, make_secrecy_params(60.0, 1.0, 1.0, 4, 4), fx.opts);
    EXPECT_FALSE(high.feasible);
    EXPECT_EQ(high.achieved_secrecy, 0.0);
    EXPECT_LT(std::abs(high.sinr - oracle) / oracle, 1e-8);
}

} // namespace
} // namespace radcom
