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
using testing::random_vector;

struct Instance {
    ScenarioConfig cfg;
    RadarOperators ops;
};

Instance small_instance(std::uint64_t seed, Eigen::Index L = 2)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ang(-60.0, 60.0);
    Instance in;
    in.cfg.block_len = static_cast<int>(L);
    in.cfg.n_tx = 3;
    in.cfg.n_rr = 3;
    in.cfg.theta_t = ang(rng);
    in.cfg.theta_r = ang(rng);
    in.cfg.theta_t0 = ang(rng);
    in.cfg.theta_r0 = ang(rng);
    in.ops = build_operators(in.cfg);
    return in;
}

TEST(OptimalWeight, IdentityWhiteningIsMatchedFilter)
{
    const auto in = small_instance(1);
    std::mt19937_64 rng(2);
    const CVec s = random_vector(rng, in.ops.d_mat.rows(), 2.0);
    const Eigen::Index ln = in.ops.c_mat.rows();
    const auto w = optimal_weight(CMat::Identity(ln, ln), in.ops.d_mat, s);
    const CVec mf = in.ops.d_mat.adjoint() * s;
    const cplx resp = s.dot(in.ops.d_mat * w.w);
    EXPECT_NEAR(resp.real(), 1.0, 1e-12);
    EXPECT_NEAR(resp.imag(), 0.0, 1e-12);
    EXPECT_LT(max_abs(w.w - mf / mf.squaredNorm()), 1e-12 * w.w.norm());
}

TEST(OptimalWeight, BeatsRandomWeights)
{
    const auto in = small_instance(3);
    std::mt19937_64 rng(4);
    const CVec s = random_vector(rng, in.ops.d_mat.rows(), 1.0);
    const auto w = optimal_weight(in.ops.c_mat, in.ops.d_mat, s);
    const double best = rayleigh_quotient(in.ops.c_mat, in.ops.d_mat, s, w.w);
    for (int k = 0; k < 1000; ++k) {
        const CVec u = random_vector(rng, in.ops.c_mat.rows(), 1.0);
        EXPECT_LE(rayleigh_quotient(in.ops.c_mat, in.ops.d_mat, s, u), best * (1.0 + 1e-12));
    }
}

TEST(OptimalWeight, MatchesGeneralizedEigenvector)
{
    for (std::uint64_t seed : {5u, 6u, 7u}) {
        const auto in = small_instance(seed);
        std::mt19937_64 rng(seed + 100);
        const CVec s = random_vector(rng, in.ops.d_mat.rows(), 1.0);
        const CVec t = in.ops.d_mat.adjoint() * s;
        const CMat num = t * t.adjoint();
        Eigen::GeneralizedSelfAdjointEigenSolver<CMat> ges(num, in.ops.c_mat);
        const CVec v = ges.eigenvectors().col(ges.eigenvectors().cols() - 1);
        const CVec w = optimal_weight(in.ops.c_mat, in.ops.d_mat, s).w;
        const double cosine = std::abs(v.dot(w)) / (v.norm() * w.norm());
        EXPECT_LT(1.0 - cosine, 1e-8);
    }
}

TEST(OptimalWeight, RejectsIndefiniteOperator)
{
    const auto in = small_instance(1);
    const CVec s = CVec::Ones(in.ops.d_mat.rows());
    EXPECT_THROW(optimal_weight(-in.ops.c_mat, in.ops.d_mat, s), Error);
}

TEST(SinrNonoverlap, ZeroWaveform)
{
    const auto in = small_instance(1);
    EXPECT_EQ(sinr_nonoverlap(in.ops, CVec::Zero(in.ops.d_mat.rows()), 1.0), 0.0);
}

TEST(SinrNonoverlap, QuadraticInWaveform)
{
    const auto in = small_instance(2);
    std::mt19937_64 rng(9);
    const CVec s = random_vector(rng, in.ops.d_mat.rows(), 1.0);
    const cplx alpha(1.5, -0.7);
    const double base = sinr_nonoverlap(in.ops, s, 1.0);
    EXPECT_NEAR(sinr_nonoverlap(in.ops, alpha * s, 1.0) / base, std::norm(alpha), 1e-10);
}

TEST(SinrNonoverlap, MatchesPerTermExpressionAtOptimalWeight)
{
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto in = small_instance(seed, 1 + static_cast<Eigen::Index>(seed % 3));
        std::mt19937_64 rng(seed + 40);
        const CVec s = random_vector(rng, in.ops.d_mat.rows(), 3.0);
        const double sigma2 = 0.5 + 0.1 * static_cast<double>(seed);
        const double closed = sinr_nonoverlap(in.ops, s, sigma2);
        const auto w = optimal_weight(in.ops.c_mat, in.ops.d_mat, s);
        EXPECT_LT(std::abs(closed - sinr_nonoverlap_direct(in.ops, s, w.w, sigma2)) / closed, 1e-8);
    }
}

TEST(SinrNonoverlap, WeightScaleInvariance)
{
    const auto in = small_instance(11);
    std::mt19937_64 rng(12);
    const CVec s = random_vector(rng, in.ops.d_mat.rows(), 1.0);
    const CVec w = random_vector(rng, in.ops.c_mat.rows(), 1.0);
    const double base = sinr_nonoverlap_direct(in.ops, s, w, 1.0);
    for (cplx a : {cplx(2.0, 0.0), cplx(-0.3, 4.0), cplx(0.0, 1e-3)})
        EXPECT_LT(std::abs(sinr_nonoverlap_direct(in.ops, s, a * w, 1.0) - base) / base, 1e-10);
    const double q0 = rayleigh_quotient(in.ops.c_mat, in.ops.d_mat, s, w);
    EXPECT_LT(std::abs(rayleigh_quotient(in.ops.c_mat, in.ops.d_mat, s, cplx(0.0, 7.0) * w) - q0) / q0, 1e-10);
}

TEST(OptimalWaveform, ZeroPowerGivesZeroWaveform)
{
    const auto in = small_instance(1);
    const auto d = optimal_waveform(in.ops, 0.0);
    EXPECT_EQ(d.s_r.norm(), 0.0);
    EXPECT_EQ(sinr_nonoverlap(in.ops, d.s_r, 1.0), 0.0);
    EXPECT_THROW(optimal_waveform(in.ops, -1.0), Error);
}

TEST(OptimalWaveform, BeatsRandomWaveformsAndIsLinearInPower)
{
    const auto in = small_instance(13);
    std::mt19937_64 rng(14);
    const double p = 7.0;
    const auto d = optimal_waveform(in.ops, p);
    EXPECT_NEAR(d.s_r.squaredNorm(), p, 1e-12);
    const double best = sinr_nonoverlap(in.ops, d.s_r, 1.0);
    for (int k = 0; k < 1000; ++k)
        EXPECT_LE(sinr_nonoverlap(in.ops, random_vector(rng, in.ops.d_mat.rows(), std::sqrt(p)), 1.0),
                  best * (1.0 + 1e-12));
    const double doubled = sinr_nonoverlap(in.ops, optimal_waveform(in.ops, 2.0 * p).s_r, 1.0);
    EXPECT_NEAR(doubled / best, 2.0, 1e-10);
}

TEST(OptimalWaveform, SinrIsPowerTimesLargestEigenvalue)
{
    const ScenarioConfig cfg;
    const auto ops = build_operators(cfg);
    const auto d = optimal_waveform(ops, cfg.p_total);
    const double oracle = verify::zero_threshold_oracle(cfg);
    EXPECT_LT(std::abs(sinr_nonoverlap(ops, d.s_r, cfg.sigma2_r) - oracle) / oracle, 1e-8);
}

TEST(OptimalWaveform, DeterministicPhase)
{
    const ScenarioConfig cfg;
    const auto ops = build_operators(cfg);
    const CVec a = optimal_waveform(ops, 1.0).s_r;
    const CVec b = optimal_waveform(ops, 1.0).s_r;
    EXPECT_EQ(max_abs(a - b), 0.0);
    Eigen::Index first = 0;
    while (first < a.size() && std::abs(a(first)) < 1e-12)
        ++first;
    ASSERT_LT(first, a.size());
    EXPECT_GT(a(first).real(), 0.0);
    EXPECT_NEAR(a(first).imag(), 0.0, 1e-12);
}

TEST(SinrOverlap, ZeroCovarianceMatchesNonoverlap)
{
    const auto in = small_instance(15);
    std::mt19937_64 rng(16);
    const CVec s = random_vector(rng, in.ops.d_mat.rows(), 2.0);
    const CMat q = CMat::Zero(in.cfg.n_tx, in.cfg.n_tx);
    const double a = sinr_overlap(in.ops, s, q, 1.0);
    EXPECT_LT(std::abs(a - sinr_nonoverlap(in.ops, s, 1.0)) / a, 1e-10);
}

TEST(SinrOverlap, LargerCovarianceNeverHelps)
{
    const auto in = small_instance(17);
    std::mt19937_64 rng(18);
    for (int k = 0; k < 50; ++k) {
        const CVec s = random_vector(rng, in.ops.d_mat.rows(), 2.0);
        const CMat q = random_psd(rng, in.cfg.n_tx, 2, 3.0);
        const CMat extra = random_psd(rng, in.cfg.n_tx, 1, 1.0);
        EXPECT_LE(sinr_overlap(in.ops, s, q + extra, 1.0), sinr_overlap(in.ops, s, q, 1.0) * (1.0 + 1e-10));
    }
}

TEST(SinrOverlap, DeterminantIdentities)
{
    const auto r = verify::receiver_identities(100, 77);
    EXPECT_TRUE(r.passed) << verify::describe(r);
}

TEST(EigenWaveform, DominatesRandomUnitWaveforms)
{
    const ScenarioConfig cfg;
    const auto ops = build_operators(cfg);
    std::mt19937_64 rng(19);
    const double p = 10.0;
    const double best = sinr_nonoverlap(ops, optimal_waveform(ops, p).s_r, 1.0);
    for (int k = 0; k < 100; ++k)
        EXPECT_GE(best * (1.0 + 1e-12), sinr_nonoverlap(ops, random_vector(rng, ops.d_mat.rows(), std::sqrt(p)), 1.0));
}

} // namespace
} // namespace radcom
