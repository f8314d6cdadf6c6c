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

using testing::max_abs;
using testing::random_psd;
using testing::random_vector;
using testing::small_overlap_config;

struct Fixture {
    ScenarioConfig cfg = small_overlap_config();
    RadarOperators ops;
    ChannelRealization chan;
    OverlapProblemData data;

    explicit Fixture(std::uint64_t seed)
    {
        ops = build_operators(cfg);
        chan = sample_channel(cfg, seed);
        data = make_overlap_data(ops, chan, cfg);
    }

    Eigen::Index lnt() const { return cfg.block_len * cfg.n_tx; }
};

TEST(AuxUpdate, InverseContract)
{
    Fixture fx(1);
    std::mt19937_64 rng(2);
    const CMat s = random_psd(rng, fx.lnt(), 3, 10.0);
    const CMat q = random_psd(rng, fx.cfg.n_tx, 2, 5.0);
    const auto aux = aux_update(fx.data, s, q);
    const CMat cq = build_c_of_q(fx.ops, q, fx.cfg.sigma2_r);
    // C(Q) is badly scaled, so compare with an extended-precision inverse
    const verify::XMat ref = cq.cast<verify::xcplx>().partialPivLu().inverse();
    const CMat ref_d = ref.cast<cplx>();
    EXPECT_LT((aux.x_mat - ref_d).norm(), 1e-8 * ref_d.norm());

    const Eigen::Index L = fx.cfg.block_len;
    const CMat hc = block_diag_repeat(L, fx.chan.h_c);
    const CMat hd = block_diag_repeat(L, fx.chan.h_d);
    const CMat yinv = hd * (s + block_diag_repeat(L, q)) * hd.adjoint() +
                      fx.cfg.sigma2_r * CMat::Identity(hd.rows(), hd.rows());
    const CMat zinv = hc * s * hc.adjoint() + fx.cfg.sigma2_c * CMat::Identity(hc.rows(), hc.rows());
    EXPECT_LT(max_abs(aux.ybar_mat * yinv - CMat::Identity(hd.rows(), hd.rows())), 1e-10);
    EXPECT_LT(max_abs(aux.z_mat * zinv - CMat::Identity(hc.rows(), hc.rows())), 1e-10);
}

TEST(AuxUpdate, ZeroSignals)
{
    Fixture fx(3);
    const auto aux = aux_update(fx.data, CMat::Zero(fx.lnt(), fx.lnt()), CMat::Zero(fx.cfg.n_tx, fx.cfg.n_tx));
    const CMat c_inv = hpd_inverse(build_c_of_q(fx.ops, CMat::Zero(fx.cfg.n_tx, fx.cfg.n_tx), fx.cfg.sigma2_r));
    EXPECT_LT(max_abs(aux.x_mat - c_inv), 1e-10 * max_abs(c_inv));
    const Eigen::Index m = aux.ybar_mat.rows();
    EXPECT_LT(max_abs(aux.ybar_mat - CMat::Identity(m, m)), 1e-14);
    EXPECT_LT(max_abs(aux.z_mat - CMat::Identity(aux.z_mat.rows(), aux.z_mat.rows())), 1e-14);
}

TEST(AuxUpdate, RejectsIndefiniteInput)
{
    Fixture fx(4);
    CMat s = CMat::Identity(fx.lnt(), fx.lnt());
    s(0, 0) = -1.0;
    EXPECT_THROW(aux_update(fx.data, s, CMat::Identity(fx.cfg.n_tx, fx.cfg.n_tx)), Error);
}

TEST(AuxUpdate, SurrogatesAreTightAtCurrentIterate)
{
    std::mt19937_64 rng(5);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Fixture fx(seed);
        const CMat s = random_psd(rng, fx.lnt(), 1 + static_cast<Eigen::Index>(seed % 6), 20.0);
        const CMat q = random_psd(rng, fx.cfg.n_tx, 2, 10.0);
        const auto aux = aux_update(fx.data, s, q);
        EXPECT_NEAR(overlap_surrogate_objective(fx.data, aux.x_mat, s, q), overlap_relaxed_objective(fx.data, s, q),
                    1e-7);
        const double sec = block_secrecy_expansion_gram(fx.chan.h_c, fx.chan.h_d, s, q, fx.cfg.sigma2_c,
                                                        fx.cfg.sigma2_r, fx.cfg.block_len) * kLn2;
        EXPECT_NEAR(overlap_secrecy_surrogate(fx.data, aux.ybar_mat, aux.z_mat, s, q), sec, 1e-7);
    }
}

TEST(RelaxedObjective, RankOneGivesLogOnePlusSinr)
{
    Fixture fx(6);
    std::mt19937_64 rng(7);
    const CVec s = random_vector(rng, fx.lnt(), 3.0);
    const CMat q = random_psd(rng, fx.cfg.n_tx, 2, 4.0);
    const double sinr = sinr_overlap(fx.ops, s, q, fx.cfg.sigma2_r);
    EXPECT_LT(std::abs(overlap_relaxed_objective(fx.data, s * s.adjoint(), q) - std::log1p(sinr)),
              1e-8 * std::log1p(sinr));
}

TEST(RankOneExtract, RankOneInputIsReconstructed)
{
    Fixture fx(8);
    std::mt19937_64 rng(9);
    const CVec v = random_vector(rng, fx.lnt(), 2.5);
    const CMat s_bar = v * v.adjoint();
    const RankOneContext ctx{&fx.data, CMat::Zero(fx.cfg.n_tx, fx.cfg.n_tx), 0.0};
    const auto r = rank_one_extract(s_bar, ctx, rng);
    EXPECT_FALSE(r.randomized);
    EXPECT_LT((r.s_r * r.s_r.adjoint() - s_bar).norm(), 1e-8 * s_bar.norm());
}

TEST(RankOneExtract, NeverBeatsTheEigenWaveform)
{
    std::mt19937_64 rng(10);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Fixture fx(seed);
        const CMat s_bar = random_psd(rng, fx.lnt(), 2 + static_cast<Eigen::Index>(seed % 3), 15.0);
        const CMat q = random_psd(rng, fx.cfg.n_tx, 1, 3.0);
        const RankOneContext ctx{&fx.data, q, 0.0};
        const auto r = rank_one_extract(s_bar, ctx, rng);
        EXPECT_TRUE(r.randomized);
        EXPECT_NEAR(r.s_r.squaredNorm(), trace_real(s_bar), 1e-9 * trace_real(s_bar));
        // no waveform with this power beats the principal direction of D C(Q)^{-1} D^H
        const CMat x = hpd_inverse(build_c_of_q(fx.ops, q, fx.cfg.sigma2_r));
        const double bound =
            trace_real(s_bar) * hermitian_eigenvalues(fx.ops.d_mat * x * fx.ops.d_mat.adjoint()).maxCoeff();
        EXPECT_LE(r.sinr, bound * (1.0 + 1e-9));
    }
}

TEST(RankOneExtract, RandomizationVersusPrincipalEigenvector)
{
    std::mt19937_64 rng(11);
    int wins = 0;
    const int trials = 100;
    for (int k = 0; k < trials; ++k) {
        Fixture fx(static_cast<std::uint64_t>(k));
        const CMat s_bar = random_psd(rng, fx.lnt(), 2, 15.0);
        const CMat q = random_psd(rng, fx.cfg.n_tx, 1, 3.0);
        const RankOneContext ctx{&fx.data, q, 0.0};
        const auto r = rank_one_extract(s_bar, ctx, rng);
        const Eigenpair top = principal_eigenpair(s_bar);
        const CVec pc = std::sqrt(trace_real(s_bar)) * top.vector.normalized();
        if (r.sinr >= sinr_overlap(fx.ops, pc, q, fx.cfg.sigma2_r))
            ++wins;
    }
    EXPECT_GE(wins, trials / 2);
}

TEST(RankOneExtract, ThrowsWhenNoCandidateMeetsThreshold)
{
    Fixture fx(12);
    std::mt19937_64 rng(13);
    const CMat s_bar = random_psd(rng, fx.lnt(), 3, 5.0);
    const RankOneContext ctx{&fx.data, CMat::Zero(fx.cfg.n_tx, fx.cfg.n_tx), 1e6};
    try {
        rank_one_extract(s_bar, ctx, rng, 10);
        FAIL() << "expected no_feasible_candidate";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::no_feasible_candidate);
    }
}

TEST(AoOverlap, ZeroThresholdSendsPowerToRadar)
{
    Fixture fx(14);
    OverlapOptions oo;
    oo.rng_seed = 14;
    const auto r = ao_overlap(fx.chan, fx.ops, fx.cfg, 0.0, SolverOptions{}, oo);
    ASSERT_TRUE(r.feasible);
    EXPECT_LT(r.raw_trace_q / fx.cfg.p_total, 0.05);
}

TEST(AoOverlap, MonotoneTightFeasibleAndWithinBudget)
{
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        Fixture fx(seed);
        OverlapOptions oo;
        oo.rng_seed = seed;
        const double r_tilde = 6.0;
        std::vector<double> traced;
        const auto r = ao_overlap(fx.chan, fx.ops, fx.cfg, r_tilde, SolverOptions{}, oo,
                                  [&](const OuterRecord& rec) { traced.push_back(rec.objective); });
        ASSERT_FALSE(r.objective_history.empty());
        for (std::size_t i = 1; i < r.objective_history.size(); ++i)
            EXPECT_GE(r.objective_history[i], r.objective_history[i - 1] - 1e-9) << "round " << i;
        EXPECT_LT(r.max_tightness_gap, 1e-7);
        EXPECT_FALSE(traced.empty());
        EXPECT_LE(r.outer_iters, 100);
        if (r.feasible) {
            EXPECT_LE(r.p_r + r.raw_trace_q, fx.cfg.p_total + 1e-6);
            EXPECT_GE(r.achieved_secrecy, r_tilde - 1e-3);
            EXPECT_NEAR(r.achieved_secrecy_per_use, r.achieved_secrecy / fx.cfg.block_len, 1e-12);
            EXPECT_GE(r.eig_ratio, 0.0);
            EXPECT_LE(r.eig_ratio, 1.0);
        }
    }
}

TEST(AoOverlap, DeterministicForFixedSeed)
{
    Fixture fx(4);
    OverlapOptions oo;
    oo.rng_seed = 99;
    const auto a = ao_overlap(fx.chan, fx.ops, fx.cfg, 3.0, SolverOptions{}, oo);
    const auto b = ao_overlap(fx.chan, fx.ops, fx.cfg, 3.0, SolverOptions{}, oo);
    EXPECT_EQ(a.sinr, b.sinr);
    EXPECT_EQ(a.achieved_secrecy, b.achieved_secrecy);
}

TEST(AoOverlap, UnreachableThresholdIsFlagged)
{
    Fixture fx(5);
    const auto r = ao_overlap(fx.chan, fx.ops, fx.cfg, 500.0, SolverOptions{});
    EXPECT_FALSE(r.feasible);
    EXPECT_NE(r.status, SolveStatus::ok);
    EXPECT_EQ(r.achieved_secrecy, 0.0);
    EXPECT_EQ(trace_real(r.q_c), 0.0);
    EXPECT_THROW(ao_overlap(fx.chan, fx.ops, fx.cfg, -1.0, SolverOptions{}), Error);
}

} // namespace
} // namespace radcom
