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

#ifndef RADCOM_SCENARIO_HPP
#define RADCOM_SCENARIO_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include <json.hpp>

#include "radcom/linalg.hpp"

namespace radcom {

// Geometry, gains and noise levels of one transmitter / radar receiver (RR) /
// communication receiver (CR) scene. Angles are in degrees, SNRs in dB,
// powers in watts, noise variances linear.
//
// Gain convention: |gamma_d|^2 = 10^(snr_direct_db/10) and
// |gamma_t|^2 = 10^(snr_surv_db/10) with phase 0 unless set explicitly; the
// transmitter-CR channel entries have variance sigma2_c * 10^(snr_comm_db/10).
struct ScenarioConfig {
    int n_tx = 4;       // transmit antennas
    int n_rr = 4;       // RR antennas per channel group (direct / surveillance)
    int n_cr = 4;       // CR antennas
    int block_len = 10; // samples per block

    double theta_t = 40.0;  // DoD, direct path
    double theta_r = 42.0;  // DoA, direct path
    double theta_t0 = 30.0; // DoD, surveillance path
    double theta_r0 = 32.0; // DoA, surveillance path

    cplx gamma_d{10.0, 0.0};
    cplx gamma_t{std::sqrt(10.0), 0.0};

    double sigma2_r = 1.0;
    double sigma2_c = 1.0;
    double p_total = 30.0;

    double snr_direct_db = 20.0;
    double snr_surv_db = 10.0;
    double snr_comm_db = 0.0;

    // Re-derives both path gains from the SNR fields, keeping their phases.
    void apply_snr_gains()
    {
        const double pd = std::arg(gamma_d);
        const double pt = std::arg(gamma_t);
        gamma_d = std::polar(std::sqrt(linear_from_db(snr_direct_db)), pd);
        gamma_t = std::polar(std::sqrt(linear_from_db(snr_surv_db)), pt);
    }

    double comm_channel_variance() const { return sigma2_c * linear_from_db(snr_comm_db); }
};

inline void validate(const ScenarioConfig& cfg)
{
    auto bad = [](const char* field, const std::string& why) {
        throw Error(ErrorCode::invalid_argument, std::string(field) + ": " + why);
    };
    if (cfg.n_tx < 1) bad("n_tx", "must be >= 1");
    if (cfg.n_rr < 1) bad("n_rr", "must be >= 1");
    if (cfg.n_cr < 1) bad("n_cr", "must be >= 1");
    if (cfg.block_len < 1) bad("block_len", "must be >= 1");
    auto angle = [&](const char* field, double deg) {
        if (!(deg > -90.0 && deg < 90.0))
            bad(field, "angle must lie in (-90, 90) degrees");
    };
    angle("theta_t", cfg.theta_t);
    angle("theta_r", cfg.theta_r);
    angle("theta_t0", cfg.theta_t0);
    angle("theta_r0", cfg.theta_r0);
    if (!(cfg.sigma2_r > 0.0)) bad("sigma2_r", "must be > 0");
    if (!(cfg.sigma2_c > 0.0)) bad("sigma2_c", "must be > 0");
    if (!(cfg.p_total > 0.0)) bad("p_total", "must be > 0");
    if (!std::isfinite(cfg.snr_direct_db)) bad("snr_direct_db", "must be finite");
    if (!std::isfinite(cfg.snr_surv_db)) bad("snr_surv_db", "must be finite");
    if (!std::isfinite(cfg.snr_comm_db)) bad("snr_comm_db", "must be finite");
}

// Complex gains travel as [re, im].
inline nlohmann::json to_json_value(const ScenarioConfig& cfg)
{
    return nlohmann::json{
        {"n_tx", cfg.n_tx},
        {"n_rr", cfg.n_rr},
        {"n_cr", cfg.n_cr},
        {"block_len", cfg.block_len},
        {"theta_t", cfg.theta_t},
        {"theta_r", cfg.theta_r},
        {"theta_t0", cfg.theta_t0},
        {"theta_r0", cfg.theta_r0},
        {"gamma_d", {cfg.gamma_d.real(), cfg.gamma_d.imag()}},
        {"gamma_t", {cfg.gamma_t.real(), cfg.gamma_t.imag()}},
        {"sigma2_r", cfg.sigma2_r},
        {"sigma2_c", cfg.sigma2_c},
        {"p_total", cfg.p_total},
        {"snr_direct_db", cfg.snr_direct_db},
        {"snr_surv_db", cfg.snr_surv_db},
        {"snr_comm_db", cfg.snr_comm_db},
    };
}

// Missing fields keep their defaults. Gains absent from the document are
// derived from the SNR fields; gains given explicitly must agree in magnitude
// with the SNR fields when those are given too.
inline ScenarioConfig config_from_json(const nlohmann::json& doc)
{
    if (!doc.is_object())
        throw Error(ErrorCode::invalid_argument, "config: expected a JSON object");

    ScenarioConfig cfg;
    auto field = [&](const char* name, auto& target) {
        if (!doc.contains(name))
            return false;
        try {
            doc.at(name).get_to(target);
        } catch (const nlohmann::json::exception&) {
            throw Error(ErrorCode::invalid_argument, std::string(name) + ": wrong type");
        }
        return true;
    };
    auto complex_field = [&](const char* name, cplx& target) {
        if (!doc.contains(name))
            return false;
        const auto& v = doc.at(name);
        if (v.is_number()) {
            target = cplx(v.get<double>(), 0.0);
        } else if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
            target = cplx(v[0].get<double>(), v[1].get<double>());
        } else {
            throw Error(ErrorCode::invalid_argument, std::string(name) + ": expected number or [re, im]");
        }
        return true;
    };

    field("n_tx", cfg.n_tx);
    field("n_rr", cfg.n_rr);
    field("n_cr", cfg.n_cr);
    field("block_len", cfg.block_len);
    field("theta_t", cfg.theta_t);
    field("theta_r", cfg.theta_r);
    field("theta_t0", cfg.theta_t0);
    field("theta_r0", cfg.theta_r0);
    field("sigma2_r", cfg.sigma2_r);
    field("sigma2_c", cfg.sigma2_c);
    field("p_total", cfg.p_total);
    const bool has_snr_d = field("snr_direct_db", cfg.snr_direct_db);
    const bool has_snr_t = field("snr_surv_db", cfg.snr_surv_db);
    field("snr_comm_db", cfg.snr_comm_db);

    cplx gd = cfg.gamma_d;
    cplx gt = cfg.gamma_t;
    const bool has_gd = complex_field("gamma_d", gd);
    const bool has_gt = complex_field("gamma_t", gt);

    auto reconcile = [](const char* name, bool has_gain, bool has_snr, const cplx& gain, double& snr_db,
                        cplx& out) {
        if (has_gain) {
            const double mag2 = std::norm(gain);
            if (has_snr) {
                const double want = linear_from_db(snr_db);
                if (std::abs(mag2 - want) > 1e-9 * std::max(1.0, want))
                    throw Error(ErrorCode::invalid_argument,
                                std::string(name) + ": |gain|^2 disagrees with the matching snr field");
            } else {
                if (!(mag2 > 0.0))
                    throw Error(ErrorCode::invalid_argument, std::string(name) + ": gain must be nonzero");
                snr_db = db_from_linear(mag2);
            }
            out = gain;
        } else {
            out = std::polar(std::sqrt(linear_from_db(snr_db)), 0.0);
        }
    };
    reconcile("gamma_d", has_gd, has_snr_d, gd, cfg.snr_direct_db, cfg.gamma_d);
    reconcile("gamma_t", has_gt, has_snr_t, gt, cfg.snr_surv_db, cfg.gamma_t);

    validate(cfg);
    return cfg;
}

// Uniform linear array, half-wavelength spacing: element k is
// exp(i*pi*k*sin(theta)).
inline CVec steering_vector(double theta_deg, Eigen::Index n)
{
    if (n < 1)
        throw Error(ErrorCode::invalid_argument, "steering_vector: n must be >= 1");
    const double phase = kPi * std::sin(theta_deg * kPi / 180.0);
    CVec a(n);
    for (Eigen::Index k = 0; k < n; ++k)
        a(k) = std::polar(1.0, phase * static_cast<double>(k));
    return a;
}

// Block operators of the radar receive chain, stored dense.
struct RadarOperators {
    CMat a_mat;  // LN x LNt, direct path: gamma_d (I_L (x) a_r a_t^H)
    CMat ad_mat; // LNt x LNt, A^H A = N |gamma_d|^2 (I_L (x) a_t a_t^H)
    CMat as_mat; // LN x LNt, surveillance path
    CMat c_mat;  // LN x LN, As Ad As^H + I
    CMat d_mat;  // LNt x LN, Ad^H As^H

    // As Ad, shared by the overlap interference term.
    CMat as_ad() const { return as_mat * ad_mat; }
};

inline RadarOperators build_operators(const ScenarioConfig& cfg)
{
    validate(cfg);
    const Eigen::Index L = cfg.block_len;
    const Eigen::Index n = cfg.n_rr;

    const CVec a_r = steering_vector(cfg.theta_r, n);
    const CVec a_t = steering_vector(cfg.theta_t, cfg.n_tx);
    const CVec a_r0 = steering_vector(cfg.theta_r0, n);
    const CVec a_t0 = steering_vector(cfg.theta_t0, cfg.n_tx);

    RadarOperators ops;
    ops.a_mat = cfg.gamma_d * block_diag_repeat(L, a_r * a_t.adjoint());
    ops.ad_mat = (static_cast<double>(n) * std::norm(cfg.gamma_d)) * block_diag_repeat(L, a_t * a_t.adjoint());
    ops.as_mat = cfg.gamma_t * block_diag_repeat(L, a_r0 * a_t0.adjoint());

    const CMat as_ad = ops.as_mat * ops.ad_mat;
    ops.c_mat = hermitian_part(as_ad * ops.as_mat.adjoint()) + CMat::Identity(L * n, L * n);
    ops.d_mat = ops.ad_mat.adjoint() * ops.as_mat.adjoint();
    return ops;
}

// C(Q) = As Ad (I_L (x) Q) Ad^H As^H + sigma2_r I + sigma2_r As Ad As^H.
inline CMat build_c_of_q(const RadarOperators& ops, const CMat& q_c, double sigma2_r)
{
    require_hermitian(q_c, "build_c_of_q");
    const Eigen::Index nt = q_c.rows();
    if (ops.ad_mat.rows() % nt != 0)
        throw Error(ErrorCode::invalid_argument, "build_c_of_q: q_c dimension does not divide LNt");
    const Eigen::Index L = ops.ad_mat.rows() / nt;
    const CMat as_ad = ops.as_ad();
    const Eigen::Index ln = ops.c_mat.rows();
    // c_mat - I is exactly As Ad As^H.
    const CMat base = ops.c_mat - CMat::Identity(ln, ln);
    CMat out = as_ad * block_diag_repeat(L, q_c) * as_ad.adjoint();
    out += sigma2_r * CMat::Identity(ln, ln) + sigma2_r * base;
    return hermitian_part(out);
}

struct ChannelRealization {
    CMat h_c; // M x Nt, transmitter -> CR
    CMat h_d; // N x Nt, transmitter -> RR direct path
};

inline CMat direct_channel(const ScenarioConfig& cfg)
{
    return cfg.gamma_d * steering_vector(cfg.theta_r, cfg.n_rr) * steering_vector(cfg.theta_t, cfg.n_tx).adjoint();
}

// i.i.d. circularly-symmetric Gaussian H_c; deterministic H_d.
inline ChannelRealization sample_channel(const ScenarioConfig& cfg, std::uint64_t rng_seed)
{
    validate(cfg);
    std::mt19937_64 rng(rng_seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double scale = std::sqrt(cfg.comm_channel_variance() / 2.0);

    ChannelRealization ch;
    ch.h_c.resize(cfg.n_cr, cfg.n_tx);
    for (Eigen::Index j = 0; j < ch.h_c.cols(); ++j)
        for (Eigen::Index i = 0; i < ch.h_c.rows(); ++i) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            ch.h_c(i, j) = scale * cplx(re, im);
        }
    ch.h_d = direct_channel(cfg);
    return ch;
}

} // namespace radcom

#endif // RADCOM_SCENARIO_HPP
