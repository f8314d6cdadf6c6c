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

#ifndef RADCOM_SECRECY_HPP
#define RADCOM_SECRECY_HPP

#include <algorithm>
#include <cmath>

#include "radcom/linalg.hpp"

namespace radcom {

// Threshold bookkeeping for the secrecy constraint. Optimization works in
// nats; thresholds are given in bits.
struct SecrecyConstraintParams {
    double r_m = 0.0;   // bits per use (non-overlap) or per block (overlap)
    double c_a = 0.0;   // log2 sigma_r^{2N} - log2 sigma_c^{2M}, bits
    double n_bar = 0.0; // c_a ln 2 + N, nats
    double r_bar = 0.0; // r_m ln 2, nats
};

inline SecrecyConstraintParams make_secrecy_params(double r_m, double sigma2_r, double sigma2_c, Eigen::Index n_rr,
                                                   Eigen::Index n_cr)
{
    if (!(r_m >= 0.0))
        throw Error(ErrorCode::invalid_argument, "r_m: secrecy threshold must be >= 0");
    SecrecyConstraintParams p;
    p.r_m = r_m;
    p.c_a = (static_cast<double>(n_rr) * std::log(sigma2_r) - static_cast<double>(n_cr) * std::log(sigma2_c)) / kLn2;
    p.n_bar = p.c_a * kLn2 + static_cast<double>(n_rr);
    p.r_bar = r_m * kLn2;
    return p;
}

namespace detail {

// ln det(I + H Q H^H / sigma2).
inline double mimo_rate_nats(const CMat& h, const CMat& q, double sigma2)
{
    const CMat m = CMat::Identity(h.rows(), h.rows()) + (h * q * h.adjoint()) / sigma2;
    return hpd_logdet(m);
}

} // namespace detail

// log2 det(I + H_c Q_c H_c^H / sigma2_c), bits per channel use.
inline double capacity_cr(const CMat& h_c, const CMat& q_c, double sigma2_c)
{
    require_psd(q_c, "capacity_cr");
    return std::max(0.0, detail::mimo_rate_nats(h_c, q_c, sigma2_c) / kLn2);
}

// Same expression for the transmitter -> RR direct path.
inline double capacity_rr(const CMat& h_d, const CMat& q_c, double sigma2_r)
{
    require_psd(q_c, "capacity_rr");
    return std::max(0.0, detail::mimo_rate_nats(h_d, q_c, sigma2_r) / kLn2);
}

inline double secrecy_capacity(const CMat& h_c, const CMat& h_d, const CMat& q_c, double sigma2_c, double sigma2_r)
{
    return std::max(0.0, capacity_cr(h_c, q_c, sigma2_c) - capacity_rr(h_d, q_c, sigma2_r));
}

struct BlockCapacities {
    double c_tilde_c = 0.0; // bits per block
    double c_tilde_d = 0.0;
};

namespace detail {

struct BlockTerms {
    CMat hbar_c, hbar_d;
    CMat r_c, r_d;         // radar-only covariances at the receivers
    CMat info_c, info_d;   // Hbar (I_L (x) Q) Hbar^H
};

inline BlockTerms block_terms(const CMat& h_c, const CMat& h_d, const CMat& s_bar, const CMat& q_c, double sigma2_c,
                              double sigma2_r, Eigen::Index L)
{
    BlockTerms t;
    t.hbar_c = block_diag_repeat(L, h_c);
    t.hbar_d = block_diag_repeat(L, h_d);
    if (s_bar.rows() != t.hbar_c.cols())
        throw Error(ErrorCode::invalid_argument, "block capacities: waveform length must be L * n_tx");
    const CMat iq = block_diag_repeat(L, q_c);
    t.r_c = hermitian_part(t.hbar_c * s_bar * t.hbar_c.adjoint()) +
            sigma2_c * CMat::Identity(t.hbar_c.rows(), t.hbar_c.rows());
    t.r_d = hermitian_part(t.hbar_d * s_bar * t.hbar_d.adjoint()) +
            sigma2_r * CMat::Identity(t.hbar_d.rows(), t.hbar_d.rows());
    t.info_c = hermitian_part(t.hbar_c * iq * t.hbar_c.adjoint());
    t.info_d = hermitian_part(t.hbar_d * iq * t.hbar_d.adjoint());
    return t;
}

} // namespace detail

// Block capacities with the radar waveform's Gram matrix S = s s^H (or any
// PSD relaxation of it) acting as interference:
//   log2 det(I + Hbar (I_L (x) Q) Hbar^H R^{-1}).
inline BlockCapacities block_capacities_gram(const CMat& h_c, const CMat& h_d, const CMat& s_bar, const CMat& q_c,
                                             double sigma2_c, double sigma2_r, Eigen::Index L)
{
    require_psd(q_c, "block_capacities");
    require_psd(s_bar, "block_capacities");
    const auto t = detail::block_terms(h_c, h_d, s_bar, q_c, sigma2_c, sigma2_r, L);
    const auto ic = CMat::Identity(t.r_c.rows(), t.r_c.rows());
    const auto id = CMat::Identity(t.r_d.rows(), t.r_d.rows());
    BlockCapacities out;
    out.c_tilde_c = std::max(0.0, general_logdet(ic + t.info_c * hpd_inverse(t.r_c)) / kLn2);
    out.c_tilde_d = std::max(0.0, general_logdet(id + t.info_d * hpd_inverse(t.r_d)) / kLn2);
    return out;
}

inline BlockCapacities block_capacities(const CMat& h_c, const CMat& h_d, const CVec& s_r, const CMat& q_c,
                                        double sigma2_c, double sigma2_r, Eigen::Index L)
{
    return block_capacities_gram(h_c, h_d, s_r * s_r.adjoint(), q_c, sigma2_c, sigma2_r, L);
}

// Cbar_s written as four log-determinants of Hermitian PD matrices:
//   ln det(Rc + Hc Q Hc^H) - ln det Rc + ln det Rd - ln det(Rd + Hd Q Hd^H),
// returned in bits. No clipping at zero.
inline double block_secrecy_expansion_gram(const CMat& h_c, const CMat& h_d, const CMat& s_bar, const CMat& q_c,
                                           double sigma2_c, double sigma2_r, Eigen::Index L)
{
    const auto t = detail::block_terms(h_c, h_d, s_bar, q_c, sigma2_c, sigma2_r, L);
    const double nats = hpd_logdet(t.r_c + t.info_c) - hpd_logdet(t.r_c) + hpd_logdet(t.r_d) -
                        hpd_logdet(t.r_d + t.info_d);
    return nats / kLn2;
}

inline double block_secrecy_expansion(const CMat& h_c, const CMat& h_d, const CVec& s_r, const CMat& q_c,
                                      double sigma2_c, double sigma2_r, Eigen::Index L)
{
    return block_secrecy_expansion_gram(h_c, h_d, s_r * s_r.adjoint(), q_c, sigma2_c, sigma2_r, L);
}

// max(0, c_tilde_c - c_tilde_d), bits per block.
inline double block_secrecy_rate(const CMat& h_c, const CMat& h_d, const CVec& s_r, const CMat& q_c, double sigma2_c,
                                 double sigma2_r, Eigen::Index L)
{
    const auto caps = block_capacities(h_c, h_d, s_r, q_c, sigma2_c, sigma2_r, L);
    return std::max(0.0, caps.c_tilde_c - caps.c_tilde_d);
}

} // namespace radcom

#endif // RADCOM_SECRECY_HPP
