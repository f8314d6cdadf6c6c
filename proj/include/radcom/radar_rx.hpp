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

#ifndef RADCOM_RADAR_RX_HPP
#define RADCOM_RADAR_RX_HPP

#include <cmath>

#include "radcom/scenario.hpp"

namespace radcom {

enum class ResourceMode { non_overlap, overlap };

struct ReceiverWeight {
    CVec w;
    ResourceMode mode = ResourceMode::non_overlap;
};

struct WaveformDesign {
    CVec s_r;
    double p_r = 0.0;
};

namespace detail {

inline Eigen::LLT<CMat> checked_pd_factor(const CMat& c_like)
{
    require_hermitian(c_like, "receiver operator");
    const RVec ev = hermitian_eigenvalues(c_like);
    if (ev.minCoeff() <= 1e-12 * std::max(std::abs(ev.maxCoeff()), 1e-300))
        throw Error(ErrorCode::not_positive_definite);
    return hpd_factor(c_like);
}

} // namespace detail

// Minimum-output-power weight under the unit response s^H D w = 1:
//   w = C^{-1} D^H s / (s^H D C^{-1} D^H s).
inline ReceiverWeight optimal_weight(const CMat& c_like, const CMat& d_mat, const CVec& s_r,
                                     ResourceMode mode = ResourceMode::non_overlap)
{
    const auto llt = detail::checked_pd_factor(c_like);
    const CVec target = d_mat.adjoint() * s_r;
    const CVec whitened = llt.solve(target);
    const cplx denom = target.dot(whitened); // s^H D C^{-1} D^H s
    if (!(denom.real() > 0.0))
        throw Error(ErrorCode::invalid_argument, "optimal_weight: waveform has no response through D");
    return {whitened / denom.real(), mode};
}

// |s^H D w|^2 / (w^H C w); scale invariant in w.
inline double rayleigh_quotient(const CMat& c_like, const CMat& d_mat, const CVec& s_r, const CVec& w)
{
    const cplx num = s_r.dot(d_mat * w);
    const double den = w.dot(c_like * w).real();
    return std::norm(num) / den;
}

// D C^{-1} D^H, the quadratic form behind the non-overlap SINR.
inline CMat waveform_gain_matrix(const RadarOperators& ops)
{
    const auto llt = detail::checked_pd_factor(ops.c_mat);
    return hermitian_part(ops.d_mat * llt.solve(ops.d_mat.adjoint()));
}

// (1/sigma2_r) s^H D C^{-1} D^H s.
inline double sinr_nonoverlap(const RadarOperators& ops, const CVec& s_r, double sigma2_r)
{
    const auto llt = detail::checked_pd_factor(ops.c_mat);
    const CVec t = ops.d_mat.adjoint() * s_r;
    return std::max(0.0, hpd_quadratic_refined(llt, ops.c_mat, t)) / sigma2_r;
}

// SINR evaluated directly from the surveillance-path signal, direct-path
// noise leakage and thermal noise terms for an arbitrary weight.
inline double sinr_nonoverlap_direct(const RadarOperators& ops, const CVec& s_r, const CVec& w,
                                     double sigma2_r)
{
    const cplx signal = w.dot(ops.as_mat * (ops.ad_mat * s_r));
    const CVec leak = (ops.as_mat * ops.a_mat.adjoint()).adjoint() * w; // (w^H As A^H)^H
    const double denom = leak.squaredNorm() + w.squaredNorm();
    return std::norm(signal) / (sigma2_r * denom);
}

// Unit-norm eigen-waveform scaled to the radar power budget.
inline WaveformDesign optimal_waveform(const RadarOperators& ops, double p_r)
{
    if (!(p_r >= 0.0))
        throw Error(ErrorCode::invalid_argument, "optimal_waveform: p_r must be >= 0");
    const Eigenpair top = principal_eigenpair(waveform_gain_matrix(ops));
    return {std::sqrt(p_r) * top.vector, p_r};
}

// s^H D C(Q)^{-1} D^H s.
inline double sinr_overlap(const RadarOperators& ops, const CVec& s_r, const CMat& q_c, double sigma2_r)
{
    require_psd(q_c, "sinr_overlap");
    const CMat c_q = build_c_of_q(ops, q_c, sigma2_r);
    const auto llt = detail::checked_pd_factor(c_q);
    const CVec t = ops.d_mat.adjoint() * s_r;
    return std::max(0.0, hpd_quadratic_refined(llt, c_q, t));
}

} // namespace radcom

#endif // RADCOM_RADAR_RX_HPP
