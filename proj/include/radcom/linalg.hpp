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

#ifndef RADCOM_LINALG_HPP
#define RADCOM_LINALG_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "radcom/error.hpp"

namespace radcom {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kLn2 = 0.69314718055994530942;

// Kronecker product A (x) B.
inline CMat kron(const CMat& a, const CMat& b)
{
    CMat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// I_L (x) B without forming the identity.
inline CMat block_diag_repeat(Eigen::Index copies, const CMat& b)
{
    CMat out = CMat::Zero(copies * b.rows(), copies * b.cols());
    for (Eigen::Index l = 0; l < copies; ++l)
        out.block(l * b.rows(), l * b.cols(), b.rows(), b.cols()) = b;
    return out;
}

inline CMat hermitian_part(const CMat& m) { return 0.5 * (m + m.adjoint()); }

// Symmetry check relative to the largest entry magnitude.
inline bool is_hermitian(const CMat& m, double rel_tol = 1e-9)
{
    if (m.rows() != m.cols())
        return false;
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

inline void require_hermitian(const CMat& m, const char* name, double rel_tol = 1e-9)
{
    if (!is_hermitian(m, rel_tol))
        throw Error(ErrorCode::not_hermitian, std::string(name) + ": matrix not Hermitian");
}

inline RVec hermitian_eigenvalues(const CMat& m)
{
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

// Hermitian and eigenvalues >= -tol * max(1, largest eigenvalue).
inline bool is_psd(const CMat& m, double rel_tol = 1e-9)
{
    if (!is_hermitian(m, rel_tol))
        return false;
    if (m.size() == 0)
        return true;
    const RVec ev = hermitian_eigenvalues(m);
    return ev.minCoeff() >= -rel_tol * std::max(1.0, std::abs(ev.maxCoeff()));
}

inline void require_psd(const CMat& m, const char* name, double rel_tol = 1e-9)
{
    require_hermitian(m, name, rel_tol);
    if (!is_psd(m, rel_tol))
        throw Error(ErrorCode::not_psd, std::string(name) + ": matrix not positive semidefinite");
}

// Cholesky factor of a Hermitian positive definite matrix; throws when the
// factorization breaks down.
inline Eigen::LLT<CMat> hpd_factor(const CMat& m)
{
    Eigen::LLT<CMat> llt(hermitian_part(m));
    if (llt.info() != Eigen::Success)
        throw Error(ErrorCode::not_positive_definite);
    const auto diag = llt.matrixLLT().diagonal().real();
    if (diag.size() > 0 && diag.minCoeff() <= 0.0)
        throw Error(ErrorCode::not_positive_definite);
    return llt;
}

inline double hpd_logdet(const CMat& m)
{
    const auto llt = hpd_factor(m);
    return 2.0 * llt.matrixLLT().diagonal().real().array().log().sum();
}

inline CMat hpd_inverse(const CMat& m)
{
    const auto llt = hpd_factor(m);
    return hermitian_part(llt.solve(CMat::Identity(m.rows(), m.cols())));
}

// ln det of an arbitrary square matrix whose determinant is real positive
// (e.g. I + AB with A, B PSD). Uses LU; the imaginary part is discarded.
inline double general_logdet(const CMat& m)
{
    Eigen::PartialPivLU<CMat> lu(m);
    const CMat& f = lu.matrixLU();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < f.rows(); ++i)
        acc += std::log(std::abs(f(i, i)));
    return acc;
}

// Hermitian P^{-1/2} for Hermitian positive definite P.
inline CMat hpd_inv_sqrt(const CMat& p)
{
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(p));
    const RVec ev = es.eigenvalues();
    if (ev.minCoeff() <= 0.0)
        throw Error(ErrorCode::not_positive_definite);
    const RVec s = ev.array().rsqrt();
    return hermitian_part(es.eigenvectors() * s.asDiagonal() * es.eigenvectors().adjoint());
}

// Hermitian PSD square root (negative eigenvalues clipped).
inline CMat psd_sqrt(const CMat& p)
{
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(p));
    const RVec s = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().adjoint();
}

// Rotates v so its first component with magnitude above tol is real positive.
inline CVec phase_normalize(CVec v, double tol = 1e-12)
{
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        const double mag = std::abs(v(k));
        if (mag > tol) {
            v *= std::conj(v(k)) / mag;
            return v;
        }
    }
    return v;
}

struct Eigenpair {
    double value = 0.0;
    CVec vector;
};

// Largest eigenpair of a Hermitian matrix. When the top eigenvalue is
// (near-)degenerate the candidate with the lexicographically largest
// |components| wins; the result is phase-normalized.
inline Eigenpair principal_eigenpair(const CMat& m, double degeneracy_tol = 1e-10)
{
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(m));
    const RVec& ev = es.eigenvalues();
    const Eigen::Index n = ev.size();
    const double top = ev(n - 1);
    const double band = degeneracy_tol * std::max(1.0, std::abs(top));

    Eigen::Index best = n - 1;
    for (Eigen::Index c = n - 2; c >= 0 && top - ev(c) <= band; --c) {
        const CVec& cand = es.eigenvectors().col(c);
        const CVec& cur = es.eigenvectors().col(best);
        for (Eigen::Index k = 0; k < cand.size(); ++k) {
            const double a = std::abs(cand(k));
            const double b = std::abs(cur(k));
            if (std::abs(a - b) > 1e-12) {
                if (a > b)
                    best = c;
                break;
            }
        }
    }
    return {top, phase_normalize(es.eigenvectors().col(best))};
}

inline double max_eigenvalue(const CMat& m) { return hermitian_eigenvalues(m).maxCoeff(); }
inline double min_eigenvalue(const CMat& m) { return hermitian_eigenvalues(m).minCoeff(); }

// Number of singular values above rel_tol * sigma_max.
inline Eigen::Index numeric_rank(const CMat& m, double rel_tol = 1e-8)
{
    Eigen::JacobiSVD<CMat> svd(m);
    const RVec sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0)
        return 0;
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > rel_tol * sv(0))
            ++r;
    return r;
}

inline double trace_real(const CMat& m) { return m.trace().real(); }

// Re tr(A B) without forming the product.
inline double trace_product_real(const CMat& a, const CMat& b)
{
    return (a.array() * b.transpose().array()).sum().real();
}

// Re tr(A B) accumulated in extended precision; for products of a matrix
// with its (ill-conditioned) inverse where the terms cancel heavily.
inline double trace_product_real_extended(const CMat& a, const CMat& b)
{
    long double acc = 0.0L;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            acc += static_cast<long double>(a(i, j).real()) * b(j, i).real() -
                   static_cast<long double>(a(i, j).imag()) * b(j, i).imag();
    return static_cast<double>(acc);
}

// HPD inverse with one refinement step X + X (I - M X), the residual formed
// in extended precision.
inline CMat hpd_inverse_refined(const CMat& m)
{
    using LCMat = Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, Eigen::Dynamic>;
    const CMat x = hpd_inverse(m);
    const LCMat ml = m.cast<std::complex<long double>>();
    const LCMat xl = x.cast<std::complex<long double>>();
    const LCMat resid = LCMat::Identity(m.rows(), m.cols()) - ml * xl;
    const CMat corr = (xl * resid).cast<cplx>();
    return hermitian_part(x + corr);
}

// t^H M^{-1} t for HPD M from its factor, with one refinement step on the
// solve and the residual and final product formed in extended precision.
inline double hpd_quadratic_refined(const Eigen::LLT<CMat>& llt, const CMat& m, const CVec& t)
{
    using LCVec = Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, 1>;
    CVec x = llt.solve(t);
    const LCVec tl = t.cast<std::complex<long double>>();
    const LCVec resid = tl - m.cast<std::complex<long double>>() * x.cast<std::complex<long double>>();
    const LCVec xl = x.cast<std::complex<long double>>() + llt.solve(resid.cast<cplx>()).cast<std::complex<long double>>();
    return static_cast<double>(tl.dot(xl).real());
}

inline double db_from_linear(double x) { return 10.0 * std::log10(x); }
inline double linear_from_db(double db) { return std::pow(10.0, db / 10.0); }

} // namespace radcom

#endif // RADCOM_LINALG_HPP
