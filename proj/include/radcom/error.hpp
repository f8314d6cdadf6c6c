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

#ifndef RADCOM_ERROR_HPP
#define RADCOM_ERROR_HPP

#include <stdexcept>
#include <string>

namespace radcom {

enum class ErrorCode {
    invalid_argument,
    not_hermitian,
    not_psd,
    not_positive_definite,
    infeasible,
    not_converged,
    no_feasible_candidate,
    io,
};

inline const char* to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::not_hermitian: return "matrix not Hermitian";
    case ErrorCode::not_psd: return "matrix not positive semidefinite";
    case ErrorCode::not_positive_definite: return "operator not positive definite";
    case ErrorCode::infeasible: return "infeasible";
    case ErrorCode::not_converged: return "not converged";
    case ErrorCode::no_feasible_candidate: return "no feasible rank-one candidate";
    case ErrorCode::io: return "I/O error";
    }
    return "unknown error";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code)
    {
    }

    explicit Error(ErrorCode code) : Error(code, to_string(code)) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace radcom

#endif // RADCOM_ERROR_HPP
