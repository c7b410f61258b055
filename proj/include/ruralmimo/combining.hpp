// SPDX-License-Identifier: Apache-2.0
//
// ruralmimo - link-level simulation and coverage planning for high-tower
// massive MIMO base stations
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

#pragma once

#include <limits>
#include <type_traits>

#include "ruralmimo/errors.hpp"
#include "ruralmimo/types.hpp"

namespace ruralmimo {

/// V = H (H^H H + diag(regularization))^{-1} without forming an inverse:
/// one Cholesky factorization of the users-by-users Gram system, then a
/// right-hand-side solve. The relative solve residual is bounded by
/// 1e-8 (double) and verified; failures indicate non-finite input.
template <typename Scalar>
ComplexMatrix<Scalar> regularized_gram_combiner(const ComplexMatrix<Scalar>& h,
                                                const RealVector<Scalar>& regularization) {
    const Eigen::Index num_users = h.cols();
    if (regularization.size() != num_users)
        throw ConfigError("regularization length must match the user count");
    if (num_users == 0)
        return h;

    ComplexMatrix<Scalar> gram = h.adjoint() * h;
    gram.diagonal() += regularization.template cast<std::complex<Scalar>>();

    const Eigen::LLT<ComplexMatrix<Scalar>> llt(gram);
    if (llt.info() != Eigen::Success)
        throw SingularSystem("Gram system is not positive definite");

    const ComplexMatrix<Scalar> rhs = h.adjoint();
    const ComplexMatrix<Scalar> solution = llt.solve(rhs);

    constexpr Scalar tolerance = std::is_same_v<Scalar, double> ? Scalar(1e-8) : Scalar(1e-4);
    const Scalar reference = rhs.norm();
    if (reference > Scalar(0)) {
        const Scalar residual = (gram * solution - rhs).norm() / reference;
        if (!(residual < tolerance))
            throw SingularSystem("Gram solve residual exceeds tolerance");
    }
    return solution.adjoint();
}

/// Effective SINR per user for receive vectors V against channel H with
/// transmit powers p and noise power sigma2. The noise term carries the
/// squared combiner norm, which makes the value invariant to per-column
/// rescaling of V.
template <typename Scalar>
RealVector<Scalar> combined_sinr(const ComplexMatrix<Scalar>& h, const ComplexMatrix<Scalar>& v,
                                 const RealVector<Scalar>& power_w, Scalar noise_power_w) {
    const Eigen::Index num_users = h.cols();
    if (v.rows() != h.rows() || v.cols() != num_users || power_w.size() != num_users)
        throw ConfigError("channel, combiner and power dimensions disagree");
    if (noise_power_w <= Scalar(0))
        throw ConfigError("noise power must be positive");

    const ComplexMatrix<Scalar> cross = v.adjoint() * h;
    RealVector<Scalar> out(num_users);
    for (Eigen::Index k = 0; k < num_users; ++k) {
        const Scalar signal = power_w[k] * std::norm(cross(k, k));
        Scalar interference = Scalar(0);
        for (Eigen::Index i = 0; i < num_users; ++i) {
            if (i != k)
                interference += power_w[i] * std::norm(cross(k, i));
        }
        const Scalar noise = noise_power_w * v.col(k).squaredNorm();
        out[k] = signal / (interference + noise);
    }
    return out;
}

}
