// SPDX-License-Identifier: Apache-2.0
//
// rmtstap: random-matrix-theory corrected space-time adaptive processing
// Copyright (C) 2026 The rmtstap Authors
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

#include "sampling.hpp"
#include "scene.hpp"

#include <array>
#include <functional>
#include <string_view>

namespace rmtstap
{
    enum class Method
    {
        optimal,
        fd_sample,
        rd_sample,
        rmt_fd,
        rmt_rd,
    };

    inline constexpr std::array<Method, 5> kAllMethods{Method::optimal, Method::fd_sample, Method::rd_sample,
                                                       Method::rmt_fd, Method::rmt_rd};

    /// Short name used in scenario files and CSV output.
    inline constexpr std::string_view method_name(Method m)
    {
        switch (m)
        {
        case Method::optimal:
            return "optimal";
        case Method::fd_sample:
            return "fd";
        case Method::rd_sample:
            return "rd";
        case Method::rmt_fd:
            return "rmt_fd";
        case Method::rmt_rd:
            return "rmt_rd";
        }
        return "unknown";
    }

    inline bool is_reduced(Method m) { return m == Method::rd_sample || m == Method::rmt_rd; }

    /// Action of an inverse-covariance estimate on a vector.
    using InverseOperator = std::function<ComplexVector(const ComplexVector &)>;

    /// Weight vector together with the steering vector it was constrained against (w^H target = 1).
    struct StapWeights
    {
        ComplexVector w;
        ComplexVector target;
        Method method = Method::optimal;

        cdouble gain() const { return w.dot(target); } // Eigen's dot conjugates the first argument
    };

    struct PowerReport
    {
        double output_power = 0.0;
        double scnr_loss = 0.0;
    };

    /// w = R^-1 a / (a^H R^-1 a) for the supplied inverse action.
    inline StapWeights lcmv_weights(const InverseOperator &inv_apply, const ComplexVector &target, Method method)
    {
        ComplexVector x = inv_apply(target);
        if (x.size() != target.size())
            throw ContractViolation("lcmv_weights: inverse operator changed the dimension");
        const cdouble denom = target.dot(x);
        if (!std::isfinite(denom.real()) || !(denom.real() > 0.0))
            throw NumericalFailure("lcmv_weights: a^H R^-1 a is not positive; inverse estimate is broken");
        // Dividing by the complex value keeps w^H a = 1 exactly even with a rounding-level imaginary part.
        return {x / denom, target, method};
    }

    inline StapWeights lcmv_weights(const InverseOperator &inv_apply, const SpaceTimeSteering &target, Method method)
    {
        return lcmv_weights(inv_apply, target.vector, method);
    }

    inline double output_power(const ComplexVector &w, const ComplexMatrix &r_true)
    {
        if (w.size() != r_true.rows())
            throw ContractViolation("output_power: dimension mismatch");
        return w.dot(r_true * w).real();
    }

    inline double output_power(const StapWeights &w, const ComplexMatrix &r_true) { return output_power(w.w, r_true); }

    /// (sigma_n^2 / NK) |w^H a|^2 / (w^H R w): output SCNR relative to the clutter-free matched filter.
    inline double scnr_loss(const StapWeights &w, const ComplexMatrix &r_true, double noise_power, std::size_t dof)
    {
        const double power = output_power(w, r_true);
        return noise_power / static_cast<double>(dof) * std::norm(w.gain()) / power;
    }

    inline PowerReport evaluate(const StapWeights &w, const ComplexMatrix &r_true, double noise_power, std::size_t dof)
    {
        const double power = output_power(w, r_true);
        return {power, noise_power / static_cast<double>(dof) * std::norm(w.gain()) / power};
    }

    inline InverseOperator as_operator(const HermitianPseudoInverse &pinv)
    {
        return [&pinv](const ComplexVector &v) { return pinv.apply(v); };
    }

    /// Clairvoyant LCMV weights from the exact covariance.
    inline StapWeights optimal_stap(const ComplexMatrix &r_true, const ComplexVector &target)
    {
        const HermitianPseudoInverse inv(r_true);
        return lcmv_weights(as_operator(inv), target, Method::optimal);
    }

    /// Closed-form minimum output power 1 / (a^H R^-1 a).
    inline double optimal_power(const ComplexMatrix &r_true, const ComplexVector &target)
    {
        return 1.0 / target.dot(solve_or_pinv(r_true, target)).real();
    }

    /// Sample-matrix-inversion weights; a rank-deficient sample covariance goes through the pseudo-inverse.
    inline StapWeights fd_stap(const HermitianPseudoInverse &sample_inverse, const ComplexVector &target)
    {
        return lcmv_weights(as_operator(sample_inverse), target, Method::fd_sample);
    }

    inline StapWeights fd_stap(const SampleCncm &sample, const SpaceTimeSteering &target)
    {
        return fd_stap(HermitianPseudoInverse(sample.matrix), target.vector);
    }

} // namespace rmtstap
