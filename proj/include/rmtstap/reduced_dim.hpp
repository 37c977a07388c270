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

#include "stap_core.hpp"

#include <optional>

namespace rmtstap
{
    /// EFA transform T = F kron I_N: n_channels adjacent unit-norm Doppler filters times all spatial channels.
    struct ReducedTransform
    {
        ComplexMatrix matrix; // NK x M
        std::vector<long> doppler_bins;
        long target_bin = 0;

        Eigen::Index reduced_dim() const { return matrix.cols(); }
    };

    struct ReducedScene
    {
        ComplexMatrix covariance; // T^H R T
        ComplexVector target;     // T^H a
        std::size_t local_rank = 0;
    };

    inline constexpr double kSpikeThreshold = 0.05;

    /**
     * Extended-factored (EFA) transform centred on the DFT bin nearest the target Doppler.
     *
     * Filter c sits at bin b + c - (n_channels-1)/2 of the K-point DFT grid, so the columns are
     * orthonormal and white noise stays white after reduction.
     */
    inline ReducedTransform efa_transform(const RadarConfig &cfg, double target_f_t, std::size_t n_channels)
    {
        const std::size_t n = cfg.n_elements;
        const std::size_t k = cfg.n_pulses;
        if (n_channels == 0 || n_channels % 2 == 0)
            throw ContractViolation("efa_transform: n_channels must be odd");
        if (n_channels >= k)
            throw ContractViolation("efa_transform: n_channels must be smaller than the pulse count");

        ReducedTransform t;
        t.target_bin = std::lround(target_f_t * static_cast<double>(k));
        const long half = static_cast<long>(n_channels - 1) / 2;
        const double inv_sqrt_k = 1.0 / std::sqrt(static_cast<double>(k));
        t.matrix = ComplexMatrix::Zero(static_cast<Eigen::Index>(n * k), static_cast<Eigen::Index>(n_channels * n));
        for (std::size_t c = 0; c < n_channels; ++c)
        {
            const long bin = t.target_bin + static_cast<long>(c) - half;
            t.doppler_bins.push_back(bin);
            const double f = static_cast<double>(bin) / static_cast<double>(k);
            const ComplexVector filter = temporal_steering(f, k) * inv_sqrt_k;
            for (std::size_t p = 0; p < k; ++p)
                for (std::size_t e = 0; e < n; ++e)
                    t.matrix(static_cast<Eigen::Index>(p * n + e), static_cast<Eigen::Index>(c * n + e)) =
                        filter(static_cast<Eigen::Index>(p));
        }
        return t;
    }

    /// Number of eigenvalues of the reduced covariance above sigma_n^2 (1 + tau).
    inline std::size_t local_clutter_rank(const ComplexMatrix &reduced_cov, double noise_power,
                                          double tau = kSpikeThreshold)
    {
        const EigenSystem es = eigh(reduced_cov);
        std::size_t count = 0;
        for (Eigen::Index i = 0; i < es.size(); ++i)
            if (es.values(i) > noise_power * (1.0 + tau))
                ++count;
        return count;
    }

    /// Reduced covariance and steering; the local clutter rank is estimated unless an override is given.
    inline ReducedScene reduce(const ClutterScene &scene, const ReducedTransform &t, const ComplexVector &target,
                               std::optional<std::size_t> local_rank_override = std::nullopt)
    {
        if (t.matrix.rows() != scene.covariance.rows() || target.size() != t.matrix.rows())
            throw ContractViolation("reduce: transform does not match the scene dimension");
        ReducedScene rs;
        ComplexMatrix r = t.matrix.adjoint() * scene.covariance * t.matrix;
        rs.covariance = 0.5 * (r + r.adjoint());
        rs.target = t.matrix.adjoint() * target;
        rs.local_rank = local_rank_override ? *local_rank_override
                                            : local_clutter_rank(rs.covariance, scene.noise_power());
        return rs;
    }

    inline ReducedScene reduce(const ClutterScene &scene, const ReducedTransform &t, const SpaceTimeSteering &target,
                               std::optional<std::size_t> local_rank_override = std::nullopt)
    {
        return reduce(scene, t, target.vector, local_rank_override);
    }

    /// Sample covariance of the reduced snapshots T^H x_l (equal to T^H R_L T).
    inline SampleCncm reduce_samples(const SnapshotSet &set, const ReducedTransform &t)
    {
        if (t.matrix.rows() != set.dim())
            throw ContractViolation("reduce_samples: transform does not match the snapshot dimension");
        return sample_cncm(ComplexMatrix(t.matrix.adjoint() * set.data));
    }

    inline StapWeights rd_stap(const HermitianPseudoInverse &sample_inverse, const ComplexVector &reduced_target)
    {
        return lcmv_weights(as_operator(sample_inverse), reduced_target, Method::rd_sample);
    }

    inline StapWeights rd_stap(const SampleCncm &sample_rd, const ComplexVector &reduced_target)
    {
        return rd_stap(HermitianPseudoInverse(sample_rd.matrix), reduced_target);
    }

} // namespace rmtstap
