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

#include "reduced_dim.hpp"
#include "stap_core.hpp"

#include <optional>
#include <span>

namespace rmtstap
{
    /// Raised when the training set is too small for a spiked-model correction (L below the clutter rank).
    class NotApplicable : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    inline constexpr double kEdgeGuard = 1e-6;
    inline constexpr double kOverlapClampMargin = 1e-9;

    /// Dimension-to-sample ratio c_N = dim / L.
    struct SpikedRatio
    {
        double c = 0.0;
        Eigen::Index dim = 0;
        Eigen::Index n_samples = 0;

        static SpikedRatio of(Eigen::Index dim, Eigen::Index n_samples)
        {
            if (dim < 1 || n_samples < 1)
                throw ContractViolation("SpikedRatio: dimension and sample count must be positive");
            return {static_cast<double>(dim) / static_cast<double>(n_samples), dim, n_samples};
        }
    };

    /// Upper edge (1 + sqrt(c))^2 of the Marchenko-Pastur bulk for unit noise.
    inline double bulk_edge(double c) { return (1.0 + std::sqrt(c)) * (1.0 + std::sqrt(c)); }

    /// Fraction s = (1 - c/rho^2) / (1 + c/rho) of a spike eigenvector captured by its sample counterpart.
    inline double spike_alignment(double rho, double c) { return (1.0 - c / (rho * rho)) / (1.0 + c / rho); }

    /// Sample eigenvalue a spike rho is pushed to: mu = 1 + rho + c (1 + rho) / rho.
    inline double spike_to_sample(double rho, double c) { return 1.0 + rho + c * (1.0 + rho) / rho; }

    /**
     * Inverts mu = 1 + rho + c (1 + rho) / rho for the population spike rho.
     *
     * Empty when mu does not clear the bulk edge by kEdgeGuard; such a spike cannot be
     * separated from noise and is left uncorrected by the caller.
     */
    inline std::optional<double> estimate_rho(double mu, double c)
    {
        if (!(mu > bulk_edge(c) + kEdgeGuard))
            return std::nullopt;
        const double b = mu - 1.0 - c;
        const double disc = b * b - 4.0 * c;
        if (disc < 0.0)
            return std::nullopt;
        return 0.5 * (b + std::sqrt(disc));
    }

    /// Population overlap k = |a^H v|^2 recovered from the sample overlap |a^H u|^2.
    inline std::optional<double> estimate_k(double sample_overlap, double rho, double c)
    {
        if (!(rho * rho > c))
            return std::nullopt;
        return (1.0 + c / rho) / (1.0 - c / (rho * rho)) * sample_overlap;
    }

    inline std::optional<double> estimate_k(const ComplexVector &a, const ComplexVector &u, double rho, double c)
    {
        return estimate_k(std::norm(u.dot(a)), rho, c);
    }

    /**
     * Closed-form minimiser of the deterministic-equivalent output power over the spike corrections h.
     *
     * h_i = (rho_i + c)/(rho_i^2 + rho_i) * [ (sum_q c k_q/rho_q) / (a^H a - sum_q k_q + sum_q c k_q/rho_q^2) - rho_i ].
     * The corrected inverse eigenvalue along u_i is (1 + h_i) / sigma_n^2.
     */
    inline std::vector<double> optimal_h(std::span<const double> rho, std::span<const double> k, double a_norm_sq,
                                         double c)
    {
        if (rho.size() != k.size())
            throw ContractViolation("optimal_h: rho and k must have the same length");
        double numer = 0.0;
        double denom = a_norm_sq;
        for (std::size_t q = 0; q < rho.size(); ++q)
        {
            numer += c * k[q] / rho[q];
            denom += -k[q] + c * k[q] / (rho[q] * rho[q]);
        }
        if (!(denom > 0.0))
            throw NumericalFailure("optimal_h: non-positive denominator, overlap estimates exceed a^H a");
        const double ratio = numer / denom;
        std::vector<double> h(rho.size());
        for (std::size_t i = 0; i < rho.size(); ++i)
            h[i] = (rho[i] + c) / (rho[i] * rho[i] + rho[i]) * (ratio - rho[i]);
        return h;
    }

    /**
     * Large-dimension deterministic equivalent of the output power for corrections h, evaluated term by term:
     *
     *   sigma^2 [ a^H a + 2 sum h s k + sum k rho + 2 sum h rho s k + sum h^2 s k + sum h^2 rho s^2 k ]
     *   / (a^H a + sum h s k)^2
     */
    inline double deterministic_equivalent_power(std::span<const double> h, std::span<const double> rho,
                                                 std::span<const double> k, double a_norm_sq, double noise_power,
                                                 std::span<const double> s)
    {
        if (h.size() != rho.size() || h.size() != k.size() || h.size() != s.size())
            throw ContractViolation("deterministic_equivalent_power: length mismatch");
        double gain = a_norm_sq;
        double numer = a_norm_sq;
        for (std::size_t i = 0; i < h.size(); ++i)
        {
            gain += h[i] * s[i] * k[i];
            numer += 2.0 * h[i] * s[i] * k[i] + k[i] * rho[i] + 2.0 * h[i] * rho[i] * s[i] * k[i] +
                     h[i] * h[i] * s[i] * k[i] + h[i] * h[i] * rho[i] * s[i] * s[i] * k[i];
        }
        if (gain == 0.0)
            throw NumericalFailure("deterministic_equivalent_power: zero denominator");
        return noise_power * numer / (gain * gain);
    }

    /// Per-spike estimates for the leading Q sample eigenpairs.
    struct SpikeCorrection
    {
        double c = 0.0;
        std::vector<double> sample_eig; // mu_i, noise-normalised
        std::vector<double> rho_hat;
        std::vector<double> k_hat;
        std::vector<double> h_hat;
        std::vector<bool> usable;
        bool clamped = false; // overlap estimates were scaled down to keep the denominator positive

        std::size_t size() const { return sample_eig.size(); }
        std::size_t n_usable() const { return static_cast<std::size_t>(std::count(usable.begin(), usable.end(), true)); }
    };

    /// (1/sigma_n^2) (I + sum_i h_i u_i u_i^H).
    class CorrectedInverse
    {
    public:
        CorrectedInverse(SpikeCorrection correction, ComplexMatrix eigvecs, double noise_power)
            : correction_(std::move(correction)), eigvecs_(std::move(eigvecs)), noise_power_(noise_power)
        {
        }

        ComplexVector apply(const ComplexVector &v) const
        {
            if (v.size() != dim())
                throw ContractViolation("CorrectedInverse: dimension mismatch");
            ComplexVector out = v;
            if (eigvecs_.cols() > 0)
            {
                ComplexVector coeffs = eigvecs_.adjoint() * v;
                for (Eigen::Index i = 0; i < coeffs.size(); ++i)
                    coeffs(i) *= correction_.h_hat[static_cast<std::size_t>(i)];
                out += eigvecs_ * coeffs;
            }
            return out / noise_power_;
        }

        ComplexMatrix matrix() const
        {
            ComplexMatrix m = ComplexMatrix::Identity(dim(), dim());
            for (Eigen::Index i = 0; i < eigvecs_.cols(); ++i)
                m += correction_.h_hat[static_cast<std::size_t>(i)] * eigvecs_.col(i) * eigvecs_.col(i).adjoint();
            return m / noise_power_;
        }

        InverseOperator as_operator() const
        {
            return [this](const ComplexVector &v) { return apply(v); };
        }

        const SpikeCorrection &correction() const { return correction_; }
        const ComplexMatrix &eigvecs() const { return eigvecs_; }
        double noise_power() const { return noise_power_; }
        Eigen::Index dim() const { return eigvecs_.rows(); }

    private:
        SpikeCorrection correction_;
        ComplexMatrix eigvecs_;
        double noise_power_;
    };

    /**
     * Spiked-model eigenvalue correction of a sample covariance given in eigen form.
     *
     * Takes the leading `rank` eigenpairs, estimates rho and k for each spike clearing the bulk
     * edge, and sets h by the closed-form optimum. Spikes inside the bulk keep h = 0. When the
     * summed overlap estimates would exceed a^H a they are scaled down together (flagged in
     * SpikeCorrection::clamped).
     */
    inline CorrectedInverse corrected_inverse(const EigenSystem &sample_es, Eigen::Index n_samples, std::size_t rank,
                                              const ComplexVector &target, double noise_power)
    {
        const Eigen::Index dim = sample_es.vectors.rows();
        if (target.size() != dim)
            throw ContractViolation("corrected_inverse: steering vector does not match the covariance");
        if (!(noise_power > 0.0))
            throw ContractViolation("corrected_inverse: noise power must be positive");
        if (static_cast<Eigen::Index>(rank) > dim)
            throw ContractViolation("corrected_inverse: clutter rank exceeds the dimension");
        if (n_samples < static_cast<Eigen::Index>(rank))
            throw NotApplicable("spiked correction needs at least as many training samples (" +
                                std::to_string(n_samples) + ") as clutter degrees of freedom (" +
                                std::to_string(rank) + ")");

        const SpikedRatio ratio = SpikedRatio::of(dim, n_samples);
        const double c = ratio.c;
        const double a_norm_sq = target.squaredNorm();

        SpikeCorrection corr;
        corr.c = c;
        corr.sample_eig.resize(rank);
        corr.rho_hat.assign(rank, 0.0);
        corr.k_hat.assign(rank, 0.0);
        corr.h_hat.assign(rank, 0.0);
        corr.usable.assign(rank, false);

        std::vector<std::size_t> idx;
        std::vector<double> rho;
        std::vector<double> k;
        for (std::size_t i = 0; i < rank; ++i)
        {
            const auto col = static_cast<Eigen::Index>(i);
            const double mu = sample_es.values(col) / noise_power;
            corr.sample_eig[i] = mu;
            const auto r = estimate_rho(mu, c);
            if (!r)
                continue;
            const auto kk = estimate_k(target, sample_es.vectors.col(col), *r, c);
            if (!kk)
                continue;
            corr.usable[i] = true;
            corr.rho_hat[i] = *r;
            corr.k_hat[i] = *kk;
            idx.push_back(i);
            rho.push_back(*r);
            k.push_back(*kk);
        }

        if (!idx.empty())
        {
            const double k_sum = std::accumulate(k.begin(), k.end(), 0.0);
            const double k_cap = a_norm_sq * (1.0 - kOverlapClampMargin);
            if (k_sum > k_cap)
            {
                const double scale = k_cap / k_sum;
                for (std::size_t j = 0; j < k.size(); ++j)
                {
                    k[j] *= scale;
                    corr.k_hat[idx[j]] = k[j];
                }
                corr.clamped = true;
            }
            const std::vector<double> h = optimal_h(rho, k, a_norm_sq, c);
            for (std::size_t j = 0; j < idx.size(); ++j)
                corr.h_hat[idx[j]] = h[j];
        }

        return CorrectedInverse(std::move(corr), sample_es.vectors.leftCols(static_cast<Eigen::Index>(rank)),
                                noise_power);
    }

    /// Full-dimension correction; `clutter_rank` is supplied by the caller (Brennan rule or a perturbed value).
    inline CorrectedInverse rmt_fd_inverse(const SampleCncm &sample, std::size_t clutter_rank,
                                           const SpaceTimeSteering &target, double noise_power)
    {
        return corrected_inverse(eigh(sample.matrix), sample.n_samples, clutter_rank, target.vector, noise_power);
    }

    /// Reduced-dimension correction with c = M / L and the local clutter rank.
    inline CorrectedInverse rmt_rd_inverse(const SampleCncm &sample_rd, std::size_t local_rank,
                                           const ComplexVector &reduced_target, double noise_power)
    {
        return corrected_inverse(eigh(sample_rd.matrix), sample_rd.n_samples, local_rank, reduced_target,
                                 noise_power);
    }

    inline StapWeights rmt_weights(const CorrectedInverse &inv, const ComplexVector &target, Method method)
    {
        return lcmv_weights(inv.as_operator(), target, method);
    }

    /**
     * Median of the trailing dim - rank sample eigenvalues, a stand-in when sigma_n^2 is unknown.
     *
     * Not part of the corrected estimator itself; biased low when L < dim since the trailing
     * eigenvalues then include exact zeros.
     */
    inline double estimate_noise_power(const EigenSystem &sample_es, std::size_t rank)
    {
        const auto dim = static_cast<std::size_t>(sample_es.size());
        if (rank >= dim)
            throw ContractViolation("estimate_noise_power: no noise eigenvalues left");
        std::vector<double> tail(sample_es.values.data() + rank, sample_es.values.data() + dim);
        const auto mid = tail.begin() + static_cast<std::ptrdiff_t>(tail.size() / 2);
        std::nth_element(tail.begin(), mid, tail.end());
        if (tail.size() % 2 == 1)
            return *mid;
        const double upper = *mid;
        const double lower = *std::max_element(tail.begin(), mid);
        return 0.5 * (lower + upper);
    }

} // namespace rmtstap
