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

#include "numerics.hpp"

#include <cstddef>
#include <numbers>
#include <utility>
#include <vector>

namespace rmtstap
{
    /// Side-looking ULA platform, waveform and clutter-model parameters.
    struct RadarConfig
    {
        std::size_t n_elements = 8;     // N
        std::size_t n_pulses = 8;       // K
        double prf_hz = 2000.0;         // f_r
        double wavelength_m = 0.3;      // lambda
        double spacing_m = 0.15;        // element spacing, lambda/2
        double height_m = 6000.0;       // kept for documentation; elevation is set explicitly
        double velocity_mps = 150.0;    // V
        double noise_power = 1.0;       // sigma_n^2, linear
        double cnr_db = 30.0;           // total clutter power over noise power per channel
        std::size_t n_patches = 361;    // N_c
        double elevation_rad = 0.0;     // phi_l of the range cell

        std::size_t dof() const { return n_elements * n_pulses; }

        /// Clutter ridge slope xi = 2V / (spacing * f_r).
        double slope() const { return 2.0 * velocity_mps / (spacing_m * prf_hz); }

        /// Throws ContractViolation when a field is out of range.
        void validate() const
        {
            if (n_elements < 1 || n_pulses < 1)
                throw ContractViolation("RadarConfig: n_elements and n_pulses must be >= 1");
            if (!(prf_hz > 0.0) || !(wavelength_m > 0.0) || !(spacing_m > 0.0))
                throw ContractViolation("RadarConfig: prf, wavelength and spacing must be positive");
            if (!(noise_power > 0.0))
                throw ContractViolation("RadarConfig: noise power must be positive");
            if (n_patches < 1)
                throw ContractViolation("RadarConfig: n_patches must be >= 1");
            if (!(velocity_mps >= 0.0))
                throw ContractViolation("RadarConfig: velocity must be non-negative");
        }
    };

    /// The parameter set of the reference simulations (8 elements, 8 pulses, 2 kHz PRF, 0.3 m, CNR 30 dB).
    inline RadarConfig reference_config(double velocity_mps = 150.0)
    {
        RadarConfig cfg;
        cfg.velocity_mps = velocity_mps;
        return cfg;
    }

    struct SpaceTimeSteering
    {
        double f_t = 0.0; // normalized Doppler, cycles/pulse
        double f_s = 0.0; // normalized spatial frequency, cycles/element
        ComplexVector vector;
    };

    namespace detail
    {
        // exp(j 2 pi f m) with f reduced to [0,1) first so that f and f+1 give bit-identical phases.
        inline cdouble unit_phasor(double f, std::size_t m)
        {
            const double frac = f - std::floor(f);
            const double cycles = frac * static_cast<double>(m);
            const double phase = 2.0 * std::numbers::pi * (cycles - std::floor(cycles));
            return {std::cos(phase), std::sin(phase)};
        }
    }

    /// Temporal steering vector [1, e^{j2 pi f}, ..., e^{j2 pi (K-1) f}].
    inline ComplexVector temporal_steering(double f_t, std::size_t n_pulses)
    {
        ComplexVector v(static_cast<Eigen::Index>(n_pulses));
        for (std::size_t k = 0; k < n_pulses; ++k)
            v(static_cast<Eigen::Index>(k)) = detail::unit_phasor(f_t, k);
        return v;
    }

    /// Space-time steering vector a_t(f_t) kron a_s(f_s); entry k*N + n is exp(j2 pi (f_t k + f_s n)).
    inline SpaceTimeSteering steering(double f_t, double f_s, std::size_t n_elements, std::size_t n_pulses)
    {
        SpaceTimeSteering st{f_t, f_s, ComplexVector(static_cast<Eigen::Index>(n_elements * n_pulses))};
        for (std::size_t k = 0; k < n_pulses; ++k)
        {
            const cdouble temporal = detail::unit_phasor(f_t, k);
            for (std::size_t n = 0; n < n_elements; ++n)
                st.vector(static_cast<Eigen::Index>(k * n_elements + n)) = temporal * detail::unit_phasor(f_s, n);
        }
        return st;
    }

    inline SpaceTimeSteering steering(double f_t, double f_s, const RadarConfig &cfg)
    {
        return steering(f_t, f_s, cfg.n_elements, cfg.n_pulses);
    }

    struct PatchFrequency
    {
        double f_t;
        double f_s;
    };

    /// Normalized (Doppler, spatial) frequency of a clutter patch at azimuth theta.
    inline PatchFrequency patch_frequency(const RadarConfig &cfg, double azimuth_rad)
    {
        const double cone = std::cos(azimuth_rad) * std::cos(cfg.elevation_rad);
        return {2.0 * cfg.velocity_mps / (cfg.wavelength_m * cfg.prf_hz) * cone,
                cfg.spacing_m / cfg.wavelength_m * cone};
    }

    /// Patch azimuths theta_i = i*pi/N_c, i = 0..N_c-1, evenly covering [0, pi).
    inline std::vector<PatchFrequency> clutter_frequencies(const RadarConfig &cfg)
    {
        std::vector<PatchFrequency> out;
        out.reserve(cfg.n_patches);
        for (std::size_t i = 0; i < cfg.n_patches; ++i)
        {
            const double theta = std::numbers::pi * static_cast<double>(i) / static_cast<double>(cfg.n_patches);
            out.push_back(patch_frequency(cfg, theta));
        }
        return out;
    }

    /// Brennan rule Q = floor(N + (K-1) xi).
    inline std::size_t clutter_rank(std::size_t n_elements, std::size_t n_pulses, double slope)
    {
        if (slope < 0.0)
            throw ContractViolation("clutter_rank: slope must be non-negative");
        // A hair of slack so that xi computed as 0.99999999 from 2V/(d f_r) still floors to the integer rank.
        const double q = static_cast<double>(n_elements) + static_cast<double>(n_pulses - 1) * slope;
        return static_cast<std::size_t>(std::floor(q + 1e-9));
    }

    struct ClutterScene
    {
        RadarConfig config;
        std::vector<PatchFrequency> patch_freqs;
        std::vector<double> patch_powers; // |Gamma_i|^2
        ComplexMatrix covariance;         // R, NK x NK
        ComplexMatrix covariance_sqrt;    // R^{1/2}, used for snapshot synthesis
        double slope = 0.0;
        std::size_t clutter_rank = 0;

        std::size_t dof() const { return config.dof(); }
        double noise_power() const { return config.noise_power; }
    };

    /**
     * Exact clutter-plus-noise covariance of one range cell.
     *
     * R = sum_i |Gamma_i|^2 a(f_ci) a(f_ci)^H + sigma_n^2 I with equal patch powers whose
     * total equals sigma_n^2 * 10^(cnr/10). A cnr of -inf gives a noise-only scene.
     */
    inline ClutterScene build_scene(const RadarConfig &cfg)
    {
        cfg.validate();
        ClutterScene scene;
        scene.config = cfg;
        scene.patch_freqs = clutter_frequencies(cfg);
        const double total = cfg.noise_power * from_db10(cfg.cnr_db);
        scene.patch_powers.assign(cfg.n_patches, total / static_cast<double>(cfg.n_patches));

        const auto dim = static_cast<Eigen::Index>(cfg.dof());
        ComplexMatrix steer(dim, static_cast<Eigen::Index>(cfg.n_patches));
        for (std::size_t i = 0; i < cfg.n_patches; ++i)
            steer.col(static_cast<Eigen::Index>(i)) =
                steering(scene.patch_freqs[i].f_t, scene.patch_freqs[i].f_s, cfg).vector *
                std::sqrt(scene.patch_powers[i]);

        ComplexMatrix r = steer * steer.adjoint();
        r.diagonal().array() += cfg.noise_power;
        scene.covariance = 0.5 * (r + r.adjoint());
        scene.covariance_sqrt = herm_sqrt(scene.covariance);
        scene.slope = cfg.slope();
        scene.clutter_rank = rmtstap::clutter_rank(cfg.n_elements, cfg.n_pulses, scene.slope);
        return scene;
    }

} // namespace rmtstap
