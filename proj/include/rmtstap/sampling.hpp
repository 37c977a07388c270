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

#include "scene.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numbers>
#include <random>
#include <string>

namespace rmtstap
{
    /// L target-free training snapshots, one per column of `data` (NK x L).
    struct SnapshotSet
    {
        ComplexMatrix data;
        std::uint64_t seed = 0;

        Eigen::Index n_samples() const { return data.cols(); }
        Eigen::Index dim() const { return data.rows(); }
    };

    /// Sample covariance (1/L) sum_l x_l x_l^H.
    struct SampleCncm
    {
        ComplexMatrix matrix;
        Eigen::Index n_samples = 0;

        Eigen::Index dim() const { return matrix.rows(); }
    };

    /**
     * Standard circular complex Gaussian source driven by a 64-bit Mersenne twister.
     *
     * Box-Muller on raw 53-bit uniforms so that the stream is identical across standard
     * library implementations (std::normal_distribution is not).
     */
    class ComplexGaussianSource
    {
    public:
        explicit ComplexGaussianSource(std::uint64_t seed) : engine_(seed) {}

        cdouble operator()()
        {
            const double u1 = uniform_open();
            const double u2 = uniform_open();
            const double radius = std::sqrt(-std::log(u1)); // variance 1/2 per component
            const double angle = 2.0 * std::numbers::pi * u2;
            return {radius * std::cos(angle), radius * std::sin(angle)};
        }

    private:
        // (0, 1]
        double uniform_open() { return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53; }

        std::mt19937_64 engine_;
    };

    /// Columns colour * z_l with z_l standard circular complex Gaussian, l = 0..n_samples-1.
    inline ComplexMatrix draw_gaussian(const ComplexMatrix &colour, Eigen::Index n_samples, std::uint64_t seed)
    {
        if (n_samples < 1)
            throw ContractViolation("draw_gaussian: need at least one snapshot");
        const Eigen::Index dim = colour.cols();
        ComplexGaussianSource source(seed);
        ComplexMatrix white(dim, n_samples);
        for (Eigen::Index l = 0; l < n_samples; ++l)
            for (Eigen::Index i = 0; i < dim; ++i)
                white(i, l) = source();
        return colour * white;
    }

    /// Snapshots x_l = R^{1/2} z_l; a fixed seed always reproduces the same set.
    inline SnapshotSet draw_snapshots(const ClutterScene &scene, Eigen::Index n_samples, std::uint64_t seed)
    {
        return {draw_gaussian(scene.covariance_sqrt, n_samples, seed), seed};
    }

    inline SampleCncm sample_cncm(const ComplexMatrix &snapshots)
    {
        const Eigen::Index n = snapshots.cols();
        if (n < 1)
            throw ContractViolation("sample_cncm: empty snapshot set");
        ComplexMatrix m = snapshots * snapshots.adjoint() / static_cast<double>(n);
        return {0.5 * (m + m.adjoint()), n};
    }

    inline SampleCncm sample_cncm(const SnapshotSet &set) { return sample_cncm(set.data); }

    // Snapshot dump: three little-endian uint64 (NK, L, seed) followed by L*NK complex64 values
    // as (re, im) float32 pairs, snapshot after snapshot.
    namespace detail
    {
        template <typename T>
        void put_le(std::ostream &os, T value)
        {
            unsigned char bytes[sizeof(T)];
            std::memcpy(bytes, &value, sizeof(T));
            if constexpr (std::endian::native == std::endian::big)
                std::reverse(std::begin(bytes), std::end(bytes));
            os.write(reinterpret_cast<const char *>(bytes), sizeof(T));
        }

        template <typename T>
        T get_le(std::istream &is)
        {
            unsigned char bytes[sizeof(T)];
            if (!is.read(reinterpret_cast<char *>(bytes), sizeof(T)))
                throw std::runtime_error("snapshot file truncated");
            if constexpr (std::endian::native == std::endian::big)
                std::reverse(std::begin(bytes), std::end(bytes));
            T value;
            std::memcpy(&value, bytes, sizeof(T));
            return value;
        }
    }

    inline void write_snapshots(const SnapshotSet &set, const std::string &path)
    {
        std::ofstream os(path, std::ios::binary | std::ios::trunc);
        if (!os)
            throw std::runtime_error("cannot open " + path + " for writing");
        detail::put_le<std::uint64_t>(os, static_cast<std::uint64_t>(set.dim()));
        detail::put_le<std::uint64_t>(os, static_cast<std::uint64_t>(set.n_samples()));
        detail::put_le<std::uint64_t>(os, set.seed);
        for (Eigen::Index l = 0; l < set.n_samples(); ++l)
            for (Eigen::Index i = 0; i < set.dim(); ++i)
            {
                detail::put_le<float>(os, static_cast<float>(set.data(i, l).real()));
                detail::put_le<float>(os, static_cast<float>(set.data(i, l).imag()));
            }
        if (!os)
            throw std::runtime_error("write failed for " + path);
    }

    /// Reads a dump written by write_snapshots (values come back at float precision).
    inline SnapshotSet read_snapshots(const std::string &path)
    {
        std::ifstream is(path, std::ios::binary);
        if (!is)
            throw std::runtime_error("cannot open " + path);
        const auto dim = detail::get_le<std::uint64_t>(is);
        const auto n = detail::get_le<std::uint64_t>(is);
        SnapshotSet set;
        set.seed = detail::get_le<std::uint64_t>(is);
        set.data.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(n));
        for (Eigen::Index l = 0; l < set.data.cols(); ++l)
            for (Eigen::Index i = 0; i < set.data.rows(); ++i)
            {
                const float re = detail::get_le<float>(is);
                const float im = detail::get_le<float>(is);
                set.data(i, l) = cdouble(re, im);
            }
        return set;
    }

} // namespace rmtstap
