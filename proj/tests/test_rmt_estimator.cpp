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


#include "oracles.hpp"

#include <catch_amalgamated.hpp>
#include <rmtstap/rmt_estimator.hpp>


using namespace rmtstap;

using oracle::median;
using oracle::spiked_model;

TEST_CASE("estimate_rho")
{
    SECTION("vanishing ratio recovers mu - 1")
    {
        CHECK(std::abs(*estimate_rho(5.0, 1e-12) - 4.0) < 1e-6);
    }
    SECTION("round trip through the spike-to-sample map")
    {
        const double mu = spike_to_sample(9.0, 0.5);
        CHECK(mu == Catch::Approx(10.5555555556).epsilon(1e-10));
        CHECK(std::abs(*estimate_rho(mu, 0.5) - 9.0) < 1e-9);
    }
    SECTION("at or below the bulk edge the spike is unusable")
    {
        for (double c : {0.25, 1.0, 4.27})
        {
            CHECK_FALSE(estimate_rho(bulk_edge(c), c).has_value());
            CHECK_FALSE(estimate_rho(bulk_edge(c) + 0.5 * kEdgeGuard, c).has_value());
            CHECK_FALSE(estimate_rho(0.5, c).has_value());
        }
    }
    SECTION("fixed-point residual on random inputs")
    {
        std::mt19937_64 rng(4);
        std::uniform_real_distribution<double> uc(1e-3, 8.0), ux(1e-3, 1e4);
        for (int rep = 0; rep < 2000; ++rep)
        {
            const double c = uc(rng);
            const double mu = bulk_edge(c) + ux(rng);
            const auto rho = estimate_rho(mu, c);
            REQUIRE(rho.has_value());
            CHECK(*rho > std::sqrt(c));
            CHECK(std::abs(mu - 1.0 - *rho - c * (1.0 + *rho) / *rho) < 1e-10 * mu);
        }
    }
}

TEST_CASE("estimate_k")
{
    SECTION("vanishing ratio leaves the sample overlap")
    {
        CHECK(*estimate_k(3.5, 20.0, 1e-14) == Catch::Approx(3.5));
    }
    SECTION("orthogonal target")
    {
        ComplexVector a = ComplexVector::Zero(4), u = ComplexVector::Zero(4);
        a(0) = 1.0;
        u(1) = 1.0;
        CHECK(*estimate_k(a, u, 10.0, 0.5) == 0.0);
    }
    SECTION("rho^2 <= c is unusable")
    {
        CHECK_FALSE(estimate_k(1.0, 1.0, 1.0).has_value());
    }
    SECTION("recovers the population overlap on a synthetic one-spike model")
    {
        const ComplexVector a = steering(0.3, 0.1, 8, 8).vector;
        const auto model = spiked_model(64, {50.0}, a, 17);
        const double k_true = std::norm(model.spikes.col(0).dot(a));
        REQUIRE(k_true > 1.0);
        std::vector<double> rel;
        for (std::uint64_t seed = 0; seed < 200; ++seed)
        {
            const ComplexMatrix x = draw_gaussian(model.sqrt, 128, seed);
            const EigenSystem es = eigh(sample_cncm(x).matrix);
            const double c = 0.5;
            const auto rho = estimate_rho(es.values(0), c);
            REQUIRE(rho.has_value());
            const auto k = estimate_k(a, es.vectors.col(0), *rho, c);
            rel.push_back(std::abs(*k - k_true) / k_true);
        }
        CHECK(median(rel) < 0.10);
    }
}

TEST_CASE("optimal_h - closed-form special cases")
{
    SECTION("target orthogonal to the clutter")
    {
        const double rho = 12.0, c = 0.7;
        const auto h = optimal_h(std::vector{rho}, std::vector{0.0}, 64.0, c);
        CHECK(h[0] == Catch::Approx(-(rho + c) / (rho + 1.0)));
    }
    SECTION("infinite-sample limit gives the exact inverse eigenvalue")
    {
        const std::vector<double> rho{30.0, 5.0};
        const auto h = optimal_h(rho, std::vector{4.0, 9.0}, 64.0, 1e-12);
        for (std::size_t i = 0; i < rho.size(); ++i)
            CHECK(1.0 + h[i] == Catch::Approx(1.0 / (1.0 + rho[i])).epsilon(1e-9));
    }
    SECTION("overlaps exceeding a^H a are rejected")
    {
        CHECK_THROWS_AS(optimal_h(std::vector{10.0}, std::vector{70.0}, 64.0, 0.1), NumericalFailure);
        CHECK_THROWS_AS(optimal_h(std::vector{10.0}, std::vector{1.0, 2.0}, 64.0, 0.1), ContractViolation);
    }
}

TEST_CASE("deterministic_equivalent_power")
{
    const std::vector<double> rho{20.0, 4.0}, k{3.0, 7.0}, s{0.9, 0.6};
    SECTION("no correction and no overlap is the noise matched-filter power")
    {
        CHECK(deterministic_equivalent_power(std::vector{0.0, 0.0}, rho, std::vector{0.0, 0.0}, 64.0, 2.0, s) ==
              Catch::Approx(2.0 / 64.0));
    }
    SECTION("no correction")
    {
        CHECK(deterministic_equivalent_power(std::vector{0.0, 0.0}, rho, k, 64.0, 1.0, s) ==
              Catch::Approx((64.0 + 3.0 * 20.0 + 7.0 * 4.0) / (64.0 * 64.0)));
    }
    SECTION("agrees with the oracle's own evaluation")
    {
        oracle::SpikeModel m{rho, k, s, 64.0, 1.5};
        Eigen::VectorXd h(2);
        h << -0.7, 0.3;
        CHECK(deterministic_equivalent_power(std::vector{-0.7, 0.3}, rho, k, 64.0, 1.5, s) ==
              Catch::Approx(oracle::power(m, h)).epsilon(1e-13));
    }
}

TEST_CASE("optimal_h minimises the deterministic equivalent (random instances)")
{
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> uc(0.05, 3.0), ur(1.0, 60.0), u01(0.0, 1.0);
    std::uniform_int_distribution<int> uq(1, 3);
    const double a_norm_sq = 64.0;
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep)
    {
        const int q = uq(rng);
        const double c = uc(rng);
        oracle::SpikeModel m;
        m.a_norm_sq = a_norm_sq;
        for (int i = 0; i < q; ++i)
        {
            m.rho.push_back(std::sqrt(c) + ur(rng));
            m.k.push_back(1.0 + u01(rng) * (a_norm_sq / (2.0 * q) - 1.0));
            m.s.push_back(oracle::alignment(m.rho.back(), c));
        }
        const auto h = optimal_h(m.rho, m.k, a_norm_sq, c);
        const Eigen::VectorXd numeric = oracle::minimise(m, Eigen::VectorXd::Zero(q));
        for (int i = 0; i < q; ++i)
            worst = std::max(worst, std::abs(h[static_cast<std::size_t>(i)] - numeric(i)));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("rmt_fd_inverse - guards and degenerate scenes")
{
    SECTION("noise-only scene with no clutter rank is the scaled identity")
    {
        RadarConfig cfg = reference_config();
        cfg.cnr_db = -std::numeric_limits<double>::infinity();
        cfg.noise_power = 2.0;
        const auto scene = build_scene(cfg);
        const auto a = steering(0.3, 0.0, cfg);
        const auto inv = rmt_fd_inverse(sample_cncm(draw_snapshots(scene, 20, 1)), 0, a, 2.0);
        CHECK((inv.matrix() - 0.5 * ComplexMatrix::Identity(64, 64)).norm() < 1e-14);
    }
    SECTION("fewer samples than the clutter rank")
    {
        const auto scene = build_scene(reference_config());
        const auto a = steering(0.3, 0.0, scene.config);
        const auto s = sample_cncm(draw_snapshots(scene, 10, 1));
        CHECK_THROWS_AS(rmt_fd_inverse(s, 15, a, 1.0), NotApplicable);
        CHECK_NOTHROW(rmt_fd_inverse(sample_cncm(draw_snapshots(scene, 15, 1)), 15, a, 1.0));
        CHECK_THROWS_AS(rmt_fd_inverse(s, 65, a, 1.0), ContractViolation);
        CHECK_THROWS_AS(rmt_fd_inverse(s, 5, a, 0.0), ContractViolation);
    }
}

TEST_CASE("rmt_fd_inverse - closed form on a reference scene matches the numerical optimum")
{
    const auto scene = build_scene(reference_config());
    const auto a = steering(0.3, 0.0, scene.config);
    for (std::uint64_t seed = 0; seed < 5; ++seed)
    {
        const auto inv = rmt_fd_inverse(sample_cncm(draw_snapshots(scene, 32, seed)), 15, a, 1.0);
        const auto &corr = inv.correction();
        REQUIRE_FALSE(corr.clamped);
        oracle::SpikeModel m;
        m.a_norm_sq = 64.0;
        std::vector<double> h;
        for (std::size_t i = 0; i < corr.size(); ++i)
            if (corr.usable[i])
            {
                m.rho.push_back(corr.rho_hat[i]);
                m.k.push_back(corr.k_hat[i]);
                m.s.push_back(oracle::alignment(corr.rho_hat[i], corr.c));
                h.push_back(corr.h_hat[i]);
            }
        REQUIRE(m.size() > 0);
        const Eigen::VectorXd numeric = oracle::minimise(m, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m.size())));
        for (std::size_t i = 0; i < h.size(); ++i)
            CHECK(std::abs(h[i] - numeric(static_cast<Eigen::Index>(i))) < 1e-6);
    }
}

TEST_CASE("rmt_rd_inverse")
{
    const auto scene = build_scene(reference_config());
    const auto a = steering(0.3, 0.0, scene.config);

    SECTION("identity transform reproduces the full-dimension correction")
    {
        const auto set = draw_snapshots(scene, 40, 3);
        ReducedTransform identity;
        identity.matrix = ComplexMatrix::Identity(64, 64);
        const auto full = rmt_fd_inverse(sample_cncm(set), 15, a, 1.0);
        const auto red = rmt_rd_inverse(reduce_samples(set, identity), 15, a.vector, 1.0);
        CHECK((full.matrix() - red.matrix()).norm() < 1e-10 * full.matrix().norm());
    }
    SECTION("target orthogonal to the sample clutter subspace gets zero overlaps")
    {
        const auto t = efa_transform(scene.config, 0.3, 3);
        const auto s_rd = reduce_samples(draw_snapshots(scene, 30, 4), t);
        const EigenSystem es = eigh(s_rd.matrix);
        const ComplexMatrix top = es.vectors.leftCols(10);
        const ComplexVector a_rd = t.matrix.adjoint() * a.vector;
        const ComplexVector a_perp = a_rd - top * (top.adjoint() * a_rd);
        const auto inv = rmt_rd_inverse(s_rd, 10, a_perp, 1.0);
        const auto &corr = inv.correction();
        for (std::size_t i = 0; i < corr.size(); ++i)
        {
            REQUIRE(corr.usable[i]);
            CHECK(corr.k_hat[i] < 1e-20 * a_perp.squaredNorm());
            CHECK(corr.h_hat[i] == Catch::Approx(-(corr.rho_hat[i] + corr.c) / (corr.rho_hat[i] + 1.0)).epsilon(1e-9));
        }
        const auto w = rmt_weights(inv, a_perp, Method::rmt_rd);
        CHECK(std::abs(w.gain() - 1.0) < 1e-10);
    }
    SECTION("fewer samples than the local rank")
    {
        const auto t = efa_transform(scene.config, 0.3, 3);
        CHECK_THROWS_AS(rmt_rd_inverse(reduce_samples(draw_snapshots(scene, 9, 4), t), 10,
                                       t.matrix.adjoint() * a.vector, 1.0),
                        NotApplicable);
    }
}

TEST_CASE("spike estimates are consistent on synthetic three-spike data")
{
    const std::vector<double> rho_true{100.0, 50.0, 20.0};
    const auto model = spiked_model(64, rho_true, ComplexVector(), 99);
    const auto median_error = [&](Eigen::Index l) {
        std::vector<double> rel;
        const double c = 64.0 / static_cast<double>(l);
        for (std::uint64_t seed = 0; seed < 200; ++seed)
        {
            const EigenSystem es = eigh(sample_cncm(draw_gaussian(model.sqrt, l, seed)).matrix);
            for (std::size_t i = 0; i < 3; ++i)
            {
                const double mu = es.values(static_cast<Eigen::Index>(i));
                const auto rho = estimate_rho(mu, c);
                REQUIRE(rho.has_value());
                CHECK(std::abs(spike_to_sample(*rho, c) - mu) < 1e-10 * mu);
                rel.push_back(std::abs(*rho - rho_true[i]) / rho_true[i]);
            }
        }
        return median(rel);
    };
    const double at128 = median_error(128);
    const double at512 = median_error(512);
    CHECK(at512 < 0.05);
    CHECK(at512 < at128);
}

TEST_CASE("corrected inverse eigenvalues on reference scenes")
{
    for (double v : {150.0, 300.0})
    {
        const auto scene = build_scene(reference_config(v));
        const std::size_t q = scene.clutter_rank;
        const auto a = steering(0.3, 0.0, scene.config);
        for (Eigen::Index l : {static_cast<Eigen::Index>(q), Eigen::Index{32}, Eigen::Index{64}, Eigen::Index{128},
                               Eigen::Index{256}})
        {
            for (std::uint64_t seed = 0; seed < 10; ++seed)
            {
                const auto inv = rmt_fd_inverse(sample_cncm(draw_snapshots(scene, l, seed)), q, a, 1.0);
                const auto &corr = inv.correction();
                CHECK(a.vector.dot(inv.apply(a.vector)).real() > 0.0);
                for (std::size_t i = 0; i < corr.size(); ++i)
                {
                    if (!corr.usable[i])
                    {
                        CHECK(corr.h_hat[i] == 0.0);
                        continue;
                    }
                    CHECK(corr.rho_hat[i] > std::sqrt(corr.c));
                    CHECK(std::abs(spike_to_sample(corr.rho_hat[i], corr.c) - corr.sample_eig[i]) <
                          1e-10 * corr.sample_eig[i]);
                    // With c < 1 the corrected eigenvalue stays in (0, 1]; for c >= 1 it can dip below zero.
                    if (corr.c < 1.0)
                    {
                        CHECK(1.0 + corr.h_hat[i] > 0.0);
                        CHECK(1.0 + corr.h_hat[i] <= 1.0);
                    }
                }
                const auto w = rmt_weights(inv, a.vector, Method::rmt_fd);
                CHECK(std::abs(w.gain() - 1.0) < 1e-10);
            }
        }
    }
}

TEST_CASE("corrected inverse approaches R^-1 in the infinite-sample limit")
{
    const auto scene = build_scene(reference_config());
    const auto a = steering(0.3, 0.0, scene.config);
    const EigenSystem exact = eigh(scene.covariance);
    const Eigen::Index huge = static_cast<Eigen::Index>(64.0 / 1e-8);
    const auto inv = corrected_inverse(exact, huge, scene.clutter_rank, a.vector, 1.0);
    const ComplexMatrix r_inv = scene.covariance.inverse();
    CHECK(relative_frobenius(inv.matrix(), r_inv) < 1e-4);
}

TEST_CASE("corrected weights beat sample-matrix inversion on average")
{
    const auto scene = build_scene(reference_config());
    const auto a = steering(0.3, 0.0, scene.config);
    const std::size_t q = scene.clutter_rank;
    for (Eigen::Index l : {Eigen::Index{15}, Eigen::Index{30}, Eigen::Index{64}, Eigen::Index{128}})
    {
        double p_rmt = 0.0, p_fd = 0.0;
        for (std::uint64_t seed = 0; seed < 200; ++seed)
        {
            const auto s = sample_cncm(draw_snapshots(scene, l, seed));
            p_fd += output_power(fd_stap(s, a), scene.covariance);
            p_rmt += output_power(rmt_weights(rmt_fd_inverse(s, q, a, 1.0), a.vector, Method::rmt_fd),
                                  scene.covariance);
        }
        CHECK(p_rmt <= p_fd);
    }
}

TEST_CASE("estimate_noise_power")
{
    const auto scene = build_scene(reference_config());
    const EigenSystem es = eigh(sample_cncm(draw_snapshots(scene, 2000, 1)).matrix);
    CHECK(std::abs(estimate_noise_power(es, 15) - 1.0) < 0.1);
    CHECK_THROWS_AS(estimate_noise_power(es, 64), ContractViolation);
}
