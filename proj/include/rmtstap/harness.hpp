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
#include "rmt_estimator.hpp"
#include "sampling.hpp"
#include "scene.hpp"
#include "stap_core.hpp"

#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace rmtstap
{
    /// Invalid scenario text or values; reported before any computation starts.
    class ConfigError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    enum class SweepAxis
    {
        samples,
        doppler,
        velocity,
        dof_error,
    };

    inline std::string_view sweep_name(SweepAxis axis)
    {
        switch (axis)
        {
        case SweepAxis::samples:
            return "samples";
        case SweepAxis::doppler:
            return "doppler";
        case SweepAxis::velocity:
            return "velocity";
        case SweepAxis::dof_error:
            return "dof_error";
        }
        return "unknown";
    }

    struct Scenario
    {
        std::string name = "scenario";
        RadarConfig radar;
        double target_doppler = 0.3; // spatial frequency is fixed at 0 (boresight)
        std::vector<Method> algorithms{kAllMethods.begin(), kAllMethods.end()};
        SweepAxis sweep = SweepAxis::samples;
        std::vector<double> sweep_values;
        std::size_t n_samples = 0; // training size when the sweep is not over samples
        std::size_t n_trials = 1000;
        std::uint64_t base_seed = 1;
        std::optional<std::size_t> q_override;
        std::optional<std::size_t> q_rd_override;
        std::size_t efa_channels = 3;

        void validate() const
        {
            try
            {
                radar.validate();
            }
            catch (const ContractViolation &e)
            {
                throw ConfigError(e.what());
            }
            if (n_trials < 1)
                throw ConfigError("n_trials must be >= 1");
            if (algorithms.empty())
                throw ConfigError("no algorithms selected");
            if (sweep_values.empty())
                throw ConfigError("sweep_values is empty");
            if (efa_channels % 2 == 0 || efa_channels >= radar.n_pulses)
                throw ConfigError("efa_channels must be odd and smaller than n_pulses");
            if (sweep != SweepAxis::samples && n_samples < 1)
                throw ConfigError("n_samples must be >= 1 unless sweeping over samples");
            for (double v : sweep_values)
            {
                if (!std::isfinite(v))
                    throw ConfigError("sweep value is not finite");
                switch (sweep)
                {
                case SweepAxis::samples:
                    if (v < 1.0 || v != std::floor(v))
                        throw ConfigError("sample sweep values must be positive integers");
                    break;
                case SweepAxis::velocity:
                    if (v < 0.0)
                        throw ConfigError("velocity sweep values must be non-negative");
                    break;
                case SweepAxis::dof_error:
                    if (v != std::floor(v))
                        throw ConfigError("dof_error sweep values must be integers");
                    break;
                case SweepAxis::doppler:
                    break;
                }
            }
        }
    };

    /// One (sweep value, algorithm) cell. Metrics are empty when no trial was applicable.
    struct ResultRow
    {
        double sweep_value = 0.0;
        Method algorithm = Method::optimal;
        std::optional<double> mean_scnr_loss_db;
        std::optional<double> mean_power_db;
        std::optional<double> std_db;
        std::size_t n_valid = 0;
        std::size_t n_clamped = 0;
    };

    // ---------------------------------------------------------------------------------------------
    // Scenario files: `key = value` lines, '#' starts a comment. Units live in the key names.

    namespace detail
    {
        inline std::string trim(std::string_view s)
        {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string_view::npos)
                return {};
            const auto e = s.find_last_not_of(" \t\r");
            return std::string(s.substr(b, e - b + 1));
        }

        inline std::vector<std::string> split(std::string_view s, char sep)
        {
            std::vector<std::string> out;
            std::size_t start = 0;
            while (true)
            {
                const auto pos = s.find(sep, start);
                out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
                if (pos == std::string_view::npos)
                    break;
                start = pos + 1;
            }
            return out;
        }

        inline double parse_double(const std::string &key, const std::string &text)
        {
            std::size_t used = 0;
            double v = 0.0;
            try
            {
                v = std::stod(text, &used);
            }
            catch (const std::exception &)
            {
                throw ConfigError("bad number for " + key + ": '" + text + "'");
            }
            if (used != text.size())
                throw ConfigError("bad number for " + key + ": '" + text + "'");
            return v;
        }

        inline std::uint64_t parse_u64(const std::string &key, const std::string &text)
        {
            if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos)
                throw ConfigError("bad unsigned integer for " + key + ": '" + text + "'");
            try
            {
                return std::stoull(text);
            }
            catch (const std::exception &)
            {
                throw ConfigError("unsigned integer out of range for " + key + ": '" + text + "'");
            }
        }

        inline std::size_t parse_count(const std::string &key, const std::string &text)
        {
            return static_cast<std::size_t>(parse_u64(key, text));
        }

        inline Method parse_method(const std::string &text)
        {
            for (Method m : kAllMethods)
                if (method_name(m) == text)
                    return m;
            throw ConfigError("unknown algorithm '" + text + "'");
        }

        inline SweepAxis parse_axis(const std::string &text)
        {
            for (SweepAxis a : {SweepAxis::samples, SweepAxis::doppler, SweepAxis::velocity, SweepAxis::dof_error})
                if (sweep_name(a) == text)
                    return a;
            throw ConfigError("unknown sweep axis '" + text + "'");
        }

        /// Either a comma list or an inclusive range `start:step:stop`.
        inline std::vector<double> parse_values(const std::string &text)
        {
            std::vector<double> out;
            if (text.find(':') != std::string::npos)
            {
                const auto parts = split(text, ':');
                if (parts.size() != 3)
                    throw ConfigError("range must be start:step:stop, got '" + text + "'");
                const double start = parse_double("sweep_values", parts[0]);
                const double step = parse_double("sweep_values", parts[1]);
                const double stop = parse_double("sweep_values", parts[2]);
                if (!(step > 0.0) || stop < start)
                    throw ConfigError("range needs step > 0 and stop >= start: '" + text + "'");
                const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
                for (long i = 0; i < count; ++i)
                    out.push_back(start + static_cast<double>(i) * step);
                return out;
            }
            for (const auto &item : split(text, ','))
                out.push_back(parse_double("sweep_values", item));
            return out;
        }

        inline std::string format_number(double v)
        {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            return buf;
        }
    }

    inline Scenario parse_scenario(std::istream &in)
    {
        Scenario s;
        std::map<std::string, std::string> kv;
        std::string line;
        int line_no = 0;
        while (std::getline(in, line))
        {
            ++line_no;
            const auto hash = line.find('#');
            if (hash != std::string::npos)
                line.erase(hash);
            const std::string body = detail::trim(line);
            if (body.empty())
                continue;
            const auto eq = body.find('=');
            if (eq == std::string::npos)
                throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
            const std::string key = detail::trim(std::string_view(body).substr(0, eq));
            const std::string value = detail::trim(std::string_view(body).substr(eq + 1));
            if (key.empty())
                throw ConfigError("line " + std::to_string(line_no) + ": empty key");
            if (!kv.emplace(key, value).second)
                throw ConfigError("line " + std::to_string(line_no) + ": duplicate key " + key);
        }

        bool have_sweep_values = false;
        for (const auto &[key, value] : kv)
        {
            auto &r = s.radar;
            if (key == "name")
                s.name = value;
            else if (key == "n_elements")
                r.n_elements = detail::parse_count(key, value);
            else if (key == "n_pulses")
                r.n_pulses = detail::parse_count(key, value);
            else if (key == "prf_hz")
                r.prf_hz = detail::parse_double(key, value);
            else if (key == "wavelength_m")
                r.wavelength_m = detail::parse_double(key, value);
            else if (key == "spacing_m")
                r.spacing_m = detail::parse_double(key, value);
            else if (key == "height_m")
                r.height_m = detail::parse_double(key, value);
            else if (key == "velocity_mps")
                r.velocity_mps = detail::parse_double(key, value);
            else if (key == "noise_power")
                r.noise_power = detail::parse_double(key, value);
            else if (key == "cnr_db")
                r.cnr_db = detail::parse_double(key, value);
            else if (key == "n_patches")
                r.n_patches = detail::parse_count(key, value);
            else if (key == "elevation_rad")
                r.elevation_rad = detail::parse_double(key, value);
            else if (key == "target_doppler")
                s.target_doppler = detail::parse_double(key, value);
            else if (key == "algorithms")
            {
                s.algorithms.clear();
                for (const auto &item : detail::split(value, ','))
                {
                    const Method m = detail::parse_method(item);
                    if (std::find(s.algorithms.begin(), s.algorithms.end(), m) != s.algorithms.end())
                        throw ConfigError("algorithm listed twice: " + item);
                    s.algorithms.push_back(m);
                }
            }
            else if (key == "sweep")
                s.sweep = detail::parse_axis(value);
            else if (key == "sweep_values")
            {
                s.sweep_values = detail::parse_values(value);
                have_sweep_values = true;
            }
            else if (key == "n_samples")
                s.n_samples = detail::parse_count(key, value);
            else if (key == "n_trials")
                s.n_trials = detail::parse_count(key, value);
            else if (key == "base_seed")
                s.base_seed = detail::parse_u64(key, value);
            else if (key == "q_override")
                s.q_override = detail::parse_count(key, value);
            else if (key == "q_rd_override")
                s.q_rd_override = detail::parse_count(key, value);
            else if (key == "efa_channels")
                s.efa_channels = detail::parse_count(key, value);
            else
                throw ConfigError("unknown key '" + key + "'");
        }
        if (!have_sweep_values)
            throw ConfigError("missing sweep_values");
        s.validate();
        return s;
    }

    inline Scenario load_scenario(const std::filesystem::path &path)
    {
        std::ifstream in(path);
        if (!in)
            throw ConfigError("cannot open scenario file " + path.string());
        return parse_scenario(in);
    }

    /// Inverse of parse_scenario (sweep values are written as an explicit list).
    inline std::string format_scenario(const Scenario &s)
    {
        std::ostringstream os;
        const auto &r = s.radar;
        os << "name = " << s.name << '\n'
           << "n_elements = " << r.n_elements << '\n'
           << "n_pulses = " << r.n_pulses << '\n'
           << "prf_hz = " << detail::format_number(r.prf_hz) << '\n'
           << "wavelength_m = " << detail::format_number(r.wavelength_m) << '\n'
           << "spacing_m = " << detail::format_number(r.spacing_m) << '\n'
           << "height_m = " << detail::format_number(r.height_m) << '\n'
           << "velocity_mps = " << detail::format_number(r.velocity_mps) << '\n'
           << "noise_power = " << detail::format_number(r.noise_power) << '\n'
           << "cnr_db = " << detail::format_number(r.cnr_db) << '\n'
           << "n_patches = " << r.n_patches << '\n'
           << "elevation_rad = " << detail::format_number(r.elevation_rad) << '\n'
           << "target_doppler = " << detail::format_number(s.target_doppler) << '\n';
        os << "algorithms = ";
        for (std::size_t i = 0; i < s.algorithms.size(); ++i)
            os << (i ? "," : "") << method_name(s.algorithms[i]);
        os << '\n' << "sweep = " << sweep_name(s.sweep) << '\n' << "sweep_values = ";
        for (std::size_t i = 0; i < s.sweep_values.size(); ++i)
            os << (i ? "," : "") << detail::format_number(s.sweep_values[i]);
        os << '\n';
        if (s.n_samples > 0)
            os << "n_samples = " << s.n_samples << '\n';
        os << "n_trials = " << s.n_trials << '\n' << "base_seed = " << s.base_seed << '\n';
        if (s.q_override)
            os << "q_override = " << *s.q_override << '\n';
        if (s.q_rd_override)
            os << "q_rd_override = " << *s.q_rd_override << '\n';
        os << "efa_channels = " << s.efa_channels << '\n';
        return os.str();
    }

    // ---------------------------------------------------------------------------------------------
    // Monte Carlo runner

    struct RunOptions
    {
        unsigned threads = 0; // 0: hardware concurrency
    };

    namespace detail
    {
        /// Everything about one sweep point that does not depend on the training data.
        struct SweepPoint
        {
            double value = 0.0;
            std::size_t scene_index = 0;
            std::size_t n_samples = 0;
            ComplexVector target;
            ReducedTransform transform;
            ReducedScene reduced;
            long clutter_rank = 0;
            long local_rank = 0;
            PowerReport optimal;
        };

        struct TrialCell
        {
            bool valid = false;
            bool clamped = false;
            PowerReport report;
        };

        inline double sweep_or(SweepAxis axis, SweepAxis want, double value, double fallback)
        {
            return axis == want ? value : fallback;
        }
    }

    /**
     * Runs every algorithm over every sweep value for n_trials independent training sets.
     *
     * Trial t draws its snapshots from seed base_seed ^ t, so a trial sees the same random
     * stream at every sweep point and results do not depend on the thread count. Metrics are
     * averaged in linear power and reported in dB; algorithms that are not applicable (L below
     * the clutter rank) give rows with empty metrics.
     */
    inline std::vector<ResultRow> run_scenario(const Scenario &s, const RunOptions &opt = {})
    {
        s.validate();
        const std::size_t dof = s.radar.dof();
        const double noise = s.radar.noise_power;

        std::vector<double> sweep = s.sweep_values;
        std::sort(sweep.begin(), sweep.end());
        sweep.erase(std::unique(sweep.begin(), sweep.end()), sweep.end());

        std::vector<Method> algorithms;
        for (Method m : kAllMethods)
            if (std::find(s.algorithms.begin(), s.algorithms.end(), m) != s.algorithms.end())
                algorithms.push_back(m);
        const auto wants = [&](Method m) { return std::find(algorithms.begin(), algorithms.end(), m) != algorithms.end(); };

        // Scenes keyed by velocity.
        std::vector<double> velocities;
        std::vector<ClutterScene> scenes;
        const auto scene_for = [&](double v) {
            for (std::size_t i = 0; i < velocities.size(); ++i)
                if (velocities[i] == v)
                    return i;
            RadarConfig cfg = s.radar;
            cfg.velocity_mps = v;
            velocities.push_back(v);
            scenes.push_back(build_scene(cfg));
            return scenes.size() - 1;
        };

        std::vector<detail::SweepPoint> points;
        for (double value : sweep)
        {
            detail::SweepPoint p;
            p.value = value;
            const double v = detail::sweep_or(s.sweep, SweepAxis::velocity, value, s.radar.velocity_mps);
            const double f_t = detail::sweep_or(s.sweep, SweepAxis::doppler, value, s.target_doppler);
            const long dq = s.sweep == SweepAxis::dof_error ? std::lround(value) : 0;
            p.n_samples = s.sweep == SweepAxis::samples ? static_cast<std::size_t>(value) : s.n_samples;
            p.scene_index = scene_for(v);
            const ClutterScene &scene = scenes[p.scene_index];

            p.target = steering(f_t, 0.0, s.radar).vector;
            p.transform = efa_transform(s.radar, f_t, s.efa_channels);
            p.reduced = reduce(scene, p.transform, p.target, s.q_rd_override);
            p.clutter_rank = static_cast<long>(s.q_override.value_or(scene.clutter_rank)) + dq;
            p.local_rank = static_cast<long>(p.reduced.local_rank) + dq;
            if (p.clutter_rank < 0 || p.local_rank < 0)
                throw ConfigError("dof_error drives a clutter rank below zero");
            if (p.clutter_rank > static_cast<long>(dof) || p.local_rank > p.transform.reduced_dim())
                throw ConfigError("clutter rank exceeds the processing dimension");
            p.optimal = evaluate(optimal_stap(scene.covariance, p.target), scene.covariance, noise, dof);
            points.push_back(std::move(p));
        }

        const std::size_t n_points = points.size();
        const std::size_t n_alg = algorithms.size();
        const std::size_t n_trials = s.n_trials;
        // cells[(point * n_alg + alg) * n_trials + trial]
        std::vector<detail::TrialCell> cells(n_points * n_alg * n_trials);

        const auto run_trial = [&](std::size_t trial) {
            const std::uint64_t seed = s.base_seed ^ static_cast<std::uint64_t>(trial);
            struct Cached
            {
                SnapshotSet snapshots;
                std::optional<HermitianPseudoInverse> full_inverse;
            };
            std::map<std::pair<std::size_t, std::size_t>, Cached> cache;

            for (std::size_t pi = 0; pi < n_points; ++pi)
            {
                const detail::SweepPoint &p = points[pi];
                const ClutterScene &scene = scenes[p.scene_index];
                auto key = std::make_pair(p.scene_index, p.n_samples);
                auto it = cache.find(key);
                if (it == cache.end())
                    it = cache.emplace(key, Cached{draw_snapshots(scene, static_cast<Eigen::Index>(p.n_samples), seed),
                                                   std::nullopt})
                             .first;
                Cached &data = it->second;
                if ((wants(Method::fd_sample) || wants(Method::rmt_fd)) && !data.full_inverse)
                    data.full_inverse.emplace(sample_cncm(data.snapshots).matrix);

                std::optional<HermitianPseudoInverse> reduced_inverse;
                if (wants(Method::rd_sample) || wants(Method::rmt_rd))
                    reduced_inverse.emplace(reduce_samples(data.snapshots, p.transform).matrix);

                for (std::size_t ai = 0; ai < n_alg; ++ai)
                {
                    detail::TrialCell &cell = cells[(pi * n_alg + ai) * n_trials + trial];
                    const Eigen::Index n_samples = static_cast<Eigen::Index>(p.n_samples);
                    try
                    {
                        switch (algorithms[ai])
                        {
                        case Method::optimal:
                            cell.report = p.optimal;
                            break;
                        case Method::fd_sample:
                            cell.report = evaluate(fd_stap(*data.full_inverse, p.target), scene.covariance, noise, dof);
                            break;
                        case Method::rd_sample:
                            cell.report = evaluate(rd_stap(*reduced_inverse, p.reduced.target), p.reduced.covariance,
                                                   noise, dof);
                            break;
                        case Method::rmt_fd:
                        {
                            const CorrectedInverse inv =
                                corrected_inverse(data.full_inverse->eigen(), n_samples,
                                                  static_cast<std::size_t>(p.clutter_rank), p.target, noise);
                            cell.report = evaluate(rmt_weights(inv, p.target, Method::rmt_fd), scene.covariance, noise,
                                                   dof);
                            cell.clamped = inv.correction().clamped;
                            break;
                        }
                        case Method::rmt_rd:
                        {
                            const CorrectedInverse inv =
                                corrected_inverse(reduced_inverse->eigen(), n_samples,
                                                  static_cast<std::size_t>(p.local_rank), p.reduced.target, noise);
                            cell.report = evaluate(rmt_weights(inv, p.reduced.target, Method::rmt_rd),
                                                   p.reduced.covariance, noise, dof);
                            cell.clamped = inv.correction().clamped;
                            break;
                        }
                        }
                        cell.valid = true;
                    }
                    catch (const NotApplicable &)
                    {
                        cell.valid = false;
                    }
                }
            }
        };

        unsigned threads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
        threads = static_cast<unsigned>(std::min<std::size_t>(threads, n_trials));
        if (threads <= 1)
        {
            for (std::size_t t = 0; t < n_trials; ++t)
                run_trial(t);
        }
        else
        {
            std::atomic<std::size_t> next{0};
            std::exception_ptr failure;
            std::mutex failure_mutex;
            std::vector<std::thread> pool;
            for (unsigned w = 0; w < threads; ++w)
                pool.emplace_back([&] {
                    for (std::size_t t = next++; t < n_trials; t = next++)
                    {
                        try
                        {
                            run_trial(t);
                        }
                        catch (...)
                        {
                            std::lock_guard lock(failure_mutex);
                            if (!failure)
                                failure = std::current_exception();
                            next = n_trials;
                        }
                    }
                });
            for (auto &th : pool)
                th.join();
            if (failure)
                std::rethrow_exception(failure);
        }

        // Reduce in trial order so the sums are identical for any thread count.
        std::vector<ResultRow> rows;
        for (std::size_t pi = 0; pi < n_points; ++pi)
            for (std::size_t ai = 0; ai < n_alg; ++ai)
            {
                ResultRow row;
                row.sweep_value = points[pi].value;
                row.algorithm = algorithms[ai];
                double loss_sum = 0.0;
                double power_sum = 0.0;
                std::vector<double> loss_db;
                for (std::size_t t = 0; t < n_trials; ++t)
                {
                    const detail::TrialCell &cell = cells[(pi * n_alg + ai) * n_trials + t];
                    if (!cell.valid)
                        continue;
                    ++row.n_valid;
                    row.n_clamped += cell.clamped ? 1 : 0;
                    loss_sum += cell.report.scnr_loss;
                    power_sum += cell.report.output_power;
                    loss_db.push_back(db10(cell.report.scnr_loss));
                }
                if (row.n_valid > 0)
                {
                    const double n = static_cast<double>(row.n_valid);
                    row.mean_scnr_loss_db = db10(loss_sum / n);
                    row.mean_power_db = db10(power_sum / n);
                    double mean_db = 0.0;
                    for (double x : loss_db)
                        mean_db += x;
                    mean_db /= n;
                    double var = 0.0;
                    for (double x : loss_db)
                        var += (x - mean_db) * (x - mean_db);
                    row.std_db = row.n_valid > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
                }
                rows.push_back(row);
            }
        return rows;
    }

    /// Looks up a row; throws std::out_of_range when absent.
    inline const ResultRow &find_row(const std::vector<ResultRow> &rows, double sweep_value, Method m)
    {
        for (const auto &r : rows)
            if (r.algorithm == m && std::abs(r.sweep_value - sweep_value) < 1e-9)
                return r;
        throw std::out_of_range("no result row for " + std::string(method_name(m)) + " at " +
                                detail::format_number(sweep_value));
    }

    // ---------------------------------------------------------------------------------------------
    // CSV output

    inline constexpr std::string_view kCsvHeader = "sweep,algorithm,mean_scnr_loss_db,mean_power_db,std_db,n_valid,n_clamped";

    inline std::string format_csv(std::vector<ResultRow> rows)
    {
        if (rows.empty())
            throw ContractViolation("format_csv: no rows");
        std::stable_sort(rows.begin(), rows.end(), [](const ResultRow &a, const ResultRow &b) {
            if (a.sweep_value != b.sweep_value)
                return a.sweep_value < b.sweep_value;
            return static_cast<int>(a.algorithm) < static_cast<int>(b.algorithm);
        });
        const auto metric = [](const std::optional<double> &v) {
            if (!v)
                return std::string();
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.6f", *v);
            return std::string(buf);
        };
        std::string out(kCsvHeader);
        out += '\n';
        for (const auto &r : rows)
        {
            char sweep[32];
            std::snprintf(sweep, sizeof sweep, "%.6g", r.sweep_value);
            out += sweep;
            out += ',';
            out += method_name(r.algorithm);
            out += ',' + metric(r.mean_scnr_loss_db) + ',' + metric(r.mean_power_db) + ',' + metric(r.std_db);
            out += ',' + std::to_string(r.n_valid) + ',' + std::to_string(r.n_clamped) + '\n';
        }
        return out;
    }

    inline void emit_csv(const std::vector<ResultRow> &rows, const std::filesystem::path &path)
    {
        const std::string text = format_csv(rows);
        std::ofstream os(path, std::ios::binary | std::ios::trunc);
        if (!os)
            throw std::runtime_error("cannot open " + path.string() + " for writing");
        os << text;
        if (!os)
            throw std::runtime_error("write failed for " + path.string());
    }

    // ---------------------------------------------------------------------------------------------
    // Bundled scenarios for the reference figures.

    inline constexpr std::uint64_t kFigureSeed = 20230601;

    inline std::vector<Scenario> figure_scenarios()
    {
        std::vector<Scenario> out;
        const auto base = [](std::string name, double velocity) {
            Scenario s;
            s.name = std::move(name);
            s.radar = reference_config(velocity);
            s.target_doppler = 0.3;
            s.n_trials = 1000;
            s.base_seed = kFigureSeed;
            return s;
        };
        const std::vector<double> fig1_l{10, 12, 15, 20, 25, 30, 40, 50, 60, 70, 80, 90, 100};
        const std::vector<double> fig3_l{10, 12, 15, 18, 20, 24, 30, 36, 48, 64, 80, 96, 112, 128};

        for (auto [name, v, q_rd] : {std::tuple{"fig1_v150", 150.0, 10ul}, std::tuple{"fig1_v300", 300.0, 12ul}})
        {
            Scenario s = base(name, v);
            s.algorithms = {Method::optimal, Method::rd_sample, Method::rmt_rd};
            s.sweep = SweepAxis::samples;
            s.sweep_values = fig1_l;
            s.q_rd_override = q_rd;
            out.push_back(s);
        }
        for (std::size_t l : {10ul, 15ul, 48ul, 128ul})
        {
            Scenario s = base("fig2_L" + std::to_string(l), 150.0);
            s.algorithms = {Method::fd_sample, Method::rd_sample, Method::rmt_fd, Method::rmt_rd};
            s.sweep = SweepAxis::doppler;
            s.sweep_values = detail::parse_values("-0.5:0.025:0.5");
            s.n_samples = l;
            out.push_back(s);
        }
        {
            Scenario s = base("fig3", 150.0);
            s.sweep = SweepAxis::samples;
            s.sweep_values = fig3_l;
            s.q_rd_override = 10;
            out.push_back(s);
        }
        for (std::size_t l : {12ul, 22ul})
        {
            Scenario s = base("fig4_L" + std::to_string(l), 150.0);
            s.sweep = SweepAxis::velocity;
            s.sweep_values = detail::parse_values("30:30:300");
            s.n_samples = l;
            out.push_back(s);
        }
        for (std::size_t l : {13ul, 18ul})
        {
            Scenario s = base("fig5_L" + std::to_string(l), 150.0);
            s.sweep = SweepAxis::dof_error;
            s.sweep_values = detail::parse_values("-3:1:3");
            s.n_samples = l;
            s.q_rd_override = 10;
            out.push_back(s);
        }
        return out;
    }

    struct FigureSetOptions
    {
        std::optional<std::size_t> trials;
        std::optional<std::uint64_t> seed;
        unsigned threads = 0;
    };

    /// Runs every bundled scenario and writes <name>.csv plus the scenario file <name>.scenario into out_dir.
    inline std::vector<std::filesystem::path> write_figure_set(const std::filesystem::path &out_dir,
                                                              const FigureSetOptions &opt = {})
    {
        std::filesystem::create_directories(out_dir);
        std::vector<std::filesystem::path> written;
        for (Scenario s : figure_scenarios())
        {
            if (opt.trials)
                s.n_trials = *opt.trials;
            if (opt.seed)
                s.base_seed = *opt.seed;
            const auto rows = run_scenario(s, RunOptions{opt.threads});
            const auto csv = out_dir / (s.name + ".csv");
            emit_csv(rows, csv);
            std::ofstream(out_dir / (s.name + ".scenario"), std::ios::binary | std::ios::trunc) << format_scenario(s);
            written.push_back(csv);
        }
        return written;
    }

} // namespace rmtstap
