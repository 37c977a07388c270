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


// rmtstap command line: run one scenario file, or regenerate the bundled figure data.

#include <rmtstap/rmtstap.hpp>

#include <CLI11.hpp>

#include <iostream>

namespace
{
    constexpr int kExitConfig = 2;
    constexpr int kExitNumerical = 3;

    struct Overrides
    {
        std::optional<std::size_t> trials;
        std::optional<std::uint64_t> seed;
        unsigned threads = 0;
    };
}

int main(int argc, char **argv)
{
    CLI::App app{"Monte Carlo simulator for spiked-covariance corrected STAP"};
    app.require_subcommand(1);

    Overrides ov;
    const auto add_common = [&ov](CLI::App *sub) {
        sub->add_option("--trials", ov.trials, "Override the number of Monte Carlo trials")->check(CLI::PositiveNumber);
        sub->add_option("--seed", ov.seed, "Override the 64-bit base seed");
        sub->add_option("--threads", ov.threads, "Worker threads (0 = all cores)");
    };

    std::string scenario_path;
    std::string out_csv;
    auto *run = app.add_subcommand("run", "Run a scenario file and write its CSV table");
    run->add_option("scenario", scenario_path, "Scenario file (key = value)")->required();
    run->add_option("--out", out_csv, "Output CSV path")->required();
    add_common(run);

    bool full_set = false;
    std::string out_dir;
    auto *figures = app.add_subcommand("figures", "Generate the bundled figure scenarios");
    figures->add_flag("--paper-set", full_set, "Run the full bundled set (fig1..fig5)")->required();
    figures->add_option("--out-dir", out_dir, "Directory for <scenario>.csv files")->required();
    add_common(figures);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try
    {
        if (run->parsed())
        {
            rmtstap::Scenario s = rmtstap::load_scenario(scenario_path);
            if (ov.trials)
                s.n_trials = *ov.trials;
            if (ov.seed)
                s.base_seed = *ov.seed;
            const auto rows = rmtstap::run_scenario(s, rmtstap::RunOptions{ov.threads});
            rmtstap::emit_csv(rows, out_csv);
            std::cerr << s.name << ": " << rows.size() << " rows, seed " << s.base_seed << ", " << s.n_trials
                      << " trials -> " << out_csv << '\n';
        }
        else if (figures->parsed())
        {
            const auto files = rmtstap::write_figure_set(out_dir, {ov.trials, ov.seed, ov.threads});
            for (const auto &f : files)
                std::cerr << "wrote " << f.string() << '\n';
        }
    }
    catch (const rmtstap::ConfigError &e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    catch (const rmtstap::ContractViolation &e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    catch (const rmtstap::NumericalFailure &e)
    {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
    return 0;
}
