// SPDX-License-Identifier: Apache-2.0
//
// mmwdiv: link-level simulator for 60 GHz spatial diversity beamforming
// Copyright (C) 2026 The mmwdiv authors
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

// mmwdiv power-trace | ber | tracer-log --config <file> [--out <file>] [--seed <u64>] [--format csv|json]

#include "mmwdiv/mmwdiv.hpp"

#include "CLI11.hpp"

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace
{
    struct Options
    {
        std::string config;
        std::string out;
        std::optional<std::uint64_t> seed;
        std::string format = "csv";
    };

    void add_common(CLI::App *cmd, Options &opt)
    {
        cmd->add_option("--config", opt.config, "Scenario file (JSON)")->required()->check(CLI::ExistingFile);
        cmd->add_option("--out", opt.out, "Output file (default: stdout)");
        cmd->add_option("--seed", opt.seed, "Override the scenario seed");
        cmd->add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    }

    mmwdiv::Scenario load(const Options &opt, mmwdiv::ExperimentKind kind)
    {
        std::ifstream in(opt.config);
        auto j = nlohmann::json::parse(in, nullptr, true, true);
        if (j.contains("experiment") && mmwdiv::parse_experiment(j.at("experiment").get<std::string>()) != kind)
            throw std::invalid_argument("config: experiment '" + j.at("experiment").get<std::string>() +
                                        "' does not match the '" + std::string(mmwdiv::to_string(kind)) + "' command");
        j["experiment"] = std::string(mmwdiv::to_string(kind));
        auto sc = mmwdiv::parse_scenario(j);
        if (opt.seed)
            sc.seed = *opt.seed;
        return sc;
    }

    template <class CsvWriter, class JsonMaker>
    void emit(const Options &opt, CsvWriter &&csv, JsonMaker &&json)
    {
        std::ofstream file;
        if (!opt.out.empty())
        {
            file.open(opt.out);
            if (!file)
                throw std::runtime_error("cannot open output '" + opt.out + "'");
        }
        std::ostream &os = opt.out.empty() ? std::cout : file;
        if (opt.format == "json")
            os << json().dump(2) << '\n';
        else
            csv(os);
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"mmwdiv: 60 GHz spatial diversity link simulator"};
    app.require_subcommand(1);

    Options opt;
    auto *power = app.add_subcommand("power-trace", "Received power of each scheme over time");
    auto *ber = app.add_subcommand("ber", "SC-FDE bit error rate per scheme, blocked and non-blocked");
    auto *tracer = app.add_subcommand("tracer-log", "Shadowing-tracing action log and statistics");
    for (auto *cmd : {power, ber, tracer})
        add_common(cmd, opt);

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (power->parsed())
        {
            const auto sc = load(opt, mmwdiv::ExperimentKind::PowerTrace);
            const auto rows = mmwdiv::run_power_trace(sc);
            emit(opt, [&](std::ostream &os) { mmwdiv::write_power_trace_csv(os, rows); },
                 [&] { return mmwdiv::power_trace_json(rows); });
        }
        else if (ber->parsed())
        {
            const auto sc = load(opt, mmwdiv::ExperimentKind::Ber);
            const auto run = mmwdiv::run_ber(sc);
            emit(opt, [&](std::ostream &os) { mmwdiv::write_ber_csv(os, run); }, [&] { return mmwdiv::ber_json(run); });
        }
        else if (tracer->parsed())
        {
            const auto sc = load(opt, mmwdiv::ExperimentKind::TracerLog);
            const auto runs = mmwdiv::run_tracer_log(sc);
            emit(opt, [&](std::ostream &os) { mmwdiv::write_tracer_log_csv(os, runs); },
                 [&] { return mmwdiv::tracer_log_json(runs); });
            if (opt.format == "csv")
                for (const auto &r : runs)
                    std::cerr << "summary reflection_loss_db=" << r.reflection_loss_db << ' '
                              << mmwdiv::tracer_stats_json(r.stats).dump() << '\n';
        }
    }
    catch (const std::exception &e)
    {
        std::cerr << "mmwdiv: error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
