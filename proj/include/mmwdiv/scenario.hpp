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

#ifndef MMWDIV_SCENARIO_HPP
#define MMWDIV_SCENARIO_HPP

#include "mmwdiv/arraygeom.hpp"
#include "mmwdiv/beamform.hpp"
#include "mmwdiv/channel.hpp"
#include "mmwdiv/phy.hpp"
#include "mmwdiv/tracer.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mmwdiv
{
    enum class ExperimentKind
    {
        PowerTrace,
        Ber,
        TracerLog,
    };

    inline std::string_view to_string(ExperimentKind k)
    {
        switch (k)
        {
        case ExperimentKind::PowerTrace: return "power_trace";
        case ExperimentKind::Ber: return "ber";
        case ExperimentKind::TracerLog: return "tracer_log";
        }
        return "unknown";
    }

    inline ExperimentKind parse_experiment(std::string_view s)
    {
        for (auto k : {ExperimentKind::PowerTrace, ExperimentKind::Ber, ExperimentKind::TracerLog})
            if (to_string(k) == s)
                return k;
        throw std::invalid_argument("unknown experiment '" + std::string(s) + "' (expected power_trace | ber | tracer_log)");
    }

    struct ArraySpec
    {
        std::size_t count = 20;
        double spacing_mm = 2.5;
        Vec3 axis{0.0, 0.0, 1.0}; // vertical: the LOS and the ceiling bounce lie in the array plane

        ArrayGeometry geometry() const { return ArrayGeometry::uniform_linear(count, spacing_mm * 1e-3, axis); }
    };

    // One path set, e.g. the room evaluated at one reflection loss.
    struct LinkVariant
    {
        double reflection_loss_db = 0.0; // of the strongest-loss reflected path; label only
        std::vector<PathSpec> paths;
    };

    struct TimeGrid
    {
        double start_s = 0.0;
        double end_s = 1.5;
        double step_s = 1e-3;

        std::vector<double> points() const
        {
            std::vector<double> t;
            const auto n = static_cast<std::size_t>(std::floor((end_s - start_s) / step_s + 1e-9));
            for (std::size_t i = 0; i <= n; ++i)
                t.push_back(start_s + static_cast<double>(i) * step_s);
            return t;
        }
    };

    struct BerSettings
    {
        std::vector<double> snr_db;
        StopRule stop;
        BlockParams block;
    };

    enum class EgWeightMode
    {
        Frozen,     // weights from base gains, held through blockage
        Rebeamform, // re-derived from current gains at each re-beamforming epoch
    };

    struct Scenario
    {
        ExperimentKind experiment = ExperimentKind::PowerTrace;
        double carrier_hz = 60e9;
        double chip_s = 0.57e-9;
        double p_tx_dbm = 10.0;
        std::uint64_t seed = 1;
        ArraySpec tx_array;
        ArraySpec rx_array;
        std::vector<LinkVariant> variants;
        std::vector<ShadowingEvent> events;
        std::vector<Scheme> schemes{Scheme::EgApc, Scheme::EgPc, Scheme::Ms, Scheme::NonDiversity};
        TimeGrid time_grid;
        TracerConfig tracer;
        EgWeightMode eg_weights = EgWeightMode::Frozen;
        BerSettings ber;

        ChannelModel channel(const LinkVariant &v) const
        {
            return ChannelModel(v.paths, tx_array.geometry(), rx_array.geometry(), events, carrier_hz);
        }

        void validate() const
        {
            if (variants.empty())
                throw std::invalid_argument("scenario: no paths configured");
            if (schemes.empty())
                throw std::invalid_argument("scenario: at least one scheme required");
            if (!(time_grid.step_s > 0.0) || !(time_grid.end_s > time_grid.start_s))
                throw std::invalid_argument("scenario: time grid must be strictly increasing");
            tracer.validate();
            for (const auto &v : variants)
                (void)channel(v); // path and event invariants
            if (experiment == ExperimentKind::Ber)
            {
                if (ber.snr_db.empty())
                    throw std::invalid_argument("scenario: ber experiment needs a non-empty snr_db list");
                for (std::size_t i = 1; i < ber.snr_db.size(); ++i)
                    if (!(ber.snr_db[i] > ber.snr_db[i - 1]))
                        throw std::invalid_argument("scenario: snr_db must be strictly increasing");
            }
        }
    };

    // ---------------------------------------------------------------------------------------
    // Configuration
    // ---------------------------------------------------------------------------------------

    namespace detail
    {
        using nlohmann::json;

        inline void reject_unknown_keys(const json &j, std::string_view where, std::initializer_list<std::string_view> allowed)
        {
            if (!j.is_object())
                throw std::invalid_argument("config: '" + std::string(where) + "' must be an object");
            for (const auto &[key, _] : j.items())
                if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
                    throw std::invalid_argument("config: unknown key '" + std::string(where) + "." + key + "'");
        }

        template <class T>
        T get_or(const json &j, const char *key, T fallback)
        {
            if (!j.contains(key) || j.at(key).is_null())
                return fallback;
            try
            {
                return j.at(key).get<T>();
            }
            catch (const json::exception &)
            {
                throw std::invalid_argument(std::string("config: key '") + key + "' has the wrong type");
            }
        }

        inline ArraySpec parse_array(const json &j, std::string_view where)
        {
            reject_unknown_keys(j, where, {"count", "spacing_mm", "axis"});
            ArraySpec a;
            a.count = get_or<std::size_t>(j, "count", a.count);
            a.spacing_mm = get_or<double>(j, "spacing_mm", a.spacing_mm);
            if (j.contains("axis"))
            {
                const auto v = j.at("axis").get<std::vector<double>>();
                if (v.size() != 3)
                    throw std::invalid_argument("config: array axis must have three components");
                a.axis = Vec3(v[0], v[1], v[2]);
            }
            (void)a.geometry();
            return a;
        }

        inline std::vector<double> number_or_list(const json &j)
        {
            if (j.is_number())
                return {j.get<double>()};
            return j.get<std::vector<double>>();
        }
    }

    inline Scenario parse_scenario(const nlohmann::json &j)
    {
        using detail::get_or;
        detail::reject_unknown_keys(j, "config",
                                    {"experiment", "carrier_hz", "chip_s", "p_tx_dbm", "seed", "arrays", "room", "paths",
                                     "events", "schemes", "time_grid", "tracer", "eg_weights", "ber"});
        Scenario s;
        try
        {
            if (j.contains("experiment"))
                s.experiment = parse_experiment(j.at("experiment").get<std::string>());
            s.carrier_hz = get_or<double>(j, "carrier_hz", s.carrier_hz);
            s.chip_s = get_or<double>(j, "chip_s", s.chip_s);
            s.p_tx_dbm = get_or<double>(j, "p_tx_dbm", s.p_tx_dbm);
            s.seed = get_or<std::uint64_t>(j, "seed", s.seed);

            if (j.contains("arrays"))
            {
                const auto &a = j.at("arrays");
                detail::reject_unknown_keys(a, "arrays", {"tx", "rx"});
                if (a.contains("tx"))
                    s.tx_array = detail::parse_array(a.at("tx"), "arrays.tx");
                if (a.contains("rx"))
                    s.rx_array = detail::parse_array(a.at("rx"), "arrays.rx");
            }

            if (j.contains("room") == j.contains("paths"))
                throw std::invalid_argument("config: exactly one of 'room' or 'paths' is required");
            if (j.contains("room"))
            {
                const auto &r = j.at("room");
                detail::reject_unknown_keys(r, "room", {"los_distance_m", "ceiling_height_m", "reflection_loss_db"});
                const double d = get_or<double>(r, "los_distance_m", 7.0);
                const double h = get_or<double>(r, "ceiling_height_m", 2.0);
                const auto losses = r.contains("reflection_loss_db") ? detail::number_or_list(r.at("reflection_loss_db"))
                                                                     : std::vector<double>{8.0};
                if (losses.empty())
                    throw std::invalid_argument("config: room.reflection_loss_db must not be empty");
                for (double lr : losses)
                    s.variants.push_back({lr, ceiling_bounce_paths(d, h, lr, s.carrier_hz, s.chip_s)});
            }
            else
            {
                const auto &ps = j.at("paths");
                if (!ps.is_array() || ps.empty())
                    throw std::invalid_argument("config: 'paths' must be a non-empty list");
                LinkVariant v;
                const double los_length = ps.at(0).at("length_m").get<double>();
                for (std::size_t l = 0; l < ps.size(); ++l)
                {
                    const auto &p = ps.at(l);
                    detail::reject_unknown_keys(p, "paths[]", {"length_m", "reflection_loss_db", "tx_azimuth_deg", "tx_elevation_deg",
                                                               "rx_azimuth_deg", "rx_elevation_deg"});
                    const double lr = get_or<double>(p, "reflection_loss_db", 0.0);
                    v.paths.push_back(PathSpec::make(
                        l,
                        Direction::from_degrees(get_or<double>(p, "tx_azimuth_deg", 0.0), get_or<double>(p, "tx_elevation_deg", 0.0)),
                        Direction::from_degrees(get_or<double>(p, "rx_azimuth_deg", 0.0), get_or<double>(p, "rx_elevation_deg", 0.0)),
                        p.at("length_m").get<double>(), lr, los_length, s.carrier_hz, s.chip_s));
                    v.reflection_loss_db = std::max(v.reflection_loss_db, lr);
                }
                s.variants.push_back(std::move(v));
            }

            if (j.contains("events"))
            {
                for (const auto &e : j.at("events"))
                {
                    detail::reject_unknown_keys(e, "events[]", {"path", "start_s", "decay_s", "total_s", "rise_s", "max_attenuation_db"});
                    ShadowingEvent ev;
                    const auto path = get_or<std::size_t>(e, "path", 1);
                    if (path == 0)
                        throw std::invalid_argument("config: event path numbers start at 1");
                    ev.path_index = path - 1;
                    ev.start_s = get_or<double>(e, "start_s", ev.start_s);
                    ev.decay_s = get_or<double>(e, "decay_s", ev.decay_s);
                    ev.total_s = get_or<double>(e, "total_s", ev.total_s);
                    ev.rise_s = get_or<double>(e, "rise_s", ev.rise_s);
                    ev.max_attenuation_db = get_or<double>(e, "max_attenuation_db", ev.max_attenuation_db);
                    s.events.push_back(ev);
                }
            }

            if (j.contains("schemes"))
            {
                s.schemes.clear();
                for (const auto &name : j.at("schemes"))
                    s.schemes.push_back(parse_scheme(name.get<std::string>()));
            }

            if (j.contains("time_grid"))
            {
                const auto &g = j.at("time_grid");
                detail::reject_unknown_keys(g, "time_grid", {"start_s", "end_s", "step_s"});
                s.time_grid.start_s = get_or<double>(g, "start_s", s.time_grid.start_s);
                s.time_grid.end_s = get_or<double>(g, "end_s", s.time_grid.end_s);
                s.time_grid.step_s = get_or<double>(g, "step_s", s.time_grid.step_s);
            }

            if (j.contains("tracer"))
            {
                const auto &t = j.at("tracer");
                detail::reject_unknown_keys(t, "tracer", {"probe_period_s", "beam_switch_s", "packet_duration_s", "rebeamform_period_s",
                                                          "dramatic_drop_threshold", "restart_dead_time_s"});
                s.tracer.probe_period_s = get_or<double>(t, "probe_period_s", s.tracer.probe_period_s);
                s.tracer.beam_switch_s = get_or<double>(t, "beam_switch_s", s.tracer.beam_switch_s);
                s.tracer.packet_duration_s = get_or<double>(t, "packet_duration_s", s.tracer.packet_duration_s);
                s.tracer.rebeamform_period_s = get_or<double>(t, "rebeamform_period_s", s.tracer.rebeamform_period_s);
                s.tracer.restart_dead_time_s = get_or<double>(t, "restart_dead_time_s", s.tracer.restart_dead_time_s);
                if (t.contains("dramatic_drop_threshold") && !t.at("dramatic_drop_threshold").is_null())
                    s.tracer.dramatic_drop_threshold = t.at("dramatic_drop_threshold").get<double>();
            }

            if (j.contains("eg_weights"))
            {
                const auto mode = j.at("eg_weights").get<std::string>();
                if (mode == "frozen")
                    s.eg_weights = EgWeightMode::Frozen;
                else if (mode == "rebeamform")
                    s.eg_weights = EgWeightMode::Rebeamform;
                else
                    throw std::invalid_argument("config: eg_weights must be 'frozen' or 'rebeamform'");
            }

            if (j.contains("ber"))
            {
                const auto &b = j.at("ber");
                detail::reject_unknown_keys(b, "ber", {"snr_db", "min_errors", "max_bits", "block_len", "cp_len"});
                if (b.contains("snr_db"))
                    s.ber.snr_db = b.at("snr_db").get<std::vector<double>>();
                s.ber.stop.min_errors = get_or<std::uint64_t>(b, "min_errors", s.ber.stop.min_errors);
                s.ber.stop.max_bits = static_cast<std::uint64_t>(get_or<double>(b, "max_bits", static_cast<double>(s.ber.stop.max_bits)));
                s.ber.block.block_len = get_or<std::size_t>(b, "block_len", s.ber.block.block_len);
                s.ber.block.cp_len = get_or<std::size_t>(b, "cp_len", s.ber.block.cp_len);
            }
        }
        catch (const nlohmann::json::exception &e)
        {
            throw std::invalid_argument(std::string("config: ") + e.what());
        }
        s.validate();
        return s;
    }

    inline Scenario load_scenario(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw std::invalid_argument("config: cannot open '" + path + "'");
        nlohmann::json j;
        try
        {
            j = nlohmann::json::parse(in, nullptr, true, /*ignore_comments=*/true);
        }
        catch (const nlohmann::json::parse_error &e)
        {
            throw std::invalid_argument("config: " + path + ": " + e.what());
        }
        return parse_scenario(j);
    }

    // ---------------------------------------------------------------------------------------
    // Power trace
    // ---------------------------------------------------------------------------------------

    struct PowerTraceRow
    {
        double time_s = 0.0;
        double reflection_loss_db = 0.0;
        Scheme scheme = Scheme::Ms;
        std::optional<std::size_t> beam; // beamed path for ms / non_diversity
        double rx_power_dbm = 0.0;
    };

    // Everything needed to recompute a row offline.
    struct PowerTraceDump
    {
        double time_s = 0.0;
        double reflection_loss_db = 0.0;
        Scheme scheme = Scheme::Ms;
        CVector w_t;
        CVector w_r;
        std::vector<double> gains;
    };

    namespace detail
    {
        struct VariantRun
        {
            const LinkVariant *variant;
            const ChannelModel *channel;
            TracerSimulation tracer;
            AwvPair eg_apc;
            AwvPair eg_pc;
            double eg_epoch_s;
        };
    }

    inline std::vector<PowerTraceRow> run_power_trace(const Scenario &sc, std::vector<PowerTraceDump> *dump = nullptr)
    {
        sc.validate();
        std::vector<ChannelModel> channels;
        for (const auto &v : sc.variants)
            channels.push_back(sc.channel(v));

        std::vector<detail::VariantRun> runs;
        for (std::size_t i = 0; i < channels.size(); ++i)
        {
            const ChannelModel &ch = channels[i];
            const auto base = ch.base_gains();
            runs.push_back({&sc.variants[i], &ch, TracerSimulation(ch, sc.tracer, sc.time_grid.start_s),
                            compute_awv(Scheme::EgApc, ch.tx_steering(), ch.rx_steering(), base),
                            compute_awv(Scheme::EgPc, ch.tx_steering(), ch.rx_steering(), base), sc.time_grid.start_s});
        }

        std::vector<PowerTraceRow> rows;
        for (double t : sc.time_grid.points())
        {
            for (auto &r : runs)
            {
                r.tracer.advance_to(t);
                const ChannelSnapshot snap = r.channel->snapshot(t);

                if (sc.eg_weights == EgWeightMode::Rebeamform && std::isfinite(sc.tracer.rebeamform_period_s) &&
                    t >= r.eg_epoch_s + sc.tracer.rebeamform_period_s)
                {
                    while (t >= r.eg_epoch_s + sc.tracer.rebeamform_period_s)
                        r.eg_epoch_s += sc.tracer.rebeamform_period_s;
                    const auto g = r.channel->gains_at(r.eg_epoch_s);
                    r.eg_apc = compute_awv(Scheme::EgApc, r.channel->tx_steering(), r.channel->rx_steering(), g);
                    r.eg_pc = compute_awv(Scheme::EgPc, r.channel->tx_steering(), r.channel->rx_steering(), g);
                }

                for (Scheme s : sc.schemes)
                {
                    AwvPair awv;
                    PowerTraceRow row{t, r.variant->reflection_loss_db, s, std::nullopt, 0.0};
                    switch (s)
                    {
                    case Scheme::EgApc: awv = r.eg_apc; break;
                    case Scheme::EgPc: awv = r.eg_pc; break;
                    case Scheme::Ms:
                        awv = ms_awv(r.channel->tx_steering(), r.channel->rx_steering(), r.tracer.beamed_path());
                        row.beam = awv.path;
                        break;
                    case Scheme::NonDiversity:
                        awv = non_diversity_awv(r.channel->tx_steering(), r.channel->rx_steering());
                        row.beam = 0;
                        break;
                    }
                    row.rx_power_dbm = received_power_dbm(sc.p_tx_dbm, total_power_gain(awv, snap));
                    rows.push_back(row);
                    if (dump)
                        dump->push_back({t, row.reflection_loss_db, s, awv.w_t, awv.w_r, snap.gains});
                }
            }
        }
        return rows;
    }

    // ---------------------------------------------------------------------------------------
    // BER
    // ---------------------------------------------------------------------------------------

    enum class LinkCase
    {
        NonBlocked,
        Blocked,
    };

    inline std::string_view to_string(LinkCase c) { return c == LinkCase::Blocked ? "blocked" : "non_blocked"; }

    struct BerRow
    {
        double snr_db = 0.0;
        double reflection_loss_db = 0.0;
        Scheme scheme = Scheme::Ms;
        LinkCase link_case = LinkCase::NonBlocked;
        std::uint64_t bits = 0;
        std::uint64_t errors = 0;
        double ber = 0.0;
        bool low_confidence = false;
    };

    struct BerChannel
    {
        double reflection_loss_db = 0.0;
        Scheme scheme = Scheme::Ms;
        LinkCase link_case = LinkCase::NonBlocked;
        double time_s = 0.0;
        std::size_t ms_path = 0;
        std::vector<cdouble> compound_gains;
        TapChannel taps;
    };

    struct BerRun
    {
        std::vector<BerRow> rows;         // sorted by snr_db, then by channel order
        std::vector<BerChannel> channels; // one per (variant, case, scheme)
    };

    // Time at which the LOS sits at full attenuation: the plateau of the first event on it.
    inline std::optional<double> blocked_time(const Scenario &sc)
    {
        for (const auto &e : sc.events)
            if (e.path_index == 0)
                return e.start_s + e.decay_s;
        return std::nullopt;
    }

    // Equivalent taps for every (variant, case, scheme) without running any Monte Carlo.
    inline std::vector<BerChannel> ber_channels(const Scenario &sc)
    {
        sc.validate();
        std::vector<BerChannel> out;
        const auto t_block = blocked_time(sc);
        for (const auto &v : sc.variants)
        {
            const ChannelModel ch = sc.channel(v);
            const auto base = ch.base_gains();
            std::vector<unsigned> delays;
            for (const auto &p : ch.paths())
                delays.push_back(p.delay_chips);

            std::vector<std::pair<LinkCase, double>> cases{{LinkCase::NonBlocked, sc.time_grid.start_s}};
            if (t_block)
                cases.emplace_back(LinkCase::Blocked, *t_block);

            for (const auto &[link_case, t] : cases)
            {
                // Non-blocked uses the unattenuated channel regardless of configured events.
                const ChannelSnapshot snap = link_case == LinkCase::Blocked
                                                 ? ch.snapshot(t)
                                                 : snapshot_from_gains(ch.tx_steering(), ch.rx_steering(), base, t);
                std::size_t ms_path = 0;
                if (link_case == LinkCase::Blocked)
                {
                    TracerSimulation sim(ch, sc.tracer, std::min(sc.time_grid.start_s, t));
                    sim.advance_to(t);
                    ms_path = sim.beamed_path();
                }
                for (Scheme s : sc.schemes)
                {
                    const AwvPair awv = compute_awv(s, ch.tx_steering(), ch.rx_steering(), base, ms_path);
                    BerChannel bc;
                    bc.reflection_loss_db = v.reflection_loss_db;
                    bc.scheme = s;
                    bc.link_case = link_case;
                    bc.time_s = t;
                    bc.ms_path = s == Scheme::Ms ? ms_path : 0;
                    bc.compound_gains = compound_path_gains(snap, awv);
                    bc.taps = equivalent_taps(bc.compound_gains, delays, sc.chip_s, sc.carrier_hz);
                    out.push_back(std::move(bc));
                }
            }
        }
        return out;
    }

    inline BerRun run_ber(const Scenario &sc)
    {
        BerRun run;
        run.channels = ber_channels(sc);
        for (std::size_t c = 0; c < run.channels.size(); ++c)
        {
            const auto &bc = run.channels[c];
            const auto curve = ber_curve(bc.taps, sc.ber.snr_db, sc.ber.stop, derive_seed(sc.seed, c), sc.ber.block);
            for (const auto &p : curve)
                run.rows.push_back({p.snr_db, bc.reflection_loss_db, bc.scheme, bc.link_case, p.bits_sent, p.bit_errors, p.ber,
                                    p.low_confidence});
        }
        std::stable_sort(run.rows.begin(), run.rows.end(), [](const BerRow &a, const BerRow &b) { return a.snr_db < b.snr_db; });
        return run;
    }

    // ---------------------------------------------------------------------------------------
    // Tracer log
    // ---------------------------------------------------------------------------------------

    struct TracerLogRun
    {
        double reflection_loss_db = 0.0;
        std::vector<TracerLogRecord> log;
        TracerStats stats;
    };

    inline std::vector<TracerLogRun> run_tracer_log(const Scenario &sc)
    {
        sc.validate();
        std::vector<TracerLogRun> out;
        for (const auto &v : sc.variants)
        {
            const ChannelModel ch = sc.channel(v);
            TracerSimulation sim(ch, sc.tracer, sc.time_grid.start_s);
            sim.advance_to(sc.time_grid.end_s);
            out.push_back({v.reflection_loss_db, sim.log(), sim.stats()});
        }
        return out;
    }

    // ---------------------------------------------------------------------------------------
    // Emission
    // ---------------------------------------------------------------------------------------

    inline std::string format_number(double v)
    {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.12g", v);
        return buf;
    }

    inline void write_power_trace_csv(std::ostream &os, const std::vector<PowerTraceRow> &rows)
    {
        os << "time_s,reflection_loss_db,scheme,beam,rx_power_dbm\n";
        for (const auto &r : rows)
            os << format_number(r.time_s) << ',' << format_number(r.reflection_loss_db) << ',' << to_string(r.scheme) << ','
               << (r.beam ? std::to_string(*r.beam + 1) : std::string("all")) << ',' << format_number(r.rx_power_dbm) << '\n';
    }

    inline nlohmann::json power_trace_json(const std::vector<PowerTraceRow> &rows)
    {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto &r : rows)
            arr.push_back({{"time_s", r.time_s},
                           {"reflection_loss_db", r.reflection_loss_db},
                           {"scheme", to_string(r.scheme)},
                           {"beam", r.beam ? nlohmann::json(*r.beam + 1) : nlohmann::json("all")},
                           {"rx_power_dbm", r.rx_power_dbm}});
        return {{"experiment", "power_trace"}, {"rows", arr}};
    }

    inline void write_ber_csv(std::ostream &os, const BerRun &run)
    {
        os << "snr_db,reflection_loss_db,scheme,case,bits,errors,ber,low_confidence\n";
        for (const auto &r : run.rows)
            os << format_number(r.snr_db) << ',' << format_number(r.reflection_loss_db) << ',' << to_string(r.scheme) << ','
               << to_string(r.link_case) << ',' << r.bits << ',' << r.errors << ',' << format_number(r.ber) << ','
               << (r.low_confidence ? "true" : "false") << '\n';
    }

    inline nlohmann::json ber_json(const BerRun &run)
    {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto &r : run.rows)
            rows.push_back({{"snr_db", r.snr_db},
                            {"reflection_loss_db", r.reflection_loss_db},
                            {"scheme", to_string(r.scheme)},
                            {"case", to_string(r.link_case)},
                            {"bits", r.bits},
                            {"errors", r.errors},
                            {"ber", r.ber},
                            {"low_confidence", r.low_confidence}});
        nlohmann::json channels = nlohmann::json::array();
        for (const auto &c : run.channels)
        {
            nlohmann::json taps = nlohmann::json::array();
            for (const auto &t : c.taps.taps)
                taps.push_back({t.real(), t.imag()});
            channels.push_back({{"reflection_loss_db", c.reflection_loss_db},
                                {"scheme", to_string(c.scheme)},
                                {"case", to_string(c.link_case)},
                                {"taps", taps}});
        }
        return {{"experiment", "ber"}, {"rows", rows}, {"channels", channels}};
    }

    inline void write_tracer_log_csv(std::ostream &os, const std::vector<TracerLogRun> &runs)
    {
        os << "reflection_loss_db,time_s,phase_before,phase_after,k,action,cost_s\n";
        for (const auto &run : runs)
            for (const auto &r : run.log)
                os << format_number(run.reflection_loss_db) << ',' << format_number(r.time_s) << ',' << to_string(r.phase_before) << ','
                   << to_string(r.phase_after) << ',' << r.k + 1 << ',' << r.action << ',' << format_number(r.cost_s) << '\n';
    }

    inline nlohmann::json tracer_stats_json(const TracerStats &s)
    {
        return {{"time_normal_s", s.time_in(TracerPhase::Normal)},
                {"time_reselection_s", s.time_in(TracerPhase::Reselection)},
                {"time_nlos_comm_s", s.time_in(TracerPhase::NlosComm)},
                {"time_initialize_s", s.time_in(TracerPhase::Initialize)},
                {"probe_count", s.probe_count},
                {"restart_count", s.restart_count},
                {"total_pause_s", s.total_pause_s},
                {"nlos_pause_s", s.nlos_pause_s},
                {"nlos_efficiency_loss", s.nlos_efficiency_loss()}};
    }

    inline nlohmann::json tracer_log_json(const std::vector<TracerLogRun> &runs)
    {
        nlohmann::json out = nlohmann::json::array();
        for (const auto &run : runs)
        {
            nlohmann::json log = nlohmann::json::array();
            for (const auto &r : run.log)
                log.push_back({{"time_s", r.time_s},
                               {"phase_before", to_string(r.phase_before)},
                               {"phase_after", to_string(r.phase_after)},
                               {"k", r.k + 1},
                               {"action", r.action},
                               {"cost_s", r.cost_s}});
            out.push_back({{"reflection_loss_db", run.reflection_loss_db}, {"log", log}, {"summary", tracer_stats_json(run.stats)}});
        }
        return {{"experiment", "tracer_log"}, {"runs", out}};
    }
}

#endif
