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

#ifndef MMWDIV_TRACER_HPP
#define MMWDIV_TRACER_HPP

#include "mmwdiv/channel.hpp"
#include "mmwdiv/common.hpp"

#include <algorithm>
#include <array>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

// Shadowing tracing for the maximal-selection scheme.
//
// The tracer keeps the paths found at beamforming time sorted by base gain and always
// communicates over the strongest one that is not blocked. While the LOS (first sorted)
// path is blocked it is re-tested every probe period; each test pauses communication for
// two beam switches.
//
// Path numbering: `k` is the 0-based position in the sorted list, actions and measurements
// refer to original path indices.
namespace mmwdiv
{
    struct TracerConfig
    {
        double probe_period_s = 0.020;
        double beam_switch_s = 1.0e-4;
        double packet_duration_s = 2.097e-3;
        double rebeamform_period_s = std::numeric_limits<double>::infinity();
        std::optional<double> dramatic_drop_threshold; // default: weakest stored base gain
        double restart_dead_time_s = 0.010;

        void validate() const
        {
            if (!(probe_period_s > 0.0) || !(beam_switch_s > 0.0) || !(packet_duration_s > 0.0) || !(rebeamform_period_s > 0.0) ||
                !(restart_dead_time_s > 0.0))
                throw std::invalid_argument("TracerConfig: all durations must be positive");
            if (!(beam_switch_s < probe_period_s))
                throw std::invalid_argument("TracerConfig: beam switch time must be shorter than the probe period");
            if (dramatic_drop_threshold && !(*dramatic_drop_threshold >= 0.0))
                throw std::invalid_argument("TracerConfig: drop threshold must be non-negative");
        }
    };

    // Fraction of airtime lost to probing: 2 T_BS / T_P.
    inline double efficiency_degradation(double beam_switch_s, double probe_period_s)
    {
        if (!(beam_switch_s >= 0.0) || !(probe_period_s > 0.0))
            throw std::invalid_argument("efficiency_degradation: durations must be positive");
        if (2.0 * beam_switch_s > probe_period_s)
            throw std::invalid_argument("efficiency_degradation: probe period shorter than a round-trip beam switch");
        return 2.0 * beam_switch_s / probe_period_s;
    }

    enum class TracerPhase
    {
        Initialize,
        Normal,
        Reselection,
        NlosComm,
    };

    inline const char *to_string(TracerPhase p)
    {
        switch (p)
        {
        case TracerPhase::Initialize: return "INITIALIZE";
        case TracerPhase::Normal: return "NORMAL";
        case TracerPhase::Reselection: return "RESELECTION";
        case TracerPhase::NlosComm: return "NLOS_COMM";
        }
        return "UNKNOWN";
    }

    struct StoredPath
    {
        std::size_t path = 0; // original index
        double base_gain = 0.0;
    };

    struct TracerState
    {
        TracerPhase phase = TracerPhase::Initialize;
        std::size_t k = 0;
        std::vector<StoredPath> sorted; // descending base gain, ties by original index
        CMatrix tx_steering;            // columns in sorted order
        CMatrix rx_steering;
        double next_probe_s = std::numeric_limits<double>::infinity();
        double next_rebeamform_s = std::numeric_limits<double>::infinity();
        double restart_ready_s = 0.0;
        TracerConfig config;

        std::size_t path_count() const { return sorted.size(); }
        std::size_t beamed_path() const { return sorted.at(k).path; }
        bool probe_due(double t) const { return phase == TracerPhase::NlosComm && t >= next_probe_s; }
        bool restart_ready(double t) const { return phase == TracerPhase::Initialize && t >= restart_ready_s; }

        double drop_threshold() const
        {
            return config.dramatic_drop_threshold.value_or(sorted.back().base_gain);
        }
    };

    enum class ActionKind
    {
        BeamTo,
        Probe,
        RestartBeamforming,
        Stay,
    };

    struct TracerAction
    {
        ActionKind kind = ActionKind::Stay;
        std::size_t path = 0; // original index, for BeamTo / Probe
        double cost_s = 0.0;  // paused communication

        // Log form with 1-based path numbers, e.g. "BEAM_TO(2)".
        std::string label() const
        {
            switch (kind)
            {
            case ActionKind::BeamTo: return "BEAM_TO(" + std::to_string(path + 1) + ")";
            case ActionKind::Probe: return "PROBE(" + std::to_string(path + 1) + ")";
            case ActionKind::RestartBeamforming: return "RESTART_BEAMFORMING";
            case ActionKind::Stay: return "STAY";
            }
            return "UNKNOWN";
        }
    };

    struct GainMeasurement
    {
        std::size_t path = 0; // original index
        double gain = 0.0;    // estimated lambda, linear amplitude
    };

    // Stores the paths sorted by base gain and starts normal communication on the strongest.
    inline TracerState tracer_init(std::span<const double> base_gains, const CMatrix &tx_steering, const CMatrix &rx_steering,
                                   const TracerConfig &config, double now_s = 0.0)
    {
        if (base_gains.empty())
            throw std::invalid_argument("tracer_init: empty path set");
        if (tx_steering.cols() != static_cast<Eigen::Index>(base_gains.size()) || rx_steering.cols() != tx_steering.cols())
            throw std::invalid_argument("tracer_init: steering matrices must have one column per path");
        config.validate();
        for (double g : base_gains)
            if (!(g > 0.0))
                throw std::invalid_argument("tracer_init: base gains must be positive");

        std::vector<std::size_t> order(base_gains.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return base_gains[a] > base_gains[b]; });

        TracerState s;
        s.config = config;
        s.tx_steering.resize(tx_steering.rows(), tx_steering.cols());
        s.rx_steering.resize(rx_steering.rows(), rx_steering.cols());
        for (std::size_t i = 0; i < order.size(); ++i)
        {
            s.sorted.push_back({order[i], base_gains[order[i]]});
            s.tx_steering.col(static_cast<Eigen::Index>(i)) = tx_steering.col(static_cast<Eigen::Index>(order[i]));
            s.rx_steering.col(static_cast<Eigen::Index>(i)) = rx_steering.col(static_cast<Eigen::Index>(order[i]));
        }
        s.phase = TracerPhase::Normal;
        s.k = 0;
        s.next_rebeamform_s = now_s + config.rebeamform_period_s;
        return s;
    }

    namespace detail
    {
        inline std::pair<TracerState, TracerAction> restart(TracerState s, double t)
        {
            s.phase = TracerPhase::Initialize;
            s.restart_ready_s = t + s.config.restart_dead_time_s;
            s.next_probe_s = std::numeric_limits<double>::infinity();
            const TracerAction action{ActionKind::RestartBeamforming, 0, s.config.restart_dead_time_s};
            return {std::move(s), action};
        }
    }

    // One tracer decision at time t. `current` must be the gain of the path the tracer is
    // beamed to; `probe` carries the LOS gain when a probe is due in NLOS communication.
    inline std::pair<TracerState, TracerAction> tracer_step(TracerState s, double t, const GainMeasurement &current,
                                                            const std::optional<GainMeasurement> &probe = std::nullopt)
    {
        if (s.sorted.empty())
            throw ContractViolation("tracer_step: tracer not initialized");
        if (s.phase == TracerPhase::Initialize)
            return {std::move(s), {}}; // beam training in progress; caller re-runs tracer_init
        if (current.path != s.beamed_path())
            throw ContractViolation("tracer_step: measurement for path " + std::to_string(current.path + 1) +
                                    " but the tracer is beamed to path " + std::to_string(s.beamed_path() + 1));
        if (probe && probe->path != s.sorted.front().path)
            throw ContractViolation("tracer_step: probes must target the first stored path");

        const std::size_t n = s.path_count();
        const double t_bs = s.config.beam_switch_s;

        switch (s.phase)
        {
        case TracerPhase::Normal:
        {
            const double threshold = s.sorted[std::min<std::size_t>(1, n - 1)].base_gain;
            if (!(current.gain < threshold))
                return {std::move(s), {}};
            if (n == 1)
                return detail::restart(std::move(s), t);
            s.phase = TracerPhase::Reselection;
            s.k = 1;
            const TracerAction action{ActionKind::BeamTo, s.sorted[1].path, t_bs};
            return {std::move(s), action};
        }
        case TracerPhase::Reselection:
        {
            const double threshold = s.sorted[std::min(s.k + 1, n - 1)].base_gain;
            if (current.gain < threshold)
            {
                if (s.k + 1 < n)
                {
                    ++s.k;
                    const TracerAction action{ActionKind::BeamTo, s.sorted[s.k].path, t_bs};
                    return {std::move(s), action};
                }
                return detail::restart(std::move(s), t);
            }
            s.phase = TracerPhase::NlosComm;
            s.next_probe_s = t + s.config.probe_period_s;
            return {std::move(s), {}};
        }
        case TracerPhase::NlosComm:
        {
            if (t >= s.next_rebeamform_s || current.gain < s.drop_threshold())
                return detail::restart(std::move(s), t);
            if (!s.probe_due(t))
                return {std::move(s), {}};
            if (!probe)
                throw ContractViolation("tracer_step: probe due but no probe measurement supplied");
            while (s.next_probe_s <= t)
                s.next_probe_s += s.config.probe_period_s;
            if (probe->gain > s.sorted[s.k].base_gain)
            {
                // Block moved away: stay on the probed LOS beam.
                s.phase = TracerPhase::Normal;
                s.k = 0;
                s.next_probe_s = std::numeric_limits<double>::infinity();
                const TracerAction action{ActionKind::BeamTo, s.sorted.front().path, t_bs};
                return {std::move(s), action};
            }
            const TracerAction action{ActionKind::Probe, s.sorted.front().path, 2.0 * t_bs};
            return {std::move(s), action};
        }
        case TracerPhase::Initialize: break;
        }
        return {std::move(s), {}};
    }

    struct TracerLogRecord
    {
        double time_s = 0.0;
        TracerPhase phase_before = TracerPhase::Initialize;
        TracerPhase phase_after = TracerPhase::Initialize;
        std::size_t k = 0; // sorted position after the step
        std::string action;
        double cost_s = 0.0;
    };

    struct TracerStats
    {
        std::array<double, 4> time_in_phase_s{}; // indexed by TracerPhase
        std::size_t probe_count = 0;
        std::size_t restart_count = 0;
        double total_pause_s = 0.0;
        double nlos_pause_s = 0.0; // pause charged while in NLOS communication

        double time_in(TracerPhase p) const { return time_in_phase_s[static_cast<std::size_t>(p)]; }

        // Realized efficiency loss over the NLOS communication interval.
        double nlos_efficiency_loss() const
        {
            const double t = time_in(TracerPhase::NlosComm);
            return t > 0.0 ? nlos_pause_s / t : 0.0;
        }
    };

    // Drives a tracer against a channel with perfect gain estimation. Measurements are taken
    // once per packet in normal communication, right after each beam switch while
    // reselecting, and at packet boundaries plus probe epochs in NLOS communication.
    class TracerSimulation
    {
    public:
        TracerSimulation(const ChannelModel &channel, TracerConfig config, double start_s = 0.0)
            : channel_(&channel), config_(std::move(config)), clock_s_(start_s)
        {
            initialize(start_s, channel_->base_gains());
        }

        // Processes every step scheduled at or before t.
        void advance_to(double t)
        {
            while (next_step_s_ <= t)
                step(next_step_s_);
            // Phase time accounting runs up to the requested time.
            account(t);
        }

        const TracerState &state() const { return state_; }
        std::size_t beamed_path() const { return beamed_path_; }
        const std::vector<TracerLogRecord> &log() const { return log_; }
        const TracerStats &stats() const { return stats_; }
        double next_step_s() const { return next_step_s_; }

    private:
        void account(double t)
        {
            if (t > clock_s_)
            {
                stats_.time_in_phase_s[static_cast<std::size_t>(state_.phase)] += t - clock_s_;
                clock_s_ = t;
            }
        }

        void initialize(double t, const std::vector<double> &gains)
        {
            state_ = tracer_init(gains, channel_->tx_steering(), channel_->rx_steering(), config_, t);
            beamed_path_ = state_.beamed_path();
            log_.push_back({t, TracerPhase::Initialize, state_.phase, state_.k, "INIT", 0.0});
            schedule_packets(t);
        }

        void schedule_packets(double anchor)
        {
            packet_anchor_s_ = anchor;
            packet_count_ = 1;
            next_packet_s_ = anchor + config_.packet_duration_s;
            next_step_s_ = next_packet_s_;
        }

        void step(double t)
        {
            account(t);
            if (state_.phase == TracerPhase::Initialize)
            {
                // Fresh beamforming rediscovers the paths with their current gains.
                initialize(t, channel_->gains_at(t));
                return;
            }

            const auto gains = channel_->gains_at(t);
            const GainMeasurement current{state_.beamed_path(), gains[state_.beamed_path()]};
            std::optional<GainMeasurement> probe;
            if (state_.probe_due(t))
                probe = GainMeasurement{state_.sorted.front().path, gains[state_.sorted.front().path]};

            const TracerPhase before = state_.phase;
            auto [next, action] = tracer_step(state_, t, current, probe);
            state_ = std::move(next);

            if (action.kind != ActionKind::Stay || state_.phase != before)
            {
                log_.push_back({t, before, state_.phase, state_.k, action.label(), action.cost_s});
                stats_.total_pause_s += action.cost_s;
                if (before == TracerPhase::NlosComm)
                    stats_.nlos_pause_s += action.cost_s;
                if (action.kind == ActionKind::Probe)
                    ++stats_.probe_count;
                if (action.kind == ActionKind::RestartBeamforming)
                    ++stats_.restart_count;
            }
            if (action.kind == ActionKind::BeamTo)
                beamed_path_ = action.path;

            switch (state_.phase)
            {
            case TracerPhase::Initialize: next_step_s_ = state_.restart_ready_s; break;
            case TracerPhase::Reselection: next_step_s_ = t + config_.beam_switch_s; break;
            case TracerPhase::Normal:
            case TracerPhase::NlosComm:
                if (state_.phase != before)
                    schedule_packets(t);
                else if (t >= next_packet_s_)
                    next_packet_s_ = packet_anchor_s_ + static_cast<double>(++packet_count_) * config_.packet_duration_s;
                next_step_s_ = state_.phase == TracerPhase::NlosComm ? std::min(next_packet_s_, state_.next_probe_s) : next_packet_s_;
                break;
            }
        }

        const ChannelModel *channel_;
        TracerConfig config_;
        TracerState state_;
        std::size_t beamed_path_ = 0;
        double clock_s_ = 0.0;
        double next_step_s_ = 0.0;
        double packet_anchor_s_ = 0.0;
        double next_packet_s_ = 0.0;
        std::size_t packet_count_ = 0;
        std::vector<TracerLogRecord> log_;
        TracerStats stats_;
    };
}

#endif
