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

#ifndef MMWDIV_CHANNEL_HPP
#define MMWDIV_CHANNEL_HPP

#include "mmwdiv/arraygeom.hpp"
#include "mmwdiv/common.hpp"

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mmwdiv
{
    // Free-space Friis loss 20 log10(4 pi d f / c) in dB.
    inline double friis_path_loss_db(double distance_m, double carrier_hz)
    {
        if (!(distance_m > 0.0) || !std::isfinite(distance_m))
            throw std::invalid_argument("friis_path_loss_db: distance must be positive");
        if (!(carrier_hz > 0.0))
            throw std::invalid_argument("friis_path_loss_db: carrier frequency must be positive");
        return 20.0 * std::log10(4.0 * kPi * distance_m * carrier_hz / kSpeedOfLight);
    }

    // Single-antenna link amplitude 10^(-(PL + L_r)/20).
    inline double base_gain(double length_m, double reflection_loss_db, double carrier_hz)
    {
        if (!(reflection_loss_db >= 0.0))
            throw std::invalid_argument("base_gain: reflection loss must be non-negative");
        return db_to_amplitude(-(friis_path_loss_db(length_m, carrier_hz) + reflection_loss_db));
    }

    // Excess delay over the LOS path in whole chips, rounded half away from zero.
    inline unsigned quantize_delay_chips(double path_length_m, double los_length_m, double chip_s)
    {
        if (!(chip_s > 0.0))
            throw std::invalid_argument("quantize_delay_chips: chip duration must be positive");
        if (!(los_length_m > 0.0))
            throw std::invalid_argument("quantize_delay_chips: LOS length must be positive");
        if (path_length_m < los_length_m)
            throw std::invalid_argument("quantize_delay_chips: path shorter than the LOS path");
        return static_cast<unsigned>(std::round((path_length_m - los_length_m) / kSpeedOfLight / chip_s));
    }

    struct PathSpec
    {
        std::size_t index = 0; // 0 is the LOS path
        Direction tx_direction;
        Direction rx_direction; // arrival direction, pointing from the receiver towards the last bounce
        double length_m = 0.0;
        double reflection_loss_db = 0.0;
        unsigned delay_chips = 0;
        double base_gain = 0.0; // lambda^(0), linear amplitude

        // Derives delay and base gain from the geometry so they cannot disagree.
        static PathSpec make(std::size_t index, const Direction &tx, const Direction &rx, double length_m,
                             double reflection_loss_db, double los_length_m, double carrier_hz, double chip_s)
        {
            PathSpec p;
            p.index = index;
            p.tx_direction = tx;
            p.rx_direction = rx;
            p.length_m = length_m;
            p.reflection_loss_db = reflection_loss_db;
            p.delay_chips = quantize_delay_chips(length_m, los_length_m, chip_s);
            p.base_gain = mmwdiv::base_gain(length_m, reflection_loss_db, carrier_hz);
            return p;
        }
    };

    // Checks the path-list invariants: non-empty, indices 0..N-1 in order, LOS first with
    // no reflection loss and zero delay, base gains matching their geometry.
    inline void validate_paths(std::span<const PathSpec> paths, double carrier_hz)
    {
        if (paths.empty())
            throw std::invalid_argument("channel: at least one path required");
        for (std::size_t l = 0; l < paths.size(); ++l)
        {
            const auto &p = paths[l];
            if (p.index != l)
                throw std::invalid_argument("channel: path indices must be 0..N-1 in order");
            const double expected = base_gain(p.length_m, p.reflection_loss_db, carrier_hz);
            if (!(p.base_gain > 0.0) || std::abs(p.base_gain - expected) > 1e-9 * expected)
                throw std::invalid_argument("channel: path " + std::to_string(l) + " base gain inconsistent with its length and loss");
        }
        if (paths[0].reflection_loss_db != 0.0 || paths[0].delay_chips != 0)
            throw std::invalid_argument("channel: the LOS path must have zero reflection loss and zero delay");
    }

    // Transmitter at the origin, receiver at (d, 0, 0), a reflecting ceiling at height h above
    // both. Returns the LOS path and the single ceiling bounce.
    inline std::vector<PathSpec> ceiling_bounce_paths(double los_distance_m, double ceiling_height_m, double reflection_loss_db,
                                                      double carrier_hz, double chip_s)
    {
        if (!(los_distance_m > 0.0) || !(ceiling_height_m > 0.0))
            throw std::invalid_argument("ceiling_bounce_paths: distance and height must be positive");
        const double elevation = std::atan2(ceiling_height_m, los_distance_m / 2.0);
        const double bounce_length = 2.0 * std::hypot(los_distance_m / 2.0, ceiling_height_m);
        std::vector<PathSpec> paths;
        paths.push_back(PathSpec::make(0, Direction(0.0, 0.0), Direction(kPi, 0.0), los_distance_m, 0.0, los_distance_m,
                                       carrier_hz, chip_s));
        paths.push_back(PathSpec::make(1, Direction(0.0, elevation), Direction(kPi, elevation), bounce_length,
                                       reflection_loss_db, los_distance_m, carrier_hz, chip_s));
        return paths;
    }

    // Human blockage of one path: a trapezoid in dB. The attenuation ramps linearly up to its
    // maximum over decay_s, holds, and ramps back to zero over the last rise_s of total_s.
    struct ShadowingEvent
    {
        std::size_t path_index = 0;
        double start_s = 0.0;
        double decay_s = 0.0557;
        double total_s = 0.664;
        double rise_s = 0.0318;
        double max_attenuation_db = 23.3;

        void validate() const
        {
            if (!(decay_s > 0.0) || !(total_s > 0.0) || !(rise_s > 0.0))
                throw std::invalid_argument("ShadowingEvent: durations must be positive");
            if (decay_s + rise_s > total_s)
                throw std::invalid_argument("ShadowingEvent: decay + rise exceeds the total duration");
            if (!(max_attenuation_db >= 0.0) || !std::isfinite(max_attenuation_db))
                throw std::invalid_argument("ShadowingEvent: attenuation must be non-negative");
            if (!std::isfinite(start_s))
                throw std::invalid_argument("ShadowingEvent: start time must be finite");
        }
    };

    inline double shadow_attenuation_db(const ShadowingEvent &event, double t)
    {
        const double u = t - event.start_s;
        if (u <= 0.0 || u >= event.total_s)
            return 0.0;
        if (u < event.decay_s)
            return event.max_attenuation_db * (u / event.decay_s);
        const double rise_begin = event.total_s - event.rise_s;
        if (u <= rise_begin)
            return event.max_attenuation_db;
        return event.max_attenuation_db * ((event.total_s - u) / event.rise_s);
    }

    inline double total_attenuation_db(std::size_t path_index, std::span<const ShadowingEvent> events, double t)
    {
        double a = 0.0;
        for (const auto &e : events)
            if (e.path_index == path_index)
                a += shadow_attenuation_db(e, t);
        return a;
    }

    // lambda_l(t) = lambda_l^(0) 10^(-A(t)/20), with A(t) summed over events on this path.
    inline double instantaneous_gain(const PathSpec &path, std::span<const ShadowingEvent> events, double t)
    {
        return path.base_gain * db_to_amplitude(-total_attenuation_db(path.index, events, t));
    }

    struct ChannelSnapshot
    {
        double time_s = 0.0;
        std::vector<double> gains;     // lambda_l(t)
        std::vector<CMatrix> matrices; // C_l = lambda_l(t) g_l h_l^T, N_r x N_t

        std::size_t path_count() const { return gains.size(); }
        Eigen::Index n_t() const { return matrices.front().cols(); }
        Eigen::Index n_r() const { return matrices.front().rows(); }
    };

    // Per-path matrices from explicit steering columns and gains.
    inline ChannelSnapshot snapshot_from_gains(const CMatrix &tx_steering, const CMatrix &rx_steering, std::vector<double> gains,
                                               double time_s = 0.0)
    {
        if (gains.empty())
            throw std::invalid_argument("snapshot: at least one path required");
        if (tx_steering.cols() != static_cast<Eigen::Index>(gains.size()) || rx_steering.cols() != tx_steering.cols())
            throw std::invalid_argument("snapshot: steering matrices must have one column per path");
        ChannelSnapshot s;
        s.time_s = time_s;
        s.matrices.reserve(gains.size());
        for (std::size_t l = 0; l < gains.size(); ++l)
        {
            const auto c = static_cast<Eigen::Index>(l);
            s.matrices.push_back(gains[l] * rx_steering.col(c) * tx_steering.col(c).transpose());
        }
        s.gains = std::move(gains);
        return s;
    }

    inline ChannelSnapshot snapshot(std::span<const PathSpec> paths, const ArrayGeometry &tx, const ArrayGeometry &rx,
                                    std::span<const ShadowingEvent> events, double t, double carrier_hz)
    {
        if (paths.empty())
            throw std::invalid_argument("snapshot: at least one path required");
        std::vector<Direction> tx_dirs, rx_dirs;
        std::vector<double> gains;
        for (const auto &p : paths)
        {
            tx_dirs.push_back(p.tx_direction);
            rx_dirs.push_back(p.rx_direction);
            gains.push_back(instantaneous_gain(p, events, t));
        }
        return snapshot_from_gains(steering_matrix(tx, tx_dirs, carrier_hz), steering_matrix(rx, rx_dirs, carrier_hz),
                                   std::move(gains), t);
    }

    // A fixed link: paths, arrays and blockage events, with the steering matrices cached.
    class ChannelModel
    {
    public:
        ChannelModel(std::vector<PathSpec> paths, ArrayGeometry tx, ArrayGeometry rx, std::vector<ShadowingEvent> events,
                     double carrier_hz)
            : paths_(std::move(paths)), tx_(std::move(tx)), rx_(std::move(rx)), events_(std::move(events)), carrier_hz_(carrier_hz)
        {
            validate_paths(paths_, carrier_hz_);
            for (const auto &e : events_)
            {
                e.validate();
                if (e.path_index >= paths_.size())
                    throw std::invalid_argument("channel: shadowing event targets unknown path " + std::to_string(e.path_index));
            }
            std::vector<Direction> tx_dirs, rx_dirs;
            for (const auto &p : paths_)
            {
                tx_dirs.push_back(p.tx_direction);
                rx_dirs.push_back(p.rx_direction);
            }
            tx_steering_ = steering_matrix(tx_, tx_dirs, carrier_hz_);
            rx_steering_ = steering_matrix(rx_, rx_dirs, carrier_hz_);
        }

        std::span<const PathSpec> paths() const { return paths_; }
        std::span<const ShadowingEvent> events() const { return events_; }
        const ArrayGeometry &tx_array() const { return tx_; }
        const ArrayGeometry &rx_array() const { return rx_; }
        double carrier_hz() const { return carrier_hz_; }
        const CMatrix &tx_steering() const { return tx_steering_; }
        const CMatrix &rx_steering() const { return rx_steering_; }

        std::vector<double> base_gains() const
        {
            std::vector<double> g;
            for (const auto &p : paths_)
                g.push_back(p.base_gain);
            return g;
        }

        std::vector<double> gains_at(double t) const
        {
            std::vector<double> g;
            for (const auto &p : paths_)
                g.push_back(instantaneous_gain(p, events_, t));
            return g;
        }

        ChannelSnapshot snapshot(double t) const { return snapshot_from_gains(tx_steering_, rx_steering_, gains_at(t), t); }

    private:
        std::vector<PathSpec> paths_;
        ArrayGeometry tx_;
        ArrayGeometry rx_;
        std::vector<ShadowingEvent> events_;
        double carrier_hz_;
        CMatrix tx_steering_;
        CMatrix rx_steering_;
    };
}

#endif
