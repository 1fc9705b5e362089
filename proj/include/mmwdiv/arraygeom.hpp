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

#ifndef MMWDIV_ARRAYGEOM_HPP
#define MMWDIV_ARRAYGEOM_HPP

#include "mmwdiv/common.hpp"

#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace mmwdiv
{
    // Propagation direction. Azimuth is measured in the x-y plane from +x, elevation from the
    // x-y plane towards +z. Construction wraps azimuth to [-pi, pi) and rejects elevations
    // outside [-pi/2, pi/2].
    class Direction
    {
    public:
        Direction() = default;
        Direction(double azimuth_rad, double elevation_rad)
        {
            if (!std::isfinite(azimuth_rad) || !std::isfinite(elevation_rad))
                throw std::invalid_argument("Direction: angles must be finite");
            if (elevation_rad < -kPi / 2.0 || elevation_rad > kPi / 2.0)
                throw std::invalid_argument("Direction: elevation outside [-pi/2, pi/2]");
            double az = std::fmod(azimuth_rad + kPi, kTwoPi);
            if (az < 0.0)
                az += kTwoPi;
            azimuth_ = az - kPi;
            elevation_ = elevation_rad;
        }

        static Direction from_degrees(double azimuth_deg, double elevation_deg)
        {
            return {deg_to_rad(azimuth_deg), deg_to_rad(elevation_deg)};
        }

        double azimuth() const { return azimuth_; }
        double elevation() const { return elevation_; }

        Vec3 unit_vector() const
        {
            const double ce = std::cos(elevation_);
            return {ce * std::cos(azimuth_), ce * std::sin(azimuth_), std::sin(elevation_)};
        }

        bool operator==(const Direction &) const = default;

    private:
        double azimuth_ = 0.0;
        double elevation_ = 0.0;
    };

    // Element positions in meters; element 0 is the phase reference.
    class ArrayGeometry
    {
    public:
        explicit ArrayGeometry(std::vector<Vec3> elements) : elements_(std::move(elements))
        {
            if (elements_.empty())
                throw std::invalid_argument("ArrayGeometry: at least one element required");
            for (const auto &p : elements_)
                if (!p.allFinite())
                    throw std::invalid_argument("ArrayGeometry: element coordinates must be finite");
        }

        // Uniform linear array starting at the origin, elements spaced along `axis`.
        static ArrayGeometry uniform_linear(std::size_t count, double spacing_m, const Vec3 &axis)
        {
            if (count == 0)
                throw std::invalid_argument("uniform_linear: count must be positive");
            if (!(spacing_m > 0.0) || !std::isfinite(spacing_m))
                throw std::invalid_argument("uniform_linear: spacing must be positive");
            const double n = axis.norm();
            if (!(n > 0.0) || !axis.allFinite())
                throw std::invalid_argument("uniform_linear: axis must be a non-zero finite vector");
            const Vec3 dir = axis / n;
            std::vector<Vec3> pos;
            pos.reserve(count);
            for (std::size_t i = 0; i < count; ++i)
                pos.emplace_back(dir * (spacing_m * static_cast<double>(i)));
            return ArrayGeometry(std::move(pos));
        }

        std::size_t count() const { return elements_.size(); }
        std::span<const Vec3> elements() const { return elements_; }
        const Vec3 &element(std::size_t i) const { return elements_.at(i); }

    private:
        std::vector<Vec3> elements_;
    };

    struct SteeringVector
    {
        CVector entries;
        Direction direction;
        double carrier_hz = 0.0;

        std::size_t size() const { return static_cast<std::size_t>(entries.size()); }
    };

    // Delay of element i relative to element 0 for a plane wave along `direction`:
    // (p_i - p_0) . u / c. Element 0 returns exactly 0.
    inline double relative_delay(const ArrayGeometry &geometry, const Direction &direction, std::size_t i)
    {
        if (i >= geometry.count())
            throw std::out_of_range("relative_delay: element index out of range");
        if (i == 0)
            return 0.0;
        return (geometry.element(i) - geometry.element(0)).dot(direction.unit_vector()) / kSpeedOfLight;
    }

    // Unit-modulus array response exp(j 2 pi f0 tau_i); no 1/sqrt(N) normalization.
    inline SteeringVector steering_vector(const ArrayGeometry &geometry, const Direction &direction, double carrier_hz)
    {
        if (!(carrier_hz > 0.0) || !std::isfinite(carrier_hz))
            throw std::invalid_argument("steering_vector: carrier frequency must be positive");

        const auto n = static_cast<Eigen::Index>(geometry.count());
        CVector entries(n);
        entries(0) = cdouble(1.0, 0.0);
        for (Eigen::Index i = 1; i < n; ++i)
        {
            // Reduce the cycle count before scaling by 2 pi to keep the phase accurate.
            const double cycles = carrier_hz * relative_delay(geometry, direction, static_cast<std::size_t>(i));
            const double phase = kTwoPi * (cycles - std::round(cycles));
            entries(i) = std::polar(1.0, phase);
        }
        return {std::move(entries), direction, carrier_hz};
    }

    // Columns are the steering vectors of `directions`, in order.
    inline CMatrix steering_matrix(const ArrayGeometry &geometry, std::span<const Direction> directions, double carrier_hz)
    {
        CMatrix out(static_cast<Eigen::Index>(geometry.count()), static_cast<Eigen::Index>(directions.size()));
        for (std::size_t l = 0; l < directions.size(); ++l)
            out.col(static_cast<Eigen::Index>(l)) = steering_vector(geometry, directions[l], carrier_hz).entries;
        return out;
    }
}

#endif
