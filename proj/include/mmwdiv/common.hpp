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

#ifndef MMWDIV_COMMON_HPP
#define MMWDIV_COMMON_HPP

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mmwdiv
{
    using cdouble = std::complex<double>;
    using CVector = Eigen::VectorXcd;
    using CMatrix = Eigen::MatrixXcd;
    using RVector = Eigen::VectorXd;
    using Vec3 = Eigen::Vector3d;

    inline constexpr double kSpeedOfLight = 3.0e8; // m/s, the value used throughout the link budget
    inline constexpr double kPi = std::numbers::pi;
    inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

    // Geometry with coincident path directions: the steering matrix has lost rank.
    class DegenerateGeometryError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Caller broke a documented precondition of a stateful operation (e.g. the tracer).
    class ContractViolation : public std::logic_error
    {
    public:
        using std::logic_error::logic_error;
    };

    inline double db_to_amplitude(double db) { return std::pow(10.0, db / 20.0); }
    inline double amplitude_to_db(double amplitude) { return 20.0 * std::log10(amplitude); }
    inline double db_to_power(double db) { return std::pow(10.0, db / 10.0); }
    inline double power_to_db(double power) { return 10.0 * std::log10(power); }

    inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
    inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }
}

#endif
