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

#include <catch2/catch_amalgamated.hpp>

#include "mmwdiv/channel.hpp"
#include "oracles.hpp"

#include <random>

using namespace mmwdiv;
using Catch::Approx;

TEST_CASE("friis_path_loss_db")
{
    CHECK(friis_path_loss_db(kSpeedOfLight / (4.0 * kPi * 60e9), 60e9) == Approx(0.0).margin(1e-12));
    CHECK(friis_path_loss_db(7.0, 60e9) == Approx(oracle::kPathLoss7m).epsilon(1e-13));
    CHECK(friis_path_loss_db(14.0, 60e9) - friis_path_loss_db(7.0, 60e9) == Approx(20.0 * std::log10(2.0)).epsilon(1e-13));
    CHECK_THROWS_AS(friis_path_loss_db(0.0, 60e9), std::invalid_argument);
    CHECK_THROWS_AS(friis_path_loss_db(-1.0, 60e9), std::invalid_argument);
}

TEST_CASE("base_gain")
{
    CHECK(base_gain(kSpeedOfLight / (4.0 * kPi * 60e9), 0.0, 60e9) == Approx(1.0).epsilon(1e-14));
    CHECK(base_gain(7.0, 0.0, 60e9) == Approx(oracle::kLosGain).epsilon(1e-12));
    CHECK(base_gain(oracle::kCeilingLength, 8.0, 60e9) == Approx(oracle::kCeilingGain8dB).epsilon(1e-12));
    CHECK_THROWS_AS(base_gain(0.0, 0.0, 60e9), std::invalid_argument);

    double prev = base_gain(0.5, 0.0, 60e9);
    for (double d = 0.6; d < 50.0; d *= 1.1)
    {
        const double g = base_gain(d, 0.0, 60e9);
        CHECK(g < prev);
        prev = g;
    }
}

TEST_CASE("quantize_delay_chips")
{
    CHECK(quantize_delay_chips(7.0, 7.0, 0.57e-9) == 0u);
    CHECK(quantize_delay_chips(oracle::kCeilingLength, 7.0, 0.57e-9) == 6u);
    CHECK(quantize_delay_chips(7.5, 7.0, 0.57e-9) == 3u);
    // Exactly half a chip rounds up.
    CHECK(quantize_delay_chips(7.0 + 0.5 * 0.57e-9 * kSpeedOfLight * (1.0 + 1e-12), 7.0, 0.57e-9) == 1u);
    CHECK_THROWS_AS(quantize_delay_chips(6.9, 7.0, 0.57e-9), std::invalid_argument);
    CHECK_THROWS_AS(quantize_delay_chips(7.0, 7.0, 0.0), std::invalid_argument);
}

TEST_CASE("ceiling_bounce_paths derive delay and base gain from the room")
{
    const auto paths = ceiling_bounce_paths(7.0, 2.0, 8.0, 60e9, 0.57e-9);
    REQUIRE(paths.size() == 2);
    CHECK(paths[0].delay_chips == 0u);
    CHECK(paths[0].reflection_loss_db == 0.0);
    CHECK(paths[1].length_m == Approx(oracle::kCeilingLength).epsilon(1e-14));
    CHECK(paths[1].delay_chips == 6u);
    CHECK(paths[1].base_gain == Approx(oracle::kCeilingGain8dB).epsilon(1e-12));
    CHECK_NOTHROW(validate_paths(paths, 60e9));

    auto broken = paths;
    broken[1].base_gain *= 1.01;
    CHECK_THROWS_AS(validate_paths(broken, 60e9), std::invalid_argument);
    broken = paths;
    broken[0].delay_chips = 1;
    CHECK_THROWS_AS(validate_paths(broken, 60e9), std::invalid_argument);
    CHECK_THROWS_AS(validate_paths(std::span<const PathSpec>{}, 60e9), std::invalid_argument);
}

TEST_CASE("shadow_attenuation_db")
{
    const ShadowingEvent e; // defaults from the blockage measurements, start 0

    CHECK(shadow_attenuation_db(e, -1e-3) == 0.0);
    CHECK(shadow_attenuation_db(e, 0.0557) == Approx(23.3).epsilon(1e-12));
    CHECK(shadow_attenuation_db(e, 0.0557 / 2.0) == Approx(11.65).epsilon(1e-12));
    CHECK(shadow_attenuation_db(e, 0.3) == Approx(23.3));
    CHECK(shadow_attenuation_db(e, 0.664 - 0.0318 / 2.0) == Approx(11.65).epsilon(1e-9));
    CHECK(shadow_attenuation_db(e, 0.664) == 0.0);
    CHECK(shadow_attenuation_db(e, 1.0) == 0.0);

    SECTION("continuous and monotone on a 1 us grid")
    {
        ShadowingEvent s;
        s.start_s = 0.4;
        double prev = shadow_attenuation_db(s, 0.399);
        double max_jump = 0.0;
        for (int i = 1; i <= 700'000; ++i)
        {
            const double t = 0.399 + i * 1e-6;
            const double a = shadow_attenuation_db(s, t);
            max_jump = std::max(max_jump, std::abs(a - prev));
            if (t > s.start_s && t < s.start_s + s.decay_s)
                CHECK_NOFAIL(a >= prev - 1e-12);
            if (t > s.start_s + s.total_s - s.rise_s && t < s.start_s + s.total_s)
                CHECK_NOFAIL(a <= prev + 1e-12);
            prev = a;
        }
        CHECK(max_jump < 0.01);
    }

    SECTION("validation")
    {
        ShadowingEvent bad;
        bad.decay_s = 0.5;
        bad.rise_s = 0.5;
        CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
        bad = {};
        bad.max_attenuation_db = -1.0;
        CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
        bad = {};
        bad.total_s = 0.0;
        CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    }
}

TEST_CASE("instantaneous_gain")
{
    const auto paths = ceiling_bounce_paths(7.0, 2.0, 8.0, 60e9, 0.57e-9);
    const auto &los = paths[0];
    CHECK(instantaneous_gain(los, {}, 0.3) == los.base_gain);

    ShadowingEvent e;
    const std::vector<ShadowingEvent> one{e};
    CHECK(instantaneous_gain(los, one, 0.2) == Approx(oracle::kFullBlockAmplitude * los.base_gain).epsilon(1e-12));

    // Event on another path leaves the LOS untouched.
    ShadowingEvent other = e;
    other.path_index = 1;
    const std::vector<ShadowingEvent> elsewhere{other};
    CHECK(instantaneous_gain(los, elsewhere, 0.2) == los.base_gain);

    ShadowingEvent ten = e;
    ten.max_attenuation_db = 10.0;
    const std::vector<ShadowingEvent> two{ten, ten};
    CHECK(instantaneous_gain(los, two, 0.2) == Approx(0.1 * los.base_gain).epsilon(1e-12));

    for (double t = -0.1; t < 1.0; t += 1e-3)
    {
        const double g = instantaneous_gain(los, one, t);
        CHECK_NOFAIL(g > 0.0);
        CHECK_NOFAIL(g <= los.base_gain);
    }
}

TEST_CASE("snapshot")
{
    SECTION("single path on 1x1 arrays")
    {
        const CMatrix one = CMatrix::Ones(1, 1);
        const auto s = snapshot_from_gains(one, one, {1.0});
        REQUIRE(s.matrices.size() == 1);
        CHECK(s.matrices[0](0, 0) == cdouble(1.0, 0.0));
    }

    SECTION("reference room: rank one, Frobenius norm sqrt(NtNr) lambda, linear in lambda")
    {
        const auto paths = ceiling_bounce_paths(7.0, 2.0, 8.0, 60e9, 0.57e-9);
        const auto tx = ArrayGeometry::uniform_linear(20, 2.5e-3, Vec3(0, 0, 1));
        const auto rx = ArrayGeometry::uniform_linear(20, 2.5e-3, Vec3(0, 0, 1));
        const std::vector<ShadowingEvent> events{ShadowingEvent{}};
        const auto s = snapshot(paths, tx, rx, events, 0.2, 60e9);
        REQUIRE(s.path_count() == 2);
        for (std::size_t l = 0; l < 2; ++l)
        {
            const auto &c = s.matrices[l];
            CHECK(c.rows() == 20);
            CHECK(c.cols() == 20);
            Eigen::JacobiSVD<CMatrix> svd(c);
            CHECK(svd.singularValues()(1) < 1e-12 * svd.singularValues()(0));
            CHECK(c.norm() == Approx(20.0 * s.gains[l]).epsilon(1e-12));
            CHECK(s.gains[l] <= paths[l].base_gain);
        }

        ChannelModel model(paths, tx, rx, events, 60e9);
        const auto a = model.snapshot(0.2);
        auto scaled = a.gains;
        for (auto &g : scaled)
            g *= 3.5;
        const auto b = snapshot_from_gains(model.tx_steering(), model.rx_steering(), scaled);
        for (std::size_t l = 0; l < 2; ++l)
            CHECK(b.matrices[l].norm() == Approx(3.5 * a.matrices[l].norm()).epsilon(1e-14));
    }

    SECTION("empty path list")
    {
        const auto g = ArrayGeometry::uniform_linear(2, 1e-3, Vec3(1, 0, 0));
        CHECK_THROWS_AS(snapshot({}, g, g, {}, 0.0, 60e9), std::invalid_argument);
    }

    SECTION("event targeting a missing path")
    {
        const auto paths = ceiling_bounce_paths(7.0, 2.0, 8.0, 60e9, 0.57e-9);
        const auto g = ArrayGeometry::uniform_linear(4, 2.5e-3, Vec3(0, 0, 1));
        ShadowingEvent e;
        e.path_index = 5;
        CHECK_THROWS_AS(ChannelModel(paths, g, g, {e}, 60e9), std::invalid_argument);
    }
}
