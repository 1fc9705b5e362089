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

#include "mmwdiv/phy.hpp"
#include "oracles.hpp"

#include <random>

using namespace mmwdiv;
using Catch::Approx;

namespace
{
    ChannelModel reference_room(double lr = 8.0)
    {
        const auto g = ArrayGeometry::uniform_linear(20, 2.5e-3, Vec3(0, 0, 1));
        return ChannelModel(ceiling_bounce_paths(7.0, 2.0, lr, 60e9, 0.57e-9), g, g, {}, 60e9);
    }

    TapChannel taps_for(Scheme s, const ChannelModel &ch)
    {
        const auto awv = compute_awv(s, ch.tx_steering(), ch.rx_steering(), ch.base_gains());
        const auto h = compound_path_gains(ch.snapshot(0.0), awv);
        const std::vector<unsigned> delays{0u, 6u};
        return equivalent_taps(h, delays, 0.57e-9, 60e9);
    }

    const TapChannel kFlat{{cdouble(1.0, 0.0)}, 0.57e-9};
}

TEST_CASE("compound path gains add up to the total power gain")
{
    const auto ch = reference_room();
    const auto snap = ch.snapshot(0.0);
    for (Scheme s : {Scheme::EgApc, Scheme::EgPc, Scheme::Ms, Scheme::NonDiversity})
    {
        const auto awv = compute_awv(s, ch.tx_steering(), ch.rx_steering(), ch.base_gains());
        double sum = 0.0;
        for (const auto &h : compound_path_gains(snap, awv))
            sum += std::norm(h);
        CHECK(sum == Approx(total_power_gain(awv, snap)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(compound_path_gain(2, snap, ms_awv(ch.tx_steering(), ch.rx_steering(), 0)), std::out_of_range);
}

TEST_CASE("equivalent_taps")
{
    SECTION("reference delays: seven taps, carrier phase -2 pi 0.2 on the echo")
    {
        const std::vector<cdouble> h{cdouble(1.0, 0.0), cdouble(1.0, 0.0)};
        const std::vector<unsigned> d{0u, 6u};
        const auto ch = equivalent_taps(h, d, 0.57e-9, 60e9);
        REQUIRE(ch.taps.size() == 7);
        CHECK(std::abs(ch.taps[0] - cdouble(1.0 / std::sqrt(2.0), 0.0)) < 1e-15);
        for (std::size_t i = 1; i < 6; ++i)
            CHECK(ch.taps[i] == cdouble(0.0, 0.0));
        CHECK(std::abs(ch.taps[6] - std::polar(1.0 / std::sqrt(2.0), -kTwoPi * 0.2)) < 1e-9);
        CHECK(ch.energy() == Approx(1.0).epsilon(1e-14));
    }
    SECTION("single path is a single unit tap")
    {
        const std::vector<cdouble> h{cdouble(0.0, 3e-5)};
        const std::vector<unsigned> d{0u};
        const auto ch = equivalent_taps(h, d, 0.57e-9, 60e9);
        REQUIRE(ch.taps.size() == 1);
        CHECK(std::abs(ch.taps[0] - cdouble(0.0, 1.0)) < 1e-15);
    }
    SECTION("unit energy on the reference channels")
    {
        const auto room = reference_room();
        for (Scheme s : {Scheme::EgApc, Scheme::EgPc, Scheme::Ms})
            CHECK(taps_for(s, room).energy() == Approx(1.0).epsilon(1e-12));
        // EG-APC balances the two taps.
        const auto apc = taps_for(Scheme::EgApc, room);
        CHECK(std::abs(apc.taps[6]) == Approx(std::abs(apc.taps[0])).epsilon(1e-9));
    }
    SECTION("errors")
    {
        const std::vector<cdouble> h2{cdouble(1, 0), cdouble(1, 0)};
        const std::vector<unsigned> dup{0u, 0u}, late{1u, 3u}, one{0u};
        CHECK_THROWS_AS(equivalent_taps(h2, dup, 0.57e-9, 60e9), std::invalid_argument);
        CHECK_THROWS_AS(equivalent_taps(h2, late, 0.57e-9, 60e9), std::invalid_argument);
        CHECK_THROWS_AS(equivalent_taps(h2, one, 0.57e-9, 60e9), std::invalid_argument);
        const std::vector<cdouble> zeros{cdouble(0, 0)};
        CHECK_THROWS_AS(equivalent_taps(zeros, one, 0.57e-9, 60e9), std::invalid_argument);
    }
}

TEST_CASE("pi/2-BPSK")
{
    const std::vector<std::uint8_t> bits{0, 1, 0, 1, 1};
    const auto chips = modulate_pi2bpsk(bits);
    const std::vector<cdouble> expected{cdouble(1, 0), cdouble(0, -1), cdouble(-1, 0), cdouble(0, 1), cdouble(-1, 0)};
    for (std::size_t n = 0; n < bits.size(); ++n)
        CHECK(chips[n] == expected[n]);
    CHECK(demodulate_pi2bpsk(chips) == bits);

    std::mt19937_64 rng(4);
    std::vector<std::uint8_t> many(1000);
    for (auto &b : many)
        b = static_cast<std::uint8_t>(rng() & 1u);
    CHECK(demodulate_pi2bpsk(modulate_pi2bpsk(many)) == many);

    const std::vector<std::uint8_t> bad{2};
    CHECK_THROWS_AS(modulate_pi2bpsk(bad), std::invalid_argument);
}

TEST_CASE("FftPlan")
{
    FftPlan plan(8);
    std::vector<cdouble> x(8, cdouble(0, 0));
    x[0] = 1.0;
    plan.forward(x);
    for (const auto &v : x)
        CHECK(std::abs(v - cdouble(1, 0)) < 1e-15);
    plan.backward(x);
    CHECK(std::abs(x[0] - cdouble(8, 0)) < 1e-14);

    std::vector<cdouble> wrong(4);
    CHECK_THROWS_AS(plan.forward(wrong), std::invalid_argument);
    FftPlan moved(std::move(plan));
    CHECK(moved.size() == 8);
}

TEST_CASE("derive_seed")
{
    CHECK(derive_seed(1, 0) == derive_seed(1, 0));
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
}

TEST_CASE("SC-FDE link")
{
    SECTION("noiseless: no errors on the reference two-tap channels")
    {
        const auto room = reference_room();
        for (Scheme s : {Scheme::EgApc, Scheme::EgPc, Scheme::Ms})
        {
            const auto p = sc_fde_link(taps_for(s, room), 200.0, 50, {}, 3);
            CHECK(p.bits_sent == 50 * 512);
            CHECK(p.bit_errors == 0);
        }
    }

    SECTION("flat channel matches the Gaussian tail within 3 binomial sigma")
    {
        const std::vector<double> snr{0.0, 2.0, 4.0, 6.0};
        const auto curve = ber_curve(kFlat, snr, {2000, 10'000'000}, 99);
        for (const auto &p : curve)
        {
            CAPTURE(p.snr_db);
            REQUIRE(p.bit_errors >= 100);
            const double ref = oracle::bpsk_ber(p.snr_db);
            CHECK(std::abs(p.ber - ref) <= 3.0 * oracle::binomial_sigma(ref, static_cast<double>(p.bits_sent)));
        }
        CHECK(oracle::bpsk_ber(9.6) == Approx(oracle::kBpskBer9p6dB).epsilon(1e-12));
    }

    SECTION("two equal taps are worse than one")
    {
        const std::vector<cdouble> h{cdouble(1, 0), cdouble(1, 0)};
        const std::vector<unsigned> d{0u, 6u};
        const auto two = equivalent_taps(h, d, 0.57e-9, 60e9);
        const auto a = sc_fde_link(kFlat, 6.0, 400, {}, 5);
        const auto b = sc_fde_link(two, 6.0, 400, {}, 5);
        CHECK(b.ber > a.ber);
    }

    SECTION("ber_curve: deterministic per seed, decreasing in SNR, budget-limited points flagged")
    {
        const std::vector<double> snr{0.0, 3.0, 6.0, 9.0};
        const StopRule stop{200, 2'000'000};
        const auto a = ber_curve(kFlat, snr, stop, 11);
        const auto b = ber_curve(kFlat, snr, stop, 11);
        const auto c = ber_curve(kFlat, snr, stop, 12);
        bool any_different = false;
        for (std::size_t i = 0; i < snr.size(); ++i)
        {
            CHECK(a[i].bit_errors == b[i].bit_errors);
            CHECK(a[i].bits_sent == b[i].bits_sent);
            any_different |= a[i].bit_errors != c[i].bit_errors || a[i].bits_sent != c[i].bits_sent;
            if (i > 0)
                CHECK(a[i].ber < a[i - 1].ber);
        }
        CHECK(any_different);

        const std::vector<double> high{12.0};
        const auto lc = ber_curve(kFlat, high, {100, 10'240}, 1);
        CHECK(lc[0].bits_sent == 10'240);
        CHECK(lc[0].low_confidence);
        CHECK_FALSE(a[0].low_confidence);
    }

    SECTION("snr_at_ber")
    {
        std::vector<BerPoint> curve(3);
        curve[0] = {0.0, 1000, 10, 1e-2, false};
        curve[1] = {2.0, 1000, 1, 1e-4, false};
        curve[2] = {4.0, 1000, 0, 0.0, true};
        CHECK(*snr_at_ber(curve, 1e-3) == Approx(1.0).epsilon(1e-12));
        CHECK_FALSE(snr_at_ber(curve, 1e-5).has_value());
        CHECK_FALSE(snr_at_ber(curve, 0.5).has_value());
    }

    SECTION("errors")
    {
        const std::vector<cdouble> h{cdouble(1, 0), cdouble(1, 0)};
        const std::vector<unsigned> d{0u, 6u};
        const auto two = equivalent_taps(h, d, 0.57e-9, 60e9);
        CHECK_THROWS_AS(ScFdeLink(kFlat, 5.0, {500, 64}, 1), std::invalid_argument);
        CHECK_THROWS_AS(ScFdeLink(two, 5.0, {512, 4}, 1), std::invalid_argument);
        CHECK_THROWS_AS(ScFdeLink(kFlat, 5.0, {64, 64}, 1), std::invalid_argument);
        CHECK_THROWS_AS(ber_curve(kFlat, std::vector<double>{}, {}, 1), std::invalid_argument);
    }
}
