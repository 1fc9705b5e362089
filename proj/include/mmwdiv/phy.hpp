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

#ifndef MMWDIV_PHY_HPP
#define MMWDIV_PHY_HPP

#include "mmwdiv/beamform.hpp"
#include "mmwdiv/channel.hpp"
#include "mmwdiv/common.hpp"

#include <fftw3.h>

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace mmwdiv
{
    // ---------------------------------------------------------------------------------------
    // Equivalent baseband channel
    // ---------------------------------------------------------------------------------------

    // h_l = w_r^T C_l w_t / sqrt((w_t^H w_t)(w_r^H w_r)); sum_l |h_l|^2 is the total power gain.
    inline cdouble compound_path_gain(std::size_t path, const ChannelSnapshot &snap, const AwvPair &awv)
    {
        if (path >= snap.path_count())
            throw std::out_of_range("compound_path_gain: path index out of range");
        const double norms = awv.w_t.squaredNorm() * awv.w_r.squaredNorm();
        if (!(norms > 0.0))
            throw std::invalid_argument("compound_path_gain: weight vectors must be non-zero");
        return (awv.w_r.transpose() * snap.matrices[path] * awv.w_t).value() / std::sqrt(norms);
    }

    inline std::vector<cdouble> compound_path_gains(const ChannelSnapshot &snap, const AwvPair &awv)
    {
        std::vector<cdouble> h;
        for (std::size_t l = 0; l < snap.path_count(); ++l)
            h.push_back(compound_path_gain(l, snap, awv));
        return h;
    }

    struct TapChannel
    {
        std::vector<cdouble> taps; // index = delay in chips, tap 0 is the LOS reference
        double chip_s = 0.0;

        double energy() const
        {
            double e = 0.0;
            for (const auto &t : taps)
                e += std::norm(t);
            return e;
        }
    };

    // tap[delay_l] = h_l exp(-j 2 pi f delay_l T_c), normalized to unit energy.
    inline TapChannel equivalent_taps(std::span<const cdouble> gains, std::span<const unsigned> delays_chips, double chip_s,
                                      double carrier_hz)
    {
        if (gains.empty() || gains.size() != delays_chips.size())
            throw std::invalid_argument("equivalent_taps: need one delay per path gain");
        if (delays_chips[0] != 0)
            throw std::invalid_argument("equivalent_taps: the first path must have zero delay");
        if (!(chip_s > 0.0) || !(carrier_hz > 0.0))
            throw std::invalid_argument("equivalent_taps: chip time and carrier must be positive");

        unsigned max_delay = 0;
        for (std::size_t a = 0; a < delays_chips.size(); ++a)
        {
            max_delay = std::max(max_delay, delays_chips[a]);
            for (std::size_t b = a + 1; b < delays_chips.size(); ++b)
                if (delays_chips[a] == delays_chips[b])
                    throw std::invalid_argument("equivalent_taps: duplicate path delays");
        }

        double energy = 0.0;
        for (const auto &g : gains)
            energy += std::norm(g);
        if (!(energy > 0.0))
            throw std::invalid_argument("equivalent_taps: all path gains are zero");

        TapChannel ch;
        ch.chip_s = chip_s;
        ch.taps.assign(max_delay + 1u, cdouble(0.0, 0.0));
        const double scale = 1.0 / std::sqrt(energy);
        for (std::size_t l = 0; l < gains.size(); ++l)
        {
            const double cycles = carrier_hz * static_cast<double>(delays_chips[l]) * chip_s;
            const double phase = -kTwoPi * (cycles - std::floor(cycles));
            ch.taps[delays_chips[l]] = gains[l] * std::polar(scale, phase);
        }
        return ch;
    }

    // ---------------------------------------------------------------------------------------
    // pi/2-BPSK
    // ---------------------------------------------------------------------------------------

    namespace detail
    {
        // j^n for n mod 4
        inline constexpr std::array<cdouble, 4> kQuarterTurns{cdouble(1, 0), cdouble(0, 1), cdouble(-1, 0), cdouble(0, -1)};
    }

    inline std::vector<cdouble> modulate_pi2bpsk(std::span<const std::uint8_t> bits)
    {
        std::vector<cdouble> chips(bits.size());
        for (std::size_t n = 0; n < bits.size(); ++n)
        {
            if (bits[n] > 1)
                throw std::invalid_argument("modulate_pi2bpsk: bits must be 0 or 1");
            chips[n] = (bits[n] ? -1.0 : 1.0) * detail::kQuarterTurns[n & 3u];
        }
        return chips;
    }

    // Undo the per-chip rotation and slice on the real axis.
    inline std::vector<std::uint8_t> demodulate_pi2bpsk(std::span<const cdouble> chips)
    {
        std::vector<std::uint8_t> bits(chips.size());
        for (std::size_t n = 0; n < chips.size(); ++n)
            bits[n] = (chips[n] * std::conj(detail::kQuarterTurns[n & 3u])).real() < 0.0 ? 1 : 0;
        return bits;
    }

    // ---------------------------------------------------------------------------------------
    // FFT and seeding
    // ---------------------------------------------------------------------------------------

    // Unnormalized in-place FFT of a fixed size (FFTW, estimate planning).
    class FftPlan
    {
    public:
        explicit FftPlan(std::size_t n) : n_(n)
        {
            if (n == 0)
                throw std::invalid_argument("FftPlan: size must be positive");
            std::vector<cdouble> scratch(n);
            auto *p = reinterpret_cast<fftw_complex *>(scratch.data());
            const int size = static_cast<int>(n);
            forward_ = fftw_plan_dft_1d(size, p, p, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
            backward_ = fftw_plan_dft_1d(size, p, p, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
            if (!forward_ || !backward_)
                throw std::runtime_error("FftPlan: FFTW planning failed");
        }
        FftPlan(const FftPlan &) = delete;
        FftPlan &operator=(const FftPlan &) = delete;
        FftPlan(FftPlan &&o) noexcept : n_(o.n_), forward_(std::exchange(o.forward_, nullptr)), backward_(std::exchange(o.backward_, nullptr)) {}
        FftPlan &operator=(FftPlan &&o) noexcept
        {
            std::swap(n_, o.n_);
            std::swap(forward_, o.forward_);
            std::swap(backward_, o.backward_);
            return *this;
        }
        ~FftPlan()
        {
            if (forward_)
                fftw_destroy_plan(forward_);
            if (backward_)
                fftw_destroy_plan(backward_);
        }

        std::size_t size() const { return n_; }

        void forward(std::span<cdouble> data) const { execute(forward_, data); }
        void backward(std::span<cdouble> data) const { execute(backward_, data); }

    private:
        void execute(fftw_plan plan, std::span<cdouble> data) const
        {
            if (data.size() != n_)
                throw std::invalid_argument("FftPlan: buffer size mismatch");
            auto *p = reinterpret_cast<fftw_complex *>(data.data());
            fftw_execute_dft(plan, p, p);
        }

        std::size_t n_;
        fftw_plan forward_ = nullptr;
        fftw_plan backward_ = nullptr;
    };

    // SplitMix64 finalizer applied to (base, stream): the per-stream seed for an mt19937_64.
    inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream)
    {
        std::uint64_t z = base + 0x9E3779B97F4A7C15ull * (stream + 1);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // ---------------------------------------------------------------------------------------
    // SC-FDE link
    // ---------------------------------------------------------------------------------------

    struct BerPoint
    {
        double snr_db = 0.0; // per-chip receive SNR after the unit-energy channel
        std::uint64_t bits_sent = 0;
        std::uint64_t bit_errors = 0;
        double ber = 0.0;
        bool low_confidence = false; // stopped on the bit budget before reaching min_errors
    };

    struct BlockParams
    {
        std::size_t block_len = 512;
        std::size_t cp_len = 64;
    };

    // Uncoded pi/2-BPSK over a tap channel with cyclic-prefixed blocks and a one-tap MMSE
    // equalizer per frequency bin. The receiver knows the channel exactly.
    class ScFdeLink
    {
    public:
        ScFdeLink(const TapChannel &channel, double snr_db, BlockParams params, std::uint64_t seed)
            : taps_(channel.taps), snr_db_(snr_db), params_(params), fft_(params.block_len), rng_(seed)
        {
            const std::size_t l = params_.block_len;
            if (l == 0 || (l & (l - 1)) != 0)
                throw std::invalid_argument("sc_fde_link: block length must be a power of two");
            if (taps_.empty())
                throw std::invalid_argument("sc_fde_link: empty channel");
            if (params_.cp_len < taps_.size() - 1)
                throw std::invalid_argument("sc_fde_link: cyclic prefix shorter than the channel memory");
            if (params_.cp_len >= l)
                throw std::invalid_argument("sc_fde_link: cyclic prefix must be shorter than the block");

            for (std::size_t d = 0; d < taps_.size(); ++d)
                if (taps_[d] != cdouble(0.0, 0.0))
                    nonzero_.push_back(d);

            const double n0 = db_to_power(-snr_db_);
            noise_sigma_ = std::sqrt(n0 / 2.0);

            std::vector<cdouble> h(l, cdouble(0.0, 0.0));
            for (std::size_t d = 0; d < taps_.size(); ++d)
                h[d] = taps_[d];
            fft_.forward(h);
            equalizer_.resize(l);
            const double inv_len = 1.0 / static_cast<double>(l);
            for (std::size_t f = 0; f < l; ++f)
                equalizer_[f] = std::conj(h[f]) / (std::norm(h[f]) + n0) * inv_len; // includes the IFFT scaling

            bits_.resize(l);
            tx_.resize(l + params_.cp_len);
            rx_.resize(l);
        }

        // Sends one block and returns its bit errors.
        std::uint64_t run_block()
        {
            const std::size_t l = params_.block_len;
            const std::size_t cp = params_.cp_len;

            for (std::size_t n = 0; n < l; n += 64)
            {
                std::uint64_t word = rng_();
                for (std::size_t b = 0; b < 64 && n + b < l; ++b, word >>= 1)
                    bits_[n + b] = static_cast<std::uint8_t>(word & 1u);
            }
            const auto chips = modulate_pi2bpsk(bits_);

            // Cyclic prefix followed by the block.
            for (std::size_t n = 0; n < cp; ++n)
                tx_[n] = chips[l - cp + n];
            for (std::size_t n = 0; n < l; ++n)
                tx_[cp + n] = chips[n];

            // Linear convolution, keeping only the samples after the prefix.
            for (std::size_t n = 0; n < l; ++n)
            {
                cdouble acc(0.0, 0.0);
                for (std::size_t d : nonzero_)
                    acc += taps_[d] * tx_[cp + n - d];
                rx_[n] = acc + cdouble(noise_sigma_ * normal_(rng_), noise_sigma_ * normal_(rng_));
            }

            fft_.forward(rx_);
            for (std::size_t f = 0; f < l; ++f)
                rx_[f] *= equalizer_[f];
            fft_.backward(rx_);

            const auto decided = demodulate_pi2bpsk(rx_);
            std::uint64_t errors = 0;
            for (std::size_t n = 0; n < l; ++n)
                errors += decided[n] != bits_[n];
            return errors;
        }

        std::size_t block_len() const { return params_.block_len; }
        double snr_db() const { return snr_db_; }

    private:
        std::vector<cdouble> taps_;
        std::vector<std::size_t> nonzero_;
        double snr_db_;
        BlockParams params_;
        FftPlan fft_;
        std::mt19937_64 rng_;
        std::normal_distribution<double> normal_;
        double noise_sigma_ = 0.0;
        std::vector<cdouble> equalizer_;
        std::vector<std::uint8_t> bits_;
        std::vector<cdouble> tx_;
        std::vector<cdouble> rx_;
    };

    inline BerPoint sc_fde_link(const TapChannel &channel, double snr_db, std::size_t n_blocks, BlockParams params,
                                std::uint64_t seed)
    {
        ScFdeLink link(channel, snr_db, params, seed);
        BerPoint p;
        p.snr_db = snr_db;
        for (std::size_t b = 0; b < n_blocks; ++b)
        {
            p.bit_errors += link.run_block();
            p.bits_sent += params.block_len;
        }
        p.ber = p.bits_sent ? static_cast<double>(p.bit_errors) / static_cast<double>(p.bits_sent) : 0.0;
        return p;
    }

    struct StopRule
    {
        std::uint64_t min_errors = 100;
        std::uint64_t max_bits = 100'000'000;
    };

    // One point per SNR. Point i draws from derive_seed(seed, i), so points are independent
    // and can be evaluated in any order.
    inline BerPoint ber_point(const TapChannel &channel, double snr_db, StopRule stop, BlockParams params, std::uint64_t seed)
    {
        ScFdeLink link(channel, snr_db, params, seed);
        BerPoint p;
        p.snr_db = snr_db;
        while (p.bit_errors < stop.min_errors && p.bits_sent < stop.max_bits)
        {
            p.bit_errors += link.run_block();
            p.bits_sent += params.block_len;
        }
        p.ber = static_cast<double>(p.bit_errors) / static_cast<double>(p.bits_sent);
        p.low_confidence = p.bit_errors < stop.min_errors;
        return p;
    }

    inline std::vector<BerPoint> ber_curve(const TapChannel &channel, std::span<const double> snr_db, StopRule stop,
                                           std::uint64_t seed, BlockParams params = {})
    {
        if (snr_db.empty())
            throw std::invalid_argument("ber_curve: empty SNR list");
        if (stop.max_bits == 0)
            throw std::invalid_argument("ber_curve: bit budget must be positive");
        std::vector<BerPoint> curve;
        curve.reserve(snr_db.size());
        for (std::size_t i = 0; i < snr_db.size(); ++i)
            curve.push_back(ber_point(channel, snr_db[i], stop, params, derive_seed(seed, i)));
        return curve;
    }

    // SNR at which the curve crosses `target`, interpolating log10(BER) linearly in dB between
    // the bracketing points. Points without errors cannot be interpolated and end the search.
    inline std::optional<double> snr_at_ber(std::span<const BerPoint> curve, double target)
    {
        for (std::size_t i = 0; i + 1 < curve.size(); ++i)
        {
            const auto &a = curve[i];
            const auto &b = curve[i + 1];
            if (a.ber <= 0.0 || b.ber <= 0.0)
                return std::nullopt;
            if (a.ber >= target && b.ber < target)
            {
                const double la = std::log10(a.ber), lb = std::log10(b.ber), lt = std::log10(target);
                return a.snr_db + (b.snr_db - a.snr_db) * (la - lt) / (la - lb);
            }
        }
        return std::nullopt;
    }
}

#endif
