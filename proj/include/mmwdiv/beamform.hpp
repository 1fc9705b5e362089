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

#ifndef MMWDIV_BEAMFORM_HPP
#define MMWDIV_BEAMFORM_HPP

#include "mmwdiv/channel.hpp"
#include "mmwdiv/common.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mmwdiv
{
    enum class Scheme
    {
        EgApc,        // equal gain, amplitude and phase control
        EgPc,         // equal gain, phase-only control
        Ms,           // maximal selection with shadowing tracing
        NonDiversity, // beamform to the LOS path and never switch
    };

    inline std::string_view to_string(Scheme s)
    {
        switch (s)
        {
        case Scheme::EgApc: return "eg_apc";
        case Scheme::EgPc: return "eg_pc";
        case Scheme::Ms: return "ms";
        case Scheme::NonDiversity: return "non_diversity";
        }
        return "unknown";
    }

    inline Scheme parse_scheme(std::string_view name)
    {
        for (Scheme s : {Scheme::EgApc, Scheme::EgPc, Scheme::Ms, Scheme::NonDiversity})
            if (to_string(s) == name)
                return s;
        throw std::invalid_argument("unknown scheme '" + std::string(name) + "' (expected eg_apc | eg_pc | ms | non_diversity)");
    }

    // Per-path antenna gain targets alpha_l = h_l^T w_t and beta_l = w_r^T g_l.
    struct GainTargets
    {
        RVector alpha;
        RVector beta;
    };

    struct AwvPair
    {
        CVector w_t;
        CVector w_r;
        Scheme scheme = Scheme::Ms;
        std::size_t path = 0;                 // beamed path for Ms / NonDiversity
        std::size_t zero_phase_fallbacks = 0; // EgPc entries whose phase was undefined
    };

    // Equal compound gain alpha_l beta_l lambda_l^(0) = mean(lambda^(0)), split so that
    // alpha_l / beta_l = N_t / N_r.
    inline GainTargets eg_gain_targets(std::span<const double> base_gains, std::size_t n_t, std::size_t n_r)
    {
        if (base_gains.empty())
            throw std::invalid_argument("eg_gain_targets: at least one path required");
        if (n_t == 0 || n_r == 0)
            throw std::invalid_argument("eg_gain_targets: array sizes must be positive");
        double mean = 0.0;
        for (double g : base_gains)
        {
            if (!(g > 0.0))
                throw std::invalid_argument("eg_gain_targets: base gains must be positive");
            mean += g;
        }
        mean /= static_cast<double>(base_gains.size());

        const auto n = static_cast<Eigen::Index>(base_gains.size());
        const double ratio = static_cast<double>(n_t) / static_cast<double>(n_r);
        GainTargets t{RVector(n), RVector(n)};
        for (Eigen::Index l = 0; l < n; ++l)
        {
            const double compound = mean / base_gains[static_cast<std::size_t>(l)];
            t.alpha(l) = std::sqrt(compound * ratio);
            t.beta(l) = std::sqrt(compound / ratio);
        }
        return t;
    }

    // Moore-Penrose pseudo-inverse through the SVD. A singular value below
    // max(rows, cols) * eps * sigma_max means coincident steering columns and is reported
    // instead of being truncated away.
    inline CMatrix pseudo_inverse(const CMatrix &a)
    {
        Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const RVector &sv = svd.singularValues();
        if (sv.size() == 0 || !(sv(0) > 0.0))
            throw DegenerateGeometryError("pseudo_inverse: zero matrix");
        const double cutoff = static_cast<double>(std::max(a.rows(), a.cols())) * std::numeric_limits<double>::epsilon() * sv(0);
        for (Eigen::Index i = 0; i < sv.size(); ++i)
            if (sv(i) <= cutoff)
                throw DegenerateGeometryError("steering matrix is rank deficient (coincident path directions)");
        return svd.matrixV() * sv.cwiseInverse().asDiagonal() * svd.matrixU().adjoint();
    }

    namespace detail
    {
        inline void check_steering(const CMatrix &tx, const CMatrix &rx, const GainTargets &targets)
        {
            const auto n = tx.cols();
            if (n == 0 || rx.cols() != n)
                throw std::invalid_argument("beamform: steering matrices must share a non-zero path count");
            if (targets.alpha.size() != n || targets.beta.size() != n)
                throw std::invalid_argument("beamform: gain targets must have one entry per path");
            if (n > std::min(tx.rows(), rx.rows()))
                throw std::invalid_argument("beamform: more paths than antenna elements");
        }

        inline double norm2(const CVector &w) { return w.squaredNorm(); }
    }

    // Minimum-norm weights meeting the targets exactly: w_t = pinv(H^T) alpha and
    // w_r^T = beta^T pinv(G).
    inline AwvPair eg_awv_apc(const CMatrix &tx_steering, const CMatrix &rx_steering, const GainTargets &targets)
    {
        detail::check_steering(tx_steering, rx_steering, targets);
        AwvPair awv;
        awv.scheme = Scheme::EgApc;
        awv.w_t = pseudo_inverse(tx_steering.transpose()) * targets.alpha.cast<cdouble>();
        awv.w_r = pseudo_inverse(rx_steering).transpose() * targets.beta.cast<cdouble>();
        return awv;
    }

    // Unit-modulus projection exp(j angle(w)). An exactly zero entry gets phase 0.
    inline CVector phase_only(const CVector &w, std::size_t &zero_entries)
    {
        CVector out(w.size());
        for (Eigen::Index i = 0; i < w.size(); ++i)
        {
            if (w(i) == cdouble(0.0, 0.0))
            {
                ++zero_entries;
                out(i) = cdouble(1.0, 0.0);
            }
            else
                out(i) = std::polar(1.0, std::arg(w(i)));
        }
        return out;
    }

    inline AwvPair eg_awv_pc(const CMatrix &tx_steering, const CMatrix &rx_steering, const GainTargets &targets)
    {
        const AwvPair apc = eg_awv_apc(tx_steering, rx_steering, targets);
        AwvPair awv;
        awv.scheme = Scheme::EgPc;
        awv.w_t = phase_only(apc.w_t, awv.zero_phase_fallbacks);
        awv.w_r = phase_only(apc.w_r, awv.zero_phase_fallbacks);
        return awv;
    }

    // Conjugate match to path k: w_t = h_k^*, w_r = g_k^*.
    inline AwvPair ms_awv(const CMatrix &tx_steering, const CMatrix &rx_steering, std::size_t k)
    {
        if (k >= static_cast<std::size_t>(tx_steering.cols()) || k >= static_cast<std::size_t>(rx_steering.cols()))
            throw std::out_of_range("ms_awv: path index out of range");
        AwvPair awv;
        awv.scheme = Scheme::Ms;
        awv.path = k;
        awv.w_t = tx_steering.col(static_cast<Eigen::Index>(k)).conjugate();
        awv.w_r = rx_steering.col(static_cast<Eigen::Index>(k)).conjugate();
        return awv;
    }

    inline AwvPair non_diversity_awv(const CMatrix &tx_steering, const CMatrix &rx_steering)
    {
        AwvPair awv = ms_awv(tx_steering, rx_steering, 0);
        awv.scheme = Scheme::NonDiversity;
        return awv;
    }

    // Sum_l |w_r^T C_l w_t|^2 / ((w_t^H w_t)(w_r^H w_r)); invariant to scaling either weight.
    inline double total_power_gain(const CVector &w_t, const CVector &w_r, const ChannelSnapshot &snap)
    {
        const double nt = detail::norm2(w_t);
        const double nr = detail::norm2(w_r);
        if (!(nt > 0.0) || !(nr > 0.0))
            throw std::invalid_argument("total_power_gain: weight vectors must be non-zero");
        if (snap.matrices.empty() || w_t.size() != snap.n_t() || w_r.size() != snap.n_r())
            throw std::invalid_argument("total_power_gain: weight sizes do not match the channel");
        double sum = 0.0;
        for (const auto &c : snap.matrices)
            sum += std::norm((w_r.transpose() * c * w_t).value());
        return sum / (nt * nr);
    }

    inline double total_power_gain(const AwvPair &awv, const ChannelSnapshot &snap)
    {
        return total_power_gain(awv.w_t, awv.w_r, snap);
    }

    // Largest violation of h_l^T w_t = alpha_l and w_r^T g_l = beta_l.
    inline double apc_constraint_residual(const CMatrix &tx_steering, const CMatrix &rx_steering, const GainTargets &targets,
                                          const AwvPair &awv)
    {
        const CVector rt = tx_steering.transpose() * awv.w_t - targets.alpha.cast<cdouble>();
        const CVector rr = rx_steering.transpose() * awv.w_r - targets.beta.cast<cdouble>();
        return std::max(rt.cwiseAbs().maxCoeff(), rr.cwiseAbs().maxCoeff());
    }

    // Closed-form EG-APC gain: sum_l |mean(lambda^(0)) / lambda_l^(0) * lambda_l|^2 over the
    // weight norms. Valid only for weights that meet the targets; anything else is rejected.
    inline double eg_apc_gain_closed(std::span<const double> base_gains, std::span<const double> instantaneous_gains,
                                     const AwvPair &awv, const CMatrix &tx_steering, const CMatrix &rx_steering,
                                     const GainTargets &targets)
    {
        if (base_gains.size() != instantaneous_gains.size() || base_gains.empty())
            throw std::invalid_argument("eg_apc_gain_closed: gain lists must be non-empty and of equal length");
        const double scale = std::max(targets.alpha.cwiseAbs().maxCoeff(), targets.beta.cwiseAbs().maxCoeff());
        if (apc_constraint_residual(tx_steering, rx_steering, targets, awv) > 1e-9 * std::max(1.0, scale))
            throw std::invalid_argument("eg_apc_gain_closed: weights do not satisfy the APC gain targets");

        double mean = 0.0;
        for (double g : base_gains)
            mean += g;
        mean /= static_cast<double>(base_gains.size());

        double sum = 0.0;
        for (std::size_t l = 0; l < base_gains.size(); ++l)
        {
            const double term = mean / base_gains[l] * instantaneous_gains[l];
            sum += term * term;
        }
        return sum / (detail::norm2(awv.w_t) * detail::norm2(awv.w_r));
    }

    inline double received_power_dbm(double p_tx_dbm, double gain_linear)
    {
        if (!(gain_linear > 0.0))
            throw std::invalid_argument("received_power_dbm: gain must be positive");
        return p_tx_dbm + power_to_db(gain_linear);
    }

    inline AwvPair compute_awv(Scheme scheme, const CMatrix &tx_steering, const CMatrix &rx_steering,
                               std::span<const double> base_gains, std::size_t ms_path = 0)
    {
        switch (scheme)
        {
        case Scheme::EgApc:
            return eg_awv_apc(tx_steering, rx_steering,
                              eg_gain_targets(base_gains, static_cast<std::size_t>(tx_steering.rows()),
                                              static_cast<std::size_t>(rx_steering.rows())));
        case Scheme::EgPc:
            return eg_awv_pc(tx_steering, rx_steering,
                             eg_gain_targets(base_gains, static_cast<std::size_t>(tx_steering.rows()),
                                             static_cast<std::size_t>(rx_steering.rows())));
        case Scheme::Ms: return ms_awv(tx_steering, rx_steering, ms_path);
        case Scheme::NonDiversity: return non_diversity_awv(tx_steering, rx_steering);
        }
        throw std::invalid_argument("compute_awv: unknown scheme");
    }

    struct OptimalityReport
    {
        double bound = 0.0;                // max_l lambda_l^2
        double max_random_objective = 0.0; // best of all random trials
        double selection_objective = 0.0;  // alpha = beta = delta[l - n]
        double equal_split_objective = 0.0;
        std::size_t strongest_path = 0;
        std::size_t trials = 0;
        bool bound_respected = false;
        bool selection_attains_bound = false;
    };

    // Brute-force check of the selection optimum under exactly orthogonal steering sets.
    // Unit-norm steering columns are taken from an (N+2)-point DFT, so h_l^H h_m = delta_lm
    // holds exactly. Half the trials draw allocations inside the path span
    // (sum alpha^2 = sum beta^2 = 1), the rest arbitrary unit-norm complex weights.
    // Every objective is evaluated through the full matrix product sum_l |w_r^T C_l w_t|^2.
    inline OptimalityReport verify_ms_optimality(std::span<const double> path_gains, std::size_t trials, std::uint64_t seed)
    {
        if (path_gains.empty())
            throw std::invalid_argument("verify_ms_optimality: at least one path required");
        const auto n = static_cast<Eigen::Index>(path_gains.size());
        const Eigen::Index m = n + 2;

        CMatrix dft(m, n);
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index l = 0; l < n; ++l)
                dft(i, l) = std::polar(1.0 / std::sqrt(static_cast<double>(m)),
                                       -kTwoPi * static_cast<double>(i * l) / static_cast<double>(m));
        const CMatrix &h = dft; // transmit
        const CMatrix g = dft.conjugate(); // receive uses a different, equally orthonormal set

        std::vector<CMatrix> c;
        for (Eigen::Index l = 0; l < n; ++l)
            c.push_back(path_gains[static_cast<std::size_t>(l)] * g.col(l) * h.col(l).transpose());

        auto objective = [&](const CVector &wt, const CVector &wr) {
            double s = 0.0;
            for (const auto &cl : c)
                s += std::norm((wr.transpose() * cl * wt).value());
            return s;
        };
        // w with h_l^T w = a_l for orthonormal columns.
        auto in_span = [](const CMatrix &basis, const RVector &a) -> CVector { return basis.conjugate() * a.cast<cdouble>(); };

        OptimalityReport r;
        r.trials = trials;
        for (Eigen::Index l = 0; l < n; ++l)
        {
            const double v = path_gains[static_cast<std::size_t>(l)] * path_gains[static_cast<std::size_t>(l)];
            if (v > r.bound)
            {
                r.bound = v;
                r.strongest_path = static_cast<std::size_t>(l);
            }
        }

        const RVector select = RVector::Unit(n, static_cast<Eigen::Index>(r.strongest_path));
        r.selection_objective = objective(in_span(h, select), in_span(g, select));
        const RVector equal = RVector::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
        r.equal_split_objective = objective(in_span(h, equal), in_span(g, equal));

        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal;
        auto random_allocation = [&]() {
            RVector a(n);
            for (Eigen::Index l = 0; l < n; ++l)
                a(l) = std::abs(normal(rng));
            const double nrm = a.norm();
            return nrm > 0.0 ? RVector(a / nrm) : select;
        };
        auto random_weight = [&]() {
            CVector w(m);
            for (Eigen::Index i = 0; i < m; ++i)
                w(i) = cdouble(normal(rng), normal(rng));
            return CVector(w / w.norm());
        };

        for (std::size_t i = 0; i < trials; ++i)
        {
            double v;
            if (i % 2 == 0)
                v = objective(in_span(h, random_allocation()), in_span(g, random_allocation()));
            else
                v = objective(random_weight(), random_weight());
            r.max_random_objective = std::max(r.max_random_objective, v);
        }

        const double tol = 1e-9 * std::max(1.0, r.bound);
        r.bound_respected = r.max_random_objective <= r.bound + tol && r.selection_objective <= r.bound + tol;
        r.selection_attains_bound = std::abs(r.selection_objective - r.bound) <= tol;
        return r;
    }
}

#endif
