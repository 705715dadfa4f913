// SPDX-License-Identifier: Apache-2.0
//
// chanforge: generative modelling of non-stationary dynamic radio channels
// Copyright (C) 2026 The chanforge Authors
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

#ifndef CHANFORGE_LOSSES_HPP
#define CHANFORGE_LOSSES_HPP

#include "chanforge/core.hpp"
#include "chanforge/dataset.hpp"
#include "chanforge/nn.hpp"
#include "chanforge/stats.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace chanforge
{
    struct LossWeights
    {
        double adversarial = 1.0; // lambda_1
        double linear = 10.0;     // lambda_2
        double tpcc = 5.0;        // lambda_3

        void validate() const
        {
            if (!(adversarial >= 0.0 && linear >= 0.0 && tpcc >= 0.0))
                throw std::invalid_argument("Loss weights must be non-negative.");
            if (!(adversarial > 0.0 || linear > 0.0 || tpcc > 0.0))
                throw std::invalid_argument("At least one loss weight must be positive.");
        }
    };

    // Probabilities are clamped to [eps, 1 - eps] before taking logarithms; the gradient is
    // zero where clamping is active.
    inline constexpr double probability_epsilon = 1e-7;

    namespace detail
    {
        inline double clamp_prob(double p) { return std::clamp(p, probability_epsilon, 1.0 - probability_epsilon); }

        inline bool clamped(double p) { return p < probability_epsilon || p > 1.0 - probability_epsilon; }

        template <typename S>
        double mean_log(std::span<const S> p, bool complement)
        {
            if (p.empty())
                throw std::invalid_argument("Loss needs at least one probability.");
            double acc = 0.0;
            for (S v : p)
            {
                const double c = clamp_prob(static_cast<double>(v));
                acc += std::log(complement ? 1.0 - c : c);
            }
            return acc / static_cast<double>(p.size());
        }
    } // namespace detail

    // Discriminator cross-entropy: -1/2 (mean log D(real) + mean log(1 - D(fake))).
    template <typename S>
    double loss_discriminator(std::span<const S> d_real, std::span<const S> d_fake)
    {
        return -0.5 * (detail::mean_log(d_real, false) + detail::mean_log(d_fake, true));
    }

    // dL_D/dD(real) and dL_D/dD(fake), element-wise.
    template <typename S>
    std::pair<std::vector<S>, std::vector<S>> loss_discriminator_grad(std::span<const S> d_real,
                                                                      std::span<const S> d_fake)
    {
        std::vector<S> gr(d_real.size()), gf(d_fake.size());
        const double nr = static_cast<double>(d_real.size()), nf = static_cast<double>(d_fake.size());
        for (std::size_t k = 0; k < d_real.size(); ++k)
        {
            const double p = static_cast<double>(d_real[k]);
            gr[k] = detail::clamped(p) ? S(0) : static_cast<S>(-0.5 / (nr * p));
        }
        for (std::size_t k = 0; k < d_fake.size(); ++k)
        {
            const double p = static_cast<double>(d_fake[k]);
            gf[k] = detail::clamped(p) ? S(0) : static_cast<S>(0.5 / (nf * (1.0 - p)));
        }
        return {gr, gf};
    }

    // Generator adversarial loss: -mean log D(fake).
    template <typename S>
    double loss_generator_adv(std::span<const S> d_fake)
    {
        return -detail::mean_log(d_fake, false);
    }

    template <typename S>
    std::vector<S> loss_generator_adv_grad(std::span<const S> d_fake)
    {
        std::vector<S> g(d_fake.size());
        const double n = static_cast<double>(d_fake.size());
        for (std::size_t k = 0; k < d_fake.size(); ++k)
        {
            const double p = static_cast<double>(d_fake[k]);
            g[k] = detail::clamped(p) ? S(0) : static_cast<S>(-1.0 / (n * p));
        }
        return g;
    }

    // Gradients of the unclamped adversarial losses with respect to the discriminator logits
    // (probability = sigmoid(logit)). These stay informative when the sigmoid saturates.
    template <typename S>
    std::pair<std::vector<S>, std::vector<S>> loss_discriminator_logit_grad(std::span<const S> logit_real,
                                                                            std::span<const S> logit_fake)
    {
        std::vector<S> gr(logit_real.size()), gf(logit_fake.size());
        const double nr = static_cast<double>(logit_real.size()), nf = static_cast<double>(logit_fake.size());
        for (std::size_t k = 0; k < gr.size(); ++k)
            gr[k] = static_cast<S>(-0.5 / nr * nn::sigmoid(-static_cast<double>(logit_real[k])));
        for (std::size_t k = 0; k < gf.size(); ++k)
            gf[k] = static_cast<S>(0.5 / nf * nn::sigmoid(static_cast<double>(logit_fake[k])));
        return {gr, gf};
    }

    template <typename S>
    std::vector<S> loss_generator_adv_logit_grad(std::span<const S> logit_fake)
    {
        std::vector<S> g(logit_fake.size());
        const double n = static_cast<double>(logit_fake.size());
        for (std::size_t k = 0; k < g.size(); ++k)
            g[k] = static_cast<S>(-1.0 / n * nn::sigmoid(-static_cast<double>(logit_fake[k])));
        return g;
    }

    // ---------------------------------------------------------------------------------------
    // Linear-power line loss: sum over (t, tau) of ((P - P_hat) / (max P - min P))^2.

    namespace detail
    {
        template <typename S>
        double linear_range(const RowMatrix<S> &p, const RowMatrix<S> &p_hat)
        {
            if (p.rows() != p_hat.rows() || p.cols() != p_hat.cols())
                throw std::invalid_argument("Linear loss needs channels of equal shape.");
            const double range = static_cast<double>(p.maxCoeff()) - static_cast<double>(p.minCoeff());
            if (!(range > 0.0))
                throw std::invalid_argument("Linear loss is undefined when max(P) == min(P).");
            return range;
        }
    } // namespace detail

    template <typename S>
    double loss_linear(const RowMatrix<S> &p, const RowMatrix<S> &p_hat)
    {
        const double range = detail::linear_range(p, p_hat);
        return ((p.template cast<double>() - p_hat.template cast<double>()) / range).squaredNorm();
    }

    template <typename S>
    RowMatrix<S> loss_linear_grad(const RowMatrix<S> &p, const RowMatrix<S> &p_hat)
    {
        const double range = detail::linear_range(p, p_hat);
        return ((p_hat.template cast<double>() - p.template cast<double>()) * (2.0 / (range * range))).template cast<S>();
    }

    // ---------------------------------------------------------------------------------------
    // TPCC supervision loss: scale * sum_{i<j} |TPCC(i,j) - TPCC_hat(i,j)|, scale = 1/M (as
    // printed, M snapshots) or 1/#pairs.

    enum class TpccNormalization
    {
        by_snapshots,
        by_pairs
    };

    struct TpccLossOptions
    {
        bool exclude_los = true;
        int los_bin = -1; // LOS bin of the reference channel; ignored when < 0
        int los_guard = 1;
        TpccNormalization normalization = TpccNormalization::by_snapshots;
    };

    namespace detail
    {
        template <typename S>
        RowMatrixXd prepare_tpcc_input(const RowMatrix<S> &lin, const TpccLossOptions &opt)
        {
            RowMatrixXd out = lin.template cast<double>();
            if (opt.exclude_los && opt.los_bin >= 0)
                exclude_los_bins(out, opt.los_bin, opt.los_guard);
            return out;
        }

        inline double tpcc_scale(Eigen::Index M, TpccNormalization n)
        {
            if (n == TpccNormalization::by_snapshots)
                return 1.0 / static_cast<double>(M);
            const double pairs = 0.5 * static_cast<double>(M) * static_cast<double>(M - 1);
            return pairs > 0.0 ? 1.0 / pairs : 0.0;
        }
    } // namespace detail

    // Loss against a precomputed reference TPCC matrix.
    template <typename S>
    double loss_tpcc_against(const RowMatrixXd &ref_tpcc, const RowMatrix<S> &p_hat, const TpccLossOptions &opt = {})
    {
        const RowMatrixXd gen = tpcc_matrix(detail::prepare_tpcc_input(p_hat, opt));
        if (gen.rows() != ref_tpcc.rows())
            throw std::invalid_argument("TPCC loss needs channels with the same number of snapshots.");
        double acc = 0.0;
        for (Eigen::Index i = 0; i < gen.rows(); ++i)
            for (Eigen::Index j = i + 1; j < gen.cols(); ++j)
                acc += std::abs(ref_tpcc(i, j) - gen(i, j));
        return detail::tpcc_scale(gen.rows(), opt.normalization) * acc;
    }

    template <typename S>
    double loss_tpcc(const RowMatrix<S> &p, const RowMatrix<S> &p_hat, const TpccLossOptions &opt = {})
    {
        return loss_tpcc_against(tpcc_matrix(detail::prepare_tpcc_input(p, opt)), p_hat, opt);
    }

    // dL_TPCC/dP_hat against a reference TPCC matrix. With G = P_hat P_hat^T and
    // c_ij = G_ij / max(G_ii, G_jj), the gradient is (A + A^T) P_hat where A = dL/dG.
    template <typename S>
    RowMatrix<S> loss_tpcc_grad_against(const RowMatrixXd &ref_tpcc, const RowMatrix<S> &p_hat,
                                        const TpccLossOptions &opt = {})
    {
        const RowMatrixXd x = detail::prepare_tpcc_input(p_hat, opt);
        const Eigen::Index M = x.rows();
        if (ref_tpcc.rows() != M)
            throw std::invalid_argument("TPCC loss needs channels with the same number of snapshots.");
        const RowMatrixXd gram = x * x.transpose();
        for (Eigen::Index i = 0; i < M; ++i)
            if (!(gram(i, i) > 0.0))
                throw std::invalid_argument("TPCC is undefined for an all-zero snapshot.");

        const double scale = detail::tpcc_scale(M, opt.normalization);
        RowMatrixXd a = RowMatrixXd::Zero(M, M);
        for (Eigen::Index i = 0; i < M; ++i)
            for (Eigen::Index j = i + 1; j < M; ++j)
            {
                const Eigen::Index k = gram(i, i) >= gram(j, j) ? i : j;
                const double den = gram(k, k);
                const double c = gram(i, j) / den;
                const double diff = c - ref_tpcc(i, j);
                const double s = diff > 0.0 ? scale : (diff < 0.0 ? -scale : 0.0);
                if (s == 0.0)
                    continue;
                a(i, j) += s / den;
                a(k, k) -= s * gram(i, j) / (den * den);
            }
        RowMatrixXd g = (a + a.transpose()) * x;
        if (opt.exclude_los && opt.los_bin >= 0)
            exclude_los_bins(g, opt.los_bin, opt.los_guard);
        return g.template cast<S>();
    }

    template <typename S>
    RowMatrix<S> loss_tpcc_grad(const RowMatrix<S> &p, const RowMatrix<S> &p_hat, const TpccLossOptions &opt = {})
    {
        return loss_tpcc_grad_against(tpcc_matrix(detail::prepare_tpcc_input(p, opt)), p_hat, opt);
    }

    // lambda_1 L_G + lambda_2 L_linear + lambda_3 L_TPCC.
    inline double loss_total(double l_adv, double l_linear, double l_tpcc, const LossWeights &w)
    {
        return w.adversarial * l_adv + w.linear * l_linear + w.tpcc * l_tpcc;
    }

    // ---------------------------------------------------------------------------------------
    // Normalised generator output -> linear power, and the element-wise derivative of that map.

    template <typename S>
    RowMatrix<S> normalized_to_linear(const RowMatrix<S> &normalized, const NormalizationBounds &b)
    {
        b.validate();
        const double half = 0.5 * (b.p_max - b.p_min);
        const double k = 0.1 * std::log(10.0);
        return ((normalized.template cast<double>().array() + 1.0) * half + b.p_min)
            .unaryExpr([k](double db) { return std::exp(k * db); })
            .template cast<S>()
            .matrix();
    }

    // d(linear)/d(normalized) given the linear values produced by normalized_to_linear().
    template <typename S>
    RowMatrix<S> normalized_to_linear_slope(const RowMatrix<S> &linear, const NormalizationBounds &b)
    {
        const double factor = 0.1 * std::log(10.0) * 0.5 * (b.p_max - b.p_min);
        return (linear.template cast<double>() * factor).template cast<S>();
    }

} // namespace chanforge

#endif // CHANFORGE_LOSSES_HPP
