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

#include "catch_amalgamated.hpp"

#include "chanforge/losses.hpp"

#include <cmath>
#include <functional>
#include <random>

using namespace chanforge;
using Catch::Approx;

namespace
{
    double relative_error(const RowMatrixXd &a, const RowMatrixXd &b)
    {
        const double scale = std::max({a.norm(), b.norm(), 1e-300});
        return (a - b).norm() / scale;
    }

    // Central finite differences of a scalar function of a matrix.
    RowMatrixXd numeric_grad(const std::function<double(const RowMatrixXd &)> &f, const RowMatrixXd &x, double rel_step)
    {
        RowMatrixXd g(x.rows(), x.cols());
        for (Eigen::Index k = 0; k < x.size(); ++k)
        {
            const double h = rel_step * std::max(std::abs(x.data()[k]), 1e-12);
            RowMatrixXd xp = x, xm = x;
            xp.data()[k] += h;
            xm.data()[k] -= h;
            g.data()[k] = (f(xp) - f(xm)) / (2.0 * h);
        }
        return g;
    }

    RowMatrixXd random_positive(std::mt19937_64 &rng, int rows, int cols)
    {
        std::uniform_real_distribution<double> u(-12.0, -7.0);
        RowMatrixXd m(rows, cols);
        for (Eigen::Index k = 0; k < m.size(); ++k)
            m.data()[k] = std::pow(10.0, u(rng));
        return m;
    }
} // namespace

TEST_CASE("adversarial losses at an undecided discriminator", "[losses]")
{
    const std::vector<double> half(8, 0.5);
    CHECK(std::abs(loss_discriminator<double>(half, half) - std::log(2.0)) < 1e-6);
    CHECK(std::abs(loss_generator_adv<double>(half) - std::log(2.0)) < 1e-6);
}

TEST_CASE("adversarial losses at the extremes", "[losses]")
{
    const std::vector<double> one(4, 1.0), zero(4, 0.0);
    CHECK(loss_discriminator<double>(one, zero) == Approx(0.0).margin(1e-6));
    CHECK(loss_generator_adv<double>(one) == Approx(0.0).margin(1e-6));
    CHECK(loss_generator_adv<double>(zero) == Approx(-std::log(probability_epsilon)));
    CHECK(loss_discriminator<double>(zero, zero) == Approx(-0.5 * std::log(probability_epsilon)).epsilon(1e-6));
    CHECK(std::isfinite(loss_discriminator<double>(zero, one)));
}

TEST_CASE("linear loss hand case and invariants", "[losses]")
{
    RowMatrixXd p(1, 2), q(1, 2);
    p << 0.0, 2.0;
    q << 1.0, 1.0;
    CHECK(loss_linear(p, q) == Approx(0.5).margin(1e-15));
    CHECK(loss_linear(p, p) == 0.0);
    CHECK(loss_linear<double>(p * 1e-9, q * 1e-9) == Approx(0.5).epsilon(1e-12));
    CHECK_THROWS(loss_linear<double>(RowMatrixXd::Ones(2, 2), q));
    CHECK_THROWS(loss_linear<double>(RowMatrixXd::Ones(1, 2), q));
}

TEST_CASE("tpcc loss hand case", "[losses]")
{
    RowMatrixXd p(2, 2), q(2, 2);
    p << 1.0, 0.0, 1.0, 0.0; // correlation 1
    q << 2.0, 0.0, 1.0, 0.0; // correlation 0.5
    TpccLossOptions opt;
    opt.los_bin = -1;
    CHECK(loss_tpcc(p, q, opt) == Approx(0.25).margin(1e-15));
    CHECK(loss_tpcc(p, p, opt) == 0.0);
    opt.normalization = TpccNormalization::by_pairs;
    CHECK(loss_tpcc(p, q, opt) == Approx(0.5).margin(1e-15));
}

TEST_CASE("tpcc loss is bounded by (M-1)/2", "[losses]")
{
    std::mt19937_64 rng(4);
    for (int rep = 0; rep < 20; ++rep)
    {
        const int M = 2 + rep % 7;
        const RowMatrixXd p = random_positive(rng, M, 5), q = random_positive(rng, M, 5);
        TpccLossOptions opt;
        opt.los_bin = rep % 5;
        const double l = loss_tpcc(p, q, opt);
        CHECK(l >= 0.0);
        CHECK(l <= 0.5 * (M - 1) + 1e-12);
    }
}

TEST_CASE("tpcc loss ignores the los guard band", "[losses]")
{
    std::mt19937_64 rng(6);
    const RowMatrixXd p = random_positive(rng, 4, 6);
    RowMatrixXd q = p;
    q.col(2) *= 50.0;
    q.col(3) *= 0.1;
    TpccLossOptions opt;
    opt.los_bin = 2;
    opt.los_guard = 1;
    CHECK(loss_tpcc(p, q, opt) == Approx(0.0).margin(1e-14));
    opt.los_bin = -1;
    CHECK(loss_tpcc(p, q, opt) > 0.0);
}

TEST_CASE("loss_total weighting", "[losses]")
{
    CHECK(loss_total(0.5, 0.2, 0.3, {1.0, 0.0, 0.0}) == 0.5);
    CHECK(loss_total(0.5, 0.2, 0.3, {0.0, 0.0, 1.0}) == 0.3);
    CHECK(loss_total(0.5, 0.2, 0.3, {1.0, 1.0, 1.0}) == Approx(1.0));
    CHECK_THROWS(LossWeights{-1.0, 1.0, 1.0}.validate());
    CHECK_THROWS(LossWeights{0.0, 0.0, 0.0}.validate());
}

TEST_CASE("linear loss gradient matches finite differences", "[losses]")
{
    std::mt19937_64 rng(7);
    for (int rep = 0; rep < 5; ++rep)
    {
        const RowMatrixXd p = random_positive(rng, 4, 5), q = random_positive(rng, 4, 5);
        const RowMatrixXd num = numeric_grad([&](const RowMatrixXd &x) { return loss_linear(p, x); }, q, 1e-5);
        CHECK(relative_error(loss_linear_grad(p, q), num) < 1e-4);
    }
}

TEST_CASE("tpcc loss gradient matches finite differences", "[losses]")
{
    std::mt19937_64 rng(8);
    for (int rep = 0; rep < 6; ++rep)
    {
        const RowMatrixXd p = random_positive(rng, 5, 6), q = random_positive(rng, 5, 6);
        TpccLossOptions opt;
        opt.los_bin = rep % 2 == 0 ? 1 : -1;
        opt.normalization = rep % 3 == 0 ? TpccNormalization::by_pairs : TpccNormalization::by_snapshots;
        const RowMatrixXd num = numeric_grad([&](const RowMatrixXd &x) { return loss_tpcc(p, x, opt); }, q, 1e-6);
        CHECK(relative_error(loss_tpcc_grad(p, q, opt), num) < 1e-4);
    }
}

TEST_CASE("adversarial loss gradients match finite differences", "[losses]")
{
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.05, 0.95), l(-4.0, 4.0);
    std::vector<double> real(6), fake(6), lr(6), lf(6);
    for (int k = 0; k < 6; ++k)
    {
        real[k] = u(rng);
        fake[k] = u(rng);
        lr[k] = l(rng);
        lf[k] = l(rng);
    }
    const double h = 1e-6;
    auto sig = [](const std::vector<double> &x)
    {
        std::vector<double> out(x.size());
        for (std::size_t k = 0; k < x.size(); ++k)
            out[k] = 1.0 / (1.0 + std::exp(-x[k]));
        return out;
    };

    const auto g_adv = loss_generator_adv_grad<double>(fake);
    const auto [g_r, g_f] = loss_discriminator_grad<double>(real, fake);
    const auto gl_adv = loss_generator_adv_logit_grad<double>(lf);
    const auto [gl_r, gl_f] = loss_discriminator_logit_grad<double>(lr, lf);
    RowMatrixXd ana(1, 30), num(1, 30);
    for (int k = 0; k < 6; ++k)
    {
        auto fp = fake, fm = fake;
        fp[k] += h;
        fm[k] -= h;
        num(0, k) = (loss_generator_adv<double>(fp) - loss_generator_adv<double>(fm)) / (2 * h);
        ana(0, k) = g_adv[k];
        num(0, 6 + k) = (loss_discriminator<double>(real, fp) - loss_discriminator<double>(real, fm)) / (2 * h);
        ana(0, 6 + k) = g_f[k];
        auto rp = real, rm = real;
        rp[k] += h;
        rm[k] -= h;
        num(0, 12 + k) = (loss_discriminator<double>(rp, fake) - loss_discriminator<double>(rm, fake)) / (2 * h);
        ana(0, 12 + k) = g_r[k];

        auto lp = lf, lm = lf;
        lp[k] += h;
        lm[k] -= h;
        num(0, 18 + k) = (loss_generator_adv<double>(sig(lp)) - loss_generator_adv<double>(sig(lm))) / (2 * h);
        ana(0, 18 + k) = gl_adv[k];
        auto qp = lr, qm = lr;
        qp[k] += h;
        qm[k] -= h;
        num(0, 24 + k) = (loss_discriminator<double>(sig(qp), sig(lf)) - loss_discriminator<double>(sig(qm), sig(lf))) / (2 * h);
        ana(0, 24 + k) = gl_r[k];
    }
    CHECK(relative_error(ana, num) < 1e-4);
    (void)gl_f;
}

TEST_CASE("normalised to linear map and slope", "[losses]")
{
    const NormalizationBounds b{-150.0, -80.0};
    RowMatrixXd n(1, 3);
    n << -1.0, 0.0, 1.0;
    const RowMatrixXd lin = normalized_to_linear(n, b);
    CHECK(lin(0, 0) == Approx(1e-15).epsilon(1e-12));
    CHECK(lin(0, 1) == Approx(std::pow(10.0, -11.5)).epsilon(1e-12));
    CHECK(lin(0, 2) == Approx(1e-8).epsilon(1e-12));
    const RowMatrixXd num =
        numeric_grad([&](const RowMatrixXd &x) { return normalized_to_linear(x, b).sum(); }, RowMatrixXd::Constant(1, 1, 0.3), 1e-6);
    const RowMatrixXd ana = normalized_to_linear_slope<double>(normalized_to_linear<double>(RowMatrixXd::Constant(1, 1, 0.3), b), b);
    CHECK(relative_error(ana, num) < 1e-6);
}
