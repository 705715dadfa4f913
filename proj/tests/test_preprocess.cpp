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

#include "chanforge/preprocess.hpp"

#include <random>

using namespace chanforge;
using Catch::Approx;

TEST_CASE("mask clamps sub-threshold power", "[preprocess]")
{
    RowMatrixXd p(1, 3);
    p << -160.0, -150.0, -90.0;
    const auto m = mask(p, -150.0);
    CHECK(m.power(0, 0) == -150.0);
    CHECK(m.mask(0, 0) == 0);
    CHECK(m.power(0, 1) == -150.0);
    CHECK(m.mask(0, 1) == 1);
    CHECK(m.power(0, 2) == -90.0);
    CHECK(m.mask(0, 2) == 1);
}

TEST_CASE("mask is the identity above threshold and idempotent", "[preprocess]")
{
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-200.0, -60.0);
    RowMatrixXd p(7, 9);
    for (Eigen::Index i = 0; i < p.size(); ++i)
        p.data()[i] = u(rng);
    const auto once = mask(p, -150.0);
    const auto twice = mask(once.power, -150.0);
    CHECK(twice.power == once.power);
    CHECK((twice.mask.array() == 1).all());

    const RowMatrixXd high = RowMatrixXd::Constant(7, 9, -100.0);
    const auto h = mask(high, -150.0);
    CHECK(h.power == high);
    CHECK((h.mask.array() == 1).all());
}

TEST_CASE("normalize maps bounds and midpoint", "[preprocess]")
{
    RowMatrixXd p(1, 3);
    p << -150.0, -115.0, -80.0;
    const auto n = normalize(p);
    CHECK(n.bounds.p_min == -150.0);
    CHECK(n.bounds.p_max == -80.0);
    CHECK(n.data(0, 0) == Approx(-1.0).margin(1e-15));
    CHECK(n.data(0, 1) == Approx(0.0).margin(1e-15));
    CHECK(n.data(0, 2) == Approx(1.0).margin(1e-15));
    CHECK_THROWS(normalize(RowMatrixXd(RowMatrixXd::Constant(2, 2, -90.0))));
}

TEST_CASE("apply_mask with trivial masks", "[preprocess]")
{
    RowMatrixXd n(2, 2);
    n << 0.2, -0.4, 0.9, 1.0;
    CHECK(apply_mask(n, MaskMatrix::Ones(2, 2)) == n);
    CHECK(apply_mask(n, MaskMatrix::Zero(2, 2)) == RowMatrixXd::Constant(2, 2, -1.0));
    CHECK_THROWS(apply_mask(n, MaskMatrix::Ones(3, 2)));
}

TEST_CASE("two-by-two masking and normalisation composition", "[preprocess]")
{
    // Raw [[-80, -160], [-100, -150]] at threshold -150:
    //   mask        [[1, 0], [1, 1]]
    //   clamped     [[-80, -150], [-100, -150]], bounds [-150, -80]
    //   normalised  [[1, -1], [3/7, -1]]
    RowMatrixXd raw(2, 2);
    raw << -80.0, -160.0, -100.0, -150.0;
    const auto m = mask(raw, -150.0);
    const NormalizationBounds b{-150.0, -80.0};
    const RowMatrixXd via_mask = apply_mask(normalize(m.power, b), m.mask);
    const RowMatrixXd via_norm = normalize(m.power, b);

    RowMatrixXd expected(2, 2);
    expected << 1.0, -1.0, 3.0 / 7.0, -1.0;
    CHECK((via_mask - expected).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((via_mask - via_norm).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("denormalize inverts normalize", "[preprocess]")
{
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-150.0, -60.0);
    for (int rep = 0; rep < 100; ++rep)
    {
        RowMatrixXd p(5, 6);
        for (Eigen::Index i = 0; i < p.size(); ++i)
            p.data()[i] = u(rng);
        const auto n = normalize(p);
        CHECK((denormalize(n.data, n.bounds) - p).cwiseAbs().maxCoeff() < 1e-9);
        CHECK(n.data.minCoeff() >= -1.0 - 1e-12);
        CHECK(n.data.maxCoeff() <= 1.0 + 1e-12);
    }
    const NormalizationBounds b{-150.0, -70.0};
    RowMatrixXd e(1, 3);
    e << -1.0, 0.0, 1.0;
    const RowMatrixXd d = denormalize(e, b);
    CHECK(d(0, 0) == Approx(-150.0));
    CHECK(d(0, 1) == Approx(-110.0));
    CHECK(d(0, 2) == Approx(-70.0));
}

TEST_CASE("snap_to_floor clamps the margin band", "[preprocess]")
{
    RowMatrixXf p(1, 4);
    p << -150.0f, -149.5f, -148.0f, -90.0f;
    snap_to_floor(p, -150.0, 1.0);
    CHECK(p(0, 0) == -150.0f);
    CHECK(p(0, 1) == -150.0f);
    CHECK(p(0, 2) == -148.0f);
    CHECK(p(0, 3) == -90.0f);
}

TEST_CASE("dataset preprocessing uses global bounds and decodes back", "[preprocess]")
{
    ChannelDataset raw;
    raw.manifest.n_snapshots = 2;
    raw.manifest.n_delay_bins = 3;
    raw.manifest.delay_resolution_ns = 1.0;
    for (int k = 0; k < 3; ++k)
    {
        Pdp p;
        p.power.resize(2, 3);
        p.power << -80.0f - k, -160.0f, -120.0f, -100.0f, -150.0f, -200.0f;
        p.delay_grid = make_delay_grid(3, 1.0);
        p.time_grid = make_time_grid(2, 0.1);
        p.label = k == 0 ? Category::weak : Category::strong;
        raw.channels.push_back(p);
    }
    const auto pre = preprocess_dataset(raw, -150.0);
    REQUIRE(pre.manifest.bounds);
    CHECK(pre.manifest.bounds->p_min == -150.0);
    CHECK(pre.manifest.bounds->p_max == -80.0);
    CHECK(pre.manifest.normalized);
    CHECK(pre.masks.size() == 3);
    CHECK(pre.channels[0].power(0, 0) == Approx(1.0));
    CHECK(pre.channels[0].power(0, 1) == -1.0f);
    CHECK(pre.masks[0](1, 2) == 0);

    const auto back = decode_dataset(pre);
    CHECK_FALSE(back.manifest.normalized);
    for (std::size_t k = 0; k < 3; ++k)
        for (Eigen::Index i = 0; i < 2; ++i)
            for (Eigen::Index j = 0; j < 3; ++j)
                CHECK(back.channels[k].power(i, j) ==
                      Approx(std::max(raw.channels[k].power(i, j), -150.0f)).margin(1e-4));

    CHECK_THROWS(preprocess_dataset(pre));
    CHECK_THROWS(preprocess_dataset(ChannelDataset{}));
}
