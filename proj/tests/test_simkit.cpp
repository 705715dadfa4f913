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

#include "chanforge/simkit.hpp"
#include "chanforge/stats.hpp"

#include <cmath>
#include <vector>

using namespace chanforge;
using Catch::Approx;

namespace
{
    ScenarioConfig desk(ScenarioConfig c)
    {
        c.n_snapshots = 60;
        c.n_delay_bins = 64;
        return c;
    }
} // namespace

TEST_CASE("free-space gain matches the closed form", "[simkit]")
{
    const double lambda = 299792458.0 / 6e9;
    const double expected = 20.0 * std::log10(lambda / (4.0 * M_PI * 50.0));
    CHECK(friis_gain_db(50.0, 6e9) == Approx(expected).epsilon(1e-12));
    CHECK(-expected == Approx(82.0).margin(0.1));
}

TEST_CASE("weak channel path loss is near free space", "[simkit]")
{
    for (std::uint64_t seed : {1u, 2u, 3u})
    {
        auto c = desk(ScenarioConfig::weak_defaults());
        c.rng_seed = seed;
        const Pdp p = simulate_dynamic_channel(c);
        const double pl = channel_path_loss(p);
        CHECK(pl >= 80.0);
        CHECK(pl <= 86.0);
    }
}

TEST_CASE("los-only scenario has a single tap per snapshot", "[simkit]")
{
    auto c = desk(ScenarioConfig::weak_defaults());
    c.n_static_scatterers = 0;
    c.n_dynamic_scatterers = 0;
    const Pdp p = simulate_dynamic_channel(c);
    for (Eigen::Index m = 0; m < p.power.rows(); ++m)
    {
        CHECK(multipath_count(std::span<const float>(p.power.row(m).data(), 64), c.noise_floor) == 1);
        CHECK(p.power(m, c.los_bin_index()) == Approx(friis_gain_db(c.tx_rx_distance, c.carrier_freq)).margin(1e-4));
    }
}

TEST_CASE("simulated channel metadata", "[simkit]")
{
    auto c = desk(ScenarioConfig::strong_defaults());
    c.rng_seed = 4;
    const Pdp p = simulate_dynamic_channel(c);
    CHECK(p.power.rows() == 60);
    CHECK(p.power.cols() == 64);
    CHECK(p.label == Category::strong);
    CHECK(p.los_bin_index == 25);
    CHECK(p.delay_grid.size() == 64);
    CHECK(p.delay_grid[1] == Approx(1e9 / 150e6));
    CHECK(p.time_grid.back() == Approx(5.9));
    CHECK(p.power.minCoeff() >= static_cast<float>(c.noise_floor));
    CHECK(p.power.allFinite());
}

TEST_CASE("strong channels decorrelate faster than weak ones", "[simkit]")
{
    double weak_acc = 0.0, strong_acc = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed)
    {
        auto w = desk(ScenarioConfig::weak_defaults());
        auto s = desk(ScenarioConfig::strong_defaults());
        w.rng_seed = s.rng_seed = seed;
        const auto tw = tpcc_matrix(simulate_dynamic_channel(w), true);
        const auto ts = tpcc_matrix(simulate_dynamic_channel(s), true);
        CHECK(ts(0, 10) < tw(0, 10));
        weak_acc += tw(0, 10);
        strong_acc += ts(0, 10);
    }
    CHECK(strong_acc < weak_acc);
}

TEST_CASE("build_dataset shape, labels and seeds", "[simkit]")
{
    std::vector<ScenarioConfig> cfgs = {desk(ScenarioConfig::weak_defaults()), desk(ScenarioConfig::strong_defaults())};
    const auto ds = build_dataset(cfgs, 3, 42);
    CHECK(ds.size() == 6);
    CHECK(ds.count(Category::weak) == 3);
    CHECK(ds.count(Category::strong) == 3);
    CHECK(ds.manifest.n_snapshots == 60);
    CHECK(ds.manifest.n_delay_bins == 64);
    CHECK(ds.manifest.seeds.size() == 6);
    CHECK(ds.manifest.master_seed == 42);
    for (std::size_t a = 0; a < 6; ++a)
        for (std::size_t b = a + 1; b < 6; ++b)
            CHECK(ds.manifest.seeds[a] != ds.manifest.seeds[b]);

    const auto one = build_dataset(std::vector<ScenarioConfig>{ScenarioConfig::weak_defaults()}, 1, 0);
    CHECK(one.size() == 1);
    CHECK(one.channels[0].power.rows() == 300);
    CHECK(one.channels[0].power.cols() == 300);
}

TEST_CASE("same master seed reproduces the dataset bit for bit", "[simkit]")
{
    std::vector<ScenarioConfig> cfgs = {desk(ScenarioConfig::weak_defaults()), desk(ScenarioConfig::strong_defaults())};
    const auto a = build_dataset(cfgs, 2, 7);
    const auto b = build_dataset(cfgs, 2, 7);
    const auto c = build_dataset(cfgs, 2, 8);
    REQUIRE(a.size() == b.size());
    bool any_diff = false;
    for (std::size_t k = 0; k < a.size(); ++k)
    {
        CHECK(a.channels[k].power == b.channels[k].power);
        any_diff = any_diff || a.channels[k].power != c.channels[k].power;
    }
    CHECK(any_diff);
}

TEST_CASE("invalid scenarios are rejected", "[simkit]")
{
    auto c = desk(ScenarioConfig::weak_defaults());
    c.n_delay_bins = 10; // LOS bin 25 falls off the grid
    CHECK_THROWS_AS(simulate_dynamic_channel(c), std::invalid_argument);
    auto d = desk(ScenarioConfig::weak_defaults());
    d.speed = 0.0;
    CHECK_THROWS_AS(simulate_dynamic_channel(d), std::invalid_argument);
    CHECK_THROWS(build_dataset(std::vector<ScenarioConfig>{}, 1, 0));
    CHECK_THROWS(build_dataset(std::vector<ScenarioConfig>{desk(ScenarioConfig::weak_defaults())}, 0, 0));
    std::vector<ScenarioConfig> mixed = {desk(ScenarioConfig::weak_defaults()), ScenarioConfig::strong_defaults()};
    CHECK_THROWS(build_dataset(mixed, 1, 0));
}
