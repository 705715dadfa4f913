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

#include "chanforge/checkpoint.hpp"
#include "chanforge/dataset_io.hpp"
#include "chanforge/preprocess.hpp"
#include "chanforge/simkit.hpp"

#include <filesystem>
#include <fstream>
#include <iterator>

using namespace chanforge;
namespace fs = std::filesystem;

namespace
{
    fs::path scratch(const std::string &name)
    {
        const fs::path p = fs::temp_directory_path() / ("chanforge_test_" + name);
        fs::remove_all(p);
        return p;
    }

    std::string slurp(const fs::path &p)
    {
        std::ifstream in(p, std::ios::binary);
        return {std::istreambuf_iterator<char>(in), {}};
    }

    ChannelDataset small_dataset()
    {
        auto w = ScenarioConfig::weak_defaults();
        auto s = ScenarioConfig::strong_defaults();
        for (auto *c : {&w, &s})
        {
            c->n_snapshots = 8;
            c->n_delay_bins = 32;
        }
        return build_dataset(std::vector<ScenarioConfig>{w, s}, 2, 3);
    }
} // namespace

TEST_CASE("raw dataset round trips through disk", "[io]")
{
    const auto ds = small_dataset();
    const auto dir = scratch("raw");
    write_dataset(dir, ds);
    CHECK(fs::file_size(dir / "channels.f32") == 4u * 8u * 32u * sizeof(float));
    CHECK_FALSE(fs::exists(dir / "mask.u8"));
    const auto back = read_dataset(dir);
    REQUIRE(back.size() == ds.size());
    CHECK(back.manifest.seeds == ds.manifest.seeds);
    CHECK(back.manifest.layout_seeds == ds.manifest.layout_seeds);
    CHECK(back.manifest.delay_resolution_ns == ds.manifest.delay_resolution_ns);
    for (std::size_t k = 0; k < ds.size(); ++k)
    {
        CHECK(back.channels[k].power == ds.channels[k].power);
        CHECK(back.channels[k].label == ds.channels[k].label);
        CHECK(back.channels[k].los_bin_index == ds.channels[k].los_bin_index);
        CHECK(back.channels[k].delay_grid == ds.channels[k].delay_grid);
    }
    // Writing again is byte-identical.
    const auto dir2 = scratch("raw2");
    write_dataset(dir2, back);
    CHECK(slurp(dir / "channels.f32") == slurp(dir2 / "channels.f32"));
    CHECK(slurp(dir / "manifest.json") == slurp(dir2 / "manifest.json"));
}

TEST_CASE("preprocessed dataset keeps masks and bounds", "[io]")
{
    const auto pre = preprocess_dataset(small_dataset(), -150.0);
    const auto dir = scratch("pre");
    write_dataset(dir, pre);
    const auto back = read_dataset(dir);
    CHECK(back.manifest.normalized);
    REQUIRE(back.manifest.bounds);
    CHECK(*back.manifest.bounds == *pre.manifest.bounds);
    CHECK(back.manifest.threshold == pre.manifest.threshold);
    REQUIRE(back.masks.size() == pre.masks.size());
    for (std::size_t k = 0; k < pre.size(); ++k)
        CHECK(back.masks[k] == pre.masks[k]);
}

TEST_CASE("truncated tensor file is rejected", "[io]")
{
    const auto dir = scratch("trunc");
    write_dataset(dir, small_dataset());
    fs::resize_file(dir / "channels.f32", 100);
    CHECK_THROWS(read_dataset(dir));
}

TEST_CASE("simulation plan parses defaults and overrides", "[io]")
{
    const auto j = nlohmann::json::parse(R"({
        "n_per_config": 3,
        "defaults": {"n_snapshots": 60, "n_delay_bins": 64},
        "scenarios": [
            {"category": "weak"},
            {"category": "strong", "speed": 2.0}
        ]})");
    const auto plan = simulation_plan_from_json(j);
    CHECK(plan.n_per_config == 3);
    REQUIRE(plan.scenarios.size() == 2);
    CHECK(plan.scenarios[0].category == Category::weak);
    CHECK(plan.scenarios[0].n_snapshots == 60);
    CHECK(plan.scenarios[1].category == Category::strong);
    CHECK(plan.scenarios[1].speed == 2.0);
    CHECK(plan.scenarios[1].n_static_scatterers == ScenarioConfig::strong_defaults().n_static_scatterers);
    CHECK_THROWS(simulation_plan_from_json(nlohmann::json::parse(R"({"scenarios": [{"bogus": 1}]})")));
}

TEST_CASE("train config json round trip", "[io]")
{
    TrainConfig c;
    c.batch_size = 8;
    c.recurrence = nn::Recurrence::gru;
    c.stationarity_constraint = false;
    c.tpcc_normalization = TpccNormalization::by_pairs;
    c.seed = 1234567890123ULL;
    const auto back = train_config_from_json(train_config_to_json(c));
    CHECK(train_config_to_json(back) == train_config_to_json(c));
    CHECK(back.effective_weights().tpcc == 0.0);
    CHECK(back.recurrence == nn::Recurrence::gru);
    CHECK_THROWS(train_config_from_json(nlohmann::json{{"learning_rate", -1.0}}));
    CHECK_THROWS(train_config_from_json(nlohmann::json{{"beta1", 1.0}}));
    CHECK_THROWS(train_config_from_json(nlohmann::json{{"batch_size", 0}}));
    CHECK_THROWS(train_config_from_json(nlohmann::json{{"no_such_key", 0}}));
}

TEST_CASE("checkpoint file round trips bit-exactly", "[io]")
{
    std::mt19937_64 rng(1);
    GeneratorConfig g;
    g.n_snapshots = 4;
    g.n_delay_bins = 6;
    g.latent_dim = 3;
    g.fc_sizes = {5, 4};
    Generator<float> gen(g, rng);
    gen.forward(nn::Mat<float>::Random(3, 3), {0, 1, 0}, nn::Mode::train);

    Checkpoint ck;
    ck.generator_config = g;
    ck.manifest.n_snapshots = 4;
    ck.manifest.n_delay_bins = 6;
    ck.manifest.delay_resolution_ns = 6.67;
    ck.manifest.normalized = true;
    ck.manifest.bounds = NormalizationBounds{-150.0, -81.25};
    ck.manifest.threshold = -150.0;
    ck.los_bin_by_label = {2, 2};
    ck.step = 17;
    ck.epoch = 3;
    ck.tensors = capture_generator(gen);

    const auto dir = scratch("ckpt");
    write_checkpoint(dir / "a.cfck", ck);
    const auto back = read_checkpoint(dir / "a.cfck");
    CHECK(back.tensors == ck.tensors);
    CHECK(back.step == 17);
    CHECK(back.epoch == 3);
    CHECK(*back.manifest.bounds == *ck.manifest.bounds);
    write_checkpoint(dir / "b.cfck", back);
    CHECK(slurp(dir / "a.cfck") == slurp(dir / "b.cfck"));

    // Restored generator reproduces the original outputs, BN statistics included.
    Generator<float> restored = make_generator(back);
    const nn::Mat<float> z = nn::Mat<float>::Constant(2, 3, 0.25f);
    CHECK(restored.forward(z, {1, 0}, nn::Mode::eval) == gen.forward(z, {1, 0}, nn::Mode::eval));

    std::string bytes = slurp(dir / "a.cfck");
    bytes[0] = 'X';
    std::ofstream(dir / "bad.cfck", std::ios::binary) << bytes;
    CHECK_THROWS(read_checkpoint(dir / "bad.cfck"));
    fs::resize_file(dir / "a.cfck", fs::file_size(dir / "a.cfck") - 4);
    CHECK_THROWS(read_checkpoint(dir / "a.cfck"));
}
