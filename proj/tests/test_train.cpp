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

#include "chanforge/dataset_io.hpp"
#include "chanforge/preprocess.hpp"
#include "chanforge/simkit.hpp"
#include "chanforge/train.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace chanforge;

namespace
{
    ChannelDataset tiny_data(int n_per_label = 8)
    {
        auto w = ScenarioConfig::weak_defaults();
        auto s = ScenarioConfig::strong_defaults();
        for (auto *c : {&w, &s})
        {
            c->n_snapshots = 6;
            c->n_delay_bins = 32;
        }
        const std::vector<ScenarioConfig> cfgs{w, s};
        return preprocess_dataset(build_dataset(cfgs, n_per_label, 3));
    }

    TrainConfig tiny_config()
    {
        TrainConfig c;
        c.latent_dim = 8;
        c.generator_fc = {32, 16};
        c.discriminator_fc = {32, 16};
        c.batch_size = 4;
        c.epochs = 2;
        c.probe_per_label = 2;
        c.checkpoint_every = 1;
        c.seed = 11;
        return c;
    }

    std::string slurp(const std::filesystem::path &p)
    {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }
} // namespace

TEST_CASE("a small run produces finite losses and the expected step count", "[train]")
{
    const auto data = tiny_data();
    const auto cfg = tiny_config();
    const auto r = train(data, cfg);
    // 16 channels, 2 per label held out for the probe, batch 4
    REQUIRE(r.history.steps.size() == 2u * 3u);
    for (const auto &s : r.history.steps)
    {
        CHECK(std::isfinite(s.l_total));
        CHECK(s.l_d >= 0.0);
        CHECK(s.l_linear >= 0.0);
        CHECK(s.l_tpcc >= 0.0);
    }
    CHECK(r.history.steps.back().step == 6);
    CHECK(r.history.probes.size() == 2u);
    CHECK(r.checkpoint.step == 6);
    CHECK(r.checkpoint.epoch == 2);
}

TEST_CASE("identical seeds give identical histories and weights", "[train]")
{
    const auto data = tiny_data();
    const auto cfg = tiny_config();
    const auto a = train(data, cfg);
    const auto b = train(data, cfg);
    CHECK(a.history == b.history);
    CHECK(training_log_csv(a.history) == training_log_csv(b.history));
    REQUIRE(a.checkpoint.tensors.size() == b.checkpoint.tensors.size());
    for (std::size_t k = 0; k < a.checkpoint.tensors.size(); ++k)
        CHECK(a.checkpoint.tensors[k].data == b.checkpoint.tensors[k].data);

    auto other = cfg;
    other.seed = 12;
    CHECK_FALSE(train(data, other).history == a.history);
}

TEST_CASE("disabling the stationarity constraint zeroes its weight", "[train]")
{
    auto cfg = tiny_config();
    cfg.stationarity_constraint = false;
    CHECK(cfg.effective_weights().tpcc == 0.0);
    const auto r = train(tiny_data(), cfg);
    for (const auto &s : r.history.steps)
        CHECK(s.l_total == Catch::Approx(cfg.weights.adversarial * s.l_g + cfg.weights.linear * s.l_linear).epsilon(1e-9));
}

TEST_CASE("the total loss combines the weighted terms", "[train]")
{
    const auto cfg = tiny_config();
    const auto r = train(tiny_data(), cfg);
    const auto w = cfg.effective_weights();
    for (const auto &s : r.history.steps)
        CHECK(s.l_total ==
              Catch::Approx(w.adversarial * s.l_g + w.linear * s.l_linear + w.tpcc * s.l_tpcc).epsilon(1e-9));
}

TEST_CASE("a GRU generator trains as well", "[train]")
{
    auto cfg = tiny_config();
    cfg.recurrence = nn::Recurrence::gru;
    const auto r = train(tiny_data(), cfg);
    CHECK(r.checkpoint.generator_config.recurrence == nn::Recurrence::gru);
    CHECK(std::isfinite(r.history.steps.back().l_total));
}

TEST_CASE("training rejects raw data and bad configs", "[train]")
{
    auto w = ScenarioConfig::weak_defaults();
    w.n_snapshots = 6;
    w.n_delay_bins = 32;
    const std::vector<ScenarioConfig> cfgs{w};
    const auto raw = build_dataset(cfgs, 4, 1);
    CHECK_THROWS_AS(train(raw, tiny_config()), std::invalid_argument);

    auto bad = tiny_config();
    bad.adam.learning_rate = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = tiny_config();
    bad.batch_size = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    // one label only while both are required
    CHECK_THROWS_AS(train(preprocess_dataset(raw), tiny_config()), std::invalid_argument);
    auto single = tiny_config();
    single.require_both_labels = false;
    single.probe_per_label = 0;
    CHECK_NOTHROW(train(preprocess_dataset(raw), single));
}

TEST_CASE("generation respects count, label, range and seed", "[train]")
{
    const auto data = tiny_data();
    const auto r = train(data, tiny_config());
    const auto &ck = r.checkpoint;

    const auto none = generate(ck, Category::weak, 0, 7);
    CHECK(none.empty());
    CHECK(none.manifest.same_grid(data.manifest));
    CHECK_FALSE(none.manifest.normalized);

    const auto g = generate(ck, Category::strong, 5, 7);
    REQUIRE(g.size() == 5u);
    const auto &b = *data.manifest.bounds;
    const auto th = *data.manifest.threshold;
    for (const auto &ch : g.channels)
    {
        CHECK(ch.label == Category::strong);
        CHECK(ch.power.rows() == 6);
        CHECK(ch.power.cols() == 32);
        CHECK(ch.power.minCoeff() >= static_cast<float>(th) - 1e-3f);
        CHECK(ch.power.maxCoeff() <= static_cast<float>(b.p_max) + 1e-3f);
    }
    const auto again = generate(ck, Category::strong, 5, 7);
    for (std::size_t k = 0; k < g.size(); ++k)
        CHECK(g.channels[k].power == again.channels[k].power);
    const auto other = generate(ck, Category::strong, 5, 8);
    CHECK_FALSE(g.channels[0].power == other.channels[0].power);

    const auto all = generate_all(ck, 3, 1);
    CHECK(all.size() == 6u);
}

TEST_CASE("training writes its run directory", "[train]")
{
    const auto dir = std::filesystem::temp_directory_path() / "chanforge_test_train_run";
    std::filesystem::remove_all(dir);
    TrainOutputs out;
    out.directory = dir;
    const auto r = train(tiny_data(), tiny_config(), out);
    CHECK(std::filesystem::exists(dir / "model.cfck"));
    CHECK(std::filesystem::exists(dir / "checkpoints" / "epoch_0001.cfck"));
    CHECK(std::filesystem::exists(dir / "checkpoints" / "epoch_0002.cfck"));
    CHECK(std::filesystem::exists(dir / "history.json"));
    const auto log = slurp(dir / "train_log.csv");
    CHECK(log.rfind("step,L_D,L_G,L_linear,L_TPCC,L_total\n", 0) == 0);
    CHECK(log == training_log_csv(r.history));
    const auto cfg_back = train_config_from_json(nlohmann::json::parse(slurp(dir / "train_config.json")));
    CHECK(train_config_to_json(cfg_back) == train_config_to_json(tiny_config()));

    const auto ck = read_checkpoint(dir / "model.cfck");
    const auto a = generate(ck, Category::weak, 3, 2);
    const auto b = generate(r.checkpoint, Category::weak, 3, 2);
    for (std::size_t k = 0; k < a.size(); ++k)
        CHECK(a.channels[k].power == b.channels[k].power);
    std::filesystem::remove_all(dir);
}
