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

#include "chanforge/evalreport.hpp"
#include "chanforge/simkit.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace chanforge;
using Catch::Approx;

namespace
{
    ChannelDataset desk_data(int n_per_label, std::uint64_t seed)
    {
        auto w = ScenarioConfig::weak_defaults();
        auto s = ScenarioConfig::strong_defaults();
        for (auto *c : {&w, &s})
        {
            c->n_snapshots = 20;
            c->n_delay_bins = 48;
        }
        const std::vector<ScenarioConfig> cfgs{w, s};
        return build_dataset(cfgs, n_per_label, seed);
    }

    std::string slurp(const std::filesystem::path &p)
    {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    // Every channel shifted by `db`, floor cells untouched.
    ChannelDataset shifted(const ChannelDataset &ds, float db)
    {
        ChannelDataset out = ds;
        for (auto &ch : out.channels)
            for (Eigen::Index i = 0; i < ch.power.size(); ++i)
                if (ch.power.data()[i] > static_cast<float>(ds.manifest.noise_floor))
                    ch.power.data()[i] += db;
        return out;
    }
} // namespace

TEST_CASE("a copy of the reference scores zero everywhere", "[evalreport]")
{
    const auto ref = desk_data(8, 1);
    const auto r = evaluate(ref, {{"copy", ref}});
    const auto &m = r.method("copy");
    for (Category c : r.categories)
    {
        for (double f : m.fid.at(c))
            CHECK(f == Approx(0.0).margin(1e-9));
        CHECK(m.fid_joint.at(c) == Approx(0.0).margin(1e-7));
        for (Feature f : all_features)
            CHECK(m.summary.at(c).mean(f) == r.reference.at(c).mean(f));
        for (bool ok : m.within_tolerance.at(c))
            CHECK(ok);
    }
}

TEST_CASE("a different dataset scores above the self-split baseline", "[evalreport]")
{
    const auto ref = desk_data(16, 1);
    // swapping the category labels gives a clearly wrong generator
    auto swapped = desk_data(16, 2);
    for (auto &ch : swapped.channels)
        ch.label = ch.label == Category::weak ? Category::strong : Category::weak;
    const auto r = evaluate(ref, {{"swapped", swapped}, {"fresh", desk_data(16, 2)}});
    const auto &bad = r.method("swapped");
    for (std::size_t k = 0; k < n_features; ++k)
    {
        CHECK(r.self_split.fid_mean[k] >= 0.0);
        if (all_features[k] != Feature::shadow_fading)
            CHECK(bad.fid_mean[k] > r.self_split.fid_mean[k]);
    }
    CHECK(bad.fid_joint_mean > r.self_split.fid_joint_mean);
    // rankings list every method, best first
    for (const auto &[f, names] : r.ranking)
    {
        REQUIRE(names.size() == 2u);
        const auto k = static_cast<std::size_t>(f);
        CHECK(r.method(names[0]).fid_mean[k] <= r.method(names[1]).fid_mean[k]);
    }
    CHECK(r.ranking.at(Feature::wss_interval).front() == "fresh");
}

TEST_CASE("shadow fading of generated data uses the reference mean path loss", "[evalreport]")
{
    const auto ref = desk_data(8, 4);
    const auto r = evaluate(ref, {{"louder", shifted(ref, 3.0f)}});
    for (Category c : r.categories)
    {
        const auto &g = r.method("louder").summary.at(c);
        CHECK(g.reference_path_loss == r.reference.at(c).path_loss);
        CHECK(g.shadow_fading == Approx(g.path_loss - r.reference.at(c).path_loss).margin(1e-9));
        CHECK(g.path_loss < r.reference.at(c).path_loss - 2.0);
    }
}

TEST_CASE("table totals match a per-channel recomputation", "[evalreport]")
{
    const auto ref = desk_data(6, 5);
    const auto gen = desk_data(6, 6);
    const auto r = evaluate(ref, {{"m", gen}});
    const double floor_db = gen.manifest.noise_floor;
    for (Category c : r.categories)
    {
        double rmsds = 0.0, mp = 0.0, pl = 0.0;
        int n = 0;
        for (const auto &ch : gen.channels)
            if (ch.label == c)
            {
                const auto s = channel_stats(ch, floor_db);
                rmsds += s.rmsds;
                mp += s.multipath_count;
                pl += s.path_loss;
                ++n;
            }
        const auto &g = r.method("m").summary.at(c);
        CHECK(g.rmsds == Approx(rmsds / n).epsilon(1e-12));
        CHECK(g.multipath_count == Approx(mp / n).epsilon(1e-12));
        CHECK(g.path_loss == Approx(pl / n).epsilon(1e-12));
    }
    const std::string csv = table2_csv(r);
    CHECK(csv.rfind("statistic,unit,category,reference,m\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 5 * 2);
}

TEST_CASE("evaluation rejects empty or mismatched inputs", "[evalreport]")
{
    const auto ref = desk_data(4, 1);
    CHECK_THROWS_AS(evaluate(ChannelDataset{}, {}), std::invalid_argument);
    auto w = ScenarioConfig::weak_defaults();
    w.n_snapshots = 10;
    w.n_delay_bins = 48;
    const std::vector<ScenarioConfig> other{w};
    CHECK_THROWS_AS(evaluate(ref, {{"m", build_dataset(other, 4, 1)}}), std::invalid_argument);
    ChannelDataset empty;
    empty.manifest = ref.manifest;
    CHECK_THROWS_AS(evaluate(ref, {{"m", empty}}), std::invalid_argument);
    CHECK_THROWS_AS(evaluate(ref, {{"reference", ref}}), std::invalid_argument);
}

TEST_CASE("report files are deterministic and figures are written", "[evalreport]")
{
    const auto ref = desk_data(6, 7);
    const std::map<std::string, ChannelDataset> gen{{"a", desk_data(6, 8)}, {"b", shifted(ref, 1.0f)}};
    const auto root = std::filesystem::temp_directory_path() / "chanforge_test_report";
    std::filesystem::remove_all(root);
    for (const char *sub : {"one", "two"})
    {
        auto r = evaluate(ref, gen);
        render_figures(r, ref, gen, root / sub / "figs");
        write_report(root / sub, r);
    }
    for (const char *f : {"table2.csv", "fid.csv", "report.json"})
        CHECK(slurp(root / "one" / f) == slurp(root / "two" / f));

    auto r = evaluate(ref, gen);
    const auto files = render_figures(r, ref, gen, root / "figs");
    // 2 categories x 3 datasets heatmaps, 5 CDFs, 1 bar chart
    CHECK(files.size() == 6u + 5u + 1u);
    CHECK(r.figures == files);
    for (const auto &f : files)
    {
        const auto bytes = slurp(root / "figs" / f);
        REQUIRE(bytes.size() > 8u);
        CHECK(bytes.substr(1, 3) == "PNG");
    }
    const auto j = nlohmann::json::parse(slurp(root / "one" / "report.json"));
    CHECK(j["methods"].contains("a"));
    CHECK(j["ranking"]["rmsds"].size() == 2u);
    std::filesystem::remove_all(root);
}

TEST_CASE("every reported FID is non-negative", "[evalreport]")
{
    const auto ref = desk_data(6, 9);
    const auto r = evaluate(ref, {{"x", desk_data(6, 10)}, {"y", shifted(desk_data(6, 11), -2.0f)}});
    for (const auto &m : r.methods)
        for (const auto &[c, arr] : m.fid)
        {
            for (double v : arr)
                CHECK(v >= 0.0);
            CHECK(m.fid_joint.at(c) >= 0.0);
        }
}
