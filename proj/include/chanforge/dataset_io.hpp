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

#ifndef CHANFORGE_DATASET_IO_HPP
#define CHANFORGE_DATASET_IO_HPP

#include "chanforge/dataset.hpp"
#include "chanforge/simkit.hpp"

#include "json.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace chanforge
{
    using json = nlohmann::json;

    inline constexpr const char *tensor_file_name = "channels.f32";
    inline constexpr const char *mask_file_name = "mask.u8";
    inline constexpr const char *manifest_file_name = "manifest.json";
    inline constexpr int dataset_format_version = 1;

    namespace detail
    {
        inline std::uint32_t to_little_endian(std::uint32_t v)
        {
            if constexpr (std::endian::native == std::endian::big)
                return ((v & 0xFFu) << 24) | ((v & 0xFF00u) << 8) | ((v >> 8) & 0xFF00u) | (v >> 24);
            else
                return v;
        }

        inline void write_f32_le(std::ostream &os, std::span<const float> values)
        {
            if constexpr (std::endian::native == std::endian::little)
            {
                os.write(reinterpret_cast<const char *>(values.data()),
                         static_cast<std::streamsize>(values.size() * sizeof(float)));
            }
            else
            {
                for (float f : values)
                {
                    const std::uint32_t u = to_little_endian(std::bit_cast<std::uint32_t>(f));
                    os.write(reinterpret_cast<const char *>(&u), 4);
                }
            }
        }

        inline void read_f32_le(std::istream &is, std::span<float> values)
        {
            is.read(reinterpret_cast<char *>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(float)));
            if (!is)
                throw std::runtime_error("Tensor file is truncated.");
            if constexpr (std::endian::native == std::endian::big)
                for (float &f : values)
                    f = std::bit_cast<float>(to_little_endian(std::bit_cast<std::uint32_t>(f)));
        }

        inline json read_json_file(const std::filesystem::path &p)
        {
            std::ifstream in(p);
            if (!in)
                throw std::runtime_error("Cannot open " + p.string());
            return json::parse(in);
        }

        inline void write_text_file(const std::filesystem::path &p, const std::string &text)
        {
            std::ofstream out(p, std::ios::binary);
            if (!out)
                throw std::runtime_error("Cannot write " + p.string());
            out << text;
        }
    } // namespace detail

    // ---------------------------------------------------------------------------------------
    // Manifest <-> JSON

    inline json manifest_to_json(const ChannelDataset &ds)
    {
        const auto &m = ds.manifest;
        json j;
        j["format"] = "chanforge-dataset";
        j["version"] = dataset_format_version;
        j["shape"] = {ds.size(), m.n_snapshots, m.n_delay_bins};
        j["dtype"] = "float32-le";
        j["layout"] = "row-major [channel, snapshot, delay]";
        j["domain"] = m.normalized ? "normalized" : "dB";
        j["snapshot_dt_s"] = m.snapshot_dt;
        j["delay_resolution_ns"] = m.delay_resolution_ns;
        j["carrier_freq_hz"] = m.carrier_freq;
        j["bandwidth_hz"] = m.bandwidth;
        j["tx_rx_distance_m"] = m.tx_rx_distance;
        j["noise_floor_db"] = m.noise_floor;
        j["master_seed"] = m.master_seed;
        j["delay_grid_ns"] = make_delay_grid(m.n_delay_bins, m.delay_resolution_ns);
        j["time_grid_s"] = make_time_grid(m.n_snapshots, m.snapshot_dt);

        std::vector<std::string> labels;
        std::vector<int> los;
        for (const auto &c : ds.channels)
        {
            labels.emplace_back(category_name(c.label));
            los.push_back(c.los_bin_index);
        }
        j["labels"] = labels;
        j["los_bin_index"] = los;
        j["seeds"] = m.seeds;
        j["layout_seeds"] = m.layout_seeds;
        if (m.bounds)
            j["bounds"] = {{"p_min", m.bounds->p_min}, {"p_max", m.bounds->p_max}};
        if (m.threshold)
            j["threshold_db"] = *m.threshold;
        j["has_mask"] = !ds.masks.empty();
        return j;
    }

    inline DatasetManifest manifest_from_json(const json &j)
    {
        if (j.value("format", std::string()) != "chanforge-dataset")
            throw std::runtime_error("Not a chanforge dataset manifest.");
        if (j.at("version").get<int>() > dataset_format_version)
            throw std::runtime_error("Dataset manifest version is newer than this build supports.");
        DatasetManifest m;
        const auto shape = j.at("shape").get<std::vector<long long>>();
        if (shape.size() != 3)
            throw std::runtime_error("Dataset shape must have three dimensions.");
        m.n_snapshots = static_cast<int>(shape[1]);
        m.n_delay_bins = static_cast<int>(shape[2]);
        m.snapshot_dt = j.at("snapshot_dt_s").get<double>();
        m.delay_resolution_ns = j.at("delay_resolution_ns").get<double>();
        m.carrier_freq = j.value("carrier_freq_hz", 6e9);
        m.bandwidth = j.value("bandwidth_hz", 150e6);
        m.tx_rx_distance = j.value("tx_rx_distance_m", 50.0);
        m.noise_floor = j.at("noise_floor_db").get<double>();
        m.master_seed = j.value("master_seed", std::uint64_t{0});
        m.seeds = j.value("seeds", std::vector<std::uint64_t>{});
        m.layout_seeds = j.value("layout_seeds", std::vector<std::uint64_t>{});
        m.normalized = j.value("domain", std::string("dB")) == "normalized";
        if (j.contains("bounds"))
            m.bounds = NormalizationBounds{j["bounds"].at("p_min").get<double>(), j["bounds"].at("p_max").get<double>()};
        if (j.contains("threshold_db"))
            m.threshold = j["threshold_db"].get<double>();
        return m;
    }

    // ---------------------------------------------------------------------------------------
    // Dataset directory: channels.f32 + manifest.json (+ mask.u8 once preprocessed)

    inline void write_dataset(const std::filesystem::path &dir, const ChannelDataset &ds)
    {
        ds.validate();
        std::filesystem::create_directories(dir);
        {
            std::ofstream out(dir / tensor_file_name, std::ios::binary);
            if (!out)
                throw std::runtime_error("Cannot write " + (dir / tensor_file_name).string());
            for (const auto &c : ds.channels)
                detail::write_f32_le(out, std::span<const float>(c.power.data(), static_cast<std::size_t>(c.power.size())));
        }
        if (!ds.masks.empty())
        {
            std::ofstream out(dir / mask_file_name, std::ios::binary);
            for (const auto &m : ds.masks)
                out.write(reinterpret_cast<const char *>(m.data()), static_cast<std::streamsize>(m.size()));
        }
        else
        {
            std::filesystem::remove(dir / mask_file_name);
        }
        detail::write_text_file(dir / manifest_file_name, manifest_to_json(ds).dump(2) + "\n");
    }

    inline ChannelDataset read_dataset(const std::filesystem::path &dir)
    {
        const json j = detail::read_json_file(dir / manifest_file_name);
        ChannelDataset ds;
        ds.manifest = manifest_from_json(j);
        const auto &m = ds.manifest;
        const auto n = static_cast<std::size_t>(j.at("shape")[0].get<long long>());
        const auto labels = j.at("labels").get<std::vector<std::string>>();
        const auto los = j.at("los_bin_index").get<std::vector<int>>();
        if (labels.size() != n || los.size() != n)
            throw std::runtime_error("Manifest label/LOS lists do not match the channel count.");

        const auto expected = static_cast<std::uintmax_t>(n) * m.n_snapshots * m.n_delay_bins * sizeof(float);
        if (std::filesystem::file_size(dir / tensor_file_name) != expected)
            throw std::runtime_error("Tensor file size does not match the manifest shape.");
        std::ifstream in(dir / tensor_file_name, std::ios::binary);
        ds.channels.reserve(n);
        for (std::size_t k = 0; k < n; ++k)
        {
            Pdp p = make_pdp_on_grid(m, parse_category(labels[k]), los[k]);
            detail::read_f32_le(in, std::span<float>(p.power.data(), static_cast<std::size_t>(p.power.size())));
            ds.channels.push_back(std::move(p));
        }

        if (j.value("has_mask", false))
        {
            std::ifstream min(dir / mask_file_name, std::ios::binary);
            if (!min)
                throw std::runtime_error("Manifest declares a mask but mask.u8 is missing.");
            for (std::size_t k = 0; k < n; ++k)
            {
                MaskMatrix mk(m.n_snapshots, m.n_delay_bins);
                min.read(reinterpret_cast<char *>(mk.data()), static_cast<std::streamsize>(mk.size()));
                if (!min)
                    throw std::runtime_error("Mask file is truncated.");
                ds.masks.push_back(std::move(mk));
            }
        }
        ds.validate();
        return ds;
    }

    // ---------------------------------------------------------------------------------------
    // Scenario configs

    inline json scenario_to_json(const ScenarioConfig &c);

    // Unknown keys are rejected.
    inline void apply_scenario_json(ScenarioConfig &c, const json &j)
    {
        const json known = scenario_to_json(c);
        for (const auto &item : j.items())
            if (!known.contains(item.key()) && item.key() != "layout_seed")
                throw std::invalid_argument("Unknown scenario key '" + item.key() + "'.");
        if (j.contains("category"))
        {
            const Category cat = parse_category(j["category"].get<std::string>());
            const ScenarioConfig base = cat == Category::weak ? ScenarioConfig::weak_defaults()
                                                              : ScenarioConfig::strong_defaults();
            // Switching category resets the category-dependent defaults.
            if (cat != c.category)
            {
                c.speed = base.speed;
                c.n_static_scatterers = base.n_static_scatterers;
            }
            c.category = cat;
        }
        auto get = [&](const char *key, auto &field)
        {
            if (j.contains(key))
                field = j[key].get<std::decay_t<decltype(field)>>();
        };
        get("carrier_freq", c.carrier_freq);
        get("bandwidth", c.bandwidth);
        get("tx_rx_distance", c.tx_rx_distance);
        get("speed", c.speed);
        get("n_snapshots", c.n_snapshots);
        get("n_delay_bins", c.n_delay_bins);
        get("snapshot_dt", c.snapshot_dt);
        get("n_static_scatterers", c.n_static_scatterers);
        get("n_dynamic_scatterers", c.n_dynamic_scatterers);
        get("dynamic_offset_min", c.dynamic_offset_min);
        get("dynamic_offset_max", c.dynamic_offset_max);
        get("noise_floor", c.noise_floor);
        get("rng_seed", c.rng_seed);
        get("street_half_width", c.street_half_width);
        get("scatterer_depth", c.scatterer_depth);
        get("layout_margin", c.layout_margin);
        get("start_jitter", c.start_jitter);
        get("lane_width", c.lane_width);
        get("static_rcs_min", c.static_rcs_min);
        get("static_rcs_max", c.static_rcs_max);
        get("vehicle_rcs", c.vehicle_rcs);
        get("power_jitter_db", c.power_jitter_db);
        if (j.contains("layout_seed"))
            c.layout_seed = j["layout_seed"].get<std::uint64_t>();
    }

    inline json scenario_to_json(const ScenarioConfig &c)
    {
        json j = {{"category", category_name(c.category)},
                  {"carrier_freq", c.carrier_freq},
                  {"bandwidth", c.bandwidth},
                  {"tx_rx_distance", c.tx_rx_distance},
                  {"speed", c.speed},
                  {"n_snapshots", c.n_snapshots},
                  {"n_delay_bins", c.n_delay_bins},
                  {"snapshot_dt", c.snapshot_dt},
                  {"n_static_scatterers", c.n_static_scatterers},
                  {"n_dynamic_scatterers", c.n_dynamic_scatterers},
                  {"dynamic_offset_min", c.dynamic_offset_min},
                  {"dynamic_offset_max", c.dynamic_offset_max},
                  {"noise_floor", c.noise_floor},
                  {"rng_seed", c.rng_seed},
                  {"street_half_width", c.street_half_width},
                  {"scatterer_depth", c.scatterer_depth},
                  {"layout_margin", c.layout_margin},
                  {"start_jitter", c.start_jitter},
                  {"lane_width", c.lane_width},
                  {"static_rcs_min", c.static_rcs_min},
                  {"static_rcs_max", c.static_rcs_max},
                  {"vehicle_rcs", c.vehicle_rcs},
                  {"power_jitter_db", c.power_jitter_db}};
        if (c.layout_seed)
            j["layout_seed"] = *c.layout_seed;
        return j;
    }

    // A simulation plan file:
    //   { "n_per_config": 300, "defaults": {...}, "scenarios": [ {"category": "weak", ...}, ... ] }
    // "defaults" is applied to every scenario before its own keys.
    struct SimulationPlan
    {
        std::vector<ScenarioConfig> scenarios;
        int n_per_config = 1;
    };

    inline SimulationPlan simulation_plan_from_json(const json &j)
    {
        SimulationPlan plan;
        plan.n_per_config = j.value("n_per_config", 1);
        const json defaults = j.value("defaults", json::object());
        if (!j.contains("scenarios") || !j["scenarios"].is_array() || j["scenarios"].empty())
            throw std::invalid_argument("Simulation plan needs a non-empty 'scenarios' array.");
        for (const auto &s : j["scenarios"])
        {
            const Category cat = parse_category(s.value("category", defaults.value("category", std::string("weak"))));
            ScenarioConfig c = cat == Category::weak ? ScenarioConfig::weak_defaults() : ScenarioConfig::strong_defaults();
            json d = defaults;
            d.erase("category");
            apply_scenario_json(c, d);
            apply_scenario_json(c, s);
            plan.scenarios.push_back(c);
        }
        return plan;
    }

    inline SimulationPlan read_simulation_plan(const std::filesystem::path &p)
    {
        return simulation_plan_from_json(detail::read_json_file(p));
    }

} // namespace chanforge

#endif // CHANFORGE_DATASET_IO_HPP
