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

#ifndef CHANFORGE_SIMKIT_HPP
#define CHANFORGE_SIMKIT_HPP

#include "chanforge/core.hpp"
#include "chanforge/dataset.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace chanforge
{
    // Geometry and radio settings of one dynamic V2V scenario.
    //
    // Tx and Rx drive along the x axis in the same lane (y = 0), `tx_rx_distance` apart. Static
    // scatterers line both sides of the street; `n_dynamic_scatterers` vehicles drive in the
    // neighbouring lanes at the same speed, behind the Tx or ahead of the Rx so that they never
    // fall inside the LOS region.
    struct ScenarioConfig
    {
        Category category = Category::weak;
        double carrier_freq = 6e9;     // Hz
        double bandwidth = 150e6;      // Hz, sets the delay bin spacing
        double tx_rx_distance = 50.0;  // m
        double speed = 0.5;            // m/s
        int n_snapshots = 300;         //
        int n_delay_bins = 300;        //
        double snapshot_dt = 0.1;      // s
        int n_static_scatterers = 60;  //
        int n_dynamic_scatterers = 2;  //
        double dynamic_offset_min = 5.0;  // m, along-road offset of a vehicle from Tx or Rx
        double dynamic_offset_max = 25.0; // m
        double noise_floor = -150.0;      // dB
        std::uint64_t rng_seed = 0;       // per-realisation randomness
        std::optional<std::uint64_t> layout_seed; // static layout; defaults to rng_seed

        double street_half_width = 9.0;   // m, distance from the Tx lane to the first scatterer row
        double scatterer_depth = 40.0;    // m, depth of the scatterer band behind the row
        double layout_margin = 200.0;     // m, scatterers extend this far beyond the Tx/Rx span
        double start_jitter = 20.0;       // m, random along-road start position of the Tx
        double lane_width = 3.5;          // m
        double static_rcs_min = 1.0;      // m^2, log-uniform radar cross section
        double static_rcs_max = 100.0;     // m^2
        double vehicle_rcs = 2.0;         // m^2
        double power_jitter_db = 2.0;     // std. deviation of the per-tap log-normal jitter

        // Full-scale (300 x 300) defaults for the two categories.
        static ScenarioConfig weak_defaults()
        {
            ScenarioConfig c;
            c.category = Category::weak;
            c.speed = 0.5;
            c.n_static_scatterers = 60;
            return c;
        }

        static ScenarioConfig strong_defaults()
        {
            ScenarioConfig c;
            c.category = Category::strong;
            c.speed = 1.5;
            c.n_static_scatterers = 250;
            return c;
        }

        double delay_resolution_ns() const { return 1e9 / bandwidth; }

        double los_delay_ns() const { return 1e9 * tx_rx_distance / speed_of_light; }

        int los_bin_index() const
        {
            return static_cast<int>(std::lround(los_delay_ns() / delay_resolution_ns()));
        }

        void validate() const
        {
            if (!(carrier_freq > 0.0) || !(bandwidth > 0.0))
                throw std::invalid_argument("Carrier frequency and bandwidth must be positive.");
            if (!(tx_rx_distance > 0.0))
                throw std::invalid_argument("Tx-Rx distance must be positive.");
            if (!(speed > 0.0))
                throw std::invalid_argument("Speed must be positive.");
            if (n_snapshots < 1 || n_delay_bins < 1)
                throw std::invalid_argument("Snapshot and delay-bin counts must be positive.");
            if (!(snapshot_dt > 0.0))
                throw std::invalid_argument("Snapshot spacing must be positive.");
            if (n_static_scatterers < 0 || n_dynamic_scatterers < 0)
                throw std::invalid_argument("Scatterer counts cannot be negative.");
            if (!(dynamic_offset_min > 0.0) || dynamic_offset_max < dynamic_offset_min)
                throw std::invalid_argument("Dynamic scatterer offset range is invalid.");
            if (!(street_half_width > lane_width) || !(scatterer_depth >= 0.0) || !(lane_width > 0.0))
                throw std::invalid_argument("Street geometry is invalid.");
            if (!(static_rcs_min > 0.0) || static_rcs_max < static_rcs_min || !(vehicle_rcs > 0.0))
                throw std::invalid_argument("Radar cross sections must be positive.");
            if (!(power_jitter_db >= 0.0) || !(start_jitter >= 0.0) || !(layout_margin >= 0.0))
                throw std::invalid_argument("Jitter and margin settings cannot be negative.");
            if (!std::isfinite(noise_floor))
                throw std::invalid_argument("Noise floor must be finite.");
            if (los_bin_index() >= n_delay_bins)
                throw std::invalid_argument("LOS delay of " + std::to_string(los_delay_ns()) +
                                            " ns exceeds the delay grid span.");
        }

        // True when the two configs produce channels on the same time/delay grid.
        bool same_grid(const ScenarioConfig &o) const
        {
            return n_snapshots == o.n_snapshots && n_delay_bins == o.n_delay_bins &&
                   snapshot_dt == o.snapshot_dt && bandwidth == o.bandwidth &&
                   carrier_freq == o.carrier_freq && noise_floor == o.noise_floor &&
                   tx_rx_distance == o.tx_rx_distance;
        }
    };

    namespace detail
    {
        inline std::uint64_t splitmix64(std::uint64_t x)
        {
            x += 0x9E3779B97F4A7C15ULL;
            x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
            x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
            return x ^ (x >> 31);
        }

        struct Scatterer
        {
            double x, y;
            double gain; // linear, includes RCS and jitter
        };
    } // namespace detail

    // Seed of realisation `index` of scenario `config_index` under `master_seed`.
    inline std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t config_index, std::uint64_t index)
    {
        return detail::splitmix64(detail::splitmix64(master_seed ^ detail::splitmix64(config_index + 1)) + index);
    }

    // Single-bounce geometric simulation of a dynamic V2V channel on the 1/bandwidth delay grid.
    //
    // Each tap is deposited into its nearest delay bin; bins whose summed power falls below the
    // noise floor are clamped to it. Scatterer taps follow the bistatic radar equation
    // (free-space decay on both segments) times a per-tap log-normal jitter; the LOS tap follows Friis.
    inline Pdp simulate_dynamic_channel(const ScenarioConfig &config)
    {
        config.validate();

        const int T = config.n_snapshots;
        const int D = config.n_delay_bins;
        const double dtau = config.delay_resolution_ns();
        const double lambda = speed_of_light / config.carrier_freq;
        const double radar_const = lambda * lambda / std::pow(4.0 * M_PI, 3);
        const double travel = config.speed * config.snapshot_dt * (T - 1);

        std::mt19937_64 layout_rng(config.layout_seed.value_or(config.rng_seed));
        std::mt19937_64 rng(detail::splitmix64(config.rng_seed ^ 0x5bd1e995ULL));
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        std::normal_distribution<double> gauss(0.0, 1.0);

        // Static layout along both sides of the street.
        const double x_lo = -config.layout_margin;
        const double x_hi = config.start_jitter + config.tx_rx_distance + travel + config.layout_margin;
        const double log_rcs_lo = std::log(config.static_rcs_min);
        const double log_rcs_hi = std::log(config.static_rcs_max);
        std::vector<detail::Scatterer> statics;
        statics.reserve(static_cast<std::size_t>(config.n_static_scatterers));
        for (int s = 0; s < config.n_static_scatterers; ++s)
        {
            const double x = x_lo + (x_hi - x_lo) * unif(layout_rng);
            const double side = unif(layout_rng) < 0.5 ? -1.0 : 1.0;
            const double y = side * (config.street_half_width + config.scatterer_depth * unif(layout_rng));
            const double rcs = std::exp(log_rcs_lo + (log_rcs_hi - log_rcs_lo) * unif(layout_rng));
            statics.push_back({x, y, rcs});
        }

        // Realisation: start position, per-tap jitter, vehicle placement.
        const double x_start = config.start_jitter * unif(rng);
        const double jitter_scale = config.power_jitter_db / 10.0 * std::log(10.0);
        for (auto &s : statics)
            s.gain *= std::exp(jitter_scale * gauss(rng));

        const int los_bin = config.los_bin_index();
        std::vector<detail::Scatterer> vehicles; // coordinates relative to the Tx
        for (int v = 0; v < config.n_dynamic_scatterers; ++v)
        {
            for (int attempt = 0;; ++attempt)
            {
                const double offset = config.dynamic_offset_min +
                                      (config.dynamic_offset_max - config.dynamic_offset_min) * unif(rng);
                const bool behind_tx = unif(rng) < 0.5;
                const double side = unif(rng) < 0.5 ? -1.0 : 1.0;
                const double x = behind_tx ? -offset : config.tx_rx_distance + offset;
                const double y = side * config.lane_width;
                const double d = std::hypot(x, y) + std::hypot(x - config.tx_rx_distance, y);
                const long bin = std::lround(1e9 * d / speed_of_light / dtau);
                // Keep vehicle taps at least one guard bin away from the LOS bin.
                if (std::abs(bin - los_bin) > 1 || attempt > 64)
                {
                    const double g = config.vehicle_rcs * std::exp(jitter_scale * gauss(rng));
                    vehicles.push_back({x, y, g});
                    break;
                }
            }
        }

        Pdp pdp;
        pdp.power.resize(T, D);
        pdp.delay_grid = make_delay_grid(D, dtau);
        pdp.time_grid = make_time_grid(T, config.snapshot_dt);
        pdp.los_bin_index = los_bin;
        pdp.label = config.category;

        const double los_power = db_to_linear(friis_gain_db(config.tx_rx_distance, config.carrier_freq));
        std::vector<double> row(static_cast<std::size_t>(D));
        auto deposit = [&](double path_length, double power)
        {
            const long bin = std::lround(1e9 * path_length / speed_of_light / dtau);
            if (bin >= 0 && bin < D)
                row[static_cast<std::size_t>(bin)] += power;
        };

        for (int m = 0; m < T; ++m)
        {
            std::fill(row.begin(), row.end(), 0.0);
            const double tx_x = x_start + config.speed * config.snapshot_dt * m;
            const double rx_x = tx_x + config.tx_rx_distance;

            deposit(config.tx_rx_distance, los_power);
            for (const auto &s : statics)
            {
                const double d1 = std::hypot(s.x - tx_x, s.y);
                const double d2 = std::hypot(s.x - rx_x, s.y);
                deposit(d1 + d2, radar_const * s.gain / (d1 * d1 * d2 * d2));
            }
            for (const auto &v : vehicles)
            {
                const double d1 = std::hypot(v.x, v.y);
                const double d2 = std::hypot(v.x - config.tx_rx_distance, v.y);
                deposit(d1 + d2, radar_const * v.gain / (d1 * d1 * d2 * d2));
            }

            for (int n = 0; n < D; ++n)
            {
                const double p = row[static_cast<std::size_t>(n)];
                const double db = p > 0.0 ? linear_to_db(p) : config.noise_floor;
                pdp.power(m, n) = static_cast<float>(std::max(db, config.noise_floor));
            }
        }
        return pdp;
    }

    // Runs `n_per_config` independent realisations of every scenario. Each scenario keeps one
    // static layout for all of its realisations; per-channel seeds derive from `master_seed`.
    inline ChannelDataset build_dataset(std::span<const ScenarioConfig> configs, int n_per_config,
                                        std::uint64_t master_seed)
    {
        if (configs.empty())
            throw std::invalid_argument("At least one scenario config is required.");
        if (n_per_config < 1)
            throw std::invalid_argument("n_per_config must be at least 1.");
        for (const auto &c : configs)
        {
            c.validate();
            if (!c.same_grid(configs.front()))
                throw std::invalid_argument("All scenario configs must share the same time/delay grid.");
        }

        const auto &first = configs.front();
        ChannelDataset ds;
        auto &m = ds.manifest;
        m.n_snapshots = first.n_snapshots;
        m.n_delay_bins = first.n_delay_bins;
        m.snapshot_dt = first.snapshot_dt;
        m.delay_resolution_ns = first.delay_resolution_ns();
        m.carrier_freq = first.carrier_freq;
        m.bandwidth = first.bandwidth;
        m.tx_rx_distance = first.tx_rx_distance;
        m.noise_floor = first.noise_floor;
        m.master_seed = master_seed;

        const std::size_t total = configs.size() * static_cast<std::size_t>(n_per_config);
        ds.channels.reserve(total);
        m.seeds.reserve(total);
        m.layout_seeds.reserve(total);
        for (std::size_t ci = 0; ci < configs.size(); ++ci)
        {
            ScenarioConfig c = configs[ci];
            const std::uint64_t layout = c.layout_seed.value_or(derive_seed(master_seed, ci, ~0ULL));
            c.layout_seed = layout;
            for (int k = 0; k < n_per_config; ++k)
            {
                c.rng_seed = derive_seed(master_seed, ci, static_cast<std::uint64_t>(k));
                ds.channels.push_back(simulate_dynamic_channel(c));
                m.seeds.push_back(c.rng_seed);
                m.layout_seeds.push_back(layout);
            }
        }
        return ds;
    }

} // namespace chanforge

#endif // CHANFORGE_SIMKIT_HPP
