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

#ifndef CHANFORGE_DATASET_HPP
#define CHANFORGE_DATASET_HPP

#include "chanforge/core.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace chanforge
{
    using MaskMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

    // Global dB bounds used to map power onto [-1, 1].
    struct NormalizationBounds
    {
        double p_min = 0.0;
        double p_max = 1.0;

        void validate() const
        {
            if (!(std::isfinite(p_min) && std::isfinite(p_max)) || !(p_max > p_min))
                throw std::invalid_argument("Normalization bounds require P_max > P_min.");
        }

        bool operator==(const NormalizationBounds &) const = default;
    };

    // One dynamic channel: received power over (snapshot, delay bin).
    struct Pdp
    {
        RowMatrixXf power;               // T x D, dB
        std::vector<double> delay_grid;  // D delays, ns
        std::vector<double> time_grid;   // T timestamps, s
        int los_bin_index = 0;
        Category label = Category::weak;

        Eigen::Index n_snapshots() const { return power.rows(); }
        Eigen::Index n_delay_bins() const { return power.cols(); }
    };

    inline std::vector<double> make_delay_grid(int n_bins, double resolution_ns)
    {
        std::vector<double> g(static_cast<std::size_t>(n_bins));
        for (int n = 0; n < n_bins; ++n)
            g[static_cast<std::size_t>(n)] = n * resolution_ns;
        return g;
    }

    inline std::vector<double> make_time_grid(int n_snapshots, double dt)
    {
        std::vector<double> g(static_cast<std::size_t>(n_snapshots));
        for (int m = 0; m < n_snapshots; ++m)
            g[static_cast<std::size_t>(m)] = m * dt;
        return g;
    }

    // Grid metadata and provenance shared by every channel of a dataset.
    struct DatasetManifest
    {
        int n_snapshots = 0;
        int n_delay_bins = 0;
        double snapshot_dt = 0.1;          // s
        double delay_resolution_ns = 0.0;  // ns
        double carrier_freq = 6e9;         // Hz
        double bandwidth = 150e6;          // Hz
        double tx_rx_distance = 50.0;      // m
        double noise_floor = -150.0;       // dB
        std::uint64_t master_seed = 0;
        std::vector<std::uint64_t> seeds;        // per channel
        std::vector<std::uint64_t> layout_seeds; // per channel

        // Set once the dataset has been masked and normalised.
        bool normalized = false;
        std::optional<NormalizationBounds> bounds;
        std::optional<double> threshold; // dB

        bool same_grid(const DatasetManifest &o) const
        {
            return n_snapshots == o.n_snapshots && n_delay_bins == o.n_delay_bins &&
                   snapshot_dt == o.snapshot_dt && delay_resolution_ns == o.delay_resolution_ns;
        }
    };

    // N labelled channels stored as an [N, T, D] tensor. In the normalised domain, `masks` holds
    // one validity mask per channel; otherwise it is empty.
    struct ChannelDataset
    {
        DatasetManifest manifest;
        std::vector<Pdp> channels;
        std::vector<MaskMatrix> masks;

        std::size_t size() const { return channels.size(); }
        bool empty() const { return channels.empty(); }

        std::vector<Category> labels() const
        {
            std::vector<Category> out;
            out.reserve(channels.size());
            for (const auto &c : channels)
                out.push_back(c.label);
            return out;
        }

        std::size_t count(Category c) const
        {
            std::size_t n = 0;
            for (const auto &ch : channels)
                n += ch.label == c ? 1 : 0;
            return n;
        }

        // Checks tensor shape consistency against the manifest.
        void validate() const
        {
            for (const auto &c : channels)
            {
                if (c.power.rows() != manifest.n_snapshots || c.power.cols() != manifest.n_delay_bins)
                    throw std::invalid_argument("Channel shape does not match the dataset manifest.");
                if (c.los_bin_index < 0 || c.los_bin_index >= manifest.n_delay_bins)
                    throw std::invalid_argument("LOS bin index lies outside the delay grid.");
            }
            if (!masks.empty() && masks.size() != channels.size())
                throw std::invalid_argument("Mask count does not match channel count.");
        }
    };

    inline Pdp make_pdp_on_grid(const DatasetManifest &m, Category label, int los_bin)
    {
        Pdp p;
        p.power.resize(m.n_snapshots, m.n_delay_bins);
        p.delay_grid = make_delay_grid(m.n_delay_bins, m.delay_resolution_ns);
        p.time_grid = make_time_grid(m.n_snapshots, m.snapshot_dt);
        p.los_bin_index = los_bin;
        p.label = label;
        return p;
    }

} // namespace chanforge

#endif // CHANFORGE_DATASET_HPP
