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

#ifndef CHANFORGE_CHECKPOINT_HPP
#define CHANFORGE_CHECKPOINT_HPP

// Binary checkpoint layout:
//   8 bytes   magic "CFCKPT\0\1"
//   u32 LE    format version
//   u64 LE    header length in bytes
//   header    UTF-8 JSON (train config, generator config, dataset manifest, tensor directory)
//   payload   float32 LE tensors, column-major, in directory order

#include "chanforge/dataset_io.hpp"
#include "chanforge/model.hpp"
#include "chanforge/train_config.hpp"

#include <array>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace chanforge
{
    inline constexpr int checkpoint_format_version = 1;
    inline constexpr std::array<char, 8> checkpoint_magic = {'C', 'F', 'C', 'K', 'P', 'T', '\0', '\1'};

    struct NamedTensor
    {
        std::string name;
        Eigen::Index rows = 0;
        Eigen::Index cols = 0;
        std::vector<float> data; // column-major

        bool operator==(const NamedTensor &) const = default;
    };

    struct Checkpoint
    {
        TrainConfig train_config;
        GeneratorConfig generator_config;
        DatasetManifest manifest;                         // grids, bounds and threshold of the training data
        std::vector<int> los_bin_by_label;                // -1 when the label was absent
        double floor_snap_db = 1.0;                       // resolved generation floor margin
        long long step = 0;
        int epoch = 0;
        std::vector<NamedTensor> tensors;                 // parameters then buffers

        const NamedTensor &tensor(const std::string &name) const
        {
            for (const auto &t : tensors)
                if (t.name == name)
                    return t;
            throw std::out_of_range("Checkpoint has no tensor named '" + name + "'.");
        }
    };

    inline nlohmann::json generator_config_to_json(const GeneratorConfig &g)
    {
        return {{"n_snapshots", g.n_snapshots},
                {"n_delay_bins", g.n_delay_bins},
                {"latent_dim", g.latent_dim},
                {"fc_sizes", g.fc_sizes},
                {"n_classes", g.n_classes},
                {"n_recurrent_layers", g.n_recurrent_layers},
                {"recurrence", nn::recurrence_name(g.recurrence)},
                {"leaky_slope", g.leaky_slope},
                {"bn_momentum", g.bn_momentum}};
    }

    inline GeneratorConfig generator_config_from_json(const nlohmann::json &j)
    {
        GeneratorConfig g;
        g.n_snapshots = j.at("n_snapshots").get<int>();
        g.n_delay_bins = j.at("n_delay_bins").get<int>();
        g.latent_dim = j.at("latent_dim").get<int>();
        g.fc_sizes = j.at("fc_sizes").get<std::vector<int>>();
        g.n_classes = j.at("n_classes").get<int>();
        g.n_recurrent_layers = j.at("n_recurrent_layers").get<int>();
        g.recurrence = nn::parse_recurrence(j.at("recurrence").get<std::string>());
        g.leaky_slope = j.at("leaky_slope").get<double>();
        g.bn_momentum = j.at("bn_momentum").get<double>();
        return g;
    }

    // ---------------------------------------------------------------------------------------
    // Generator <-> tensors

    template <typename S>
    std::vector<NamedTensor> capture_generator(Generator<S> &gen)
    {
        std::vector<NamedTensor> out;
        auto push = [&](const std::string &name, const auto &m)
        {
            NamedTensor t{name, m.rows(), m.cols(), {}};
            t.data.resize(static_cast<std::size_t>(m.size()));
            const auto mc = m.template cast<float>().eval();
            for (Eigen::Index c = 0; c < m.cols(); ++c)
                for (Eigen::Index r = 0; r < m.rows(); ++r)
                    t.data[static_cast<std::size_t>(c * m.rows() + r)] = mc(r, c);
            out.push_back(std::move(t));
        };
        for (auto *p : gen.params())
            push(p->name, p->value);
        for (auto &[name, buf] : gen.buffers())
            push(name, *buf);
        return out;
    }

    template <typename S>
    void restore_generator(Generator<S> &gen, const std::vector<NamedTensor> &tensors)
    {
        auto find = [&](const std::string &name) -> const NamedTensor &
        {
            for (const auto &t : tensors)
                if (t.name == name)
                    return t;
            throw std::runtime_error("Checkpoint is missing tensor '" + name + "'.");
        };
        auto load = [&](const std::string &name, auto &m)
        {
            const NamedTensor &t = find(name);
            if (t.rows != m.rows() || t.cols != m.cols())
                throw std::runtime_error("Checkpoint tensor '" + name + "' has the wrong shape.");
            for (Eigen::Index c = 0; c < m.cols(); ++c)
                for (Eigen::Index r = 0; r < m.rows(); ++r)
                    m(r, c) = static_cast<S>(t.data[static_cast<std::size_t>(c * m.rows() + r)]);
        };
        std::size_t expected = 0;
        for (auto *p : gen.params())
        {
            load(p->name, p->value);
            ++expected;
        }
        for (auto &[name, buf] : gen.buffers())
        {
            load(name, *buf);
            ++expected;
        }
        if (expected != tensors.size())
            throw std::runtime_error("Checkpoint holds tensors the generator does not know.");
    }

    // Rebuilds the generator stored in a checkpoint.
    inline Generator<float> make_generator(const Checkpoint &ck)
    {
        std::mt19937_64 rng(0);
        Generator<float> gen(ck.generator_config, rng);
        restore_generator(gen, ck.tensors);
        return gen;
    }

    // ---------------------------------------------------------------------------------------
    // File I/O

    namespace detail
    {
        inline void write_u32_le(std::ostream &os, std::uint32_t v)
        {
            const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
            os.write(reinterpret_cast<const char *>(b), 4);
        }

        inline void write_u64_le(std::ostream &os, std::uint64_t v)
        {
            write_u32_le(os, static_cast<std::uint32_t>(v));
            write_u32_le(os, static_cast<std::uint32_t>(v >> 32));
        }

        inline std::uint64_t read_uint_le(std::istream &is, int bytes)
        {
            unsigned char b[8] = {};
            is.read(reinterpret_cast<char *>(b), bytes);
            if (!is)
                throw std::runtime_error("Checkpoint is truncated.");
            std::uint64_t v = 0;
            for (int k = bytes - 1; k >= 0; --k)
                v = (v << 8) | b[k];
            return v;
        }
    } // namespace detail

    inline nlohmann::json checkpoint_header(const Checkpoint &ck)
    {
        nlohmann::json dir = nlohmann::json::array();
        for (const auto &t : ck.tensors)
            dir.push_back({{"name", t.name}, {"rows", t.rows}, {"cols", t.cols}});
        return {{"format", "chanforge-checkpoint"},
                {"train_config", train_config_to_json(ck.train_config)},
                {"generator", generator_config_to_json(ck.generator_config)},
                {"manifest", manifest_to_json(ChannelDataset{ck.manifest, {}, {}})},
                {"los_bin_by_label", ck.los_bin_by_label},
                {"floor_snap_db", ck.floor_snap_db},
                {"step", ck.step},
                {"epoch", ck.epoch},
                {"tensors", dir}};
    }

    inline void write_checkpoint(const std::filesystem::path &path, const Checkpoint &ck)
    {
        if (path.has_parent_path())
            std::filesystem::create_directories(path.parent_path());
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw std::runtime_error("Cannot write checkpoint " + path.string());
        const std::string header = checkpoint_header(ck).dump();
        out.write(checkpoint_magic.data(), checkpoint_magic.size());
        detail::write_u32_le(out, checkpoint_format_version);
        detail::write_u64_le(out, header.size());
        out.write(header.data(), static_cast<std::streamsize>(header.size()));
        for (const auto &t : ck.tensors)
        {
            if (t.data.size() != static_cast<std::size_t>(t.rows * t.cols))
                throw std::invalid_argument("Tensor '" + t.name + "' size does not match its shape.");
            detail::write_f32_le(out, std::span<const float>(t.data));
        }
        if (!out)
            throw std::runtime_error("Failed while writing checkpoint " + path.string());
    }

    inline Checkpoint read_checkpoint(const std::filesystem::path &path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw std::runtime_error("Cannot open checkpoint " + path.string());
        std::array<char, 8> magic{};
        in.read(magic.data(), magic.size());
        if (!in || magic != checkpoint_magic)
            throw std::runtime_error(path.string() + " is not a chanforge checkpoint.");
        const auto version = detail::read_uint_le(in, 4);
        if (version > static_cast<std::uint64_t>(checkpoint_format_version))
            throw std::runtime_error("Checkpoint version is newer than this build supports.");
        const auto header_len = detail::read_uint_le(in, 8);
        if (header_len > (1ull << 30))
            throw std::runtime_error("Checkpoint header is implausibly large.");
        std::string header(header_len, '\0');
        in.read(header.data(), static_cast<std::streamsize>(header_len));
        if (!in)
            throw std::runtime_error("Checkpoint header is truncated.");
        const auto j = nlohmann::json::parse(header);

        Checkpoint ck;
        ck.train_config = train_config_from_json(j.at("train_config"));
        ck.generator_config = generator_config_from_json(j.at("generator"));
        ck.manifest = manifest_from_json(j.at("manifest"));
        ck.los_bin_by_label = j.at("los_bin_by_label").get<std::vector<int>>();
        ck.floor_snap_db = j.at("floor_snap_db").get<double>();
        ck.step = j.at("step").get<long long>();
        ck.epoch = j.at("epoch").get<int>();
        for (const auto &e : j.at("tensors"))
        {
            NamedTensor t{e.at("name").get<std::string>(), e.at("rows").get<Eigen::Index>(),
                          e.at("cols").get<Eigen::Index>(), {}};
            if (t.rows < 0 || t.cols < 0)
                throw std::runtime_error("Checkpoint tensor has a negative shape.");
            t.data.resize(static_cast<std::size_t>(t.rows * t.cols));
            detail::read_f32_le(in, std::span<float>(t.data));
            ck.tensors.push_back(std::move(t));
        }
        return ck;
    }

} // namespace chanforge

#endif // CHANFORGE_CHECKPOINT_HPP
