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

#ifndef CHANFORGE_TRAIN_CONFIG_HPP
#define CHANFORGE_TRAIN_CONFIG_HPP

#include "chanforge/losses.hpp"
#include "chanforge/model.hpp"
#include "chanforge/nn.hpp"

#include "json.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace chanforge
{
    struct TrainConfig
    {
        nn::AdamConfig adam;          // lr 4e-4, beta1 0.8, beta2 0.999
        int batch_size = 32;
        int epochs = 500;
        long long max_steps = 0;      // 0 = no limit beyond `epochs`
        LossWeights weights;          // lambda_1..3 = 1, 10, 5
        nn::Recurrence recurrence = nn::Recurrence::lstm;
        bool stationarity_constraint = true; // false forces lambda_3 = 0
        std::uint64_t seed = 0;
        int checkpoint_every = 0;     // epochs; 0 writes only the final checkpoint
        int d_steps_per_g_step = 1;
        TpccNormalization tpcc_normalization = TpccNormalization::by_snapshots;
        int los_guard = 1;

        // Architecture.
        int latent_dim = 100;
        std::vector<int> generator_fc = {2048, 1000};
        std::vector<int> discriminator_fc = {2048, 1024, 512};
        int n_recurrent_layers = 2;
        double dropout = 0.4;
        double leaky_slope = 0.2;
        double bn_momentum = 0.8;

        // Generation and monitoring.
        // Decoded power within this margin of the threshold is floored. With floor_snap_auto the
        // margin reaches up to the floor_snap_quantile of the valid (unmasked) training power.
        bool floor_snap_auto = true;
        double floor_snap_db = 1.0;
        double floor_snap_quantile = 0.001;
        int probe_per_label = 16;     // channels per label for the RMSDS probe FID
        bool probe_holdout = true;    // exclude the probe channels from training
        bool require_both_labels = true;
        std::string device = "cpu";

        LossWeights effective_weights() const
        {
            LossWeights w = weights;
            if (!stationarity_constraint)
                w.tpcc = 0.0;
            return w;
        }

        void validate() const
        {
            if (!(adam.learning_rate > 0.0))
                throw std::invalid_argument("Learning rate must be positive.");
            if (!(adam.beta1 > 0.0 && adam.beta1 < 1.0) || !(adam.beta2 > 0.0 && adam.beta2 < 1.0))
                throw std::invalid_argument("Adam betas must lie in (0, 1).");
            if (batch_size < 1)
                throw std::invalid_argument("Batch size must be at least 1.");
            if (epochs < 1 && max_steps < 1)
                throw std::invalid_argument("Training needs a positive epoch or step budget.");
            if (d_steps_per_g_step < 1)
                throw std::invalid_argument("d_steps_per_g_step must be at least 1.");
            if (latent_dim < 1 || n_recurrent_layers < 1)
                throw std::invalid_argument("Latent size and recurrent depth must be positive.");
            if (!(dropout >= 0.0 && dropout < 1.0))
                throw std::invalid_argument("Dropout must lie in [0, 1).");
            if (!(floor_snap_db >= 0.0) || !(floor_snap_quantile >= 0.0 && floor_snap_quantile < 1.0))
                throw std::invalid_argument("Floor snap margin must be non-negative and its quantile in [0, 1).");
            effective_weights().validate();
        }

        GeneratorConfig generator_config(int n_snapshots, int n_delay_bins) const
        {
            GeneratorConfig g;
            g.n_snapshots = n_snapshots;
            g.n_delay_bins = n_delay_bins;
            g.latent_dim = latent_dim;
            g.fc_sizes = generator_fc;
            g.n_recurrent_layers = n_recurrent_layers;
            g.recurrence = recurrence;
            g.leaky_slope = leaky_slope;
            g.bn_momentum = bn_momentum;
            return g;
        }

        DiscriminatorConfig discriminator_config(int n_snapshots, int n_delay_bins) const
        {
            DiscriminatorConfig d;
            d.n_snapshots = n_snapshots;
            d.n_delay_bins = n_delay_bins;
            d.hidden = discriminator_fc;
            d.leaky_slope = leaky_slope;
            d.dropout = dropout;
            return d;
        }
    };

    inline nlohmann::json train_config_to_json(const TrainConfig &c)
    {
        return {{"learning_rate", c.adam.learning_rate},
                {"beta1", c.adam.beta1},
                {"beta2", c.adam.beta2},
                {"epsilon", c.adam.epsilon},
                {"batch_size", c.batch_size},
                {"epochs", c.epochs},
                {"max_steps", c.max_steps},
                {"lambda_adv", c.weights.adversarial},
                {"lambda_linear", c.weights.linear},
                {"lambda_tpcc", c.weights.tpcc},
                {"recurrence", nn::recurrence_name(c.recurrence)},
                {"stationarity_constraint", c.stationarity_constraint},
                {"seed", c.seed},
                {"checkpoint_every", c.checkpoint_every},
                {"d_steps_per_g_step", c.d_steps_per_g_step},
                {"tpcc_normalization", c.tpcc_normalization == TpccNormalization::by_snapshots ? "snapshots" : "pairs"},
                {"los_guard", c.los_guard},
                {"latent_dim", c.latent_dim},
                {"generator_fc", c.generator_fc},
                {"discriminator_fc", c.discriminator_fc},
                {"n_recurrent_layers", c.n_recurrent_layers},
                {"dropout", c.dropout},
                {"leaky_slope", c.leaky_slope},
                {"bn_momentum", c.bn_momentum},
                {"floor_snap_auto", c.floor_snap_auto},
                {"floor_snap_db", c.floor_snap_db},
                {"floor_snap_quantile", c.floor_snap_quantile},
                {"probe_per_label", c.probe_per_label},
                {"probe_holdout", c.probe_holdout},
                {"require_both_labels", c.require_both_labels},
                {"device", c.device}};
    }

    // Missing keys keep their defaults; unknown keys are rejected.
    inline TrainConfig train_config_from_json(const nlohmann::json &j)
    {
        TrainConfig c;
        const nlohmann::json known = train_config_to_json(c);
        for (const auto &item : j.items())
            if (!known.contains(item.key()))
                throw std::invalid_argument("Unknown training config key '" + item.key() + "'.");
        auto get = [&](const char *key, auto &field)
        {
            if (j.contains(key))
                field = j[key].get<std::decay_t<decltype(field)>>();
        };
        get("learning_rate", c.adam.learning_rate);
        get("beta1", c.adam.beta1);
        get("beta2", c.adam.beta2);
        get("epsilon", c.adam.epsilon);
        get("batch_size", c.batch_size);
        get("epochs", c.epochs);
        get("max_steps", c.max_steps);
        get("lambda_adv", c.weights.adversarial);
        get("lambda_linear", c.weights.linear);
        get("lambda_tpcc", c.weights.tpcc);
        if (j.contains("recurrence"))
            c.recurrence = nn::parse_recurrence(j["recurrence"].get<std::string>());
        get("stationarity_constraint", c.stationarity_constraint);
        get("seed", c.seed);
        get("checkpoint_every", c.checkpoint_every);
        get("d_steps_per_g_step", c.d_steps_per_g_step);
        if (j.contains("tpcc_normalization"))
        {
            const auto s = j["tpcc_normalization"].get<std::string>();
            if (s == "snapshots")
                c.tpcc_normalization = TpccNormalization::by_snapshots;
            else if (s == "pairs")
                c.tpcc_normalization = TpccNormalization::by_pairs;
            else
                throw std::invalid_argument("tpcc_normalization must be 'snapshots' or 'pairs'.");
        }
        get("los_guard", c.los_guard);
        get("latent_dim", c.latent_dim);
        get("generator_fc", c.generator_fc);
        get("discriminator_fc", c.discriminator_fc);
        get("n_recurrent_layers", c.n_recurrent_layers);
        get("dropout", c.dropout);
        get("leaky_slope", c.leaky_slope);
        get("bn_momentum", c.bn_momentum);
        get("floor_snap_auto", c.floor_snap_auto);
        get("floor_snap_db", c.floor_snap_db);
        get("floor_snap_quantile", c.floor_snap_quantile);
        get("probe_per_label", c.probe_per_label);
        get("probe_holdout", c.probe_holdout);
        get("require_both_labels", c.require_both_labels);
        get("device", c.device);
        c.validate();
        return c;
    }

} // namespace chanforge

#endif // CHANFORGE_TRAIN_CONFIG_HPP
