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

#ifndef CHANFORGE_TRAIN_HPP
#define CHANFORGE_TRAIN_HPP

#include "chanforge/checkpoint.hpp"
#include "chanforge/dataset.hpp"
#include "chanforge/losses.hpp"
#include "chanforge/model.hpp"
#include "chanforge/preprocess.hpp"
#include "chanforge/simkit.hpp"
#include "chanforge/stats.hpp"
#include "chanforge/train_config.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace chanforge
{
    struct StepRecord
    {
        long long step = 0;
        int epoch = 0;
        double l_d = 0.0;
        double l_g = 0.0;
        double l_linear = 0.0;
        double l_tpcc = 0.0;
        double l_total = 0.0;

        bool operator==(const StepRecord &) const = default;
    };

    struct ProbeRecord
    {
        int epoch = 0;
        long long step = 0;
        double fid_rmsds = 0.0;               // mean over labels
        std::vector<double> fid_rmsds_per_label; // indexed by label, NaN when absent

        bool operator==(const ProbeRecord &o) const
        {
            auto same = [](double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); };
            if (epoch != o.epoch || step != o.step || !same(fid_rmsds, o.fid_rmsds) ||
                fid_rmsds_per_label.size() != o.fid_rmsds_per_label.size())
                return false;
            for (std::size_t k = 0; k < fid_rmsds_per_label.size(); ++k)
                if (!same(fid_rmsds_per_label[k], o.fid_rmsds_per_label[k]))
                    return false;
            return true;
        }
    };

    struct TrainHistory
    {
        std::vector<StepRecord> steps;
        std::vector<ProbeRecord> probes;
        double wall_clock_s = 0.0;

        // Wall-clock time is not part of the trajectory.
        bool operator==(const TrainHistory &o) const { return steps == o.steps && probes == o.probes; }
    };

    inline std::string training_log_csv(const TrainHistory &h)
    {
        std::ostringstream os;
        os << "step,L_D,L_G,L_linear,L_TPCC,L_total\n";
        char buf[256];
        for (const auto &s : h.steps)
        {
            std::snprintf(buf, sizeof(buf), "%lld,%.9g,%.9g,%.9g,%.9g,%.9g\n", s.step, s.l_d, s.l_g, s.l_linear,
                          s.l_tpcc, s.l_total);
            os << buf;
        }
        return os.str();
    }

    inline nlohmann::json history_to_json(const TrainHistory &h)
    {
        nlohmann::json steps = nlohmann::json::array(), probes = nlohmann::json::array();
        for (const auto &s : h.steps)
            steps.push_back({{"step", s.step}, {"epoch", s.epoch}, {"L_D", s.l_d}, {"L_G", s.l_g},
                             {"L_linear", s.l_linear}, {"L_TPCC", s.l_tpcc}, {"L_total", s.l_total}});
        for (const auto &p : h.probes)
        {
            nlohmann::json per = nlohmann::json::object();
            for (std::size_t k = 0; k < p.fid_rmsds_per_label.size(); ++k)
                if (!std::isnan(p.fid_rmsds_per_label[k]))
                    per[std::string(category_name(static_cast<Category>(k)))] = p.fid_rmsds_per_label[k];
            probes.push_back({{"epoch", p.epoch}, {"step", p.step}, {"fid_rmsds", p.fid_rmsds}, {"per_label", per}});
        }
        return {{"steps", steps}, {"probes", probes}, {"wall_clock_s", h.wall_clock_s}};
    }

    // ---------------------------------------------------------------------------------------
    // Generation

    namespace detail
    {
        inline RowMatrixXf batch_row(const nn::Mat<float> &batch, Eigen::Index b, int T, int D)
        {
            RowMatrixXf out(T, D);
            float *dst = out.data();
            for (Eigen::Index k = 0; k < batch.cols(); ++k)
                dst[k] = batch(b, k);
            return out;
        }

        inline double stats_floor(const DatasetManifest &m)
        {
            return m.threshold ? std::max(m.noise_floor, *m.threshold) : m.noise_floor;
        }
    } // namespace detail

    // Samples n channels of one label from an in-memory generator. The manifest supplies the
    // grids, normalisation bounds and threshold of the training data.
    inline ChannelDataset generate_with(Generator<float> &gen, const DatasetManifest &training_manifest,
                                        const std::vector<int> &los_bin_by_label, Category label, std::size_t n,
                                        std::uint64_t seed, double floor_snap_db)
    {
        const auto li = static_cast<std::size_t>(label_of(label));
        if (li >= los_bin_by_label.size() || los_bin_by_label[li] < 0 ||
            static_cast<int>(li) >= gen.config().n_classes)
            throw std::invalid_argument("Generator was not trained on label '" + std::string(category_name(label)) + "'.");
        if (!training_manifest.bounds)
            throw std::invalid_argument("Checkpoint manifest has no normalisation bounds.");
        const NormalizationBounds bounds = *training_manifest.bounds;
        const double threshold = training_manifest.threshold.value_or(bounds.p_min);

        ChannelDataset out;
        out.manifest = training_manifest;
        out.manifest.normalized = false;
        out.manifest.master_seed = seed;
        out.manifest.seeds.clear();
        out.manifest.layout_seeds.clear();
        out.manifest.noise_floor = detail::stats_floor(training_manifest);
        out.channels.reserve(n);

        const int T = gen.config().n_snapshots, D = gen.config().n_delay_bins;
        std::mt19937_64 rng(detail::splitmix64(seed ^ 0x6a09e667f3bcc909ULL));
        std::normal_distribution<float> normal(0.0f, 1.0f);
        constexpr std::size_t chunk = 64;
        for (std::size_t start = 0; start < n; start += chunk)
        {
            const std::size_t b = std::min(chunk, n - start);
            nn::Mat<float> z(static_cast<Eigen::Index>(b), gen.config().latent_dim);
            for (Eigen::Index r = 0; r < z.rows(); ++r)
                for (Eigen::Index c = 0; c < z.cols(); ++c)
                    z(r, c) = normal(rng);
            const std::vector<int> labels(b, label_of(label));
            const nn::Mat<float> y = gen.forward(z, labels, nn::Mode::eval);
            for (std::size_t k = 0; k < b; ++k)
            {
                Pdp p = make_pdp_on_grid(training_manifest, label, los_bin_by_label[li]);
                p.power = denormalize(detail::batch_row(y, static_cast<Eigen::Index>(k), T, D), bounds);
                snap_to_floor(p.power, threshold, floor_snap_db);
                out.channels.push_back(std::move(p));
            }
        }
        return out;
    }

    inline ChannelDataset generate(const Checkpoint &ck, Category label, std::size_t n, std::uint64_t seed)
    {
        Generator<float> gen = make_generator(ck);
        return generate_with(gen, ck.manifest, ck.los_bin_by_label, label, n, seed, ck.floor_snap_db);
    }

    // Concatenates datasets that share a grid.
    inline ChannelDataset concat_datasets(const std::vector<ChannelDataset> &parts)
    {
        if (parts.empty())
            throw std::invalid_argument("Nothing to concatenate.");
        ChannelDataset out;
        out.manifest = parts.front().manifest;
        for (const auto &p : parts)
        {
            if (!p.manifest.same_grid(out.manifest) || p.manifest.normalized != out.manifest.normalized)
                throw std::invalid_argument("Datasets to concatenate must share grid and domain.");
            out.channels.insert(out.channels.end(), p.channels.begin(), p.channels.end());
            out.masks.insert(out.masks.end(), p.masks.begin(), p.masks.end());
            out.manifest.seeds.insert(out.manifest.seeds.end(), p.manifest.seeds.begin(), p.manifest.seeds.end());
            out.manifest.layout_seeds.insert(out.manifest.layout_seeds.end(), p.manifest.layout_seeds.begin(),
                                             p.manifest.layout_seeds.end());
        }
        if (out.masks.size() != out.channels.size())
            out.masks.clear();
        return out;
    }

    // n channels for every label the checkpoint was trained on, labels in ascending order.
    inline ChannelDataset generate_all(const Checkpoint &ck, std::size_t n_per_label, std::uint64_t seed)
    {
        Generator<float> gen = make_generator(ck);
        std::vector<ChannelDataset> parts;
        for (std::size_t li = 0; li < ck.los_bin_by_label.size(); ++li)
            if (ck.los_bin_by_label[li] >= 0)
                parts.push_back(generate_with(gen, ck.manifest, ck.los_bin_by_label,
                                              category_from_label(static_cast<int>(li)), n_per_label,
                                              derive_seed(seed, li, 0), ck.floor_snap_db));
        ChannelDataset out = concat_datasets(parts);
        out.manifest.master_seed = seed;
        return out;
    }

    // ---------------------------------------------------------------------------------------
    // Training

    struct TrainOutputs
    {
        std::optional<std::filesystem::path> directory; // checkpoints, log and history
        std::function<void(const StepRecord &)> on_step;
        std::function<void(int epoch, const StepRecord &last)> on_epoch;
        std::function<void(const ProbeRecord &)> on_probe;
    };

    struct TrainResult
    {
        Checkpoint checkpoint;
        TrainHistory history;
    };

    class DivergenceError : public std::runtime_error
    {
      public:
        using std::runtime_error::runtime_error;
    };

    class Trainer
    {
      public:
        Trainer(const ChannelDataset &data, TrainConfig cfg) : cfg_(std::move(cfg)), manifest_(data.manifest)
        {
            cfg_.validate();
            if (!manifest_.normalized || !manifest_.bounds)
                throw std::invalid_argument("Training needs a preprocessed (normalised) dataset.");
            if (data.empty())
                throw std::invalid_argument("Training dataset is empty.");
            data.validate();
            T_ = manifest_.n_snapshots;
            D_ = manifest_.n_delay_bins;
            weights_ = cfg_.effective_weights();

            floor_snap_db_ = cfg_.floor_snap_auto ? auto_floor_snap(data) : cfg_.floor_snap_db;
            split(data);

            std::mt19937_64 init_rng(detail::splitmix64(cfg_.seed ^ 0x243f6a8885a308d3ULL));
            gen_ = Generator<float>(cfg_.generator_config(T_, D_), init_rng);
            disc_ = Discriminator<float>(cfg_.discriminator_config(T_, D_), init_rng);
            opt_g_ = nn::Adam<float>(gen_.params(), cfg_.adam);
            opt_d_ = nn::Adam<float>(disc_.params(), cfg_.adam);
            rng_.seed(detail::splitmix64(cfg_.seed));
        }

        Generator<float> &generator() { return gen_; }
        const TrainConfig &config() const { return cfg_; }
        long long step_count() const { return step_; }
        std::size_t train_size() const { return train_labels_.size(); }
        double floor_snap_db() const { return floor_snap_db_; }
        int steps_per_epoch() const
        {
            return std::max(1, static_cast<int>(train_labels_.size()) / batch_size());
        }

        Checkpoint checkpoint(int epoch)
        {
            Checkpoint ck;
            ck.train_config = cfg_;
            ck.generator_config = gen_.config();
            ck.manifest = manifest_;
            ck.los_bin_by_label = los_by_label_;
            ck.floor_snap_db = floor_snap_db_;
            ck.step = step_;
            ck.epoch = epoch;
            ck.tensors = capture_generator(gen_);
            return ck;
        }

        // One alternation: d_steps_per_g_step discriminator updates, then one generator update.
        StepRecord step(const std::vector<std::size_t> &batch, int epoch)
        {
            const nn::FlushDenormals ftz;
            StepRecord rec;
            rec.epoch = epoch;
            rec.step = ++step_;
            std::vector<std::size_t> idx = batch;
            for (int k = 0; k < cfg_.d_steps_per_g_step; ++k)
            {
                if (k > 0)
                    idx = random_batch(batch.size());
                rec.l_d = discriminator_step(idx);
            }
            generator_step(idx, rec);
            guard(rec);
            return rec;
        }

        ProbeRecord probe(int epoch)
        {
            ProbeRecord pr;
            pr.epoch = epoch;
            pr.step = step_;
            pr.fid_rmsds_per_label.assign(n_categories, std::numeric_limits<double>::quiet_NaN());
            double acc = 0.0;
            int n = 0;
            for (std::size_t li = 0; li < probe_rmsds_.size(); ++li)
            {
                const auto &ref = probe_rmsds_[li];
                if (ref.size() < 2)
                    continue;
                const auto gen = generate_with(gen_, manifest_, los_by_label_, category_from_label(static_cast<int>(li)),
                                               ref.size(), derive_seed(cfg_.seed, 0x9e37, li), floor_snap_db_);
                std::vector<double> g;
                for (const auto &ch : gen.channels)
                    g.push_back(channel_stats(ch, gen.manifest.noise_floor).rmsds);
                pr.fid_rmsds_per_label[li] = fid(std::span<const double>(ref), std::span<const double>(g));
                acc += pr.fid_rmsds_per_label[li];
                ++n;
            }
            pr.fid_rmsds = n > 0 ? acc / n : std::numeric_limits<double>::quiet_NaN();
            return pr;
        }

        bool has_probe() const
        {
            return std::any_of(probe_rmsds_.begin(), probe_rmsds_.end(), [](const auto &v) { return v.size() >= 2; });
        }

        // Shuffled epoch order of the training set.
        std::vector<std::size_t> epoch_order()
        {
            std::vector<std::size_t> order(train_labels_.size());
            for (std::size_t k = 0; k < order.size(); ++k)
                order[k] = k;
            std::shuffle(order.begin(), order.end(), rng_);
            return order;
        }

        int batch_size() const
        {
            return std::min(cfg_.batch_size, static_cast<int>(train_labels_.size()));
        }

      private:
        // Gap between the threshold and a low quantile of the unmasked training power.
        double auto_floor_snap(const ChannelDataset &data) const
        {
            const NormalizationBounds &b = *manifest_.bounds;
            const double threshold = manifest_.threshold.value_or(b.p_min);
            const double half = 0.5 * (b.p_max - b.p_min);
            const auto lowest = static_cast<float>((threshold - b.p_min) / half - 1.0);
            std::vector<float> valid;
            for (const auto &ch : data.channels)
                for (Eigen::Index k = 0; k < ch.power.size(); ++k)
                    if (ch.power.data()[k] > lowest)
                        valid.push_back(ch.power.data()[k]);
            if (valid.empty())
                return cfg_.floor_snap_db;
            const auto q = static_cast<std::size_t>(cfg_.floor_snap_quantile * static_cast<double>(valid.size() - 1));
            std::nth_element(valid.begin(), valid.begin() + static_cast<std::ptrdiff_t>(q), valid.end());
            const double q_db = (static_cast<double>(valid[q]) + 1.0) * half + b.p_min;
            return std::max(0.0, q_db - threshold);
        }

        void split(const ChannelDataset &data)
        {
            los_by_label_.assign(n_categories, -1);
            std::vector<std::vector<std::size_t>> by_label(n_categories);
            for (std::size_t k = 0; k < data.size(); ++k)
                by_label[static_cast<std::size_t>(label_of(data.channels[k].label))].push_back(k);
            for (std::size_t li = 0; li < by_label.size(); ++li)
            {
                if (by_label[li].empty())
                {
                    if (cfg_.require_both_labels)
                        throw std::invalid_argument("Training data has no channels of label '" +
                                                    std::string(category_name(category_from_label(static_cast<int>(li)))) + "'.");
                    continue;
                }
                std::map<int, int> votes;
                for (auto k : by_label[li])
                    ++votes[data.channels[k].los_bin_index];
                los_by_label_[li] = std::max_element(votes.begin(), votes.end(), [](const auto &a, const auto &b)
                                                     { return a.second < b.second; })->first;
            }

            probe_rmsds_.assign(n_categories, {});
            std::vector<bool> held(data.size(), false);
            if (cfg_.probe_per_label > 0)
            {
                const bool decode_masks = data.masks.size() == data.size();
                for (std::size_t li = 0; li < by_label.size(); ++li)
                {
                    const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(cfg_.probe_per_label), by_label[li].size());
                    if (n < 2)
                        continue;
                    if (cfg_.probe_holdout && n == by_label[li].size())
                        throw std::invalid_argument("Probe hold-out would leave no training channels for a label.");
                    ChannelDataset probe;
                    probe.manifest = data.manifest;
                    for (std::size_t k = 0; k < n; ++k)
                    {
                        const auto idx = by_label[li][k];
                        probe.channels.push_back(data.channels[idx]);
                        if (decode_masks)
                            probe.masks.push_back(data.masks[idx]);
                        held[idx] = cfg_.probe_holdout;
                    }
                    const auto decoded = decode_dataset(probe);
                    for (const auto &ch : decoded.channels)
                        probe_rmsds_[li].push_back(channel_stats(ch, detail::stats_floor(manifest_)).rmsds);
                }
            }

            const auto TD = static_cast<Eigen::Index>(T_) * D_;
            std::size_t n_train = 0;
            for (std::size_t k = 0; k < data.size(); ++k)
                n_train += held[k] ? 0 : 1;
            train_norm_.resize(static_cast<Eigen::Index>(n_train), TD);
            train_lin_.resize(static_cast<Eigen::Index>(n_train), TD);
            std::size_t row = 0;
            for (std::size_t k = 0; k < data.size(); ++k)
            {
                if (held[k])
                    continue;
                const auto &ch = data.channels[k];
                const RowMatrixXf lin = normalized_to_linear(ch.power, *manifest_.bounds);
                const auto r = static_cast<Eigen::Index>(row);
                train_norm_.row(r) = Eigen::Map<const Eigen::RowVectorXf>(ch.power.data(), TD);
                train_lin_.row(r) = Eigen::Map<const Eigen::RowVectorXf>(lin.data(), TD);
                train_labels_.push_back(label_of(ch.label));
                train_los_.push_back(ch.los_bin_index);
                ++row;
            }
        }

        std::vector<std::size_t> random_batch(std::size_t n)
        {
            std::uniform_int_distribution<std::size_t> pick(0, train_labels_.size() - 1);
            std::vector<std::size_t> out(n);
            for (auto &v : out)
                v = pick(rng_);
            return out;
        }

        void sample_batch(const std::vector<std::size_t> &idx)
        {
            const auto b = static_cast<Eigen::Index>(idx.size());
            real_.resize(b, train_norm_.cols());
            labels_.resize(idx.size());
            for (Eigen::Index k = 0; k < b; ++k)
            {
                real_.row(k) = train_norm_.row(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(k)]));
                labels_[static_cast<std::size_t>(k)] = train_labels_[idx[static_cast<std::size_t>(k)]];
            }
            nn::Mat<float> z(b, cfg_.latent_dim);
            std::normal_distribution<float> normal(0.0f, 1.0f);
            for (Eigen::Index c = 0; c < z.cols(); ++c)
                for (Eigen::Index r = 0; r < z.rows(); ++r)
                    z(r, c) = normal(rng_);
            fake_ = gen_.forward(z, labels_, nn::Mode::train);
        }

        double discriminator_step(const std::vector<std::size_t> &idx)
        {
            sample_batch(idx);
            const auto b = real_.rows();
            nn::Mat<float> both(2 * b, real_.cols());
            both.topRows(b) = real_;
            both.bottomRows(b) = fake_;
            std::vector<int> both_labels = labels_;
            both_labels.insert(both_labels.end(), labels_.begin(), labels_.end());

            nn::zero_grad(disc_.params());
            const nn::Mat<float> p = disc_.forward(both, both_labels, nn::Mode::train, rng_);
            const std::span<const float> pr(p.data(), static_cast<std::size_t>(b));
            const std::span<const float> pf(p.data() + b, static_cast<std::size_t>(b));
            const double loss = loss_discriminator(pr, pf);
            const nn::Mat<float> &logit = disc_.logits();
            const auto [gr, gf] =
                loss_discriminator_logit_grad(std::span<const float>(logit.data(), static_cast<std::size_t>(b)),
                                              std::span<const float>(logit.data() + b, static_cast<std::size_t>(b)));
            nn::Mat<float> dp(2 * b, 1);
            for (Eigen::Index k = 0; k < b; ++k)
            {
                dp(k, 0) = gr[static_cast<std::size_t>(k)];
                dp(b + k, 0) = gf[static_cast<std::size_t>(k)];
            }
            disc_.backward_logits(dp, true, false);
            opt_d_.step();
            return loss;
        }

        void generator_step(const std::vector<std::size_t> &idx, StepRecord &rec)
        {
            const auto b = fake_.rows();
            const nn::Mat<float> p = disc_.forward(fake_, labels_, nn::Mode::train, rng_);
            const std::span<const float> pf(p.data(), static_cast<std::size_t>(b));
            rec.l_g = loss_generator_adv(pf);
            const auto g_adv = loss_generator_adv_logit_grad(
                std::span<const float>(disc_.logits().data(), static_cast<std::size_t>(b)));
            nn::Mat<float> dp(b, 1);
            for (Eigen::Index k = 0; k < b; ++k)
                dp(k, 0) = g_adv[static_cast<std::size_t>(k)];
            nn::Mat<float> dfake = disc_.backward_logits(dp, false, true) * static_cast<float>(weights_.adversarial);

            const NormalizationBounds &bounds = *manifest_.bounds;
            TpccLossOptions topt;
            topt.los_guard = cfg_.los_guard;
            topt.normalization = cfg_.tpcc_normalization;
            const auto TD = fake_.cols();
            double l_lin = 0.0, l_tp = 0.0;
            for (Eigen::Index k = 0; k < b; ++k)
            {
                const auto src = idx[static_cast<std::size_t>(k)];
                topt.los_bin = train_los_[src];
                const RowMatrixXf n_hat = detail::batch_row(fake_, k, T_, D_);
                const RowMatrixXf lin_hat = normalized_to_linear(n_hat, bounds);
                const RowMatrixXf lin_real =
                    Eigen::Map<const RowMatrixXf>(train_lin_.row(static_cast<Eigen::Index>(src)).data(), T_, D_);
                const RowMatrixXd ref_tpcc = tpcc_matrix(detail::prepare_tpcc_input(lin_real, topt));

                l_lin += loss_linear(lin_real, lin_hat);
                l_tp += loss_tpcc_against(ref_tpcc, lin_hat, topt);

                RowMatrixXf g = loss_linear_grad(lin_real, lin_hat) * static_cast<float>(weights_.linear);
                if (weights_.tpcc > 0.0)
                    g += loss_tpcc_grad_against(ref_tpcc, lin_hat, topt) * static_cast<float>(weights_.tpcc);
                const RowMatrixXf dn =
                    g.cwiseProduct(normalized_to_linear_slope(lin_hat, bounds)) / static_cast<float>(b);
                for (Eigen::Index c = 0; c < TD; ++c)
                    dfake(k, c) += dn.data()[c];
            }
            rec.l_linear = l_lin / static_cast<double>(b);
            rec.l_tpcc = l_tp / static_cast<double>(b);
            rec.l_total = loss_total(rec.l_g, rec.l_linear, rec.l_tpcc, weights_);

            nn::zero_grad(gen_.params());
            gen_.backward(dfake);
            opt_g_.step();
        }

        static void guard(const StepRecord &r)
        {
            const std::pair<const char *, double> terms[] = {
                {"L_D", r.l_d}, {"L_G", r.l_g}, {"L_linear", r.l_linear}, {"L_TPCC", r.l_tpcc}, {"L_total", r.l_total}};
            for (const auto &[name, v] : terms)
                if (!std::isfinite(v))
                {
                    std::ostringstream os;
                    os << "Training diverged at step " << r.step << " (epoch " << r.epoch << "): " << name << " = " << v
                       << "; L_D=" << r.l_d << " L_G=" << r.l_g << " L_linear=" << r.l_linear
                       << " L_TPCC=" << r.l_tpcc << ". Lower the learning rate or the loss weights.";
                    throw DivergenceError(os.str());
                }
        }

        TrainConfig cfg_;
        DatasetManifest manifest_;
        int T_ = 0, D_ = 0;
        LossWeights weights_;
        std::vector<int> los_by_label_;
        std::vector<std::vector<double>> probe_rmsds_;
        double floor_snap_db_ = 1.0;

        Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> train_norm_, train_lin_;
        std::vector<int> train_labels_, train_los_;

        Generator<float> gen_;
        Discriminator<float> disc_;
        nn::Adam<float> opt_g_, opt_d_;
        std::mt19937_64 rng_;
        long long step_ = 0;

        nn::Mat<float> real_, fake_;
        std::vector<int> labels_;
    };

    inline void write_training_outputs(const std::filesystem::path &dir, const TrainHistory &h)
    {
        detail::write_text_file(dir / "train_log.csv", training_log_csv(h));
        detail::write_text_file(dir / "history.json", history_to_json(h).dump(2) + "\n");
    }

    // Alternating adversarial training on a preprocessed dataset. With an output directory,
    // writes checkpoints/epoch_NNNN.cfck every `checkpoint_every` epochs, model.cfck at the end,
    // train_log.csv and history.json.
    inline TrainResult train(const ChannelDataset &data, const TrainConfig &cfg, const TrainOutputs &out = {})
    {
        const auto t0 = std::chrono::steady_clock::now();
        Trainer trainer(data, cfg);
        TrainResult result;
        auto &hist = result.history;

        const int spe = trainer.steps_per_epoch();
        const int bs = trainer.batch_size();
        const long long step_cap = cfg.max_steps > 0 ? cfg.max_steps : std::numeric_limits<long long>::max();
        const int epoch_cap = cfg.epochs > 0 ? cfg.epochs : std::numeric_limits<int>::max();

        if (out.directory)
        {
            std::filesystem::create_directories(*out.directory);
            detail::write_text_file(*out.directory / "train_config.json", train_config_to_json(cfg).dump(2) + "\n");
        }

        int epoch = 0;
        bool probed_last = false;
        while (epoch < epoch_cap && trainer.step_count() < step_cap)
        {
            ++epoch;
            const auto order = trainer.epoch_order();
            for (int s = 0; s < spe && trainer.step_count() < step_cap; ++s)
            {
                std::vector<std::size_t> batch(order.begin() + static_cast<std::ptrdiff_t>(s) * bs,
                                               order.begin() + static_cast<std::ptrdiff_t>(s + 1) * bs);
                hist.steps.push_back(trainer.step(batch, epoch));
                if (out.on_step)
                    out.on_step(hist.steps.back());
            }
            if (out.on_epoch)
                out.on_epoch(epoch, hist.steps.back());
            probed_last = false;
            if (cfg.checkpoint_every > 0 && epoch % cfg.checkpoint_every == 0)
            {
                if (trainer.has_probe())
                {
                    hist.probes.push_back(trainer.probe(epoch));
                    if (out.on_probe)
                        out.on_probe(hist.probes.back());
                    probed_last = true;
                }
                if (out.directory)
                {
                    char name[64];
                    std::snprintf(name, sizeof(name), "epoch_%04d.cfck", epoch);
                    write_checkpoint(*out.directory / "checkpoints" / name, trainer.checkpoint(epoch));
                }
            }
        }
        if (!probed_last && trainer.has_probe())
        {
            hist.probes.push_back(trainer.probe(epoch));
            if (out.on_probe)
                out.on_probe(hist.probes.back());
        }

        result.checkpoint = trainer.checkpoint(epoch);
        hist.wall_clock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (out.directory)
        {
            write_checkpoint(*out.directory / "model.cfck", result.checkpoint);
            write_training_outputs(*out.directory, hist);
        }
        return result;
    }

} // namespace chanforge

#endif // CHANFORGE_TRAIN_HPP
