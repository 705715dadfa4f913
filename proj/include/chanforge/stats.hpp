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

#ifndef CHANFORGE_STATS_HPP
#define CHANFORGE_STATS_HPP

#include "chanforge/core.hpp"
#include "chanforge/dataset.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace chanforge
{
    // Temporal PDP correlation coefficient between two linear-power delay profiles:
    //   sum(p_i * p_j) / max(sum(p_i^2), sum(p_j^2)),  in [0, 1].
    inline double tpcc(std::span<const double> p_i, std::span<const double> p_j)
    {
        if (p_i.size() != p_j.size())
            throw std::invalid_argument("TPCC requires delay profiles of equal length.");
        double cross = 0.0, e_i = 0.0, e_j = 0.0;
        for (std::size_t n = 0; n < p_i.size(); ++n)
        {
            if (p_i[n] < 0.0 || p_j[n] < 0.0)
                throw std::invalid_argument("TPCC requires non-negative linear powers.");
            cross += p_i[n] * p_j[n];
            e_i += p_i[n] * p_i[n];
            e_j += p_j[n] * p_j[n];
        }
        if (!(e_i > 0.0) || !(e_j > 0.0))
            throw std::invalid_argument("TPCC is undefined for an all-zero delay profile.");
        return cross / std::max(e_i, e_j);
    }

    // dB -> linear power for a whole channel.
    inline RowMatrixXd to_linear(const RowMatrixXf &power_db)
    {
        return (power_db.cast<double>().array() * (0.1 * std::log(10.0))).exp().matrix();
    }

    // Zeroes the LOS bin and `guard` bins on either side.
    inline void exclude_los_bins(RowMatrixXd &linear, int los_bin, int guard)
    {
        const Eigen::Index lo = std::max<Eigen::Index>(0, los_bin - guard);
        const Eigen::Index hi = std::min<Eigen::Index>(linear.cols() - 1, los_bin + guard);
        if (hi >= lo)
            linear.middleCols(lo, hi - lo + 1).setZero();
    }

    // Pairwise TPCC over all snapshots of a linear-power channel (rows = snapshots).
    inline RowMatrixXd tpcc_matrix(const RowMatrixXd &linear)
    {
        const Eigen::Index T = linear.rows();
        const RowMatrixXd gram = linear * linear.transpose();
        RowMatrixXd c(T, T);
        for (Eigen::Index i = 0; i < T; ++i)
        {
            if (!(gram(i, i) > 0.0))
                throw std::invalid_argument("TPCC is undefined for an all-zero snapshot (index " +
                                            std::to_string(i) + ").");
            c(i, i) = 1.0;
            for (Eigen::Index j = 0; j < i; ++j)
            {
                const double v = gram(j, i) / std::max(gram(i, i), gram(j, j));
                c(i, j) = v;
                c(j, i) = v;
            }
        }
        return c;
    }

    inline RowMatrixXd tpcc_matrix(const Pdp &channel, bool exclude_los, int los_guard = 1)
    {
        RowMatrixXd lin = to_linear(channel.power);
        if (exclude_los)
            exclude_los_bins(lin, channel.los_bin_index, los_guard);
        return tpcc_matrix(lin);
    }

    // WSS interval per reference snapshot i: (j* - i) * dt, where j* is the first j > i with
    // TPCC(i, j) < threshold, or T when the correlation never drops below the threshold.
    inline std::vector<double> wss_intervals(const RowMatrixXd &tpcc, double threshold, double snapshot_dt)
    {
        const Eigen::Index T = tpcc.rows();
        std::vector<double> out(static_cast<std::size_t>(T));
        for (Eigen::Index i = 0; i < T; ++i)
        {
            Eigen::Index j = i + 1;
            while (j < T && tpcc(i, j) >= threshold)
                ++j;
            out[static_cast<std::size_t>(i)] = static_cast<double>(j - i) * snapshot_dt;
        }
        return out;
    }

    // Alternative convention: disjoint segmentation. A region starts at snapshot s and extends
    // while TPCC(s, j) >= threshold; the next region starts at the first failing snapshot.
    inline std::vector<double> wss_regions(const RowMatrixXd &tpcc, double threshold, double snapshot_dt)
    {
        const Eigen::Index T = tpcc.rows();
        std::vector<double> out;
        Eigen::Index s = 0;
        while (s < T)
        {
            Eigen::Index j = s + 1;
            while (j < T && tpcc(s, j) >= threshold)
                ++j;
            out.push_back(static_cast<double>(j - s) * snapshot_dt);
            s = j;
        }
        return out;
    }

    inline double mean_of(std::span<const double> v)
    {
        if (v.empty())
            throw std::invalid_argument("Mean of an empty sequence is undefined.");
        return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    }

    // RMS delay spread (ns) of one snapshot. Bins at or below the noise floor are ignored.
    inline double rmsds(std::span<const double> linear, std::span<const double> delay_ns, double noise_floor_db)
    {
        if (linear.size() != delay_ns.size())
            throw std::invalid_argument("Delay grid does not match the delay profile length.");
        const double floor_lin = db_to_linear(noise_floor_db);
        double p_sum = 0.0, m1 = 0.0, m2 = 0.0;
        for (std::size_t n = 0; n < linear.size(); ++n)
        {
            if (!(linear[n] > floor_lin))
                continue;
            p_sum += linear[n];
            m1 += linear[n] * delay_ns[n];
            m2 += linear[n] * delay_ns[n] * delay_ns[n];
        }
        if (!(p_sum > 0.0))
            throw std::invalid_argument("RMS delay spread is undefined: every bin is below the noise floor.");
        m1 /= p_sum;
        m2 /= p_sum;
        return std::sqrt(std::max(0.0, m2 - m1 * m1));
    }

    // Number of delay bins strictly above the noise floor; input in dB.
    inline int multipath_count(std::span<const double> power_db, double noise_floor_db)
    {
        int n = 0;
        for (double p : power_db)
            n += p > noise_floor_db ? 1 : 0;
        return n;
    }

    inline int multipath_count(std::span<const float> power_db, double noise_floor_db)
    {
        int n = 0;
        for (float p : power_db)
            n += static_cast<double>(p) > noise_floor_db ? 1 : 0;
        return n;
    }

    // Path loss (dB) of one snapshot under unit transmit power.
    inline double path_loss(std::span<const double> linear)
    {
        const double total = std::accumulate(linear.begin(), linear.end(), 0.0);
        if (!(total > 0.0))
            throw std::invalid_argument("Path loss is undefined for zero received power.");
        return -linear_to_db(total);
    }

    // Mean per-snapshot path loss of a channel, dB.
    inline double channel_path_loss(const Pdp &channel)
    {
        const RowMatrixXd lin = to_linear(channel.power);
        double acc = 0.0;
        for (Eigen::Index m = 0; m < lin.rows(); ++m)
            acc += path_loss(std::span<const double>(lin.row(m).data(), static_cast<std::size_t>(lin.cols())));
        return acc / static_cast<double>(lin.rows());
    }

    // Shadow fading of a channel: its mean path loss minus the category mean path loss.
    inline double shadow_fading(double channel_mean_path_loss, double category_mean_path_loss)
    {
        return channel_mean_path_loss - category_mean_path_loss;
    }

    // ---------------------------------------------------------------------------------------
    // Frechet distance between Gaussian fits of two sample sets (rows = samples):
    //   |mu_x - mu_g|^2 + Tr(S_x + S_g - 2 (S_x S_g)^(1/2))
    // Tr((S_x S_g)^(1/2)) is evaluated as the trace of the square root of the symmetric matrix
    // S_x^(1/2) S_g S_x^(1/2); tiny negative eigenvalues are clamped to zero.

    inline Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd &samples, const Eigen::RowVectorXd &mean)
    {
        const Eigen::MatrixXd centered = samples.rowwise() - mean;
        return (centered.transpose() * centered) / static_cast<double>(samples.rows() - 1);
    }

    inline Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd &m)
    {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
        const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
        return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
    }

    inline double fid(const Eigen::MatrixXd &samples_x, const Eigen::MatrixXd &samples_g)
    {
        if (samples_x.rows() < 2 || samples_g.rows() < 2)
            throw std::invalid_argument("FID needs at least two samples per side.");
        if (samples_x.cols() != samples_g.cols() || samples_x.cols() < 1)
            throw std::invalid_argument("FID needs equal, non-zero feature dimensionality.");

        const Eigen::RowVectorXd mu_x = samples_x.colwise().mean();
        const Eigen::RowVectorXd mu_g = samples_g.colwise().mean();
        const Eigen::MatrixXd cov_x = sample_covariance(samples_x, mu_x);
        const Eigen::MatrixXd cov_g = sample_covariance(samples_g, mu_g);
        if (!cov_x.allFinite() || !cov_g.allFinite())
            throw std::invalid_argument("FID covariance is not finite.");

        const Eigen::MatrixXd sx = psd_sqrt(cov_x);
        const Eigen::MatrixXd inner = sx * cov_g * sx;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (inner + inner.transpose()), Eigen::EigenvaluesOnly);
        const double tr_sqrt = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();

        const double value = (mu_x - mu_g).squaredNorm() + cov_x.trace() + cov_g.trace() - 2.0 * tr_sqrt;
        return std::max(0.0, value);
    }

    inline double fid(std::span<const double> x, std::span<const double> g)
    {
        const Eigen::MatrixXd mx = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
        const Eigen::MatrixXd mg = Eigen::Map<const Eigen::VectorXd>(g.data(), static_cast<Eigen::Index>(g.size()));
        return fid(mx, mg);
    }

    // ---------------------------------------------------------------------------------------
    // Per-channel statistics and dataset summaries.

    enum class WssConvention
    {
        first_crossing, // mean over reference snapshots of the forward first-crossing interval
        segmentation    // mean length of disjoint stationarity regions
    };

    struct StatsOptions
    {
        double wss_threshold = 0.7;
        bool exclude_los = true;
        int los_guard = 1;
        WssConvention wss_convention = WssConvention::first_crossing;
        std::optional<double> noise_floor; // dB; defaults to the dataset manifest value
    };

    enum class Feature : int
    {
        wss_interval = 0,
        rmsds,
        multipath_count,
        shadow_fading,
        path_loss
    };

    inline constexpr std::array<Feature, 5> all_features = {Feature::wss_interval, Feature::rmsds,
                                                            Feature::multipath_count, Feature::shadow_fading,
                                                            Feature::path_loss};

    inline std::string_view feature_name(Feature f)
    {
        switch (f)
        {
        case Feature::wss_interval:
            return "wss_interval";
        case Feature::rmsds:
            return "rmsds";
        case Feature::multipath_count:
            return "multipath_count";
        case Feature::shadow_fading:
            return "shadow_fading";
        case Feature::path_loss:
            return "path_loss";
        }
        return "?";
    }

    inline std::string_view feature_unit(Feature f)
    {
        switch (f)
        {
        case Feature::wss_interval:
            return "s";
        case Feature::rmsds:
            return "ns";
        case Feature::multipath_count:
            return "count";
        default:
            return "dB";
        }
    }

    struct ChannelStats
    {
        double wss_interval = 0.0;    // s
        double rmsds = 0.0;           // ns, mean over snapshots
        double multipath_count = 0.0; // mean over snapshots
        double path_loss = 0.0;       // dB, mean over snapshots
        std::vector<double> wss_per_reference; // s
        std::vector<double> rmsds_per_snapshot;
        std::vector<double> multipath_per_snapshot;
    };

    inline ChannelStats channel_stats(const Pdp &channel, double noise_floor_db, const StatsOptions &opt = {})
    {
        if (channel.time_grid.size() < 1 || channel.power.rows() < 1)
            throw std::invalid_argument("Channel has no snapshots.");
        const double dt = channel.time_grid.size() > 1 ? channel.time_grid[1] - channel.time_grid[0] : 0.0;

        ChannelStats s;
        const RowMatrixXd lin = to_linear(channel.power);
        const auto D = static_cast<std::size_t>(lin.cols());

        double rms_acc = 0.0, mp_acc = 0.0, pl_acc = 0.0;
        int rms_n = 0;
        for (Eigen::Index m = 0; m < lin.rows(); ++m)
        {
            const std::span<const double> row(lin.row(m).data(), D);
            const std::span<const float> row_db(channel.power.row(m).data(), D);
            const int mp = multipath_count(row_db, noise_floor_db);
            s.multipath_per_snapshot.push_back(mp);
            mp_acc += mp;
            if (mp > 0)
            {
                const double r = rmsds(row, channel.delay_grid, noise_floor_db);
                s.rmsds_per_snapshot.push_back(r);
                rms_acc += r;
                ++rms_n;
            }
            pl_acc += path_loss(row);
        }
        const double T = static_cast<double>(lin.rows());
        s.multipath_count = mp_acc / T;
        s.rmsds = rms_n > 0 ? rms_acc / rms_n : 0.0;
        s.path_loss = pl_acc / T;

        RowMatrixXd lin_ex = lin;
        if (opt.exclude_los)
            exclude_los_bins(lin_ex, channel.los_bin_index, opt.los_guard);
        const RowMatrixXd c = tpcc_matrix(lin_ex);
        s.wss_per_reference = opt.wss_convention == WssConvention::first_crossing
                                  ? wss_intervals(c, opt.wss_threshold, dt)
                                  : wss_regions(c, opt.wss_threshold, dt);
        s.wss_interval = mean_of(s.wss_per_reference);
        return s;
    }

    // Per-category aggregates of the per-channel statistics.
    struct CategorySummary
    {
        std::size_t n_channels = 0;
        double wss_interval = 0.0;
        double rmsds = 0.0;
        double multipath_count = 0.0;
        double shadow_fading = 0.0;
        double path_loss = 0.0;
        // Reference mean path loss used for shadow fading (own mean unless supplied).
        double reference_path_loss = 0.0;
        std::vector<ChannelStats> channels;
        std::vector<double> shadow_fading_per_channel;

        double mean(Feature f) const
        {
            switch (f)
            {
            case Feature::wss_interval:
                return wss_interval;
            case Feature::rmsds:
                return rmsds;
            case Feature::multipath_count:
                return multipath_count;
            case Feature::shadow_fading:
                return shadow_fading;
            case Feature::path_loss:
                return path_loss;
            }
            return 0.0;
        }

        // Per-channel values of one feature, in channel order.
        std::vector<double> samples(Feature f) const
        {
            std::vector<double> out;
            out.reserve(channels.size());
            for (std::size_t k = 0; k < channels.size(); ++k)
            {
                const auto &c = channels[k];
                switch (f)
                {
                case Feature::wss_interval:
                    out.push_back(c.wss_interval);
                    break;
                case Feature::rmsds:
                    out.push_back(c.rmsds);
                    break;
                case Feature::multipath_count:
                    out.push_back(c.multipath_count);
                    break;
                case Feature::shadow_fading:
                    out.push_back(shadow_fading_per_channel[k]);
                    break;
                case Feature::path_loss:
                    out.push_back(c.path_loss);
                    break;
                }
            }
            return out;
        }

        // n_channels x 5 matrix of all features.
        Eigen::MatrixXd feature_matrix() const
        {
            Eigen::MatrixXd m(static_cast<Eigen::Index>(channels.size()), static_cast<Eigen::Index>(all_features.size()));
            for (std::size_t f = 0; f < all_features.size(); ++f)
            {
                const auto v = samples(all_features[f]);
                for (std::size_t k = 0; k < v.size(); ++k)
                    m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(f)) = v[k];
            }
            return m;
        }
    };

    struct StatsSummary
    {
        std::map<Category, CategorySummary> categories;

        const CategorySummary &at(Category c) const
        {
            const auto it = categories.find(c);
            if (it == categories.end())
                throw std::invalid_argument("Summary has no channels of category '" +
                                            std::string(category_name(c)) + "'.");
            return it->second;
        }
    };

    // Summarises every category present in the dataset. When `reference_path_loss` holds a
    // category, shadow fading is measured against that mean instead of the dataset's own mean
    // (used to score generated channels against a reference set).
    inline StatsSummary stats_summary(const ChannelDataset &dataset, const StatsOptions &opt = {},
                                      const std::map<Category, double> &reference_path_loss = {})
    {
        if (dataset.empty())
            throw std::invalid_argument("Cannot summarise an empty dataset.");
        if (dataset.manifest.normalized)
            throw std::invalid_argument("Statistics need channels in dB, not normalised data.");
        const double floor_db = opt.noise_floor.value_or(dataset.manifest.noise_floor);

        StatsSummary out;
        for (const auto &ch : dataset.channels)
            out.categories[ch.label].channels.push_back(channel_stats(ch, floor_db, opt));

        for (auto &[cat, s] : out.categories)
        {
            s.n_channels = s.channels.size();
            const double n = static_cast<double>(s.n_channels);
            for (const auto &c : s.channels)
            {
                s.wss_interval += c.wss_interval;
                s.rmsds += c.rmsds;
                s.multipath_count += c.multipath_count;
                s.path_loss += c.path_loss;
            }
            s.wss_interval /= n;
            s.rmsds /= n;
            s.multipath_count /= n;
            s.path_loss /= n;

            const auto ref = reference_path_loss.find(cat);
            s.reference_path_loss = ref != reference_path_loss.end() ? ref->second : s.path_loss;
            for (const auto &c : s.channels)
            {
                const double sf = shadow_fading(c.path_loss, s.reference_path_loss);
                s.shadow_fading_per_channel.push_back(sf);
                s.shadow_fading += sf;
            }
            s.shadow_fading /= n;
        }
        return out;
    }

} // namespace chanforge

#endif // CHANFORGE_STATS_HPP
