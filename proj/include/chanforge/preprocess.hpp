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

#ifndef CHANFORGE_PREPROCESS_HPP
#define CHANFORGE_PREPROCESS_HPP

#include "chanforge/core.hpp"
#include "chanforge/dataset.hpp"

#include <limits>

namespace chanforge
{
    template <typename Scalar>
    struct MaskResult
    {
        RowMatrix<Scalar> power; // dB, sub-threshold entries replaced by the threshold
        MaskMatrix mask;         // 1 where the raw power is >= threshold
    };

    // Marks entries at or above `threshold` as valid and clamps the rest to the threshold.
    template <typename Scalar>
    MaskResult<Scalar> mask(const RowMatrix<Scalar> &power_db, double threshold)
    {
        MaskResult<Scalar> r{power_db, MaskMatrix(power_db.rows(), power_db.cols())};
        const auto th = static_cast<Scalar>(threshold);
        for (Eigen::Index i = 0; i < power_db.rows(); ++i)
            for (Eigen::Index j = 0; j < power_db.cols(); ++j)
            {
                const bool valid = power_db(i, j) >= th;
                r.mask(i, j) = valid ? 1 : 0;
                if (!valid)
                    r.power(i, j) = th;
            }
        return r;
    }

    template <typename Scalar>
    struct Normalized
    {
        RowMatrix<Scalar> data; // in [-1, 1]
        NormalizationBounds bounds;
    };

    // Affine map of [P_min, P_max] onto [-1, 1] using the supplied bounds.
    template <typename Scalar>
    RowMatrix<Scalar> normalize(const RowMatrix<Scalar> &power_db, const NormalizationBounds &b)
    {
        b.validate();
        const double scale = 2.0 / (b.p_max - b.p_min);
        return ((power_db.template cast<double>().array() - b.p_min) * scale - 1.0).template cast<Scalar>().matrix();
    }

    // Normalises with the matrix's own extrema.
    template <typename Scalar>
    Normalized<Scalar> normalize(const RowMatrix<Scalar> &power_db)
    {
        if (power_db.size() == 0)
            throw std::invalid_argument("Cannot normalise an empty matrix.");
        const NormalizationBounds b{static_cast<double>(power_db.minCoeff()), static_cast<double>(power_db.maxCoeff())};
        if (!(b.p_max > b.p_min))
            throw std::invalid_argument("Cannot normalise a constant matrix (P_max == P_min).");
        return {normalize(power_db, b), b};
    }

    // Sets masked-out entries of normalised data to -1.
    template <typename Scalar>
    RowMatrix<Scalar> apply_mask(const RowMatrix<Scalar> &normalized, const MaskMatrix &mask)
    {
        if (normalized.rows() != mask.rows() || normalized.cols() != mask.cols())
            throw std::invalid_argument("Mask shape does not match the data shape.");
        RowMatrix<Scalar> out = normalized;
        for (Eigen::Index i = 0; i < out.rows(); ++i)
            for (Eigen::Index j = 0; j < out.cols(); ++j)
                if (mask(i, j) == 0)
                    out(i, j) = Scalar(-1);
        return out;
    }

    // Inverse of normalize().
    template <typename Scalar>
    RowMatrix<Scalar> denormalize(const RowMatrix<Scalar> &normalized, const NormalizationBounds &b)
    {
        b.validate();
        const double half_range = 0.5 * (b.p_max - b.p_min);
        return ((normalized.template cast<double>().array() + 1.0) * half_range + b.p_min).template cast<Scalar>().matrix();
    }

    // Clamps decoded power that lies within `margin_db` of the threshold down to the threshold.
    // Generated data cannot reach the mask value -1 exactly (tanh output), so this restores the
    // noise floor for multipath statistics.
    template <typename Scalar>
    void snap_to_floor(RowMatrix<Scalar> &power_db, double threshold, double margin_db)
    {
        const auto cut = static_cast<Scalar>(threshold + margin_db);
        const auto th = static_cast<Scalar>(threshold);
        for (Eigen::Index i = 0; i < power_db.rows(); ++i)
            for (Eigen::Index j = 0; j < power_db.cols(); ++j)
                if (power_db(i, j) < cut)
                    power_db(i, j) = th;
    }

    // Masks every channel at `threshold`, normalises with dataset-global bounds and applies the
    // masks. The result stores normalised data in `power` and the validity masks separately.
    inline ChannelDataset preprocess_dataset(const ChannelDataset &raw, double threshold = -150.0)
    {
        if (raw.empty())
            throw std::invalid_argument("Cannot preprocess an empty dataset.");
        if (raw.manifest.normalized)
            throw std::invalid_argument("Dataset is already normalised.");
        raw.validate();

        ChannelDataset out;
        out.manifest = raw.manifest;
        out.channels.reserve(raw.size());
        out.masks.reserve(raw.size());

        double p_min = std::numeric_limits<double>::infinity();
        double p_max = -std::numeric_limits<double>::infinity();
        for (const auto &ch : raw.channels)
        {
            auto m = mask(ch.power, threshold);
            p_min = std::min(p_min, static_cast<double>(m.power.minCoeff()));
            p_max = std::max(p_max, static_cast<double>(m.power.maxCoeff()));
            Pdp p = ch;
            p.power = std::move(m.power);
            out.channels.push_back(std::move(p));
            out.masks.push_back(std::move(m.mask));
        }
        if (!(p_max > p_min))
            throw std::invalid_argument("Cannot normalise a constant dataset (P_max == P_min).");

        const NormalizationBounds bounds{p_min, p_max};
        for (std::size_t k = 0; k < out.size(); ++k)
            out.channels[k].power = apply_mask(normalize(out.channels[k].power, bounds), out.masks[k]);

        out.manifest.normalized = true;
        out.manifest.bounds = bounds;
        out.manifest.threshold = threshold;
        return out;
    }

    // Maps a normalised dataset back to dB. Masked cells decode to the threshold.
    inline ChannelDataset decode_dataset(const ChannelDataset &normalized)
    {
        if (!normalized.manifest.normalized || !normalized.manifest.bounds)
            throw std::invalid_argument("Dataset is not normalised.");
        ChannelDataset out;
        out.manifest = normalized.manifest;
        out.manifest.normalized = false;
        const double th = normalized.manifest.threshold.value_or(normalized.manifest.bounds->p_min);
        for (std::size_t k = 0; k < normalized.size(); ++k)
        {
            Pdp p = normalized.channels[k];
            p.power = denormalize(p.power, *normalized.manifest.bounds);
            if (k < normalized.masks.size())
                for (Eigen::Index i = 0; i < p.power.rows(); ++i)
                    for (Eigen::Index j = 0; j < p.power.cols(); ++j)
                        if (normalized.masks[k](i, j) == 0)
                            p.power(i, j) = static_cast<float>(th);
            out.channels.push_back(std::move(p));
        }
        return out;
    }

} // namespace chanforge

#endif // CHANFORGE_PREPROCESS_HPP
