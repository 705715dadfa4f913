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

#ifndef CHANFORGE_CORE_HPP
#define CHANFORGE_CORE_HPP

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace chanforge
{
    template <typename Scalar>
    using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

    using RowMatrixXf = RowMatrix<float>;
    using RowMatrixXd = RowMatrix<double>;

    inline constexpr double speed_of_light = 299792458.0; // m/s

    // Non-stationarity category of a dynamic channel. The integer value is the class label
    // seen by the conditional networks.
    enum class Category : int
    {
        weak = 0,
        strong = 1
    };

    inline constexpr int n_categories = 2;

    inline std::string_view category_name(Category c)
    {
        return c == Category::weak ? "weak" : "strong";
    }

    inline Category parse_category(std::string_view name)
    {
        if (name == "weak" || name == "sparse" || name == "0")
            return Category::weak;
        if (name == "strong" || name == "dense" || name == "1")
            return Category::strong;
        throw std::invalid_argument("Unknown channel category '" + std::string(name) + "'.");
    }

    inline Category category_from_label(int label)
    {
        if (label < 0 || label >= n_categories)
            throw std::invalid_argument("Class label " + std::to_string(label) + " is out of range.");
        return static_cast<Category>(label);
    }

    inline int label_of(Category c) { return static_cast<int>(c); }

    inline double db_to_linear(double db) { return std::pow(10.0, 0.1 * db); }

    inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

    // Free-space (Friis) path gain in dB for isotropic antennas.
    inline double friis_gain_db(double distance_m, double carrier_freq_hz)
    {
        const double lambda = speed_of_light / carrier_freq_hz;
        return 20.0 * std::log10(lambda / (4.0 * M_PI * distance_m));
    }

} // namespace chanforge

#endif // CHANFORGE_CORE_HPP
