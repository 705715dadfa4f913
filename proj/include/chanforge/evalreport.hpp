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

#ifndef CHANFORGE_EVALREPORT_HPP
#define CHANFORGE_EVALREPORT_HPP

#include "chanforge/dataset.hpp"
#include "chanforge/dataset_io.hpp"
#include "chanforge/raster.hpp"
#include "chanforge/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace chanforge
{
    inline constexpr std::size_t n_features = all_features.size();
    using FeatureArray = std::array<double, n_features>;

    inline constexpr const char *reference_name = "reference";
    inline constexpr const char *self_split_name = "reference_split";

    // Mean-matching tolerances: relative for WSS interval, RMSDS and multipath count;
    // absolute (dB) for shadow fading and path loss, whose reference means sit near 0 or are
    // offset by a large constant.
    struct EvalTolerances
    {
        double relative = 0.25;
        double absolute_db = 2.0;

        bool within(Feature f, double reference, double generated) const
        {
            if (f == Feature::shadow_fading || f == Feature::path_loss)
                return std::abs(generated - reference) <= absolute_db;
            return std::abs(generated - reference) <= relative * std::abs(reference);
        }
    };

    struct EvalOptions
    {
        StatsOptions stats;
        EvalTolerances tolerances;
        std::uint64_t split_seed = 0; // shuffle of the reference self-split
    };

    struct MethodEvaluation
    {
        std::string name;
        StatsSummary summary;
        std::map<Category, FeatureArray> fid;
        std::map<Category, double> fid_joint;
        FeatureArray fid_mean{};  // mean over categories
        double fid_joint_mean = 0.0;
        std::map<Category, std::array<bool, n_features>> within_tolerance;

        double fid_of(Feature f) const { return fid_mean[static_cast<std::size_t>(f)]; }
    };

    struct EvalReport
    {
        std::vector<Category> categories;
        StatsSummary reference;
        MethodEvaluation self_split;           // two halves of the reference against each other
        std::vector<MethodEvaluation> methods; // sorted by name
        std::map<Feature, std::vector<std::string>> ranking; // best (lowest FID) first
        EvalTolerances tolerances;
        std::vector<std::string> figures;

        const MethodEvaluation &method(const std::string &name) const
        {
            for (const auto &m : methods)
                if (m.name == name)
                    return m;
            throw std::out_of_range("Report has no method named '" + name + "'.");
        }
    };

    namespace detail
    {
        // Copy of a category summary restricted to `idx`, with means recomputed.
        inline CategorySummary subset(const CategorySummary &s, const std::vector<std::size_t> &idx)
        {
            CategorySummary out;
            out.reference_path_loss = s.reference_path_loss;
            for (auto k : idx)
            {
                out.channels.push_back(s.channels[k]);
                out.shadow_fading_per_channel.push_back(s.shadow_fading_per_channel[k]);
            }
            out.n_channels = out.channels.size();
            const double n = static_cast<double>(out.n_channels);
            for (std::size_t k = 0; k < out.n_channels; ++k)
            {
                out.wss_interval += out.channels[k].wss_interval / n;
                out.rmsds += out.channels[k].rmsds / n;
                out.multipath_count += out.channels[k].multipath_count / n;
                out.path_loss += out.channels[k].path_loss / n;
                out.shadow_fading += out.shadow_fading_per_channel[k] / n;
            }
            return out;
        }

        inline void score(MethodEvaluation &m, const StatsSummary &ref, const std::vector<Category> &cats,
                          const EvalTolerances &tol)
        {
            m.fid_mean.fill(0.0);
            m.fid_joint_mean = 0.0;
            for (Category c : cats)
            {
                const auto &x = ref.at(c);
                const auto &g = m.summary.at(c);
                FeatureArray f{};
                std::array<bool, n_features> ok{};
                for (std::size_t k = 0; k < n_features; ++k)
                {
                    const Feature feat = all_features[k];
                    const auto xs = x.samples(feat), gs = g.samples(feat);
                    f[k] = fid(std::span<const double>(xs), std::span<const double>(gs));
                    m.fid_mean[k] += f[k] / static_cast<double>(cats.size());
                    ok[k] = tol.within(feat, x.mean(feat), g.mean(feat));
                }
                m.fid[c] = f;
                m.within_tolerance[c] = ok;
                m.fid_joint[c] = fid(x.feature_matrix(), g.feature_matrix());
                m.fid_joint_mean += m.fid_joint[c] / static_cast<double>(cats.size());
            }
        }
    } // namespace detail

    // Scores every generated dataset against the reference: per-category statistics, per-feature
    // 1-D FID, a joint 5-D FID, and a reference self-split baseline. Shadow fading of generated
    // channels is measured against the reference category mean path loss.
    inline EvalReport evaluate(const ChannelDataset &reference, const std::map<std::string, ChannelDataset> &generated,
                               const EvalOptions &opt = {})
    {
        if (reference.empty())
            throw std::invalid_argument("Reference dataset is empty.");
        EvalReport r;
        r.tolerances = opt.tolerances;
        r.reference = stats_summary(reference, opt.stats);
        std::map<Category, double> ref_pl;
        for (const auto &[c, s] : r.reference.categories)
        {
            r.categories.push_back(c);
            ref_pl[c] = s.path_loss;
        }

        // Self-split baseline.
        r.self_split.name = self_split_name;
        std::mt19937_64 rng(opt.split_seed);
        bool split_ok = true;
        for (Category c : r.categories)
        {
            const auto &s = r.reference.at(c);
            if (s.n_channels < 4)
            {
                split_ok = false;
                continue;
            }
            std::vector<std::size_t> idx(s.n_channels);
            std::iota(idx.begin(), idx.end(), std::size_t{0});
            std::shuffle(idx.begin(), idx.end(), rng);
            const std::size_t half = idx.size() / 2;
            const std::vector<std::size_t> a(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(half));
            const std::vector<std::size_t> b(idx.begin() + static_cast<std::ptrdiff_t>(half), idx.end());
            r.self_split.summary.categories[c] = detail::subset(s, b);
            // Score half B against half A through a temporary reference.
            StatsSummary ref_a;
            ref_a.categories[c] = detail::subset(s, a);
            MethodEvaluation tmp;
            tmp.summary.categories[c] = r.self_split.summary.categories[c];
            detail::score(tmp, ref_a, {c}, opt.tolerances);
            r.self_split.fid[c] = tmp.fid[c];
            r.self_split.fid_joint[c] = tmp.fid_joint[c];
            r.self_split.within_tolerance[c] = tmp.within_tolerance[c];
        }
        if (split_ok)
        {
            r.self_split.fid_mean.fill(0.0);
            for (Category c : r.categories)
            {
                for (std::size_t k = 0; k < n_features; ++k)
                    r.self_split.fid_mean[k] += r.self_split.fid[c][k] / static_cast<double>(r.categories.size());
                r.self_split.fid_joint_mean += r.self_split.fid_joint[c] / static_cast<double>(r.categories.size());
            }
        }
        else
        {
            r.self_split.fid_mean.fill(std::numeric_limits<double>::quiet_NaN());
            r.self_split.fid_joint_mean = std::numeric_limits<double>::quiet_NaN();
        }

        for (const auto &[name, ds] : generated)
        {
            if (name.empty() || name == reference_name || name == self_split_name)
                throw std::invalid_argument("Method name '" + name + "' is empty or reserved.");
            if (ds.empty())
                throw std::invalid_argument("Generated dataset '" + name + "' is empty.");
            if (!ds.manifest.same_grid(reference.manifest))
                throw std::invalid_argument("Generated dataset '" + name + "' does not share the reference grid.");
            MethodEvaluation m;
            m.name = name;
            m.summary = stats_summary(ds, opt.stats, ref_pl);
            for (Category c : r.categories)
                if (!m.summary.categories.count(c))
                    throw std::invalid_argument("Generated dataset '" + name + "' has no channels of category '" +
                                                std::string(category_name(c)) + "'.");
            detail::score(m, r.reference, r.categories, opt.tolerances);
            r.methods.push_back(std::move(m));
        }

        for (std::size_t k = 0; k < n_features; ++k)
        {
            std::vector<std::pair<double, std::string>> order;
            for (const auto &m : r.methods)
                order.emplace_back(m.fid_mean[k], m.name);
            std::sort(order.begin(), order.end());
            auto &names = r.ranking[all_features[k]];
            for (const auto &o : order)
                names.push_back(o.second);
        }
        return r;
    }

    // ---------------------------------------------------------------------------------------
    // Tables

    namespace detail
    {
        inline std::string fmt(double v)
        {
            if (std::isnan(v))
                return "nan";
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.10g", v);
            return buf;
        }
    } // namespace detail

    // One row per (statistic, category); one column per dataset, reference first.
    inline std::string table2_csv(const EvalReport &r)
    {
        std::ostringstream os;
        os << "statistic,unit,category," << reference_name;
        for (const auto &m : r.methods)
            os << ',' << m.name;
        os << '\n';
        for (Feature f : all_features)
            for (Category c : r.categories)
            {
                os << feature_name(f) << ',' << feature_unit(f) << ',' << category_name(c) << ','
                   << detail::fmt(r.reference.at(c).mean(f));
                for (const auto &m : r.methods)
                    os << ',' << detail::fmt(m.summary.at(c).mean(f));
                os << '\n';
            }
        return os.str();
    }

    // Per-feature FID per method and category, plus the category mean; the self-split
    // baseline comes first.
    inline std::string fid_csv(const EvalReport &r)
    {
        std::ostringstream os;
        os << "method,category";
        for (Feature f : all_features)
            os << ',' << feature_name(f);
        os << ",joint\n";
        auto rows = [&](const MethodEvaluation &m)
        {
            for (Category c : r.categories)
            {
                os << m.name << ',' << category_name(c);
                const auto it = m.fid.find(c);
                for (std::size_t k = 0; k < n_features; ++k)
                    os << ',' << detail::fmt(it != m.fid.end() ? it->second[k] : std::numeric_limits<double>::quiet_NaN());
                const auto jt = m.fid_joint.find(c);
                os << ',' << detail::fmt(jt != m.fid_joint.end() ? jt->second : std::numeric_limits<double>::quiet_NaN())
                   << '\n';
            }
            os << m.name << ",mean";
            for (double v : m.fid_mean)
                os << ',' << detail::fmt(v);
            os << ',' << detail::fmt(m.fid_joint_mean) << '\n';
        };
        rows(r.self_split);
        for (const auto &m : r.methods)
            rows(m);
        return os.str();
    }

    // Table II analog for a single dataset: one row per (statistic, category).
    inline std::string summary_csv(const StatsSummary &s, const std::string &column = "value")
    {
        std::ostringstream os;
        os << "statistic,unit,category," << column << '\n';
        for (Feature f : all_features)
            for (const auto &[c, cs] : s.categories)
                os << feature_name(f) << ',' << feature_unit(f) << ',' << category_name(c) << ','
                   << detail::fmt(cs.mean(f)) << '\n';
        return os.str();
    }

    inline nlohmann::json summary_to_json(const StatsSummary &s)
    {
        nlohmann::json j = nlohmann::json::object();
        for (const auto &[c, cs] : s.categories)
        {
            nlohmann::json e = {{"n_channels", cs.n_channels}, {"reference_path_loss_db", cs.reference_path_loss}};
            for (Feature f : all_features)
                e[std::string(feature_name(f))] = cs.mean(f);
            j[std::string(category_name(c))] = e;
        }
        return j;
    }

    inline nlohmann::json report_to_json(const EvalReport &r)
    {
        auto nan_safe = [](double v) { return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v); };
        auto method_json = [&](const MethodEvaluation &m)
        {
            nlohmann::json fidj = nlohmann::json::object(), tol = nlohmann::json::object();
            for (const auto &[c, arr] : m.fid)
            {
                nlohmann::json e = nlohmann::json::object();
                for (std::size_t k = 0; k < n_features; ++k)
                    e[std::string(feature_name(all_features[k]))] = nan_safe(arr[k]);
                e["joint"] = nan_safe(m.fid_joint.at(c));
                fidj[std::string(category_name(c))] = e;
            }
            nlohmann::json mean = nlohmann::json::object();
            for (std::size_t k = 0; k < n_features; ++k)
                mean[std::string(feature_name(all_features[k]))] = nan_safe(m.fid_mean[k]);
            mean["joint"] = nan_safe(m.fid_joint_mean);
            fidj["mean"] = mean;
            for (const auto &[c, arr] : m.within_tolerance)
            {
                nlohmann::json e = nlohmann::json::object();
                for (std::size_t k = 0; k < n_features; ++k)
                    e[std::string(feature_name(all_features[k]))] = arr[k];
                tol[std::string(category_name(c))] = e;
            }
            return nlohmann::json{{"summary", summary_to_json(m.summary)}, {"fid", fidj}, {"within_tolerance", tol}};
        };

        nlohmann::json methods = nlohmann::json::object();
        for (const auto &m : r.methods)
            methods[m.name] = method_json(m);
        nlohmann::json ranking = nlohmann::json::object();
        for (const auto &[f, names] : r.ranking)
            ranking[std::string(feature_name(f))] = names;
        return {{"reference", summary_to_json(r.reference)},
                {self_split_name, method_json(r.self_split)},
                {"methods", methods},
                {"ranking", ranking},
                {"tolerances", {{"relative", r.tolerances.relative}, {"absolute_db", r.tolerances.absolute_db}}},
                {"figures", r.figures}};
    }

    inline void write_report(const std::filesystem::path &dir, const EvalReport &r)
    {
        std::filesystem::create_directories(dir);
        detail::write_text_file(dir / "table2.csv", table2_csv(r));
        detail::write_text_file(dir / "fid.csv", fid_csv(r));
        detail::write_text_file(dir / "report.json", report_to_json(r).dump(2) + "\n");
    }

    // ---------------------------------------------------------------------------------------
    // Figures

    namespace detail
    {
        inline std::string file_token(const std::string &s)
        {
            std::string out;
            for (char ch : s)
                out += std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_' ? ch : '_';
            return out;
        }

        struct PlotFrame
        {
            int left = 70, right = 190, top = 34, bottom = 50;
            double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
            int width = 0, height = 0;

            int px(double x) const
            {
                return left + static_cast<int>(std::lround((x - x0) / (x1 - x0) * (width - left - right)));
            }
            int py(double y) const
            {
                return height - bottom - static_cast<int>(std::lround((y - y0) / (y1 - y0) * (height - top - bottom)));
            }
        };

        inline void draw_axes(raster::Canvas &cv, const PlotFrame &f, const std::string &title, const std::string &xlabel,
                              const std::string &ylabel, bool y_ticks = true)
        {
            cv.rect(f.left, f.top, f.width - f.right, f.height - f.bottom, raster::black);
            for (double t : raster::nice_ticks(f.x0, f.x1))
            {
                const int x = f.px(t);
                cv.line(x, f.height - f.bottom, x, f.height - f.bottom + 4, raster::black);
                const std::string s = raster::format_tick(t);
                cv.text(x - raster::Canvas::text_width(s) / 2, f.height - f.bottom + 8, s);
            }
            if (y_ticks)
                for (double t : raster::nice_ticks(f.y0, f.y1))
                {
                    const int y = f.py(t);
                    cv.line(f.left - 4, y, f.left, y, raster::black);
                    const std::string s = raster::format_tick(t);
                    cv.text(f.left - 8 - raster::Canvas::text_width(s), y - 3, s);
                }
            cv.text((f.left + f.width - f.right) / 2 - raster::Canvas::text_width(xlabel) / 2, f.height - 18, xlabel);
            cv.text_vertical(10, (f.top + f.height - f.bottom) / 2 + raster::Canvas::text_width(ylabel) / 2, ylabel);
            cv.text(f.left, 10, title, raster::black, 2);
        }

        inline std::vector<double> cdf_samples(const CategorySummary &s, Feature f)
        {
            std::vector<double> out;
            if (f == Feature::rmsds)
                for (const auto &c : s.channels)
                    out.insert(out.end(), c.rmsds_per_snapshot.begin(), c.rmsds_per_snapshot.end());
            else if (f == Feature::multipath_count)
                for (const auto &c : s.channels)
                    out.insert(out.end(), c.multipath_per_snapshot.begin(), c.multipath_per_snapshot.end());
            else
                out = s.samples(f);
            std::sort(out.begin(), out.end());
            return out;
        }

        inline void heatmap(const Pdp &ch, double floor_db, const std::string &title, const std::filesystem::path &path)
        {
            const int T = static_cast<int>(ch.power.rows()), D = static_cast<int>(ch.power.cols());
            const int cell = std::max(1, 420 / std::max(T, D));
            PlotFrame f;
            f.left = 70;
            f.right = 110;
            f.width = f.left + f.right + D * cell;
            f.height = f.top + f.bottom + T * cell;
            f.x0 = ch.delay_grid.empty() ? 0.0 : ch.delay_grid.front();
            f.x1 = ch.delay_grid.size() > 1 ? ch.delay_grid.back() + (ch.delay_grid[1] - ch.delay_grid[0]) : 1.0;
            f.y0 = T;
            f.y1 = 0;
            raster::Canvas cv(f.width, f.height);
            const double hi = std::max(static_cast<double>(ch.power.maxCoeff()), floor_db + 1.0);
            for (int t = 0; t < T; ++t)
                for (int d = 0; d < D; ++d)
                {
                    const double v = (static_cast<double>(ch.power(t, d)) - floor_db) / (hi - floor_db);
                    cv.fill_rect(f.left + d * cell, f.top + t * cell, f.left + (d + 1) * cell - 1, f.top + (t + 1) * cell - 1,
                                 raster::colormap(v));
                }
            draw_axes(cv, f, title, "DELAY (NS)", "SNAPSHOT", false);
            for (double t : raster::nice_ticks(0, T))
            {
                const int y = f.top + static_cast<int>(std::lround(t * cell));
                cv.line(f.left - 4, y, f.left, y, raster::black);
                const std::string s = raster::format_tick(t);
                cv.text(f.left - 8 - raster::Canvas::text_width(s), y - 3, s);
            }
            // colour bar
            const int bx = f.width - f.right + 20, by0 = f.top, by1 = f.height - f.bottom;
            for (int y = by0; y <= by1; ++y)
                cv.line(bx, y, bx + 14, y, raster::colormap(1.0 - static_cast<double>(y - by0) / (by1 - by0)));
            cv.rect(bx, by0, bx + 14, by1, raster::black);
            for (double v : raster::nice_ticks(floor_db, hi, 4))
            {
                const int y = by1 - static_cast<int>(std::lround((v - floor_db) / (hi - floor_db) * (by1 - by0)));
                cv.line(bx + 14, y, bx + 18, y, raster::black);
                cv.text(bx + 21, y - 3, raster::format_tick(v));
            }
            cv.text(bx - 4, by1 + 10, "DB");
            cv.write_png(path);
        }
    } // namespace detail

    // Writes PDP heatmaps (first channel per category per dataset), one empirical CDF figure per
    // statistic and an FID bar chart into `dir`. Returns the file names relative to `dir`.
    inline std::vector<std::string> render_figures(EvalReport &report, const ChannelDataset &reference,
                                                   const std::map<std::string, ChannelDataset> &generated,
                                                   const std::filesystem::path &dir)
    {
        std::filesystem::create_directories(dir);
        std::vector<std::string> files;
        const double floor_db = reference.manifest.noise_floor;

        auto heatmaps = [&](const std::string &name, const ChannelDataset &ds)
        {
            for (Category c : report.categories)
                for (const auto &ch : ds.channels)
                    if (ch.label == c)
                    {
                        const std::string file =
                            "heatmap_" + detail::file_token(name) + "_" + std::string(category_name(c)) + ".png";
                        detail::heatmap(ch, floor_db, name + " " + std::string(category_name(c)), dir / file);
                        files.push_back(file);
                        break;
                    }
        };
        heatmaps(reference_name, reference);
        for (const auto &[name, ds] : generated)
            heatmaps(name, ds);

        // Empirical CDFs: one curve per dataset per category.
        std::vector<std::pair<std::string, const StatsSummary *>> series = {{reference_name, &report.reference}};
        for (const auto &m : report.methods)
            series.emplace_back(m.name, &m.summary);
        for (Feature f : all_features)
        {
            detail::PlotFrame fr;
            fr.width = 820;
            fr.height = 520;
            fr.x0 = std::numeric_limits<double>::infinity();
            fr.x1 = -fr.x0;
            for (const auto &[name, s] : series)
                for (Category c : report.categories)
                {
                    const auto v = detail::cdf_samples(s->at(c), f);
                    if (!v.empty())
                    {
                        fr.x0 = std::min(fr.x0, v.front());
                        fr.x1 = std::max(fr.x1, v.back());
                    }
                }
            if (!std::isfinite(fr.x0))
                fr.x0 = 0, fr.x1 = 1;
            if (!(fr.x1 > fr.x0))
                fr.x0 -= 0.5, fr.x1 += 0.5;
            raster::Canvas cv(fr.width, fr.height);
            int legend_y = fr.top + 4;
            for (std::size_t si = 0; si < series.size(); ++si)
                for (std::size_t ci = 0; ci < report.categories.size(); ++ci)
                {
                    const Category c = report.categories[ci];
                    const auto v = detail::cdf_samples(series[si].second->at(c), f);
                    raster::Rgb col = si == 0 ? raster::black : raster::palette(si - 1);
                    if (ci > 0)
                        col = raster::blend(col, raster::white, 0.45);
                    const int dash = ci == 0 ? 0 : 6;
                    int px = fr.px(fr.x0), py = fr.py(0.0);
                    for (std::size_t k = 0; k < v.size(); ++k)
                    {
                        const int nx = fr.px(v[k]), ny = fr.py(static_cast<double>(k + 1) / v.size());
                        cv.line(px, py, nx, py, col, 2, dash);
                        cv.line(nx, py, nx, ny, col, 2, dash);
                        px = nx;
                        py = ny;
                    }
                    cv.line(px, py, fr.px(fr.x1), py, col, 2, dash);
                    const int lx = fr.width - fr.right + 10;
                    cv.line(lx, legend_y + 3, lx + 22, legend_y + 3, col, 2, dash);
                    cv.text(lx + 28, legend_y, series[si].first + " " + std::string(category_name(c)));
                    legend_y += 14;
                }
            const std::string unit(feature_unit(f));
            detail::draw_axes(cv, fr, "CDF " + std::string(feature_name(f)),
                              std::string(feature_name(f)) + " (" + unit + ")", "CDF");
            const std::string file = "cdf_" + std::string(feature_name(f)) + ".png";
            cv.write_png(dir / file);
            files.push_back(file);
        }

        // FID bars: one group per statistic, bars normalised by the group maximum.
        {
            std::vector<const MethodEvaluation *> bars = {&report.self_split};
            for (const auto &m : report.methods)
                bars.push_back(&m);
            detail::PlotFrame fr;
            fr.width = 900;
            fr.height = 520;
            fr.x0 = 0;
            fr.x1 = static_cast<double>(n_features);
            fr.top = 40;
            fr.y0 = 0;
            fr.y1 = 1.3;
            raster::Canvas cv(fr.width, fr.height);
            const double group = 1.0 / (bars.size() + 1);
            for (std::size_t k = 0; k < n_features; ++k)
            {
                double mx = 0.0;
                for (const auto *b : bars)
                    if (std::isfinite(b->fid_mean[k]))
                        mx = std::max(mx, b->fid_mean[k]);
                for (std::size_t bi = 0; bi < bars.size(); ++bi)
                {
                    const double v = bars[bi]->fid_mean[k];
                    const double h = mx > 0.0 && std::isfinite(v) ? v / mx : 0.0;
                    const double xl = static_cast<double>(k) + group * (static_cast<double>(bi) + 0.5);
                    const raster::Rgb col = bi == 0 ? raster::grey : raster::palette(bi - 1);
                    cv.fill_rect(fr.px(xl), fr.py(h), fr.px(xl + group) - 1, fr.py(0.0), col);
                    const std::string label = std::isfinite(v) ? raster::format_tick(v) : "NAN";
                    cv.text_vertical(fr.px(xl) + 2, fr.py(h) - 4, label);
                }
                const std::string name(feature_name(all_features[k]));
                cv.text(fr.px(k + 0.5) - raster::Canvas::text_width(name) / 2, fr.height - fr.bottom + 8, name);
            }
            cv.rect(fr.left, fr.top, fr.width - fr.right, fr.height - fr.bottom, raster::black);
            cv.text(fr.left, 10, "FID PER STATISTIC (BAR / GROUP MAX)", raster::black, 2);
            cv.text_vertical(10, fr.height / 2 + 40, "RELATIVE FID");
            int ly = fr.top + 4;
            for (std::size_t bi = 0; bi < bars.size(); ++bi)
            {
                const int lx = fr.width - fr.right + 10;
                cv.fill_rect(lx, ly, lx + 10, ly + 7, bi == 0 ? raster::grey : raster::palette(bi - 1));
                cv.text(lx + 16, ly, bars[bi]->name);
                ly += 14;
            }
            cv.write_png(dir / "fid_bars.png");
            files.push_back("fid_bars.png");
        }
        report.figures = files;
        return files;
    }

} // namespace chanforge

#endif // CHANFORGE_EVALREPORT_HPP
