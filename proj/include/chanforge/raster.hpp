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

#ifndef CHANFORGE_RASTER_HPP
#define CHANFORGE_RASTER_HPP

// Minimal RGB canvas with line, rectangle and 5x7 bitmap text drawing, written out as PNG.

#include <png.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace chanforge::raster
{
    struct Rgb
    {
        std::uint8_t r = 0, g = 0, b = 0;
    };

    inline constexpr Rgb white{255, 255, 255};
    inline constexpr Rgb black{0, 0, 0};
    inline constexpr Rgb grey{200, 200, 200};

    // Distinct line colours, cycled by index.
    // Linear mix: t = 0 gives `a`, t = 1 gives `b`.
    inline Rgb blend(Rgb a, Rgb b, double t)
    {
        auto mix = [t](std::uint8_t x, std::uint8_t y) { return static_cast<std::uint8_t>(std::lround(x * (1 - t) + y * t)); };
        return {mix(a.r, b.r), mix(a.g, b.g), mix(a.b, b.b)};
    }

    inline Rgb palette(std::size_t k)
    {
        static constexpr std::array<Rgb, 8> colours = {Rgb{31, 119, 180}, Rgb{255, 127, 14}, Rgb{44, 160, 44},
                                                       Rgb{214, 39, 40},  Rgb{148, 103, 189}, Rgb{140, 86, 75},
                                                       Rgb{227, 119, 194}, Rgb{127, 127, 127}};
        return colours[k % colours.size()];
    }

    // Perceptually ordered dark-blue -> green -> yellow map of t in [0, 1].
    inline Rgb colormap(double t)
    {
        static constexpr std::array<std::array<double, 3>, 6> stops = {{{68, 1, 84},
                                                                         {65, 68, 135},
                                                                         {42, 120, 142},
                                                                         {34, 168, 132},
                                                                         {122, 209, 81},
                                                                         {253, 231, 37}}};
        t = std::clamp(std::isfinite(t) ? t : 0.0, 0.0, 1.0) * (stops.size() - 1);
        const auto i = std::min(static_cast<std::size_t>(t), stops.size() - 2);
        const double f = t - static_cast<double>(i);
        auto mix = [&](int c) { return static_cast<std::uint8_t>(std::lround(stops[i][c] * (1 - f) + stops[i + 1][c] * f)); };
        return {mix(0), mix(1), mix(2)};
    }

    namespace detail
    {
        // Rows top to bottom, bit 4 = leftmost column.
        inline const std::array<std::uint8_t, 7> *glyph(char ch)
        {
            struct Entry
            {
                char c;
                std::array<std::uint8_t, 7> rows;
            };
            static constexpr Entry font[] = {
                {'0', {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E}}, {'1', {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E}},
                {'2', {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F}}, {'3', {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E}},
                {'4', {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02}}, {'5', {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E}},
                {'6', {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E}}, {'7', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08}},
                {'8', {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E}}, {'9', {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C}},
                {'A', {0x0E, 0x11, 0x11, 0x11, 0x1F, 0x11, 0x11}}, {'B', {0x1E, 0x11, 0x11, 0x1E, 0x11, 0x11, 0x1E}},
                {'C', {0x0E, 0x11, 0x10, 0x10, 0x10, 0x11, 0x0E}}, {'D', {0x1C, 0x12, 0x11, 0x11, 0x11, 0x12, 0x1C}},
                {'E', {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x1F}}, {'F', {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x10}},
                {'G', {0x0E, 0x11, 0x10, 0x17, 0x11, 0x11, 0x0F}}, {'H', {0x11, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11}},
                {'I', {0x0E, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0E}}, {'J', {0x07, 0x02, 0x02, 0x02, 0x02, 0x12, 0x0C}},
                {'K', {0x11, 0x12, 0x14, 0x18, 0x14, 0x12, 0x11}}, {'L', {0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x1F}},
                {'M', {0x11, 0x1B, 0x15, 0x15, 0x11, 0x11, 0x11}}, {'N', {0x11, 0x11, 0x19, 0x15, 0x13, 0x11, 0x11}},
                {'O', {0x0E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}}, {'P', {0x1E, 0x11, 0x11, 0x1E, 0x10, 0x10, 0x10}},
                {'Q', {0x0E, 0x11, 0x11, 0x11, 0x15, 0x12, 0x0D}}, {'R', {0x1E, 0x11, 0x11, 0x1E, 0x14, 0x12, 0x11}},
                {'S', {0x0F, 0x10, 0x10, 0x0E, 0x01, 0x01, 0x1E}}, {'T', {0x1F, 0x04, 0x04, 0x04, 0x04, 0x04, 0x04}},
                {'U', {0x11, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}}, {'V', {0x11, 0x11, 0x11, 0x11, 0x11, 0x0A, 0x04}},
                {'W', {0x11, 0x11, 0x11, 0x15, 0x15, 0x15, 0x0A}}, {'X', {0x11, 0x11, 0x0A, 0x04, 0x0A, 0x11, 0x11}},
                {'Y', {0x11, 0x11, 0x11, 0x0A, 0x04, 0x04, 0x04}}, {'Z', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x10, 0x1F}},
                {' ', {0, 0, 0, 0, 0, 0, 0}},                      {'-', {0, 0, 0, 0x1F, 0, 0, 0}},
                {'.', {0, 0, 0, 0, 0, 0x0C, 0x0C}},                {',', {0, 0, 0, 0, 0x0C, 0x04, 0x08}},
                {'_', {0, 0, 0, 0, 0, 0, 0x1F}},                   {'(', {0x02, 0x04, 0x08, 0x08, 0x08, 0x04, 0x02}},
                {')', {0x08, 0x04, 0x02, 0x02, 0x02, 0x04, 0x08}}, {'/', {0, 0x01, 0x02, 0x04, 0x08, 0x10, 0}},
                {':', {0, 0x0C, 0x0C, 0, 0x0C, 0x0C, 0}},          {'=', {0, 0, 0x1F, 0, 0x1F, 0, 0}},
                {'+', {0, 0x04, 0x04, 0x1F, 0x04, 0x04, 0}},       {'%', {0x18, 0x19, 0x02, 0x04, 0x08, 0x13, 0x03}},
            };
            for (const auto &e : font)
                if (e.c == ch)
                    return &e.rows;
            if (ch >= 'a' && ch <= 'z')
                return glyph(static_cast<char>(ch - 'a' + 'A'));
            return nullptr;
        }
    } // namespace detail

    class Canvas
    {
      public:
        Canvas(int width, int height, Rgb background = white)
            : w_(width), h_(height), px_(static_cast<std::size_t>(width) * height, background)
        {
            if (width < 1 || height < 1)
                throw std::invalid_argument("Canvas dimensions must be positive.");
        }

        int width() const { return w_; }
        int height() const { return h_; }

        void set(int x, int y, Rgb c)
        {
            if (x >= 0 && y >= 0 && x < w_ && y < h_)
                px_[static_cast<std::size_t>(y) * w_ + x] = c;
        }

        Rgb at(int x, int y) const { return px_.at(static_cast<std::size_t>(y) * w_ + x); }

        void fill_rect(int x0, int y0, int x1, int y1, Rgb c)
        {
            for (int y = std::max(0, std::min(y0, y1)); y <= std::min(h_ - 1, std::max(y0, y1)); ++y)
                for (int x = std::max(0, std::min(x0, x1)); x <= std::min(w_ - 1, std::max(x0, x1)); ++x)
                    px_[static_cast<std::size_t>(y) * w_ + x] = c;
        }

        void rect(int x0, int y0, int x1, int y1, Rgb c)
        {
            line(x0, y0, x1, y0, c);
            line(x1, y0, x1, y1, c);
            line(x1, y1, x0, y1, c);
            line(x0, y1, x0, y0, c);
        }

        // Bresenham line; `dash` > 0 draws `dash` pixels on, `dash` off.
        void line(int x0, int y0, int x1, int y1, Rgb c, int thickness = 1, int dash = 0)
        {
            const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
            const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
            int err = dx + dy, n = 0;
            for (;;)
            {
                if (dash <= 0 || (n / dash) % 2 == 0)
                    for (int t = 0; t < thickness; ++t)
                    {
                        set(x0 + (dy == 0 ? 0 : t - thickness / 2), y0 + (dy == 0 ? t - thickness / 2 : 0), c);
                    }
                ++n;
                if (x0 == x1 && y0 == y1)
                    break;
                const int e2 = 2 * err;
                if (e2 >= dy)
                {
                    err += dy;
                    x0 += sx;
                }
                if (e2 <= dx)
                {
                    err += dx;
                    y0 += sy;
                }
            }
        }

        static int text_width(std::string_view s, int scale = 1) { return static_cast<int>(s.size()) * 6 * scale; }

        void text(int x, int y, std::string_view s, Rgb c = black, int scale = 1)
        {
            for (char ch : s)
            {
                if (const auto *g = detail::glyph(ch))
                    for (int row = 0; row < 7; ++row)
                        for (int col = 0; col < 5; ++col)
                            if ((*g)[static_cast<std::size_t>(row)] & (0x10 >> col))
                                fill_rect(x + col * scale, y + row * scale, x + col * scale + scale - 1,
                                          y + row * scale + scale - 1, c);
                x += 6 * scale;
            }
        }

        // Text rotated 90 degrees counter-clockwise, reading bottom to top from (x, y).
        void text_vertical(int x, int y, std::string_view s, Rgb c = black, int scale = 1)
        {
            for (char ch : s)
            {
                if (const auto *g = detail::glyph(ch))
                    for (int row = 0; row < 7; ++row)
                        for (int col = 0; col < 5; ++col)
                            if ((*g)[static_cast<std::size_t>(row)] & (0x10 >> col))
                                fill_rect(x + row * scale, y - col * scale, x + row * scale + scale - 1,
                                          y - col * scale - scale + 1, c);
                y -= 6 * scale;
            }
        }

        void write_png(const std::filesystem::path &path) const
        {
            if (path.has_parent_path())
                std::filesystem::create_directories(path.parent_path());
            FILE *fp = std::fopen(path.string().c_str(), "wb");
            if (!fp)
                throw std::runtime_error("Cannot write " + path.string());
            png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
            png_infop info = png ? png_create_info_struct(png) : nullptr;
            if (!png || !info || setjmp(png_jmpbuf(png)))
            {
                png_destroy_write_struct(&png, &info);
                std::fclose(fp);
                throw std::runtime_error("libpng failed while writing " + path.string());
            }
            png_init_io(png, fp);
            png_set_IHDR(png, info, static_cast<png_uint_32>(w_), static_cast<png_uint_32>(h_), 8, PNG_COLOR_TYPE_RGB,
                         PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
            png_write_info(png, info);
            std::vector<std::uint8_t> row(static_cast<std::size_t>(w_) * 3);
            for (int y = 0; y < h_; ++y)
            {
                for (int x = 0; x < w_; ++x)
                {
                    const Rgb &p = px_[static_cast<std::size_t>(y) * w_ + x];
                    row[3 * static_cast<std::size_t>(x)] = p.r;
                    row[3 * static_cast<std::size_t>(x) + 1] = p.g;
                    row[3 * static_cast<std::size_t>(x) + 2] = p.b;
                }
                png_write_row(png, row.data());
            }
            png_write_end(png, nullptr);
            png_destroy_write_struct(&png, &info);
            std::fclose(fp);
        }

      private:
        int w_, h_;
        std::vector<Rgb> px_;
    };

    // Round tick positions covering [lo, hi].
    inline std::vector<double> nice_ticks(double lo, double hi, int target = 5)
    {
        if (!(hi > lo))
            return {lo};
        const double raw = (hi - lo) / std::max(1, target);
        const double mag = std::pow(10.0, std::floor(std::log10(raw)));
        double step = mag;
        for (double m : {1.0, 2.0, 5.0, 10.0})
            if (raw <= m * mag)
            {
                step = m * mag;
                break;
            }
        std::vector<double> out;
        for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step)
            out.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
        return out;
    }

    inline std::string format_tick(double v)
    {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.4g", v);
        return buf;
    }

} // namespace chanforge::raster

#endif // CHANFORGE_RASTER_HPP
