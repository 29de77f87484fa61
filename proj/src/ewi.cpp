/*
 * Copyright 2026 The ewspipe Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "ewspipe/ewi.hpp"

#include "ewspipe/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

namespace ews {

std::string_view to_string(Indicator indicator) noexcept
{
    return indicator == Indicator::Variance ? "variance" : "lag1ac";
}

Indicator parse_indicator(std::string_view text)
{
    if (text == "variance") return Indicator::Variance;
    if (text == "lag1ac") return Indicator::Lag1AC;
    throw Error(ErrorKind::InvalidArgument, "unknown indicator '" + std::string(text) + "'");
}

std::size_t ewi_window(std::size_t informative_length, const EwiConfig& cfg)
{
    return static_cast<std::size_t>(std::floor(cfg.window_frac * static_cast<double>(informative_length) + 1e-9));
}

namespace {

double sample_variance(std::span<const double> w)
{
    double mean = 0.0;
    for (double v : w) mean += v;
    mean /= static_cast<double>(w.size());
    double ss = 0.0;
    for (double v : w) ss += (v - mean) * (v - mean);
    return ss / static_cast<double>(w.size() - 1);
}

double lag1_autocorrelation(std::span<const double> w)
{
    const std::size_t m = w.size() - 1;
    const auto a = w.first(m);
    const auto b = w.subspan(1, m);
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= static_cast<double>(m);
    mb /= static_cast<double>(m);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

/// Strict inversions (i < j, x_i > x_j) of v; v ends up sorted.
std::uint64_t count_inversions(std::vector<double>& v, std::vector<double>& scratch, std::size_t lo, std::size_t hi)
{
    if (hi - lo < 2) return 0;
    const std::size_t mid = lo + (hi - lo) / 2;
    std::uint64_t inv = count_inversions(v, scratch, lo, mid) + count_inversions(v, scratch, mid, hi);
    std::size_t i = lo, j = mid, k = lo;
    while (i < mid && j < hi) {
        if (v[i] <= v[j]) {
            scratch[k++] = v[i++];
        } else {
            inv += mid - i;
            scratch[k++] = v[j++];
        }
    }
    while (i < mid) scratch[k++] = v[i++];
    while (j < hi) scratch[k++] = v[j++];
    std::copy(scratch.begin() + static_cast<std::ptrdiff_t>(lo), scratch.begin() + static_cast<std::ptrdiff_t>(hi),
              v.begin() + static_cast<std::ptrdiff_t>(lo));
    return inv;
}

} // namespace

std::vector<double> rolling_indicator(std::span<const double> values, const EwiConfig& cfg)
{
    const std::size_t n = values.size();
    const std::size_t w = ewi_window(n, cfg);
    if (w < std::max<std::size_t>(cfg.min_window, 3) || w > n) {
        throw Error(ErrorKind::WindowTooShort, "window of " + std::to_string(w) + " points over " +
                                                   std::to_string(n) + " informative points");
    }
    std::vector<double> out;
    out.reserve(n - w + 1);
    for (std::size_t end = w; end <= n; ++end) {
        const auto window = values.subspan(end - w, w);
        out.push_back(cfg.indicator == Indicator::Variance ? sample_variance(window) : lag1_autocorrelation(window));
    }
    return out;
}

std::vector<double> rolling_indicator(const TimeSeries& ts, const EwiConfig& cfg)
{
    const auto values = ts.informative_values();
    return rolling_indicator(std::span<const double>(values), cfg);
}

double kendall_tau(std::span<const double> x)
{
    const std::size_t n = x.size();
    if (n < 2) throw Error(ErrorKind::InvalidArgument, "kendall_tau needs at least two values");
    for (double v : x) {
        if (std::isnan(v)) throw Error(ErrorKind::InvalidArgument, "kendall_tau input contains NaN");
    }
    std::vector<double> v(x.begin(), x.end());
    std::vector<double> scratch(n);
    const std::uint64_t discordant = count_inversions(v, scratch, 0, n);

    std::uint64_t tied = 0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i + 1;
        while (j < n && v[j] == v[i]) ++j;
        const std::uint64_t t = j - i;
        tied += t * (t - 1) / 2;
        i = j;
    }
    const std::uint64_t pairs = static_cast<std::uint64_t>(n) * (n - 1) / 2;
    if (pairs == tied) return 0.0;
    const std::uint64_t concordant = pairs - tied - discordant;
    const auto numerator = static_cast<double>(static_cast<std::int64_t>(concordant) - static_cast<std::int64_t>(discordant));
    return numerator / std::sqrt(static_cast<double>(pairs) * static_cast<double>(pairs - tied));
}

double ewi_score(const TimeSeries& ts, const EwiConfig& cfg)
{
    const auto indicator = rolling_indicator(ts, cfg);
    if (indicator.size() < 2) {
        throw Error(ErrorKind::WindowTooShort, "indicator series too short for a trend");
    }
    return 0.5 * (kendall_tau(indicator) + 1.0);
}

} // namespace ews
