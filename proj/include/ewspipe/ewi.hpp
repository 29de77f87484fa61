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

#pragma once

#include "ewspipe/time_series.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace ews {

enum class Indicator { Variance, Lag1AC };
std::string_view to_string(Indicator indicator) noexcept;
/// Accepts "variance" and "lag1ac".
Indicator parse_indicator(std::string_view text);

struct EwiConfig {
    double window_frac = 0.5;
    Indicator indicator = Indicator::Variance;
    std::size_t min_window = 10;
};

/// Trailing-window length for `informative_length` points.
std::size_t ewi_window(std::size_t informative_length, const EwiConfig& cfg);

/// Indicator over every trailing window of the informative values, one
/// value per window end. Variance uses the n - 1 denominator; Lag1AC is the
/// Pearson correlation of the window with itself shifted by one step (0 when
/// either side is constant). Throws WindowTooShort.
std::vector<double> rolling_indicator(const TimeSeries& ts, const EwiConfig& cfg = {});
std::vector<double> rolling_indicator(std::span<const double> informative, const EwiConfig& cfg = {});

/// Kendall tau-b between x and its index sequence, in O(n log n) via
/// merge-sort inversion counting. Ties in x follow tau-b; an all-tied input
/// gives 0.
double kendall_tau(std::span<const double> x);

/// (kendall_tau(rolling_indicator(ts)) + 1) / 2.
double ewi_score(const TimeSeries& ts, const EwiConfig& cfg = {});

} // namespace ews
