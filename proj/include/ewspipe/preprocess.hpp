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

#include "ewspipe/rng.hpp"
#include "ewspipe/time_series.hpp"

#include <span>
#include <vector>

namespace ews {

/// Two-sided censoring: `lead_len` leading and `tail_len` trailing points are
/// zeroed and masked out.
struct CensorSpec {
    std::size_t max_censor = 725;
    std::size_t lead_len = 0;
    std::size_t tail_len = 0;
};

/// Draws lead and tail lengths uniformly from [0, max_censor]. Throws
/// InvalidCensor if 2 * max_censor >= length, since a draw could then erase
/// the whole series.
CensorSpec draw_censor(RngStream& rng, std::size_t length, std::size_t max_censor = 725);

/// Requires a fully informative series; throws InvalidCensor when the spec
/// leaves no informative point or exceeds max_censor.
TimeSeries censor(const TimeSeries& ts, const CensorSpec& spec);

/// Divides informative values by their mean; censored zeros stay put.
/// Throws ZeroMean when that mean is zero.
TimeSeries normalize_by_mean(const TimeSeries& ts);

struct LowessConfig {
    double span = 0.2;
    int robustness_iters = 3;
};

/// Robust locally weighted linear regression (Cleveland 1979).
///
/// For each x_i the q = floor(span * n) nearest points enter a weighted
/// least-squares line with tricube weights (1 - (d / h)^3)^3, h being the
/// q-th smallest distance. Each robustness pass rescales those weights by
/// bisquare(r / (6 s)), r the current residuals and s their median absolute
/// value; passes stop early once s <= 1e-7 * mean |y|. A window whose
/// weighted x-spread vanishes falls back to the weighted mean.
///
/// `x` must be nondecreasing. Throws InvalidArgument when span * n < 3.
std::vector<double> lowess_smooth(std::span<const double> x, std::span<const double> y, const LowessConfig& cfg = {});
/// Equally spaced abscissae 0, 1, ..., n - 1.
std::vector<double> lowess_smooth(std::span<const double> y, const LowessConfig& cfg = {});

/// Replaces the informative segment with its Lowess residuals, using the
/// original positions as abscissae. Mask and censored zeros are untouched.
TimeSeries detrend(const TimeSeries& ts, const LowessConfig& cfg = {});

struct PreprocessConfig {
    bool apply_censor = true;
    std::size_t max_censor = 725;
    LowessConfig lowess{};
};

struct PreprocessRecord {
    std::size_t lead_len = 0;
    std::size_t tail_len = 0;
    double mean = 0.0;
};

/// censor -> normalize_by_mean -> detrend. Censor draws come from `rng`.
TimeSeries preprocess_series(const TimeSeries& ts, const PreprocessConfig& cfg, RngStream& rng,
                             PreprocessRecord* record = nullptr);

} // namespace ews
