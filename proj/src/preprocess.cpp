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

#include "ewspipe/preprocess.hpp"

#include "ewspipe/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ews {

CensorSpec draw_censor(RngStream& rng, std::size_t length, std::size_t max_censor)
{
    if (2 * max_censor >= length) {
        throw Error(ErrorKind::InvalidCensor, "max_censor " + std::to_string(max_censor) +
                                                  " can erase a series of length " + std::to_string(length));
    }
    CensorSpec spec;
    spec.max_censor = max_censor;
    spec.lead_len = static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(max_censor)));
    spec.tail_len = static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(max_censor)));
    return spec;
}

TimeSeries censor(const TimeSeries& ts, const CensorSpec& spec)
{
    const std::size_t n = ts.size();
    if (spec.lead_len > spec.max_censor || spec.tail_len > spec.max_censor) {
        throw Error(ErrorKind::InvalidCensor, "censor length exceeds max_censor");
    }
    if (spec.lead_len + spec.tail_len >= n) {
        throw Error(ErrorKind::InvalidCensor, "censoring leaves no informative point");
    }
    if (ts.informative_count() != n) {
        throw Error(ErrorKind::InvalidCensor, "series '" + ts.id + "' is already censored");
    }
    TimeSeries out = ts;
    for (std::size_t i = 0; i < n; ++i) {
        if (i < spec.lead_len || i >= n - spec.tail_len) {
            out.values[i] = 0.0;
            out.mask[i] = false;
        }
    }
    return out;
}

TimeSeries normalize_by_mean(const TimeSeries& ts)
{
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (ts.mask[i]) {
            sum += ts.values[i];
            ++count;
        }
    }
    const double mean = count ? sum / static_cast<double>(count) : 0.0;
    if (mean == 0.0 || !std::isfinite(mean)) {
        throw Error(ErrorKind::ZeroMean, "series '" + ts.id + "' has zero informative mean");
    }
    TimeSeries out = ts;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out.mask[i]) out.values[i] /= mean;
    }
    return out;
}

namespace {

double median_abs(std::span<const double> r)
{
    std::vector<double> a(r.size());
    std::ranges::transform(r, a.begin(), [](double v) { return std::abs(v); });
    const std::size_t n = a.size();
    const std::size_t mid = n / 2;
    std::nth_element(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(mid), a.end());
    const double upper = a[mid];
    if (n % 2 == 1) return upper;
    const double lower = *std::max_element(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

double tricube(double u)
{
    const double t = 1.0 - u * u * u;
    return t * t * t;
}

/// One local-linear pass over all points with the given robustness weights.
void local_fit(std::span<const double> x, std::span<const double> y, std::span<const double> robust, std::size_t q,
               std::span<double> fitted)
{
    const std::size_t n = x.size();
    std::size_t left = 0;
    std::vector<double> w(q);
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = x[i];
        // Slide the q-point window so it holds the q nearest neighbours of xi.
        while (left + q < n && xi - x[left] > x[left + q] - xi) ++left;
        const double h = std::max(xi - x[left], x[left + q - 1] - xi);

        double sw = 0.0;
        for (std::size_t k = 0; k < q; ++k) {
            const double dist = std::abs(x[left + k] - xi);
            double wk = h > 0.0 ? (dist < h ? tricube(dist / h) : 0.0) : (dist == 0.0 ? 1.0 : 0.0);
            wk *= robust[left + k];
            w[k] = wk;
            sw += wk;
        }
        if (!(sw > 0.0)) {
            fitted[i] = y[i];
            continue;
        }
        double xm = 0.0, ym = 0.0;
        for (std::size_t k = 0; k < q; ++k) {
            xm += w[k] * x[left + k];
            ym += w[k] * y[left + k];
        }
        xm /= sw;
        ym /= sw;
        double sxx = 0.0, sxy = 0.0;
        for (std::size_t k = 0; k < q; ++k) {
            const double dx = x[left + k] - xm;
            sxx += w[k] * dx * dx;
            sxy += w[k] * dx * (y[left + k] - ym);
        }
        const double range = x[n - 1] - x[0];
        if (sxx <= 1e-14 * sw * range * range) {
            fitted[i] = ym;
        } else {
            fitted[i] = ym + (sxy / sxx) * (xi - xm);
        }
    }
}

} // namespace

std::vector<double> lowess_smooth(std::span<const double> x, std::span<const double> y, const LowessConfig& cfg)
{
    const std::size_t n = y.size();
    if (x.size() != n) throw Error(ErrorKind::InvalidArgument, "lowess: x and y differ in length");
    if (!(cfg.span > 0.0 && cfg.span <= 1.0)) throw Error(ErrorKind::InvalidArgument, "lowess: span must be in (0, 1]");
    if (cfg.span * static_cast<double>(n) < 3.0) {
        throw Error(ErrorKind::InvalidArgument, "lowess: span covers fewer than 3 points");
    }
    if (!std::ranges::is_sorted(x)) throw Error(ErrorKind::InvalidArgument, "lowess: x must be nondecreasing");

    const auto q = std::min(n, static_cast<std::size_t>(std::floor(cfg.span * static_cast<double>(n) + 1e-7)));
    std::vector<double> robust(n, 1.0);
    std::vector<double> fitted(n);
    std::vector<double> resid(n);
    local_fit(x, y, robust, q, fitted);

    double mean_abs_y = 0.0;
    for (double v : y) mean_abs_y += std::abs(v);
    mean_abs_y /= static_cast<double>(n);

    for (int iter = 0; iter < cfg.robustness_iters; ++iter) {
        for (std::size_t i = 0; i < n; ++i) resid[i] = y[i] - fitted[i];
        const double s = median_abs(resid);
        if (s <= 1e-7 * mean_abs_y) break;
        for (std::size_t i = 0; i < n; ++i) {
            const double u = resid[i] / (6.0 * s);
            robust[i] = std::abs(u) < 1.0 ? (1.0 - u * u) * (1.0 - u * u) : 0.0;
        }
        local_fit(x, y, robust, q, fitted);
    }
    return fitted;
}

std::vector<double> lowess_smooth(std::span<const double> y, const LowessConfig& cfg)
{
    std::vector<double> x(y.size());
    std::iota(x.begin(), x.end(), 0.0);
    return lowess_smooth(x, y, cfg);
}

TimeSeries detrend(const TimeSeries& ts, const LowessConfig& cfg)
{
    const auto idx = ts.informative_indices();
    std::vector<double> x(idx.size()), y(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) {
        x[k] = static_cast<double>(idx[k]);
        y[k] = ts.values[idx[k]];
    }
    const auto smooth = lowess_smooth(x, y, cfg);
    TimeSeries out = ts;
    for (std::size_t k = 0; k < idx.size(); ++k) {
        out.values[idx[k]] = y[k] - smooth[k];
    }
    return out;
}

TimeSeries preprocess_series(const TimeSeries& ts, const PreprocessConfig& cfg, RngStream& rng,
                             PreprocessRecord* record)
{
    TimeSeries cur = ts;
    PreprocessRecord rec;
    if (cfg.apply_censor) {
        const auto spec = draw_censor(rng, ts.size(), cfg.max_censor);
        rec.lead_len = spec.lead_len;
        rec.tail_len = spec.tail_len;
        cur = censor(cur, spec);
    }
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < cur.size(); ++i) {
        if (cur.mask[i]) {
            sum += cur.values[i];
            ++count;
        }
    }
    rec.mean = count ? sum / static_cast<double>(count) : 0.0;
    cur = normalize_by_mean(cur);
    cur = detrend(cur, cfg.lowess);
    if (record) *record = rec;
    return cur;
}

} // namespace ews
