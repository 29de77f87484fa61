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

#include "ewspipe/error.hpp"
#include "ewspipe/preprocess.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace ews;

namespace {

std::vector<double> random_walk(RngStream& rng, std::size_t n)
{
    std::vector<double> y(n);
    double v = 0.0;
    for (auto& e : y) e = (v += rng.normal());
    return y;
}

} // namespace

TEST_SUITE("preprocess") {

TEST_CASE("censor draws respect the bound")
{
    RngStream rng(1, 0);
    for (int i = 0; i < 10000; ++i) {
        const auto c = draw_censor(rng, 1500, 725);
        CHECK(c.lead_len <= 725);
        CHECK(c.tail_len <= 725);
    }
    CHECK_THROWS_AS(draw_censor(rng, 1450, 725), Error);
}

TEST_CASE("censoring zeroes and unmasks both ends")
{
    TimeSeries ts("a", BifurcationLabel::Null, {1, 2, 3, 4, 5, 6});
    const auto c = censor(ts, {725, 2, 1});
    CHECK(c.values == std::vector<double>{0, 0, 3, 4, 5, 0});
    CHECK(c.mask == std::vector<bool>{false, false, true, true, true, false});
    CHECK(c.informative_count() == 3);
    CHECK_THROWS_AS(censor(c, {725, 1, 0}), Error);
    CHECK_THROWS_AS(censor(ts, {725, 3, 3}), Error);
}

TEST_CASE("mean normalization uses informative points")
{
    TimeSeries ts("a", BifurcationLabel::Null, {9, 2, 4, 9});
    ts.mask = {false, true, true, false};
    const auto n = normalize_by_mean(ts);
    CHECK(n.values == std::vector<double>{9, 2.0 / 3.0, 4.0 / 3.0, 9});
    TimeSeries z("z", BifurcationLabel::Null, {0, 0, 0});
    try {
        normalize_by_mean(z);
        FAIL("expected ZeroMean");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ZeroMean);
    }
}

TEST_CASE("lowess agrees with the pointwise oracle")
{
    RngStream rng(3, 0);
    for (int k = 0; k < 10; ++k) {
        const auto y = random_walk(rng, 120);
        std::vector<double> x(120);
        double t = 0.0;
        for (auto& e : x) e = (t += rng.uniform(0.1, 2.0));
        const auto fast = lowess_smooth(x, y, {0.25, 3});
        const auto slow = oracle::lowess(x, y, 0.25, 3);
        for (std::size_t i = 0; i < y.size(); ++i) CHECK(std::abs(fast[i] - slow[i]) < 1e-10);
    }
}

TEST_CASE("lowess reproduces straight lines")
{
    std::vector<double> y(200);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = 3.0 - 0.25 * static_cast<double>(i);
    const auto s = lowess_smooth(y);
    for (std::size_t i = 0; i < y.size(); ++i) CHECK(std::abs(s[i] - y[i]) < 1e-8);
}

TEST_CASE("lowess robustness discounts an outlier")
{
    RngStream rng(4, 0);
    std::vector<double> y(100);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = 0.1 * static_cast<double>(i) + 0.05 * rng.normal();
    y[50] = 100.0;
    const auto plain = lowess_smooth(y, {0.2, 0});
    const auto robust = lowess_smooth(y, {0.2, 3});
    CHECK(std::abs(plain[50] - 5.0) > 1.0);
    CHECK(std::abs(robust[50] - 5.0) < 0.1);
}

TEST_CASE("lowess stops early on an exact fit")
{
    std::vector<double> y(100, 1.0);
    y[50] = 100.0;
    // Median residual is zero, so no robustness pass runs.
    CHECK(lowess_smooth(y, {0.2, 3}) == lowess_smooth(y, {0.2, 0}));
}

TEST_CASE("lowess argument checks")
{
    const std::vector<double> y{1, 2};
    CHECK_THROWS_AS(lowess_smooth(y), Error);
    const std::vector<double> x{1, 0, 2, 3}, y4{1, 2, 3, 4};
    CHECK_THROWS_AS(lowess_smooth(x, y4, {1.0, 0}), Error);
}

TEST_CASE("detrend leaves residuals on informative points only")
{
    RngStream rng(5, 0);
    TimeSeries ts("a", BifurcationLabel::Null, random_walk(rng, 300));
    ts = censor(ts, {725, 40, 60});
    const auto d = detrend(ts);
    const auto idx = ts.informative_indices();
    std::vector<double> x, y;
    for (auto i : idx) {
        x.push_back(static_cast<double>(i));
        y.push_back(ts.values[i]);
    }
    const auto smooth = oracle::lowess(x, y, 0.2, 3);
    for (std::size_t k = 0; k < idx.size(); ++k) {
        CHECK(std::abs(d.values[idx[k]] - (y[k] - smooth[k])) < 1e-10);
    }
    for (std::size_t i = 0; i < 40; ++i) CHECK(d.values[i] == 0.0);
}

TEST_CASE("preprocess is seed-determined and records the censor draw")
{
    RngStream data_rng(6, 0);
    std::vector<double> v(1500);
    for (auto& e : v) e = 10.0 + data_rng.normal();
    TimeSeries ts("a", BifurcationLabel::Transcritical, v);
    PreprocessConfig cfg;
    RngStream r1(9, 0), r2(9, 0);
    PreprocessRecord rec;
    const auto a = preprocess_series(ts, cfg, r1, &rec);
    const auto b = preprocess_series(ts, cfg, r2);
    CHECK(a == b);
    CHECK(a.informative_count() == 1500 - rec.lead_len - rec.tail_len);
    CHECK(a.label == BifurcationLabel::Transcritical);
}

}
