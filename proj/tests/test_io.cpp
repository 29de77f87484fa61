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
#include "ewspipe/io.hpp"
#include "ewspipe/rng.hpp"

#include "temp_dir.hpp"

#include <doctest.h>

#include <bit>
#include <cmath>
#include <fstream>
#include <limits>

using namespace ews;

namespace {

void write(const fs::path& p, const std::string& text)
{
    std::ofstream(p, std::ios::binary) << text;
}

std::string read(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

Dataset sample(std::size_t n, std::size_t len)
{
    RngStream rng(4, 0);
    Dataset d;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> v(len);
        for (auto& e : v) e = rng.normal() * std::pow(10.0, rng.uniform(-300, 300));
        TimeSeries ts("s" + std::to_string(i), i % 2 ? BifurcationLabel::Null : BifurcationLabel::Transcritical, v);
        ts.mask[i % len] = false;
        ts.values[i % len] = 0.0;
        ts.dt = 0.5;
        ts.meta["k"] = std::to_string(i);
        d.series.push_back(std::move(ts));
    }
    d.manifest = {{"generator", {{"name", "test"}}}};
    return d;
}

} // namespace

TEST_SUITE("io") {

TEST_CASE("double formatting round-trips exactly")
{
    RngStream rng(1, 0);
    for (int i = 0; i < 10000; ++i) {
        const double v = std::bit_cast<double>(rng.next_u64());
        if (!std::isfinite(v)) continue;
        CHECK(parse_double(format_double(v)) == v);
    }
    CHECK(parse_double(format_double(0.1)) == 0.1);
    CHECK(std::isinf(parse_double("inf")));
    CHECK_THROWS_AS(parse_double("1.0x"), Error);
    CHECK_THROWS_AS(parse_double(""), Error);
}

TEST_CASE("dataset round trip")
{
    TempDir tmp;
    const auto d = sample(10, 37);
    write_dataset(tmp.path / "ds", d);
    const auto back = read_dataset(tmp.path / "ds");
    REQUIRE(back.series.size() == 10);
    for (std::size_t i = 0; i < 10; ++i) CHECK(back.series[i] == d.series[i]);
    CHECK(back.manifest["count"] == 10);
    CHECK(back.manifest == complete_manifest(d));
}

TEST_CASE("length mismatch and bad ids")
{
    TempDir tmp;
    auto d = sample(3, 5);
    d.series[1].values.push_back(1.0);
    d.series[1].mask.push_back(true);
    try {
        write_dataset(tmp.path / "ds", d);
        FAIL("expected LengthMismatch");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::LengthMismatch);
    }
    CHECK_FALSE(fs::exists(tmp.path / "ds"));
    // Nothing half-written is left next to the target either.
    CHECK(fs::is_empty(tmp.path));
    auto bad = sample(1, 3);
    bad.series[0].id = "a,b";
    CHECK_THROWS_AS(write_dataset(tmp.path / "x", bad), Error);
}

TEST_CASE("truncated row names its line")
{
    TempDir tmp;
    write_dataset(tmp.path / "ds", sample(4, 6));
    auto text = read(tmp.path / "ds" / "series.csv");
    // Drop the last field of row 3 (line 4).
    std::vector<std::string> lines;
    std::stringstream ss(text);
    for (std::string l; std::getline(ss, l);) lines.push_back(l);
    lines[3] = lines[3].substr(0, lines[3].rfind(','));
    std::string joined;
    for (const auto& l : lines) joined += l + "\n";
    write(tmp.path / "ds" / "series.csv", joined);
    try {
        read_dataset(tmp.path / "ds");
        FAIL("expected FormatError");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::FormatError);
        CHECK(e.detail().find("series.csv line 4") != std::string::npos);
    }
}

TEST_CASE("atomic replace of an existing directory")
{
    TempDir tmp;
    write_dataset(tmp.path / "ds", sample(2, 4));
    write_dataset(tmp.path / "ds", sample(5, 4));
    CHECK(read_dataset(tmp.path / "ds").series.size() == 5);
    CHECK_THROWS(write_directory_atomically(tmp.path / "ds", [](const fs::path& p) {
        std::ofstream(p / "partial") << "x";
        throw Error(ErrorKind::IoError, "interrupted");
    }));
    CHECK(read_dataset(tmp.path / "ds").series.size() == 5);
    CHECK_FALSE(fs::exists(tmp.path / "ds" / "partial"));
    std::size_t entries = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(tmp.path)) ++entries;
    CHECK(entries == 1);
}

TEST_CASE("predictions and labels")
{
    TempDir tmp;
    const std::vector<PredictionRecord> preds{{"a", 0.25, 1200}, {"b", 1.0, {}}};
    write_predictions(tmp.path / "p.csv", preds);
    const auto back = read_predictions(tmp.path / "p.csv");
    REQUIRE(back.size() == 2);
    CHECK(back[0].p_transcritical == 0.25);
    CHECK(back[0].eval_start_index == std::optional<std::size_t>(1200));
    CHECK_FALSE(back[1].eval_start_index.has_value());

    write(tmp.path / "q.csv", "id,p_transcritical\na,1.5\n");
    CHECK_THROWS_AS(read_predictions(tmp.path / "q.csv"), Error);

    const LabelList labels{{"a", BifurcationLabel::Transcritical}, {"b", BifurcationLabel::Null}};
    write_labels(tmp.path / "l.csv", labels);
    CHECK(read_labels(tmp.path / "l.csv") == labels);
    write(tmp.path / "m.csv", "id,label\na,sideways\n");
    CHECK_THROWS_AS(read_labels(tmp.path / "m.csv"), Error);
}

TEST_CASE("roc table starts at infinity")
{
    RocResult r;
    r.thresholds = {std::numeric_limits<double>::infinity(), 0.5};
    r.fpr = {0, 1};
    r.tpr = {0, 1};
    CHECK(roc_csv(r) == "threshold,fpr,tpr\ninf,0,0\n0.5,1,1\n");
}

TEST_CASE("empirical import: well-formed table")
{
    TempDir tmp;
    std::string text = "date,cases\n";
    for (int d = 0; d < 100; ++d) text += std::to_string(1000 + d) + "," + std::to_string(d * 3) + "\n";
    write(tmp.path / "flu.csv", text);
    const auto series = import_empirical_csv(tmp.path / "flu.csv");
    REQUIRE(series.size() == 1);
    CHECK(series[0].size() == 100);
    CHECK(series[0].label == BifurcationLabel::Unlabeled);
    CHECK(series[0].informative_count() == 100);
    CHECK(series[0].values[99] == 297.0);
}

TEST_CASE("empirical import: two-day gap is filled")
{
    TempDir tmp;
    write(tmp.path / "c.csv", "date,cases\n2020-03-01,5\n2020-03-02,7\n2020-03-05,9\n2020-03-06,4\n");
    const auto s = import_empirical_csv(tmp.path / "c.csv");
    REQUIRE(s.size() == 1);
    CHECK(s[0].values == std::vector<double>{5, 7, 7, 7, 9, 4});
    CHECK(s[0].meta.at("fill_count") == "2");
}

TEST_CASE("empirical import: long gaps split segments, groups stay apart")
{
    TempDir tmp;
    write(tmp.path / "g.csv",
          "region,day,count\nA,1,1\nB,1,10\nA,2,2\nB,2,20\nA,10,3\nA,11,4\n");
    EmpiricalColumns cols{"day", "count", "region", 3};
    const auto s = import_empirical_csv(tmp.path / "g.csv", cols);
    REQUIRE(s.size() == 3);
    CHECK(s[0].id == "g_A_seg0");
    CHECK(s[0].values == std::vector<double>{1, 2});
    CHECK(s[1].id == "g_A_seg1");
    CHECK(s[1].values == std::vector<double>{3, 4});
    CHECK(s[2].id == "g_B_seg0");
}

TEST_CASE("empirical import errors")
{
    TempDir tmp;
    write(tmp.path / "n.csv", "date,cases\n1,5\n2,-1\n");
    try {
        import_empirical_csv(tmp.path / "n.csv");
        FAIL("expected NegativeCounts");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NegativeCounts);
    }
    write(tmp.path / "m.csv", "date,cases\n2,5\n1,3\n");
    try {
        import_empirical_csv(tmp.path / "m.csv");
        FAIL("expected NonMonotonicDates");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NonMonotonicDates);
    }
    write(tmp.path / "h.csv", "when,cases\n1,5\n");
    CHECK_THROWS_AS(import_empirical_csv(tmp.path / "h.csv"), Error);
}

}
