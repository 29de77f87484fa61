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
#include "ewspipe/evaluate.hpp"
#include "ewspipe/rng.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace ews;

namespace {

LabelList balanced(std::size_t n)
{
    LabelList out;
    for (std::size_t i = 0; i < n; ++i) {
        out.emplace_back("s" + std::to_string(100000 + i),
                         i % 2 ? BifurcationLabel::Null : BifurcationLabel::Transcritical);
    }
    return out;
}

} // namespace

TEST_SUITE("evaluate") {

TEST_CASE("split counts per class")
{
    const auto labels = balanced(1000);
    const auto s = stratified_split(labels, parse_ratios("0.8,0.15,0.05"), 3);
    CHECK(s.train.size() == 800);
    CHECK(s.val.size() == 150);
    CHECK(s.test.size() == 50);
    std::set<std::string> all(s.train.begin(), s.train.end());
    all.insert(s.val.begin(), s.val.end());
    all.insert(s.test.begin(), s.test.end());
    CHECK(all.size() == 1000);
    int pos = 0;
    for (const auto& id : s.test) pos += std::stoi(id.substr(1)) % 2 == 0;
    CHECK(pos == 25);
}

TEST_CASE("split is seed-determined and sorted")
{
    const auto labels = balanced(100);
    const SplitRatios r;
    CHECK(stratified_split(labels, r, 1).test == stratified_split(labels, r, 1).test);
    CHECK(stratified_split(labels, r, 1).test != stratified_split(labels, r, 2).test);
    const auto s = stratified_split(labels, r, 1);
    CHECK(std::is_sorted(s.train.begin(), s.train.end()));
}

TEST_CASE("split largest remainder on awkward sizes")
{
    for (std::size_t n : {1u, 2u, 3u, 7u, 13u, 101u}) {
        LabelList l;
        for (std::size_t i = 0; i < n; ++i) l.emplace_back("x" + std::to_string(i), BifurcationLabel::Null);
        const auto s = stratified_split(l, {}, 0);
        CHECK(s.train.size() + s.val.size() + s.test.size() == n);
        CHECK(!s.warning.empty());
    }
}

TEST_CASE("split argument errors")
{
    CHECK_THROWS_AS(stratified_split({}, {}, 0), Error);
    CHECK_THROWS_AS(stratified_split(balanced(4), {0.5, 0.5, 0.5}, 0), Error);
    CHECK_THROWS_AS(parse_ratios("0.8,0.2"), Error);
    CHECK_THROWS_AS(parse_ratios("a,b,c"), Error);
}

TEST_CASE("confusion metrics")
{
    const LabelList labels{{"a", BifurcationLabel::Transcritical},
                           {"b", BifurcationLabel::Transcritical},
                           {"c", BifurcationLabel::Null},
                           {"d", BifurcationLabel::Null},
                           {"e", BifurcationLabel::Fold}};
    const std::vector<PredictionRecord> preds{{"a", 0.9, {}}, {"b", 0.5, {}}, {"c", 0.7, {}}, {"d", 0.1, {}}};
    const auto m = confusion_metrics(preds, labels);
    CHECK(m.tp == 2);
    CHECK(m.fp == 1);
    CHECK(m.tn == 1);
    CHECK(m.fn == 0);
    CHECK(m.accuracy == 0.75);
    CHECK(m.precision == doctest::Approx(2.0 / 3.0));
    CHECK(m.recall == 1.0);
    CHECK(m.f1 == doctest::Approx(0.8));

    const auto none = confusion_metrics({{"a", 0.1, {}}, {"b", 0.1, {}}, {"c", 0.1, {}}, {"d", 0.1, {}}}, labels);
    CHECK(none.precision == 0.0);
    CHECK(none.f1 == 0.0);
    try {
        confusion_metrics({{"a", 0.1, {}}}, labels);
        FAIL("expected MissingPrediction");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::MissingPrediction);
        CHECK(e.detail() == "b");
    }
}

TEST_CASE("ROC against Mann-Whitney")
{
    RngStream rng(7, 0);
    for (int k = 0; k < 200; ++k) {
        const auto n = static_cast<std::size_t>(rng.integer(2, 80));
        std::vector<double> s(n);
        std::vector<bool> pos(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = static_cast<double>(rng.integer(0, 10)) / 10.0;
            pos[i] = rng.bernoulli(0.5);
        }
        pos[0] = true;
        pos[1] = false;
        const auto roc = roc_from_scores(s, pos);
        CHECK(std::abs(roc.auc - oracle::mann_whitney_auc(s, pos)) < 1e-9);
        CHECK(std::isinf(roc.thresholds.front()));
        CHECK(roc.fpr.back() == 1.0);
        CHECK(roc.tpr.back() == 1.0);
        for (std::size_t i = 1; i < roc.fpr.size(); ++i) {
            CHECK(roc.fpr[i] >= roc.fpr[i - 1]);
            CHECK(roc.tpr[i] >= roc.tpr[i - 1]);
            CHECK(roc.thresholds[i] < roc.thresholds[i - 1]);
        }
    }
}

TEST_CASE("ROC extremes")
{
    const std::vector<double> s{0.9, 0.8, 0.2, 0.1};
    CHECK(roc_from_scores(s, {true, true, false, false}).auc == 1.0);
    CHECK(roc_from_scores(s, {false, false, true, true}).auc == 0.0);
    const std::vector<double> tied{0.5, 0.5, 0.5, 0.5};
    CHECK(roc_from_scores(tied, {true, false, true, false}).auc == 0.5);
    try {
        roc_from_scores(s, {true, true, true, true});
        FAIL("expected SingleClass");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::SingleClass);
    }
}

TEST_CASE("testbed evaluation checks declared windows")
{
    const std::vector<TestbedEntry> tb{{"a", BifurcationLabel::Transcritical, 1200},
                                       {"b", BifurcationLabel::Null, 1200}};
    CHECK(evaluate_testbed({{"a", 0.9, 1200}, {"b", 0.1, {}}}, tb).auc == 1.0);
    try {
        evaluate_testbed({{"a", 0.9, 1000}, {"b", 0.1, 1200}}, tb);
        FAIL("expected WindowMismatch");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::WindowMismatch);
    }
}

}
