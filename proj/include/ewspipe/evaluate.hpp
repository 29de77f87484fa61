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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ews {

struct SplitRatios {
    double train = 0.80;
    double val = 0.15;
    double test = 0.05;
};

/// Parses "0.8,0.15,0.05".
SplitRatios parse_ratios(const std::string& text);

struct SplitAssignment {
    std::vector<std::string> train;
    std::vector<std::string> val;
    std::vector<std::string> test;
    SplitRatios ratios;
    std::uint64_t seed = 0;
    /// Non-empty when only one class was present.
    std::string warning;
};

using LabelList = std::vector<std::pair<std::string, BifurcationLabel>>;

/// Per-class shuffle (seeded) followed by largest-remainder allocation of
/// each class to train/val/test. Lists come back sorted by id. Throws
/// EmptyDataset for no input and InvalidArgument for ratios that are
/// negative or do not sum to 1.
SplitAssignment stratified_split(const LabelList& labels, const SplitRatios& ratios, std::uint64_t seed);

struct PredictionRecord {
    std::string id;
    double p_transcritical = 0.0;
    /// Window the prediction was computed on, when the producer declares it.
    std::optional<std::size_t> eval_start_index;
};

struct ConfusionMetrics {
    double accuracy = 0.0;
    double f1 = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
};

/// Transcritical is the positive class; p >= threshold predicts positive.
/// Precision, recall and F1 are 0 when their denominators vanish. Labels
/// other than transcritical/null are ignored. Throws MissingPrediction.
ConfusionMetrics confusion_metrics(const std::vector<PredictionRecord>& preds, const LabelList& labels,
                                   double threshold = 0.5);

struct RocResult {
    /// First threshold is +inf (the (0, 0) corner).
    std::vector<double> thresholds;
    std::vector<double> fpr;
    std::vector<double> tpr;
    double auc = 0.0;
    std::size_t positives = 0;
    std::size_t negatives = 0;
};

/// ROC over distinct score thresholds with trapezoid AUC (ties count 1/2).
/// Throws SingleClass if either class is absent.
RocResult roc_from_scores(std::span<const double> scores, const std::vector<bool>& positive);

/// Joins predictions with labels, then roc_from_scores. Throws MissingPrediction.
RocResult roc_auc(const std::vector<PredictionRecord>& preds, const LabelList& labels);

/// Testbed entry as described by its manifest.
struct TestbedEntry {
    std::string id;
    BifurcationLabel label = BifurcationLabel::Unlabeled;
    std::size_t eval_start_index = 0;
};

/// ROC over a testbed. A prediction declaring a different eval window than
/// the manifest raises WindowMismatch.
RocResult evaluate_testbed(const std::vector<PredictionRecord>& preds, const std::vector<TestbedEntry>& testbed);

} // namespace ews
