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

#include "ewspipe/evaluate.hpp"

#include "ewspipe/error.hpp"
#include "ewspipe/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace ews {

SplitRatios parse_ratios(const std::string& text)
{
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            parts.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw Error(ErrorKind::InvalidArgument, "--ratios: cannot parse '" + item + "'");
        }
    }
    if (parts.size() != 3) throw Error(ErrorKind::InvalidArgument, "--ratios needs three comma-separated values");
    return {parts[0], parts[1], parts[2]};
}

SplitAssignment stratified_split(const LabelList& labels, const SplitRatios& ratios, std::uint64_t seed)
{
    if (labels.empty()) throw Error(ErrorKind::EmptyDataset, "no labeled series to split");
    const std::array<double, 3> r{ratios.train, ratios.val, ratios.test};
    if (std::ranges::any_of(r, [](double v) { return !(v >= 0.0); }) ||
        std::abs(r[0] + r[1] + r[2] - 1.0) > 1e-9) {
        throw Error(ErrorKind::InvalidArgument, "split ratios must be nonnegative and sum to 1");
    }

    std::map<BifurcationLabel, std::vector<std::string>> by_class;
    for (const auto& [id, label] : labels) by_class[label].push_back(id);

    SplitAssignment out;
    out.ratios = ratios;
    out.seed = seed;
    if (by_class.size() < 2) out.warning = "only one class present";

    for (auto& [label, ids] : by_class) {
        std::ranges::sort(ids);
        RngStream rng(seed, static_cast<std::uint64_t>(label));
        shuffle(ids, rng);

        const std::size_t n = ids.size();
        std::array<std::size_t, 3> count{};
        std::array<double, 3> remainder{};
        std::size_t assigned = 0;
        for (std::size_t k = 0; k < 3; ++k) {
            const double exact = r[k] * static_cast<double>(n);
            // Guard against 0.8 * 1000 = 799.9999...
            count[k] = static_cast<std::size_t>(std::floor(exact + 1e-9));
            remainder[k] = exact - static_cast<double>(count[k]);
            assigned += count[k];
        }
        std::array<std::size_t, 3> order{0, 1, 2};
        std::ranges::stable_sort(order, [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
        for (std::size_t k = 0; assigned < n; k = (k + 1) % 3, ++assigned) ++count[order[k]];

        auto it = ids.begin();
        for (std::size_t k = 0; k < 3; ++k) {
            auto& target = k == 0 ? out.train : (k == 1 ? out.val : out.test);
            target.insert(target.end(), it, it + static_cast<std::ptrdiff_t>(count[k]));
            it += static_cast<std::ptrdiff_t>(count[k]);
        }
    }
    std::ranges::sort(out.train);
    std::ranges::sort(out.val);
    std::ranges::sort(out.test);
    return out;
}

namespace {

std::unordered_map<std::string, const PredictionRecord*> index_predictions(const std::vector<PredictionRecord>& preds)
{
    std::unordered_map<std::string, const PredictionRecord*> by_id;
    for (const auto& p : preds) {
        if (!std::isfinite(p.p_transcritical)) {
            throw Error(ErrorKind::InvalidArgument, "non-finite probability for '" + p.id + "'");
        }
        by_id[p.id] = &p;
    }
    return by_id;
}

bool is_binary(BifurcationLabel label)
{
    return label == BifurcationLabel::Transcritical || label == BifurcationLabel::Null;
}

} // namespace

ConfusionMetrics confusion_metrics(const std::vector<PredictionRecord>& preds, const LabelList& labels,
                                   double threshold)
{
    const auto by_id = index_predictions(preds);
    ConfusionMetrics m;
    for (const auto& [id, label] : labels) {
        if (!is_binary(label)) continue;
        const auto it = by_id.find(id);
        if (it == by_id.end()) throw Error(ErrorKind::MissingPrediction, id);
        const bool predicted = it->second->p_transcritical >= threshold;
        const bool actual = label == BifurcationLabel::Transcritical;
        if (predicted && actual) ++m.tp;
        else if (predicted) ++m.fp;
        else if (actual) ++m.fn;
        else ++m.tn;
    }
    const std::size_t total = m.tp + m.fp + m.tn + m.fn;
    if (total == 0) throw Error(ErrorKind::EmptyDataset, "no transcritical/null labels to score");
    m.accuracy = static_cast<double>(m.tp + m.tn) / static_cast<double>(total);
    m.precision = m.tp + m.fp ? static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp) : 0.0;
    m.recall = m.tp + m.fn ? static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn) : 0.0;
    m.f1 = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
    return m;
}

RocResult roc_from_scores(std::span<const double> scores, const std::vector<bool>& positive)
{
    if (scores.size() != positive.size()) throw Error(ErrorKind::InvalidArgument, "scores and labels differ in length");
    RocResult roc;
    for (bool p : positive) (p ? roc.positives : roc.negatives) += 1;
    if (roc.positives == 0 || roc.negatives == 0) {
        throw Error(ErrorKind::SingleClass, "ROC needs both classes (positives=" + std::to_string(roc.positives) +
                                                ", negatives=" + std::to_string(roc.negatives) + ")");
    }
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::ranges::sort(order, [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    roc.thresholds.push_back(std::numeric_limits<double>::infinity());
    roc.fpr.push_back(0.0);
    roc.tpr.push_back(0.0);
    // Integer trapezoid sum: sum over steps of d_fp * (tp_prev + tp_now).
    double twice_area = 0.0;
    std::size_t tp = 0, fp = 0;
    for (std::size_t k = 0; k < order.size();) {
        const double s = scores[order[k]];
        const std::size_t tp_prev = tp, fp_prev = fp;
        while (k < order.size() && scores[order[k]] == s) {
            (positive[order[k]] ? tp : fp) += 1;
            ++k;
        }
        twice_area += static_cast<double>(fp - fp_prev) * static_cast<double>(tp + tp_prev);
        roc.thresholds.push_back(s);
        roc.fpr.push_back(static_cast<double>(fp) / static_cast<double>(roc.negatives));
        roc.tpr.push_back(static_cast<double>(tp) / static_cast<double>(roc.positives));
    }
    roc.auc = twice_area / (2.0 * static_cast<double>(roc.positives) * static_cast<double>(roc.negatives));
    return roc;
}

RocResult roc_auc(const std::vector<PredictionRecord>& preds, const LabelList& labels)
{
    const auto by_id = index_predictions(preds);
    std::vector<double> scores;
    std::vector<bool> positive;
    for (const auto& [id, label] : labels) {
        if (!is_binary(label)) continue;
        const auto it = by_id.find(id);
        if (it == by_id.end()) throw Error(ErrorKind::MissingPrediction, id);
        scores.push_back(it->second->p_transcritical);
        positive.push_back(label == BifurcationLabel::Transcritical);
    }
    return roc_from_scores(scores, positive);
}

RocResult evaluate_testbed(const std::vector<PredictionRecord>& preds, const std::vector<TestbedEntry>& testbed)
{
    const auto by_id = index_predictions(preds);
    LabelList labels;
    for (const auto& entry : testbed) {
        const auto it = by_id.find(entry.id);
        if (it == by_id.end()) throw Error(ErrorKind::MissingPrediction, entry.id);
        const auto& declared = it->second->eval_start_index;
        if (declared && *declared != entry.eval_start_index) {
            throw Error(ErrorKind::WindowMismatch, entry.id + ": prediction window starts at " +
                                                       std::to_string(*declared) + ", manifest says " +
                                                       std::to_string(entry.eval_start_index));
        }
        labels.emplace_back(entry.id, entry.label);
    }
    return roc_auc(preds, labels);
}

} // namespace ews
