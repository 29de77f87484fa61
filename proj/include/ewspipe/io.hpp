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

#include "ewspipe/evaluate.hpp"
#include "ewspipe/time_series.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace ews {

namespace fs = std::filesystem;
using nlohmann::json;

/// A series collection and the manifest describing how it was produced.
struct Dataset {
    std::vector<TimeSeries> series;
    json manifest = json::object();
};

/// Shortest-exact decimal form with 17 significant digits ("%.17g").
std::string format_double(double v);
/// Strict parse of a whole field; throws FormatError.
double parse_double(std::string_view text);

/// Writes `fn(tmp)` into a sibling temporary directory and renames it onto
/// `target` only after fn returns, so readers never see a partial directory.
/// An existing target is replaced.
void write_directory_atomically(const fs::path& target, const std::function<void(const fs::path&)>& fn);

/// Same idea for a single file.
void write_file_atomically(const fs::path& target, const std::string& contents);

/// Directory layout:
///   series.csv     header "id,label,v0,...,v{L-1}", one series per row
///   mask.csv       header "id,m0,...,m{L-1}", 1 = informative
///   labels.csv     header "id,label"
///   manifest.json  provenance; series[i].meta / series[i].dt restore TimeSeries fields
/// Throws LengthMismatch when series lengths differ. Atomic.
void write_dataset(const fs::path& dir, const Dataset& data);

/// The manifest as written to disk: per-series id, label, dt, meta and
/// eval_start_index filled in from the series, plus length and count.
json complete_manifest(const Dataset& data);

/// Serialises into an existing directory without the atomic wrapper.
void write_dataset_files(const fs::path& dir, const Dataset& data);

/// Inverse of write_dataset. Throws FormatError naming file and line.
Dataset read_dataset(const fs::path& dir);

/// Header "id,p_transcritical", plus ",eval_start_index" if any record has one.
void write_predictions(const fs::path& path, const std::vector<PredictionRecord>& preds);
std::vector<PredictionRecord> read_predictions(const fs::path& path);

/// Header "id,label".
void write_labels(const fs::path& path, const LabelList& labels);
LabelList read_labels(const fs::path& path);
LabelList labels_of(const std::vector<TimeSeries>& series);

/// "threshold,fpr,tpr" rows; the first threshold is written as "inf".
std::string roc_csv(const RocResult& roc);
json roc_summary(const RocResult& roc);

/// Testbed entries from a dataset manifest (series[i].eval_start_index).
std::vector<TestbedEntry> testbed_entries(const json& manifest);

/// Column layout of an empirical case table.
struct EmpiricalColumns {
    std::string time_column = "date";
    std::string count_column = "cases";
    /// Optional grouping column; each group becomes its own series family.
    std::string group_column;
    /// Gaps of up to this many missing days are forward-filled.
    int max_fill = 3;
};

/// Reads a delimited table of daily counts. Times are ISO dates
/// (YYYY-MM-DD) or integer day numbers. Each group is split into segments at
/// gaps longer than max_fill; shorter gaps repeat the last count and are
/// tallied in meta["fill_count"]. Throws NonMonotonicDates, NegativeCounts
/// or FormatError.
std::vector<TimeSeries> import_empirical_csv(const fs::path& path, const EmpiricalColumns& columns = {});

} // namespace ews
