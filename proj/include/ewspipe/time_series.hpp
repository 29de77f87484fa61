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

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ews {

/// Class tag of a series. Fold and Hopf only occur inside the polynomial
/// generator, which discards them before anything is emitted.
enum class BifurcationLabel { Transcritical, Null, Fold, Hopf, Unlabeled };

std::string_view to_string(BifurcationLabel label) noexcept;
/// Parses the lowercase file spelling ("transcritical", "null", ...).
BifurcationLabel parse_label(std::string_view text);

/// One daily trajectory with a validity mask.
///
/// Invariants: values.size() == mask.size(); entries with mask == false hold
/// exactly 0.0; entries with mask == true are finite.
struct TimeSeries {
    std::string id;
    BifurcationLabel label = BifurcationLabel::Unlabeled;
    std::vector<double> values;
    std::vector<bool> mask;
    double dt = 1.0;
    std::map<std::string, std::string> meta;

    TimeSeries() = default;
    /// Fully informative series.
    TimeSeries(std::string id, BifurcationLabel label, std::vector<double> values);

    std::size_t size() const noexcept { return values.size(); }
    std::size_t informative_count() const noexcept;
    /// Values at mask-true positions, in order.
    std::vector<double> informative_values() const;
    /// Indices of mask-true positions, in order.
    std::vector<std::size_t> informative_indices() const;

    /// Eval-window start stored in meta["eval_start_index"], if any.
    std::optional<std::size_t> eval_start_index() const;

    /// Throws InvalidArgument when an invariant above is broken.
    void validate() const;

    bool operator==(const TimeSeries&) const = default;
};

} // namespace ews
