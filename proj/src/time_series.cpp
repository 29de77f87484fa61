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

#include "ewspipe/time_series.hpp"

#include "ewspipe/error.hpp"

#include <cmath>

namespace ews {

std::string_view to_string(BifurcationLabel label) noexcept
{
    switch (label) {
    case BifurcationLabel::Transcritical: return "transcritical";
    case BifurcationLabel::Null: return "null";
    case BifurcationLabel::Fold: return "fold";
    case BifurcationLabel::Hopf: return "hopf";
    case BifurcationLabel::Unlabeled: return "unlabeled";
    }
    return "unlabeled";
}

BifurcationLabel parse_label(std::string_view text)
{
    if (text == "transcritical") return BifurcationLabel::Transcritical;
    if (text == "null") return BifurcationLabel::Null;
    if (text == "fold") return BifurcationLabel::Fold;
    if (text == "hopf") return BifurcationLabel::Hopf;
    if (text == "unlabeled" || text.empty()) return BifurcationLabel::Unlabeled;
    throw Error(ErrorKind::FormatError, "unknown label '" + std::string(text) + "'");
}

TimeSeries::TimeSeries(std::string id_, BifurcationLabel label_, std::vector<double> values_)
    : id(std::move(id_))
    , label(label_)
    , values(std::move(values_))
    , mask(values.size(), true)
{
}

std::size_t TimeSeries::informative_count() const noexcept
{
    std::size_t n = 0;
    for (bool m : mask) {
        n += m ? 1 : 0;
    }
    return n;
}

std::vector<double> TimeSeries::informative_values() const
{
    std::vector<double> out;
    out.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (mask[i]) out.push_back(values[i]);
    }
    return out;
}

std::vector<std::size_t> TimeSeries::informative_indices() const
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (mask[i]) out.push_back(i);
    }
    return out;
}

std::optional<std::size_t> TimeSeries::eval_start_index() const
{
    const auto it = meta.find("eval_start_index");
    if (it == meta.end()) return std::nullopt;
    return static_cast<std::size_t>(std::stoull(it->second));
}

void TimeSeries::validate() const
{
    if (values.size() != mask.size()) {
        throw Error(ErrorKind::InvalidArgument, "series '" + id + "': values and mask differ in length");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (mask[i] && !std::isfinite(values[i])) {
            throw Error(ErrorKind::InvalidArgument, "series '" + id + "': non-finite value at " + std::to_string(i));
        }
        if (!mask[i] && values[i] != 0.0) {
            throw Error(ErrorKind::InvalidArgument, "series '" + id + "': censored entry not zero at " + std::to_string(i));
        }
    }
}

} // namespace ews
