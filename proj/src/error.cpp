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

namespace ews {

std::string_view to_string(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NonFiniteState: return "NonFiniteState";
    case ErrorKind::ContinuationLost: return "ContinuationLost";
    case ErrorKind::ExtinctSeries: return "ExtinctSeries";
    case ErrorKind::InvalidCensor: return "InvalidCensor";
    case ErrorKind::ZeroMean: return "ZeroMean";
    case ErrorKind::DegenerateWindow: return "DegenerateWindow";
    case ErrorKind::WindowTooShort: return "WindowTooShort";
    case ErrorKind::EmptyDataset: return "EmptyDataset";
    case ErrorKind::MissingPrediction: return "MissingPrediction";
    case ErrorKind::SingleClass: return "SingleClass";
    case ErrorKind::WindowMismatch: return "WindowMismatch";
    case ErrorKind::FormatError: return "FormatError";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::NonMonotonicDates: return "NonMonotonicDates";
    case ErrorKind::NegativeCounts: return "NegativeCounts";
    case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + ": " + detail)
    , kind_(kind)
    , detail_(detail)
{
}

} // namespace ews
