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

#include <stdexcept>
#include <string>
#include <string_view>

namespace ews {

enum class ErrorKind {
    InvalidArgument,
    NonFiniteState,
    ContinuationLost,
    ExtinctSeries,
    InvalidCensor,
    ZeroMean,
    DegenerateWindow,
    WindowTooShort,
    EmptyDataset,
    MissingPrediction,
    SingleClass,
    WindowMismatch,
    FormatError,
    LengthMismatch,
    NonMonotonicDates,
    NegativeCounts,
    IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Exception carrying a machine-readable kind. `what()` renders as
/// "<Kind>: <detail>", which is also the CLI's one-line error format.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& detail);

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorKind kind_;
    std::string detail_;
};

} // namespace ews
