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

#include "ewspipe/ewi.hpp"
#include "ewspipe/io.hpp"
#include "ewspipe/nisir.hpp"
#include "ewspipe/preprocess.hpp"
#include "ewspipe/rapo.hpp"
#include "ewspipe/testbed.hpp"

#include <cstdint>
#include <vector>

namespace ews::pipeline {

inline constexpr const char* kGeneratorVersion = "1.0.0";
inline constexpr const char* kRngName = "philox4x32-10 (key=seed, ctr={block,substream,stream_lo,stream_hi}); box-muller";

// Config <-> JSON. from_json starts from defaults and overrides present keys.
json to_json(const SimulationPlan& plan);
SimulationPlan plan_from_json(const json& j, SimulationPlan defaults = {});
json to_json(const rapo::RapoConfig& c);
rapo::RapoConfig rapo_config_from_json(const json& j);
struct NisirConfig {
    nisir::SirRanges ranges{};
    nisir::NisirOptions options{};
};
json to_json(const NisirConfig& c);
NisirConfig nisir_config_from_json(const json& j);
json to_json(const testbed::TestbedConfig& c);
testbed::TestbedConfig testbed_config_from_json(const json& j);
json to_json(const PreprocessConfig& c);
PreprocessConfig preprocess_config_from_json(const json& j);
json to_json(const EwiConfig& c);
EwiConfig ewi_config_from_json(const json& j);

/// n_pairs forced/null pairs; series 2i is forced, 2i+1 null.
Dataset generate_rapo_dataset(std::size_t n_pairs, std::uint64_t seed, const rapo::RapoConfig& config,
                              std::size_t threads = 1);

/// n_per_kind series per noise kind (even count, alternating forced/null).
/// Stream id of series i of kind k is (k << 32) | i.
Dataset generate_nisir_dataset(const std::vector<nisir::NoiseKind>& kinds, std::size_t n_per_kind, std::uint64_t seed,
                               const NisirConfig& config, std::size_t threads = 1);

Dataset generate_testbed_dataset(testbed::Model model, std::uint64_t seed, const testbed::TestbedConfig& config,
                                 std::size_t threads = 1);

/// Applies preprocess_series to every series with stream (seed, index).
/// Series whose informative mean is zero are dropped and listed in the
/// manifest under "dropped". The input manifest is embedded as "source".
Dataset preprocess_dataset(const Dataset& input, const PreprocessConfig& config, std::uint64_t seed,
                           std::size_t threads = 1);

/// Rebuilds a dataset from its manifest alone.
Dataset replay_manifest(const json& manifest, std::size_t threads = 1);

/// EWI baseline over a dataset. Series with an eval window are cut to it
/// first; unless the manifest marks the data as preprocessed, each scored
/// segment is mean-normalized and Lowess-detrended.
std::vector<PredictionRecord> score_dataset(const Dataset& data, const EwiConfig& ewi, const LowessConfig& lowess,
                                            std::size_t threads = 1);

/// Whether a manifest (or any ancestor) came out of preprocess_dataset.
bool is_preprocessed(const json& manifest);

} // namespace ews::pipeline
