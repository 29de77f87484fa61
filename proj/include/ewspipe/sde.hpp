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

#include "ewspipe/rng.hpp"

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ews {

/// Drift f(x, t, p) written into `rate` (length = dimension).
using DriftFn = std::function<void(std::span<const double> state, double t, std::span<const double> params,
                                   std::span<double> rate)>;
/// Diffusion G(x, t, p) written row-major into `amplitude`
/// (dimension rows x noise_channels columns).
using DiffusionFn = std::function<void(std::span<const double> state, double t, std::span<const double> params,
                                       std::span<double> amplitude)>;

/// An Ito SDE  dX = f(X, t, p) dt + G(X, t, p) dW.
struct SdeModelSpec {
    std::size_t dimension = 1;
    std::size_t noise_channels = 1;
    DriftFn drift;
    DiffusionFn diffusion;
    std::vector<std::string> parameter_names;
    /// Components clamped at 0 after every step. Empty means no clamping.
    std::vector<bool> nonneg_clip;
    /// Optional per-component upper clamp; empty means unbounded.
    std::vector<double> upper_clip;
};

/// Linear ramp of one parameter across a step range, flat outside it.
struct RampSchedule {
    std::size_t parameter_index = 0;
    double start_value = 0.0;
    double end_value = 0.0;
    std::size_t start_step = 0;
    std::size_t end_step = 0;

    double value_at(std::size_t step) const noexcept;
};

/// Row-major (steps x dimension) state record.
class Trajectory {
public:
    Trajectory() = default;
    Trajectory(std::size_t rows, std::size_t dimension)
        : rows_(rows), dim_(dimension), data_(rows * dimension) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t dimension() const noexcept { return dim_; }
    std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * dim_, dim_}; }
    std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * dim_, dim_}; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * dim_ + j]; }
    /// One component over all rows.
    std::vector<double> column(std::size_t j) const;
    const std::vector<double>& data() const noexcept { return data_; }

private:
    std::size_t rows_ = 0;
    std::size_t dim_ = 0;
    std::vector<double> data_;
};

/// Fixed-step Euler-Maruyama integration; row k holds the state after step k.
///
///     x <- x + f dt + G sqrt(dt) xi,   xi ~ N(0, I) per channel
///
/// followed by clamping. When `ramp` is set, params[ramp->parameter_index]
/// is overridden by ramp->value_at(step) for every step. Throws
/// NonFiniteState as soon as a component stops being finite.
Trajectory integrate_sde(const SdeModelSpec& spec, std::span<const double> x0, std::span<const double> params,
                         const std::optional<RampSchedule>& ramp, std::size_t n_steps, double dt, RngStream& rng);

/// Step/recording layout for long simulations.
struct SimulationPlan {
    double dt = 0.1;
    /// Steps integrated before the first recorded row (not stored).
    std::size_t burn_in_steps = 0;
    std::size_t n_records = 1500;
    /// A row is stored after every `record_every` steps.
    std::size_t record_every = 10;

    std::size_t total_steps() const noexcept { return burn_in_steps + n_records * record_every; }
    /// Global step index whose completion produces record k.
    std::size_t step_of_record(std::size_t k) const noexcept { return burn_in_steps + (k + 1) * record_every - 1; }
};

/// Same scheme as integrate_sde, storing only the rows selected by `plan`.
/// Ramp steps are global step indices (burn-in included).
Trajectory simulate_recorded(const SdeModelSpec& spec, std::span<const double> x0, std::span<const double> params,
                             const std::optional<RampSchedule>& ramp, const SimulationPlan& plan, RngStream& rng);

} // namespace ews
