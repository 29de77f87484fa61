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

#include "ewspipe/sde.hpp"

#include <Eigen/Dense>

#include <functional>
#include <span>

namespace ews {

/// Central-difference Jacobian of the drift of `spec` at `state`.
Eigen::MatrixXd drift_jacobian(const SdeModelSpec& spec, std::span<const double> state,
                               std::span<const double> params, double rel_step = 1e-6);

/// Largest real part over the spectrum of a square matrix.
double dominant_real_part(const Eigen::MatrixXd& m);

/// Bisects `lead` (negative at `stable`, nonnegative at `unstable`) to a
/// bracket narrower than `tolerance` and returns its midpoint.
double bisect_sign_change(const std::function<double(double)>& lead, double stable, double unstable,
                          double tolerance);

/// Parameter value where the dominant eigenvalue of the drift Jacobian,
/// evaluated at equilibrium(params), crosses zero. `stable_value` must give
/// a stable Jacobian; the search walks in `direction` (+1/-1), doubling the
/// offset until the sign changes, then bisects.
double locate_threshold(const SdeModelSpec& spec, const std::function<std::vector<double>(std::span<const double>)>& equilibrium,
                        std::vector<double> params, std::size_t index, double stable_value, double direction,
                        double tolerance = 1e-13);

} // namespace ews
