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

#include "ewspipe/stability.hpp"

#include "ewspipe/error.hpp"

#include <algorithm>
#include <cmath>

namespace ews {

Eigen::MatrixXd drift_jacobian(const SdeModelSpec& spec, std::span<const double> state,
                               std::span<const double> params, double rel_step)
{
    const std::size_t n = spec.dimension;
    Eigen::MatrixXd jac(n, n);
    std::vector<double> probe(state.begin(), state.end());
    std::vector<double> plus(n), minus(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double h = rel_step * std::max(1.0, std::abs(state[j]));
        probe[j] = state[j] + h;
        spec.drift(probe, 0.0, params, plus);
        probe[j] = state[j] - h;
        spec.drift(probe, 0.0, params, minus);
        probe[j] = state[j];
        for (std::size_t i = 0; i < n; ++i) {
            jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (plus[i] - minus[i]) / (2.0 * h);
        }
    }
    return jac;
}

double dominant_real_part(const Eigen::MatrixXd& m)
{
    Eigen::EigenSolver<Eigen::MatrixXd> solver(m, false);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorKind::InvalidArgument, "eigenvalue computation failed");
    }
    return solver.eigenvalues().real().maxCoeff();
}

double bisect_sign_change(const std::function<double(double)>& lead, double stable, double unstable,
                          double tolerance)
{
    double a = stable;
    double b = unstable;
    while (std::abs(b - a) > tolerance) {
        const double mid = 0.5 * (a + b);
        if (mid == a || mid == b) break;
        if (lead(mid) < 0.0) {
            a = mid;
        } else {
            b = mid;
        }
    }
    return 0.5 * (a + b);
}

double locate_threshold(const SdeModelSpec& spec,
                        const std::function<std::vector<double>(std::span<const double>)>& equilibrium,
                        std::vector<double> params, std::size_t index, double stable_value, double direction,
                        double tolerance)
{
    auto lead = [&](double value) {
        params[index] = value;
        const auto eq = equilibrium(params);
        return dominant_real_part(drift_jacobian(spec, eq, params));
    };
    if (!(lead(stable_value) < 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "threshold search must start from a stable parameter value");
    }
    double offset = std::max(1e-3, 0.1 * std::abs(stable_value));
    double unstable = stable_value + direction * offset;
    int doublings = 0;
    while (lead(unstable) < 0.0) {
        if (++doublings > 200) {
            throw Error(ErrorKind::InvalidArgument, "no stability change found along the search direction");
        }
        offset *= 2.0;
        unstable = stable_value + direction * offset;
    }
    const double scale = std::max(std::abs(stable_value), std::abs(unstable));
    return bisect_sign_change(lead, stable_value, unstable, tolerance * std::max(1.0, scale));
}

} // namespace ews
