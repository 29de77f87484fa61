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

#include "ewspipe/sde.hpp"

#include "ewspipe/error.hpp"

#include <algorithm>
#include <cmath>

namespace ews {

double RampSchedule::value_at(std::size_t step) const noexcept
{
    if (step <= start_step || end_step <= start_step) {
        return step <= start_step ? start_value : end_value;
    }
    if (step >= end_step) {
        return end_value;
    }
    const double f = static_cast<double>(step - start_step) / static_cast<double>(end_step - start_step);
    return (1.0 - f) * start_value + f * end_value;
}

std::vector<double> Trajectory::column(std::size_t j) const
{
    std::vector<double> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
        out[i] = data_[i * dim_ + j];
    }
    return out;
}

namespace {

/// Holds the per-run scratch buffers and advances one Euler-Maruyama step.
class Stepper {
public:
    Stepper(const SdeModelSpec& spec, std::span<const double> x0, std::span<const double> params,
            const std::optional<RampSchedule>& ramp, double dt, RngStream& rng)
        : spec_(spec)
        , ramp_(ramp)
        , dt_(dt)
        , sqrt_dt_(std::sqrt(dt))
        , rng_(rng)
        , state_(x0.begin(), x0.end())
        , params_(params.begin(), params.end())
        , rate_(spec.dimension)
        , amplitude_(spec.dimension * spec.noise_channels)
        , xi_(spec.noise_channels)
    {
        if (spec.dimension == 0 || !spec.drift) {
            throw Error(ErrorKind::InvalidArgument, "SDE spec needs a positive dimension and a drift");
        }
        if (x0.size() != spec.dimension) {
            throw Error(ErrorKind::InvalidArgument, "initial state has wrong dimension");
        }
        if (!(dt > 0.0)) {
            throw Error(ErrorKind::InvalidArgument, "dt must be positive");
        }
        if (ramp && ramp->parameter_index >= params_.size()) {
            throw Error(ErrorKind::InvalidArgument, "ramp parameter index out of range");
        }
        for (double v : state_) {
            if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "initial state is not finite");
        }
    }

    void step(std::size_t k)
    {
        if (ramp_) {
            params_[ramp_->parameter_index] = ramp_->value_at(k);
        }
        const double t = static_cast<double>(k) * dt_;
        spec_.drift(state_, t, params_, rate_);
        const std::size_t m = spec_.noise_channels;
        if (spec_.diffusion && m > 0) {
            spec_.diffusion(state_, t, params_, amplitude_);
            for (auto& z : xi_) z = rng_.normal();
        }
        for (std::size_t i = 0; i < spec_.dimension; ++i) {
            double noise = 0.0;
            if (spec_.diffusion) {
                for (std::size_t j = 0; j < m; ++j) {
                    noise += amplitude_[i * m + j] * xi_[j];
                }
            }
            double next = state_[i] + rate_[i] * dt_ + noise * sqrt_dt_;
            if (!spec_.nonneg_clip.empty() && spec_.nonneg_clip[i] && next < 0.0) {
                next = 0.0;
            }
            if (!spec_.upper_clip.empty() && next > spec_.upper_clip[i]) {
                next = spec_.upper_clip[i];
            }
            if (!std::isfinite(next)) {
                throw Error(ErrorKind::NonFiniteState,
                            "component " + std::to_string(i) + " non-finite at step " + std::to_string(k));
            }
            state_[i] = next;
        }
    }

    std::span<const double> state() const noexcept { return state_; }

private:
    const SdeModelSpec& spec_;
    const std::optional<RampSchedule>& ramp_;
    double dt_;
    double sqrt_dt_;
    RngStream& rng_;
    std::vector<double> state_;
    std::vector<double> params_;
    std::vector<double> rate_;
    std::vector<double> amplitude_;
    std::vector<double> xi_;
};

} // namespace

Trajectory integrate_sde(const SdeModelSpec& spec, std::span<const double> x0, std::span<const double> params,
                         const std::optional<RampSchedule>& ramp, std::size_t n_steps, double dt, RngStream& rng)
{
    if (n_steps == 0) {
        throw Error(ErrorKind::InvalidArgument, "n_steps must be at least 1");
    }
    Stepper stepper(spec, x0, params, ramp, dt, rng);
    Trajectory out(n_steps, spec.dimension);
    for (std::size_t k = 0; k < n_steps; ++k) {
        stepper.step(k);
        std::ranges::copy(stepper.state(), out.row(k).begin());
    }
    return out;
}

Trajectory simulate_recorded(const SdeModelSpec& spec, std::span<const double> x0, std::span<const double> params,
                             const std::optional<RampSchedule>& ramp, const SimulationPlan& plan, RngStream& rng)
{
    if (plan.n_records == 0 || plan.record_every == 0) {
        throw Error(ErrorKind::InvalidArgument, "simulation plan records nothing");
    }
    Stepper stepper(spec, x0, params, ramp, plan.dt, rng);
    Trajectory out(plan.n_records, spec.dimension);
    std::size_t record = 0;
    const std::size_t total = plan.total_steps();
    for (std::size_t k = 0; k < total; ++k) {
        stepper.step(k);
        if (k >= plan.burn_in_steps && (k - plan.burn_in_steps + 1) % plan.record_every == 0) {
            std::ranges::copy(stepper.state(), out.row(record++).begin());
        }
    }
    return out;
}

} // namespace ews
