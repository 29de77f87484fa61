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
#include "ewspipe/sde.hpp"
#include "ewspipe/time_series.hpp"

#include <string_view>

namespace ews::nisir {

enum class NoiseKind { White, Env, Dem };
std::string_view to_string(NoiseKind kind) noexcept;
/// Accepts "white", "env", "dem".
NoiseKind parse_noise_kind(std::string_view text);

/// SIR with births/deaths, optional case importation, and one noise mechanism.
///
///   dS = (mu N - beta S I / N - mu S) dt + ...
///   dI = (beta S I / N - (gamma + mu) I + import_rate) dt + ...
///
/// Noise per kind:
///   White  constant amplitude sigma on S and I (two channels)
///   Env    sigma * beta S I / N on the transmission flux, -S / +I (one channel)
///   Dem    sigma * chemical-Langevin: one channel per event type
///          (birth, infection, susceptible death, removal, importation)
struct SirParams {
    double beta = 0.1;         ///< 1/day
    double gamma = 0.2;        ///< 1/day
    double mu = 0.02;          ///< 1/day
    double N = 10'000.0;       ///< individuals
    double sigma = 0.0;        ///< White: individuals/sqrt(day); Env: 1/sqrt(day); Dem: dimensionless scale
    NoiseKind noise_kind = NoiseKind::White;
    double import_rate = 0.0;  ///< individuals/day

    /// Throws InvalidArgument on negative rates, N < 100 or sigma < 0.
    void validate() const;
};

/// Transmission rate where R0 = beta / (gamma + mu) reaches 1.
double sir_bifurcation_point(const SirParams& p) noexcept;

/// SDE of the model. State (S, I), both clamped at 0. Parameter vector is
/// {beta, gamma, mu, N, sigma, import_rate}; beta (index 0) is the ramped one.
SdeModelSpec make_sir_sde(NoiseKind kind);
std::vector<double> parameter_vector(const SirParams& p);

struct NisirOptions {
    SimulationPlan plan{0.1, 2000, 1500, 10};
    /// Initial I; negative means the deterministic quasi-equilibrium
    /// import_rate / (gamma + mu - beta), or 1 without importation.
    double initial_infected = -1.0;
};

/// One series of the I compartment. `p.beta` is the starting rate beta0 and
/// must be below the threshold. Forced runs ramp beta linearly to the
/// threshold so it is reached one step after the final record; null runs
/// hold beta0. Throws ExtinctSeries when the retained window is all zero.
TimeSeries generate_nisir_series(const SirParams& p, bool forced, RngStream& rng, const NisirOptions& options = {});

/// Draw ranges for randomized parameters.
struct SirRanges {
    double log10_N_min = 3.0;
    double log10_N_max = 5.0;
    double gamma_min = 0.05;
    double gamma_max = 0.25;
    double mu_min = 0.005;
    double mu_max = 0.05;
    double beta0_frac_min = 0.3;
    double beta0_frac_max = 0.8;
    /// White: sigma = U[min, max] * sqrt(N).
    double white_min = 0.01;
    double white_max = 0.1;
    double env_min = 0.05;
    double env_max = 0.3;
    double dem_scale = 1.0;
    double import_rate = 1.0;
};

SirParams draw_sir_params(NoiseKind kind, RngStream& rng, const SirRanges& ranges = {});

} // namespace ews::nisir
