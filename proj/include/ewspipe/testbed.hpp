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

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace ews::testbed {

/// SEIR with recruitment and one additive noise term per compartment.
struct SeirParams {
    double Lambda = 1.0; ///< recruitment rate
    double beta = 0.1;   ///< transmission rate
    double d = 0.1;      ///< natural death rate
    double kappa = 0.5;  ///< 1 / mean exposed period
    double gamma_ = 0.3; ///< 1 / mean infectious period
    std::array<double, 4> sigma{};

    void validate() const;
};

/// SEIR coupled to vaccinating sentiment x.
struct SeirxParams {
    double mu = 0.02;
    double N = 1.0;
    double beta = 1.0;
    double progression_rate = 0.2; ///< exposed -> infectious
    double gamma_ = 0.2;
    double kappa_social = 1.0;     ///< social learning rate
    double delta = 0.4;            ///< injunctive-norm strength
    double omega = 0.1;            ///< perceived relative risk of vaccination
    std::array<double, 5> sigma{};

    void validate() const;
};

/// Transmission rate at which R0 = kappa beta Lambda / (d (d + kappa) (d + gamma)) = 1.
double seir_bifurcation_point(const SeirParams& p) noexcept;
double seir_r0(const SeirParams& p) noexcept;

/// State (S, E, I, R), all clamped at 0. Parameters {beta, Lambda, d, kappa, gamma}.
SdeModelSpec make_seir_sde(const SeirParams& p);
std::vector<double> parameter_vector(const SeirParams& p);
/// Disease-free equilibrium (Lambda / d, 0, 0, 0).
std::vector<double> seir_disease_free(const SeirParams& p);

/// State (S, E, I, R, x) with S..R clamped at 0 and x kept in [0, 1].
/// Parameters {omega, mu, N, beta, progression_rate, gamma, kappa_social, delta}.
SdeModelSpec make_seirx_sde(const SeirxParams& p);
std::vector<double> parameter_vector(const SeirxParams& p);
/// Disease-free, fully vaccinating equilibrium (x = 1).
std::vector<double> seirx_pre_outbreak(const SeirxParams& p);
/// Omega at which the dominant eigenvalue of the drift Jacobian at the
/// pre-outbreak equilibrium crosses zero, located by bisection.
double seirx_critical_omega(const SeirxParams& p);

enum class Model { Seir, Seirx };
std::string_view to_string(Model model) noexcept;
Model parse_model(std::string_view text);

struct TestbedConfig {
    std::size_t n_series = 20;
    SimulationPlan plan{0.1, 1000, 1500, 10};
    double eval_fraction = 0.2;
    double ramp_start_frac_min = 0.3;
    double ramp_start_frac_max = 0.8;
    // SEIR draw ranges.
    double seir_Lambda = 1.0;
    std::array<double, 2> seir_d{0.05, 0.2};
    std::array<double, 2> seir_kappa{0.2, 1.0};
    std::array<double, 2> seir_gamma{0.1, 0.5};
    std::array<double, 2> seir_sigma{0.005, 0.05};
    // SEIRx draw ranges.
    std::array<double, 2> seirx_mu{0.01, 0.03};
    std::array<double, 2> seirx_beta{0.5, 1.5};
    std::array<double, 2> seirx_progression{0.1, 0.5};
    std::array<double, 2> seirx_gamma{0.1, 0.3};
    std::array<double, 2> seirx_kappa{0.5, 2.0};
    std::array<double, 2> seirx_delta{0.2, 0.6};
    std::array<double, 2> seirx_sigma{0.001, 0.01};
};

/// First index of the trailing evaluation window.
std::size_t eval_start_index(std::size_t length, double eval_fraction);

struct TestbedSeries {
    TimeSeries series;
    std::size_t attempts = 0;
    std::map<std::string, double> params;
};

/// Series `index` of a testbed: even indices forced, odd null. Parameters
/// come from substream 0 of (master_seed, index); each attempt integrates
/// on its own substream and a NonFiniteState triggers a redraw.
TestbedSeries generate_testbed_series(Model model, std::uint64_t master_seed, std::size_t index,
                                      const TestbedConfig& config = {});

/// The full testbed: config.n_series series, half per class, output I.
std::vector<TestbedSeries> generate_testbed(Model model, std::uint64_t master_seed, const TestbedConfig& config = {},
                                            std::size_t threads = 1);

} // namespace ews::testbed
