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

#include "ewspipe/nisir.hpp"

#include "ewspipe/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ews::nisir {

std::string_view to_string(NoiseKind kind) noexcept
{
    switch (kind) {
    case NoiseKind::White: return "white";
    case NoiseKind::Env: return "env";
    case NoiseKind::Dem: return "dem";
    }
    return "white";
}

NoiseKind parse_noise_kind(std::string_view text)
{
    if (text == "white") return NoiseKind::White;
    if (text == "env") return NoiseKind::Env;
    if (text == "dem") return NoiseKind::Dem;
    throw Error(ErrorKind::InvalidArgument, "unknown noise kind '" + std::string(text) + "'");
}

void SirParams::validate() const
{
    if (!(beta >= 0.0) || !(gamma > 0.0) || !(mu >= 0.0) || !(import_rate >= 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "SIR rates must be nonnegative (gamma positive)");
    }
    if (!(N >= 100.0)) throw Error(ErrorKind::InvalidArgument, "SIR population must be at least 100");
    if (!(sigma >= 0.0)) throw Error(ErrorKind::InvalidArgument, "SIR noise intensity must be nonnegative");
}

double sir_bifurcation_point(const SirParams& p) noexcept
{
    return p.gamma + p.mu;
}

std::vector<double> parameter_vector(const SirParams& p)
{
    return {p.beta, p.gamma, p.mu, p.N, p.sigma, p.import_rate};
}

namespace {

enum Param : std::size_t { kBeta, kGamma, kMu, kN, kSigma, kImport };

void sir_drift(std::span<const double> x, double, std::span<const double> p, std::span<double> rate)
{
    const double S = x[0];
    const double I = x[1];
    const double infection = p[kBeta] * S * I / p[kN];
    rate[0] = p[kMu] * p[kN] - infection - p[kMu] * S;
    rate[1] = infection - (p[kGamma] + p[kMu]) * I + p[kImport];
}

} // namespace

SdeModelSpec make_sir_sde(NoiseKind kind)
{
    SdeModelSpec spec;
    spec.dimension = 2;
    spec.parameter_names = {"beta", "gamma", "mu", "N", "sigma", "import_rate"};
    spec.nonneg_clip = {true, true};
    spec.drift = sir_drift;
    switch (kind) {
    case NoiseKind::White:
        spec.noise_channels = 2;
        spec.diffusion = [](std::span<const double>, double, std::span<const double> p, std::span<double> g) {
            g[0] = p[kSigma];
            g[1] = 0.0;
            g[2] = 0.0;
            g[3] = p[kSigma];
        };
        break;
    case NoiseKind::Env:
        spec.noise_channels = 1;
        spec.diffusion = [](std::span<const double> x, double, std::span<const double> p, std::span<double> g) {
            const double flux = p[kSigma] * p[kBeta] * x[0] * x[1] / p[kN];
            g[0] = -flux;
            g[1] = flux;
        };
        break;
    case NoiseKind::Dem:
        spec.noise_channels = 5;
        spec.diffusion = [](std::span<const double> x, double, std::span<const double> p, std::span<double> g) {
            const double s = p[kSigma];
            const double S = x[0];
            const double I = x[1];
            const double birth = std::sqrt(p[kMu] * p[kN]);
            const double infection = std::sqrt(p[kBeta] * S * I / p[kN]);
            const double death_s = std::sqrt(p[kMu] * S);
            const double removal = std::sqrt((p[kGamma] + p[kMu]) * I);
            const double import = std::sqrt(p[kImport]);
            // Row S.
            g[0] = s * birth;
            g[1] = -s * infection;
            g[2] = -s * death_s;
            g[3] = 0.0;
            g[4] = 0.0;
            // Row I.
            g[5] = 0.0;
            g[6] = s * infection;
            g[7] = 0.0;
            g[8] = -s * removal;
            g[9] = s * import;
        };
        break;
    }
    return spec;
}

TimeSeries generate_nisir_series(const SirParams& p, bool forced, RngStream& rng, const NisirOptions& options)
{
    p.validate();
    const double beta_c = sir_bifurcation_point(p);
    if (!(p.beta < beta_c)) {
        throw Error(ErrorKind::InvalidArgument, "beta0 must lie below the threshold");
    }
    const auto& plan = options.plan;
    double i0 = options.initial_infected;
    if (i0 < 0.0) {
        i0 = p.import_rate > 0.0 ? p.import_rate / (beta_c - p.beta) : 1.0;
    }
    const std::array<double, 2> x0{p.N, i0};
    const auto params = parameter_vector(p);
    std::optional<RampSchedule> ramp;
    if (forced) {
        ramp = RampSchedule{0, p.beta, beta_c, plan.burn_in_steps, plan.total_steps()};
    }
    const auto traj = simulate_recorded(make_sir_sde(p.noise_kind), x0, params, ramp, plan, rng);
    auto infected = traj.column(1);
    if (std::ranges::all_of(infected, [](double v) { return v == 0.0; })) {
        throw Error(ErrorKind::ExtinctSeries, "I is identically zero over the retained window");
    }

    TimeSeries ts({}, forced ? BifurcationLabel::Transcritical : BifurcationLabel::Null, std::move(infected));
    ts.dt = plan.dt * static_cast<double>(plan.record_every);
    return ts;
}

SirParams draw_sir_params(NoiseKind kind, RngStream& rng, const SirRanges& r)
{
    SirParams p;
    p.noise_kind = kind;
    p.N = std::round(std::pow(10.0, rng.uniform(r.log10_N_min, r.log10_N_max)));
    p.gamma = rng.uniform(r.gamma_min, r.gamma_max);
    p.mu = rng.uniform(r.mu_min, r.mu_max);
    p.beta = rng.uniform(r.beta0_frac_min, r.beta0_frac_max) * sir_bifurcation_point(p);
    const double u = rng.uniform();
    switch (kind) {
    case NoiseKind::White: p.sigma = (r.white_min + (r.white_max - r.white_min) * u) * std::sqrt(p.N); break;
    case NoiseKind::Env: p.sigma = r.env_min + (r.env_max - r.env_min) * u; break;
    case NoiseKind::Dem: p.sigma = r.dem_scale; break;
    }
    p.import_rate = r.import_rate;
    return p;
}

} // namespace ews::nisir
