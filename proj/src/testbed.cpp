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

#include "ewspipe/testbed.hpp"

#include "ewspipe/error.hpp"
#include "ewspipe/parallel.hpp"
#include "ewspipe/stability.hpp"

#include <cmath>
#include <limits>

namespace ews::testbed {

void SeirParams::validate() const
{
    if (!(Lambda > 0.0 && beta >= 0.0 && d > 0.0 && kappa > 0.0 && gamma_ > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "SEIR rates must be positive");
    }
    for (double s : sigma) {
        if (!(s >= 0.0)) throw Error(ErrorKind::InvalidArgument, "SEIR noise intensities must be nonnegative");
    }
}

void SeirxParams::validate() const
{
    if (!(mu > 0.0 && N > 0.0 && beta > 0.0 && progression_rate > 0.0 && gamma_ > 0.0 && kappa_social > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "SEIRx rates must be positive");
    }
    if (!(delta >= 0.0 && omega >= 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "SEIRx delta and omega must be nonnegative");
    }
    for (double s : sigma) {
        if (!(s >= 0.0)) throw Error(ErrorKind::InvalidArgument, "SEIRx noise amplitudes must be nonnegative");
    }
}

double seir_bifurcation_point(const SeirParams& p) noexcept
{
    return p.d * (p.d + p.kappa) * (p.d + p.gamma_) / (p.kappa * p.Lambda);
}

double seir_r0(const SeirParams& p) noexcept
{
    return p.kappa * p.beta * p.Lambda / (p.d * (p.d + p.kappa) * (p.d + p.gamma_));
}

std::vector<double> parameter_vector(const SeirParams& p)
{
    return {p.beta, p.Lambda, p.d, p.kappa, p.gamma_};
}

std::vector<double> seir_disease_free(const SeirParams& p)
{
    return {p.Lambda / p.d, 0.0, 0.0, 0.0};
}

SdeModelSpec make_seir_sde(const SeirParams& p)
{
    SdeModelSpec spec;
    spec.dimension = 4;
    spec.noise_channels = 4;
    spec.parameter_names = {"beta", "Lambda", "d", "kappa", "gamma"};
    spec.nonneg_clip = {true, true, true, true};
    spec.drift = [](std::span<const double> x, double, std::span<const double> q, std::span<double> rate) {
        const double beta = q[0], Lambda = q[1], d = q[2], kappa = q[3], gamma = q[4];
        const double S = x[0], E = x[1], I = x[2], R = x[3];
        rate[0] = Lambda - beta * S * I - d * S;
        rate[1] = beta * S * I - (d + kappa) * E;
        rate[2] = kappa * E - (d + gamma) * I;
        rate[3] = gamma * I - d * R;
    };
    spec.diffusion = [sigma = p.sigma](std::span<const double>, double, std::span<const double>, std::span<double> g) {
        std::ranges::fill(g, 0.0);
        for (std::size_t i = 0; i < 4; ++i) g[i * 4 + i] = sigma[i];
    };
    return spec;
}

std::vector<double> parameter_vector(const SeirxParams& p)
{
    return {p.omega, p.mu, p.N, p.beta, p.progression_rate, p.gamma_, p.kappa_social, p.delta};
}

std::vector<double> seirx_pre_outbreak(const SeirxParams&)
{
    // x = 1 gives S = N (1 - x) = 0, hence E = I = 0, and R = x.
    return {0.0, 0.0, 0.0, 1.0, 1.0};
}

SdeModelSpec make_seirx_sde(const SeirxParams& p)
{
    SdeModelSpec spec;
    spec.dimension = 5;
    spec.noise_channels = 5;
    spec.parameter_names = {"omega", "mu", "N", "beta", "progression_rate", "gamma", "kappa_social", "delta"};
    spec.nonneg_clip = {true, true, true, true, true};
    const double inf = std::numeric_limits<double>::infinity();
    spec.upper_clip = {inf, inf, inf, inf, 1.0};
    spec.drift = [](std::span<const double> s, double, std::span<const double> q, std::span<double> rate) {
        const double omega = q[0], mu = q[1], N = q[2], beta = q[3], prog = q[4], gamma = q[5], kappa = q[6],
                     delta = q[7];
        const double S = s[0], E = s[1], I = s[2], R = s[3], x = s[4];
        const double infection = beta * S * I / N;
        rate[0] = mu * N * (1.0 - x) - mu * S - infection;
        rate[1] = infection - (prog + mu) * E;
        rate[2] = prog * E - (gamma + mu) * I;
        rate[3] = mu * x + gamma * I - mu * R;
        rate[4] = kappa * x * (1.0 - x) * (-omega + I + delta * (2.0 * x - 1.0));
    };
    spec.diffusion = [sigma = p.sigma](std::span<const double>, double, std::span<const double>, std::span<double> g) {
        std::ranges::fill(g, 0.0);
        for (std::size_t i = 0; i < 5; ++i) g[i * 5 + i] = sigma[i];
    };
    return spec;
}

double seirx_critical_omega(const SeirxParams& p)
{
    p.validate();
    const auto spec = make_seirx_sde(p);
    auto params = parameter_vector(p);
    auto equilibrium = [&p](std::span<const double>) { return seirx_pre_outbreak(p); };
    return locate_threshold(spec, equilibrium, params, 0, 0.0, +1.0);
}

std::string_view to_string(Model model) noexcept
{
    return model == Model::Seir ? "seir" : "seirx";
}

Model parse_model(std::string_view text)
{
    if (text == "seir") return Model::Seir;
    if (text == "seirx") return Model::Seirx;
    throw Error(ErrorKind::InvalidArgument, "unknown testbed model '" + std::string(text) + "'");
}

std::size_t eval_start_index(std::size_t length, double eval_fraction)
{
    const auto window = static_cast<std::size_t>(std::floor(eval_fraction * static_cast<double>(length) + 1e-9));
    return length - std::min(window, length);
}

namespace {

double draw(RngStream& rng, const std::array<double, 2>& range)
{
    return rng.uniform(range[0], range[1]);
}

struct Draw {
    SdeModelSpec spec;
    std::vector<double> x0;
    std::vector<double> params;
    double start = 0.0;
    double critical = 0.0;
    std::size_t output_index = 2;
    std::map<std::string, double> record;
};

Draw draw_seir(RngStream& rng, const TestbedConfig& c)
{
    SeirParams p;
    p.Lambda = c.seir_Lambda;
    p.d = draw(rng, c.seir_d);
    p.kappa = draw(rng, c.seir_kappa);
    p.gamma_ = draw(rng, c.seir_gamma);
    const double s = draw(rng, c.seir_sigma);
    p.sigma = {s, s, s, s};
    const double beta_c = seir_bifurcation_point(p);
    p.beta = rng.uniform(c.ramp_start_frac_min, c.ramp_start_frac_max) * beta_c;
    Draw out{make_seir_sde(p), seir_disease_free(p), parameter_vector(p), p.beta, beta_c, 2, {}};
    out.record = {{"Lambda", p.Lambda}, {"d", p.d}, {"kappa", p.kappa}, {"gamma", p.gamma_},
                  {"sigma", s},         {"beta0", p.beta}, {"beta_c", beta_c}};
    return out;
}

Draw draw_seirx(RngStream& rng, const TestbedConfig& c)
{
    SeirxParams p;
    p.mu = draw(rng, c.seirx_mu);
    p.beta = draw(rng, c.seirx_beta);
    p.progression_rate = draw(rng, c.seirx_progression);
    p.gamma_ = draw(rng, c.seirx_gamma);
    p.kappa_social = draw(rng, c.seirx_kappa);
    p.delta = draw(rng, c.seirx_delta);
    const double s = draw(rng, c.seirx_sigma);
    p.sigma = {s, s, s, s, s};
    const double omega_c = seirx_critical_omega(p);
    p.omega = rng.uniform(c.ramp_start_frac_min, c.ramp_start_frac_max) * omega_c;
    Draw out{make_seirx_sde(p), seirx_pre_outbreak(p), parameter_vector(p), p.omega, omega_c, 2, {}};
    out.record = {{"mu", p.mu},
                  {"N", p.N},
                  {"beta", p.beta},
                  {"progression_rate", p.progression_rate},
                  {"gamma", p.gamma_},
                  {"kappa_social", p.kappa_social},
                  {"delta", p.delta},
                  {"sigma", s},
                  {"omega0", p.omega},
                  {"omega_c", omega_c}};
    return out;
}

} // namespace

TestbedSeries generate_testbed_series(Model model, std::uint64_t master_seed, std::size_t index,
                                      const TestbedConfig& config)
{
    RngStream param_rng(master_seed, index, 0);
    const bool forced = index % 2 == 0;
    const auto& plan = config.plan;
    for (std::uint32_t attempt = 0; attempt < 1000; ++attempt) {
        Draw d = model == Model::Seir ? draw_seir(param_rng, config) : draw_seirx(param_rng, config);
        std::optional<RampSchedule> ramp;
        if (forced) ramp = RampSchedule{0, d.start, d.critical, plan.burn_in_steps, plan.total_steps()};
        auto noise_rng = param_rng.substream(attempt + 1);
        try {
            const auto traj = simulate_recorded(d.spec, d.x0, d.params, ramp, plan, noise_rng);
            TestbedSeries out;
            out.series = TimeSeries({}, forced ? BifurcationLabel::Transcritical : BifurcationLabel::Null,
                                    traj.column(d.output_index));
            out.series.dt = plan.dt * static_cast<double>(plan.record_every);
            out.series.meta["eval_start_index"] =
                std::to_string(eval_start_index(out.series.size(), config.eval_fraction));
            out.series.meta["model"] = std::string(to_string(model));
            out.attempts = attempt + 1;
            out.params = std::move(d.record);
            return out;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::NonFiniteState) throw;
        }
    }
    throw Error(ErrorKind::NonFiniteState, "testbed series " + std::to_string(index) + " kept diverging");
}

std::vector<TestbedSeries> generate_testbed(Model model, std::uint64_t master_seed, const TestbedConfig& config,
                                            std::size_t threads)
{
    if (config.n_series == 0 || config.n_series % 2 != 0) {
        throw Error(ErrorKind::InvalidArgument, "testbed size must be a positive even number");
    }
    std::vector<TestbedSeries> out(config.n_series);
    parallel_for(config.n_series, threads,
                 [&](std::size_t i) { out[i] = generate_testbed_series(model, master_seed, i, config); });
    return out;
}

} // namespace ews::testbed
