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

#include "ewspipe/error.hpp"
#include "ewspipe/sde.hpp"
#include "ewspipe/stability.hpp"

#include <doctest.h>

#include <cmath>

using namespace ews;

namespace {

SdeModelSpec ou_spec()
{
    SdeModelSpec s;
    s.dimension = 1;
    s.noise_channels = 1;
    s.parameter_names = {"theta", "sigma"};
    s.drift = [](std::span<const double> x, double, std::span<const double> p, std::span<double> r) {
        r[0] = -p[0] * x[0];
    };
    s.diffusion = [](std::span<const double>, double, std::span<const double> p, std::span<double> g) { g[0] = p[1]; };
    return s;
}

} // namespace

TEST_SUITE("sde") {

TEST_CASE("zero noise reduces to explicit Euler")
{
    auto spec = ou_spec();
    const std::array<double, 1> x0{2.0};
    const std::array<double, 2> p{0.5, 0.0};
    RngStream rng(1, 1);
    const auto traj = integrate_sde(spec, x0, p, std::nullopt, 100, 0.01, rng);
    double x = 2.0;
    for (std::size_t k = 0; k < 100; ++k) {
        x = x + (-0.5 * x) * 0.01;
        CHECK(traj(k, 0) == x);
    }
}

TEST_CASE("OU stationary variance")
{
    // Euler-Maruyama OU has stationary variance sigma^2 dt / (1 - (1 - theta dt)^2).
    auto spec = ou_spec();
    const double theta = 1.0, sigma = 0.5, dt = 0.01;
    const std::array<double, 1> x0{0.0};
    const std::array<double, 2> p{theta, sigma};
    RngStream rng(9, 0);
    const auto traj = integrate_sde(spec, x0, p, std::nullopt, 400000, dt, rng);
    double s = 0, s2 = 0;
    std::size_t n = 0;
    for (std::size_t k = 1000; k < traj.rows(); ++k) {
        s += traj(k, 0);
        s2 += traj(k, 0) * traj(k, 0);
        ++n;
    }
    const double var = s2 / n - (s / n) * (s / n);
    const double a = 1.0 - theta * dt;
    CHECK(var == doctest::Approx(sigma * sigma * dt / (1.0 - a * a)).epsilon(0.05));
}

TEST_CASE("clamping keeps components nonnegative")
{
    auto spec = ou_spec();
    spec.nonneg_clip = {true};
    const std::array<double, 1> x0{0.01};
    const std::array<double, 2> p{0.1, 1.0};
    RngStream rng(2, 0);
    const auto traj = integrate_sde(spec, x0, p, std::nullopt, 10000, 0.1, rng);
    for (double v : traj.data()) CHECK(v >= 0.0);
}

TEST_CASE("ramp endpoints and midpoint")
{
    RampSchedule r{0, 1.0, 3.0, 10, 20};
    CHECK(r.value_at(0) == 1.0);
    CHECK(r.value_at(10) == 1.0);
    CHECK(r.value_at(15) == 2.0);
    CHECK(r.value_at(20) == 3.0);
    CHECK(r.value_at(50) == 3.0);
}

TEST_CASE("ramp overrides the parameter each step")
{
    SdeModelSpec s;
    s.parameter_names = {"a"};
    s.drift = [](std::span<const double>, double, std::span<const double> p, std::span<double> r) { r[0] = p[0]; };
    s.diffusion = [](std::span<const double>, double, std::span<const double>, std::span<double> g) { g[0] = 0.0; };
    const std::array<double, 1> x0{0.0};
    const std::array<double, 1> p{100.0};
    RngStream rng(0, 0);
    const auto traj = integrate_sde(s, x0, p, RampSchedule{0, 0.0, 4.0, 0, 4}, 4, 1.0, rng);
    // Steps use a = 0, 1, 2, 3.
    CHECK(traj(0, 0) == 0.0);
    CHECK(traj(1, 0) == 1.0);
    CHECK(traj(2, 0) == 3.0);
    CHECK(traj(3, 0) == 6.0);
}

TEST_CASE("recorded rows match the full trajectory")
{
    auto spec = ou_spec();
    const std::array<double, 1> x0{1.0};
    const std::array<double, 2> p{0.3, 0.2};
    SimulationPlan plan{0.1, 7, 20, 5};
    RngStream a(4, 4), b(4, 4);
    const auto full = integrate_sde(spec, x0, p, std::nullopt, plan.total_steps(), plan.dt, a);
    const auto rec = simulate_recorded(spec, x0, p, std::nullopt, plan, b);
    REQUIRE(rec.rows() == 20);
    for (std::size_t k = 0; k < 20; ++k) CHECK(rec(k, 0) == full(plan.step_of_record(k), 0));
}

TEST_CASE("non-finite state is reported")
{
    SdeModelSpec s;
    s.parameter_names = {};
    s.drift = [](std::span<const double> x, double, std::span<const double>, std::span<double> r) {
        r[0] = x[0] * x[0];
    };
    s.diffusion = [](std::span<const double>, double, std::span<const double>, std::span<double> g) { g[0] = 0.0; };
    const std::array<double, 1> x0{10.0};
    RngStream rng(0, 0);
    try {
        integrate_sde(s, x0, std::span<const double>(), std::nullopt, 1000, 1.0, rng);
        FAIL("expected NonFiniteState");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NonFiniteState);
    }
}

TEST_CASE("threshold search on a linear system")
{
    // dx = (a - 2) x has its eigenvalue cross zero at a = 2.
    SdeModelSpec s;
    s.parameter_names = {"a"};
    s.drift = [](std::span<const double> x, double, std::span<const double> p, std::span<double> r) {
        r[0] = (p[0] - 2.0) * x[0];
    };
    s.diffusion = [](std::span<const double>, double, std::span<const double>, std::span<double> g) { g[0] = 0.0; };
    const double a = locate_threshold(s, [](std::span<const double>) { return std::vector<double>{0.0}; }, {0.0}, 0,
                                      0.5, 1.0);
    CHECK(a == doctest::Approx(2.0).epsilon(1e-10));
}

}
