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
#include "ewspipe/rapo.hpp"

#include "normal_forms.hpp"

#include <doctest.h>

#include <cmath>

using namespace ews;
using namespace ews::rapo;

namespace {

BifurcationFinding classify(const PolySystem2D& sys, std::uint64_t seed)
{
    RngStream rng(seed, 0);
    const auto eq = find_equilibrium(sys, rng);
    REQUIRE(eq.has_value());
    return hunt_bifurcation(sys, *eq);
}

} // namespace

TEST_SUITE("rapo") {

TEST_CASE("rhs and jacobian follow the monomial order")
{
    std::array<double, kMonomials> cx{}, cy{};
    for (std::size_t i = 0; i < kMonomials; ++i) {
        cx[i] = 0.1 * static_cast<double>(i + 1);
        cy[i] = -0.05 * static_cast<double>(i + 2);
    }
    const auto sys = PolySystem2D::from_coefficients(cx, cy, 3);
    const double x = 0.7, y = -1.3;
    const std::array<double, kMonomials> m{1, x, y, x * x, x * y, y * y, x * x * x, x * x * y, x * y * y, y * y * y};
    double fx = 0, fy = 0;
    for (std::size_t i = 0; i < kMonomials; ++i) {
        fx += cx[i] * m[i];
        fy += cy[i] * m[i];
    }
    const auto f = sys.rhs({x, y});
    CHECK(f[0] == doctest::Approx(fx).epsilon(1e-14));
    CHECK(f[1] == doctest::Approx(fy).epsilon(1e-14));

    // Analytic Jacobian against central differences.
    const double h = 1e-6;
    const auto J = sys.jacobian({x, y});
    const auto fxp = sys.rhs({x + h, y}), fxm = sys.rhs({x - h, y});
    const auto fyp = sys.rhs({x, y + h}), fym = sys.rhs({x, y - h});
    CHECK(J[0][0] == doctest::Approx((fxp[0] - fxm[0]) / (2 * h)).epsilon(1e-7));
    CHECK(J[1][0] == doctest::Approx((fxp[1] - fxm[1]) / (2 * h)).epsilon(1e-7));
    CHECK(J[0][1] == doctest::Approx((fyp[0] - fym[0]) / (2 * h)).epsilon(1e-7));
    CHECK(J[1][1] == doctest::Approx((fyp[1] - fym[1]) / (2 * h)).epsilon(1e-7));
}

TEST_CASE("eigenvalues of 2x2 matrices")
{
    auto ev = eigenvalues({{{0.0, -2.0}, {2.0, 0.0}}});
    CHECK(ev[0].real() == doctest::Approx(0.0));
    CHECK(std::abs(ev[0].imag()) == doctest::Approx(2.0));
    ev = eigenvalues({{{-1.0, 0.0}, {0.0, -3.0}}});
    CHECK(ev[0].real() == doctest::Approx(-1.0));
    CHECK(ev[1].real() == doctest::Approx(-3.0));
}

TEST_CASE("forcing ties move together")
{
    RngStream rng(1, 1);
    auto sys = normal_form::hopf(rng);
    sys.set_forcing(0.25);
    CHECK(sys.coefficient(1) == 0.25);
    CHECK(sys.coefficient(kMonomials + 2) == 0.25);
}

TEST_CASE("random draws respect bounds and activity")
{
    RngStream rng(2, 0);
    for (int k = 0; k < 200; ++k) {
        const auto sys = draw_random_system(rng);
        CHECK(sys.active[sys.forcing_index]);
        for (std::size_t i = 0; i < kCoefficients; ++i) {
            const double c = sys.coefficient(i);
            CHECK(std::abs(c) <= 1.0);
            if (!sys.active[i]) CHECK(c == 0.0);
        }
    }
}

TEST_CASE("newton converges on a known root")
{
    std::array<double, kMonomials> cx{}, cy{};
    cx[0] = -1.0; // x^2 - 1
    cx[3] = 1.0;
    cy[2] = -1.0; // -y
    const auto sys = PolySystem2D::from_coefficients(cx, cy, 0);
    const auto root = newton_solve(sys, {2.0, 0.3});
    REQUIRE(root.has_value());
    CHECK((*root)[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs((*root)[1]) < 1e-10);
}

TEST_CASE("fold normal form")
{
    RngStream rng(11, 0);
    for (int k = 0; k < 10; ++k) {
        const auto sys = normal_form::fold(rng);
        const auto f = classify(sys, 100 + k);
        CHECK(f.kind == BifurcationKind::Fold);
        CHECK(std::abs(f.critical_value) < 1e-6);
    }
}

TEST_CASE("transcritical normal form")
{
    RngStream rng(12, 0);
    for (int k = 0; k < 10; ++k) {
        const auto sys = normal_form::transcritical(rng);
        const auto f = classify(sys, 200 + k);
        CHECK(f.kind == BifurcationKind::Transcritical);
        CHECK(std::abs(f.critical_value) < 1e-7);
    }
}

TEST_CASE("hopf normal form")
{
    RngStream rng(13, 0);
    for (int k = 0; k < 10; ++k) {
        const auto sys = normal_form::hopf(rng);
        const auto f = classify(sys, 300 + k);
        CHECK(f.kind == BifurcationKind::Hopf);
        CHECK(std::abs(f.critical_value) < 1e-7);
    }
}

TEST_CASE("pitchfork is not reported as transcritical")
{
    // dx = mu x - x^3, dy = -y with mu < 0.
    std::array<double, kMonomials> cx{}, cy{};
    cx[1] = -0.5;
    cx[6] = -1.0;
    cy[2] = -1.0;
    const auto f = classify(PolySystem2D::from_coefficients(cx, cy, 1), 5);
    CHECK(f.kind != BifurcationKind::Transcritical);
}

TEST_CASE("pair generation ramps to the critical value")
{
    RngStream rng(21, 0);
    const auto sys = normal_form::transcritical(rng);
    RngStream eq_rng(1, 0);
    const auto eq = find_equilibrium(sys, eq_rng);
    REQUIRE(eq.has_value());
    const auto finding = hunt_bifurcation(sys, *eq);
    REQUIRE(finding.kind == BifurcationKind::Transcritical);
    RngStream a(3, 1), b(3, 2);
    SimulationPlan plan{0.1, 100, 200, 10};
    const auto [forced, null] = generate_rapo_pair(sys, eq->location, finding, 0.01, a, b, plan);
    CHECK(forced.label == BifurcationLabel::Transcritical);
    CHECK(null.label == BifurcationLabel::Null);
    CHECK(forced.size() == 200);
    CHECK(null.size() == 200);
}

TEST_CASE("stream-derived pairs are reproducible")
{
    RapoConfig cfg;
    cfg.plan = {0.1, 100, 300, 10};
    const auto a = generate_rapo_pair_from_stream(77, 3, cfg);
    const auto b = generate_rapo_pair_from_stream(77, 3, cfg);
    CHECK(a.forced.values == b.forced.values);
    CHECK(a.null.values == b.null.values);
    CHECK(a.record.noise_sigma >= 0.01);
    CHECK(a.record.noise_sigma < 0.1);
    const auto c = generate_rapo_pair_from_stream(77, 4, cfg);
    CHECK(a.forced.values != c.forced.values);
}

}
