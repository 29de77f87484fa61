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
#include <complex>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace ews::rapo {

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;

/// Monomials in coefficient order: 1, x, y, x^2, xy, y^2, x^3, x^2y, xy^2, y^3.
inline constexpr std::size_t kMonomials = 10;
/// Coefficients 0..9 belong to dx/dt, 10..19 to dy/dt.
inline constexpr std::size_t kCoefficients = 2 * kMonomials;

/// Two-dimensional cubic polynomial vector field with one forcing coefficient.
struct PolySystem2D {
    std::array<double, kMonomials> coeffs_x{};
    std::array<double, kMonomials> coeffs_y{};
    std::array<bool, kCoefficients> active{};
    /// Flat coefficient index (see kCoefficients) that is ramped.
    std::size_t forcing_index = 0;
    /// Extra coefficients pinned to the forcing value (normal forms such as
    /// Hopf move the same parameter in both equations). Empty for random draws.
    std::vector<std::size_t> forcing_ties;

    double coefficient(std::size_t flat) const noexcept;
    void set_coefficient(std::size_t flat, double value) noexcept;
    double forcing_value() const noexcept { return coefficient(forcing_index); }
    /// Sets the forcing coefficient and its ties; marks them active.
    void set_forcing(double value) noexcept;

    Vec2 rhs(const Vec2& z) const noexcept;
    /// Analytic Jacobian of rhs.
    Mat2 jacobian(const Vec2& z) const noexcept;

    /// Builds a fully specified system from the two coefficient rows;
    /// nonzero coefficients are active.
    static PolySystem2D from_coefficients(const std::array<double, kMonomials>& cx,
                                          const std::array<double, kMonomials>& cy, std::size_t forcing_index,
                                          std::vector<std::size_t> ties = {});
};

struct EquilibriumReport {
    Vec2 location{};
    Mat2 jacobian{};
    std::array<std::complex<double>, 2> eigenvalues{};
    bool stable = false;

    double dominant_real() const noexcept { return std::max(eigenvalues[0].real(), eigenvalues[1].real()); }
};

enum class BifurcationKind { None, Fold, Hopf, Transcritical };
std::string_view to_string(BifurcationKind kind) noexcept;

struct BifurcationFinding {
    BifurcationKind kind = BifurcationKind::None;
    double critical_value = 0.0;
    Vec2 equilibrium_at_critical{};
};

/// Eigenvalues of a real 2x2 matrix, ordered by descending real part.
std::array<std::complex<double>, 2> eigenvalues(const Mat2& m) noexcept;

/// Report (Jacobian, eigenvalues, stability) at a given point.
EquilibriumReport describe_point(const PolySystem2D& sys, const Vec2& z);

struct DrawOptions {
    double p_active = 0.5;
    double coeff_bound = 1.0;
};

/// Random system: each monomial active with probability p_active, active
/// coefficients uniform on [-bound, bound], both equations nonempty, forcing
/// index uniform over active coefficients.
PolySystem2D draw_random_system(RngStream& rng, const DrawOptions& options = {});

struct NewtonOptions {
    double tolerance = 1e-10; ///< on ||f||_inf
    int max_iterations = 100;
    double divergence_bound = 1e6;
};

/// Newton iteration from `start`; nullopt if it fails to reach tolerance.
std::optional<Vec2> newton_solve(const PolySystem2D& sys, const Vec2& start, const NewtonOptions& options = {});

struct EquilibriumOptions {
    int n_init = 20;
    double box = 3.0;
    NewtonOptions newton{};
};

/// First stable equilibrium reached from n_init uniform starts in
/// [-box, box]^2; nullopt when none converges to a stable one.
std::optional<EquilibriumReport> find_equilibrium(const PolySystem2D& sys, RngStream& rng,
                                                  const EquilibriumOptions& options = {});

struct HuntOptions {
    /// Sweep half-width around the initial coefficient.
    double delta = 5.0;
    /// Explicit sweep range; when set it replaces [c0 - delta, c0 + delta].
    std::optional<std::pair<double, double>> range;
    double bisection_tolerance = 1e-8;
    /// Largest accepted change of the dominant real part between sweep points.
    double max_eigen_jump = 0.1;
    /// Largest accepted equilibrium displacement between sweep points.
    double max_state_jump = 0.5;
    /// Initial continuation step as a fraction of the sweep half-range.
    double initial_step_fraction = 0.01;
    /// |dominant eigenvalue| accepted at a branch end for a fold.
    double fold_eigen_tolerance = 5e-2;
    /// |Im| below which an eigenvalue pair counts as real at a crossing.
    double imag_tolerance = 1e-6;
    /// Parameter offset used to probe branches on either side of a crossing.
    double probe_offset = 1e-3;
    NewtonOptions newton{};
};

/// Continues `eq` in both directions of the forcing coefficient and reports
/// the crossing nearest the initial value. Throws ContinuationLost when the
/// branch ends without a zero eigenvalue.
BifurcationFinding hunt_bifurcation(const PolySystem2D& sys, const EquilibriumReport& eq,
                                    const HuntOptions& options = {});

/// Forced and null simulations for a transcritical finding. The forced run
/// ramps the forcing coefficient from its current value to the critical
/// value so that it arrives exactly one step after the last record; the null
/// run holds it fixed. Output is the x coordinate.
std::pair<TimeSeries, TimeSeries> generate_rapo_pair(const PolySystem2D& sys, const Vec2& equilibrium,
                                                     const BifurcationFinding& finding, double noise_sigma,
                                                     RngStream& forced_rng, RngStream& null_rng,
                                                     const SimulationPlan& plan = {});

/// Additive-noise SDE of the system with the forcing coefficient as parameter 0.
SdeModelSpec make_sde(const PolySystem2D& sys, double noise_sigma);

struct RapoConfig {
    DrawOptions draw{};
    EquilibriumOptions equilibrium{};
    HuntOptions hunt{};
    double noise_min = 0.01;
    double noise_max = 0.1;
    SimulationPlan plan{0.1, 1000, 1500, 10};
    std::size_t max_attempts = 1'000'000;
};

/// Provenance of one emitted pair.
struct RapoRecord {
    std::size_t pair_index = 0;
    std::size_t attempts = 0;
    PolySystem2D system;
    double initial_value = 0.0;
    double critical_value = 0.0;
    Vec2 equilibrium{};
    double noise_sigma = 0.0;
};

struct RapoPairResult {
    TimeSeries forced;
    TimeSeries null;
    RapoRecord record;
};

/// Draw/hunt/simulate loop for one pair, using only streams derived from
/// (master_seed, pair_index). Fold, Hopf and None findings are discarded.
RapoPairResult generate_rapo_pair_from_stream(std::uint64_t master_seed, std::size_t pair_index,
                                              const RapoConfig& config);

} // namespace ews::rapo
