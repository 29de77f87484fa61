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

#include "ewspipe/rapo.hpp"

#include "ewspipe/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ews::rapo {

namespace {

using Monomials = std::array<double, kMonomials>;

Monomials monomials(double x, double y) noexcept
{
    return {1.0, x, y, x * x, x * y, y * y, x * x * x, x * x * y, x * y * y, y * y * y};
}

Monomials monomials_dx(double x, double y) noexcept
{
    return {0.0, 1.0, 0.0, 2.0 * x, y, 0.0, 3.0 * x * x, 2.0 * x * y, y * y, 0.0};
}

Monomials monomials_dy(double x, double y) noexcept
{
    return {0.0, 0.0, 1.0, 0.0, x, 2.0 * y, 0.0, x * x, 2.0 * x * y, 3.0 * y * y};
}

double dot(const Monomials& a, const Monomials& b) noexcept
{
    double s = 0.0;
    for (std::size_t i = 0; i < kMonomials; ++i) {
        s += a[i] * b[i];
    }
    return s;
}

double distance(const Vec2& a, const Vec2& b) noexcept
{
    return std::max(std::abs(a[0] - b[0]), std::abs(a[1] - b[1]));
}

} // namespace

std::string_view to_string(BifurcationKind kind) noexcept
{
    switch (kind) {
    case BifurcationKind::None: return "none";
    case BifurcationKind::Fold: return "fold";
    case BifurcationKind::Hopf: return "hopf";
    case BifurcationKind::Transcritical: return "transcritical";
    }
    return "none";
}

double PolySystem2D::coefficient(std::size_t flat) const noexcept
{
    return flat < kMonomials ? coeffs_x[flat] : coeffs_y[flat - kMonomials];
}

void PolySystem2D::set_coefficient(std::size_t flat, double value) noexcept
{
    if (flat < kMonomials) {
        coeffs_x[flat] = value;
    } else {
        coeffs_y[flat - kMonomials] = value;
    }
}

void PolySystem2D::set_forcing(double value) noexcept
{
    set_coefficient(forcing_index, value);
    active[forcing_index] = true;
    for (auto idx : forcing_ties) {
        set_coefficient(idx, value);
        active[idx] = true;
    }
}

Vec2 PolySystem2D::rhs(const Vec2& z) const noexcept
{
    const auto m = monomials(z[0], z[1]);
    return {dot(coeffs_x, m), dot(coeffs_y, m)};
}

Mat2 PolySystem2D::jacobian(const Vec2& z) const noexcept
{
    const auto mx = monomials_dx(z[0], z[1]);
    const auto my = monomials_dy(z[0], z[1]);
    return {{{dot(coeffs_x, mx), dot(coeffs_x, my)}, {dot(coeffs_y, mx), dot(coeffs_y, my)}}};
}

PolySystem2D PolySystem2D::from_coefficients(const Monomials& cx, const Monomials& cy, std::size_t forcing_index,
                                             std::vector<std::size_t> ties)
{
    PolySystem2D sys;
    sys.coeffs_x = cx;
    sys.coeffs_y = cy;
    for (std::size_t i = 0; i < kMonomials; ++i) {
        sys.active[i] = cx[i] != 0.0;
        sys.active[kMonomials + i] = cy[i] != 0.0;
    }
    sys.forcing_index = forcing_index;
    sys.forcing_ties = std::move(ties);
    sys.active[forcing_index] = true;
    for (auto idx : sys.forcing_ties) sys.active[idx] = true;
    return sys;
}

std::array<std::complex<double>, 2> eigenvalues(const Mat2& m) noexcept
{
    const double half_trace = 0.5 * (m[0][0] + m[1][1]);
    const double half_diff = 0.5 * (m[0][0] - m[1][1]);
    const double disc = half_diff * half_diff + m[0][1] * m[1][0];
    if (disc >= 0.0) {
        const double root = std::sqrt(disc);
        return {std::complex<double>(half_trace + root, 0.0), std::complex<double>(half_trace - root, 0.0)};
    }
    const double root = std::sqrt(-disc);
    return {std::complex<double>(half_trace, root), std::complex<double>(half_trace, -root)};
}

EquilibriumReport describe_point(const PolySystem2D& sys, const Vec2& z)
{
    EquilibriumReport rep;
    rep.location = z;
    rep.jacobian = sys.jacobian(z);
    rep.eigenvalues = eigenvalues(rep.jacobian);
    rep.stable = rep.eigenvalues[0].real() < 0.0 && rep.eigenvalues[1].real() < 0.0;
    return rep;
}

PolySystem2D draw_random_system(RngStream& rng, const DrawOptions& options)
{
    PolySystem2D sys;
    auto draw_row = [&](std::array<double, kMonomials>& row, std::size_t offset) {
        for (;;) {
            bool any = false;
            for (std::size_t i = 0; i < kMonomials; ++i) {
                const bool on = rng.bernoulli(options.p_active);
                const double c = rng.uniform(-options.coeff_bound, options.coeff_bound);
                sys.active[offset + i] = on;
                row[i] = on ? c : 0.0;
                any = any || on;
            }
            if (any) return;
        }
    };
    draw_row(sys.coeffs_x, 0);
    draw_row(sys.coeffs_y, kMonomials);

    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < kCoefficients; ++i) {
        if (sys.active[i]) active.push_back(i);
    }
    sys.forcing_index = active[rng.below(active.size())];
    return sys;
}

std::optional<Vec2> newton_solve(const PolySystem2D& sys, const Vec2& start, const NewtonOptions& options)
{
    Vec2 z = start;
    for (int it = 0; it <= options.max_iterations; ++it) {
        const Vec2 f = sys.rhs(z);
        if (!std::isfinite(f[0]) || !std::isfinite(f[1])) return std::nullopt;
        if (std::max(std::abs(f[0]), std::abs(f[1])) <= options.tolerance) return z;
        if (it == options.max_iterations) break;
        const Mat2 j = sys.jacobian(z);
        const double det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if (det == 0.0 || !std::isfinite(det)) return std::nullopt;
        const double dx = (-f[0] * j[1][1] + f[1] * j[0][1]) / det;
        const double dy = (-f[1] * j[0][0] + f[0] * j[1][0]) / det;
        z = {z[0] + dx, z[1] + dy};
        if (!(std::abs(z[0]) < options.divergence_bound && std::abs(z[1]) < options.divergence_bound)) {
            return std::nullopt;
        }
    }
    return std::nullopt;
}

std::optional<EquilibriumReport> find_equilibrium(const PolySystem2D& sys, RngStream& rng,
                                                  const EquilibriumOptions& options)
{
    std::optional<EquilibriumReport> found;
    // All starts are drawn even after a hit so the stream position does not
    // depend on where the first stable root appears.
    for (int i = 0; i < options.n_init; ++i) {
        const Vec2 start{rng.uniform(-options.box, options.box), rng.uniform(-options.box, options.box)};
        if (found) continue;
        if (auto root = newton_solve(sys, start, options.newton)) {
            auto rep = describe_point(sys, *root);
            if (rep.stable) found = rep;
        }
    }
    return found;
}

namespace {

struct BranchPoint {
    double c = 0.0;
    Vec2 z{};
    EquilibriumReport rep;
    double lead = 0.0;
};

enum class SweepEnd { Reached, Crossing, BranchEnd };

struct SweepResult {
    SweepEnd end = SweepEnd::Reached;
    BranchPoint before; ///< last point with negative dominant real part
    BranchPoint after;  ///< first point with nonnegative dominant real part (Crossing only)
};

BranchPoint make_point(const PolySystem2D& sys, double c, const Vec2& z)
{
    BranchPoint p;
    p.c = c;
    p.z = z;
    p.rep = describe_point(sys, z);
    p.lead = p.rep.dominant_real();
    return p;
}

class Continuation {
public:
    Continuation(const PolySystem2D& sys, const HuntOptions& options)
        : sys_(sys), opt_(options) {}

    /// Equilibrium at forcing value c continued from `from`, or nullopt.
    std::optional<BranchPoint> solve_near(double c, const Vec2& guess, const BranchPoint& from)
    {
        sys_.set_forcing(c);
        auto root = newton_solve(sys_, guess, opt_.newton);
        if (!root && distance(guess, from.z) > 0.0) {
            root = newton_solve(sys_, from.z, opt_.newton);
        }
        if (!root || distance(*root, from.z) > opt_.max_state_jump) return std::nullopt;
        auto p = make_point(sys_, c, *root);
        if (std::abs(p.lead - from.lead) > opt_.max_eigen_jump) return std::nullopt;
        return p;
    }

    SweepResult sweep(const BranchPoint& start, double target, double half_width)
    {
        SweepResult result;
        BranchPoint cur = start;
        std::optional<BranchPoint> prev;
        const double dir = target >= start.c ? 1.0 : -1.0;
        const double h0 = dir * std::max(opt_.initial_step_fraction * half_width, opt_.bisection_tolerance);
        double h = h0;
        while (cur.c != target) {
            double c_try = cur.c + h;
            if ((dir > 0 && c_try > target) || (dir < 0 && c_try < target)) c_try = target;
            Vec2 guess = cur.z;
            if (prev && prev->c != cur.c) {
                const double s = (c_try - cur.c) / (cur.c - prev->c);
                guess = {cur.z[0] + s * (cur.z[0] - prev->z[0]), cur.z[1] + s * (cur.z[1] - prev->z[1])};
            }
            if (auto next = solve_near(c_try, guess, cur)) {
                if (next->lead >= 0.0) {
                    result.end = SweepEnd::Crossing;
                    result.before = cur;
                    result.after = *next;
                    return result;
                }
                prev = cur;
                cur = *next;
                h = std::abs(h * 1.5) > std::abs(h0) ? h0 : h * 1.5;
            } else {
                h *= 0.5;
                if (std::abs(h) < opt_.bisection_tolerance) {
                    result.end = SweepEnd::BranchEnd;
                    result.before = cur;
                    return result;
                }
            }
        }
        result.before = cur;
        return result;
    }

    /// Narrows a crossing bracket to the bisection tolerance.
    void bisect(BranchPoint& below, BranchPoint& above)
    {
        while (std::abs(above.c - below.c) > opt_.bisection_tolerance) {
            const double mid = 0.5 * (below.c + above.c);
            const Vec2 guess{0.5 * (below.z[0] + above.z[0]), 0.5 * (below.z[1] + above.z[1])};
            auto p = solve_near(mid, guess, below);
            if (p && p->lead < 0.0) {
                below = *p;
            } else if (p) {
                above = *p;
            } else {
                above.c = mid;
            }
        }
    }

    /// Another equilibrium near `centre` at forcing c, distinct from `branch`.
    std::optional<BranchPoint> other_branch(double c, const Vec2& centre, const Vec2& direction, const Vec2& branch,
                                            double eps)
    {
        sys_.set_forcing(c);
        for (double scale : {0.5, 1.0, 2.0, 5.0, 10.0, 30.0, 100.0}) {
            for (double sign : {1.0, -1.0}) {
                const double s = sign * scale * eps;
                const Vec2 guess{centre[0] + s * direction[0], centre[1] + s * direction[1]};
                auto root = newton_solve(sys_, guess, opt_.newton);
                if (!root) continue;
                if (distance(*root, branch) <= 1e-3 * eps) continue;
                if (distance(*root, centre) > 100.0 * eps + 0.05) continue;
                return make_point(sys_, c, *root);
            }
        }
        return std::nullopt;
    }

    BifurcationFinding classify_crossing(BranchPoint below, BranchPoint above)
    {
        bisect(below, above);
        BifurcationFinding finding;
        finding.critical_value = 0.5 * (below.c + above.c);
        finding.equilibrium_at_critical = below.z;

        const auto& ev = below.rep.eigenvalues;
        if (std::abs(ev[0].imag()) > opt_.imag_tolerance) {
            finding.kind = BifurcationKind::Hopf;
            return finding;
        }

        const double dir = above.c >= below.c ? 1.0 : -1.0;
        const double eps = opt_.probe_offset * std::max(1.0, std::abs(finding.critical_value));
        const double c_beyond = finding.critical_value + dir * eps;
        const double c_before = finding.critical_value - dir * eps;

        // Branch persistence past the crossing separates transcritical from fold.
        sys_.set_forcing(c_beyond);
        const auto beyond = newton_solve(sys_, below.z, opt_.newton);
        if (!beyond || distance(*beyond, below.z) > 100.0 * eps + 0.05) {
            finding.kind = BifurcationKind::Fold;
            return finding;
        }
        sys_.set_forcing(c_before);
        const auto before = newton_solve(sys_, below.z, opt_.newton);
        if (!before) {
            finding.kind = BifurcationKind::None;
            return finding;
        }

        // Null direction of the Jacobian at the crossing.
        const auto& j = below.rep.jacobian;
        const double lam = ev[0].real();
        Vec2 v1{j[0][1], lam - j[0][0]};
        Vec2 v2{lam - j[1][1], j[1][0]};
        Vec2 v = std::hypot(v1[0], v1[1]) >= std::hypot(v2[0], v2[1]) ? v1 : v2;
        double norm = std::hypot(v[0], v[1]);
        if (norm == 0.0) {
            v = {1.0, 0.0};
            norm = 1.0;
        }
        v = {v[0] / norm, v[1] / norm};

        const auto other_beyond = other_branch(c_beyond, below.z, v, *beyond, eps);
        const auto other_before = other_branch(c_before, below.z, v, *before, eps);
        sys_.set_forcing(c_beyond);
        const bool continued_unstable = describe_point(sys_, *beyond).dominant_real() > 0.0;
        if (other_beyond && other_before && continued_unstable && other_beyond->lead < 0.0 &&
            other_before->lead > 0.0) {
            finding.kind = BifurcationKind::Transcritical;
        } else {
            finding.kind = BifurcationKind::None;
        }
        return finding;
    }

    /// Outcome of sweeping one direction: a finding and its distance from c0.
    struct DirectionResult {
        bool event = false;
        bool lost = false;
        double distance = std::numeric_limits<double>::infinity();
        BifurcationFinding finding;
    };

    DirectionResult run(const BranchPoint& start, double target, double half_width)
    {
        DirectionResult out;
        if (target == start.c) return out;
        auto sweep_result = sweep(start, target, half_width);
        switch (sweep_result.end) {
        case SweepEnd::Reached:
            return out;
        case SweepEnd::Crossing:
            out.event = true;
            out.finding = classify_crossing(sweep_result.before, sweep_result.after);
            break;
        case SweepEnd::BranchEnd: {
            out.event = true;
            const auto& end = sweep_result.before;
            const auto& ev = end.rep.eigenvalues;
            if (std::abs(ev[0].imag()) <= opt_.imag_tolerance && std::abs(end.lead) <= opt_.fold_eigen_tolerance) {
                out.finding.kind = BifurcationKind::Fold;
                out.finding.critical_value = end.c;
                out.finding.equilibrium_at_critical = end.z;
            } else {
                out.lost = true;
                out.finding.critical_value = end.c;
            }
            break;
        }
        }
        out.distance = std::abs(out.finding.critical_value - start.c);
        return out;
    }

private:
    PolySystem2D sys_;
    const HuntOptions& opt_;
};

} // namespace

BifurcationFinding hunt_bifurcation(const PolySystem2D& sys, const EquilibriumReport& eq, const HuntOptions& options)
{
    if (!eq.stable) {
        throw Error(ErrorKind::InvalidArgument, "hunt_bifurcation needs a stable equilibrium");
    }
    const double c0 = sys.forcing_value();
    double lo = c0 - options.delta;
    double hi = c0 + options.delta;
    if (options.range) {
        lo = options.range->first;
        hi = options.range->second;
    }
    if (!(lo <= c0 && c0 <= hi)) {
        throw Error(ErrorKind::InvalidArgument, "sweep range must contain the initial coefficient");
    }

    Continuation cont(sys, options);
    const BranchPoint start = make_point(sys, c0, eq.location);
    const double half = std::max(hi - c0, c0 - lo);
    const auto up = cont.run(start, hi, half);
    const auto down = cont.run(start, lo, half);

    const auto* best = &up;
    if (down.event && (!up.event || down.distance < up.distance)) best = &down;
    if (!best->event) return {};
    if (best->lost) {
        throw Error(ErrorKind::ContinuationLost,
                    "branch lost at forcing value " + std::to_string(best->finding.critical_value));
    }
    return best->finding;
}

SdeModelSpec make_sde(const PolySystem2D& sys, double noise_sigma)
{
    SdeModelSpec spec;
    spec.dimension = 2;
    spec.noise_channels = 2;
    spec.parameter_names = {"forcing"};
    spec.drift = [sys](std::span<const double> x, double, std::span<const double> p, std::span<double> rate) {
        PolySystem2D local = sys;
        local.set_forcing(p[0]);
        const Vec2 f = local.rhs({x[0], x[1]});
        rate[0] = f[0];
        rate[1] = f[1];
    };
    spec.diffusion = [noise_sigma](std::span<const double>, double, std::span<const double>, std::span<double> g) {
        g[0] = noise_sigma;
        g[1] = 0.0;
        g[2] = 0.0;
        g[3] = noise_sigma;
    };
    return spec;
}

std::pair<TimeSeries, TimeSeries> generate_rapo_pair(const PolySystem2D& sys, const Vec2& equilibrium,
                                                     const BifurcationFinding& finding, double noise_sigma,
                                                     RngStream& forced_rng, RngStream& null_rng,
                                                     const SimulationPlan& plan)
{
    if (finding.kind != BifurcationKind::Transcritical) {
        throw Error(ErrorKind::InvalidArgument, "only transcritical findings produce RAPO pairs");
    }
    const auto spec = make_sde(sys, noise_sigma);
    const double c0 = sys.forcing_value();
    const std::array<double, 1> params{c0};
    const std::array<double, 2> x0{equilibrium[0], equilibrium[1]};

    RampSchedule ramp{0, c0, finding.critical_value, plan.burn_in_steps, plan.total_steps()};
    const auto forced = simulate_recorded(spec, x0, params, ramp, plan, forced_rng);
    const auto null = simulate_recorded(spec, x0, params, std::nullopt, plan, null_rng);

    TimeSeries forced_ts({}, BifurcationLabel::Transcritical, forced.column(0));
    TimeSeries null_ts({}, BifurcationLabel::Null, null.column(0));
    forced_ts.dt = null_ts.dt = plan.dt * static_cast<double>(plan.record_every);
    return {std::move(forced_ts), std::move(null_ts)};
}

RapoPairResult generate_rapo_pair_from_stream(std::uint64_t master_seed, std::size_t pair_index,
                                              const RapoConfig& config)
{
    RngStream draw_rng(master_seed, pair_index, 0);
    for (std::size_t attempt = 0; attempt < config.max_attempts; ++attempt) {
        PolySystem2D sys = draw_random_system(draw_rng, config.draw);
        const auto eq = find_equilibrium(sys, draw_rng, config.equilibrium);
        if (!eq) continue;
        BifurcationFinding finding;
        try {
            finding = hunt_bifurcation(sys, *eq, config.hunt);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::ContinuationLost) continue;
            throw;
        }
        if (finding.kind != BifurcationKind::Transcritical) continue;

        const double sigma = draw_rng.uniform(config.noise_min, config.noise_max);
        const auto sub = static_cast<std::uint32_t>(1 + 2 * attempt);
        auto forced_rng = draw_rng.substream(sub);
        auto null_rng = draw_rng.substream(sub + 1);
        try {
            auto [forced, null] = generate_rapo_pair(sys, eq->location, finding, sigma, forced_rng, null_rng,
                                                     config.plan);
            RapoPairResult out{std::move(forced), std::move(null), {}};
            out.record.pair_index = pair_index;
            out.record.attempts = attempt + 1;
            out.record.system = sys;
            out.record.initial_value = sys.forcing_value();
            out.record.critical_value = finding.critical_value;
            out.record.equilibrium = eq->location;
            out.record.noise_sigma = sigma;
            return out;
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::NonFiniteState) continue;
            throw;
        }
    }
    throw Error(ErrorKind::InvalidArgument, "no transcritical system found within the attempt budget");
}

} // namespace ews::rapo
