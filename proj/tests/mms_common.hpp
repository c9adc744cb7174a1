#pragma once

// Manufactured-solution error harness shared by the solver tests and the
// acceptance runner.
//
// Temporal study: u*(t,a,x) = e^{-t-a} x(1-x).  The profile is quadratic in
// x, which the three-point second-difference reproduces exactly, so the
// measured error is purely the O(dt) stepping error of the implicit solve
// (time and age steps halve together on an aligned grid).
//
// Spatial study: u*(t,x) = (1+t) sin(pi x), age-independent and linear in t.
// Backward Euler integrates a linear-in-t right-hand side exactly and the
// age shift copies identical rows, so the measured error is purely the
// O(h^2) spatial truncation (reported away from the degenerate corner).

#include "cascade/degeneracy.hpp"
#include "cascade/quadrature.hpp"
#include "cascade/solver.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

namespace mms {

inline constexpr double kPi = 3.14159265358979323846;

inline cascade::KModel flat_k(double c) {
    return cascade::KModel::tabulated({0.0, 0.25, 0.5, 0.75, 1.0}, {c, c, c, c, c},
                                      cascade::DegenerateSide::at0);
}

// beta == 0 throughout: the renewal integral vanishes and the prescribed
// trace drives the age-zero row instead
inline cascade::RatePack quiet_rates(double mu, double A) {
    return cascade::RatePack::constant_rates(mu, mu, 0.0, A, A, A, 0.0, 0.0);
}

inline double l2_region(const cascade::TensorGrid& g, const cascade::Field& diff,
                        double x_lo) {
    const auto region = cascade::AgeSpaceRegion{0.0, -1.0, x_lo, 1.0};
    return std::sqrt(cascade::weighted_l2(g, diff, flat_k(1.0), region));
}

// terminal-slice error of the forced decoupled march against u* = e^{-t-a}w
inline double temporal_error(std::size_t nt, std::size_t na, std::size_t nx,
                             const cascade::KModel& k, double mu) {
    using namespace cascade;
    const auto g = TensorGrid::make(2.0, 1.0, nt, na, nx);
    CascadeSolver solver(g, k, k, quiet_rates(mu, g.A), AgeSpaceRegion::space(0.3, 0.7));

    auto star = [](double t, double a, double x) {
        return std::exp(-t - a) * x * (1.0 - x);
    };
    Trajectory src;
    src.first_node = 1;
    for (std::size_t n = 1; n <= g.Nt; ++n) {
        Field s(g);
        const double t = g.t(n);
        for (std::size_t j = 0; j <= g.Na; ++j)
            for (std::size_t i = 1; i < g.Nx; ++i)
                s.at(j, i) = (mu - 2.0) * star(t, g.a(j), g.xs[i]) +
                             2.0 * eval_k(k, g.xs[i]) * std::exp(-t - g.a(j));
        src.slices.push_back(std::move(s));
    }
    CascadeSolver::ForwardInput in;
    in.u0 = sample_field(g, [&](double a, double x) { return star(0.0, a, x); });
    in.v0 = Field(g);
    in.source_u = &src;
    in.trace_u = [](double t, double x) { return std::exp(-t) * x * (1.0 - x); };
    in.trace_v = [](double, double) { return 0.0; };
    in.couple = false;
    const auto out = solver.solve_forward(0, g.Nt, in);

    Field diff = out.u.slices.back();
    for (std::size_t j = 0; j <= g.Na; ++j)
        for (std::size_t i = 0; i <= g.Nx; ++i)
            diff.at(j, i) -= star(g.T, g.a(j), g.xs[i]);
    return l2_region(g, diff, 0.0);
}

// terminal-slice error of the forced march against u* = (1+t) sin(pi x),
// measured on x > x_lo
inline double spatial_error(std::size_t nt, std::size_t na, std::size_t nx,
                            const cascade::KModel& k, double mu, double x_lo) {
    using namespace cascade;
    const auto g = TensorGrid::make(2.0, 1.0, nt, na, nx);
    CascadeSolver solver(g, k, k, quiet_rates(mu, g.A), AgeSpaceRegion::space(0.3, 0.7));

    Trajectory src;
    src.first_node = 1;
    for (std::size_t n = 1; n <= g.Nt; ++n) {
        Field s(g);
        const double t = g.t(n);
        for (std::size_t j = 0; j <= g.Na; ++j)
            for (std::size_t i = 1; i < g.Nx; ++i) {
                const double w = std::sin(kPi * g.xs[i]);
                s.at(j, i) = w + (1.0 + t) * (eval_k(k, g.xs[i]) * kPi * kPi + mu) * w;
            }
        src.slices.push_back(std::move(s));
    }
    CascadeSolver::ForwardInput in;
    in.u0 = sample_field(g, [&](double, double x) { return std::sin(kPi * x); });
    in.v0 = Field(g);
    in.source_u = &src;
    in.trace_u = [](double t, double x) { return (1.0 + t) * std::sin(kPi * x); };
    in.trace_v = [](double, double) { return 0.0; };
    in.couple = false;
    const auto out = solver.solve_forward(0, g.Nt, in);

    Field diff = out.u.slices.back();
    for (std::size_t j = 0; j <= g.Na; ++j)
        for (std::size_t i = 0; i <= g.Nx; ++i)
            diff.at(j, i) -= (1.0 + g.T) * std::sin(kPi * g.xs[i]);
    return l2_region(g, diff, x_lo);
}

inline double observed_order(double coarse, double fine) {
    return std::log2(coarse / fine);
}

} // namespace mms
