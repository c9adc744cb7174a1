#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cascade/solver.hpp"

#include "mms_common.hpp"

#include <cmath>
#include <cstddef>
#include <random>
#include <stdexcept>
#include <vector>

using namespace cascade;

namespace {

Field random_interior(const TensorGrid& g, std::uint64_t seed) {
    std::mt19937_64 eng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Field f(g);
    for (std::size_t j = 0; j <= g.Na; ++j)
        for (std::size_t i = 1; i < g.Nx; ++i)
            f.at(j, i) = dist(eng);
    return f;
}

Trajectory random_trajectory(const TensorGrid& g, std::uint64_t seed) {
    Trajectory tr;
    tr.first_node = 1;
    for (std::size_t n = 1; n <= g.Nt; ++n)
        tr.slices.push_back(random_interior(g, seed + 7919 * n));
    return tr;
}

RatePack canonical_rates() {
    return RatePack::constant_rates(0.1, 0.1, 1.0, 0.5, 0.5, 1.0, 0.8, 0.6);
}

CascadeSolver canonical_solver(const TensorGrid& g) {
    return CascadeSolver(g, KModel::power_at_0(0.5), KModel::power_at_0(0.7),
                         canonical_rates(), AgeSpaceRegion::space(0.3, 0.7));
}

} // namespace

TEST_CASE("zero terminal data yields the zero adjoint") {
    const auto g = TensorGrid::make(2.0, 1.0, 24, 12, 16);
    const auto solver = canonical_solver(g);
    CascadeSolver::AdjointInput in;
    in.zT = Field(g);
    in.yT = Field(g);
    const auto out = solver.solve_adjoint(0, g.Nt, in);
    for (const Field& s : out.z.slices)
        for (double q : s.v) CHECK(q == 0.0);
    for (const Field& s : out.y.slices)
        for (double q : s.v) CHECK(q == 0.0);
}

TEST_CASE("backward march is the exact transpose of the forward march") {
    const auto g = TensorGrid::make(2.0, 1.0, 32, 16, 24);
    const auto solver = canonical_solver(g);

    for (std::uint64_t trial = 0; trial < 4; ++trial) {
        const std::uint64_t s = 1000 * (trial + 1);
        const auto ctrl = random_trajectory(g, s + 3);
        const auto su = random_trajectory(g, s + 4);
        const auto sv = random_trajectory(g, s + 5);
        const auto fa = random_trajectory(g, s + 6);
        const auto ha = random_trajectory(g, s + 7);

        CascadeSolver::ForwardInput fwd;
        fwd.u0 = random_interior(g, s + 1);
        fwd.v0 = random_interior(g, s + 2);
        fwd.control = &ctrl;
        fwd.source_u = &su;
        fwd.source_v = &sv;
        CascadeSolver::AdjointInput adj;
        adj.zT = random_interior(g, s + 8);
        adj.yT = random_interior(g, s + 9);
        adj.f = &fa;
        adj.h = &ha;

        for (bool couple : {false, true}) {
            fwd.couple = couple;
            adj.couple = couple;
            const auto rep = solver.transpose_check(0, g.Nt, fwd, adj);
            CHECK(rep.pass);
            CHECK(rep.relative_gap <= 1e-10);
        }

        // a strict sub-window of the time interval transposes just as exactly
        fwd.couple = adj.couple = true;
        const auto rep = solver.transpose_check(8, g.Nt - 4, fwd, adj);
        CHECK(rep.pass);
        CHECK(rep.relative_gap <= 1e-10);
    }
}

TEST_CASE("transpose identity sides recompute from the marched states") {
    const auto g = TensorGrid::make(2.0, 1.0, 24, 12, 16);
    const auto solver = canonical_solver(g);
    const auto ctrl = random_trajectory(g, 91);

    CascadeSolver::ForwardInput fwd;
    fwd.u0 = random_interior(g, 92);
    fwd.v0 = random_interior(g, 93);
    fwd.control = &ctrl;
    CascadeSolver::AdjointInput adj;
    adj.zT = random_interior(g, 94);
    adj.yT = random_interior(g, 95);

    const auto rep = solver.transpose_check(0, g.Nt, fwd, adj);
    const auto fw = solver.solve_forward(0, g.Nt, fwd);
    const auto ad = solver.solve_adjoint(0, g.Nt, adj);
    const double lhs = dual_pair(g, fw.u.slices.back(), adj.zT, solver.k1()) +
                       dual_pair(g, fw.v.slices.back(), adj.yT, solver.k2()) -
                       dual_pair(g, fw.u.slices.front(), ad.z.slices.front(), solver.k1()) -
                       dual_pair(g, fw.v.slices.front(), ad.y.slices.front(), solver.k2());
    CHECK(rep.lhs == doctest::Approx(lhs).epsilon(1e-13));
}

TEST_CASE("transpose check rejects inputs that break the identity") {
    const auto g = TensorGrid::make(2.0, 1.0, 24, 12, 16);
    const auto solver = canonical_solver(g);
    CascadeSolver::ForwardInput fwd;
    fwd.u0 = Field(g);
    fwd.v0 = Field(g);
    CascadeSolver::AdjointInput adj;
    adj.zT = Field(g);
    adj.yT = Field(g);

    SUBCASE("prescribed trace") {
        fwd.trace_u = [](double, double) { return 0.0; };
        CHECK_THROWS_AS(solver.transpose_check(0, g.Nt, fwd, adj), std::invalid_argument);
    }
    SUBCASE("frozen intermediates") {
        const auto base = solver.solve_adjoint(0, g.Nt, adj);
        adj.frozen_y = &base.y_mid;
        CHECK_THROWS_AS(solver.transpose_check(0, g.Nt, fwd, adj), std::invalid_argument);
    }
    SUBCASE("mismatched coupling flags") {
        fwd.couple = false;
        adj.couple = true;
        CHECK_THROWS_AS(solver.transpose_check(0, g.Nt, fwd, adj), std::invalid_argument);
    }
}

TEST_CASE("frozen intermediates reproduce the coupled backward march bitwise") {
    const auto g = TensorGrid::make(2.0, 1.0, 24, 12, 16);
    const auto solver = canonical_solver(g);
    CascadeSolver::AdjointInput in;
    in.zT = random_interior(g, 101);
    in.yT = random_interior(g, 102);
    in.couple = true;
    const auto coupled = solver.solve_adjoint(0, g.Nt, in);

    CascadeSolver::AdjointInput frozen;
    frozen.zT = in.zT;
    frozen.yT = Field(g);  // ignored: y is not marched
    frozen.couple = false;
    frozen.frozen_y = &coupled.y_mid;
    const auto replay = solver.solve_adjoint(0, g.Nt, frozen);

    REQUIRE(replay.z.slices.size() == coupled.z.slices.size());
    for (std::size_t s = 0; s < replay.z.slices.size(); ++s)
        CHECK(replay.z.slices[s].v == coupled.z.slices[s].v);
    CHECK(replay.y.slices.empty());
}

TEST_CASE("characteristic evaluation matches the backward march in the infertile band") {
    const auto g = TensorGrid::make(1.0, 1.0, 32, 32, 24);
    const auto solver = canonical_solver(g);  // abar2 = 0.5
    CascadeSolver::AdjointInput in;
    in.zT = Field(g);
    in.yT = random_interior(g, 111);
    const auto ad = solver.solve_adjoint(0, g.Nt, in);

    const double eps = 1e-12 * (1.0 + g.A);
    std::size_t compared = 0;
    for (std::size_t n = 0; n < g.Nt; ++n) {
        const std::size_t m = g.Nt - n;
        for (std::size_t j = 0; j + m <= g.Na; ++j) {
            if (g.a(j + m) > solver.rates().abar2 + eps) continue;
            const auto prof = solver.characteristic_eval(in.yT, g.Nt, n, j);
            const double* row = ad.y.slices[n].row(j);
            for (std::size_t i = 0; i <= g.Nx; ++i)
                CHECK(std::abs(prof[i] - row[i]) <= 1e-14);
            ++compared;
        }
    }
    CHECK(compared > 50);
}

TEST_CASE("characteristic evaluation matches the sine-mode decay on flat coefficients") {
    const double c = 0.41, mu = 0.2;
    const auto g = TensorGrid::make(1.0, 1.0, 16, 16, 32);
    CascadeSolver solver(g, mms::flat_k(c), mms::flat_k(c), mms::quiet_rates(mu, g.A),
                         AgeSpaceRegion::space(0.3, 0.7));
    const Field yT = sample_field(g, [](double, double x) { return std::sin(2.0 * mms::kPi * x); });

    const double h = 1.0 / double(g.Nx);
    const double sh = std::sin(mms::kPi * h);  // half-angle of mode 2
    const double lambda = 4.0 / (h * h) * sh * sh;

    for (std::size_t m : {std::size_t{1}, std::size_t{5}, std::size_t{12}}) {
        const std::size_t n = g.Nt - m;
        const auto prof = solver.characteristic_eval(yT, g.Nt, n, 2);
        const double factor = std::pow(1.0 + g.dt * (c * lambda + mu), -double(m));
        for (std::size_t i = 1; i < g.Nx; ++i)
            CHECK(prof[i] ==
                  doctest::Approx(factor * std::sin(2.0 * mms::kPi * g.xs[i])).epsilon(1e-10));
    }
}

TEST_CASE("characteristic evaluation rejects points outside its regime") {
    const auto g = TensorGrid::make(2.0, 1.0, 32, 16, 24);
    const auto solver = canonical_solver(g);  // abar2 = 0.5, da = 1/16
    const Field yT = random_interior(g, 121);
    // crossing age A
    CHECK_THROWS_AS(solver.characteristic_eval(yT, g.Nt, 0, 4), std::invalid_argument);
    // terminal age beyond the fertility onset: j + m = 12, a = 0.75 > 0.5
    CHECK_THROWS_AS(solver.characteristic_eval(yT, g.Nt, g.Nt - 8, 4), std::invalid_argument);
    // off the lattice
    CHECK_THROWS_AS(solver.characteristic_eval(yT, g.Nt, g.Nt + 1, 0), std::invalid_argument);
    // a valid point right at the onset works: j + m = 8, a = 0.5
    const auto prof = solver.characteristic_eval(yT, g.Nt, g.Nt - 6, 2);
    CHECK(prof.size() == g.Nx + 1);
}
