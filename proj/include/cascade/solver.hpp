#pragma once

#include "cascade/degeneracy.hpp"
#include "cascade/grid.hpp"
#include "cascade/quadrature.hpp"
#include "cascade/rates.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

namespace cascade {

// Coupled forward/backward marching for the transformed cascade
//
//   u_t + u_a - k1 u_xx + mu11 u            = g 1_omega   u(t,0,x) = int beta1 u da
//   v_t + v_a - k2 v_xx + mu22 v - mu21 u   = 0           v(t,0,x) = int beta2 v da
//
// with Dirichlet walls in x.  One forward step is
//
//   shift along the characteristic, add dt * sources,
//   solve (I + dt(-k d_xx + mu)) row by row,            (backward Euler)
//   close the age-zero row with the renewal integral of the fresh slice.
//
// The backward (adjoint) step is the exact algebraic transpose of the forward
// step in the node-diagonal 1/k duality product: redistribute the age-zero
// trace through the birth kernel, solve with the same row matrices, then
// shift the other way filling a = A with zero.  Because the transposition is
// exact, the discrete Green identity
//
//   <u(t1),zT>_1 + <v(t1),yT>_2 - <u0,z(t0)>_1 - <v0,y(t0)>_2
//     = dt * sum_n [ <g^n 1_omega, zhat^n>_1 + <u^n,f^n>_1 + <v^n,h^n>_2 ]
//
// holds to rounding, where zhat are the post-solve, pre-shift intermediates
// and (f,h) are the adjoint right-hand sides in equation form
//
//   z_t + z_a + k1 z_xx - mu11 z + mu21 (k1/k2) y = f - beta1 z(t,0,x)
//   y_t + y_a + k2 y_xx - mu22 y                  = h - beta2 y(t,0,x).
//
// The k1/k2 factor on the coupling is what the 1/k-weighted duality demands;
// it reduces to the plain coupling when the two coefficients coincide.
//
// Row solves across ages are independent, so the row sweep is the parallel
// kernel; a serial reference sweep is kept and the two must agree bitwise.
class CascadeSolver {
  public:
    CascadeSolver(const TensorGrid& g, KModel k1, KModel k2, RatePack rates,
                  AgeSpaceRegion omega, bool parallel = true);

    const TensorGrid& grid() const { return *grid_; }
    const KModel& k1() const { return k1_; }
    const KModel& k2() const { return k2_; }
    const RatePack& rates() const { return rates_; }
    const AgeSpaceRegion& omega() const { return omega_; }

    // x-node indicator of the control region (Dirichlet columns excluded)
    const std::vector<char>& omega_mask() const { return omega_mask_; }
    void apply_omega_mask(Field& f) const;

    using TraceFn = std::function<double(double, double)>;  // (t,x)

    struct ForwardInput {
        Field u0, v0;
        const Trajectory* control = nullptr;   // +g 1_omega in the u equation
        const Trajectory* source_u = nullptr;  // distributed, not masked
        const Trajectory* source_v = nullptr;
        TraceFn trace_u;  // prescribed age-zero trace; default: renewal closure
        TraceFn trace_v;
        bool couple = true;  // mu21 u feeding the v equation
    };
    struct ForwardOutput {
        Trajectory u, v;
    };
    // March over time nodes [n0, n1]; trajectories carry every node.
    ForwardOutput solve_forward(std::size_t n0, std::size_t n1,
                                const ForwardInput& in) const;

    struct AdjointInput {
        Field zT, yT;                          // terminal data at node n1
        const Trajectory* f = nullptr;         // z-equation rhs, equation form
        const Trajectory* h = nullptr;         // y-equation rhs, equation form
        bool couple = true;                    // mu21 (k1/k2) y in the z equation
        const Trajectory* frozen_y = nullptr;  // use these y intermediates instead
                                               // of marching y (staged control)
    };
    struct AdjointOutput {
        Trajectory z, y;          // states at nodes n0..n1
        Trajectory z_mid, y_mid;  // post-solve intermediates at nodes n0+1..n1
    };
    AdjointOutput solve_adjoint(std::size_t n0, std::size_t n1,
                                const AdjointInput& in) const;

    // Along-characteristic evaluation of the decoupled y equation: the value
    // profile y(t, a, .) obtained by carrying the terminal slice at age
    // a + (T - t) through the chain of row solves.  Requires the feedback-free
    // regime a + (T - t) <= abar2 (no birth feedback on the crossed ages).
    std::vector<double> characteristic_eval(const Field& yT, std::size_t n1,
                                            std::size_t n, std::size_t j) const;

    struct TransposeReport {
        double lhs = 0.0, rhs = 0.0;
        double relative_gap = 0.0;
        bool pass = false;
    };
    // Verifies the Green identity above on the given data at tolerance tol.
    TransposeReport transpose_check(std::size_t n0, std::size_t n1,
                                    const ForwardInput& fwd, const AdjointInput& adj,
                                    double tol = 1e-10) const;

    struct GronwallReport {
        std::vector<double> F1, F2, G1;  // per-node squared norms
        double max_ratio_u = 0.0;        // max F1(t) / bound(t)
        double max_ratio_v = 0.0;
        bool pass_u = false, pass_v = false;
        double C1 = 0.0, C2 = 0.0, C2u = 0.0;
    };
    // Growth bounds with the constants of the renewal estimate:
    //   F1(t) <= e^{C1 t} F1(0) (1+tol),            C1 = sup|beta1|^2 A
    //   F2(t) <= (1+tol)[e^{C2 t} F2(0)
    //            + C2u int_0^t e^{C2(t-s)} G1(s) ds], C2 = sup|beta2|^2 A + sup|mu21|
    // where F1 uses the 1/k1 norm and F2, G1 the 1/k2 norm.
    GronwallReport gronwall_check(const ForwardOutput& run, double tol = 0.05) const;

    // Row matrix application (I + dt(-k d_xx + mu)) for tests and oracles.
    void apply_row_operator(int eq, std::size_t n, std::size_t j,
                            const double* in, double* out) const;

    bool parallel() const { return parallel_; }

  private:
    const TensorGrid* grid_;
    KModel k1_, k2_;
    RatePack rates_;
    AgeSpaceRegion omega_;
    bool parallel_;

    std::vector<double> k1n_, k2n_;    // k at interior nodes
    std::vector<double> couple_w_;     // k1/k2 at interior nodes
    std::vector<double> birth_w_;      // trapezoid weights over [0,A]
    std::vector<char> omega_mask_;

    void solve_row(int eq, std::size_t n, std::size_t j, double* rhs) const;
    void sweep_rows(int eq, std::size_t n, Field& slice, std::size_t j_lo) const;
    void renewal_close(const BirthFn& beta, Field& slice) const;
    void trace_transpose(const BirthFn& beta, Field& slice) const;

    friend struct SolverTestAccess;
};

} // namespace cascade
