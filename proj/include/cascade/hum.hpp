#pragma once

#include "cascade/grid.hpp"
#include "cascade/solver.hpp"

#include <cstddef>
#include <vector>

namespace cascade {

// Penalized minimal-norm control synthesis.
//
// Stage 1 minimizes, over terminal data g2 supported in (delta, A) with
// g2(A,.) = 0,
//
//   J(g2) = 1/2 |1_omega yhat|^2_cyl + <y(t_lo), v0>_2 + eps/2 |g2|^2_2,
//
// where y marches backward from g2 (decoupled equation) and |.|_cyl is the
// step sum dt * sum_n of the omega-restricted duality norm of the post-solve
// intermediates.  Stage 2 minimizes the same shape for g1 with the z
// equation, whose source is the frozen stage-1 intermediates.  The control is
// g = 1_omega zhat.  Because both gradients are assembled from the
// transpose-exact marches, each minimizer satisfies its duality identity
//
//   |1_omega zhat|^2_cyl(directional) + eps |g|^2 = -<z_dir(t_lo), data>
//
// to CG precision (for stage 1 the directional and full solutions coincide;
// for stage 2 they differ by the frozen source, whose cross pairing is
// reported separately rather than assumed away).
//
// The two-stage construction pins the u component: at the stage-2 minimizer
// the controlled u(T) equals -eps*g1 on the band exactly.  It leaves the v
// component unpinned, so synthesize_control follows with a joint refinement:
// conjugate gradient over the stacked pair (g1, g2) against the coupled
// adjoint, started from the staged result, after which v(T) = -eps*g2 on the
// band as well.  The refinement can be disabled to study the bare staged
// construction.
//
// All inner products are the node-diagonal duality pairings (1/k1 for g1- and
// u-type fields, 1/k2 for g2- and v-type), matching the marches' transpose
// algebra, so conjugate gradient sees a symmetric positive definite operator.

struct ControlSetup {
    AgeSpaceRegion omega;  // control region in x
    double delta = 0.0;    // terminal-data support threshold in age
    double eps = 1e-8;     // penalization weight
    double cg_tol = 1e-10; // relative residual stop
    std::size_t cg_maxiter = 500;
    bool joint_refine = true;
    bool require_equal_k = true;  // full-interval synthesis hypothesis
};

struct StageReport {
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<double> residuals;  // relative residual history, including start
    double rayleigh_last = 0.0;     // last CG Rayleigh quotient (conditioning proxy)
};

struct HumReport {
    StageReport stage1, stage2, joint;
    double control_norm = 0.0;       // |g|_{1/k1} over the control cylinder
    double initial_norm_u = 0.0;     // |u0|_{1/k1} slice norm
    double initial_norm_v = 0.0;
    double band_terminal = 0.0;      // |(u,v)(T)| on (delta,A)x(0,1), controlled
    double full_terminal = 0.0;      // same on the whole (a,x) domain
    double uncontrolled_band = 0.0;
    double uncontrolled_full = 0.0;
    double residual_drop = 0.0;      // uncontrolled_band / band_terminal
    double c_hat = 0.0;              // control_norm / (initial_norm_u + initial_norm_v)
    double identity_gap_1 = 0.0;     // stage-1 duality identity, relative gap
    double identity_gap_2 = 0.0;     // stage-2 directional identity, relative gap
    double cross_term = 0.0;         // stage-2 frozen-source cross pairing (diagnostic)
};

// Terminal-data search space: rows with a <= delta are zeroed (support
// constraint), as are the Dirichlet columns.  Every row above delta,
// including a = A, is steered.
void band_mask(const TensorGrid& g, double delta, Field& f);

// Explicit functional evaluations (test and diagnostic use; the minimizers
// below never form them).  Throw if the candidate violates the support mask.
double functional_J(const CascadeSolver& solver, std::size_t n0, std::size_t n1,
                    const Field& g2, const Field& v0, const ControlSetup& setup);
double functional_F(const CascadeSolver& solver, std::size_t n0, std::size_t n1,
                    const Field& g1, const Field& u0, const Trajectory& frozen_y,
                    const ControlSetup& setup);

// Matrix-free gradients in the masked terminal-data space (one backward plus
// one forward march each); exposed for the finite-difference checks.
Field gradient_J(const CascadeSolver& solver, std::size_t n0, std::size_t n1,
                 const Field& g2, const Field& v0, const ControlSetup& setup);
Field gradient_F(const CascadeSolver& solver, std::size_t n0, std::size_t n1,
                 const Field& g1, const Field& u0, const Trajectory& frozen_y,
                 const ControlSetup& setup);

struct StageResult {
    Field g;                           // minimizing terminal data
    CascadeSolver::AdjointOutput adj;  // its backward march (stage-2: with source)
    StageReport report;
};

StageResult minimize_J(const CascadeSolver& solver, std::size_t n0, std::size_t n1,
                       const Field& v0, const ControlSetup& setup);
StageResult minimize_F(const CascadeSolver& solver, std::size_t n0, std::size_t n1,
                       const Field& u0, const Trajectory& frozen_y, const ControlSetup& setup);

struct SynthesisResult {
    Field g1, g2;                         // final terminal data (after refinement)
    Trajectory control;                   // 1_omega zhat, nodes n0+1..n1
    CascadeSolver::ForwardOutput run;     // controlled cascade on [n0, n1]
    CascadeSolver::ForwardOutput free_run;  // uncontrolled baseline
    HumReport report;
};

// Two-stage synthesis plus optional joint refinement on the window [n0, n1],
// with initial data (u0, v0) given at node n0.
SynthesisResult synthesize_control(const CascadeSolver& solver, std::size_t n0, std::size_t n1,
                                   const Field& u0, const Field& v0, const ControlSetup& setup);

struct FullIntervalResult {
    Trajectory control;                    // zero before the window, synthesis after
    CascadeSolver::ForwardOutput stage0;   // free flight on [0, n_split]
    SynthesisResult synthesis;             // controlled window [n_split, Nt]
    CascadeSolver::GronwallReport stage0_growth;
    double c_hat_full = 0.0;  // control norm over (0,T) vs data norms at t = 0
};

// Free evolution on (0, T - abar1), then synthesis on the remaining window.
// Requires abar1 == abar2 and (when setup.require_equal_k) k1 == k2 on the
// mesh; initial data given at t = 0.
FullIntervalResult null_control_full(const CascadeSolver& solver, const Field& u0,
                                     const Field& v0, const ControlSetup& setup);

} // namespace cascade
