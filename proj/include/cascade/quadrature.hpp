#pragma once

#include "cascade/degeneracy.hpp"
#include "cascade/grid.hpp"

#include <vector>

namespace cascade {

// Quadrature over the degenerate-weighted spaces L^2_{1/k}.
//
// Reported norms use trapezoid-in-a and midpoint-in-x: the integrand is
// evaluated at cell midpoints, so 1/k is never sampled at the degenerate
// endpoint and integrable singularities (k = x^alpha, alpha < 1, against a
// non-vanishing field) converge to the true integral.
//
// Solver duality uses a separate node-diagonal product (dual pairing below):
// uniform age weights and dual-cell x weights at interior nodes.  That choice
// makes the age shift, the implicit diffusion solve and the renewal closure
// exactly self-transposable, which the adjoint marching and the control
// gradients rely on.

// integral over region of f^2 / k dx da (trapezoid-a, midpoint-x).
double weighted_l2(const TensorGrid& g, const Field& f, const KModel& k,
                   const AgeSpaceRegion& region = AgeSpaceRegion::full());

// integral over [t_lo, t_hi] x region of f^2 / k dx da dt (trapezoid in t).
// The window must be covered by the trajectory.
double cylinder_integral(const TensorGrid& g, const Trajectory& traj, const KModel& k,
                         double t_lo, double t_hi,
                         const AgeSpaceRegion& region = AgeSpaceRegion::full());

// [ integral of w^2/x^2 (midpoint) ] / [ integral of (w_x)^2 (centered) ]
// for a 1-D profile w on the x nodes; the Hardy bound for this ratio is 4.
double hardy_ratio(const TensorGrid& g, const std::vector<double>& w);

// Node-diagonal duality product  sum_j da * sum_i F G xw_i / k(x_i)  over
// interior x nodes; age weights are uniform so the transport shift and its
// transpose are exact mirrors.
double dual_pair(const TensorGrid& g, const Field& F, const Field& G, const KModel& k);

// Same product restricted to age rows with a > a_lo (used for band-supported
// terminal data).
double dual_pair_band(const TensorGrid& g, const Field& F, const Field& G,
                      const KModel& k, double a_lo);

// Precomputed 1/k node weights for the duality product: w_i = xw_i / k(x_i)
// at interior nodes, 0 at the Dirichlet columns.
std::vector<double> dual_x_weights(const TensorGrid& g, const KModel& k);

} // namespace cascade
