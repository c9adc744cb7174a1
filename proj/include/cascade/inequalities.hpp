#pragma once

#include "cascade/degeneracy.hpp"
#include "cascade/grid.hpp"
#include "cascade/weights.hpp"

#include <cstddef>
#include <vector>

namespace cascade {

// Weighted-inequality evaluators.  Both sides of each inequality are computed
// as plain lattice sums (rectangle rule, cell volume dt*da*xw_i) over the
// open (t,a) window of the weight family, so the reported ratios are
// empirical constants tied to this mesh — no claim of convergence to the
// continuum constants is made.  The exponentially vanishing weight makes the
// window-edge layers drop out on its own; no special-casing is needed.

struct CarlemanTerms {
    double lhs = 0.0;        // sum of s*Theta*v_x^2 + s^3*Theta^3*(q/k)^2*v^2, weighted
    double rhs_f = 0.0;      // sum of f^2/k over the window
    double rhs_omega = 0.0;  // sum of v^2/k over the window, x restricted to omega
    double ratio() const;    // lhs / (rhs_f + rhs_omega); 0/0 -> 0, x/0 -> inf
};

// v: solution trajectory of the scalar equation on the full grid (the window
// is cut out of it); f: matching right-hand side samples, may be null for the
// homogeneous equation; s: the inequality's free parameter.
CarlemanTerms carleman_sides(const TensorGrid& g, const Trajectory& v, const Trajectory* f,
                             const KModel& k, const CarlemanWeights& w, double s,
                             const AgeSpaceRegion& omega);

struct CarlemanMember {
    const Trajectory* v = nullptr;
    const Trajectory* f = nullptr;
};

struct CarlemanSweepRow {
    double s = 0.0;
    double c_hat = 0.0;  // max ratio over the ensemble at this s
};

struct CarlemanSweep {
    std::vector<CarlemanSweepRow> rows;
    double s_stable = 0.0;   // smallest s whose ratio moved < 10% from its predecessor
    bool stabilized = false; // false: no consecutive pair within 10%; s_stable = last s
};

CarlemanSweep carleman_constant_sweep(const TensorGrid& g,
                                      const std::vector<CarlemanMember>& members,
                                      const KModel& k, const CarlemanWeights& w,
                                      const std::vector<double>& s_values,
                                      const AgeSpaceRegion& omega);

// Observability inequalities: weighted norm of one adjoint component at its
// designated slice (y at T - abar2, z at T - abar1) against combinations of
//   - the omega-cylinder norms over (0,T),
//   - the low-age band a < delta over (0,T)      (lowage variants only),
//   - terminal-data bands: a < abar (lowage variants), a < delta (banded).
// The banded variants require delta > max(abar1, abar2); with terminal data
// supported in (delta, A) their terminal term vanishes identically.
enum class ObsVariant {
    y_lowage,  // y slice vs omega + low-age band + young-age terminal band
    z_lowage,  // z slice vs both-component omega + low-age bands + terminal bands
    y_banded,  // y slice vs omega + terminal band a < delta
    z_banded,  // z slice vs both-component omega + terminal bands a < delta
};

struct ObsTerms {
    double lhs = 0.0;
    double rhs_terminal = 0.0;
    double rhs_omega = 0.0;
    double rhs_lowage = 0.0;
    double rhs_total() const { return rhs_terminal + rhs_omega + rhs_lowage; }
    double ratio() const;
};

ObsTerms observability_sides(const TensorGrid& g, const Trajectory& z, const Trajectory& y,
                             const KModel& k1, const KModel& k2, double abar1, double abar2,
                             double delta, ObsVariant variant, const AgeSpaceRegion& omega);

} // namespace cascade
