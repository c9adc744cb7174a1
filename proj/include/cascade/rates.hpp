#pragma once

#include "cascade/grid.hpp"

#include <cmath>
#include <functional>
#include <optional>

namespace cascade {

using RateFn = std::function<double(double, double, double)>;  // (t,a,x)
using BirthFn = std::function<double(double, double)>;          // (a,x)

// Reaction, coupling and renewal rates of the transformed cascade.
//
// Invariants (spot-checked on grid samples by validate):
//   mu11, mu22 >= 0;  mu21 >= 0;
//   beta_i >= 0 and beta_i(a,x) = 0 for a <= abar_i with abar_i > 0.
// The vanishing band in age is what lets the renewal closure resolve in one
// pass: the age-zero row never feeds back into its own birth integral.
struct RatePack {
    RateFn mu11, mu22, mu21;
    BirthFn beta1, beta2;
    double abar1 = 0.0, abar2 = 0.0;

    // Constant reactions and coupling; smoothstep birth ramps that clear the
    // band a <= abar and rise to beta_scale at a = A.
    static RatePack constant_rates(double mu11, double mu22, double mu21,
                                   double abar1, double abar2, double A,
                                   double beta_scale1, double beta_scale2);

    // Throws std::invalid_argument when a sampled invariant fails.
    void validate(const TensorGrid& g) const;
};

// C^1 ramp: 0 for a <= abar, smoothstep on (abar, A], scale at a = A.
double birth_ramp(double a, double abar, double A, double scale);

// Background mortality mu_i3(a) with a closed-form survival primitive.
// 'reciprocal' is c/(A-a), whose survival exponential blows up at a = A;
// ages in (A-eta, A] are clamped to the value at A-eta.
struct MortalitySchedule {
    enum class Kind { zero, constant, reciprocal } kind = Kind::zero;
    double c = 0.0;
    double A = 1.0;
    double eta = 1e-6;

    static MortalitySchedule zero();
    static MortalitySchedule constant(double c, double A, double eta = 1e-6);
    static MortalitySchedule reciprocal(double c, double A, double eta = 1e-6);

    // integral of mu over (0, min(a, A-eta))
    double primitive(double a) const;
    // exp(+primitive): growth factor removed from the original densities
    double growth(double a) const { return std::exp(primitive(a)); }
};

struct TransformedModel {
    Field u0, v0;              // exp-weighted initial densities
    Field beta1, beta2;        // transformed birth kernels on the (a,x) lattice
    RatePack rates;            // rates ready for the solvers
    std::optional<Trajectory> g;  // transformed control when a raw one is given
};

// Change of variables u = e^{int mu13} y, v = e^{int mu23} w that removes the
// background mortality from the original densities.  Birth kernels shrink by
// the inverse survival factor, the coupling picks up the ratio of the two.
TransformedModel transform_model(const TensorGrid& g, const Field& y0, const Field& w0,
                                 const MortalitySchedule& m13, const MortalitySchedule& m23,
                                 const BirthFn& gamma1, const BirthFn& gamma2,
                                 const RateFn& mu11, const RateFn& mu22, const RateFn& mu,
                                 double abar1, double abar2,
                                 const Trajectory* gbar = nullptr);

} // namespace cascade
