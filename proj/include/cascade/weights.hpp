#pragma once

#include "cascade/degeneracy.hpp"

#include <cstddef>
#include <vector>

namespace cascade {

// Time-age window carrying the weight singularities.  The default window is
// the full cylinder (0,T) x (0,A); sub-windows give the shifted weights used
// on truncated domains.
struct CarlemanWindow {
    double t_lo = 0.0;
    double t_hi = 0.0;
    double a_lo = 0.0;
};

// Carleman weight family for one degenerate coefficient:
//
//   theta(t,a) = 1 / [ (t-t_lo)^4 (t_hi-t)^4 (a-a_lo)^4 ]
//   p(x)       = int_0^x (y   / k(y)) e^{R y^2}     dy   (degeneracy at 0)
//   p(x)       = int_0^x ((y-1)/ k(y)) e^{R (y-1)^2} dy   (degeneracy at 1)
//   phi(t,a,x) = theta(t,a) (p(x) - 2 sup|p|)            (strictly negative)
//
// p is tabulated once per coefficient with per-cell Gauss-Legendre on a mesh
// graded toward the degenerate endpoint, then queried by cumulative sum plus
// a partial-cell rule; the integrable endpoint singularity (exponent < 2) is
// never sampled at the endpoint itself.
//
// All weight products are evaluated in log space and flushed to zero below
// exp(-700); theta blows up at the window edges, so lattice sums must stay on
// interior nodes (products at or beyond an edge return the limit 0).
class CarlemanWeights {
  public:
    static CarlemanWeights build(const KModel& k, double R, const CarlemanWindow& w,
                                 std::size_t table_cells = 2048);

    double p(double x) const;
    double sup_p() const { return sup_p_; }
    double R() const { return R_; }
    const CarlemanWindow& window() const { return window_; }
    bool degenerate_at_zero() const { return at0_; }

    double theta(double t, double a) const;
    double log_theta(double t, double a) const;  // +inf at window edges
    double phi(double t, double a, double x) const;

    // theta^theta_pow * exp(2 s phi), flushed to zero when the log-space
    // exponent drops below -700; exact 0 at and beyond the window edges.
    double product(double theta_pow, double s, double t, double a, double x) const;

  private:
    CarlemanWindow window_;
    double R_ = 1.0;
    double sup_p_ = 0.0;
    bool at0_ = true;
    std::vector<double> cell_edges_;  // table_cells+1 abscissae in [0,1]
    std::vector<double> cum_;         // cumulative integral at cell edges
    KModel k_;

    double integrand(double y) const;
    double partial_cell(double lo, double hi) const;
};

} // namespace cascade
