#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace cascade {

// Diffusion coefficient k(x) on [0,1], vanishing at exactly one endpoint.
//
// Supported shapes:
//   PowerAt0   k(x) = x^alpha          (degenerate at x = 0)
//   PowerAt1   k(x) = (1-x)^beta       (degenerate at x = 1)
//   Tabulated  strictly positive samples, monotone-cubic interpolation
//
// The degeneracy strength M is the supremum of x k'(x)/k(x) (mirrored to
// (x-1) k'(x)/k(x) when the coefficient vanishes at x = 1).  M < 1 is weak
// degeneracy, 1 <= M < 2 strong; M >= 2 supports no Carleman weight.
enum class DegenerateSide { at0, at1 };

enum class DegeneracyClass { weak, strong, none };

struct KModel {
    enum class Kind { power_at_0, power_at_1, tabulated } kind;
    double exponent = 0.0;           // power kinds only
    std::vector<double> xs;          // tabulated: strictly increasing in [0,1]
    std::vector<double> ks;          // tabulated: strictly positive values
    DegenerateSide declared_side = DegenerateSide::at0;

    static KModel power_at_0(double alpha);
    static KModel power_at_1(double beta);
    // Samples must be strictly increasing in x and strictly positive in k.
    static KModel tabulated(std::vector<double> xs, std::vector<double> ks,
                            DegenerateSide side);
};

// k(x); throws std::invalid_argument outside [0,1].
double eval_k(const KModel& m, double x);

// k'(x); one-sided limits at the endpoints (analytic for the interpolant,
// closed form for powers).  Throws outside [0,1].
double eval_k_derivative(const KModel& m, double x);

struct DegeneracyReport {
    DegenerateSide side;
    DegeneracyClass cls;
    double M_best = 0.0;             // sup of the degeneracy ratio over samples
    std::size_t n_samples = 0;
    std::string note;
};

// Samples the ratio x k'/k (or its mirror) on interior points accumulating at
// the degenerate endpoint.  The endpoint itself is never evaluated; the limit
// is taken from the innermost refinement level.
DegeneracyReport classify_degeneracy(const KModel& m, std::size_t n_samples = 256);

struct HypothesisItem {
    std::string name;
    bool pass = false;
    std::string detail;
};

// Checks the structural hypotheses the Carleman weight construction needs:
// interior positivity, boundedness of the degeneracy ratio near the endpoint,
// ratio bound below 2, and boundedness of the ratio's derivative near the
// endpoint.  Each check is reported independently.
std::vector<HypothesisItem> check_carleman_hypotheses(const KModel& m);

struct PairOrdering {
    bool ordered = false;            // k1 >= k2 everywhere sampled
    double min_margin = 0.0;         // min over samples of k1 - k2
    double at_x = 0.0;               // sample attaining the minimum
};

// Verifies the cascade ordering k1 >= k2 on a uniform interior sample.
PairOrdering check_pair_ordering(const KModel& k1, const KModel& k2,
                                 std::size_t n_samples = 512);

namespace detail {

// Fritsch-Carlson monotone cubic interpolant with analytic first and second
// derivatives.  Used by the tabulated coefficient model.
struct Pchip {
    std::vector<double> x, y, d;     // nodes, values, node derivatives

    static Pchip fit(const std::vector<double>& x, const std::vector<double>& y);
    double eval(double xq) const;
    double deriv(double xq) const;
    double deriv2(double xq) const;  // piecewise; jumps at nodes allowed
};

} // namespace detail

} // namespace cascade
