#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace cascade {

// Tensor grid over (t,a,x) in [0,T] x [0,A] x [0,1].
//
// Time and age steps must coincide (dt == da): the transport part of every
// solver is an exact shift along the characteristics t - a = const, and that
// only works on an aligned lattice.  Construction refuses misaligned grids.
//
// The x axis may be geometrically graded: cell widths proportional to
// grading^i, so grading > 1 refines toward x = 0 and grading < 1 toward
// x = 1.  Default 1 is a uniform mesh.
struct TensorGrid {
    double T = 0.0, A = 0.0;
    std::size_t Nt = 0, Na = 0, Nx = 0;
    double grading = 1.0;
    double dt = 0.0, da = 0.0;

    std::vector<double> xs;    // Nx+1 node abscissae, xs[0]=0, xs[Nx]=1
    std::vector<double> xmid;  // Nx cell midpoints
    std::vector<double> xw;    // Nx+1 dual cell widths (half-cells at the ends)

    static TensorGrid make(double T, double A, std::size_t Nt, std::size_t Na,
                           std::size_t Nx, double grading = 1.0);

    double t(std::size_t n) const { return dt * double(n); }
    double a(std::size_t j) const { return da * double(j); }
    double x(std::size_t i) const { return xs[i]; }
    double cell_width(std::size_t c) const { return xs[c + 1] - xs[c]; }
};

// One time slice: values on the (age-node, x-node) lattice, row-major by age.
// Dirichlet columns i = 0 and i = Nx are stored explicitly.
struct Field {
    std::size_t na = 0, nx = 0;  // node counts are na+1, nx+1
    std::vector<double> v;

    Field() = default;
    explicit Field(const TensorGrid& g)
        : na(g.Na), nx(g.Nx), v((g.Na + 1) * (g.Nx + 1), 0.0) {}

    double& at(std::size_t j, std::size_t i) { return v[j * (nx + 1) + i]; }
    double at(std::size_t j, std::size_t i) const { return v[j * (nx + 1) + i]; }
    double* row(std::size_t j) { return v.data() + j * (nx + 1); }
    const double* row(std::size_t j) const { return v.data() + j * (nx + 1); }
};

// Time-indexed sequence of slices.  slices[s] lives at global time node
// first_node + s of the owning grid.
struct Trajectory {
    std::size_t first_node = 0;
    std::vector<Field> slices;

    std::size_t steps() const { return slices.empty() ? 0 : slices.size() - 1; }
};

// Closed axis-aligned region in (a,x); default covers the whole domain.
struct AgeSpaceRegion {
    double a_lo = 0.0, a_hi = -1.0;  // a_hi < a_lo means "full age range"
    double x_lo = 0.0, x_hi = 1.0;

    static AgeSpaceRegion full() { return {}; }
    static AgeSpaceRegion ages(double lo, double hi) { return {lo, hi, 0.0, 1.0}; }
    static AgeSpaceRegion space(double lo, double hi) { return {0.0, -1.0, lo, hi}; }

    bool contains_a(double a, double A) const {
        const double hi = a_hi < a_lo ? A : a_hi;
        const double eps = 1e-12 * (1.0 + A);
        return a >= a_lo - eps && a <= hi + eps;
    }
    bool contains_x(double x) const {
        const double eps = 1e-12 * 2.0;
        return x >= x_lo - eps && x <= x_hi + eps;
    }
};

Field sample_field(const TensorGrid& g, const std::function<double(double, double)>& f);

// Zeroes every node outside the region (exact node masking).
Field restrict_field(const TensorGrid& g, const Field& f, const AgeSpaceRegion& region);

} // namespace cascade
