#include "cascade/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace cascade {

TensorGrid TensorGrid::make(double T, double A, std::size_t Nt, std::size_t Na,
                            std::size_t Nx, double grading) {
    if (!(T > 0.0) || !(A > 0.0))
        throw std::invalid_argument("grid: extents must be positive");
    if (Nt < 1 || Na < 1 || Nx < 2)
        throw std::invalid_argument("grid: too few cells");
    if (!(grading > 0.0))
        throw std::invalid_argument("grid: grading factor must be positive");

    TensorGrid g;
    g.T = T;
    g.A = A;
    g.Nt = Nt;
    g.Na = Na;
    g.Nx = Nx;
    g.grading = grading;
    g.dt = T / double(Nt);
    g.da = A / double(Na);
    if (std::abs(g.dt - g.da) > 1e-9 * std::max(g.dt, g.da))
        throw std::invalid_argument(
            "grid: dt != da; transport is an exact characteristic shift and "
            "requires aligned time and age steps");

    g.xs.resize(Nx + 1);
    if (grading == 1.0) {
        for (std::size_t i = 0; i <= Nx; ++i)
            g.xs[i] = double(i) / double(Nx);
    } else {
        // cell widths proportional to grading^i, normalized to unit span
        double total = 0.0, w = 1.0;
        for (std::size_t i = 0; i < Nx; ++i, w *= grading) total += w;
        g.xs[0] = 0.0;
        w = 1.0;
        for (std::size_t i = 0; i < Nx; ++i, w *= grading)
            g.xs[i + 1] = g.xs[i] + w / total;
    }
    g.xs[0] = 0.0;
    g.xs[Nx] = 1.0;

    g.xmid.resize(Nx);
    for (std::size_t i = 0; i < Nx; ++i)
        g.xmid[i] = 0.5 * (g.xs[i] + g.xs[i + 1]);

    g.xw.resize(Nx + 1);
    g.xw[0] = 0.5 * (g.xs[1] - g.xs[0]);
    for (std::size_t i = 1; i < Nx; ++i)
        g.xw[i] = 0.5 * (g.xs[i + 1] - g.xs[i - 1]);
    g.xw[Nx] = 0.5 * (g.xs[Nx] - g.xs[Nx - 1]);

    return g;
}

Field sample_field(const TensorGrid& g, const std::function<double(double, double)>& f) {
    Field out(g);
    for (std::size_t j = 0; j <= g.Na; ++j)
        for (std::size_t i = 0; i <= g.Nx; ++i)
            out.at(j, i) = f(g.a(j), g.x(i));
    return out;
}

Field restrict_field(const TensorGrid& g, const Field& f, const AgeSpaceRegion& region) {
    Field out = f;
    for (std::size_t j = 0; j <= g.Na; ++j) {
        const bool in_a = region.contains_a(g.a(j), g.A);
        for (std::size_t i = 0; i <= g.Nx; ++i)
            if (!in_a || !region.contains_x(g.x(i)))
                out.at(j, i) = 0.0;
    }
    return out;
}

} // namespace cascade
