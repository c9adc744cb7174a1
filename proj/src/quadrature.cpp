#include "cascade/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace cascade {

namespace {

// Trapezoid weights over the contiguous run of age rows inside the region.
// A single-row region falls back to rectangle weight da.
std::vector<double> age_weights(const TensorGrid& g, const AgeSpaceRegion& region) {
    std::vector<double> w(g.Na + 1, 0.0);
    std::size_t lo = g.Na + 1, hi = 0;
    for (std::size_t j = 0; j <= g.Na; ++j) {
        if (region.contains_a(g.a(j), g.A)) {
            lo = std::min(lo, j);
            hi = std::max(hi, j);
        }
    }
    if (lo > hi) return w;
    if (lo == hi) {
        w[lo] = g.da;
        return w;
    }
    for (std::size_t j = lo; j <= hi; ++j)
        w[j] = (j == lo || j == hi) ? 0.5 * g.da : g.da;
    return w;
}

} // namespace

double weighted_l2(const TensorGrid& g, const Field& f, const KModel& k,
                   const AgeSpaceRegion& region) {
    const auto wa = age_weights(g, region);

    // Per-cell x factors: width / k(midpoint), masked by the region.
    std::vector<double> wx(g.Nx, 0.0);
    for (std::size_t c = 0; c < g.Nx; ++c)
        if (region.contains_x(g.xmid[c]))
            wx[c] = g.cell_width(c) / eval_k(k, g.xmid[c]);

    double total = 0.0;
    for (std::size_t j = 0; j <= g.Na; ++j) {
        if (wa[j] == 0.0) continue;
        const double* row = f.row(j);
        double s = 0.0;
        for (std::size_t c = 0; c < g.Nx; ++c) {
            if (wx[c] == 0.0) continue;
            const double mv = 0.5 * (row[c] + row[c + 1]);
            s += wx[c] * mv * mv;
        }
        total += wa[j] * s;
    }
    return total;
}

double cylinder_integral(const TensorGrid& g, const Trajectory& traj, const KModel& k,
                         double t_lo, double t_hi, const AgeSpaceRegion& region) {
    if (!(t_hi > t_lo))
        throw std::invalid_argument("cylinder_integral: empty time window");
    const double eps = 1e-9 * g.T;
    const auto node_at = [&](double t) {
        const double r = t / g.dt;
        const auto n = static_cast<std::size_t>(std::llround(r));
        if (std::abs(r - double(n)) > 1e-6)
            throw std::invalid_argument("cylinder_integral: window edge off the time lattice");
        return n;
    };
    const std::size_t n_lo = node_at(t_lo), n_hi = node_at(t_hi);
    if (n_lo < traj.first_node || n_hi > traj.first_node + traj.steps() || t_hi > g.T + eps)
        throw std::invalid_argument("cylinder_integral: window not covered by trajectory");

    double total = 0.0;
    for (std::size_t n = n_lo; n <= n_hi; ++n) {
        const double wt = (n == n_lo || n == n_hi) ? 0.5 * g.dt : g.dt;
        total += wt * weighted_l2(g, traj.slices[n - traj.first_node], k, region);
    }
    return total;
}

double hardy_ratio(const TensorGrid& g, const std::vector<double>& w) {
    if (w.size() != g.Nx + 1)
        throw std::invalid_argument("hardy_ratio: profile size mismatch");

    double num = 0.0;
    for (std::size_t c = 0; c < g.Nx; ++c) {
        const double mv = 0.5 * (w[c] + w[c + 1]);
        const double xm = g.xmid[c];
        num += g.cell_width(c) * mv * mv / (xm * xm);
    }

    double den = 0.0;
    {
        // one-sided at the ends, centered inside; dual-cell weights
        const double d0 = (w[1] - w[0]) / (g.xs[1] - g.xs[0]);
        den += g.xw[0] * d0 * d0;
        for (std::size_t i = 1; i < g.Nx; ++i) {
            const double d = (w[i + 1] - w[i - 1]) / (g.xs[i + 1] - g.xs[i - 1]);
            den += g.xw[i] * d * d;
        }
        const double dn = (w[g.Nx] - w[g.Nx - 1]) / (g.xs[g.Nx] - g.xs[g.Nx - 1]);
        den += g.xw[g.Nx] * dn * dn;
    }

    if (den == 0.0)
        throw std::invalid_argument("hardy_ratio: zero-gradient profile");
    return num / den;
}

std::vector<double> dual_x_weights(const TensorGrid& g, const KModel& k) {
    std::vector<double> w(g.Nx + 1, 0.0);
    for (std::size_t i = 1; i < g.Nx; ++i)
        w[i] = g.xw[i] / eval_k(k, g.xs[i]);
    return w;
}

double dual_pair(const TensorGrid& g, const Field& F, const Field& G, const KModel& k) {
    return dual_pair_band(g, F, G, k, -1.0);
}

double dual_pair_band(const TensorGrid& g, const Field& F, const Field& G,
                      const KModel& k, double a_lo) {
    const auto wx = dual_x_weights(g, k);
    const double eps = 1e-12 * (1.0 + g.A);
    double total = 0.0;
    for (std::size_t j = 0; j <= g.Na; ++j) {
        if (g.a(j) <= a_lo + eps) continue;
        const double* fr = F.row(j);
        const double* gr = G.row(j);
        double s = 0.0;
        for (std::size_t i = 1; i < g.Nx; ++i)
            s += wx[i] * fr[i] * gr[i];
        total += g.da * s;
    }
    return total;
}

} // namespace cascade
