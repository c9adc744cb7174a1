#include "cascade/inequalities.hpp"

#include "cascade/quadrature.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cascade {

namespace {

double safe_ratio(double lhs, double rhs) {
    if (rhs > 0.0) return lhs / rhs;
    if (lhs <= 1e-300) return 0.0;
    return std::numeric_limits<double>::infinity();
}

const Field& slice_at(const Trajectory& traj, std::size_t n, const char* what) {
    if (n < traj.first_node || n - traj.first_node >= traj.slices.size())
        throw std::invalid_argument(std::string(what) + ": trajectory does not cover the requested time node");
    return traj.slices[n - traj.first_node];
}

std::size_t aligned_node(const TensorGrid& g, double t, const char* what) {
    const double r = t / g.dt;
    const auto n = static_cast<std::size_t>(std::llround(r));
    if (std::abs(r - double(n)) > 1e-6 || t < 0.0 || t > g.T + 1e-9 * g.T)
        throw std::invalid_argument(std::string(what) + ": time slice off the lattice");
    return n;
}

} // namespace

double CarlemanTerms::ratio() const { return safe_ratio(lhs, rhs_f + rhs_omega); }
double ObsTerms::ratio() const { return safe_ratio(lhs, rhs_total()); }

CarlemanTerms carleman_sides(const TensorGrid& g, const Trajectory& v, const Trajectory* f,
                             const KModel& k, const CarlemanWeights& w, double s,
                             const AgeSpaceRegion& omega) {
    if (!(s > 0.0))
        throw std::invalid_argument("carleman_sides: s must be positive");
    const CarlemanWindow& win = w.window();
    if (win.a_lo >= g.A || win.t_lo >= win.t_hi)
        throw std::invalid_argument("carleman_sides: window does not intersect the grid");

    const bool at0 = w.degenerate_at_zero();
    std::vector<double> kn(g.Nx + 1, 0.0), qok2(g.Nx + 1, 0.0);
    for (std::size_t i = 1; i < g.Nx; ++i) {
        kn[i] = eval_k(k, g.xs[i]);
        const double q = at0 ? g.xs[i] : g.xs[i] - 1.0;
        const double r = q / kn[i];
        qok2[i] = r * r;
    }

    const double eps_t = 1e-12 * (1.0 + g.T);
    const double eps_a = 1e-12 * (1.0 + g.A);
    CarlemanTerms out;
    for (std::size_t n = 0; n <= g.Nt; ++n) {
        const double t = g.t(n);
        if (t <= win.t_lo + eps_t || t >= win.t_hi - eps_t) continue;
        const Field& vs = slice_at(v, n, "carleman_sides v");
        const Field* fs = f ? &slice_at(*f, n, "carleman_sides f") : nullptr;
        for (std::size_t j = 0; j <= g.Na; ++j) {
            const double a = g.a(j);
            if (a <= win.a_lo + eps_a) continue;
            const double* vr = vs.row(j);
            for (std::size_t i = 1; i < g.Nx; ++i) {
                const double vol = g.dt * g.da * g.xw[i];
                const double w1 = w.product(1.0, s, t, a, g.xs[i]);
                const double w3 = w.product(3.0, s, t, a, g.xs[i]);
                if (w1 > 0.0 || w3 > 0.0) {
                    const double vx = (vr[i + 1] - vr[i - 1]) / (g.xs[i + 1] - g.xs[i - 1]);
                    out.lhs += vol * (s * w1 * vx * vx + s * s * s * w3 * qok2[i] * vr[i] * vr[i]);
                }
                if (fs) {
                    const double fv = fs->at(j, i);
                    out.rhs_f += vol * fv * fv / kn[i];
                }
                if (omega.contains_x(g.xs[i]))
                    out.rhs_omega += vol * vr[i] * vr[i] / kn[i];
            }
        }
    }
    return out;
}

CarlemanSweep carleman_constant_sweep(const TensorGrid& g,
                                      const std::vector<CarlemanMember>& members,
                                      const KModel& k, const CarlemanWeights& w,
                                      const std::vector<double>& s_values,
                                      const AgeSpaceRegion& omega) {
    CarlemanSweep sweep;
    sweep.rows.reserve(s_values.size());
    for (double s : s_values) {
        double worst = 0.0;
        for (const CarlemanMember& m : members) {
            if (!m.v) throw std::invalid_argument("carleman_constant_sweep: null member");
            const CarlemanTerms terms = carleman_sides(g, *m.v, m.f, k, w, s, omega);
            worst = std::max(worst, terms.ratio());
        }
        sweep.rows.push_back({s, worst});
    }
    sweep.stabilized = false;
    sweep.s_stable = sweep.rows.empty() ? 0.0 : sweep.rows.back().s;
    for (std::size_t r = 1; r < sweep.rows.size(); ++r) {
        const double prev = sweep.rows[r - 1].c_hat;
        const double cur = sweep.rows[r].c_hat;
        const double denom = std::max(std::abs(prev), 1e-300);
        if (std::abs(cur - prev) / denom <= 0.10) {
            sweep.s_stable = sweep.rows[r].s;
            sweep.stabilized = true;
            break;
        }
    }
    return sweep;
}

ObsTerms observability_sides(const TensorGrid& g, const Trajectory& z, const Trajectory& y,
                             const KModel& k1, const KModel& k2, double abar1, double abar2,
                             double delta, ObsVariant variant, const AgeSpaceRegion& omega) {
    const bool banded = (variant == ObsVariant::y_banded || variant == ObsVariant::z_banded);
    const bool z_side = (variant == ObsVariant::z_lowage || variant == ObsVariant::z_banded);
    const double gamma = std::max(abar1, abar2);
    if (banded && !(delta > gamma))
        throw std::invalid_argument(
            "observability_sides: banded variants need delta above both fertility onsets");
    if (!(delta > 0.0) || delta >= g.A)
        throw std::invalid_argument("observability_sides: delta outside (0, A)");

    const Field& zT = z.slices.back();
    const Field& yT = y.slices.back();
    const AgeSpaceRegion full = AgeSpaceRegion::full();
    const AgeSpaceRegion lowage = AgeSpaceRegion::ages(0.0, delta);
    const AgeSpaceRegion omega_x = AgeSpaceRegion::space(omega.x_lo, omega.x_hi);

    ObsTerms out;
    if (!z_side) {
        const std::size_t n2 = aligned_node(g, g.T - abar2, "observability_sides");
        out.lhs = weighted_l2(g, slice_at(y, n2, "observability_sides y"), k2, full);
        out.rhs_omega = cylinder_integral(g, y, k2, 0.0, g.T, omega_x);
        if (banded) {
            out.rhs_terminal = weighted_l2(g, yT, k2, lowage);
        } else {
            out.rhs_terminal = weighted_l2(g, yT, k2, AgeSpaceRegion::ages(0.0, abar2));
            out.rhs_lowage = cylinder_integral(g, y, k2, 0.0, g.T, lowage);
        }
    } else {
        const std::size_t n1 = aligned_node(g, g.T - abar1, "observability_sides");
        out.lhs = weighted_l2(g, slice_at(z, n1, "observability_sides z"), k1, full);
        out.rhs_omega = cylinder_integral(g, z, k1, 0.0, g.T, omega_x) +
                        cylinder_integral(g, y, k2, 0.0, g.T, omega_x);
        if (banded) {
            out.rhs_terminal = weighted_l2(g, zT, k1, lowage) + weighted_l2(g, yT, k2, lowage);
        } else {
            out.rhs_terminal = weighted_l2(g, zT, k1, AgeSpaceRegion::ages(0.0, abar1)) +
                               weighted_l2(g, yT, k2, AgeSpaceRegion::ages(0.0, abar2));
            out.rhs_lowage = cylinder_integral(g, z, k1, 0.0, g.T, lowage) +
                             cylinder_integral(g, y, k2, 0.0, g.T, lowage);
        }
    }
    return out;
}

} // namespace cascade
