#include "cascade/solver.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace cascade {

namespace {

// Second-difference coefficients at interior node i of a (possibly graded)
// mesh: L f_i = cm f_{i-1} - (cm+cp) f_i + cp f_{i+1}.
inline void diff_coeffs(const TensorGrid& g, std::size_t i, double& cm, double& cp) {
    const double hm = g.xs[i] - g.xs[i - 1];
    const double hp = g.xs[i + 1] - g.xs[i];
    cm = 2.0 / ((hm + hp) * hm);
    cp = 2.0 / ((hm + hp) * hp);
}

const Field& slice_at(const Trajectory& traj, std::size_t n, const char* what) {
    if (n < traj.first_node || n - traj.first_node >= traj.slices.size())
        throw std::invalid_argument(std::string(what) + ": trajectory does not cover the requested time node");
    return traj.slices[n - traj.first_node];
}

} // namespace

CascadeSolver::CascadeSolver(const TensorGrid& g, KModel k1, KModel k2, RatePack rates,
                             AgeSpaceRegion omega, bool parallel)
    : grid_(&g), k1_(std::move(k1)), k2_(std::move(k2)), rates_(std::move(rates)),
      omega_(omega), parallel_(parallel) {
    k1n_.assign(g.Nx + 1, 0.0);
    k2n_.assign(g.Nx + 1, 0.0);
    couple_w_.assign(g.Nx + 1, 0.0);
    for (std::size_t i = 1; i < g.Nx; ++i) {
        k1n_[i] = eval_k(k1_, g.xs[i]);
        k2n_[i] = eval_k(k2_, g.xs[i]);
        if (!(k1n_[i] > 0.0) || !(k2n_[i] > 0.0))
            throw std::invalid_argument("CascadeSolver: diffusion coefficient vanishes at an interior node");
        couple_w_[i] = k1n_[i] / k2n_[i];
    }

    birth_w_.assign(g.Na + 1, g.da);
    birth_w_[0] = 0.5 * g.da;
    birth_w_[g.Na] = 0.5 * g.da;

    omega_mask_.assign(g.Nx + 1, 0);
    for (std::size_t i = 1; i < g.Nx; ++i)
        omega_mask_[i] = omega_.contains_x(g.xs[i]) ? 1 : 0;
}

void CascadeSolver::apply_omega_mask(Field& f) const {
    const TensorGrid& g = *grid_;
    for (std::size_t j = 0; j <= g.Na; ++j) {
        double* row = f.row(j);
        for (std::size_t i = 0; i <= g.Nx; ++i)
            if (!omega_mask_[i]) row[i] = 0.0;
    }
}

// Backward-Euler row solve: (I + dt(-k d_xx + mu(t_n, a_j, .))) x = rhs on the
// interior nodes, Dirichlet walls.  mu >= 0 makes the matrix strictly
// diagonally dominant, so the Thomas sweep needs no pivoting.
void CascadeSolver::solve_row(int eq, std::size_t n, std::size_t j, double* rhs) const {
    const TensorGrid& g = *grid_;
    const std::size_t m = g.Nx - 1;  // interior count
    const double t = g.t(n);
    const double a = g.a(j);
    const std::vector<double>& kn = (eq == 1) ? k1n_ : k2n_;
    const RateFn& mu = (eq == 1) ? rates_.mu11 : rates_.mu22;

    std::vector<double> cw(m);  // eliminated upper coefficients
    std::vector<double> dw(m);  // eliminated rhs

    double cm, cp;
    diff_coeffs(g, 1, cm, cp);
    double diag = 1.0 + g.dt * (kn[1] * (cm + cp) + mu(t, a, g.xs[1]));
    double upper = -g.dt * kn[1] * cp;
    cw[0] = upper / diag;
    dw[0] = rhs[1] / diag;

    for (std::size_t i = 2; i <= m; ++i) {
        diff_coeffs(g, i, cm, cp);
        const double lower = -g.dt * kn[i] * cm;
        diag = 1.0 + g.dt * (kn[i] * (cm + cp) + mu(t, a, g.xs[i]));
        upper = -g.dt * kn[i] * cp;
        const double denom = diag - lower * cw[i - 2];
        cw[i - 1] = upper / denom;
        dw[i - 1] = (rhs[i] - lower * dw[i - 2]) / denom;
    }

    rhs[m] = dw[m - 1];
    for (std::size_t i = m - 1; i >= 1; --i)
        rhs[i] = dw[i - 1] - cw[i - 1] * rhs[i + 1];
    rhs[0] = 0.0;
    rhs[g.Nx] = 0.0;
}

void CascadeSolver::sweep_rows(int eq, std::size_t n, Field& slice, std::size_t j_lo) const {
    const auto na = static_cast<std::int64_t>(grid_->Na);
    if (parallel_) {
#pragma omp parallel for schedule(static)
        for (std::int64_t j = static_cast<std::int64_t>(j_lo); j <= na; ++j)
            solve_row(eq, n, static_cast<std::size_t>(j), slice.row(static_cast<std::size_t>(j)));
    } else {
        for (std::int64_t j = static_cast<std::int64_t>(j_lo); j <= na; ++j)
            solve_row(eq, n, static_cast<std::size_t>(j), slice.row(static_cast<std::size_t>(j)));
    }
}

// Age-zero closure: row 0 <- trapezoid over (0, A] of beta * slice.  Row 0 of
// the pre-closure slice never enters (the birth rate vanishes near age zero).
void CascadeSolver::renewal_close(const BirthFn& beta, Field& slice) const {
    const TensorGrid& g = *grid_;
    std::vector<double> trace(g.Nx + 1, 0.0);
    for (std::size_t j = 1; j <= g.Na; ++j) {
        const double a = g.a(j);
        const double* row = slice.row(j);
        for (std::size_t i = 1; i < g.Nx; ++i)
            trace[i] += birth_w_[j] * beta(a, g.xs[i]) * row[i];
    }
    double* r0 = slice.row(0);
    for (std::size_t i = 0; i <= g.Nx; ++i)
        r0[i] = trace[i];
}

// Transpose of the closure: the age-zero value is redistributed onto every
// fertile age row with the birth weights, then the age-zero row is cleared.
void CascadeSolver::trace_transpose(const BirthFn& beta, Field& slice) const {
    const TensorGrid& g = *grid_;
    std::vector<double> w0(slice.row(0), slice.row(0) + g.Nx + 1);
    for (std::size_t j = 1; j <= g.Na; ++j) {
        const double a = g.a(j);
        double* row = slice.row(j);
        for (std::size_t i = 1; i < g.Nx; ++i)
            row[i] += birth_w_[j] * beta(a, g.xs[i]) * w0[i];
    }
    double* r0 = slice.row(0);
    for (std::size_t i = 0; i <= g.Nx; ++i)
        r0[i] = 0.0;
}

CascadeSolver::ForwardOutput CascadeSolver::solve_forward(std::size_t n0, std::size_t n1,
                                                          const ForwardInput& in) const {
    const TensorGrid& g = *grid_;
    if (n1 > g.Nt || n0 > n1)
        throw std::invalid_argument("solve_forward: bad time-node window");
    if (in.u0.na != g.Na || in.u0.nx != g.Nx || in.v0.na != g.Na || in.v0.nx != g.Nx)
        throw std::invalid_argument("solve_forward: initial slice does not match the grid");

    Field cur_u = in.u0, cur_v = in.v0;
    for (std::size_t j = 0; j <= g.Na; ++j) {  // enforce the Dirichlet walls
        cur_u.at(j, 0) = cur_u.at(j, g.Nx) = 0.0;
        cur_v.at(j, 0) = cur_v.at(j, g.Nx) = 0.0;
    }

    ForwardOutput out;
    out.u.first_node = n0;
    out.v.first_node = n0;
    out.u.slices.reserve(n1 - n0 + 1);
    out.v.slices.reserve(n1 - n0 + 1);
    out.u.slices.push_back(cur_u);
    out.v.slices.push_back(cur_v);

    Field nu(g), nv(g);
    for (std::size_t n = n0 + 1; n <= n1; ++n) {
        const double t = g.t(n);

        // -- u equation ------------------------------------------------
        for (std::size_t j = g.Na; j >= 1; --j) {
            const double* src = cur_u.row(j - 1);
            double* dst = nu.row(j);
            for (std::size_t i = 0; i <= g.Nx; ++i)
                dst[i] = src[i];
        }
        for (std::size_t i = 0; i <= g.Nx; ++i)
            nu.at(0, i) = 0.0;

        if (in.control) {
            const Field& gs = slice_at(*in.control, n, "solve_forward control");
            for (std::size_t j = 1; j <= g.Na; ++j)
                for (std::size_t i = 1; i < g.Nx; ++i)
                    if (omega_mask_[i]) nu.at(j, i) += g.dt * gs.at(j, i);
        }
        if (in.source_u) {
            const Field& fs = slice_at(*in.source_u, n, "solve_forward source_u");
            for (std::size_t j = 1; j <= g.Na; ++j)
                for (std::size_t i = 1; i < g.Nx; ++i)
                    nu.at(j, i) += g.dt * fs.at(j, i);
        }

        sweep_rows(1, n, nu, 1);

        if (in.trace_u) {
            double* r0 = nu.row(0);
            r0[0] = r0[g.Nx] = 0.0;
            for (std::size_t i = 1; i < g.Nx; ++i)
                r0[i] = in.trace_u(t, g.xs[i]);
        } else {
            renewal_close(rates_.beta1, nu);
        }

        // -- v equation ------------------------------------------------
        for (std::size_t j = g.Na; j >= 1; --j) {
            const double* src = cur_v.row(j - 1);
            double* dst = nv.row(j);
            for (std::size_t i = 0; i <= g.Nx; ++i)
                dst[i] = src[i];
        }
        for (std::size_t i = 0; i <= g.Nx; ++i)
            nv.at(0, i) = 0.0;

        if (in.couple) {
            for (std::size_t j = 1; j <= g.Na; ++j) {
                const double a = g.a(j);
                for (std::size_t i = 1; i < g.Nx; ++i)
                    nv.at(j, i) += g.dt * rates_.mu21(t, a, g.xs[i]) * nu.at(j, i);
            }
        }
        if (in.source_v) {
            const Field& fs = slice_at(*in.source_v, n, "solve_forward source_v");
            for (std::size_t j = 1; j <= g.Na; ++j)
                for (std::size_t i = 1; i < g.Nx; ++i)
                    nv.at(j, i) += g.dt * fs.at(j, i);
        }

        sweep_rows(2, n, nv, 1);

        if (in.trace_v) {
            double* r0 = nv.row(0);
            r0[0] = r0[g.Nx] = 0.0;
            for (std::size_t i = 1; i < g.Nx; ++i)
                r0[i] = in.trace_v(t, g.xs[i]);
        } else {
            renewal_close(rates_.beta2, nv);
        }

        out.u.slices.push_back(nu);
        out.v.slices.push_back(nv);
        cur_u = nu;
        cur_v = nv;
    }
    return out;
}

void CascadeSolver::apply_row_operator(int eq, std::size_t n, std::size_t j,
                                       const double* in, double* out) const {
    const TensorGrid& g = *grid_;
    const double t = g.t(n);
    const double a = g.a(j);
    const std::vector<double>& kn = (eq == 1) ? k1n_ : k2n_;
    const RateFn& mu = (eq == 1) ? rates_.mu11 : rates_.mu22;
    out[0] = 0.0;
    out[g.Nx] = 0.0;
    for (std::size_t i = 1; i < g.Nx; ++i) {
        double cm, cp;
        diff_coeffs(g, i, cm, cp);
        const double lap = cm * in[i - 1] - (cm + cp) * in[i] + cp * in[i + 1];
        out[i] = in[i] + g.dt * (-kn[i] * lap + mu(t, a, g.xs[i]) * in[i]);
    }
}

CascadeSolver::GronwallReport CascadeSolver::gronwall_check(const ForwardOutput& run,
                                                            double tol) const {
    const TensorGrid& g = *grid_;
    const std::size_t n0 = run.u.first_node;
    const std::size_t steps = run.u.steps();
    const AgeSpaceRegion full = AgeSpaceRegion::full();

    GronwallReport rep;
    rep.F1.resize(steps + 1);
    rep.F2.resize(steps + 1);
    rep.G1.resize(steps + 1);
    for (std::size_t m = 0; m <= steps; ++m) {
        rep.F1[m] = weighted_l2(g, run.u.slices[m], k1_, full);
        rep.F2[m] = weighted_l2(g, run.v.slices[m], k2_, full);
        rep.G1[m] = weighted_l2(g, run.u.slices[m], k2_, full);
    }

    double sb1 = 0.0, sb2 = 0.0, sm21 = 0.0;
    for (std::size_t j = 0; j <= g.Na; ++j) {
        const double a = g.a(j);
        for (std::size_t i = 0; i <= g.Nx; ++i) {
            sb1 = std::max(sb1, std::abs(rates_.beta1(a, g.xs[i])));
            sb2 = std::max(sb2, std::abs(rates_.beta2(a, g.xs[i])));
        }
    }
    for (std::size_t m = 0; m <= steps; ++m) {
        const double t = g.t(n0 + m);
        for (std::size_t j = 0; j <= g.Na; ++j)
            for (std::size_t i = 1; i < g.Nx; ++i)
                sm21 = std::max(sm21, std::abs(rates_.mu21(t, g.a(j), g.xs[i])));
    }
    rep.C1 = sb1 * sb1 * g.A;
    rep.C2 = sb2 * sb2 * g.A + sm21;
    rep.C2u = sm21;

    const double floor_ = 1e-300;
    for (std::size_t m = 0; m <= steps; ++m) {
        const double t = double(m) * g.dt;
        const double bu = std::exp(rep.C1 * t) * rep.F1[0];
        rep.max_ratio_u = std::max(rep.max_ratio_u, rep.F1[m] / (bu * (1.0 + tol) + floor_));

        // trapezoid in s of e^{C2(t-s)} G1(s) over [0, t]
        double conv = 0.0;
        if (m > 0) {
            for (std::size_t q = 0; q <= m; ++q) {
                const double wt = (q == 0 || q == m) ? 0.5 * g.dt : g.dt;
                conv += wt * std::exp(rep.C2 * (t - double(q) * g.dt)) * rep.G1[q];
            }
        }
        const double bv = std::exp(rep.C2 * t) * rep.F2[0] + rep.C2u * conv;
        rep.max_ratio_v = std::max(rep.max_ratio_v, rep.F2[m] / (bv * (1.0 + tol) + floor_));
    }
    rep.pass_u = rep.max_ratio_u <= 1.0;
    rep.pass_v = rep.max_ratio_v <= 1.0;
    return rep;
}

} // namespace cascade
