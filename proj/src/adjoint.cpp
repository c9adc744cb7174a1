#include "cascade/solver.hpp"

#include <cmath>
#include <stdexcept>

namespace cascade {

namespace {

const Field& slice_at(const Trajectory& traj, std::size_t n, const char* what) {
    if (n < traj.first_node || n - traj.first_node >= traj.slices.size())
        throw std::invalid_argument(std::string(what) + ": trajectory does not cover the requested time node");
    return traj.slices[n - traj.first_node];
}

// In-place reverse age shift: row j <- row j+1, last row cleared.  This is the
// transpose of the forward characteristic shift under uniform age weights.
void shift_toward_zero(const TensorGrid& g, Field& f) {
    for (std::size_t j = 0; j < g.Na; ++j) {
        double* dst = f.row(j);
        const double* src = f.row(j + 1);
        for (std::size_t i = 0; i <= g.Nx; ++i)
            dst[i] = src[i];
    }
    double* last = f.row(g.Na);
    for (std::size_t i = 0; i <= g.Nx; ++i)
        last[i] = 0.0;
}

} // namespace

CascadeSolver::AdjointOutput CascadeSolver::solve_adjoint(std::size_t n0, std::size_t n1,
                                                          const AdjointInput& in) const {
    const TensorGrid& g = *grid_;
    if (n1 > g.Nt || n0 > n1)
        throw std::invalid_argument("solve_adjoint: bad time-node window");
    if (in.zT.na != g.Na || in.zT.nx != g.Nx || in.yT.na != g.Na || in.yT.nx != g.Nx)
        throw std::invalid_argument("solve_adjoint: terminal slice does not match the grid");

    const std::size_t steps = n1 - n0;
    const bool march_y = (in.frozen_y == nullptr);

    AdjointOutput out;
    out.z.first_node = n0;
    out.z.slices.assign(steps + 1, Field(g));
    out.z_mid.first_node = n0 + 1;
    out.z_mid.slices.assign(steps, Field(g));
    if (march_y) {
        out.y.first_node = n0;
        out.y.slices.assign(steps + 1, Field(g));
        out.y_mid.first_node = n0 + 1;
        out.y_mid.slices.assign(steps, Field(g));
    }

    Field cur_z = in.zT, cur_y = in.yT;
    for (std::size_t j = 0; j <= g.Na; ++j) {  // enforce the Dirichlet walls
        cur_z.at(j, 0) = cur_z.at(j, g.Nx) = 0.0;
        cur_y.at(j, 0) = cur_y.at(j, g.Nx) = 0.0;
    }
    out.z.slices[steps] = cur_z;
    if (march_y) out.y.slices[steps] = cur_y;

    for (std::size_t n = n1; n > n0; --n) {
        const double t = g.t(n);

        // -- y equation (decoupled) -------------------------------------
        Field wy(g);
        if (march_y) {
            wy = cur_y;
            if (in.h) {
                const Field& hs = slice_at(*in.h, n, "solve_adjoint h");
                for (std::size_t j = 0; j <= g.Na; ++j)
                    for (std::size_t i = 1; i < g.Nx; ++i)
                        wy.at(j, i) -= g.dt * hs.at(j, i);
            }
            trace_transpose(rates_.beta2, wy);
            sweep_rows(2, n, wy, 1);
            out.y_mid.slices[n - 1 - n0] = wy;
        }

        // -- z equation -------------------------------------------------
        Field wz = cur_z;
        if (in.f) {
            const Field& fs = slice_at(*in.f, n, "solve_adjoint f");
            for (std::size_t j = 0; j <= g.Na; ++j)
                for (std::size_t i = 1; i < g.Nx; ++i)
                    wz.at(j, i) -= g.dt * fs.at(j, i);
        }
        if (in.couple || in.frozen_y) {
            const Field& yh = in.frozen_y ? slice_at(*in.frozen_y, n, "solve_adjoint frozen_y")
                                          : wy;
            for (std::size_t j = 1; j <= g.Na; ++j) {
                const double a = g.a(j);
                for (std::size_t i = 1; i < g.Nx; ++i)
                    wz.at(j, i) += g.dt * rates_.mu21(t, a, g.xs[i]) * couple_w_[i] * yh.at(j, i);
            }
        }
        trace_transpose(rates_.beta1, wz);
        sweep_rows(1, n, wz, 1);
        out.z_mid.slices[n - 1 - n0] = wz;

        if (march_y) {
            shift_toward_zero(g, wy);
            cur_y = wy;
            out.y.slices[n - 1 - n0] = cur_y;
        }
        shift_toward_zero(g, wz);
        cur_z = wz;
        out.z.slices[n - 1 - n0] = cur_z;
    }
    return out;
}

std::vector<double> CascadeSolver::characteristic_eval(const Field& yT, std::size_t n1,
                                                       std::size_t n, std::size_t j) const {
    const TensorGrid& g = *grid_;
    if (n1 > g.Nt || n > n1 || j > g.Na)
        throw std::invalid_argument("characteristic_eval: point off the lattice");
    const std::size_t m = n1 - n;
    if (j + m > g.Na)
        throw std::invalid_argument("characteristic_eval: characteristic exits the age interval");
    const double eps = 1e-12 * (1.0 + g.A);
    if (g.a(j + m) > rates_.abar2 + eps)
        throw std::invalid_argument(
            "characteristic_eval: outside the feedback-free regime (terminal age must not "
            "exceed the fertility onset)");

    std::vector<double> profile(yT.row(j + m), yT.row(j + m) + g.Nx + 1);
    profile[0] = profile[g.Nx] = 0.0;
    for (std::size_t nn = n1; nn > n; --nn) {
        const std::size_t jj = j + (nn - n);
        solve_row(2, nn, jj, profile.data());
    }
    return profile;
}

CascadeSolver::TransposeReport CascadeSolver::transpose_check(std::size_t n0, std::size_t n1,
                                                              const ForwardInput& fwd,
                                                              const AdjointInput& adj,
                                                              double tol) const {
    const TensorGrid& g = *grid_;
    if (fwd.trace_u || fwd.trace_v)
        throw std::invalid_argument("transpose_check: prescribed traces break the duality identity");
    if (adj.frozen_y)
        throw std::invalid_argument("transpose_check: frozen intermediates are not a marched adjoint");
    if (fwd.couple != adj.couple)
        throw std::invalid_argument("transpose_check: forward and adjoint coupling flags differ");

    const ForwardOutput fw = solve_forward(n0, n1, fwd);
    const AdjointOutput ad = solve_adjoint(n0, n1, adj);

    double lhs = dual_pair(g, fw.u.slices.back(), adj.zT, k1_) +
                 dual_pair(g, fw.v.slices.back(), adj.yT, k2_) -
                 dual_pair(g, fw.u.slices.front(), ad.z.slices.front(), k1_) -
                 dual_pair(g, fw.v.slices.front(), ad.y.slices.front(), k2_);

    double rhs = 0.0;
    for (std::size_t n = n0 + 1; n <= n1; ++n) {
        const std::size_t s = n - n0;
        if (fwd.control) {
            Field gm = slice_at(*fwd.control, n, "transpose_check control");
            apply_omega_mask(gm);
            rhs += g.dt * dual_pair(g, gm, ad.z_mid.slices[s - 1], k1_);
        }
        if (fwd.source_u)
            rhs += g.dt * dual_pair(g, slice_at(*fwd.source_u, n, "transpose_check source_u"),
                                    ad.z_mid.slices[s - 1], k1_);
        if (fwd.source_v)
            rhs += g.dt * dual_pair(g, slice_at(*fwd.source_v, n, "transpose_check source_v"),
                                    ad.y_mid.slices[s - 1], k2_);
        if (adj.f)
            rhs += g.dt * dual_pair(g, fw.u.slices[s], slice_at(*adj.f, n, "transpose_check f"), k1_);
        if (adj.h)
            rhs += g.dt * dual_pair(g, fw.v.slices[s], slice_at(*adj.h, n, "transpose_check h"), k2_);
    }

    TransposeReport rep;
    rep.lhs = lhs;
    rep.rhs = rhs;
    rep.relative_gap = std::abs(lhs - rhs) / (std::abs(lhs) + std::abs(rhs) + 1e-300);
    rep.pass = rep.relative_gap <= tol;
    return rep;
}

} // namespace cascade
