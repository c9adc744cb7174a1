#include "cascade/hum.hpp"

#include "cascade/quadrature.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace cascade {

namespace {

void vaxpy(Field& y, double a, const Field& x) {
    for (std::size_t q = 0; q < y.v.size(); ++q)
        y.v[q] += a * x.v[q];
}

void vscale(Field& y, double a) {
    for (double& t : y.v)
        t *= a;
}

struct GPair {
    Field g1, g2;
};

void vaxpy(GPair& y, double a, const GPair& x) {
    vaxpy(y.g1, a, x.g1);
    vaxpy(y.g2, a, x.g2);
}

void vscale(GPair& y, double a) {
    vscale(y.g1, a);
    vscale(y.g2, a);
}

// Node-diagonal pairing with a precomputed x-weight row (zero on the walls).
double wip(const TensorGrid& g, const std::vector<double>& wx, const Field& F, const Field& G) {
    double total = 0.0;
    for (std::size_t j = 0; j <= g.Na; ++j) {
        const double* fr = F.row(j);
        const double* gr = G.row(j);
        double s = 0.0;
        for (std::size_t i = 1; i < g.Nx; ++i)
            s += wx[i] * fr[i] * gr[i];
        total += g.da * s;
    }
    return total;
}

template <class Vec, class MatVec, class IpFn>
Vec cg_solve(MatVec&& apply, IpFn&& ip, const Vec& rhs, Vec x, double tol,
             std::size_t maxiter, StageReport& rep) {
    Vec r = rhs;
    {
        Vec ax = apply(x);
        vaxpy(r, -1.0, ax);
    }
    double rr = ip(r, r);
    const double bnorm = std::sqrt(ip(rhs, rhs));
    const double scale = bnorm > 0.0 ? bnorm : std::sqrt(rr);
    rep.residuals.push_back(scale > 0.0 ? std::sqrt(rr) / scale : 0.0);
    if (scale == 0.0 || std::sqrt(rr) <= tol * scale) {
        rep.converged = true;
        return x;
    }
    Vec p = r;
    for (std::size_t it = 0; it < maxiter; ++it) {
        Vec ap = apply(p);
        const double pap = ip(p, ap);
        if (!(pap > 0.0))
            throw std::runtime_error("hum: CG operator lost positive definiteness");
        rep.rayleigh_last = pap / ip(p, p);
        const double alpha = rr / pap;
        vaxpy(x, alpha, p);
        vaxpy(r, -alpha, ap);
        const double rr2 = ip(r, r);
        rep.iterations = it + 1;
        rep.residuals.push_back(std::sqrt(rr2) / scale);
        if (std::sqrt(rr2) <= tol * scale) {
            rep.converged = true;
            return x;
        }
        const double beta = rr2 / rr;
        rr = rr2;
        vscale(p, beta);
        vaxpy(p, 1.0, r);
    }
    return x;
}

Trajectory masked_copy(const CascadeSolver& solver, const Trajectory& t) {
    Trajectory out = t;
    for (Field& f : out.slices)
        solver.apply_omega_mask(f);
    return out;
}

void validate_setup(const CascadeSolver& solver, const ControlSetup& setup) {
    const TensorGrid& g = solver.grid();
    const AgeSpaceRegion& om = setup.omega;
    if (!(om.x_lo > 0.0) || !(om.x_hi < 1.0) || !(om.x_lo < om.x_hi))
        throw std::invalid_argument("hum: control region must be a proper interior x-interval");
    // the setup record declares the region, the solver executes it; a silent
    // disagreement would report one region while steering through another
    if (om.x_lo != solver.omega().x_lo || om.x_hi != solver.omega().x_hi)
        throw std::invalid_argument("hum: setup control region disagrees with the solver's");
    const double gamma = std::max(solver.rates().abar1, solver.rates().abar2);
    if (!(setup.delta > gamma) || !(setup.delta < g.A))
        throw std::invalid_argument("hum: delta must lie between the fertility onsets and A");
    if (!(setup.eps > 0.0))
        throw std::invalid_argument("hum: penalization must be positive");
    bool any = false;
    for (char c : solver.omega_mask())
        any = any || (c != 0);
    if (!any)
        throw std::invalid_argument("hum: control region contains no interior mesh node");
}

void check_band_support(const TensorGrid& g, const Field& f, double delta, const char* what) {
    Field masked = f;
    band_mask(g, delta, masked);
    for (std::size_t q = 0; q < f.v.size(); ++q)
        if (f.v[q] != masked.v[q])
            throw std::invalid_argument(std::string(what) +
                                        ": terminal data violate the support constraint");
}

// Reporting region for the steered band: the open interval above delta, so
// the first row is the one strictly past the support threshold.
AgeSpaceRegion open_band(const TensorGrid& g, double delta) {
    return AgeSpaceRegion::ages(delta + 0.5 * g.da, g.A);
}

double pair_norm(const TensorGrid& g, const Field& u, const Field& v, const KModel& k1,
                 const KModel& k2, const AgeSpaceRegion& region) {
    return std::sqrt(weighted_l2(g, u, k1, region) + weighted_l2(g, v, k2, region));
}

double relative_gap(double a, double b) {
    return std::abs(a - b) / (std::abs(a) + std::abs(b) + 1e-300);
}

} // namespace

void band_mask(const TensorGrid& g, double delta, Field& f) {
    // The a = A row stays live: terminal data there is solved into the
    // adjoint's first backward step (pairing with the control) before the
    // reverse shift carries it down, so the row is observable and must be
    // steered along with the rest of the band the reports measure.
    const double eps = 1e-12 * (1.0 + g.A);
    for (std::size_t j = 0; j <= g.Na; ++j) {
        double* row = f.row(j);
        if (g.a(j) <= delta + eps) {
            for (std::size_t i = 0; i <= g.Nx; ++i)
                row[i] = 0.0;
        } else {
            row[0] = 0.0;
            row[g.Nx] = 0.0;
        }
    }
}

double functional_J(const CascadeSolver& solver, std::size_t n0, std::size_t n1,
                    const Field& g2, const Field& v0, const ControlSetup& setup) {
    validate_setup(solver, setup);
    const TensorGrid& g = solver.grid();
    check_band_support(g, g2, setup.delta, "functional_J");

    CascadeSolver::AdjointInput ai;
    ai.zT = Field(g);
    ai.yT = g2;
    ai.couple = false;
    const auto ad = solver.solve_adjoint(n0, n1, ai);

    auto wx2 = dual_x_weights(g, solver.k2());
    auto wx2_om = wx2;
    for (std::size_t i = 0; i <= g.Nx; ++i)
        if (!solver.omega_mask()[i]) wx2_om[i] = 0.0;

    double cyl = 0.0;
    for (const Field& f : ad.y_mid.slices)
        cyl += g.dt * wip(g, wx2_om, f, f);
    return 0.5 * cyl + wip(g, wx2, ad.y.slices.front(), v0) + 0.5 * setup.eps * wip(g, wx2, g2, g2);
}

double functional_F(const CascadeSolver& solver, std::size_t n0, std::size_t n1,
                    const Field& g1, const Field& u0, const Trajectory& frozen_y,
                    const ControlSetup& setup) {
    validate_setup(solver, setup);
    const TensorGrid& g = solver.grid();
    check_band_support(g, g1, setup.delta, "functional_F");

    CascadeSolver::AdjointInput ai;
    ai.zT = g1;
    ai.yT = Field(g);
    ai.frozen_y = &frozen_y;
    const auto ad = solver.solve_adjoint(n0, n1, ai);

    auto wx1 = dual_x_weights(g, solver.k1());
    auto wx1_om = wx1;
    for (std::size_t i = 0; i <= g.Nx; ++i)
        if (!solver.omega_mask()[i]) wx1_om[i] = 0.0;

    double cyl = 0.0;
    for (const Field& f : ad.z_mid.slices)
        cyl += g.dt * wip(g, wx1_om, f, f);
    return 0.5 * cyl + wip(g, wx1, ad.z.slices.front(), u0) + 0.5 * setup.eps * wip(g, wx1, g1, g1);
}

namespace {

// One gradient application for stage 1: backward from p, forward with the
// omega-restricted intermediates as a distributed source, band-masked
// terminal slice plus the penalization.  With include_data, the forward
// march also carries the initial data, turning A p into A p + b.
Field apply_J(const CascadeSolver& solver, std::size_t n0, std::size_t n1, const Field& p,
              const Field* v0, double eps, double delta) {
    const TensorGrid& g = solver.grid();
    CascadeSolver::AdjointInput ai;
    ai.zT = Field(g);
    ai.yT = p;
    ai.couple = false;
    const auto ad = solver.solve_adjoint(n0, n1, ai);
    const Trajectory src = masked_copy(solver, ad.y_mid);

    CascadeSolver::ForwardInput fi;
    fi.u0 = Field(g);
    fi.v0 = v0 ? *v0 : Field(g);
    fi.source_v = &src;
    fi.couple = false;
    const auto fw = solver.solve_forward(n0, n1, fi);

    Field out = fw.v.slices.back();
    band_mask(g, delta, out);
    vaxpy(out, eps, p);
    return out;
}

Field apply_F(const CascadeSolver& solver, std::size_t n0, std::size_t n1, const Field& p,
              const Field* u0, const Trajectory* frozen_y, double eps, double delta) {
    const TensorGrid& g = solver.grid();
    CascadeSolver::AdjointInput ai;
    ai.zT = p;
    ai.yT = Field(g);
    ai.couple = false;
    ai.frozen_y = frozen_y;  // only set for the affine part
    const auto ad = solver.solve_adjoint(n0, n1, ai);

    CascadeSolver::ForwardInput fi;
    fi.u0 = u0 ? *u0 : Field(g);
    fi.v0 = Field(g);
    fi.control = &ad.z_mid;  // omega mask applied by the march
    fi.couple = false;
    const auto fw = solver.solve_forward(n0, n1, fi);

    Field out = fw.u.slices.back();
    band_mask(g, delta, out);
    vaxpy(out, eps, p);
    return out;
}

} // namespace

Field gradient_J(const CascadeSolver& solver, std::size_t n0, std::size_t n1,
                 const Field& g2, const Field& v0, const ControlSetup& setup) {
    validate_setup(solver, setup);
    check_band_support(solver.grid(), g2, setup.delta, "gradient_J");
    return apply_J(solver, n0, n1, g2, &v0, setup.eps, setup.delta);
}

Field gradient_F(const CascadeSolver& solver, std::size_t n0, std::size_t n1,
                 const Field& g1, const Field& u0, const Trajectory& frozen_y,
                 const ControlSetup& setup) {
    validate_setup(solver, setup);
    check_band_support(solver.grid(), g1, setup.delta, "gradient_F");
    return apply_F(solver, n0, n1, g1, &u0, &frozen_y, setup.eps, setup.delta);
}

StageResult minimize_J(const CascadeSolver& solver, std::size_t n0, std::size_t n1,
                       const Field& v0, const ControlSetup& setup) {
    validate_setup(solver, setup);
    const TensorGrid& g = solver.grid();
    const auto wx2 = dual_x_weights(g, solver.k2());

    // rhs = -b: minus the band-masked terminal slice of the free data march
    Field rhs(g);
    {
        CascadeSolver::ForwardInput fi;
        fi.u0 = Field(g);
        fi.v0 = v0;
        fi.couple = false;
        const auto fw = solver.solve_forward(n0, n1, fi);
        rhs = fw.v.slices.back();
        band_mask(g, setup.delta, rhs);
        vscale(rhs, -1.0);
    }

    StageResult res;
    auto apply = [&](const Field& p) {
        return apply_J(solver, n0, n1, p, nullptr, setup.eps, setup.delta);
    };
    auto ip = [&](const Field& a, const Field& b) { return wip(g, wx2, a, b); };
    res.g = cg_solve(apply, ip, rhs, Field(g), setup.cg_tol, setup.cg_maxiter, res.report);

    CascadeSolver::AdjointInput ai;
    ai.zT = Field(g);
    ai.yT = res.g;
    ai.couple = false;
    res.adj = solver.solve_adjoint(n0, n1, ai);
    return res;
}

StageResult minimize_F(const CascadeSolver& solver, std::size_t n0, std::size_t n1,
                       const Field& u0, const Trajectory& frozen_y, const ControlSetup& setup) {
    validate_setup(solver, setup);
    const TensorGrid& g = solver.grid();
    const auto wx1 = dual_x_weights(g, solver.k1());

    Field rhs(g);
    {
        // b folds the affine source and the initial data into one march
        Field zero(g);
        rhs = apply_F(solver, n0, n1, zero, &u0, &frozen_y, setup.eps, setup.delta);
        vscale(rhs, -1.0);
    }

    StageResult res;
    auto apply = [&](const Field& p) {
        return apply_F(solver, n0, n1, p, nullptr, nullptr, setup.eps, setup.delta);
    };
    auto ip = [&](const Field& a, const Field& b) { return wip(g, wx1, a, b); };
    res.g = cg_solve(apply, ip, rhs, Field(g), setup.cg_tol, setup.cg_maxiter, res.report);

    CascadeSolver::AdjointInput ai;
    ai.zT = res.g;
    ai.yT = Field(g);
    ai.frozen_y = &frozen_y;
    res.adj = solver.solve_adjoint(n0, n1, ai);
    return res;
}

SynthesisResult synthesize_control(const CascadeSolver& solver, std::size_t n0, std::size_t n1,
                                   const Field& u0, const Field& v0, const ControlSetup& setup) {
    validate_setup(solver, setup);
    const TensorGrid& g = solver.grid();
    const auto wx1 = dual_x_weights(g, solver.k1());
    const auto wx2 = dual_x_weights(g, solver.k2());
    auto wx1_om = wx1;
    auto wx2_om = wx2;
    for (std::size_t i = 0; i <= g.Nx; ++i) {
        if (!solver.omega_mask()[i]) {
            wx1_om[i] = 0.0;
            wx2_om[i] = 0.0;
        }
    }

    SynthesisResult out;

    // Uncontrolled baseline.
    {
        CascadeSolver::ForwardInput fi;
        fi.u0 = u0;
        fi.v0 = v0;
        const auto fw = solver.solve_forward(n0, n1, fi);
        out.free_run = fw;
    }

    // Stage 1: pin the decoupled component's terminal data.
    StageResult s1 = minimize_J(solver, n0, n1, v0, setup);
    out.report.stage1 = s1.report;

    // Stage 2: steer u against the frozen stage-1 intermediates.
    StageResult s2 = minimize_F(solver, n0, n1, u0, s1.adj.y_mid, setup);
    out.report.stage2 = s2.report;

    // Duality identities of the staged minimizers.
    {
        double cyl1 = 0.0;
        for (const Field& f : s1.adj.y_mid.slices)
            cyl1 += g.dt * wip(g, wx2_om, f, f);
        const double lhs1 = cyl1 + setup.eps * wip(g, wx2, s1.g, s1.g);
        const double rhs1 = -wip(g, wx2, s1.adj.y.slices.front(), v0);
        out.report.identity_gap_1 = relative_gap(lhs1, rhs1);

        CascadeSolver::AdjointInput hom;
        hom.zT = s2.g;
        hom.yT = Field(g);
        hom.couple = false;
        const auto ad_hom = solver.solve_adjoint(n0, n1, hom);

        double cyl2 = 0.0;
        for (std::size_t q = 0; q < s2.adj.z_mid.slices.size(); ++q)
            cyl2 += g.dt * wip(g, wx1_om, s2.adj.z_mid.slices[q], ad_hom.z_mid.slices[q]);
        const double lhs2 = cyl2 + setup.eps * wip(g, wx1, s2.g, s2.g);
        const double rhs2 = -wip(g, wx1, ad_hom.z.slices.front(), u0);
        out.report.identity_gap_2 = relative_gap(lhs2, rhs2);

        // Cross pairing with the frozen-source part: the amount by which the
        // staged construction leaves the printed self-pairing identity open.
        CascadeSolver::AdjointInput part;
        part.zT = Field(g);
        part.yT = Field(g);
        part.frozen_y = &s1.adj.y_mid;
        const auto ad_p = solver.solve_adjoint(n0, n1, part);
        double cross = wip(g, wx1, ad_p.z.slices.front(), u0);
        for (std::size_t q = 0; q < s2.adj.z_mid.slices.size(); ++q)
            cross += g.dt * wip(g, wx1_om, s2.adj.z_mid.slices[q], ad_p.z_mid.slices[q]);
        out.report.cross_term = cross;
    }

    out.g1 = s2.g;
    out.g2 = s1.g;

    // Joint refinement: one conjugate gradient over the stacked pair against
    // the coupled backward/forward pair, started from the staged result.
    if (setup.joint_refine) {
        auto apply = [&](const GPair& p) {
            CascadeSolver::AdjointInput ai;
            ai.zT = p.g1;
            ai.yT = p.g2;
            ai.couple = true;
            const auto ad = solver.solve_adjoint(n0, n1, ai);
            CascadeSolver::ForwardInput fi;
            fi.u0 = Field(g);
            fi.v0 = Field(g);
            fi.control = &ad.z_mid;
            fi.couple = true;
            const auto fw = solver.solve_forward(n0, n1, fi);
            GPair r{fw.u.slices.back(), fw.v.slices.back()};
            band_mask(g, setup.delta, r.g1);
            band_mask(g, setup.delta, r.g2);
            vaxpy(r.g1, setup.eps, p.g1);
            vaxpy(r.g2, setup.eps, p.g2);
            return r;
        };
        auto ip = [&](const GPair& a, const GPair& b) {
            return wip(g, wx1, a.g1, b.g1) + wip(g, wx2, a.g2, b.g2);
        };
        GPair rhs{out.free_run.u.slices.back(), out.free_run.v.slices.back()};
        band_mask(g, setup.delta, rhs.g1);
        band_mask(g, setup.delta, rhs.g2);
        vscale(rhs, -1.0);
        GPair start{out.g1, out.g2};
        GPair sol = cg_solve(apply, ip, rhs, std::move(start), setup.cg_tol, setup.cg_maxiter,
                             out.report.joint);
        out.g1 = sol.g1;
        out.g2 = sol.g2;
    }

    // Final backward march of the refined pair and the control it induces.
    {
        CascadeSolver::AdjointInput ai;
        ai.zT = out.g1;
        ai.yT = out.g2;
        if (setup.joint_refine) {
            ai.couple = true;
        } else {
            ai.couple = false;
            ai.frozen_y = &s1.adj.y_mid;
        }
        const auto ad = solver.solve_adjoint(n0, n1, ai);
        out.control = masked_copy(solver, ad.z_mid);
    }

    // Verification run and report.
    {
        CascadeSolver::ForwardInput fi;
        fi.u0 = u0;
        fi.v0 = v0;
        fi.control = &out.control;
        const auto fw = solver.solve_forward(n0, n1, fi);
        out.run = fw;

        const AgeSpaceRegion band = open_band(g, setup.delta);
        const AgeSpaceRegion full = AgeSpaceRegion::full();
        HumReport& rep = out.report;
        rep.band_terminal = pair_norm(g, fw.u.slices.back(), fw.v.slices.back(), solver.k1(),
                                      solver.k2(), band);
        rep.full_terminal = pair_norm(g, fw.u.slices.back(), fw.v.slices.back(), solver.k1(),
                                      solver.k2(), full);
        rep.uncontrolled_band = pair_norm(g, out.free_run.u.slices.back(),
                                          out.free_run.v.slices.back(), solver.k1(), solver.k2(),
                                          band);
        rep.uncontrolled_full = pair_norm(g, out.free_run.u.slices.back(),
                                          out.free_run.v.slices.back(), solver.k1(), solver.k2(),
                                          full);
        rep.residual_drop = rep.uncontrolled_band / (rep.band_terminal + 1e-300);

        double gsq = 0.0;
        for (const Field& f : out.control.slices)
            gsq += g.dt * wip(g, wx1, f, f);
        rep.control_norm = std::sqrt(gsq);
        rep.initial_norm_u = std::sqrt(weighted_l2(g, u0, solver.k1(), full));
        rep.initial_norm_v = std::sqrt(weighted_l2(g, v0, solver.k2(), full));
        rep.c_hat = rep.control_norm / (rep.initial_norm_u + rep.initial_norm_v + 1e-300);
    }
    return out;
}

FullIntervalResult null_control_full(const CascadeSolver& solver, const Field& u0,
                                     const Field& v0, const ControlSetup& setup) {
    validate_setup(solver, setup);
    const TensorGrid& g = solver.grid();
    const RatePack& rates = solver.rates();
    if (std::abs(rates.abar1 - rates.abar2) > 1e-12 * (1.0 + g.A))
        throw std::invalid_argument("null_control_full: fertility onsets must coincide");
    if (setup.require_equal_k) {
        for (std::size_t i = 1; i < g.Nx; ++i) {
            const double a = eval_k(solver.k1(), g.xs[i]);
            const double b = eval_k(solver.k2(), g.xs[i]);
            if (std::abs(a - b) > 1e-12 * std::max(a, b))
                throw std::invalid_argument(
                    "null_control_full: coefficients differ on the mesh; clear "
                    "require_equal_k to run the unguaranteed variant");
        }
    }
    const double t_split = g.T - rates.abar1;
    const double rn = t_split / g.dt;
    const auto n_split = static_cast<std::size_t>(std::llround(rn));
    if (std::abs(rn - double(n_split)) > 1e-9 || n_split == 0 || n_split >= g.Nt)
        throw std::invalid_argument("null_control_full: T - abar1 must be an interior time node");

    FullIntervalResult out;
    {
        CascadeSolver::ForwardInput fi;
        fi.u0 = u0;
        fi.v0 = v0;
        out.stage0 = solver.solve_forward(0, n_split, fi);
    }
    out.stage0_growth = solver.gronwall_check(out.stage0);

    out.synthesis = synthesize_control(solver, n_split, g.Nt, out.stage0.u.slices.back(),
                                       out.stage0.v.slices.back(), setup);

    out.control.first_node = 1;
    out.control.slices.assign(g.Nt, Field(g));
    for (std::size_t n = n_split + 1; n <= g.Nt; ++n)
        out.control.slices[n - 1] = out.synthesis.control.slices[n - (n_split + 1)];

    const AgeSpaceRegion full = AgeSpaceRegion::full();
    const double nu0 = std::sqrt(weighted_l2(g, u0, solver.k1(), full));
    const double nv0 = std::sqrt(weighted_l2(g, v0, solver.k2(), full));
    out.c_hat_full = out.synthesis.report.control_norm / (nu0 + nv0 + 1e-300);
    return out;
}

} // namespace cascade
