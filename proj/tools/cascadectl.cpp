// cascadectl: config-driven experiment runner.
//
// Subcommands map one-to-one onto the library modules:
//
//   classify       degeneracy class, Carleman hypotheses, pair ordering
//   simulate       forward cascade run + growth-bound report
//   adjoint        backward run, transpose identity, characteristic oracle
//   carleman       weighted-inequality constant sweep over a random ensemble
//   observability  slice-vs-cylinder ratio tables over a random ensemble
//   hum            null-control synthesis + verification run
//   sweep          parameter sweep (eps or s) with aggregated summary
//
// Exit codes: 0 ok, 2 config error, 3 failed --strict assertion.
// Every run writes a manifest.json (config hash, seed, grid, versions,
// output list) next to its outputs; same config + same seed reproduces
// byte-identical files.

#include "cascade/config.hpp"
#include "cascade/degeneracy.hpp"
#include "cascade/hum.hpp"
#include "cascade/inequalities.hpp"
#include "cascade/io.hpp"
#include "cascade/solver.hpp"

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <cmath>
#include <future>
#include <iostream>
#include <random>
#include <string>
#include <vector>

namespace {

using namespace cascade;
using nlohmann::json;

struct AssertionFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunContext {
    ExperimentConfig cfg;
    std::vector<std::string> outputs;

    std::string path(const std::string& name) {
        outputs.push_back(name);
        return cfg.out_dir + "/" + name;
    }
    void finish(const std::string& command) {
        write_json(cfg.out_dir + "/manifest.json", manifest_json(cfg, command, outputs));
    }
};

CascadeSolver make_solver(const ExperimentConfig& cfg) {
    return CascadeSolver(cfg.grid, cfg.k1, cfg.k2, cfg.rates, cfg.hum.omega);
}

Field random_interior(const TensorGrid& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Field f(g);
    for (std::size_t j = 0; j <= g.Na; ++j)
        for (std::size_t i = 1; i < g.Nx; ++i)
            f.at(j, i) = u(rng);
    return f;
}

Trajectory random_trajectory(const TensorGrid& g, std::size_t first_node, std::size_t count,
                             std::uint64_t seed) {
    Trajectory t;
    t.first_node = first_node;
    t.slices.reserve(count);
    for (std::size_t s = 0; s < count; ++s)
        t.slices.push_back(random_interior(g, seed + 7919 * s));
    return t;
}

Field band_random_field(const TensorGrid& g, double band_lo, std::uint64_t seed,
                        std::size_t modes = 6) {
    FieldSpec spec;
    spec.kind = "band_random";
    spec.modes = modes;
    return spec.build(g, band_lo, seed);
}

const char* side_name(DegenerateSide s) {
    return s == DegenerateSide::at0 ? "at0" : "at1";
}

const char* class_name(DegeneracyClass c) {
    switch (c) {
        case DegeneracyClass::weak: return "weak";
        case DegeneracyClass::strong: return "strong";
        default: return "none";
    }
}

json stage_json(const StageReport& r) {
    return {{"iterations", r.iterations},
            {"converged", r.converged},
            {"final_residual", r.residuals.empty() ? 0.0 : r.residuals.back()},
            {"rayleigh_last", r.rayleigh_last}};
}

json hum_report_json(const HumReport& r) {
    return {{"stage1", stage_json(r.stage1)},
            {"stage2", stage_json(r.stage2)},
            {"joint", stage_json(r.joint)},
            {"control_norm", r.control_norm},
            {"initial_norm_u", r.initial_norm_u},
            {"initial_norm_v", r.initial_norm_v},
            {"band_terminal", r.band_terminal},
            {"full_terminal", r.full_terminal},
            {"uncontrolled_band", r.uncontrolled_band},
            {"uncontrolled_full", r.uncontrolled_full},
            {"residual_drop", r.residual_drop},
            {"c_hat", r.c_hat},
            {"identity_gap_1", r.identity_gap_1},
            {"identity_gap_2", r.identity_gap_2},
            {"cross_term", r.cross_term}};
}

// ---------------------------------------------------------------------------

void cmd_classify(RunContext& rc) {
    json j;
    bool ok = true;
    const KModel* models[2] = {&rc.cfg.k1, &rc.cfg.k2};
    const char* names[2] = {"k1", "k2"};
    for (int m = 0; m < 2; ++m) {
        const auto rep = classify_degeneracy(*models[m]);
        json hyp = json::array();
        for (const auto& item : check_carleman_hypotheses(*models[m])) {
            hyp.push_back({{"name", item.name}, {"pass", item.pass}, {"detail", item.detail}});
            ok = ok && item.pass;
        }
        ok = ok && rep.cls != DegeneracyClass::none;
        j[names[m]] = {{"side", side_name(rep.side)}, {"class", class_name(rep.cls)},
                       {"M_best", rep.M_best},        {"n_samples", rep.n_samples},
                       {"note", rep.note},            {"hypotheses", hyp}};
    }
    const auto pair = check_pair_ordering(rc.cfg.k1, rc.cfg.k2);
    j["pair"] = {{"ordered", pair.ordered},
                 {"min_margin", pair.min_margin},
                 {"at_x", pair.at_x}};
    ok = ok && pair.ordered;
    write_json(rc.path("classify.json"), j);
    rc.finish("classify");
    if (rc.cfg.strict && !ok)
        throw AssertionFailure("classify: a hypothesis or the pair ordering failed");
}

void cmd_simulate(RunContext& rc) {
    const auto& cfg = rc.cfg;
    const TensorGrid& g = cfg.grid;
    const auto solver = make_solver(cfg);
    CascadeSolver::ForwardInput fi;
    fi.u0 = cfg.initial_u.build(g, cfg.hum.delta, cfg.seed + 1);
    fi.v0 = cfg.initial_v.build(g, cfg.hum.delta, cfg.seed + 2);
    const auto run = solver.solve_forward(0, g.Nt, fi);
    const auto growth = solver.gronwall_check(run);

    write_slice_csv(rc.path("u_terminal.csv"), g, run.u.slices.back(), g.T);
    write_slice_csv(rc.path("v_terminal.csv"), g, run.v.slices.back(), g.T);
    if (cfg.dump == "full") {
        write_trajectory_csv(rc.path("u_trajectory.csv"), g, run.u);
        write_trajectory_csv(rc.path("v_trajectory.csv"), g, run.v);
    }
    json j = {{"C1", growth.C1},
              {"C2", growth.C2},
              {"C2u", growth.C2u},
              {"max_ratio_u", growth.max_ratio_u},
              {"max_ratio_v", growth.max_ratio_v},
              {"pass_u", growth.pass_u},
              {"pass_v", growth.pass_v},
              {"F1", growth.F1},
              {"F2", growth.F2},
              {"G1", growth.G1}};
    write_json(rc.path("gronwall.json"), j);
    rc.finish("simulate");
    if (cfg.strict && !(growth.pass_u && growth.pass_v))
        throw AssertionFailure("simulate: growth bound violated");
}

void cmd_adjoint(RunContext& rc) {
    const auto& cfg = rc.cfg;
    const TensorGrid& g = cfg.grid;
    const auto solver = make_solver(cfg);

    CascadeSolver::AdjointInput ai;
    ai.zT = cfg.terminal_z.build(g, cfg.hum.delta, cfg.seed + 3);
    ai.yT = cfg.terminal_y.build(g, cfg.hum.delta, cfg.seed + 4);
    const auto ad = solver.solve_adjoint(0, g.Nt, ai);

    write_slice_csv(rc.path("z_initial.csv"), g, ad.z.slices.front(), 0.0);
    write_slice_csv(rc.path("y_initial.csv"), g, ad.y.slices.front(), 0.0);
    if (cfg.dump == "full") {
        write_trajectory_csv(rc.path("z_trajectory.csv"), g, ad.z);
        write_trajectory_csv(rc.path("y_trajectory.csv"), g, ad.y);
    }

    // Transpose identity on one fully random dataset (data, control, sources).
    CascadeSolver::ForwardInput tf;
    tf.u0 = random_interior(g, cfg.seed + 10);
    tf.v0 = random_interior(g, cfg.seed + 11);
    const auto ctrl = random_trajectory(g, 1, g.Nt, cfg.seed + 12);
    const auto su = random_trajectory(g, 1, g.Nt, cfg.seed + 13);
    const auto sv = random_trajectory(g, 1, g.Nt, cfg.seed + 14);
    tf.control = &ctrl;
    tf.source_u = &su;
    tf.source_v = &sv;
    CascadeSolver::AdjointInput ta;
    ta.zT = random_interior(g, cfg.seed + 15);
    ta.yT = random_interior(g, cfg.seed + 16);
    const auto af = random_trajectory(g, 1, g.Nt, cfg.seed + 17);
    const auto ah = random_trajectory(g, 1, g.Nt, cfg.seed + 18);
    ta.f = &af;
    ta.h = &ah;
    const auto rep = solver.transpose_check(0, g.Nt, tf, ta);

    // Characteristic-chain oracle on every feedback-free (node, age) pair.
    double num = 0.0, den = 0.0;
    std::size_t pairs = 0;
    for (std::size_t n = 0; n < g.Nt; ++n) {
        const std::size_t m = g.Nt - n;
        for (std::size_t j = 0; j + m <= g.Na; ++j) {
            if (g.a(j + m) > cfg.rates.abar2 + 1e-12) continue;
            const auto prof = solver.characteristic_eval(ai.yT, g.Nt, n, j);
            const Field& slice = ad.y.slices[n];
            for (std::size_t i = 0; i <= g.Nx; ++i) {
                const double d = prof[i] - slice.at(j, i);
                num += d * d;
                den += slice.at(j, i) * slice.at(j, i);
            }
            ++pairs;
        }
    }
    const double rel = den > 0.0 ? std::sqrt(num / den) : 0.0;

    json j = {{"transpose",
               {{"lhs", rep.lhs},
                {"rhs", rep.rhs},
                {"relative_gap", rep.relative_gap},
                {"pass", rep.pass}}},
              {"characteristic", {{"pairs", pairs}, {"rel_l2", rel}}}};
    write_json(rc.path("adjoint.json"), j);
    rc.finish("adjoint");
    if (cfg.strict && !rep.pass)
        throw AssertionFailure("adjoint: transpose identity failed");
}

// Equation residuals of an adjoint run, in the marching sign convention.
struct AdjointResiduals {
    Trajectory fz, fy;
};

AdjointResiduals adjoint_residuals(const ExperimentConfig& cfg,
                                   const CascadeSolver::AdjointOutput& ad) {
    AdjointResiduals r;
    r.fz.first_node = ad.z.first_node;
    r.fy.first_node = ad.y.first_node;
    for (std::size_t s = 0; s < ad.z.slices.size(); ++s) {
        const TensorGrid& g = cfg.grid;
        const double tn = g.t(ad.z.first_node + s);
        Field fz(g), fy(g);
        const Field& z = ad.z.slices[s];
        const Field& y = ad.y.slices[s];
        for (std::size_t j = 0; j <= g.Na; ++j) {
            const double a = g.a(j);
            for (std::size_t i = 1; i < g.Nx; ++i) {
                const double x = g.xs[i];
                const double ratio = eval_k(cfg.k1, x) / eval_k(cfg.k2, x);
                fy.at(j, i) = cfg.rates.mu22(tn, a, x) * y.at(j, i) -
                              cfg.rates.beta2(a, x) * y.at(0, i);
                fz.at(j, i) = cfg.rates.mu11(tn, a, x) * z.at(j, i) -
                              cfg.rates.beta1(a, x) * z.at(0, i) -
                              cfg.rates.mu21(tn, a, x) * ratio * y.at(j, i);
            }
        }
        r.fz.slices.push_back(std::move(fz));
        r.fy.slices.push_back(std::move(fy));
    }
    return r;
}

void cmd_carleman(RunContext& rc) {
    const auto& cfg = rc.cfg;
    const TensorGrid& g = cfg.grid;
    const auto solver = make_solver(cfg);
    const auto w1 = CarlemanWeights::build(cfg.k1, cfg.weight_R, cfg.window);
    const auto w2 = CarlemanWeights::build(cfg.k2, cfg.weight_R, cfg.window);

    std::vector<std::vector<double>> rows_y, rows_z;
    std::vector<double> cmax_y(cfg.s_values.size(), 0.0), cmax_z(cfg.s_values.size(), 0.0);
    bool finite = true;
    for (std::size_t m = 0; m < cfg.ensemble; ++m) {
        CascadeSolver::AdjointInput ai;
        ai.zT = band_random_field(g, 0.0, cfg.seed + 100 + 2 * m);
        ai.yT = band_random_field(g, 0.0, cfg.seed + 101 + 2 * m);
        const auto ad = solver.solve_adjoint(0, g.Nt, ai);
        const auto res = adjoint_residuals(cfg, ad);
        for (std::size_t si = 0; si < cfg.s_values.size(); ++si) {
            const double s = cfg.s_values[si];
            const auto ty = carleman_sides(g, ad.y, &res.fy, cfg.k2, w2, s, cfg.hum.omega);
            const auto tz = carleman_sides(g, ad.z, &res.fz, cfg.k1, w1, s, cfg.hum.omega);
            rows_y.push_back({double(m), s, ty.lhs, ty.rhs_f, ty.rhs_omega, ty.ratio()});
            rows_z.push_back({double(m), s, tz.lhs, tz.rhs_f, tz.rhs_omega, tz.ratio()});
            cmax_y[si] = std::max(cmax_y[si], ty.ratio());
            cmax_z[si] = std::max(cmax_z[si], tz.ratio());
            finite = finite && std::isfinite(ty.ratio()) && std::isfinite(tz.ratio());
        }
    }
    const std::vector<std::string> header = {"member", "s", "lhs", "rhs_f", "rhs_omega",
                                             "ratio"};
    write_table_csv(rc.path("carleman_y.csv"), header, rows_y);
    write_table_csv(rc.path("carleman_z.csv"), header, rows_z);

    auto summarize = [&](const std::vector<double>& cmax) {
        double s_stable = cfg.s_values.back();
        bool stabilized = false;
        for (std::size_t si = 1; si < cmax.size(); ++si) {
            const double a = cmax[si - 1], b = cmax[si];
            if (std::isfinite(a) && std::isfinite(b) &&
                std::abs(a - b) <= 0.1 * std::max(std::abs(a), std::abs(b))) {
                s_stable = cfg.s_values[si];
                stabilized = true;
                break;
            }
        }
        json rows = json::array();
        for (std::size_t si = 0; si < cmax.size(); ++si)
            rows.push_back({{"s", cfg.s_values[si]}, {"c_hat", cmax[si]}});
        return json{{"rows", rows}, {"s_stable", s_stable}, {"stabilized", stabilized}};
    };
    write_json(rc.path("carleman_summary.json"),
               {{"y", summarize(cmax_y)}, {"z", summarize(cmax_z)}, {"finite", finite}});
    rc.finish("carleman");
    if (cfg.strict && !finite)
        throw AssertionFailure("carleman: non-finite ratio in the ensemble");
}

void cmd_observability(RunContext& rc) {
    const auto& cfg = rc.cfg;
    const TensorGrid& g = cfg.grid;
    const auto solver = make_solver(cfg);
    const struct {
        ObsVariant v;
        const char* name;
        bool banded;
    } variants[] = {{ObsVariant::y_lowage, "obs_y_lowage", false},
                    {ObsVariant::z_lowage, "obs_z_lowage", false},
                    {ObsVariant::y_banded, "obs_y_banded", true},
                    {ObsVariant::z_banded, "obs_z_banded", true}};

    std::vector<std::vector<std::vector<double>>> rows(4);
    double max_ratio[4] = {0, 0, 0, 0};
    double banded_terminal_max = 0.0;
    bool finite = true;
    for (std::size_t m = 0; m < cfg.ensemble; ++m) {
        CascadeSolver::AdjointInput ai;
        ai.zT = band_random_field(g, cfg.hum.delta, cfg.seed + 200 + 2 * m);
        ai.yT = band_random_field(g, cfg.hum.delta, cfg.seed + 201 + 2 * m);
        const auto ad = solver.solve_adjoint(0, g.Nt, ai);
        for (int k = 0; k < 4; ++k) {
            const auto t = observability_sides(g, ad.z, ad.y, cfg.k1, cfg.k2, cfg.rates.abar1,
                                               cfg.rates.abar2, cfg.hum.delta, variants[k].v,
                                               cfg.hum.omega);
            rows[k].push_back(
                {double(m), t.lhs, t.rhs_terminal, t.rhs_omega, t.rhs_lowage, t.ratio()});
            max_ratio[k] = std::max(max_ratio[k], t.ratio());
            finite = finite && std::isfinite(t.ratio());
            if (variants[k].banded)
                banded_terminal_max = std::max(banded_terminal_max, t.rhs_terminal);
        }
    }
    const std::vector<std::string> header = {"member",    "lhs",        "rhs_terminal",
                                             "rhs_omega", "rhs_lowage", "ratio"};
    json j;
    for (int k = 0; k < 4; ++k) {
        write_table_csv(rc.path(std::string(variants[k].name) + ".csv"), header, rows[k]);
        j[variants[k].name] = {{"max_ratio", max_ratio[k]}};
    }
    j["banded_terminal_max"] = banded_terminal_max;
    j["finite"] = finite;
    write_json(rc.path("observability_summary.json"), j);
    rc.finish("observability");
    if (cfg.strict && (!finite || banded_terminal_max != 0.0))
        throw AssertionFailure("observability: non-finite ratio or support leak");
}

std::size_t split_node(const ExperimentConfig& cfg) {
    const TensorGrid& g = cfg.grid;
    const double rn = (g.T - cfg.rates.abar1) / g.dt;
    const auto n = static_cast<std::size_t>(std::llround(rn));
    if (std::abs(rn - double(n)) > 1e-9 || n == 0 || n >= g.Nt)
        throw ConfigError("hum: T - abar1 must land on an interior time node");
    return n;
}

void cmd_hum(RunContext& rc) {
    const auto& cfg = rc.cfg;
    const TensorGrid& g = cfg.grid;
    const auto solver = make_solver(cfg);
    const Field u0 = cfg.initial_u.build(g, cfg.hum.delta, cfg.seed + 1);
    const Field v0 = cfg.initial_v.build(g, cfg.hum.delta, cfg.seed + 2);

    json j;
    const SynthesisResult* syn = nullptr;
    FullIntervalResult full;
    SynthesisResult windowed;
    if (cfg.hum_full_interval) {
        full = null_control_full(solver, u0, v0, cfg.hum);
        syn = &full.synthesis;
        write_trajectory_csv(rc.path("control.csv"), g, full.control);
        j["c_hat_full"] = full.c_hat_full;
        j["stage0"] = {{"pass_u", full.stage0_growth.pass_u},
                       {"pass_v", full.stage0_growth.pass_v},
                       {"max_ratio_u", full.stage0_growth.max_ratio_u},
                       {"max_ratio_v", full.stage0_growth.max_ratio_v}};
    } else {
        const std::size_t n0 = split_node(cfg);
        windowed = synthesize_control(solver, n0, g.Nt, u0, v0, cfg.hum);
        syn = &windowed;
        write_trajectory_csv(rc.path("control.csv"), g, windowed.control);
    }
    j["report"] = hum_report_json(syn->report);
    write_slice_csv(rc.path("u_terminal.csv"), g, syn->run.u.slices.back(), g.T);
    write_slice_csv(rc.path("v_terminal.csv"), g, syn->run.v.slices.back(), g.T);
    if (cfg.dump == "full") {
        write_trajectory_csv(rc.path("u_trajectory.csv"), g, syn->run.u);
        write_trajectory_csv(rc.path("v_trajectory.csv"), g, syn->run.v);
    }
    write_json(rc.path("hum.json"), j);
    rc.finish("hum");
    if (cfg.strict) {
        const auto& rep = syn->report;
        if (!rep.stage1.converged || !rep.stage2.converged)
            throw AssertionFailure("hum: a minimization stage did not converge");
        if (rep.residual_drop < 100.0)
            throw AssertionFailure("hum: terminal band residual drop below 100x");
    }
}

void cmd_sweep(RunContext& rc, const std::string& axis, std::vector<double> values) {
    const auto& cfg = rc.cfg;
    if (values.empty())
        throw ConfigError("sweep: --values must list at least one number");

    if (axis == "eps") {
        struct Row {
            double eps, control_norm, band_terminal, residual_drop, c_hat;
            double joint_iters;
        };
        auto run_one = [&cfg](double eps) {
            ExperimentConfig local = cfg;
            local.hum.eps = eps;
            const auto solver = make_solver(local);
            const TensorGrid& g = local.grid;
            const Field u0 = local.initial_u.build(g, local.hum.delta, local.seed + 1);
            const Field v0 = local.initial_v.build(g, local.hum.delta, local.seed + 2);
            const auto res = null_control_full(solver, u0, v0, local.hum);
            const auto& rep = res.synthesis.report;
            return Row{eps,       rep.control_norm, rep.band_terminal,
                       rep.residual_drop, rep.c_hat, double(rep.joint.iterations)};
        };
        std::vector<Row> rows(values.size(), Row{});
        const int lanes = cfg.threads > 0 ? cfg.threads : 1;
        if (lanes > 1) {
            std::vector<std::future<Row>> futs;
            futs.reserve(values.size());
            for (double v : values)
                futs.push_back(std::async(std::launch::async, run_one, v));
            for (std::size_t i = 0; i < futs.size(); ++i) rows[i] = futs[i].get();
        } else {
            for (std::size_t i = 0; i < values.size(); ++i) rows[i] = run_one(values[i]);
        }
        std::vector<std::vector<double>> table;
        for (const Row& r : rows)
            table.push_back({r.eps, r.control_norm, r.band_terminal, r.residual_drop, r.c_hat,
                             r.joint_iters});
        write_table_csv(rc.path("sweep_eps.csv"),
                        {"eps", "control_norm", "band_terminal", "residual_drop", "c_hat",
                         "joint_iterations"},
                        table);
    } else if (axis == "s") {
        ExperimentConfig local = cfg;
        local.s_values = values;
        RunContext sub{std::move(local), {}};
        cmd_carleman(sub);
        rc.outputs.insert(rc.outputs.end(), sub.outputs.begin(), sub.outputs.end());
    } else {
        throw ConfigError("sweep: unknown axis '" + axis + "' (expected eps or s)");
    }
    rc.finish("sweep");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"degenerate age-structured cascade toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    std::int64_t seed_override = -1;
    bool strict = false;
    int threads = -1;
    app.add_option("--config", config_path, "experiment config file")->required();
    app.add_option("--out", out_override, "output directory (overrides [run] out)");
    app.add_option("--seed", seed_override, "random seed (overrides [run] seed)");
    app.add_flag("--strict", strict, "nonzero exit on failed acceptance-style assertions");
    app.add_option("--threads", threads, "worker threads (overrides [run] threads)");

    auto* c_classify = app.add_subcommand("classify", "degeneracy + hypothesis report");
    auto* c_simulate = app.add_subcommand("simulate", "forward run + growth bounds");
    auto* c_adjoint = app.add_subcommand("adjoint", "backward run + transpose + oracle");
    auto* c_carleman = app.add_subcommand("carleman", "weighted inequality sweep");
    auto* c_obs = app.add_subcommand("observability", "slice observability ratios");
    auto* c_hum = app.add_subcommand("hum", "null-control synthesis");
    auto* c_sweep = app.add_subcommand("sweep", "parameter sweep");
    std::string axis = "eps";
    std::vector<double> sweep_values;
    c_sweep->add_option("--axis", axis, "eps | s");
    c_sweep->add_option("--values", sweep_values, "sweep values")->expected(-1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        RunContext rc{ExperimentConfig::load(config_path), {}};
        if (!out_override.empty()) rc.cfg.out_dir = out_override;
        if (seed_override >= 0) rc.cfg.seed = static_cast<std::uint64_t>(seed_override);
        if (strict) rc.cfg.strict = true;
        if (threads >= 0) rc.cfg.threads = threads;
#ifdef _OPENMP
        if (rc.cfg.threads > 0) omp_set_num_threads(rc.cfg.threads);
#endif
        ensure_dir(rc.cfg.out_dir);

        if (c_classify->parsed()) cmd_classify(rc);
        if (c_simulate->parsed()) cmd_simulate(rc);
        if (c_adjoint->parsed()) cmd_adjoint(rc);
        if (c_carleman->parsed()) cmd_carleman(rc);
        if (c_obs->parsed()) cmd_observability(rc);
        if (c_hum->parsed()) cmd_hum(rc);
        if (c_sweep->parsed()) cmd_sweep(rc, axis, sweep_values);
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const AssertionFailure& e) {
        std::cerr << "assertion failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
