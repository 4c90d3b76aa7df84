#include "fracbilin/adjoint.hpp"
#include "fracbilin/diagnostics.hpp"
#include "fracbilin/errors.hpp"
#include "fracbilin/forward.hpp"
#include "fracbilin/fracop.hpp"
#include "fracbilin/io.hpp"
#include "fracbilin/optimize.hpp"
#include "fracbilin/problem.hpp"
#include "fracbilin/sensitivity.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace fracbilin;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitSolver = 2;
constexpr int kExitStrictFail = 3;

struct CommonOpts {
    std::string config_path;
    std::string out_dir; // empty = no artifacts
    std::optional<std::uint64_t> seed_override;
    bool strict = false;
    bool force = false;
};

struct RunContext {
    CaseConfig cfg;
    std::string config_hash;
    std::string command_line;
    std::string started;
    std::vector<std::string> outputs;
};

RunContext begin_run(const CommonOpts& o, const std::string& command_line) {
    RunContext ctx;
    ctx.cfg = load_case(o.config_path);
    if (o.seed_override) ctx.cfg.opt.seed = *o.seed_override;
    ctx.config_hash = hex64(fnv1a64(canonical_serialize(ctx.cfg)));
    ctx.command_line = command_line;
    ctx.started = iso8601_utc_now();
    if (!o.out_dir.empty()) prepare_out_dir(o.out_dir, o.force);
    return ctx;
}

void emit(RunContext& ctx, const std::string& out_dir, const std::string& name,
          const std::string& content) {
    write_text_file(out_dir + "/" + name, content);
    ctx.outputs.push_back(name);
}

void finish_run(RunContext& ctx, const std::string& out_dir) {
    if (out_dir.empty()) return;
    write_manifest(out_dir, ctx.config_hash, ctx.command_line, ctx.outputs, ctx.started,
                   iso8601_utc_now());
}

// the feasible control nearest zero: the baseline for solve/optimize/sosc
ControlField baseline_control(const ProblemSpec& spec, const Grid& g, const TimeGrid& tg) {
    return project_control(zero_field(tg, g), spec, g);
}

DiagnosticsReport entries_report(std::vector<CheckEntry> entries) {
    std::sort(entries.begin(), entries.end(),
              [](const CheckEntry& a, const CheckEntry& b) { return a.name < b.name; });
    DiagnosticsReport rep;
    rep.entries = std::move(entries);
    for (const CheckEntry& e : rep.entries)
        (e.pass ? rep.n_pass : rep.n_fail) += 1;
    return rep;
}

int cmd_solve(const CommonOpts& o, const std::string& cmdline) {
    RunContext ctx = begin_run(o, cmdline);
    const Discretization disc = make_discretization(ctx.cfg.spec, ctx.cfg.disc);
    const ControlField v = baseline_control(ctx.cfg.spec, disc.grid, disc.tg);
    const Field y = solve_forward(ctx.cfg.spec, disc, v);

    std::vector<CheckEntry> entries = check_estimates(ctx.cfg.spec, disc, v, y);
    for (CheckEntry e : check_transformed_estimates(ctx.cfg.spec, disc, v))
        entries.push_back(std::move(e));
    const DiagnosticsReport rep = entries_report(std::move(entries));

    emit(ctx, o.out_dir, "y.csv", field_csv_string(y, disc.grid, disc.tg));
    emit(ctx, o.out_dir, "estimates.json", report_json(rep));
    finish_run(ctx, o.out_dir);
    std::cout << report_table(rep);
    return kExitOk;
}

int cmd_optimize(const CommonOpts& o, const std::string& cmdline) {
    RunContext ctx = begin_run(o, cmdline);
    const Discretization disc = make_discretization(ctx.cfg.spec, ctx.cfg.disc);
    const ControlField u0 = baseline_control(ctx.cfg.spec, disc.grid, disc.tg);
    const OptResult res = solve_pgd(ctx.cfg.spec, disc, ctx.cfg.opt, u0);

    nlohmann::json j;
    j["converged"] = res.converged;
    j["iterations"] = res.iterations;
    j["final_cost"] = res.J_history.back();
    j["final_residual"] = res.residual_history.back();
    j["J_history"] = res.J_history;
    j["residual_history"] = res.residual_history;
    j["outputs"] = {{"u", "u.csv"}, {"y", "y.csv"}, {"q", "q.csv"}};

    emit(ctx, o.out_dir, "u.csv", field_csv_string(res.u_opt, disc.grid, disc.tg));
    emit(ctx, o.out_dir, "y.csv", field_csv_string(res.y_opt, disc.grid, disc.tg));
    emit(ctx, o.out_dir, "q.csv", field_csv_string(res.q_opt, disc.grid, disc.tg));
    emit(ctx, o.out_dir, "result.json", j.dump(2) + "\n");
    finish_run(ctx, o.out_dir);

    std::printf("%s after %d iterations, cost %.12g, residual %.3e\n",
                res.converged ? "converged" : "NOT converged", res.iterations,
                res.J_history.back(), res.residual_history.back());
    if (!res.converged && o.strict) return kExitStrictFail;
    return kExitOk;
}

int cmd_diagnose(const CommonOpts& o, const std::string& suite_arg,
                 const std::string& cmdline) {
    const Suite suite = parse_suite(suite_arg);
    RunContext ctx = begin_run(o, cmdline);
    const Discretization disc = make_discretization(ctx.cfg.spec, ctx.cfg.disc);
    const DiagnosticsReport rep = run_suite(ctx.cfg.spec, disc, suite, ctx.cfg.opt.seed);
    std::cout << report_table(rep);
    if (!o.out_dir.empty()) {
        emit(ctx, o.out_dir, "report.json", report_json(rep));
        finish_run(ctx, o.out_dir);
    }
    if (rep.n_fail > 0 && o.strict) return kExitStrictFail;
    return kExitOk;
}

int cmd_uniqueness(const CommonOpts& o, int n_starts, const std::string& cmdline) {
    RunContext ctx = begin_run(o, cmdline);
    const Discretization disc = make_discretization(ctx.cfg.spec, ctx.cfg.disc);
    const UniquenessReport rep =
        uniqueness_experiment(ctx.cfg.spec, disc, ctx.cfg.opt, n_starts);

    nlohmann::json j;
    j["n_starts"] = rep.n_starts;
    j["alpha"] = rep.alpha;
    j["sigma"] = rep.sigma;
    j["c_emp"] = rep.c_emp;
    j["pairwise"] = rep.pairwise;
    j["max_distance"] = rep.max_distance;
    j["iterations"] = rep.iterations;
    j["asserted"] = rep.asserted;
    j["passed"] = rep.passed;
    emit(ctx, o.out_dir, "uniqueness.json", j.dump(2) + "\n");
    finish_run(ctx, o.out_dir);

    std::printf("%d starts, max pairwise distance %.3e%s\n", rep.n_starts, rep.max_distance,
                rep.asserted ? (rep.passed ? " (uniqueness holds)" : " (uniqueness VIOLATED)")
                             : " (alpha below the asserted regime)");
    if (!rep.passed && o.strict) return kExitStrictFail;
    return kExitOk;
}

int cmd_sosc(const CommonOpts& o, double tau, int n_samples, const std::string& cmdline) {
    RunContext ctx = begin_run(o, cmdline);
    const Discretization disc = make_discretization(ctx.cfg.spec, ctx.cfg.disc);
    const ControlField u0 = baseline_control(ctx.cfg.spec, disc.grid, disc.tg);
    const OptResult res = solve_pgd(ctx.cfg.spec, disc, ctx.cfg.opt, u0);
    if (!res.converged)
        throw NotConverged("sosc: optimizer missed the tolerance after " +
                           std::to_string(res.iterations) + " iterations");
    const SoscReport rep = sosc_check(res.u_opt, res.y_opt, res.q_opt, ctx.cfg.spec, disc, tau,
                                      n_samples, ctx.cfg.opt.seed);

    nlohmann::json j;
    j["tau"] = rep.tau;
    j["n_samples"] = rep.n_samples;
    j["n_active"] = rep.n_active;
    j["n_control_nodes"] = rep.n_control_nodes;
    j["cone_trivial"] = rep.cone_trivial;
    j["min_quadratic"] = rep.min_quadratic;
    j["min_normalized"] = rep.min_normalized;
    j["necessary_ok"] = rep.necessary_ok;
    j["beta_fit"] = rep.beta_fit;
    j["beta_positive"] = rep.beta_positive;
    j["optimizer"] = {{"iterations", res.iterations},
                      {"residual", res.residual_history.back()}};
    emit(ctx, o.out_dir, "sosc.json", j.dump(2) + "\n");
    finish_run(ctx, o.out_dir);

    if (rep.cone_trivial) std::printf("cone trivial (all %d control nodes strongly active)\n",
                                      rep.n_control_nodes);
    else
        std::printf("min normalized curvature %.6g, beta %.6g\n", rep.min_normalized,
                    rep.beta_fit);
    if ((!rep.necessary_ok || !rep.beta_positive) && o.strict) return kExitStrictFail;
    return kExitOk;
}

int cmd_dump_operator(const CommonOpts& o, const std::string& cmdline) {
    RunContext ctx = begin_run(o, cmdline);
    const Discretization disc = make_discretization(ctx.cfg.spec, ctx.cfg.disc);
    std::ostringstream os;
    dump_matrix_csv(os, disc.A);
    emit(ctx, o.out_dir, "operator.csv", os.str());
    finish_run(ctx, o.out_dir);
    std::printf("wrote %dx%d operator (s=%.17g, h=%.17g)\n", disc.A.n, disc.A.n, disc.A.s,
                disc.A.h);
    return kExitOk;
}

std::string join_argv(int argc, char** argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) {
        if (i) s += ' ';
        s += argv[i];
    }
    return s;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"bilinear control of fractional diffusion with memory"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::uint64_t seed_val = 0;
    bool seed_given = false;

    auto add_common = [&](CLI::App* sub, bool out_required) {
        sub->add_option("--config", opts.config_path, "case configuration file")->required();
        auto* out = sub->add_option("--out", opts.out_dir, "output directory");
        if (out_required) out->required();
        sub->add_option("--seed", seed_val, "override the config seed")
            ->each([&](const std::string&) { seed_given = true; });
        sub->add_flag("--strict", opts.strict, "exit 3 when any asserted check fails");
        sub->add_flag("--force", opts.force, "reuse a non-empty output directory");
    };

    auto* solve = app.add_subcommand("solve", "forward state solve at the baseline control");
    add_common(solve, true);
    auto* optimize = app.add_subcommand("optimize", "projected-gradient control optimization");
    add_common(optimize, true);
    auto* diagnose = app.add_subcommand("diagnose", "run a property suite");
    std::string suite_arg;
    diagnose->add_option("suite", suite_arg, "maxprinciple|estimates|lipschitz|derivatives|adjointness|all|none")
        ->required();
    add_common(diagnose, false);
    auto* uniq = app.add_subcommand("uniqueness", "multi-start distance experiment");
    int n_starts = 5;
    uniq->add_option("--starts", n_starts, "number of random starts (default 5)");
    add_common(uniq, true);
    auto* sosc = app.add_subcommand("sosc", "second-order checks at the computed minimizer");
    double tau = 1e-8;
    int n_samples = 50;
    sosc->add_option("--tau", tau, "strong-activity threshold (default 1e-8)");
    sosc->add_option("--samples", n_samples, "cone samples (default 50)");
    add_common(sosc, true);
    auto* dump = app.add_subcommand("dump-operator", "write the assembled stiffness matrix");
    add_common(dump, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help() << std::flush;
        return kExitValidation;
    }

    const std::string cmdline = join_argv(argc, argv);
    if (seed_given) opts.seed_override = seed_val;

    try {
        if (solve->parsed()) return cmd_solve(opts, cmdline);
        if (optimize->parsed()) return cmd_optimize(opts, cmdline);
        if (diagnose->parsed()) return cmd_diagnose(opts, suite_arg, cmdline);
        if (uniq->parsed()) return cmd_uniqueness(opts, n_starts, cmdline);
        if (sosc->parsed()) return cmd_sosc(opts, tau, n_samples, cmdline);
        if (dump->parsed()) return cmd_dump_operator(opts, cmdline);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolver;
    }
    std::cerr << app.help();
    return kExitValidation;
}
