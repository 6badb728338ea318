#include "cli.hpp"

#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "minklab/io.hpp"

namespace minklab::cli {

namespace fs = std::filesystem;

namespace {

struct GridFlags {
    std::optional<int> resolution;
    std::optional<std::string> kind;
    std::optional<std::uint64_t> seed;

    void attach(CLI::App* cmd) {
        cmd->add_option("--grid-resolution", resolution, "quadrature grid resolution");
        cmd->add_option("--grid-kind", kind, "grid kind: product or monte_carlo");
        cmd->add_option("--seed", seed, "seed for grids and randomized starts");
    }
};

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

void write_manifest(const fs::path& out_dir, const std::string& command,
                    const std::vector<std::string>& inputs, const std::string& config_digest,
                    double wall_seconds) {
    // run log; the only output that is not byte-reproducible (wall time)
    json j{{"schema", "run_manifest"},
           {"command", command},
           {"inputs", inputs},
           {"config_digest", config_digest},
           {"tool_version", kToolVersion},
           {"wall_time_seconds", wall_seconds}};
    write_json_file(out_dir / "manifest.json", j);
}

fs::path prepare_out_dir(const std::string& out_dir) {
    fs::path p(out_dir);
    fs::create_directories(p);
    return p;
}

std::vector<double> parse_number_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw Error(std::string(what) + ": cannot parse \"" + item + "\" as a number");
        }
    }
    if (out.empty()) throw Error(std::string(what) + ": empty list");
    return out;
}

struct SolveArgs {
    std::string measure_path, body_path, config_path, out_dir = "out";
    GridFlags grid;
    std::optional<double> q;
    std::optional<double> tolerance;
    std::optional<int> max_iters;
    bool override_regime = false;
};

int run_solve(const SolveArgs& args) {
    Timer timer;
    DiscreteMeasure mu = measure_from_json(read_json_file(args.measure_path));
    validate_measure(mu);
    StarBody body = star_body_from_json(read_json_file(args.body_path));

    SolveConfig config;
    if (!args.config_path.empty()) config = config_from_json(read_json_file(args.config_path));
    if (args.q) config.q = *args.q;
    if (args.grid.resolution) config.grid_resolution = *args.grid.resolution;
    if (args.grid.kind) config.grid_kind = grid_kind_from_name(*args.grid.kind);
    if (args.grid.seed) {
        config.grid_seed = *args.grid.seed;
        config.seed = *args.grid.seed;
    }
    if (args.tolerance) config.gradient_tolerance = *args.tolerance;
    if (args.max_iters) config.max_iterations = *args.max_iters;
    if (args.override_regime) config.override_regime = true;
    validate_config(config);

    const fs::path out = prepare_out_dir(args.out_dir);
    const SolveReport report = minimize(mu, body, config);

    write_json_file(out / "report.json", solve_report_to_json(report));
    if (report.solution.count() > 0)
        write_json_file(out / "solution.json", polytope_to_json(report.solution));
    write_text_file(out / "trace.csv", trace_to_csv(report.trace));
    write_manifest(out, "solve", {args.measure_path, args.body_path, args.config_path},
                   document_digest(config_to_json(config)), timer.seconds());

    if (report.status == SolveStatus::refused_preconditions) return 2;
    if (report.status == SolveStatus::converged &&
        report.residual.residual <= config.residual_bound)
        return 0;
    return 3;
}

struct CurvatureArgs {
    std::string body_path, star_path, out_dir = "out";
    double q = 0.0;
    GridFlags grid;
};

int run_curvature(const CurvatureArgs& args) {
    Timer timer;
    SupportPolytope k = polytope_from_json(read_json_file(args.body_path));
    validate_polytope(k);
    StarBody star = star_body_from_json(read_json_file(args.star_path));

    GridSpec spec{k.dim, GridKind::product, 48, 1};
    if (args.grid.resolution) spec.resolution = *args.grid.resolution;
    if (args.grid.kind) spec.kind = grid_kind_from_name(*args.grid.kind);
    if (args.grid.seed) spec.seed = *args.grid.seed;
    const SphereGrid grid = build_grid(spec.dim, spec.resolution, spec.kind, spec.seed);

    std::vector<std::size_t> zero_atoms;
    const DiscreteMeasure mu = dual_curvature_measure(k, star, args.q, grid, &zero_atoms);

    const fs::path out = prepare_out_dir(args.out_dir);
    json j = measure_to_json(mu);
    j["q"] = args.q;
    j["grid"] = grid_spec_to_json(spec);
    j["zero_weight_atoms"] = zero_atoms;
    write_json_file(out / "measure.json", j);
    write_manifest(out, "curvature", {args.body_path, args.star_path},
                   document_digest(grid_spec_to_json(spec)), timer.seconds());
    return 0;
}

struct CheckArgs {
    std::string measure_path, body_path, out_dir = "out";
    double q = 2.0;
    GridFlags grid;
    std::optional<double> tolerance;
};

int run_check(const CheckArgs& args) {
    Timer timer;
    DiscreteMeasure mu = measure_from_json(read_json_file(args.measure_path));
    validate_measure(mu);

    std::optional<StarBody> body;
    std::optional<SphereGrid> grid;
    if (!args.body_path.empty()) {
        body = star_body_from_json(read_json_file(args.body_path));
        GridSpec spec{mu.dim, GridKind::product, 48, 1};
        if (args.grid.resolution) spec.resolution = *args.grid.resolution;
        if (args.grid.kind) spec.kind = grid_kind_from_name(*args.grid.kind);
        if (args.grid.seed) spec.seed = *args.grid.seed;
        grid = build_grid(spec.dim, spec.resolution, spec.kind, spec.seed);
    }
    const double mass_tol = args.tolerance.value_or(1e-3);
    const RegimeAssessment a =
        assess_regime(mu, args.q, body ? &*body : nullptr, grid ? &*grid : nullptr,
                      mass_tol, 1e-9);

    const fs::path out = prepare_out_dir(args.out_dir);
    json j = precondition_report_to_json(a.report);
    j["schema"] = "precondition_report";
    j["q"] = args.q;
    j["pass"] = a.pass;
    j["indeterminate"] = a.indeterminate;
    j["failures"] = a.failures;
    write_json_file(out / "precheck.json", j);
    write_manifest(out, "check", {args.measure_path, args.body_path}, document_digest(j),
                   timer.seconds());

    for (const std::string& f : a.failures) std::cerr << "check: " << f << "\n";
    if (a.pass) return 0;
    return a.indeterminate ? 4 : 2;
}

struct EstimateArgs {
    std::string entries, spreads = "1,10,100,1000", out_dir = "out";
    double alpha = 1.0;
    GridFlags grid;
};

int run_estimate(const EstimateArgs& args) {
    Timer timer;
    std::vector<double> entries = parse_number_list(args.entries, "--entries");
    std::sort(entries.begin(), entries.end(), std::greater<>());
    const DiagonalSpec spec = make_diagonal(entries);
    const int m = spec.order();

    GridSpec gspec{m, GridKind::product, 128, 1};
    if (args.grid.resolution) gspec.resolution = *args.grid.resolution;
    if (args.grid.kind) gspec.kind = grid_kind_from_name(*args.grid.kind);
    if (args.grid.seed) gspec.seed = *args.grid.seed;
    const SphereGrid grid = build_grid(gspec.dim, gspec.resolution, gspec.kind, gspec.seed);

    const double integral = integral_norm_power(spec, args.alpha, grid);
    const EstimateValue estimate = closed_form_estimate(spec, args.alpha);
    const std::vector<double> spreads = parse_number_list(args.spreads, "--spreads");
    const SweepReport sweep =
        ratio_sweep(args.alpha, m, spreads, grid, args.grid.seed.value_or(1));

    const fs::path out = prepare_out_dir(args.out_dir);
    write_text_file(out / "estimate.csv", sweep_to_csv(sweep));
    json j{{"schema", "estimate_report"},
           {"alpha", args.alpha},
           {"entries", spec.entries},
           {"integral", integral},
           {"estimate", estimate.value},
           {"ratio", integral / estimate.value},
           {"sweep_min_ratio", sweep.min_ratio},
           {"sweep_max_ratio", sweep.max_ratio},
           {"grid", grid_spec_to_json(gspec)}};
    write_json_file(out / "estimate.json", j);
    write_manifest(out, "estimate", {}, document_digest(j), timer.seconds());
    std::cout << "ratio " << integral / estimate.value << " sweep band ["
              << sweep.min_ratio << ", " << sweep.max_ratio << "]\n";
    return 0;
}

// ---------------------------------------------------------------------------
// selftest: reduced-resolution invariant suite

struct SelftestContext {
    std::string fault;
    std::ostringstream report;
    bool all_ok = true;

    bool step(const std::string& name, const std::function<std::string()>& body) {
        std::string failure;
        try {
            failure = body();
        } catch (const std::exception& e) {
            failure = e.what();
        }
        const bool ok = failure.empty();
        report << name << ": " << (ok ? "ok" : "FAIL " + failure) << "\n";
        std::cout << (ok ? "[ ok ] " : "[FAIL] ") << name;
        if (!ok) std::cout << " — " << failure;
        std::cout << "\n";
        if (!ok) all_ok = false;
        return ok;
    }
};

std::string selftest_report(const std::string& fault) {
    SelftestContext ctx;
    ctx.fault = fault;

    ctx.step("weight-sum invariant", [&]() -> std::string {
        for (int n : {2, 3, 4}) {
            const SphereGrid g = build_grid(n, 16, GridKind::product);
            std::vector<double> w(g.weights().begin(), g.weights().end());
            if (ctx.fault == "grid-weights") w[0] *= 1.01;
            CompensatedSum s;
            for (double x : w) {
                if (!(x > 0.0)) return "nonpositive weight";
                s.add(x);
            }
            const double area = unit_sphere_area(n);
            if (std::abs(s.value() - area) > 1e-3 * area)
                return "weight sum " + std::to_string(s.value()) + " vs area " +
                       std::to_string(area) + " (n = " + std::to_string(n) + ")";
        }
        return {};
    });

    ctx.step("node-normalization invariant", []() -> std::string {
        validate_grid(build_grid(3, 16, GridKind::product));
        validate_grid(build_grid(3, 8, GridKind::monte_carlo, 7));
        return {};
    });

    const SphereGrid grid = build_grid(3, 24, GridKind::product);

    ctx.step("odd-function cancellation", [&]() -> std::string {
        const double v = integrate(grid, [](std::span<const double> u) { return u[0]; });
        if (std::abs(v) > 1e-12) return "integral " + std::to_string(v);
        return {};
    });

    ctx.step("quadrature linearity", [&]() -> std::string {
        auto f = [](std::span<const double> u) { return u[0] * u[0]; };
        auto g = [](std::span<const double> u) { return std::abs(u[2]); };
        const double lhs = integrate(grid, [&](std::span<const double> u) {
            return 2.0 * f(u) + 3.0 * g(u);
        });
        const double rhs = 2.0 * integrate(grid, f) + 3.0 * integrate(grid, g);
        if (std::abs(lhs - rhs) > 1e-12 * std::abs(rhs)) return "linearity gap";
        return {};
    });

    // shared small instance: cube data
    SupportPolytope cube;
    cube.dim = 3;
    cube.normals = {1, 0, 0, 0, 1, 0, 0, 0, 1, -1, 0, 0, 0, -1, 0, 0, 0, -1};
    cube.support = {1, 1, 1, 1, 1, 1};
    cube.even = true;
    const StarBody ball = StarBody::ball(3, 1.0);

    ctx.step("dual-volume scaling law", [&]() -> std::string {
        SupportPolytope big = cube;
        for (double& h : big.support) h *= 2.0;
        const double v1 = dual_mixed_volume(cube, ball, 2.0, grid);
        const double v2 = dual_mixed_volume(big, ball, 2.0, grid);
        if (std::abs(v2 - 4.0 * v1) > 1e-12 * std::abs(v2)) return "ratio off";
        return {};
    });

    ctx.step("curvature-measure scaling law", [&]() -> std::string {
        SupportPolytope big = cube;
        for (double& h : big.support) h *= 3.0;
        const DiscreteMeasure a = dual_curvature_measure(cube, ball, -1.0, grid);
        const DiscreteMeasure b = dual_curvature_measure(big, ball, -1.0, grid);
        for (std::size_t i = 0; i < a.count(); ++i)
            if (std::abs(b.weights[i] - a.weights[i] / 3.0) > 1e-12 * std::abs(b.weights[i]))
                return "atom " + std::to_string(i);
        return {};
    });

    ctx.step("mass partition", [&]() -> std::string {
        const DiscreteMeasure m = dual_curvature_measure(cube, ball, 2.0, grid);
        const double v = dual_mixed_volume(cube, ball, 2.0, grid);
        if (std::abs(m.total() - v) > 1e-12 * std::abs(v)) return "partition gap";
        return {};
    });

    ctx.step("objective homogeneity", [&]() -> std::string {
        DiscreteMeasure mu = dual_curvature_measure(cube, ball, 2.0, grid);
        std::vector<double> h(6, 1.0), h7(6, 7.0);
        const double a = objective_J(h, mu, ball, 2.0, grid);
        const double b = objective_J(h7, mu, ball, 2.0, grid);
        if (std::abs(a - b) > 1e-10) return "J not scale-free";
        DiscreteMeasure mu0 = dual_curvature_measure(cube, ball, 0.0, grid);
        const double c = objective_Jtilde(h, mu0, ball, grid);
        const double d = objective_Jtilde(h7, mu0, ball, grid);
        if (std::abs(c - d) > 1e-10) return "Jtilde not scale-free";
        return {};
    });

    ctx.step("q = n independence of Q", [&]() -> std::string {
        const StarBody ell = StarBody::ellipsoid({1.0, 2.0, 3.0});
        const DiscreteMeasure a = dual_curvature_measure(cube, ball, 3.0, grid);
        const DiscreteMeasure b = dual_curvature_measure(cube, ell, 3.0, grid);
        for (std::size_t i = 0; i < a.count(); ++i)
            if (std::abs(a.weights[i] - b.weights[i]) > 1e-10) return "atoms differ";
        return {};
    });

    ctx.step("variational formula", [&]() -> std::string {
        DiscreteMeasure mu = dual_curvature_measure(cube, ball, 2.0, grid);
        std::vector<double> h = {1.0, 0.9, 1.1, 1.0, 0.9, 1.1};
        const std::vector<double> g = gradient(h, mu, ball, 2.0, grid);
        for (std::size_t i = 0; i < h.size(); ++i) {
            const double eps = 1e-5;
            std::vector<double> hp = h, hm = h;
            hp[i] += eps;
            hm[i] -= eps;
            const double fd = (objective_J(hp, mu, ball, 2.0, grid) -
                               objective_J(hm, mu, ball, 2.0, grid)) /
                              (2.0 * eps);
            if (std::abs(fd - g[i]) > 1e-3 * std::max(1.0, std::abs(g[i])))
                return "component " + std::to_string(i);
        }
        return {};
    });

    ctx.step("power-reducing identity", [&]() -> std::string {
        const TwoSided t = power_reduce_check(make_diagonal({3.0, 2.0, 0.5}), 2.5, grid);
        if (std::abs(t.lhs / t.rhs - 1.0) > 1e-3) return "sides differ";
        return {};
    });

    ctx.step("total-variation sanity", [&]() -> std::string {
        DiscreteMeasure a;
        a.dim = 3;
        a.atoms = {1, 0, 0};
        a.weights = {1.0};
        DiscreteMeasure b = a;
        b.weights = {0.8};
        if (std::abs(total_variation_distance(a, b, 1e-9) - 0.2) > 1e-15) return "tv off";
        return {};
    });

    ctx.step("determinism digest", [&]() -> std::string {
        const SphereGrid g1 = build_grid(3, 16, GridKind::monte_carlo, 42);
        const SphereGrid g2 = build_grid(3, 16, GridKind::monte_carlo, 42);
        if (g1.size() != g2.size()) return "sizes differ";
        for (std::size_t k = 0; k < g1.size() * 3; ++k)
            if (g1.nodes_flat()[k] != g2.nodes_flat()[k]) return "nodes differ";
        return {};
    });

    std::cout << "selftest digest: " << hex64(fnv1a64(ctx.report.str())) << "\n";
    return ctx.all_ok ? "" : ctx.report.str();
}

int run_selftest(const std::string& fault) {
    const std::string failures = selftest_report(fault);
    if (failures.empty()) return 0;
    std::cerr << "selftest failed\n";
    return 5;
}

} // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"numerical laboratory for generalized dual Minkowski problems"};
    app.require_subcommand(1);

    SolveArgs solve_args;
    CLI::App* solve_cmd = app.add_subcommand(
        "solve", "minimize the variational functional and recover a polytope from a measure");
    solve_cmd->add_option("--measure", solve_args.measure_path, "target measure document")
        ->required();
    solve_cmd->add_option("--body", solve_args.body_path, "star body document")->required();
    solve_cmd->add_option("--config", solve_args.config_path, "solve_config document");
    solve_cmd->add_option("--q", solve_args.q, "dual-volume exponent");
    solve_cmd->add_option("--tolerance", solve_args.tolerance, "gradient tolerance");
    solve_cmd->add_option("--max-iters", solve_args.max_iters, "iteration cap");
    solve_cmd->add_flag("--override-regime", solve_args.override_regime,
                        "run outside the proven (q, data) regimes");
    solve_cmd->add_option("--out-dir", solve_args.out_dir, "output directory");
    solve_args.grid.attach(solve_cmd);

    CurvatureArgs curv_args;
    CLI::App* curv_cmd =
        app.add_subcommand("curvature", "curvature measure of a support-form polytope");
    curv_cmd->add_option("--body", curv_args.body_path, "polytope document")->required();
    curv_cmd->add_option("--star", curv_args.star_path, "star body document")->required();
    curv_cmd->add_option("--q", curv_args.q, "dual-volume exponent")->required();
    curv_cmd->add_option("--out-dir", curv_args.out_dir, "output directory");
    curv_args.grid.attach(curv_cmd);

    CheckArgs check_args;
    CLI::App* check_cmd =
        app.add_subcommand("check", "existence-hypothesis checks for a measure");
    check_cmd->add_option("--measure", check_args.measure_path, "measure document")->required();
    check_cmd->add_option("--q", check_args.q, "dual-volume exponent")->required();
    check_cmd->add_option("--body", check_args.body_path, "star body document (for q = 0)");
    check_cmd->add_option("--tolerance", check_args.tolerance, "mass-balance tolerance");
    check_cmd->add_option("--out-dir", check_args.out_dir, "output directory");
    check_args.grid.attach(check_cmd);

    EstimateArgs est_args;
    CLI::App* est_cmd =
        app.add_subcommand("estimate", "norm-power integral against its closed-form estimate");
    est_cmd->add_option("--alpha", est_args.alpha, "integrand exponent")->required();
    est_cmd->add_option("--entries", est_args.entries, "diagonal entries, comma separated")
        ->required();
    est_cmd->add_option("--spreads", est_args.spreads, "sweep condition numbers");
    est_cmd->add_option("--out-dir", est_args.out_dir, "output directory");
    est_args.grid.attach(est_cmd);

    std::string fault;
    CLI::App* selftest_cmd =
        app.add_subcommand("selftest", "reduced-resolution invariant suite");
    selftest_cmd->add_option("--inject-fault", fault,
                             "corrupt a named datum to exercise the failure path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (solve_cmd->parsed()) return run_solve(solve_args);
        if (curv_cmd->parsed()) return run_curvature(curv_args);
        if (check_cmd->parsed()) return run_check(check_args);
        if (est_cmd->parsed()) return run_estimate(est_args);
        if (selftest_cmd->parsed()) return run_selftest(fault);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

} // namespace minklab::cli
