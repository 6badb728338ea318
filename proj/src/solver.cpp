#include "minklab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace minklab {

void validate_config(const SolveConfig& config) {
    if (!(config.h_min > 0.0)) throw Error("h_min must be positive");
    if (!(config.step.backtrack > 0.0 && config.step.backtrack < 1.0))
        throw Error("backtracking factor must lie in (0,1)");
    if (!(config.step.sufficient_decrease > 0.0 && config.step.sufficient_decrease <= 0.5))
        throw Error("sufficient-decrease constant must lie in (0, 0.5]");
    if (!(config.step.initial_step > 0.0)) throw Error("initial step must be positive");
    if (config.grid_resolution < 4) throw Error("grid resolution must be >= 4");
    if (config.max_iterations < 1) throw Error("max iterations must be >= 1");
    if (!(config.gradient_tolerance > 0.0)) throw Error("gradient tolerance must be positive");
    if (config.restarts < 1) throw Error("restarts must be >= 1");
}

namespace {

double log_mass_term(std::span<const double> h, const DiscreteMeasure& mu, double total_mu) {
    CompensatedSum s;
    for (std::size_t i = 0; i < mu.count(); ++i) s.add(mu.weights[i] * std::log(h[i]));
    return s.value() / total_mu;
}

struct ObjectiveState {
    double value = 0.0;
    CurvatureBins bins;
    std::vector<double> grad_log; // d/d(log h_i)
    double grad_norm_h = 0.0;     // sup norm of d/dh_i
};

// shared objective/gradient evaluation for both functionals
ObjectiveState evaluate_state(const DualMeasureEvaluator& ev, std::span<const double> h,
                              const DiscreteMeasure& mu, double total_mu, double q) {
    ObjectiveState st;
    const bool entropy_mode = q == 0.0;
    st.bins = ev.eval(h, q, entropy_mode);
    const double denom = entropy_mode ? ev.volume_q() : st.bins.total;
    st.value = log_mass_term(h, mu, total_mu) -
               (entropy_mode ? st.bins.entropy / ev.volume_q()
                             : std::log(st.bins.total) / q);
    st.grad_log.resize(mu.count());
    st.grad_norm_h = 0.0;
    for (std::size_t i = 0; i < mu.count(); ++i) {
        st.grad_log[i] = mu.weights[i] / total_mu - st.bins.atom_mass[i] / denom;
        st.grad_norm_h = std::max(st.grad_norm_h, std::abs(st.grad_log[i] / h[i]));
    }
    return st;
}

double objective_only(const DualMeasureEvaluator& ev, std::span<const double> h,
                      const DiscreteMeasure& mu, double total_mu, double q) {
    const bool entropy_mode = q == 0.0;
    const CurvatureBins bins = ev.eval(h, q, entropy_mode);
    return log_mass_term(h, mu, total_mu) -
           (entropy_mode ? bins.entropy / ev.volume_q() : std::log(bins.total) / q);
}

// fold onto one representative per antipodal pair, then mirror back exactly
struct EvenFold {
    std::vector<std::size_t> pair; // empty when not folding
    void apply(std::vector<double>& h) const {
        if (pair.empty()) return;
        for (std::size_t i = 0; i < h.size(); ++i) {
            const std::size_t j = pair[i];
            if (j > i) h[j] = h[i];
        }
    }
};

void normalize_max_one(std::vector<double>& h) {
    const double m = *std::max_element(h.begin(), h.end());
    for (double& x : h) x /= m;
}

} // namespace

double objective_J(std::span<const double> h, const DiscreteMeasure& mu, const StarBody& q_body,
                   double q, const SphereGrid& grid) {
    if (q == 0.0) throw Error("objective_J requires q != 0; use objective_Jtilde");
    DualMeasureEvaluator ev(grid, mu.dim, mu.atoms, check_even(mu, 1e-9) && q_body.even(),
                            q_body);
    return objective_only(ev, h, mu, mu.total(), q);
}

double objective_Jtilde(std::span<const double> h, const DiscreteMeasure& mu,
                        const StarBody& q_body, const SphereGrid& grid) {
    DualMeasureEvaluator ev(grid, mu.dim, mu.atoms, check_even(mu, 1e-9) && q_body.even(),
                            q_body);
    return objective_only(ev, h, mu, mu.total(), 0.0);
}

std::vector<double> gradient(std::span<const double> h, const DiscreteMeasure& mu,
                             const StarBody& q_body, double q, const SphereGrid& grid) {
    DualMeasureEvaluator ev(grid, mu.dim, mu.atoms, check_even(mu, 1e-9) && q_body.even(),
                            q_body);
    const ObjectiveState st = evaluate_state(ev, h, mu, mu.total(), q);
    std::vector<double> g(mu.count());
    for (std::size_t i = 0; i < mu.count(); ++i) g[i] = st.grad_log[i] / h[i];
    return g;
}

ResidualReport verify_solution(const SupportPolytope& k, const StarBody& q_body, double q,
                               const DiscreteMeasure& mu, const SphereGrid& grid) {
    const DiscreteMeasure achieved = dual_curvature_measure(k, q_body, q, grid);
    if (achieved.count() != mu.count())
        throw Error("verify_solution requires the polytope normals to be mu's atoms");
    ResidualReport out;
    out.residual = total_variation_distance(achieved, mu, 1e-9) / mu.total();
    out.atom_errors.resize(mu.count());
    for (std::size_t i = 0; i < mu.count(); ++i)
        out.atom_errors[i] = achieved.weights[i] - mu.weights[i];
    out.achieved_total = achieved.total();
    return out;
}

SolveReport minimize(const DiscreteMeasure& mu, const StarBody& q_body,
                     const SolveConfig& config) {
    validate_config(config);
    validate_measure(mu);
    const int n = mu.dim;
    if (q_body.dim() != n) throw Error("measure/star-body dimension mismatch");
    const double q = config.q;

    SolveReport report;
    report.grid = GridSpec{n, config.grid_kind, config.grid_resolution, config.grid_seed};
    const SphereGrid grid =
        build_grid(n, config.grid_resolution, config.grid_kind, config.grid_seed);

    // hypothesis checks for the requested regime
    RegimeAssessment assessment = assess_regime(mu, q, &q_body, &grid,
                                                config.mass_balance_tol,
                                                config.precondition_slack_min);
    report.preconditions = assessment.report;
    const PreconditionReport& pre = report.preconditions;
    if (!assessment.pass) {
        if (!config.override_regime) {
            report.status = SolveStatus::refused_preconditions;
            for (const std::string& f : assessment.failures)
                report.warnings.push_back("refused: " + f);
            return report;
        }
        for (const std::string& f : assessment.failures)
            report.warnings.push_back("override: running although " + f);
    }

    const double total_mu = mu.total();
    const bool fold_even = config.enforce_even && pre.even;
    EvenFold fold;
    if (fold_even) fold.pair = antipodal_pairs(mu.atoms, n);
    DualMeasureEvaluator ev(grid, n, mu.atoms, fold_even && q_body.even(), q_body);

    // starting points: deterministic start (flat or weight-warmed), then
    // seeded log-uniform perturbations
    std::vector<std::vector<double>> starts;
    {
        std::vector<double> h0(mu.count(), 1.0);
        if (config.warm_start) {
            for (std::size_t i = 0; i < mu.count(); ++i)
                h0[i] = std::pow(mu.weights[i], 1.0 / n);
        }
        fold.apply(h0);
        normalize_max_one(h0);
        starts.push_back(std::move(h0));
        std::mt19937_64 eng(config.seed);
        for (int s = 1; s < config.restarts; ++s) {
            std::vector<double> h(mu.count());
            for (double& x : h) x = std::exp(uniform01(eng) - 0.5);
            fold.apply(h);
            normalize_max_one(h);
            starts.push_back(std::move(h));
        }
    }

    struct StartResult {
        std::vector<double> h;
        ObjectiveState state;
        std::vector<TracePoint> trace;
        bool converged = false;
        bool floor_hit = false;
        int iterations = 0;
    };

    auto run_start = [&](std::vector<double> h) {
        StartResult res;
        ObjectiveState st = evaluate_state(ev, h, mu, total_mu, q);
        double last_step = 0.0;
        std::vector<double> prev_logh, prev_grad;
        int iter = 0;
        for (; iter < config.max_iterations; ++iter) {
            res.trace.push_back({iter, st.value, st.grad_norm_h, last_step});
            if (st.grad_norm_h <= config.gradient_tolerance) {
                res.converged = true;
                break;
            }

            // descent direction in log h; Barzilai-Borwein warm start for the
            // Armijo search after the first iteration
            double t = config.step.initial_step;
            if (!prev_logh.empty()) {
                double ss = 0.0, sy = 0.0;
                for (std::size_t i = 0; i < h.size(); ++i) {
                    const double si = std::log(h[i]) - prev_logh[i];
                    const double yi = st.grad_log[i] - prev_grad[i];
                    ss += si * si;
                    sy += si * yi;
                }
                if (sy > 1e-300 && ss > 0.0)
                    t = std::clamp(ss / sy, 1e-8, 1e4);
            }
            double g2 = 0.0;
            for (double gi : st.grad_log) g2 += gi * gi;

            prev_logh.resize(h.size());
            for (std::size_t i = 0; i < h.size(); ++i) prev_logh[i] = std::log(h[i]);
            prev_grad = st.grad_log;

            bool accepted = false;
            while (t >= 1e-18) {
                std::vector<double> h_try(h.size());
                for (std::size_t i = 0; i < h.size(); ++i)
                    h_try[i] = h[i] * std::exp(-t * st.grad_log[i]);
                fold.apply(h_try);
                normalize_max_one(h_try);
                if (*std::min_element(h_try.begin(), h_try.end()) < config.h_min) {
                    t *= config.step.backtrack;
                    continue;
                }
                const double j_try = objective_only(ev, h_try, mu, total_mu, q);
                if (j_try <= st.value - config.step.sufficient_decrease * t * g2) {
                    h = std::move(h_try);
                    st = evaluate_state(ev, h, mu, total_mu, q);
                    last_step = t;
                    accepted = true;
                    break;
                }
                t *= config.step.backtrack;
            }
            if (!accepted) {
                res.floor_hit = true;
                break;
            }
        }
        res.iterations = iter;
        res.h = std::move(h);
        res.state = std::move(st);
        return res;
    };

    std::vector<StartResult> results;
    results.reserve(starts.size());
    for (auto& s : starts) results.push_back(run_start(std::move(s)));

    std::size_t best = 0;
    for (std::size_t s = 1; s < results.size(); ++s)
        if (results[s].state.value < results[best].state.value) best = s;

    for (std::size_t s = 0; s < results.size(); ++s) {
        report.starts.push_back({static_cast<int>(s), results[s].state.value,
                                 results[s].state.grad_norm_h, results[s].iterations,
                                 results[s].converged});
    }
    StartResult& win = results[best];
    report.trace = std::move(win.trace);
    report.iterations = win.iterations;
    report.floor_hit = win.floor_hit;
    if (win.floor_hit)
        report.warnings.push_back(
            "line search stalled at the support floor; possible collapse direction");

    // scaling step: c^q V_q(K_h) = |mu|, so C_q(c K_h) has mass |mu|
    double scale = 1.0;
    if (q != 0.0) scale = std::pow(total_mu / win.state.bins.total, 1.0 / q);
    report.scale = scale;
    report.solution.dim = n;
    report.solution.normals = mu.atoms;
    report.solution.even = fold_even && !fold.pair.empty();
    report.solution.support.resize(mu.count());
    for (std::size_t i = 0; i < mu.count(); ++i)
        report.solution.support[i] = scale * win.h[i];
    if (report.solution.even) {
        // mirror exactly so serialized output is even to the bit
        for (std::size_t i = 0; i < mu.count(); ++i) {
            const std::size_t j = fold.pair[i];
            if (j > i) report.solution.support[j] = report.solution.support[i];
        }
    }

    report.elongation = win.state.bins.max_rho / win.state.bins.min_rho;
    report.residual = verify_solution(report.solution, q_body, q, mu, grid);
    report.status = win.converged ? SolveStatus::converged : SolveStatus::max_iter;
    return report;
}

} // namespace minklab
