#pragma once

#include <string>
#include <vector>

#include "minklab/dual_measures.hpp"
#include "minklab/measure_checks.hpp"

namespace minklab {

struct StepControl {
    double initial_step = 1.0;
    double backtrack = 0.5;           // in (0,1)
    double sufficient_decrease = 0.1; // Armijo constant, in (0, 0.5]
};

enum class Normalization { max_h_one };

struct SolveConfig {
    double q = 2.0;

    int grid_resolution = 48;
    GridKind grid_kind = GridKind::product;
    std::uint64_t grid_seed = 1;

    int max_iterations = 5000;
    double gradient_tolerance = 1e-6;
    StepControl step;
    double h_min = 1e-6;
    Normalization normalization = Normalization::max_h_one;
    bool enforce_even = true; // applied when the data is even
    std::uint64_t seed = 1;

    int restarts = 1;        // additional seeded starts beyond the deterministic one
    bool warm_start = false; // h_i proportional to weight^{1/n} instead of h = 1

    bool override_regime = false; // run outside the proven (q, data) regimes
    double mass_balance_tol = 1e-3;
    double residual_bound = 2e-2;
    double precondition_slack_min = 1e-9;
};

void validate_config(const SolveConfig& config);

struct TracePoint {
    int iter = 0;
    double objective = 0.0;
    double grad_norm = 0.0;
    double step = 0.0;
};

enum class SolveStatus { converged, max_iter, refused_preconditions };

struct StartSummary {
    int start = 0;
    double objective = 0.0;
    double grad_norm = 0.0;
    int iterations = 0;
    bool converged = false;
};

struct ResidualReport {
    double residual = 0.0;            // total variation / |mu|
    std::vector<double> atom_errors;  // achieved - target, per atom
    double achieved_total = 0.0;
};

struct SolveReport {
    SupportPolytope solution; // after the final scaling
    double scale = 1.0;       // c with C_q(c K) = mu; 1 for q = 0
    std::vector<TracePoint> trace;
    ResidualReport residual;
    PreconditionReport preconditions;
    SolveStatus status = SolveStatus::refused_preconditions;
    std::vector<std::string> warnings;
    std::vector<StartSummary> starts;
    double elongation = 0.0; // max h / min rho of the unscaled minimizer
    bool floor_hit = false;
    int iterations = 0;
    GridSpec grid;
};

/// J[h] = (1/|mu|) sum a_i log h_i - (1/q) log V_q(K_h, Q), q != 0.
double objective_J(std::span<const double> h, const DiscreteMeasure& mu, const StarBody& q_body,
                   double q, const SphereGrid& grid);

/// Jt[h] = (1/|mu|) sum a_i log h_i - E(K_h, Q) / Vol(Q).
double objective_Jtilde(std::span<const double> h, const DiscreteMeasure& mu,
                        const StarBody& q_body, const SphereGrid& grid);

/// First variation with respect to the support numbers:
///   dJ/dh_i  = a_i/(|mu| h_i) - C_i/(V_q h_i)        (q != 0)
///   dJt/dh_i = a_i/(|mu| h_i) - C0_i/(Vol(Q) h_i)    (q == 0)
/// where C_i is atom i of the curvature measure of K_h. Entries of inactive
/// facets carry only the first term.
std::vector<double> gradient(std::span<const double> h, const DiscreteMeasure& mu,
                             const StarBody& q_body, double q, const SphereGrid& grid);

/// Projected gradient descent on log h with Armijo backtracking, max-one
/// renormalization each step, and the final scaling c = (|mu|/V_q)^{1/q}
/// (no scaling for q = 0). Refuses to run when the regime's hypotheses fail,
/// unless override_regime is set (a warning is recorded instead).
SolveReport minimize(const DiscreteMeasure& mu, const StarBody& q_body,
                     const SolveConfig& config);

/// Residual of a candidate solution: total variation distance between its
/// curvature measure and mu, normalized by |mu|, plus per-atom signed errors.
ResidualReport verify_solution(const SupportPolytope& k, const StarBody& q_body, double q,
                               const DiscreteMeasure& mu, const SphereGrid& grid);

} // namespace minklab
