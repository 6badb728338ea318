#pragma once

#include <optional>
#include <string>
#include <vector>

#include "minklab/bodies.hpp"
#include "minklab/dual_measures.hpp"

namespace minklab {

/// True iff the atoms pair under negation with weights equal within tol.
bool check_even(const DiscreteMeasure& mu, double tol);

/// Cap on the exact subset enumeration behind subspace_mass_sup. Exceeding it
/// raises an error rather than silently approximating.
struct EnumBudget {
    std::size_t max_atoms = 64;
    std::size_t max_subsets = 2000000;
};

struct SubspaceMass {
    double fraction = 0.0;           // mu(span)/|mu| for the best subspace found
    std::vector<std::size_t> witness; // atoms spanning it
};

/// sup over proper i-dimensional subspaces of mu(S cap xi)/|mu|. Exact for
/// atomic measures: an optimal subspace can be taken as the span of atoms it
/// contains, so spans of atom subsets of size <= i are enumerated. Membership
/// uses residual distance 1e-8 from the span.
SubspaceMass subspace_mass_sup(const DiscreteMeasure& mu, int i, const EnumBudget& budget = {});

struct SubspaceRow {
    int i = 0;
    double fraction = 0.0;
    double threshold = 0.0; // min(i/q, 1)
    double slack = 0.0;     // threshold - fraction (strict inequality requires > 0)
    std::vector<std::size_t> witness;
};

enum class HemisphereStatus { none, concentrated, indeterminate };

struct HemisphereResult {
    HemisphereStatus status = HemisphereStatus::none;
    std::vector<double> witness; // meaningful for concentrated/indeterminate
    double min_dot = -1.0;       // best min_i v.x_i found by the scan
};

/// Grid scan plus local refinement for a closed hemisphere containing every
/// atom. Best min-dot >= 1e-10 reports `concentrated` with the witness
/// direction; <= -1e-6 reports `none`; the band between is `indeterminate`.
HemisphereResult hemisphere_concentrated(const DiscreteMeasure& mu);

/// True iff the atoms span a proper subspace (rank below the dimension).
bool great_subsphere_concentrated(const DiscreteMeasure& mu);

struct MassBalance {
    double total = 0.0;
    double vol_q = 0.0;
    double gap = 0.0; // relative
    bool pass = false;
};

/// Compares |mu| against the quadrature volume of Q.
MassBalance check_mass_balance(const DiscreteMeasure& mu, const StarBody& q,
                               const SphereGrid& grid, double tol);

/// per-regime hypothesis checks, assembled for reports and the solver gate
struct PreconditionReport {
    bool even = false;
    HemisphereResult hemisphere;
    bool great_subsphere_free = false;
    bool subspace_applicable = false; // evenness is required for the subspace rows
    std::vector<SubspaceRow> subspace;
    std::optional<MassBalance> mass_balance;
};

/// Subspace rows for i = 1..n-1 against thresholds min(i/q, 1), q in (0,n).
std::vector<SubspaceRow> check_subspace_mass_inequality(const DiscreteMeasure& mu, double q,
                                                        const EnumBudget& budget = {});

struct RegimeAssessment {
    PreconditionReport report;
    bool pass = false;
    bool indeterminate = false; // a check landed in a refusal band
    std::vector<std::string> failures;
};

/// Evaluates the existence hypotheses for the regime of q:
///   q < 0:      not concentrated in a closed hemisphere
///   q = 0:      even mu, even Q, spanning atoms, |mu| = Vol(Q) within tol
///   0 < q < n:  even mu, even Q, subspace mass inequality with slack > slack_min
///   q >= n:     no existence criterion; never passes (solvable via override only)
/// `body` and `grid` may be null when unavailable (e.g. the check command
/// without a star body); checks needing them are then reported indeterminate.
RegimeAssessment assess_regime(const DiscreteMeasure& mu, double q, const StarBody* body,
                               const SphereGrid* grid, double mass_balance_tol,
                               double slack_min, const EnumBudget& budget = {});

} // namespace minklab
