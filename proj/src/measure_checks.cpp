#include "minklab/measure_checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace minklab {

bool check_even(const DiscreteMeasure& mu, double tol) {
    const auto pair = antipodal_pairs(mu.atoms, mu.dim);
    if (pair.empty()) return false;
    for (std::size_t i = 0; i < mu.count(); ++i)
        if (std::abs(mu.weights[i] - mu.weights[pair[i]]) > tol) return false;
    return true;
}

namespace {

// residual distance of unit vector a from the span with orthonormal basis rows
double span_residual(std::span<const double> a, const std::vector<double>& basis, int dim) {
    std::vector<double> v(a.begin(), a.end());
    const std::size_t nb = basis.size() / dim;
    for (std::size_t b = 0; b < nb; ++b) {
        std::span<const double> bb(basis.data() + b * dim, static_cast<std::size_t>(dim));
        const double p = dot(v, bb);
        for (int c = 0; c < dim; ++c) v[c] -= p * bb[c];
    }
    return norm(v);
}

std::size_t binomial_capped(std::size_t n, std::size_t k, std::size_t cap) {
    double v = 1.0;
    for (std::size_t i = 0; i < k; ++i) {
        v *= static_cast<double>(n - i) / static_cast<double>(i + 1);
        if (v > static_cast<double>(cap) * 2.0) return cap + 1;
    }
    return static_cast<std::size_t>(v);
}

} // namespace

SubspaceMass subspace_mass_sup(const DiscreteMeasure& mu, int i, const EnumBudget& budget) {
    const int n = mu.dim;
    const std::size_t m = mu.count();
    if (i < 1 || i > n - 1) throw Error("subspace dimension must lie in [1, n-1]");
    if (m > budget.max_atoms)
        throw Error("exact check infeasible: " + std::to_string(m) +
                    " atoms exceed the enumeration budget of " +
                    std::to_string(budget.max_atoms));
    const std::size_t k = std::min<std::size_t>(i, m);
    if (binomial_capped(m, k, budget.max_subsets) > budget.max_subsets)
        throw Error("exact check infeasible: subset enumeration exceeds budget");

    const double total = mu.total();
    SubspaceMass best;

    std::vector<std::size_t> idx(k);
    for (std::size_t j = 0; j < k; ++j) idx[j] = j;
    std::vector<double> subset, basis;
    const double membership_tol = 1e-8;

    while (true) {
        subset.clear();
        for (std::size_t j : idx)
            subset.insert(subset.end(), mu.atoms.begin() + j * n, mu.atoms.begin() + (j + 1) * n);
        orthonormal_basis(subset, n, 1e-12, basis);
        CompensatedSum mass;
        for (std::size_t a = 0; a < m; ++a)
            if (span_residual(mu.atom(a), basis, n) <= membership_tol) mass.add(mu.weights[a]);
        const double frac = mass.value() / total;
        if (frac > best.fraction) {
            best.fraction = frac;
            best.witness.assign(idx.begin(), idx.end());
        }
        // advance to the next k-combination of {0..m-1}
        bool advanced = false;
        for (std::size_t j = k; j-- > 0;) {
            if (idx[j] != j + m - k) {
                ++idx[j];
                for (std::size_t l = j + 1; l < k; ++l) idx[l] = idx[l - 1] + 1;
                advanced = true;
                break;
            }
        }
        if (!advanced) break;
    }
    return best;
}

std::vector<SubspaceRow> check_subspace_mass_inequality(const DiscreteMeasure& mu, double q,
                                                        const EnumBudget& budget) {
    const int n = mu.dim;
    if (!(q > 0.0 && q < n))
        throw Error("subspace mass inequality applies for q in (0, n)");
    std::vector<SubspaceRow> rows;
    for (int i = 1; i <= n - 1; ++i) {
        SubspaceMass sm = subspace_mass_sup(mu, i, budget);
        SubspaceRow row;
        row.i = i;
        row.fraction = sm.fraction;
        row.threshold = std::min(static_cast<double>(i) / q, 1.0);
        row.slack = row.threshold - row.fraction;
        row.witness = std::move(sm.witness);
        rows.push_back(std::move(row));
    }
    return rows;
}

HemisphereResult hemisphere_concentrated(const DiscreteMeasure& mu) {
    const CapScan scan = scan_common_hemisphere(mu.atoms, mu.dim);
    HemisphereResult out;
    out.min_dot = scan.best_min_dot;
    out.witness = scan.direction;
    if (scan.best_min_dot >= 1e-10)
        out.status = HemisphereStatus::concentrated;
    else if (scan.best_min_dot <= -1e-6)
        out.status = HemisphereStatus::none;
    else
        out.status = HemisphereStatus::indeterminate;
    return out;
}

bool great_subsphere_concentrated(const DiscreteMeasure& mu) {
    return rank_of_vectors(mu.atoms, mu.dim, 1e-10) < mu.dim;
}

MassBalance check_mass_balance(const DiscreteMeasure& mu, const StarBody& q,
                               const SphereGrid& grid, double tol) {
    MassBalance out;
    out.total = mu.total();
    out.vol_q = star_volume(q, grid);
    out.gap = std::abs(out.total - out.vol_q) / out.vol_q;
    out.pass = out.gap <= tol;
    return out;
}

RegimeAssessment assess_regime(const DiscreteMeasure& mu, double q, const StarBody* body,
                               const SphereGrid* grid, double mass_balance_tol,
                               double slack_min, const EnumBudget& budget) {
    const int n = mu.dim;
    RegimeAssessment out;
    PreconditionReport& r = out.report;
    r.even = check_even(mu, 1e-9);
    r.hemisphere = hemisphere_concentrated(mu);
    r.great_subsphere_free = !great_subsphere_concentrated(mu);
    out.pass = true;
    auto fail = [&](const std::string& what) {
        out.pass = false;
        out.failures.push_back(what);
    };

    if (q < 0.0) {
        if (r.hemisphere.status == HemisphereStatus::concentrated)
            fail("measure is concentrated in a closed hemisphere");
        else if (r.hemisphere.status == HemisphereStatus::indeterminate) {
            out.indeterminate = true;
            fail("hemisphere test is indeterminate");
        }
        return out;
    }

    if (q == 0.0) {
        if (!r.even) fail("q = 0 requires an even measure");
        if (body && !body->even()) fail("q = 0 requires an origin-symmetric star body");
        if (!r.great_subsphere_free) fail("measure is concentrated on a great subsphere");
        if (body && grid) {
            r.mass_balance = check_mass_balance(mu, *body, *grid, mass_balance_tol);
            if (!r.mass_balance->pass)
                fail("total mass does not match the volume of Q (relative gap " +
                     std::to_string(r.mass_balance->gap) + ")");
        } else {
            out.indeterminate = true;
            fail("mass balance unchecked (star body or grid unavailable)");
        }
        return out;
    }

    if (q < n) {
        if (!r.even) {
            fail("0 < q < n requires an even measure");
            return out; // subspace rows are inapplicable for non-even data
        }
        if (body && !body->even()) fail("0 < q < n requires an origin-symmetric star body");
        r.subspace_applicable = true;
        r.subspace = check_subspace_mass_inequality(mu, q, budget);
        for (const SubspaceRow& row : r.subspace) {
            if (row.slack <= 0.0)
                fail("subspace mass inequality fails at i = " + std::to_string(row.i));
            else if (row.slack <= slack_min) {
                out.indeterminate = true;
                fail("subspace mass inequality slack at i = " + std::to_string(row.i) +
                     " is below the refusal band");
            }
        }
        return out;
    }

    fail("q >= n is outside the proven existence range");
    if (r.hemisphere.status == HemisphereStatus::concentrated)
        fail("measure is concentrated in a closed hemisphere");
    return out;
}

} // namespace minklab
