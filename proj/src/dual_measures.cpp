#include "minklab/dual_measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace minklab {

double DiscreteMeasure::total() const {
    CompensatedSum s;
    for (double w : weights) s.add(w);
    return s.value();
}

void validate_measure(const DiscreteMeasure& mu, bool allow_zero_weights) {
    const std::size_t count = mu.count();
    if (mu.dim < 2) throw Error("measure requires dim >= 2");
    if (count == 0 || mu.atoms.size() != count * mu.dim)
        throw Error("measure atoms/weights size mismatch");
    for (std::size_t i = 0; i < count; ++i) {
        if (std::abs(norm(mu.atom(i)) - 1.0) > 1e-12)
            throw Error("measure atom " + std::to_string(i) + " is not a unit vector");
        const bool ok = allow_zero_weights ? mu.weights[i] >= 0.0 : mu.weights[i] > 0.0;
        if (!ok || !std::isfinite(mu.weights[i]))
            throw Error("measure weight " + std::to_string(i) + " must be " +
                        (allow_zero_weights ? "nonnegative" : "strictly positive"));
    }
    for (std::size_t i = 0; i < count; ++i)
        for (std::size_t j = i + 1; j < count; ++j) {
            double d2 = 0.0;
            for (int c = 0; c < mu.dim; ++c) {
                const double dd = mu.atoms[i * mu.dim + c] - mu.atoms[j * mu.dim + c];
                d2 += dd * dd;
            }
            if (d2 < 1e-16)
                throw Error("measure atoms " + std::to_string(i) + " and " + std::to_string(j) +
                            " coincide");
        }
    if (!(mu.total() > 0.0)) throw Error("measure must have positive total mass");
    if (mu.even) {
        const auto pair = antipodal_pairs(mu.atoms, mu.dim);
        if (pair.empty()) throw Error("measure claimed even but an atom has no antipode");
        for (std::size_t i = 0; i < count; ++i)
            if (std::abs(mu.weights[i] - mu.weights[pair[i]]) >
                1e-12 * std::max(1.0, std::abs(mu.weights[i])))
                throw Error("measure claimed even but weights differ on an antipodal pair");
    }
}

DualMeasureEvaluator::DualMeasureEvaluator(const SphereGrid& grid, int dim,
                                           std::span<const double> normals_flat,
                                           bool normals_even, const StarBody& q)
    : grid_(grid), dim_(dim), count_(normals_flat.size() / dim) {
    if (grid.dim() != dim || q.dim() != dim)
        throw Error("evaluator grid/body dimension mismatch");
    const std::size_t nodes = grid.size();
    dots_.resize(nodes * count_);
    rho_q_.resize(nodes);
    log_rho_q_.resize(nodes);
    rho_q_n_.resize(nodes);
    for (std::size_t k = 0; k < nodes; ++k) {
        const auto u = grid.node(k);
        for (std::size_t i = 0; i < count_; ++i) {
            double d = 0.0;
            for (int c = 0; c < dim; ++c) d += u[c] * normals_flat[i * dim + c];
            dots_[k * count_ + i] = d;
        }
        const double r = q.radial_node(grid, k);
        rho_q_[k] = r;
        log_rho_q_[k] = std::log(r);
        rho_q_n_[k] = std::pow(r, dim);
    }
    CompensatedSum vol;
    for (std::size_t k = 0; k < nodes; ++k) vol.add(grid.weight(k) * rho_q_n_[k]);
    volume_q_ = vol.value() / dim;

    pair_.assign(count_, count_);
    if (normals_even && q.even() && grid.symmetric()) {
        auto p = antipodal_pairs(normals_flat, dim);
        if (!p.empty()) {
            pair_ = std::move(p);
            even_path_ = true;
        }
    }
}

CurvatureBins DualMeasureEvaluator::eval(std::span<const double> support, double q,
                                         bool want_entropy) const {
    if (support.size() != count_) throw Error("evaluator support-number count mismatch");
    const std::size_t nodes = grid_.size();
    CurvatureBins out;
    std::vector<CompensatedSum> bins(count_);
    CompensatedSum total, entropy;
    out.min_rho = std::numeric_limits<double>::infinity();
    out.max_rho = 0.0;
    const double nq = dim_ - q;

    auto radial_at = [&](std::size_t k, std::size_t& facet) {
        const double* d = dots_.data() + k * count_;
        double best = std::numeric_limits<double>::infinity();
        std::size_t arg = count_;
        for (std::size_t i = 0; i < count_; ++i) {
            if (d[i] > 0.0) {
                const double rho = support[i] / d[i];
                if (rho < best) {
                    best = rho;
                    arg = i;
                }
            }
        }
        if (arg == count_)
            throw Error("polytope unbounded along grid node " + std::to_string(k));
        facet = arg;
        return best;
    };

    auto term = [&](std::size_t k, double rho) {
        return std::pow(rho, q) * std::pow(rho_q_[k], nq);
    };

    // the mirrored path needs the support numbers themselves to pair exactly,
    // not just the normal set (callers may perturb single entries)
    bool mirror = even_path_;
    if (mirror)
        for (std::size_t i = 0; i < count_; ++i)
            if (support[i] != support[pair_[i]]) {
                mirror = false;
                break;
            }

    out.mirrored = mirror;
    if (mirror) {
        const std::size_t half = nodes / 2;
        for (std::size_t k = 0; k < half; ++k) {
            std::size_t facet = 0;
            const double rho = radial_at(k, facet);
            out.min_rho = std::min(out.min_rho, rho);
            out.max_rho = std::max(out.max_rho, rho);
            const double wf = grid_.weight(k) * term(k, rho);
            if (!std::isfinite(wf))
                throw Error("non-finite dual-volume integrand at node " + std::to_string(k));
            bins[facet].add(wf);
            bins[pair_[facet]].add(wf);
            total.add(wf);
            total.add(wf);
            if (want_entropy) {
                const double ent =
                    grid_.weight(k) * (std::log(rho) - log_rho_q_[k]) * rho_q_n_[k];
                entropy.add(ent);
                entropy.add(ent);
            }
        }
    } else {
        for (std::size_t k = 0; k < nodes; ++k) {
            std::size_t facet = 0;
            const double rho = radial_at(k, facet);
            out.min_rho = std::min(out.min_rho, rho);
            out.max_rho = std::max(out.max_rho, rho);
            const double wf = grid_.weight(k) * term(k, rho);
            if (!std::isfinite(wf))
                throw Error("non-finite dual-volume integrand at node " + std::to_string(k));
            bins[facet].add(wf);
            total.add(wf);
            if (want_entropy)
                entropy.add(grid_.weight(k) * (std::log(rho) - log_rho_q_[k]) * rho_q_n_[k]);
        }
    }

    out.atom_mass.resize(count_);
    for (std::size_t i = 0; i < count_; ++i) out.atom_mass[i] = bins[i].value() / dim_;
    out.total = total.value() / dim_;
    out.entropy = want_entropy ? entropy.value() / dim_ : 0.0;
    return out;
}

double dual_mixed_volume(const SupportPolytope& k, const StarBody& q, double exponent,
                         const SphereGrid& grid) {
    DualMeasureEvaluator ev(grid, k.dim, k.normals, k.even, q);
    return ev.eval(k.support, exponent).total;
}

double dual_entropy(const SupportPolytope& k, const StarBody& q, const SphereGrid& grid) {
    DualMeasureEvaluator ev(grid, k.dim, k.normals, k.even, q);
    return ev.eval(k.support, 0.0, true).entropy;
}

DiscreteMeasure dual_curvature_measure(const SupportPolytope& k, const StarBody& q,
                                       double exponent, const SphereGrid& grid,
                                       std::vector<std::size_t>* zero_atoms) {
    DualMeasureEvaluator ev(grid, k.dim, k.normals, k.even, q);
    CurvatureBins bins = ev.eval(k.support, exponent);
    DiscreteMeasure mu;
    mu.dim = k.dim;
    mu.atoms = k.normals;
    mu.weights = std::move(bins.atom_mass);
    mu.even = bins.mirrored;
    if (zero_atoms) {
        zero_atoms->clear();
        for (std::size_t i = 0; i < mu.count(); ++i)
            if (mu.weights[i] == 0.0) zero_atoms->push_back(i);
    }
    return mu;
}

double total_variation_distance(const DiscreteMeasure& a, const DiscreteMeasure& b,
                                double match_tol) {
    if (a.dim != b.dim) throw Error("total variation distance: dimension mismatch");
    const std::size_t na = a.count(), nb = b.count();
    std::vector<std::size_t> match(na, nb);
    std::vector<bool> taken(nb, false);
    for (std::size_t i = 0; i < na; ++i) {
        std::size_t found = nb;
        for (std::size_t j = 0; j < nb; ++j) {
            double d2 = 0.0;
            for (int c = 0; c < a.dim; ++c) {
                const double dd = a.atoms[i * a.dim + c] - b.atoms[j * b.dim + c];
                d2 += dd * dd;
            }
            if (d2 <= match_tol * match_tol) {
                if (found != nb)
                    throw Error("ambiguous atom matching: atom " + std::to_string(i) +
                                " is within tolerance of two atoms");
                found = j;
            }
        }
        if (found != nb) {
            if (taken[found])
                throw Error("ambiguous atom matching: two atoms map to atom " +
                            std::to_string(found));
            taken[found] = true;
            match[i] = found;
        }
    }
    CompensatedSum tv;
    for (std::size_t i = 0; i < na; ++i) {
        if (match[i] == nb)
            tv.add(std::abs(a.weights[i]));
        else
            tv.add(std::abs(a.weights[i] - b.weights[match[i]]));
    }
    for (std::size_t j = 0; j < nb; ++j)
        if (!taken[j]) tv.add(std::abs(b.weights[j]));
    return tv.value();
}

double ellipsoid_dual_volume_estimate(std::span<const double> b, double q) {
    const int n = static_cast<int>(b.size());
    if (!(q > 0.0)) throw Error("ellipsoid dual-volume estimate requires q > 0");
    for (int i = 1; i < n; ++i)
        if (b[i] < b[i - 1]) throw Error("semi-axes must be ascending");
    if (q >= n) {
        double prod = 1.0;
        for (double x : b) prod *= x;
        return prod * std::pow(b[n - 1], q - n);
    }
    const double qi = std::round(q);
    if (std::abs(q - qi) > 1e-12) {
        const int cq = static_cast<int>(std::ceil(q));
        double prod = 1.0;
        for (int i = 0; i < cq; ++i) prod *= b[i];
        return prod * std::pow(b[cq - 1], q - cq);
    }
    const int iq = static_cast<int>(qi);
    double prod = 1.0;
    for (int i = 0; i < iq; ++i) prod *= b[i];
    return prod * (1.0 + std::log(b[iq] / b[iq - 1]));
}

double dual_entropy_upper_bound(const StarBody& q, const SphereGrid& grid,
                                double min_radial_k) {
    const int n = q.dim();
    const double vol = star_volume(q, grid);
    const double max_rho = q.max_radial();
    const double log_int = integrate(grid, [&](std::span<const double> u) {
        return -std::log(std::abs(u[0]));
    });
    const double weighted_log = integrate(grid, [&](std::span<const double>, std::size_t k) {
        const double r = q.radial_node(grid, k);
        return std::pow(r, n) * std::log(r);
    });
    return vol * std::log(min_radial_k) + std::pow(max_rho, n) * log_int / n -
           weighted_log / n;
}

} // namespace minklab
