#include "minklab/sphere_grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace minklab {

namespace {

/// Gauss-Legendre nodes/weights on [-1,1], Newton iteration on the recurrence.
/// Nodes come out sorted ascending and exactly symmetric about zero.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Chebyshev-like initial guess for the i-th root (descending order)
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        const double wi = 2.0 / ((1.0 - z * z) * pp * pp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if (n % 2 == 1) x[n / 2] = 0.0;
}

// Nodes of S^{m-1} grids are built half-first: the leading block covers one
// representative per antipodal pair, the trailing block is its exact negation.
struct HalfGrid {
    std::vector<double> nodes; // half_count * dim
    std::vector<double> weights;
};

HalfGrid build_product_half(int dim, int res) {
    HalfGrid out;
    if (dim == 2) {
        const int total = res + (res % 2);
        const int half = total / 2;
        out.nodes.reserve(half * 2);
        out.weights.reserve(half);
        const double w = 2.0 * M_PI / total;
        for (int j = 0; j < half; ++j) {
            const double th = 2.0 * M_PI * (j + 0.5) / total;
            out.nodes.push_back(std::cos(th));
            out.nodes.push_back(std::sin(th));
            out.weights.push_back(w);
        }
        return out;
    }
    // S^{m-1} = polar level t in (-1,1) times S^{m-2}; surface measure factor
    // (1-t^2)^{(m-3)/2} folded into the polar weight.
    HalfGrid sub = build_product_half(dim - 1, res);
    const int nt = res + (res % 2);
    std::vector<double> t, wt;
    gauss_legendre(nt, t, wt);
    const double expo = 0.5 * (dim - 3);
    const std::size_t sub_half = sub.weights.size();
    // full sub grid = sub half plus its negation
    out.nodes.reserve(2 * sub_half * (nt / 2) * dim);
    for (int i = nt / 2; i < nt; ++i) { // positive polar levels only
        const double ti = t[i];
        const double st = std::sqrt(1.0 - ti * ti);
        const double wpol = wt[i] * std::pow(1.0 - ti * ti, expo);
        for (std::size_t s = 0; s < 2 * sub_half; ++s) {
            const double sign = s < sub_half ? 1.0 : -1.0;
            const std::size_t base = (s < sub_half ? s : s - sub_half) * (dim - 1);
            for (int c = 0; c < dim - 1; ++c)
                out.nodes.push_back(st * sign * sub.nodes[base + c]);
            out.nodes.push_back(ti);
            out.weights.push_back(wpol * sub.weights[s < sub_half ? s : s - sub_half]);
        }
    }
    return out;
}

HalfGrid build_monte_carlo_half(int dim, int res, std::uint64_t seed) {
    double want = 1.0;
    for (int i = 0; i < dim - 1; ++i) want *= res;
    const std::size_t pairs = std::max<std::size_t>(2, static_cast<std::size_t>((want + 1.0) / 2.0));
    if (pairs > 20'000'000) throw Error("monte_carlo grid too large");

    HalfGrid out;
    out.nodes.reserve(pairs * dim);
    out.weights.assign(pairs, unit_sphere_area(dim) / (2.0 * static_cast<double>(pairs)));
    NormalSampler gauss(seed);
    std::vector<double> v(dim);
    for (std::size_t p = 0; p < pairs; ++p) {
        double n2 = 0.0;
        do {
            for (int c = 0; c < dim; ++c) v[c] = gauss.next();
            n2 = dot(v, v);
        } while (n2 < 1e-24);
        const double inv = 1.0 / std::sqrt(n2);
        for (int c = 0; c < dim; ++c) out.nodes.push_back(v[c] * inv);
    }
    return out;
}

} // namespace

SphereGrid build_grid(int dim, int resolution, GridKind kind, std::uint64_t seed) {
    if (dim < 2) throw Error("sphere grid requires dim >= 2, got " + std::to_string(dim));
    if (resolution < 4)
        throw Error("sphere grid requires resolution >= 4, got " + std::to_string(resolution));

    HalfGrid half = kind == GridKind::product ? build_product_half(dim, resolution)
                                              : build_monte_carlo_half(dim, resolution, seed);

    SphereGrid g;
    g.spec_ = GridSpec{dim, kind, resolution, seed};
    const std::size_t hn = half.weights.size();
    g.nodes_.resize(2 * hn * dim);
    g.weights_.resize(2 * hn);
    std::copy(half.nodes.begin(), half.nodes.end(), g.nodes_.begin());
    for (std::size_t k = 0; k < hn; ++k) {
        for (int c = 0; c < dim; ++c)
            g.nodes_[(hn + k) * dim + c] = -half.nodes[k * dim + c];
        g.weights_[k] = half.weights[k];
        g.weights_[hn + k] = half.weights[k];
    }
    return g;
}

double SphereGrid::mesh_angle() const {
    if (spec_.kind == GridKind::product) return M_PI / spec_.resolution * 2.0;
    // effective spacing of a random set of this many points
    const double per_dim = std::pow(static_cast<double>(size()), 1.0 / (spec_.dim - 1));
    return 4.0 / per_dim;
}

void validate_grid(const SphereGrid& grid, double weight_sum_rel_tol) {
    const int n = grid.dim();
    CompensatedSum wsum;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (std::abs(norm(grid.node(k)) - 1.0) > 1e-12)
            throw Error("grid node-normalization invariant violated at node " + std::to_string(k));
        if (!(grid.weight(k) > 0.0))
            throw Error("grid weight-positivity invariant violated at node " + std::to_string(k));
        wsum.add(grid.weight(k));
    }
    const double area = unit_sphere_area(n);
    if (std::abs(wsum.value() - area) > weight_sum_rel_tol * area)
        throw Error("grid weight-sum invariant violated: got " + std::to_string(wsum.value()) +
                    ", expected " + std::to_string(area));
    const std::size_t half = grid.size() / 2;
    for (std::size_t k = 0; k < half; ++k) {
        const auto a = grid.node(k);
        const auto b = grid.node(grid.antipode(k));
        for (int c = 0; c < n; ++c)
            if (b[c] != -a[c]) throw Error("grid antipodal-pairing invariant violated");
        if (grid.weight(k) != grid.weight(grid.antipode(k)))
            throw Error("grid antipodal-weight invariant violated");
    }
}

int orthonormal_basis(std::span<const double> flat, int dim, double tol,
                      std::vector<double>& basis) {
    basis.clear();
    if (flat.empty()) return 0;
    const std::size_t count = flat.size() / dim;
    std::vector<double> v(dim);
    for (std::size_t i = 0; i < count; ++i) {
        std::copy(flat.begin() + i * dim, flat.begin() + (i + 1) * dim, v.begin());
        // two projection passes for numerical stability
        const std::size_t nb = basis.size() / dim;
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t b = 0; b < nb; ++b) {
                std::span<const double> bb(basis.data() + b * dim, static_cast<std::size_t>(dim));
                const double proj = dot(v, bb);
                for (int c = 0; c < dim; ++c) v[c] -= proj * bb[c];
            }
        }
        const double r = norm(v);
        if (r > tol) {
            for (int c = 0; c < dim; ++c) basis.push_back(v[c] / r);
            if (basis.size() == static_cast<std::size_t>(dim) * dim) break;
        }
    }
    return static_cast<int>(basis.size() / dim);
}

int rank_of_vectors(std::span<const double> flat, int dim, double tol) {
    if (flat.empty()) throw Error("rank_of_vectors: empty vector list");
    std::vector<double> basis;
    return orthonormal_basis(flat, dim, tol, basis);
}

namespace {

double min_dot(std::span<const double> flat, int dim, std::span<const double> v,
               std::size_t* argmin = nullptr) {
    const std::size_t count = flat.size() / dim;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < count; ++i) {
        const double d = dot({flat.data() + i * dim, static_cast<std::size_t>(dim)}, v);
        if (d < best) {
            best = d;
            if (argmin) *argmin = i;
        }
    }
    return best;
}

// tangent directions probed by the compass refinement: the coordinate frame
// projected to the tangent space, plus the tangent part of the active vector
std::vector<std::vector<double>> tangent_probes(std::span<const double> v,
                                                std::span<const double> active, int dim) {
    std::vector<std::vector<double>> probes;
    for (int a = 0; a < dim; ++a) {
        std::vector<double> t(dim, 0.0);
        t[a] = 1.0;
        const double p = dot(t, v);
        for (int c = 0; c < dim; ++c) t[c] -= p * v[c];
        const double r = norm(t);
        if (r > 1e-8) {
            for (double& x : t) x /= r;
            probes.push_back(std::move(t));
        }
    }
    if (!active.empty()) {
        std::vector<double> t(active.begin(), active.end());
        const double p = dot(t, v);
        for (int c = 0; c < dim; ++c) t[c] -= p * v[c];
        const double r = norm(t);
        if (r > 1e-10) {
            for (double& x : t) x /= r;
            probes.push_back(std::move(t));
        }
    }
    return probes;
}

CapScan refine_direction(std::span<const double> flat, int dim, std::vector<double> v,
                         double f0, double delta0, int steps) {
    double fbest = f0;
    double delta = delta0;
    std::size_t arg = 0;
    min_dot(flat, dim, v, &arg);
    for (int s = 0; s < steps; ++s) {
        bool improved = false;
        std::span<const double> active(flat.data() + arg * dim, dim);
        for (const auto& t : tangent_probes(v, active, dim)) {
            for (double sign : {1.0, -1.0}) {
                std::vector<double> cand(dim);
                const double cd = std::cos(sign * delta), sd = std::sin(sign * delta);
                for (int c = 0; c < dim; ++c) cand[c] = cd * v[c] + sd * t[c];
                cand = normalized(cand);
                std::size_t a2 = 0;
                const double f2 = min_dot(flat, dim, cand, &a2);
                if (f2 > fbest) {
                    fbest = f2;
                    v = std::move(cand);
                    arg = a2;
                    improved = true;
                }
            }
        }
        if (!improved) delta *= 0.6180339887498949;
        if (delta < 1e-14) break;
    }
    return CapScan{fbest, std::move(v)};
}

} // namespace

CapScan scan_common_hemisphere(std::span<const double> flat, int dim) {
    if (flat.empty()) throw Error("hemisphere scan: empty vector list");
    const std::size_t count = flat.size() / dim;

    // candidate seeds: coarse symmetric grid, each input vector, and the
    // normalized mean (optimal for tightly clustered sets)
    std::vector<std::vector<double>> seeds;
    const SphereGrid coarse = build_grid(dim, dim <= 3 ? 16 : 8, GridKind::product);
    for (std::size_t k = 0; k < coarse.size(); ++k)
        seeds.emplace_back(coarse.node(k).begin(), coarse.node(k).end());
    for (std::size_t i = 0; i < count; ++i)
        seeds.emplace_back(flat.begin() + i * dim, flat.begin() + (i + 1) * dim);
    std::vector<double> mean(dim, 0.0);
    for (std::size_t i = 0; i < count; ++i)
        for (int c = 0; c < dim; ++c) mean[c] += flat[i * dim + c];
    if (norm(mean) > 1e-12) seeds.push_back(normalized(mean));

    // keep the best few seeds, refine each
    std::vector<std::pair<double, std::size_t>> scored;
    scored.reserve(seeds.size());
    for (std::size_t s = 0; s < seeds.size(); ++s)
        scored.emplace_back(min_dot(flat, dim, seeds[s]), s);
    std::sort(scored.begin(), scored.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });

    CapScan best;
    const double delta0 = M_PI / 16.0;
    const std::size_t tops = std::min<std::size_t>(5, scored.size());
    for (std::size_t r = 0; r < tops; ++r) {
        CapScan c = refine_direction(flat, dim, seeds[scored[r].second], scored[r].first,
                                     delta0, 96);
        if (c.best_min_dot > best.best_min_dot) best = std::move(c);
    }
    return best;
}

} // namespace minklab
