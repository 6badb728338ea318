#include "minklab/bodies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace minklab {

namespace {

void check_unit(std::span<const double> u, const char* what) {
    if (std::abs(norm(u) - 1.0) > 1e-12)
        throw Error(std::string(what) + " is not a unit vector: " + describe_vector(u));
}

double ellipsoid_inv_radial(const Ellipsoid& e, std::span<const double> u) {
    const int n = static_cast<int>(e.semi_axes.size());
    double s = 0.0;
    if (e.rotation.empty()) {
        for (int c = 0; c < n; ++c) {
            const double z = u[c] / e.semi_axes[c];
            s += z * z;
        }
    } else {
        for (int r = 0; r < n; ++r) {
            double z = 0.0;
            for (int c = 0; c < n; ++c) z += e.rotation[r * n + c] * u[c];
            z /= e.semi_axes[r];
            s += z * z;
        }
    }
    return std::sqrt(s);
}

std::size_t radial_field_node_index(const RadialField& f, std::span<const double> u) {
    const SphereGrid& g = *f.grid;
    for (std::size_t k = 0; k < g.size(); ++k) {
        const auto nk = g.node(k);
        double d2 = 0.0;
        for (std::size_t c = 0; c < u.size(); ++c) {
            const double dd = nk[c] - u[c];
            d2 += dd * dd;
        }
        if (d2 < 1e-18) return k;
    }
    throw Error("radial field evaluated off-grid at " + describe_vector(u) +
                "; sampled star bodies have no interpolation");
}

} // namespace

StarBody StarBody::ball(int dim, double radius) {
    if (dim < 2) throw Error("star body requires dim >= 2");
    if (!(radius > 0.0)) throw Error("ball radius must be positive");
    StarBody b;
    b.dim_ = dim;
    b.even_ = true;
    b.shape_ = Ball{radius};
    return b;
}

StarBody StarBody::ellipsoid(std::vector<double> semi_axes, std::vector<double> rotation) {
    const int n = static_cast<int>(semi_axes.size());
    if (n < 2) throw Error("ellipsoid requires dim >= 2");
    for (int i = 0; i < n; ++i) {
        if (!(semi_axes[i] > 0.0)) throw Error("ellipsoid semi-axes must be positive");
        if (i > 0 && semi_axes[i] < semi_axes[i - 1])
            throw Error("ellipsoid semi-axes must be sorted ascending");
    }
    if (!rotation.empty()) {
        if (rotation.size() != static_cast<std::size_t>(n) * n)
            throw Error("ellipsoid rotation must be an n x n matrix");
        // P^T P = I within 1e-10
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = 0.0;
                for (int r = 0; r < n; ++r) s += rotation[r * n + i] * rotation[r * n + j];
                if (std::abs(s - (i == j ? 1.0 : 0.0)) > 1e-10)
                    throw Error("ellipsoid rotation is not orthogonal");
            }
    }
    StarBody b;
    b.dim_ = n;
    b.even_ = true;
    b.shape_ = Ellipsoid{std::move(semi_axes), std::move(rotation)};
    return b;
}

StarBody StarBody::radial_field(std::shared_ptr<const SphereGrid> grid,
                                std::vector<double> values, bool even) {
    if (!grid) throw Error("radial field requires a grid");
    if (values.size() != grid->size())
        throw Error("radial field needs one value per grid node");
    for (std::size_t k = 0; k < values.size(); ++k)
        if (!(values[k] > 0.0) || !std::isfinite(values[k]))
            throw Error("radial field values must be positive and finite (node " +
                        std::to_string(k) + ")");
    if (even) {
        for (std::size_t k = 0; k < values.size(); ++k)
            if (std::abs(values[k] - values[grid->antipode(k)]) > 1e-10)
                throw Error("radial field claimed even but values differ on an antipodal pair");
    }
    StarBody b;
    b.dim_ = grid->dim();
    b.even_ = even;
    b.shape_ = RadialField{std::move(grid), std::move(values)};
    return b;
}

double StarBody::radial(std::span<const double> u) const {
    check_unit(u, "radial direction");
    if (const Ball* b = std::get_if<Ball>(&shape_)) return b->radius;
    if (const Ellipsoid* e = std::get_if<Ellipsoid>(&shape_))
        return 1.0 / ellipsoid_inv_radial(*e, u);
    const RadialField& f = std::get<RadialField>(shape_);
    return f.values[radial_field_node_index(f, u)];
}

double StarBody::radial_node(const SphereGrid& grid, std::size_t k) const {
    if (grid.dim() != dim_) throw Error("grid/body dimension mismatch");
    if (const RadialField* f = std::get_if<RadialField>(&shape_)) {
        if (!(f->grid->spec() == grid.spec()))
            throw Error("sampled star body evaluated on a different grid; integrals must "
                        "use the body's own grid");
        return f->values[k];
    }
    if (const Ball* b = std::get_if<Ball>(&shape_)) return b->radius;
    return 1.0 / ellipsoid_inv_radial(std::get<Ellipsoid>(shape_), grid.node(k));
}

double StarBody::min_radial() const {
    if (const Ball* b = std::get_if<Ball>(&shape_)) return b->radius;
    if (const Ellipsoid* e = std::get_if<Ellipsoid>(&shape_)) return e->semi_axes.front();
    const RadialField& f = std::get<RadialField>(shape_);
    return *std::min_element(f.values.begin(), f.values.end());
}

double StarBody::max_radial() const {
    if (const Ball* b = std::get_if<Ball>(&shape_)) return b->radius;
    if (const Ellipsoid* e = std::get_if<Ellipsoid>(&shape_)) return e->semi_axes.back();
    const RadialField& f = std::get<RadialField>(shape_);
    return *std::max_element(f.values.begin(), f.values.end());
}

double minkowski_functional(const StarBody& q, std::span<const double> y) {
    const double r = norm(y);
    if (r == 0.0) return 0.0;
    std::vector<double> u(y.begin(), y.end());
    for (double& c : u) c /= r;
    return r / q.radial(u);
}

double star_volume(const StarBody& q, const SphereGrid& grid) {
    const int n = q.dim();
    const double v = integrate(grid, [&](std::span<const double>, std::size_t k) {
        return std::pow(q.radial_node(grid, k), n);
    });
    return v / n;
}

double ellipsoid_support(const Ellipsoid& e, std::span<const double> x) {
    const int n = static_cast<int>(e.semi_axes.size());
    double s = 0.0;
    if (e.rotation.empty()) {
        for (int c = 0; c < n; ++c) {
            const double z = e.semi_axes[c] * x[c];
            s += z * z;
        }
    } else {
        for (int r = 0; r < n; ++r) {
            double z = 0.0;
            for (int c = 0; c < n; ++c) z += e.rotation[r * n + c] * x[c];
            z *= e.semi_axes[r];
            s += z * z;
        }
    }
    return std::sqrt(s);
}

RadialPoint radial_polytope(const SupportPolytope& k, std::span<const double> u) {
    const std::size_t count = k.count();
    double best = std::numeric_limits<double>::infinity();
    std::size_t facet = count;
    for (std::size_t i = 0; i < count; ++i) {
        const double d = dot(k.normal(i), u);
        if (d > 0.0) {
            const double rho = k.support[i] / d;
            if (rho < best) {
                best = rho;
                facet = i;
            }
        }
    }
    if (facet == count)
        throw Error("polytope unbounded along direction " + describe_vector(u));
    return RadialPoint{best, facet};
}

namespace {

double support_objective(const SupportPolytope& k, std::span<const double> x,
                         std::span<const double> u) {
    return radial_polytope(k, u).rho * dot(u, x);
}

} // namespace

double wulff_support(const SupportPolytope& k, std::span<const double> x,
                     const SphereGrid& grid) {
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_node = 0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double s = support_objective(k, x, grid.node(j));
        if (s > best) {
            best = s;
            best_node = j;
        }
    }

    std::vector<double> u(grid.node(best_node).begin(), grid.node(best_node).end());
    double delta = grid.mesh_angle();
    const int n = k.dim;
    for (int step = 0; step < 32; ++step) {
        bool improved = false;
        for (int a = 0; a < n; ++a) {
            std::vector<double> t(n, 0.0);
            t[a] = 1.0;
            const double p = dot(t, u);
            for (int c = 0; c < n; ++c) t[c] -= p * u[c];
            const double r = norm(t);
            if (r <= 1e-8) continue;
            for (double& v : t) v /= r;
            for (double sign : {1.0, -1.0}) {
                std::vector<double> cand(n);
                const double cd = std::cos(sign * delta), sd = std::sin(sign * delta);
                for (int c = 0; c < n; ++c) cand[c] = cd * u[c] + sd * t[c];
                cand = normalized(cand);
                const double s = support_objective(k, x, cand);
                if (s > best) {
                    best = s;
                    u = std::move(cand);
                    improved = true;
                }
            }
        }
        if (!improved) delta *= 0.6180339887498949;
    }
    return best;
}

bool facet_active(const SupportPolytope& k, std::size_t i, const SphereGrid& grid) {
    for (std::size_t j = 0; j < grid.size(); ++j)
        if (radial_polytope(k, grid.node(j)).facet == i) return true;
    return false;
}

std::vector<std::size_t> antipodal_pairs(std::span<const double> flat, int dim, double tol) {
    const std::size_t count = flat.size() / dim;
    std::vector<std::size_t> pair(count, count);
    for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t j = 0; j < count; ++j) {
            double d2 = 0.0;
            for (int c = 0; c < dim; ++c) {
                const double dd = flat[i * dim + c] + flat[j * dim + c];
                d2 += dd * dd;
            }
            if (d2 < tol * tol) {
                pair[i] = j;
                break;
            }
        }
        if (pair[i] == count) return {};
    }
    return pair;
}

void validate_polytope(const SupportPolytope& k) {
    const std::size_t count = k.count();
    if (k.dim < 2) throw Error("polytope requires dim >= 2");
    if (count == 0 || k.normals.size() != count * k.dim)
        throw Error("polytope normals/support size mismatch");
    for (std::size_t i = 0; i < count; ++i) {
        check_unit(k.normal(i), "polytope normal");
        if (!(k.support[i] > 0.0))
            throw Error("polytope support number " + std::to_string(i) + " must be positive");
    }
    for (std::size_t i = 0; i < count; ++i)
        for (std::size_t j = i + 1; j < count; ++j) {
            double d2 = 0.0;
            for (int c = 0; c < k.dim; ++c) {
                const double dd = k.normals[i * k.dim + c] - k.normals[j * k.dim + c];
                d2 += dd * dd;
            }
            if (d2 < 1e-16)
                throw Error("polytope normals " + std::to_string(i) + " and " +
                            std::to_string(j) + " coincide");
        }
    const CapScan scan = scan_common_hemisphere(k.normals, k.dim);
    if (scan.best_min_dot > -1e-6)
        throw Error("polytope normals lie in (or near) a closed hemisphere around " +
                    describe_vector(scan.direction) + "; the body would be unbounded");
    if (k.even) {
        const auto pair = antipodal_pairs(k.normals, k.dim);
        if (pair.empty()) throw Error("polytope claimed even but a normal has no antipode");
        for (std::size_t i = 0; i < count; ++i)
            if (k.support[i] != k.support[pair[i]])
                throw Error("polytope claimed even but support numbers differ on a pair");
    }
}

} // namespace minklab
