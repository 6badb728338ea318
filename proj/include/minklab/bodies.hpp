#pragma once

#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "minklab/sphere_grid.hpp"

namespace minklab {

struct Ball {
    double radius = 1.0;
};

/// Origin-centered ellipsoid { y : |A P y| <= 1 } with A = diag(1/b_1..1/b_n).
/// Semi-axes are stored ascending; `rotation` is the row-major orthogonal
/// matrix P (empty means identity).
struct Ellipsoid {
    std::vector<double> semi_axes;
    std::vector<double> rotation;
};

/// Radial function sampled on a fixed grid. Evaluation is only defined at the
/// grid's own nodes; there is deliberately no interpolation.
struct RadialField {
    std::shared_ptr<const SphereGrid> grid;
    std::vector<double> values;
};

/// Star-shaped body described by its radial function.
class StarBody {
public:
    static StarBody ball(int dim, double radius);
    static StarBody ellipsoid(std::vector<double> semi_axes_ascending,
                              std::vector<double> rotation = {});
    static StarBody radial_field(std::shared_ptr<const SphereGrid> grid,
                                 std::vector<double> values, bool even);

    int dim() const { return dim_; }
    bool even() const { return even_; }
    const std::variant<Ball, Ellipsoid, RadialField>& shape() const { return shape_; }

    /// rho(u) for unit u. RadialField bodies require u to be a grid node.
    double radial(std::span<const double> u) const;

    /// rho at node k of `grid`; for RadialField bodies the grid descriptor
    /// must match the stored grid.
    double radial_node(const SphereGrid& grid, std::size_t k) const;

    double min_radial() const;
    double max_radial() const;

private:
    int dim_ = 0;
    bool even_ = true;
    std::variant<Ball, Ellipsoid, RadialField> shape_;
};

/// Gauge |y| / rho(y/|y|); 0 at the origin. Positively homogeneous of degree 1.
double minkowski_functional(const StarBody& q, std::span<const double> y);

/// Volume (1/n) * integral of rho^n over the grid.
double star_volume(const StarBody& q, const SphereGrid& grid);

/// Support function of an origin-centered ellipsoid, h(x) = |diag(b) P x|.
double ellipsoid_support(const Ellipsoid& e, std::span<const double> x);

/// Convex polytope as an intersection of half-spaces { xi . x_i <= h_i } with
/// unit outward normals x_i and positive support numbers h_i. Plain data;
/// validate_polytope checks the invariants at trust boundaries.
struct SupportPolytope {
    int dim = 0;
    std::vector<double> normals; // count * dim, row-major
    std::vector<double> support; // count
    bool even = false;

    std::size_t count() const { return support.size(); }
    std::span<const double> normal(std::size_t i) const {
        return {normals.data() + i * dim, static_cast<std::size_t>(dim)};
    }
};

/// Boundary point along direction u: radius and the index of the facet that
/// attains it (smallest index on ties).
struct RadialPoint {
    double rho = 0.0;
    std::size_t facet = 0;
};

/// rho_K(u) = min over { i : u.x_i > 0 } of h_i / (u.x_i). Throws when no
/// constraint bounds the ray (possible only for invalid polytopes).
RadialPoint radial_polytope(const SupportPolytope& k, std::span<const double> u);

/// Support function h_K(x) of the half-space intersection, evaluated as the
/// grid maximum of rho_K(u)(u.x) followed by one golden-ratio compass
/// refinement pass (32 steps) around the best node.
double wulff_support(const SupportPolytope& k, std::span<const double> x,
                     const SphereGrid& grid);

/// True iff some grid direction's radial minimum is attained by facet i.
bool facet_active(const SupportPolytope& k, std::size_t i, const SphereGrid& grid);

/// Throws unless: normals are unit and pairwise distinct, support numbers are
/// positive, the normals are not contained in a closed hemisphere (so the
/// body is bounded), and the antipodal pairing holds when even is claimed.
void validate_polytope(const SupportPolytope& k);

/// Antipodal pair map for a set of directions: out[i] = j with x_j = -x_i.
/// Empty result if some direction has no antipode within tol.
std::vector<std::size_t> antipodal_pairs(std::span<const double> flat, int dim,
                                         double tol = 1e-8);

} // namespace minklab
