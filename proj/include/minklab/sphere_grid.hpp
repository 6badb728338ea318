#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "minklab/core.hpp"

namespace minklab {

enum class GridKind { product, monte_carlo };

/// Everything needed to regenerate a grid deterministically. Nodes are never
/// serialized; documents carry only this descriptor.
struct GridSpec {
    int dim = 3;
    GridKind kind = GridKind::product;
    int resolution = 48;
    std::uint64_t seed = 1;

    bool operator==(const GridSpec&) const = default;
};

/// Quadrature nodes and weights on S^{n-1}. Grids are immutable after
/// construction and safe to share across threads.
///
/// Both kinds are symmetric by construction: nodes are laid out as two blocks
/// of equal size, the second block being the exact (bitwise) negation of the
/// first with identical weights. antipode(k) maps between the blocks.
class SphereGrid {
public:
    const GridSpec& spec() const { return spec_; }
    int dim() const { return spec_.dim; }
    bool symmetric() const { return true; }
    std::size_t size() const { return weights_.size(); }

    std::span<const double> node(std::size_t k) const {
        return {nodes_.data() + k * spec_.dim, static_cast<std::size_t>(spec_.dim)};
    }
    double weight(std::size_t k) const { return weights_[k]; }
    std::size_t antipode(std::size_t k) const {
        const std::size_t half = size() / 2;
        return k < half ? k + half : k - half;
    }

    std::span<const double> nodes_flat() const { return nodes_; }
    std::span<const double> weights() const { return weights_; }

    /// Angular spacing estimate, used to size local refinement steps.
    double mesh_angle() const;

private:
    friend SphereGrid build_grid(int, int, GridKind, std::uint64_t);
    GridSpec spec_;
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

/// Deterministic grid construction.
///   product:     tensor grid in angular coordinates (Gauss-Legendre polar
///                levels, uniform base circle), symmetrized under negation.
///   monte_carlo: antithetic pairs +/-u with equal weights summing to the
///                surface area of S^{n-1}.
/// Rejects dim < 2 or resolution < 4. Odd resolutions are bumped to even so
/// that the antipodal pairing is exact.
SphereGrid build_grid(int dim, int resolution, GridKind kind, std::uint64_t seed = 1);

/// Checks the construction invariants (unit nodes, positive weights, weight
/// sum close to the sphere area, exact antipodal pairing). Throws on failure
/// naming the violated invariant.
void validate_grid(const SphereGrid& grid, double weight_sum_rel_tol = 1e-3);

/// Fixed-order compensated quadrature. The callable is invoked once per node
/// in storage order; non-finite values abort with the offending node named.
template <class F>
double integrate(const SphereGrid& grid, F&& f) {
    CompensatedSum acc;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        double v;
        if constexpr (std::is_invocable_v<F, std::span<const double>, std::size_t>)
            v = f(grid.node(k), k);
        else
            v = f(grid.node(k));
        if (!std::isfinite(v))
            throw Error("non-finite integrand at node " + std::to_string(k) + " " +
                        describe_vector(grid.node(k)));
        acc.add(grid.weight(k) * v);
    }
    return acc.value();
}

/// Numerical rank of a set of vectors (flat row-major storage) via modified
/// Gram-Schmidt with residual threshold tol.
int rank_of_vectors(std::span<const double> flat, int dim, double tol);

/// Orthonormal basis of the span of the given vectors; rank = basis count.
/// Basis vectors are stored row-major in `basis`.
int orthonormal_basis(std::span<const double> flat, int dim, double tol,
                      std::vector<double>& basis);

/// Result of searching for a direction v maximizing min_i v.x_i over the unit
/// sphere. best_min_dot >= 0 means every vector lies in the closed hemisphere
/// around `direction` (up to the search's accuracy).
struct CapScan {
    double best_min_dot = -1.0;
    std::vector<double> direction;
};

/// Deterministic coarse scan plus local refinement for the hemisphere
/// feasibility problem max_v min_i v.x_i. Shared by the polytope boundedness
/// check and the measure-side hemisphere test.
CapScan scan_common_hemisphere(std::span<const double> flat, int dim);

} // namespace minklab
