#pragma once

#include <optional>
#include <span>
#include <vector>

#include "minklab/bodies.hpp"

namespace minklab {

/// Finite atomic measure on the sphere: unit-vector atoms with weights.
/// Inputs require strictly positive weights; curvature outputs may carry
/// zero-weight atoms for inactive facets (see dual_curvature_measure).
struct DiscreteMeasure {
    int dim = 0;
    std::vector<double> atoms;   // count * dim, row-major
    std::vector<double> weights; // count
    bool even = false;

    std::size_t count() const { return weights.size(); }
    std::span<const double> atom(std::size_t i) const {
        return {atoms.data() + i * dim, static_cast<std::size_t>(dim)};
    }
    double total() const;
};

/// Throws unless atoms are unit, pairwise distinct, weights positive (or
/// nonnegative when allow_zero_weights), total positive, and the antipodal
/// pairing holds when even is claimed.
void validate_measure(const DiscreteMeasure& mu, bool allow_zero_weights = false);

/// Per-facet split of the dual-volume quadrature sum.
///   atom_mass[i] = (1/n) sum over nodes binned to facet i of w rho_K^q rho_Q^{n-q}
///   total       = the same sum without the binning (accumulated in node order)
struct CurvatureBins {
    std::vector<double> atom_mass;
    double total = 0.0;
    double entropy = 0.0; // (1/n) int log(rho_K/rho_Q) rho_Q^n, filled on request
    double min_rho = 0.0;
    double max_rho = 0.0;
    bool mirrored = false; // antipodal fast path taken; atom_mass is even exactly
};

/// Shared quadrature engine for dual mixed volumes, dual entropy and the
/// curvature measure of a support-form polytope. The normal set, star body
/// and grid are fixed at construction (dot products are precomputed); the
/// support numbers vary per call, which is what the solver iterates on.
///
/// When the normal set, the star body and the grid are all symmetric, nodes
/// are processed in antipodal pairs and the mirrored node is binned to the
/// mirrored facet, so curvature measures of even data are even exactly.
class DualMeasureEvaluator {
public:
    DualMeasureEvaluator(const SphereGrid& grid, int dim, std::span<const double> normals_flat,
                         bool normals_even, const StarBody& q);

    CurvatureBins eval(std::span<const double> support, double q,
                       bool want_entropy = false) const;

    double volume_q() const { return volume_q_; } // (1/n) int rho_Q^n
    std::size_t normal_count() const { return pair_.size(); }
    const SphereGrid& grid() const { return grid_; }
    bool even_path() const { return even_path_; }

private:
    const SphereGrid& grid_;
    int dim_;
    std::size_t count_;
    std::vector<double> dots_;      // node-major: dots_[k*count_ + i] = u_k . x_i
    std::vector<double> rho_q_;     // rho_Q per node
    std::vector<double> log_rho_q_; // log rho_Q per node
    std::vector<double> rho_q_n_;   // rho_Q^n per node
    std::vector<std::size_t> pair_; // facet antipode map (even path only)
    bool even_path_ = false;
    double volume_q_ = 0.0;
};

/// q-th dual mixed volume (1/n) int rho_K^q rho_Q^{n-q} du.
double dual_mixed_volume(const SupportPolytope& k, const StarBody& q, double exponent,
                         const SphereGrid& grid);

/// Dual mixed entropy (1/n) int log(rho_K/rho_Q) rho_Q^n du.
double dual_entropy(const SupportPolytope& k, const StarBody& q, const SphereGrid& grid);

/// Curvature measure of the polytope: quadrature nodes are binned by the
/// facet attaining the radial minimum, and each facet's normal becomes an
/// atom carrying its bin's share of the dual-volume sum. Atoms of inactive
/// facets are retained with weight zero; their indices are returned when
/// `zero_atoms` is non-null. The atom total equals dual_mixed_volume for the
/// same inputs (it is the same sum in node order).
DiscreteMeasure dual_curvature_measure(const SupportPolytope& k, const StarBody& q,
                                       double exponent, const SphereGrid& grid,
                                       std::vector<std::size_t>* zero_atoms = nullptr);

/// Atom-matched L1 distance. Atoms closer than match_tol (Euclidean, which is
/// the angle for small separations) are matched one to one; unmatched atoms
/// on either side contribute their full weight. Ambiguous matchings throw.
double total_variation_distance(const DiscreteMeasure& a, const DiscreteMeasure& b,
                                double match_tol);

/// Closed-form comparison value for the dual volume of an origin-centered
/// ellipsoid with ascending semi-axes b, exponent q > 0:
///   q >= n:               b_1...b_n b_n^{q-n}
///   non-integer q < n:    b_1...b_{ceil q} b_{ceil q}^{q - ceil q}
///   integer q < n:        b_1...b_q (1 + log(b_{q+1}/b_q))
double ellipsoid_dual_volume_estimate(std::span<const double> semi_axes_ascending, double q);

/// Upper bound for the dual entropy of an origin-symmetric body with radial
/// minimum r:
///   Vol(Q) log r + (1/n)(max rho_Q)^n int log|u_1|^{-1} du
///                - (1/n) int rho_Q^n log rho_Q du
/// with both integrals taken over the given grid.
double dual_entropy_upper_bound(const StarBody& q, const SphereGrid& grid, double min_radial_k);

} // namespace minklab
