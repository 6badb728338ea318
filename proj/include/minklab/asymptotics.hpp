#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "minklab/sphere_grid.hpp"

namespace minklab {

/// Positive diagonal matrix with entries sorted descending. Callers with a
/// rotated quadratic form diagonalize first; conjugating by an orthogonal
/// matrix does not change any of the integrals below.
struct DiagonalSpec {
    std::vector<double> entries; // s_1 >= ... >= s_m > 0

    int order() const { return static_cast<int>(entries.size()); }
};

DiagonalSpec make_diagonal(std::vector<double> entries);

enum class EstimateCase { alpha_ge_n, noninteger_lt_n, integer_lt_n };

struct EstimateValue {
    double value = 0.0;
    EstimateCase kind = EstimateCase::alpha_ge_n;
    int ceil_alpha = 0;
    int floor_alpha = 0;
};

/// Quadrature of |Ax|^{-alpha} over S^{m-1}.
double integral_norm_power(const DiagonalSpec& a, double alpha, const SphereGrid& grid);

/// Closed-form comparison value for the integral above:
///   alpha >= m:            1 / (s_1...s_m s_m^{alpha-m})
///   non-integer alpha < m: 1 / (s_1...s_{ceil a} s_{ceil a}^{alpha - ceil a})
///   integer alpha < m:     (1 + log(s_a / s_{a+1})) / (s_1...s_a)
EstimateValue closed_form_estimate(const DiagonalSpec& a, double alpha);

struct SweepRow {
    double alpha = 0.0;
    int m = 0;
    double spread = 0.0;
    double integral = 0.0;
    double estimate = 0.0;
    double ratio = 0.0;
};

struct SweepReport {
    std::vector<SweepRow> rows;
    double min_ratio = 0.0;
    double max_ratio = 0.0;
};

/// For each condition number in `spreads`, draws descending diagonal entries
/// spanning exactly that spread (endpoints pinned at 1 and 1/spread, interior
/// log-uniform from the seed) and reports integral/estimate ratios.
SweepReport ratio_sweep(double alpha, int m, std::span<const double> spreads,
                        const SphereGrid& grid, std::uint64_t seed);

struct TwoSided {
    double lhs = 0.0;
    double rhs = 0.0;
};

/// Both sides of the exact substitution identity
///   int |Bx|^{-gamma} dx = (1/|det B|) int |B^{-1}x|^{-(m-gamma)} dx
/// over the same grid; only quadrature error separates them.
TwoSided power_reduce_check(const DiagonalSpec& b, double gamma, const SphereGrid& grid);

/// lhs = int_{S^{m-1}} |Bx|^{-beta}; rhs = the same integral over the sphere
/// of dimension 1+floor(beta) with the top entries of B. The two sides agree
/// up to a dimensional constant only, so callers compare ratio bands, not
/// values. grid_low may be null when 1+floor(beta) == 1 (the 0-sphere side is
/// evaluated exactly as 2 s_1^{-beta}).
TwoSided dimension_reduce_check(const DiagonalSpec& b, double beta, const SphereGrid& grid_m,
                                const SphereGrid* grid_low);

} // namespace minklab
