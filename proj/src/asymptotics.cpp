#include "minklab/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace minklab {

DiagonalSpec make_diagonal(std::vector<double> entries) {
    if (entries.empty()) throw Error("diagonal spec requires at least one entry");
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (!(entries[i] > 0.0)) throw Error("diagonal entries must be positive");
        if (i > 0 && entries[i] > entries[i - 1])
            throw Error("diagonal entries must be sorted descending");
    }
    return DiagonalSpec{std::move(entries)};
}

namespace {

double scaled_norm(std::span<const double> s, std::span<const double> x) {
    double v = 0.0;
    for (std::size_t c = 0; c < x.size(); ++c) {
        const double z = s[c] * x[c];
        v += z * z;
    }
    return std::sqrt(v);
}

} // namespace

double integral_norm_power(const DiagonalSpec& a, double alpha, const SphereGrid& grid) {
    if (grid.dim() != a.order()) throw Error("integral_norm_power: grid/matrix order mismatch");
    if (!(alpha > 0.0)) throw Error("integral_norm_power requires alpha > 0");
    return integrate(grid, [&](std::span<const double> x) {
        return std::pow(scaled_norm(a.entries, x), -alpha);
    });
}

EstimateValue closed_form_estimate(const DiagonalSpec& a, double alpha) {
    if (!(alpha > 0.0)) throw Error("closed_form_estimate requires alpha > 0");
    const int m = a.order();
    const auto& s = a.entries;
    EstimateValue out;
    out.ceil_alpha = static_cast<int>(std::ceil(alpha));
    out.floor_alpha = static_cast<int>(std::floor(alpha));
    if (alpha >= m) {
        double prod = 1.0;
        for (double x : s) prod *= x;
        out.value = 1.0 / (prod * std::pow(s[m - 1], alpha - m));
        out.kind = EstimateCase::alpha_ge_n;
        return out;
    }
    const double nearest = std::round(alpha);
    if (std::abs(alpha - nearest) > 1e-12) {
        const int ca = out.ceil_alpha;
        double prod = 1.0;
        for (int i = 0; i < ca; ++i) prod *= s[i];
        out.value = 1.0 / (prod * std::pow(s[ca - 1], alpha - ca));
        out.kind = EstimateCase::noninteger_lt_n;
        return out;
    }
    const int ia = static_cast<int>(nearest);
    double prod = 1.0;
    for (int i = 0; i < ia; ++i) prod *= s[i];
    out.value = (1.0 + std::log(s[ia - 1] / s[ia])) / prod;
    out.kind = EstimateCase::integer_lt_n;
    return out;
}

SweepReport ratio_sweep(double alpha, int m, std::span<const double> spreads,
                        const SphereGrid& grid, std::uint64_t seed) {
    SweepReport report;
    report.min_ratio = std::numeric_limits<double>::infinity();
    report.max_ratio = 0.0;
    std::mt19937_64 eng(seed);
    for (double spread : spreads) {
        if (!(spread >= 1.0)) throw Error("ratio_sweep spreads must be >= 1");
        std::vector<double> entries(m, 1.0);
        if (spread > 1.0) {
            // exponents in [0,1]; endpoints pinned so the spread is exact
            std::vector<double> expo(m);
            expo[0] = 0.0;
            expo[1] = 1.0;
            for (int i = 2; i < m; ++i) expo[i] = uniform01(eng);
            for (int i = 0; i < m; ++i) entries[i] = std::pow(spread, -expo[i]);
            std::sort(entries.begin(), entries.end(), std::greater<>());
        }
        const DiagonalSpec spec = make_diagonal(entries);
        SweepRow row;
        row.alpha = alpha;
        row.m = m;
        row.spread = spread;
        row.integral = integral_norm_power(spec, alpha, grid);
        row.estimate = closed_form_estimate(spec, alpha).value;
        row.ratio = row.integral / row.estimate;
        report.min_ratio = std::min(report.min_ratio, row.ratio);
        report.max_ratio = std::max(report.max_ratio, row.ratio);
        report.rows.push_back(row);
    }
    return report;
}

TwoSided power_reduce_check(const DiagonalSpec& b, double gamma, const SphereGrid& grid) {
    if (grid.dim() != b.order()) throw Error("power_reduce_check: grid/matrix order mismatch");
    const int m = b.order();
    TwoSided out;
    out.lhs = integrate(grid, [&](std::span<const double> x) {
        return std::pow(scaled_norm(b.entries, x), -gamma);
    });
    std::vector<double> inv(b.entries.size());
    double det = 1.0;
    for (int i = 0; i < m; ++i) {
        inv[i] = 1.0 / b.entries[i];
        det *= b.entries[i];
    }
    out.rhs = integrate(grid, [&](std::span<const double> x) {
                  return std::pow(scaled_norm(inv, x), -(m - gamma));
              }) /
              std::abs(det);
    return out;
}

TwoSided dimension_reduce_check(const DiagonalSpec& b, double beta, const SphereGrid& grid_m,
                                const SphereGrid* grid_low) {
    const int m = b.order();
    if (!(beta > 0.0 && beta < m)) throw Error("dimension_reduce_check requires beta in (0,m)");
    const int low = 1 + static_cast<int>(std::floor(beta));
    TwoSided out;
    out.lhs = integral_norm_power(b, beta, grid_m);
    if (low == 1) {
        out.rhs = 2.0 * std::pow(b.entries[0], -beta);
        return out;
    }
    if (!grid_low) throw Error("dimension_reduce_check needs a grid of dimension " +
                               std::to_string(low));
    if (grid_low->dim() != low)
        throw Error("dimension_reduce_check: low grid must have dimension " +
                    std::to_string(low));
    std::vector<double> top(b.entries.begin(), b.entries.begin() + low);
    out.rhs = integral_norm_power(make_diagonal(std::move(top)), beta, *grid_low);
    return out;
}

} // namespace minklab
