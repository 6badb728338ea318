#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace minklab {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Compensated (Neumaier) accumulator. All quadrature sums in this project go
/// through one of these in a fixed order, so results are reproducible bit for
/// bit across runs with identical inputs.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }

    double value() const { return sum + comp; }
};

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline std::vector<double> normalized(std::span<const double> a) {
    const double n = norm(a);
    if (n <= 0.0 || !std::isfinite(n)) throw Error("cannot normalize zero or non-finite vector");
    std::vector<double> out(a.begin(), a.end());
    for (double& x : out) x /= n;
    return out;
}

/// Surface area of the unit sphere S^{n-1} in R^n.
inline double unit_sphere_area(int n) {
    return 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n);
}

/// Volume of the unit ball in R^n.
inline double unit_ball_volume(int n) {
    return std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

/// Uniform double in [0,1) from the top 53 bits of the engine output.
/// Used instead of std::uniform_real_distribution so that streams are
/// identical across standard-library implementations.
inline double uniform01(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

/// Deterministic standard-normal sampler (Box-Muller over uniform01).
class NormalSampler {
public:
    explicit NormalSampler(std::uint64_t seed) : eng_(seed) {}

    double next() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double a = uniform01(eng_);
        double b = uniform01(eng_);
        // guard against log(0)
        const double r = std::sqrt(-2.0 * std::log(a + 0x1.0p-64));
        const double c = std::cos(2.0 * M_PI * b);
        const double s = std::sin(2.0 * M_PI * b);
        spare_ = r * s;
        has_spare_ = true;
        return r * c;
    }

private:
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

inline std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

inline std::string describe_vector(std::span<const double> v) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) os << ", ";
        os << v[i];
    }
    os << ")";
    return os.str();
}

} // namespace minklab
