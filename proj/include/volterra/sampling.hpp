#pragma once

// Deterministic sample generators: a Halton sequence for probing kernels and a
// seeded generator of random AC_0^2 elements for multistart and probe directions.

#include "volterra/function_space.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace volterra {

/// Radical inverse of `index` in `base`; Halton point coordinate.
[[nodiscard]] inline double halton(std::uint64_t index, unsigned base) noexcept {
    double f = 1.0;
    double r = 0.0;
    while (index > 0) {
        f /= base;
        r += f * static_cast<double>(index % base);
        index /= base;
    }
    return r;
}

/// The first few primes, used as Halton bases (one per sampled coordinate).
inline constexpr std::array<unsigned, 12> kHaltonBases{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

/// std::mt19937_64 with a platform-independent mapping to doubles
/// (std::uniform_real_distribution is implementation-defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::mt19937_64 engine_;
};

/// Smooth random element: each component is sum_k a_k sin((k - 1/2) pi s) with
/// s = (t - alpha)/(beta - alpha) and a_k uniform in [-1/k, 1/k].
[[nodiscard]] inline GridFunction random_smooth_function(const Grid& grid, std::size_t dim, Rng& rng,
                                                         std::size_t modes = 6) {
    std::vector<double> coeffs(dim * modes);
    for (std::size_t k = 0; k < dim; ++k) {
        for (std::size_t m = 0; m < modes; ++m) {
            const double amp = 1.0 / static_cast<double>(m + 1);
            coeffs[k * modes + m] = rng.uniform(-amp, amp);
        }
    }
    return tabulate(grid, dim, [&](std::size_t i) {
        const double s = (grid.node(i) - grid.alpha()) / grid.length();
        Vec v = Vec::Zero(static_cast<Eigen::Index>(dim));
        for (std::size_t k = 0; k < dim; ++k) {
            for (std::size_t m = 0; m < modes; ++m) {
                v[static_cast<Eigen::Index>(k)] +=
                    coeffs[k * modes + m] * std::sin((static_cast<double>(m) + 0.5) * std::numbers::pi * s);
            }
        }
        return v;
    });
}

/// Rough random element: a random walk with independent uniform increments.
[[nodiscard]] inline GridFunction random_walk_function(const Grid& grid, std::size_t dim, Rng& rng,
                                                       double step = 1.0) {
    Vec current = Vec::Zero(static_cast<Eigen::Index>(dim));
    return tabulate(grid, dim, [&](std::size_t) {
        for (Eigen::Index k = 0; k < current.size(); ++k) current[k] += rng.uniform(-step, step);
        return current;
    });
}

/// Rescales x to the requested AC norm (x must be nonzero).
[[nodiscard]] inline GridFunction with_ac_norm(const GridFunction& x, double norm) {
    const double current = ac_norm(x);
    if (current == 0.0) throw Error(ErrorKind::InvalidArgument, "cannot rescale the zero function");
    return scale(norm / current, x);
}

}  // namespace volterra
