#pragma once

// Numerical checks of the two sufficient conditions for V to be a diffeomorphism
// of AC_0^2:
//   A3: v(t, t, x) = 0, |v_t| <= c0 |x| + d0, ||c0||_{L2(P)} < sqrt(2) / (2 (beta - alpha));
//   A4: |v(t, t, x)| <= c1 |x| + d1, |v_t| <= c2 |x| + d2, ||c~||_{L2} < 1/2 with
//       c~(t) = (t - alpha)^{1/2} c1(t) + (beta - alpha)/sqrt(2) (int_alpha^t c2^2 dtau)^{1/2}.
// Both are sufficient, not necessary: a failed check means "not certified".
//
// Norms are computed with the operators' midpoint quadrature. A margin counts
// only if it exceeds the quadrature error estimate |Q_N - Q_{N/2}| (and
// kPredicateSlack), so margins that quadrature cannot resolve do not certify.

#include "volterra/error.hpp"
#include "volterra/function_space.hpp"
#include "volterra/kernel.hpp"
#include "volterra/operator.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>

namespace volterra {

enum class HypothesisVariant { A3, A4 };

[[nodiscard]] constexpr std::string_view to_string(HypothesisVariant v) noexcept {
    return v == HypothesisVariant::A3 ? "A3" : "A4";
}

struct HypothesisReport {
    HypothesisVariant variant = HypothesisVariant::A3;
    /// What norm_value measures, e.g. "||c0||_L2(P)".
    std::string quantity;
    /// Diagonal vanishing sampled (A3 only; true for A4).
    bool diagonal_zero_ok = true;
    double norm_value = 0.0;
    double threshold = 0.0;
    double margin = 0.0;  ///< threshold - norm_value
    /// Estimated quadrature error in norm_value (0 for closed forms).
    double quadrature_error = 0.0;
    /// ||d0||_{L2(P)} for A3, ||d~||_{L2} for A4 (informational).
    double offset_norm = 0.0;
    bool passed = false;
    std::size_t samples_used = 0;
};

/// Side of the (t, x) lattice used to sample v(t, t, x) = 0.
inline constexpr std::size_t kDiagonalLattice = 50;
/// Half-width of the x range of that lattice.
inline constexpr double kDiagonalSampleRadius = 10.0;

namespace detail {

inline Grid coarsened(const Grid& g) { return {g.alpha(), g.beta(), std::max<std::size_t>(1, g.n_cells() / 2)}; }

/// Number of integrand evaluations made by triangle_integral on `g`.
inline std::size_t triangle_points(const Grid& g) { return g.n_cells() * (g.n_cells() + 1) / 2; }

inline bool decide(double margin, double quadrature_error) {
    return margin > std::max(quadrature_error, kPredicateSlack);
}

/// Samples |v(t, t, x)| on a kDiagonalLattice^2 lattice; returns true when all
/// samples are at most kPredicateSlack.
inline bool sample_diagonal_zero(const KernelSpec& kernel, const Grid& grid, std::size_t& samples) {
    const auto n = static_cast<Eigen::Index>(kernel.dim);
    bool ok = true;
    for (std::size_t a = 0; a < kDiagonalLattice; ++a) {
        const double t = grid.alpha() + grid.length() * static_cast<double>(a) / (kDiagonalLattice - 1);
        for (std::size_t b = 0; b < kDiagonalLattice; ++b) {
            const double u = -1.0 + 2.0 * static_cast<double>(b) / (kDiagonalLattice - 1);
            Vec x = Vec::Constant(n, u * kDiagonalSampleRadius);
            if (n > 1) x[static_cast<Eigen::Index>(b) % n] *= -0.5;
            ++samples;
            if (!(kernel.v(t, t, x).norm() <= kPredicateSlack)) ok = false;
        }
    }
    return ok;
}

/// Cell-midpoint values of c~ and d~ on `grid` from growth-form bounds.
struct TildeFunctions {
    std::vector<double> c, d;
};

inline TildeFunctions tilde_functions(const BoundFn1& c1, const BoundFn1& d1, const BoundFn2& c2,
                                      const BoundFn2& d2, const Grid& grid) {
    TildeFunctions out;
    out.c.resize(grid.n_cells());
    out.d.resize(grid.n_cells());
    const double scale = grid.length() / std::numbers::sqrt2;
    for (std::size_t i = 0; i < grid.n_cells(); ++i) {
        const double m = grid.midpoint(i);
        const double c2sq = inner_integral_to_midpoint(grid, i, [&](double tau) {
            const double c = c2(m, tau);
            return c * c;
        });
        const double d2int = inner_integral_to_midpoint(grid, i, [&](double tau) { return d2(m, tau); });
        out.c[i] = std::sqrt(m - grid.alpha()) * c1(m) + scale * std::sqrt(c2sq);
        out.d[i] = d1(m) + d2int;
    }
    return out;
}

inline double l2_over_cells(const std::vector<double>& f, const Grid& grid) {
    double s = 0.0;
    for (double v : f) s += v * v;
    return std::sqrt(s * grid.spacing());
}

}  // namespace detail

/// (A3) check: samples the diagonal, integrates c0^2 over the triangle and
/// compares ||c0|| with sqrt(2) / (2 (beta - alpha)).
[[nodiscard]] inline HypothesisReport check_A3(const KernelSpec& kernel, const Grid& grid) {
    if (!kernel.bounds || !kernel.bounds->has_diagonal_zero_bounds()) {
        throw Error(ErrorKind::MissingBounds, "kernel '" + kernel.name + "' declares no c0, d0");
    }
    const auto& b = *kernel.bounds;
    HypothesisReport r;
    r.variant = HypothesisVariant::A3;
    r.quantity = "||c0||_L2(P)";
    r.diagonal_zero_ok = detail::sample_diagonal_zero(kernel, grid, r.samples_used);
    auto c0sq = [&](double t, double tau) {
        const double c = b.c0(t, tau);
        return c * c;
    };
    auto d0sq = [&](double t, double tau) {
        const double d = b.d0(t, tau);
        return d * d;
    };
    r.norm_value = std::sqrt(triangle_integral(grid, c0sq));
    const double coarse = std::sqrt(triangle_integral(detail::coarsened(grid), c0sq));
    r.quadrature_error = std::abs(r.norm_value - coarse);
    r.offset_norm = std::sqrt(triangle_integral(grid, d0sq));
    r.samples_used += 2 * detail::triangle_points(grid) + detail::triangle_points(detail::coarsened(grid));
    r.threshold = std::numbers::sqrt2 / (2.0 * grid.length());
    r.margin = r.threshold - r.norm_value;
    r.passed = r.diagonal_zero_ok && detail::decide(r.margin, r.quadrature_error);
    return r;
}

/// Norms of c~ and d~ as used by the coercivity estimate
/// F_0(x) >= (1/2 - ||c~||) ||x||^2 - ||d~|| ||x||.
struct CoercivityConstants {
    HypothesisVariant source = HypothesisVariant::A4;
    double c_tilde_norm = 0.0;
    double d_tilde_norm = 0.0;

    [[nodiscard]] double lower_bound(double ac) const {
        return (0.5 - c_tilde_norm) * ac * ac - d_tilde_norm * ac;
    }
};

/// Computes ||c~||, ||d~|| with the quadrature functional_F uses on `grid`, so the
/// estimate holds exactly for the discrete functional. Kernels that declare only
/// diagonal-vanishing bounds map onto c1 = d1 = 0, c2 = c0, d2 = d0.
[[nodiscard]] inline CoercivityConstants coercivity_constants(const KernelSpec& kernel, const Grid& grid) {
    if (!kernel.bounds) throw Error(ErrorKind::MissingBounds, "kernel '" + kernel.name + "' declares no bounds");
    const auto& b = *kernel.bounds;
    CoercivityConstants out;
    detail::TildeFunctions tf;
    if (b.has_growth_bounds()) {
        out.source = HypothesisVariant::A4;
        tf = detail::tilde_functions(b.c1, b.d1, b.c2, b.d2, grid);
    } else if (b.has_diagonal_zero_bounds() && kernel.diagonal_zero) {
        out.source = HypothesisVariant::A3;
        const BoundFn1 zero = [](double) { return 0.0; };
        tf = detail::tilde_functions(zero, zero, b.c0, b.d0, grid);
    } else {
        throw Error(ErrorKind::MissingBounds, "kernel '" + kernel.name + "' declares no usable growth bounds");
    }
    out.c_tilde_norm = detail::l2_over_cells(tf.c, grid);
    out.d_tilde_norm = detail::l2_over_cells(tf.d, grid);
    return out;
}

/// (A4) check: ||c~||_{L2} < 1/2.
[[nodiscard]] inline HypothesisReport check_A4(const KernelSpec& kernel, const Grid& grid) {
    if (!kernel.bounds || !kernel.bounds->has_growth_bounds()) {
        throw Error(ErrorKind::MissingBounds, "kernel '" + kernel.name + "' declares no c1, d1, c2, d2");
    }
    const auto& b = *kernel.bounds;
    HypothesisReport r;
    r.variant = HypothesisVariant::A4;
    r.quantity = "||c~||_L2";
    r.diagonal_zero_ok = true;
    const auto fine = detail::tilde_functions(b.c1, b.d1, b.c2, b.d2, grid);
    const Grid cg = detail::coarsened(grid);
    const auto coarse = detail::tilde_functions(b.c1, b.d1, b.c2, b.d2, cg);
    r.norm_value = detail::l2_over_cells(fine.c, grid);
    r.quadrature_error = std::abs(r.norm_value - detail::l2_over_cells(coarse.c, cg));
    r.offset_norm = detail::l2_over_cells(fine.d, grid);
    r.samples_used = 2 * (detail::triangle_points(grid) + detail::triangle_points(cg));
    r.threshold = 0.5;
    r.margin = r.threshold - r.norm_value;
    r.passed = detail::decide(r.margin, r.quadrature_error);
    return r;
}

/// Closed form for the logarithmic kernel on [0, 1]: ||c0||^2 = (4/35) a^2,
/// certified iff a^2 < 35/8 (strict).
[[nodiscard]] inline HypothesisReport check_example1(double a_bar) {
    HypothesisReport r;
    r.variant = HypothesisVariant::A3;
    r.quantity = "||c0||_L2(P)";
    r.diagonal_zero_ok = true;
    r.norm_value = std::sqrt(4.0 / 35.0) * std::abs(a_bar);
    r.threshold = std::numbers::sqrt2 / 2.0;
    r.margin = r.threshold - r.norm_value;
    r.passed = 8.0 * a_bar * a_bar < 35.0;
    return r;
}

/// Feedback-loop condition int_0^T int_0^t |w'(t - tau)|^2 dtau dt < 1/(2 A^2 T^2).
/// norm_value holds the double integral itself.
[[nodiscard]] inline HypothesisReport check_example2(const std::function<double(double)>& w_prime, double A,
                                                     double T, const Grid& grid) {
    if (!(A > 0.0) || !(T > 0.0)) throw Error(ErrorKind::InvalidArgument, "need A > 0 and T > 0");
    if (std::abs(grid.length() - T) > 1e-12 * T) {
        throw Error(ErrorKind::GridMismatch, "grid must span [0, T]");
    }
    auto integrand = [&](double t, double tau) {
        const double w = w_prime(t - tau);
        return w * w;
    };
    HypothesisReport r;
    r.variant = HypothesisVariant::A3;
    r.quantity = "int_P |w'(t-tau)|^2";
    r.diagonal_zero_ok = true;
    r.norm_value = triangle_integral(grid, integrand);
    r.quadrature_error = std::abs(r.norm_value - triangle_integral(detail::coarsened(grid), integrand));
    r.threshold = 1.0 / (2.0 * A * A * T * T);
    r.margin = r.threshold - r.norm_value;
    r.passed = detail::decide(r.margin, r.quadrature_error);
    r.samples_used = detail::triangle_points(grid) + detail::triangle_points(detail::coarsened(grid));
    return r;
}

}  // namespace volterra
