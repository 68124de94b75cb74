#pragma once

// Kernel bundles: v(t, tau, x) together with v_t, v_x and v_tx on
// P = {(t, tau) : alpha <= tau <= t <= beta}, plus user-declared growth bounds.

#include "volterra/error.hpp"
#include "volterra/function_space.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>

namespace volterra {

/// Evaluates a vector-valued kernel quantity at (t, tau, x).
using VecEvaluator = std::function<Vec(double t, double tau, const Vec& x)>;
/// Evaluates an n x n derivative block at (t, tau, x).
using MatEvaluator = std::function<Mat(double t, double tau, const Vec& x)>;

/// Nonnegative function on [alpha, beta].
using BoundFn1 = std::function<double(double t)>;
/// Nonnegative function on P.
using BoundFn2 = std::function<double(double t, double tau)>;

/// The triangle alpha <= tau <= t <= beta.
struct TriangularDomain {
    double alpha = 0.0;
    double beta = 1.0;

    [[nodiscard]] bool contains(double t, double tau) const noexcept {
        return alpha <= tau && tau <= t && t <= beta;
    }
};

/// Declared growth bounds. The first pair backs the diagonal-vanishing variant
/// |v_t| <= c0 |x| + d0; the remaining four back the growth variant
/// |v(t,t,x)| <= c1 |x| + d1 and |v_t| <= c2 |x| + d2.
struct GrowthBounds {
    BoundFn2 c0, d0;
    BoundFn1 c1, d1;
    BoundFn2 c2, d2;

    [[nodiscard]] bool has_diagonal_zero_bounds() const noexcept { return c0 && d0; }
    [[nodiscard]] bool has_growth_bounds() const noexcept { return c1 && d1 && c2 && d2; }
};

enum class KernelPart { V, Vt, Vx, Vtx };

struct KernelSpec {
    std::string name;
    std::map<std::string, double> parameters;
    TriangularDomain domain;
    std::size_t dim = 1;
    VecEvaluator v;
    VecEvaluator vt;
    MatEvaluator vx;
    MatEvaluator vtx;
    /// Claims v(t, t, x) = 0 for all t, x.
    bool diagonal_zero = false;
    std::optional<GrowthBounds> bounds;
};

/// Guarded evaluation: throws OutsideTriangle unless alpha <= tau <= t <= beta.
[[nodiscard]] inline Mat eval_checked(const KernelSpec& kernel, KernelPart which, double t, double tau,
                                      const Vec& x) {
    if (!kernel.domain.contains(t, tau)) {
        throw Error(ErrorKind::OutsideTriangle,
                    "(t, tau) = (" + std::to_string(t) + ", " + std::to_string(tau) + ") not in P");
    }
    if (static_cast<std::size_t>(x.size()) != kernel.dim) {
        throw Error(ErrorKind::DimMismatch, "state dimension does not match kernel");
    }
    switch (which) {
        case KernelPart::V: return kernel.v(t, tau, x);
        case KernelPart::Vt: return kernel.vt(t, tau, x);
        case KernelPart::Vx: return kernel.vx(t, tau, x);
        case KernelPart::Vtx: return kernel.vtx(t, tau, x);
    }
    throw Error(ErrorKind::InvalidArgument, "unknown kernel part");
}

/// v = 0 in dimension `dim`. Declares every bound as zero.
[[nodiscard]] inline KernelSpec zero_kernel(std::size_t dim = 1, TriangularDomain domain = {}) {
    KernelSpec k;
    k.name = "zero";
    k.domain = domain;
    k.dim = dim;
    const auto n = static_cast<Eigen::Index>(dim);
    k.v = [n](double, double, const Vec&) -> Vec { return Vec::Zero(n); };
    k.vt = k.v;
    k.vx = [n](double, double, const Vec&) -> Mat { return Mat::Zero(n, n); };
    k.vtx = k.vx;
    k.diagonal_zero = true;
    GrowthBounds b;
    b.c0 = b.d0 = b.c2 = b.d2 = [](double, double) { return 0.0; };
    b.c1 = b.d1 = [](double) { return 0.0; };
    k.bounds = b;
    return k;
}

/// v(t, tau, x) = lambda x. Closed-form oracle; declares the growth bounds
/// c1 = |lambda|, d1 = c2 = d2 = 0.
[[nodiscard]] inline KernelSpec linear_kernel(double lambda, TriangularDomain domain = {}, std::size_t dim = 1) {
    KernelSpec k;
    k.name = "linear";
    k.parameters = {{"lambda", lambda}};
    k.domain = domain;
    k.dim = dim;
    const auto n = static_cast<Eigen::Index>(dim);
    k.v = [lambda](double, double, const Vec& x) -> Vec { return lambda * x; };
    k.vt = [n](double, double, const Vec&) -> Vec { return Vec::Zero(n); };
    k.vx = [lambda, n](double, double, const Vec&) -> Mat { return lambda * Mat::Identity(n, n); };
    k.vtx = [n](double, double, const Vec&) -> Mat { return Mat::Zero(n, n); };
    k.diagonal_zero = false;
    GrowthBounds b;
    const double c = std::abs(lambda);
    b.c1 = [c](double) { return c; };
    b.d1 = [](double) { return 0.0; };
    b.c2 = b.d2 = [](double, double) { return 0.0; };
    k.bounds = b;
    return k;
}

/// v(t, tau, x) = a (t - tau)^{2/3} ln(1 + 2 (t - tau)^2 x^2), scalar, on [0, 1] by default.
///
/// With s = t - tau and q = 1 + 2 s^2 x^2:
///   v_t  = (2/3) a s^{-1/3} ln q + 4 a s^{5/3} x^2 / q
///   v_x  = 4 a s^{8/3} x / q
///   v_tx = 4 a x ( (8/3) s^{5/3} / q - 4 s^{11/3} x^2 / q^2 )
/// v_t is singular like s^{-1/3} ln q, which tends to 0 on the diagonal; all
/// four evaluators return their limits at s = 0.
/// Declared bounds: c0 = (2 sqrt 2 / 3)|a| s^{2/3}, d0 = 2|a| s^{-1/3}.
[[nodiscard]] inline KernelSpec example1_kernel(double a_bar, TriangularDomain domain = {0.0, 1.0}) {
    KernelSpec k;
    k.name = "example1";
    k.parameters = {{"a_bar", a_bar}};
    k.domain = domain;
    k.dim = 1;
    const double a = a_bar;
    k.v = [a](double t, double tau, const Vec& x) -> Vec {
        const double s = t - tau;
        if (s <= 0.0) return Vec::Zero(1);
        const double xx = x[0];
        return Vec::Constant(1, a * std::cbrt(s * s) * std::log1p(2.0 * s * s * xx * xx));
    };
    k.vt = [a](double t, double tau, const Vec& x) -> Vec {
        const double s = t - tau;
        if (s <= 0.0) return Vec::Zero(1);
        const double xx = x[0];
        const double z = 2.0 * s * s * xx * xx;
        const double q = 1.0 + z;
        const double c = std::cbrt(s);
        return Vec::Constant(1, (2.0 / 3.0) * a * std::log1p(z) / c + 4.0 * a * c * c * s * xx * xx / q);
    };
    k.vx = [a](double t, double tau, const Vec& x) -> Mat {
        const double s = t - tau;
        if (s <= 0.0) return Mat::Zero(1, 1);
        const double xx = x[0];
        const double q = 1.0 + 2.0 * s * s * xx * xx;
        const double s83 = s * s * std::cbrt(s * s);
        return Mat::Constant(1, 1, 4.0 * a * s83 * xx / q);
    };
    k.vtx = [a](double t, double tau, const Vec& x) -> Mat {
        const double s = t - tau;
        if (s <= 0.0) return Mat::Zero(1, 1);
        const double xx = x[0];
        const double q = 1.0 + 2.0 * s * s * xx * xx;
        const double s53 = s * std::cbrt(s * s);
        const double s113 = s53 * s * s;
        return Mat::Constant(1, 1, 4.0 * a * xx * ((8.0 / 3.0) * s53 / q - 4.0 * s113 * xx * xx / (q * q)));
    };
    k.diagonal_zero = true;
    GrowthBounds b;
    const double abs_a = std::abs(a);
    b.c0 = [abs_a](double t, double tau) {
        const double s = std::max(t - tau, 0.0);
        return (2.0 * std::sqrt(2.0) / 3.0) * abs_a * std::cbrt(s * s);
    };
    b.d0 = [abs_a](double t, double tau) {
        const double s = t - tau;
        if (abs_a == 0.0) return 0.0;
        return s > 0.0 ? 2.0 * abs_a / std::cbrt(s) : std::numeric_limits<double>::infinity();
    };
    k.bounds = b;
    return k;
}

/// Scalar C^1 function together with its derivative.
struct ScalarC1 {
    std::function<double(double)> f;
    std::function<double(double)> df;
};

/// Feedback-loop kernel v(t, tau, x) = w(t - tau) z(x) on [0, T], with the
/// memory part w (w(0) = 0) and the memoryless nonlinearity z supplied with
/// their derivatives. A, B >= 0 are the declared constants of |z(x)| <= A|x| + B;
/// the resulting bounds are c0 = A|w'(t - tau)|, d0 = B|w'(t - tau)|.
[[nodiscard]] inline KernelSpec example2_kernel(ScalarC1 w, ScalarC1 z, double A, double B, double T) {
    if (!(T > 0.0)) throw Error(ErrorKind::KernelContract, "horizon T must be positive");
    if (!(A >= 0.0) || !(B >= 0.0)) throw Error(ErrorKind::KernelContract, "growth constants A, B must be >= 0");
    if (!(std::abs(w.f(0.0)) <= kAnchorTolerance)) {
        throw Error(ErrorKind::KernelContract, "memory kernel must satisfy w(0) = 0");
    }
    KernelSpec k;
    k.name = "example2";
    k.parameters = {{"A", A}, {"B", B}, {"T", T}};
    k.domain = {0.0, T};
    k.dim = 1;
    k.v = [w, z](double t, double tau, const Vec& x) -> Vec { return Vec::Constant(1, w.f(t - tau) * z.f(x[0])); };
    k.vt = [w, z](double t, double tau, const Vec& x) -> Vec { return Vec::Constant(1, w.df(t - tau) * z.f(x[0])); };
    k.vx = [w, z](double t, double tau, const Vec& x) -> Mat { return Mat::Constant(1, 1, w.f(t - tau) * z.df(x[0])); };
    k.vtx = [w, z](double t, double tau, const Vec& x) -> Mat {
        return Mat::Constant(1, 1, w.df(t - tau) * z.df(x[0]));
    };
    k.diagonal_zero = true;
    GrowthBounds b;
    b.c0 = [w, A](double t, double tau) { return A * std::abs(w.df(t - tau)); };
    b.d0 = [w, B](double t, double tau) { return B * std::abs(w.df(t - tau)); };
    k.bounds = b;
    return k;
}

/// The canonical feedback instance: w(t) = t, z = arctan (|arctan x| <= |x|, so A = 1, B = 0).
[[nodiscard]] inline KernelSpec example2_linw_atan(double T, double A = 1.0, double B = 0.0) {
    ScalarC1 w{[](double s) { return s; }, [](double) { return 1.0; }};
    ScalarC1 z{[](double x) { return std::atan(x); }, [](double x) { return 1.0 / (1.0 + x * x); }};
    KernelSpec k = example2_kernel(std::move(w), std::move(z), A, B, T);
    k.name = "example2_linw_atan";
    return k;
}

namespace detail {

inline void require_kernel_fits(const KernelSpec& kernel, const GridFunction& x) {
    if (kernel.dim != x.dim()) throw Error(ErrorKind::DimMismatch, "kernel and function dimensions differ");
    const Grid& g = x.grid();
    const double slack = 1e-12 * g.length();
    if (g.alpha() < kernel.domain.alpha - slack || g.beta() > kernel.domain.beta + slack) {
        throw Error(ErrorKind::GridMismatch, "grid extends outside the kernel domain");
    }
}

}  // namespace detail

}  // namespace volterra
