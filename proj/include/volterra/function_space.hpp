#pragma once

// Discrete elements of AC_0^2([alpha, beta], R^n): continuous piecewise-linear
// functions on a uniform grid that vanish at alpha. The interpolant is itself an
// element of the space, so every norm below is exact for it.

#include "volterra/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace volterra {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Slack used by boolean predicates on exact-in-theory inequalities.
inline constexpr double kPredicateSlack = 1e-12;

/// Tolerance on |f(alpha)| accepted when sampling a callable.
inline constexpr double kAnchorTolerance = 1e-10;

/// Uniform grid alpha = t_0 < t_1 < ... < t_N = beta.
class Grid {
public:
    Grid(double alpha, double beta, std::size_t n_cells)
        : alpha_(alpha), beta_(beta), n_cells_(n_cells) {
        if (!std::isfinite(alpha) || !std::isfinite(beta) || !(beta > alpha)) {
            throw Error(ErrorKind::InvalidGrid, "require finite alpha < beta");
        }
        if (n_cells == 0) {
            throw Error(ErrorKind::InvalidGrid, "n_cells must be positive");
        }
        spacing_ = (beta_ - alpha_) / static_cast<double>(n_cells_);
    }

    [[nodiscard]] double alpha() const noexcept { return alpha_; }
    [[nodiscard]] double beta() const noexcept { return beta_; }
    [[nodiscard]] double length() const noexcept { return beta_ - alpha_; }
    [[nodiscard]] std::size_t n_cells() const noexcept { return n_cells_; }
    [[nodiscard]] std::size_t n_nodes() const noexcept { return n_cells_ + 1; }
    [[nodiscard]] double spacing() const noexcept { return spacing_; }

    [[nodiscard]] double node(std::size_t i) const noexcept {
        return i == n_cells_ ? beta_ : alpha_ + static_cast<double>(i) * spacing_;
    }
    /// Midpoint of cell [t_j, t_{j+1}].
    [[nodiscard]] double midpoint(std::size_t j) const noexcept {
        return alpha_ + (static_cast<double>(j) + 0.5) * spacing_;
    }

    [[nodiscard]] std::vector<double> nodes() const {
        std::vector<double> out(n_nodes());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = node(i);
        return out;
    }

    friend bool operator==(const Grid& a, const Grid& b) noexcept {
        return a.alpha_ == b.alpha_ && a.beta_ == b.beta_ && a.n_cells_ == b.n_cells_;
    }

private:
    double alpha_;
    double beta_;
    std::size_t n_cells_;
    double spacing_;
};

/// Node values of a piecewise-linear R^n-valued function with x(alpha) = 0.
/// Immutable after construction; storage is node-major (node i occupies
/// values[i*dim .. i*dim+dim)).
class GridFunction {
public:
    /// Takes ownership of node-major values. The first node must be zero up to
    /// kAnchorTolerance and is then set to exactly zero.
    GridFunction(Grid grid, std::size_t dim, std::vector<double> values)
        : grid_(std::move(grid)), dim_(dim), values_(std::move(values)) {
        if (dim_ == 0) throw Error(ErrorKind::DimMismatch, "dimension must be positive");
        if (values_.size() != grid_.n_nodes() * dim_) {
            throw Error(ErrorKind::GridMismatch, "expected " + std::to_string(grid_.n_nodes() * dim_) +
                                                     " values, got " + std::to_string(values_.size()));
        }
        for (std::size_t k = 0; k < dim_; ++k) {
            if (!(std::abs(values_[k]) <= kAnchorTolerance)) {
                throw Error(ErrorKind::NotAnchoredAtAlpha,
                            "|x(alpha)| = " + std::to_string(std::abs(values_[k])));
            }
            values_[k] = 0.0;
        }
    }

    [[nodiscard]] static GridFunction zero(const Grid& grid, std::size_t dim = 1) {
        return {grid, dim, std::vector<double>(grid.n_nodes() * dim, 0.0)};
    }

    [[nodiscard]] const Grid& grid() const noexcept { return grid_; }
    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] std::size_t n_nodes() const noexcept { return grid_.n_nodes(); }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

    [[nodiscard]] Eigen::Map<const Vec> at(std::size_t i) const {
        return Eigen::Map<const Vec>(values_.data() + i * dim_, static_cast<Eigen::Index>(dim_));
    }
    /// Scalar access, component k of node i.
    [[nodiscard]] double operator()(std::size_t i, std::size_t k = 0) const { return values_[i * dim_ + k]; }

    /// Interpolated value at the midpoint of cell j.
    [[nodiscard]] Vec midpoint_value(std::size_t j) const { return 0.5 * (at(j) + at(j + 1)); }

    /// Interpolated value at theta in [0,1] of the way through cell j.
    [[nodiscard]] Vec cell_value(std::size_t j, double theta) const {
        return (1.0 - theta) * at(j) + theta * at(j + 1);
    }

    /// Difference quotient on cell j (the exact derivative of the interpolant there).
    [[nodiscard]] Vec slope(std::size_t j) const { return (at(j + 1) - at(j)) / grid_.spacing(); }

    /// Piecewise-linear interpolation at t in [alpha, beta] (clamped).
    [[nodiscard]] Vec value_at(double t) const {
        const double u = std::clamp((t - grid_.alpha()) / grid_.spacing(), 0.0,
                                    static_cast<double>(grid_.n_cells()));
        auto j = static_cast<std::size_t>(std::floor(u));
        if (j >= grid_.n_cells()) j = grid_.n_cells() - 1;
        return cell_value(j, u - static_cast<double>(j));
    }

private:
    Grid grid_;
    std::size_t dim_;
    std::vector<double> values_;
};

namespace detail {

inline void require_compatible(const GridFunction& a, const GridFunction& b) {
    if (!(a.grid() == b.grid())) throw Error(ErrorKind::GridMismatch, "functions live on different grids");
    if (a.dim() != b.dim()) throw Error(ErrorKind::DimMismatch, "functions have different dimensions");
}

}  // namespace detail

/// Builds a GridFunction from per-node values produced by `fill(i) -> Vec`.
template <class NodeFn>
[[nodiscard]] GridFunction tabulate(const Grid& grid, std::size_t dim, NodeFn&& fill) {
    std::vector<double> values(grid.n_nodes() * dim, 0.0);
    for (std::size_t i = 1; i < grid.n_nodes(); ++i) {
        const Vec v = fill(i);
        std::copy(v.data(), v.data() + dim, values.begin() + static_cast<std::ptrdiff_t>(i * dim));
    }
    return {grid, dim, std::move(values)};
}

/// ||x||_{AC} = (sum_i |x_{i+1} - x_i|^2 / Delta)^{1/2}, exact for the interpolant.
[[nodiscard]] inline double ac_norm(const GridFunction& x) {
    const auto v = x.values();
    const std::size_t dim = x.dim();
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < x.n_nodes(); ++i) {
        for (std::size_t k = 0; k < dim; ++k) {
            const double d = v[(i + 1) * dim + k] - v[i * dim + k];
            sum += d * d;
        }
    }
    return std::sqrt(sum / x.grid().spacing());
}

/// AC_0^2 inner product <x, y> = int <x', y'> dt.
[[nodiscard]] inline double ac_inner(const GridFunction& x, const GridFunction& y) {
    detail::require_compatible(x, y);
    const auto a = x.values();
    const auto b = y.values();
    const std::size_t dim = x.dim();
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < x.n_nodes(); ++i) {
        for (std::size_t k = 0; k < dim; ++k) {
            sum += (a[(i + 1) * dim + k] - a[i * dim + k]) * (b[(i + 1) * dim + k] - b[i * dim + k]);
        }
    }
    return sum / x.grid().spacing();
}

/// Max over nodes of the Euclidean norm; exact sup-norm of the interpolant.
[[nodiscard]] inline double sup_norm(const GridFunction& x) {
    double m = 0.0;
    for (std::size_t i = 0; i < x.n_nodes(); ++i) m = std::max(m, x.at(i).norm());
    return m;
}

/// L^2 norm of the interpolant; per cell the integral of |a + (b-a)s|^2 is
/// Delta (|a|^2 + <a,b> + |b|^2) / 3.
[[nodiscard]] inline double l2_norm(const GridFunction& x) {
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < x.n_nodes(); ++i) {
        const auto a = x.at(i);
        const auto b = x.at(i + 1);
        sum += a.squaredNorm() + a.dot(b) + b.squaredNorm();
    }
    return std::sqrt(sum * x.grid().spacing() / 3.0);
}

/// Checks |x(t_i)| <= (t_i - alpha)^{1/2} ||x||_{AC} at every node and
/// ||x||_{L2}^2 <= (beta - alpha)^2 / 2 * ||x||_{AC}^2, each with kPredicateSlack.
[[nodiscard]] inline bool verify_embedding(const GridFunction& x) {
    const double ac = ac_norm(x);
    const Grid& g = x.grid();
    for (std::size_t i = 0; i < x.n_nodes(); ++i) {
        const double lhs = x.at(i).norm();
        const double rhs = std::sqrt(g.node(i) - g.alpha()) * ac;
        if (lhs > rhs + kPredicateSlack) return false;
    }
    const double l2 = l2_norm(x);
    return l2 * l2 <= 0.5 * g.length() * g.length() * ac * ac + kPredicateSlack;
}

/// Samples a vector-valued callable at the nodes. Throws NotAnchoredAtAlpha when
/// |f(alpha)| > kAnchorTolerance; otherwise the first node is set to exactly zero.
[[nodiscard]] inline GridFunction from_callable(const std::function<Vec(double)>& f, const Grid& grid,
                                                std::size_t dim) {
    const Vec f0 = f(grid.alpha());
    if (static_cast<std::size_t>(f0.size()) != dim) {
        throw Error(ErrorKind::DimMismatch, "callable returned wrong dimension");
    }
    if (!(f0.norm() <= kAnchorTolerance)) {
        throw Error(ErrorKind::NotAnchoredAtAlpha, "|f(alpha)| = " + std::to_string(f0.norm()));
    }
    return tabulate(grid, dim, [&](std::size_t i) {
        Vec v = f(grid.node(i));
        if (static_cast<std::size_t>(v.size()) != dim) {
            throw Error(ErrorKind::DimMismatch, "callable returned wrong dimension");
        }
        return v;
    });
}

/// Scalar overload.
[[nodiscard]] inline GridFunction from_callable(const std::function<double(double)>& f, const Grid& grid) {
    return from_callable([&](double t) { return Vec::Constant(1, f(t)); }, grid, 1);
}

/// a*x + y.
[[nodiscard]] inline GridFunction axpy(double a, const GridFunction& x, const GridFunction& y) {
    detail::require_compatible(x, y);
    const auto xv = x.values();
    const auto yv = y.values();
    std::vector<double> out(xv.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a * xv[i] + yv[i];
    return {x.grid(), x.dim(), std::move(out)};
}

[[nodiscard]] inline GridFunction scale(double a, const GridFunction& x) {
    const auto xv = x.values();
    std::vector<double> out(xv.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a * xv[i];
    return {x.grid(), x.dim(), std::move(out)};
}

[[nodiscard]] inline GridFunction sub(const GridFunction& x, const GridFunction& y) { return axpy(-1.0, y, x); }

[[nodiscard]] inline GridFunction operator+(const GridFunction& x, const GridFunction& y) {
    return axpy(1.0, x, y);
}
[[nodiscard]] inline GridFunction operator-(const GridFunction& x, const GridFunction& y) { return sub(x, y); }
[[nodiscard]] inline GridFunction operator*(double a, const GridFunction& x) { return scale(a, x); }

/// ||x - y||_{AC}.
[[nodiscard]] inline double ac_distance(const GridFunction& x, const GridFunction& y) { return ac_norm(sub(x, y)); }

}  // namespace volterra
