#pragma once

// The Volterra operator V(x)(t) = x(t) + int_alpha^t v(t, tau, x(tau)) dtau on
// piecewise-linear functions, its time derivative, its Frechet derivative, and the
// least-squares functional F_y(x) = 1/2 ||V(x) - y||_{AC}^2.
//
// Quadrature: every inner integral uses cell midpoints. Over [alpha, t_i] that is
// Delta * sum_{j<i} f(m_j). Over [alpha, m_i] the trailing half cell [t_i, m_i]
// is sampled at its own midpoint t_i + Delta/4. The integrand is never evaluated
// at tau = t.

#include "volterra/function_space.hpp"
#include "volterra/kernel.hpp"

#include <vector>

namespace volterra {

/// One R^n sample per cell, taken at the cell midpoint.
using CellSamples = std::vector<Vec>;

namespace detail {

inline void require_operands(const KernelSpec& kernel, const GridFunction& a, const GridFunction& b) {
    require_compatible(a, b);
    require_kernel_fits(kernel, a);
}

inline std::vector<Vec> midpoint_values(const GridFunction& x) {
    std::vector<Vec> out(x.grid().n_cells());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = x.midpoint_value(j);
    return out;
}

/// Node values of int_alpha^{t_i} v_x(t_i, tau, x0(tau)) h(tau) dtau.
inline GridFunction linearized_integral(const KernelSpec& kernel, const GridFunction& x0, const GridFunction& h) {
    require_operands(kernel, x0, h);
    const Grid& g = x0.grid();
    const double dt = g.spacing();
    const auto x0m = midpoint_values(x0);
    const auto hm = midpoint_values(h);
    return tabulate(g, x0.dim(), [&](std::size_t i) {
        const double t = g.node(i);
        Vec acc = Vec::Zero(static_cast<Eigen::Index>(x0.dim()));
        for (std::size_t j = 0; j < i; ++j) acc.noalias() += kernel.vx(t, g.midpoint(j), x0m[j]) * hm[j];
        return Vec(dt * acc);
    });
}

}  // namespace detail

/// Midpoint-rule integral over the triangle alpha <= tau <= t <= beta, using the
/// same inner rule as the operators (cells j < i plus the trailing half cell).
template <class F>
[[nodiscard]] double triangle_integral(const Grid& grid, F&& f) {
    const double dt = grid.spacing();
    double total = 0.0;
    for (std::size_t i = 0; i < grid.n_cells(); ++i) {
        const double m = grid.midpoint(i);
        double inner = 0.0;
        for (std::size_t j = 0; j < i; ++j) inner += f(m, grid.midpoint(j));
        inner = dt * inner + 0.5 * dt * f(m, grid.node(i) + 0.25 * dt);
        total += inner;
    }
    return dt * total;
}

/// Inner midpoint integral over [alpha, m_i] of f(tau), at cell midpoint m_i.
template <class F>
[[nodiscard]] double inner_integral_to_midpoint(const Grid& grid, std::size_t i, F&& f) {
    const double dt = grid.spacing();
    double inner = 0.0;
    for (std::size_t j = 0; j < i; ++j) inner += f(grid.midpoint(j));
    return dt * inner + 0.5 * dt * f(grid.node(i) + 0.25 * dt);
}

/// y(t_i) = x(t_i) + Delta * sum_{j<i} v(t_i, m_j, x(m_j)).
[[nodiscard]] inline GridFunction apply_V(const KernelSpec& kernel, const GridFunction& x) {
    detail::require_kernel_fits(kernel, x);
    const Grid& g = x.grid();
    const double dt = g.spacing();
    const auto xm = detail::midpoint_values(x);
    return tabulate(g, x.dim(), [&](std::size_t i) {
        const double t = g.node(i);
        Vec acc = Vec::Zero(static_cast<Eigen::Index>(x.dim()));
        for (std::size_t j = 0; j < i; ++j) acc += kernel.v(t, g.midpoint(j), xm[j]);
        return Vec(x.at(i) + dt * acc);
    });
}

/// d/dt V(x) at each cell midpoint m_i, from the expansion
/// x'(t) + v(t, t, x(t)) + int_alpha^t v_t(t, tau, x(tau)) dtau.
[[nodiscard]] inline CellSamples apply_V_dt(const KernelSpec& kernel, const GridFunction& x) {
    detail::require_kernel_fits(kernel, x);
    const Grid& g = x.grid();
    const double dt = g.spacing();
    const auto xm = detail::midpoint_values(x);
    CellSamples out(g.n_cells());
    for (std::size_t i = 0; i < g.n_cells(); ++i) {
        const double m = g.midpoint(i);
        Vec acc = Vec::Zero(static_cast<Eigen::Index>(x.dim()));
        for (std::size_t j = 0; j < i; ++j) acc += kernel.vt(m, g.midpoint(j), xm[j]);
        const Vec half = kernel.vt(m, g.node(i) + 0.25 * dt, x.cell_value(i, 0.25));
        out[i] = x.slope(i) + kernel.v(m, m, xm[i]) + dt * acc + 0.5 * dt * half;
    }
    return out;
}

/// V'(x0) h = h + int_alpha^t v_x(t, tau, x0(tau)) h(tau) dtau.
[[nodiscard]] inline GridFunction frechet_apply(const KernelSpec& kernel, const GridFunction& x0,
                                                const GridFunction& h) {
    return h + detail::linearized_integral(kernel, x0, h);
}

/// d/dt [V'(x) h] at cell midpoints:
/// h'(t) + v_x(t, t, x(t)) h(t) + int_alpha^t v_tx(t, tau, x(tau)) h(tau) dtau.
[[nodiscard]] inline CellSamples frechet_apply_dt(const KernelSpec& kernel, const GridFunction& x,
                                                  const GridFunction& h) {
    detail::require_operands(kernel, x, h);
    const Grid& g = x.grid();
    const double dt = g.spacing();
    const auto xm = detail::midpoint_values(x);
    const auto hm = detail::midpoint_values(h);
    CellSamples out(g.n_cells());
    for (std::size_t i = 0; i < g.n_cells(); ++i) {
        const double m = g.midpoint(i);
        Vec acc = Vec::Zero(static_cast<Eigen::Index>(x.dim()));
        for (std::size_t j = 0; j < i; ++j) acc.noalias() += kernel.vtx(m, g.midpoint(j), xm[j]) * hm[j];
        const Vec half = kernel.vtx(m, g.node(i) + 0.25 * dt, x.cell_value(i, 0.25)) * h.cell_value(i, 0.25);
        out[i] = h.slope(i) + kernel.vx(m, m, xm[i]) * hm[i] + dt * acc + 0.5 * dt * half;
    }
    return out;
}

namespace detail {

inline CellSamples functional_residual(const KernelSpec& kernel, const GridFunction& x, const GridFunction& y) {
    require_operands(kernel, x, y);
    CellSamples r = apply_V_dt(kernel, x);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= y.slope(i);
    return r;
}

}  // namespace detail

/// F_y(x) = 1/2 sum_i |d/dt V(x)(m_i) - y'_i|^2 Delta.
[[nodiscard]] inline double functional_F(const KernelSpec& kernel, const GridFunction& x, const GridFunction& y) {
    const CellSamples r = detail::functional_residual(kernel, x, y);
    double sum = 0.0;
    for (const auto& ri : r) sum += ri.squaredNorm();
    return 0.5 * sum * x.grid().spacing();
}

/// Gateaux derivative of functional_F at x in direction h:
/// < d/dt V(x) - y', d/dt (V'(x) h) >_{L2}.
[[nodiscard]] inline double directional_dF(const KernelSpec& kernel, const GridFunction& x, const GridFunction& y,
                                           const GridFunction& h) {
    detail::require_compatible(x, h);
    const CellSamples r = detail::functional_residual(kernel, x, y);
    const CellSamples dh = frechet_apply_dt(kernel, x, h);
    double sum = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) sum += r[i].dot(dh[i]);
    return sum * x.grid().spacing();
}

/// Gradient of functional_F at x.
struct FunctionalGradient {
    double value = 0.0;
    /// Euclidean gradient w.r.t. node values; node 0 is fixed and reported as 0.
    std::vector<double> nodal;
    /// Riesz representer in AC_0^2: <riesz, h>_{AC} = dF(x)[h] for every h.
    GridFunction riesz;
};

/// Assembles the transpose of the map h -> d/dt (V'(x) h) applied to the
/// residual, so that nodal . h equals directional_dF(x, y, h) exactly, then maps
/// it to the AC_0^2 representer by suffix sums.
[[nodiscard]] inline FunctionalGradient functional_gradient(const KernelSpec& kernel, const GridFunction& x,
                                                            const GridFunction& y) {
    const CellSamples r = detail::functional_residual(kernel, x, y);
    const Grid& g = x.grid();
    const double dt = g.spacing();
    const std::size_t dim = x.dim();
    const auto n = static_cast<Eigen::Index>(dim);
    const auto xm = detail::midpoint_values(x);
    std::vector<Vec> grad(g.n_nodes(), Vec::Zero(n));
    double value = 0.0;
    for (std::size_t i = 0; i < g.n_cells(); ++i) {
        const Vec& ri = r[i];
        value += ri.squaredNorm();
        const double m = g.midpoint(i);
        grad[i + 1] += ri;
        grad[i] -= ri;
        const Vec wd = dt * kernel.vx(m, m, xm[i]).transpose() * ri;
        grad[i] += 0.5 * wd;
        grad[i + 1] += 0.5 * wd;
        for (std::size_t j = 0; j < i; ++j) {
            const Vec wj = (dt * dt) * kernel.vtx(m, g.midpoint(j), xm[j]).transpose() * ri;
            grad[j] += 0.5 * wj;
            grad[j + 1] += 0.5 * wj;
        }
        const Vec wh =
            (0.5 * dt * dt) * kernel.vtx(m, g.node(i) + 0.25 * dt, x.cell_value(i, 0.25)).transpose() * ri;
        grad[i] += 0.75 * wh;
        grad[i + 1] += 0.25 * wh;
    }
    FunctionalGradient out{0.5 * value * dt, std::vector<double>(g.n_nodes() * dim, 0.0), GridFunction::zero(g, dim)};
    for (std::size_t i = 1; i < g.n_nodes(); ++i) {
        for (std::size_t k = 0; k < dim; ++k) out.nodal[i * dim + k] = grad[i][static_cast<Eigen::Index>(k)];
    }
    // <r, h>_{AC} = sum_i Delta <(r_{i+1} - r_i)/Delta, (h_{i+1} - h_i)/Delta> must equal
    // sum_k <g_k, h_k>; hence (r_{i+1} - r_i)/Delta = sum_{k > i} g_k.
    std::vector<double> riesz(g.n_nodes() * dim, 0.0);
    Vec suffix = Vec::Zero(n);
    std::vector<Vec> slopes(g.n_cells());
    for (std::size_t i = g.n_cells(); i-- > 0;) {
        suffix += grad[i + 1];
        slopes[i] = suffix;
    }
    for (std::size_t i = 0; i < g.n_cells(); ++i) {
        for (std::size_t k = 0; k < dim; ++k) {
            riesz[(i + 1) * dim + k] = riesz[i * dim + k] + dt * slopes[i][static_cast<Eigen::Index>(k)];
        }
    }
    out.riesz = GridFunction(g, dim, std::move(riesz));
    return out;
}

}  // namespace volterra
