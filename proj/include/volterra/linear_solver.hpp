#pragma once

// The linearized equation h(t) + int_alpha^t v_x(t, tau, x0(tau)) h(tau) dtau = g(t),
// written h + T h = g. Two routes: the Neumann iteration h_{k+1} = g - T h_k with
// the factorial a-priori bound on ||T^k g||, and a direct forward substitution on
// the same discretization.

#include "volterra/error.hpp"
#include "volterra/function_space.hpp"
#include "volterra/kernel.hpp"
#include "volterra/operator.hpp"
#include "volterra/sampling.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <limits>

namespace volterra {

/// Constants of the a-priori bound ||T^k g||_{AC} <= D A^{k-1} / (k-1)!.
struct NeumannBound {
    double l_rho = 0.0;  ///< local bound on |v_x| and |v_tx| over the ball of radius rho
    double M = 0.0;      ///< sup-norm of g
    double C = 0.0;      ///< sqrt(beta - alpha) (1 + beta - alpha)
    double D = 0.0;      ///< C M l_rho
    double A = 0.0;      ///< l_rho (beta - alpha)
};

[[nodiscard]] inline NeumannBound make_neumann_bound(double l_rho, double M, double length) {
    if (!(l_rho >= 0.0) || !(M >= 0.0) || !(length > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "bound constants must be nonnegative");
    }
    NeumannBound b;
    b.l_rho = l_rho;
    b.M = M;
    b.C = std::sqrt(length) * (1.0 + length);
    b.D = b.C * M * l_rho;
    b.A = l_rho * length;
    return b;
}

/// D A^{k-1} / (k-1)!, the certified bound on the AC norm of the k-th Neumann term.
[[nodiscard]] inline double iterate_bound(std::size_t k, const NeumannBound& bound) {
    if (k < 1) throw Error(ErrorKind::InvalidArgument, "iterate_bound needs k >= 1");
    if (bound.D == 0.0) return 0.0;
    if (k == 1) return bound.D;
    if (bound.A == 0.0) return 0.0;
    const double km1 = static_cast<double>(k - 1);
    return std::exp(std::log(bound.D) + km1 * std::log(bound.A) - std::lgamma(km1 + 1.0));
}

/// sum_{j >= first} iterate_bound(j): remainder of the Neumann series after the
/// first (first - 1) terms.
[[nodiscard]] inline double tail_bound(std::size_t first, const NeumannBound& bound) {
    if (first < 1) throw Error(ErrorKind::InvalidArgument, "tail_bound needs first >= 1");
    if (bound.D == 0.0) return 0.0;
    double sum = 0.0;
    for (std::size_t j = first;; ++j) {
        const double term = iterate_bound(j, bound);
        sum += term;
        // Terms decrease once j - 1 > A; stop when they no longer register.
        if (static_cast<double>(j) > bound.A + 1.0 && term <= sum * 1e-17) break;
        if (!std::isfinite(sum)) break;
    }
    return sum;
}

/// (T g)(t_i) = Delta sum_{j<i} v_x(t_i, m_j, x0(m_j)) g(m_j).
[[nodiscard]] inline GridFunction apply_T(const KernelSpec& kernel, const GridFunction& x0, const GridFunction& g) {
    return detail::linearized_integral(kernel, x0, g);
}

namespace detail {

inline double matrix_norm(const Mat& m) {
    if (m.size() == 1) return std::abs(m(0, 0));
    Eigen::JacobiSVD<Mat> svd(m);
    return svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
}

}  // namespace detail

/// Safety factor applied to sampled maxima.
inline constexpr double kLRhoSafetyFactor = 1.1;

/// Samples max(|v_x|, |v_tx|) (operator norm) over P x [-rho, rho]^n on a Halton
/// sequence plus the triangle's corners, and inflates it by kLRhoSafetyFactor.
/// v_tx is included because the factorial bound also charges the derivative of
/// T g against the same constant.
[[nodiscard]] inline double estimate_l_rho(const KernelSpec& kernel, double rho, std::size_t samples = 4096) {
    if (!(rho > 0.0)) throw Error(ErrorKind::InvalidArgument, "rho must be positive");
    if (samples < 1) throw Error(ErrorKind::InvalidArgument, "need at least one sample");
    if (kernel.dim + 2 > kHaltonBases.size()) throw Error(ErrorKind::InvalidArgument, "dimension too large");
    const double a = kernel.domain.alpha;
    const double len = kernel.domain.beta - kernel.domain.alpha;
    const auto n = static_cast<Eigen::Index>(kernel.dim);
    double best = 0.0;
    auto probe = [&](double t, double tau, const Vec& x) {
        best = std::max(best, detail::matrix_norm(kernel.vx(t, tau, x)));
        best = std::max(best, detail::matrix_norm(kernel.vtx(t, tau, x)));
    };
    for (std::uint64_t s = 1; s <= samples; ++s) {
        const double t = a + halton(s, kHaltonBases[0]) * len;
        const double tau = a + halton(s, kHaltonBases[1]) * (t - a);
        Vec x(n);
        for (Eigen::Index k = 0; k < n; ++k) {
            x[k] = rho * (2.0 * halton(s, kHaltonBases[static_cast<std::size_t>(k) + 2]) - 1.0);
        }
        probe(t, tau, x);
    }
    for (double sign : {-1.0, 0.0, 1.0}) {
        const Vec x = Vec::Constant(n, sign * rho / std::sqrt(static_cast<double>(n)));
        probe(kernel.domain.beta, a, x);
        probe(kernel.domain.beta, kernel.domain.beta, x);
    }
    return kLRhoSafetyFactor * best;
}

struct NeumannReport {
    std::size_t iterations = 0;  ///< index k of the returned iterate h_k
    double residual_ac = 0.0;    ///< ||h_k + T h_k - g||_{AC}
    double tail_bound = 0.0;     ///< sum_{j >= k} D A^{j-1}/(j-1)!, a-priori error of h_k
    bool certified = false;      ///< tail_bound < tol
    bool converged = false;      ///< residual_ac <= tol
    SolveStatus status = SolveStatus::MaxIterExceeded;
    NeumannBound bound;
    std::vector<double> residual_history;
};

struct NeumannResult {
    GridFunction solution;
    NeumannReport report;
};

/// Neumann iteration h_0 = 0, h_{k+1} = g - T h_k, i.e. partial sums of
/// g - T g + T^2 g - ... . Stops at the first iterate whose discrete residual is
/// at most tol; the a-priori tail is reported alongside. On hitting max_iter the
/// last iterate is returned with converged = false.
[[nodiscard]] inline NeumannResult neumann_solve(const KernelSpec& kernel, const GridFunction& x0,
                                                 const GridFunction& g, double tol, std::size_t max_iter,
                                                 std::size_t l_rho_samples = 4096) {
    if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tol must be positive");
    detail::require_operands(kernel, x0, g);
    NeumannReport report;
    report.bound = make_neumann_bound(estimate_l_rho(kernel, sup_norm(x0) + 1.0, l_rho_samples), sup_norm(g),
                                      x0.grid().length());
    GridFunction h = GridFunction::zero(g.grid(), g.dim());
    for (std::size_t k = 0;; ++k) {
        GridFunction next = g - apply_T(kernel, x0, h);
        const double residual = ac_distance(h, next);
        report.residual_history.push_back(residual);
        if (residual <= tol || k == max_iter) {
            report.iterations = k;
            report.residual_ac = residual;
            report.tail_bound =
                k == 0 ? ac_norm(g) + tail_bound(1, report.bound) : tail_bound(k, report.bound);
            report.certified = report.tail_bound < tol;
            report.converged = residual <= tol;
            report.status = report.converged ? SolveStatus::Converged : SolveStatus::MaxIterExceeded;
            return {std::move(h), std::move(report)};
        }
        h = std::move(next);
    }
}

/// Smallest singular value below which a diagonal block counts as singular.
inline constexpr double kSingularBlockThreshold = 1e-12;

/// Direct solve of the discrete system
///   h(t_i) + Delta sum_{j<i} v_x(t_i, m_j, x0(m_j)) (h(t_j) + h(t_{j+1}))/2 = g(t_i)
/// by forward substitution: row i couples h(t_i) only through the block
/// I + Delta/2 v_x(t_i, m_{i-1}, x0(m_{i-1})).
[[nodiscard]] inline GridFunction collocation_solve(const KernelSpec& kernel, const GridFunction& x0,
                                                    const GridFunction& g) {
    detail::require_operands(kernel, x0, g);
    const Grid& grid = x0.grid();
    const double dt = grid.spacing();
    const std::size_t dim = g.dim();
    const auto n = static_cast<Eigen::Index>(dim);
    const auto x0m = detail::midpoint_values(x0);
    std::vector<double> values(grid.n_nodes() * dim, 0.0);
    std::vector<Vec> hm;
    hm.reserve(grid.n_cells());
    Vec prev = Vec::Zero(n);
    for (std::size_t i = 1; i < grid.n_nodes(); ++i) {
        const double t = grid.node(i);
        Vec rhs = g.at(i);
        for (std::size_t j = 0; j + 1 < i; ++j) rhs.noalias() -= dt * (kernel.vx(t, grid.midpoint(j), x0m[j]) * hm[j]);
        const Mat last = kernel.vx(t, grid.midpoint(i - 1), x0m[i - 1]);
        rhs.noalias() -= (0.5 * dt) * (last * prev);
        const Mat block = Mat::Identity(n, n) + (0.5 * dt) * last;
        Vec hi;
        if (dim == 1) {
            if (!(std::abs(block(0, 0)) > kSingularBlockThreshold)) {
                throw Error(ErrorKind::SingularBlock, "diagonal block at node " + std::to_string(i));
            }
            hi = rhs / block(0, 0);
        } else {
            Eigen::JacobiSVD<Mat> svd(block, Eigen::ComputeFullU | Eigen::ComputeFullV);
            if (!(svd.singularValues().minCoeff() > kSingularBlockThreshold)) {
                throw Error(ErrorKind::SingularBlock, "diagonal block at node " + std::to_string(i));
            }
            hi = svd.solve(rhs);
        }
        hm.push_back(0.5 * (prev + hi));
        std::copy(hi.data(), hi.data() + dim, values.begin() + static_cast<std::ptrdiff_t>(i * dim));
        prev = std::move(hi);
    }
    return {grid, dim, std::move(values)};
}

}  // namespace volterra
