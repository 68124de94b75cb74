#include "catch_amalgamated.hpp"

#include "oracles.hpp"
#include "volterra/linear_solver.hpp"
#include "volterra/sampling.hpp"

#include <cmath>
#include <vector>

using namespace volterra;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

GridFunction ramp(const Grid& g) {
    return from_callable([a = g.alpha()](double t) { return t - a; }, g);
}

template <class F>
ErrorKind kind_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected volterra::Error");
    return ErrorKind::InvalidArgument;
}

std::vector<KernelSpec> builtin_kernels() {
    return {zero_kernel(), linear_kernel(0.5), linear_kernel(-1.5), example1_kernel(1.0), example2_linw_atan(1.0)};
}

}  // namespace

TEST_CASE("apply_T", "[linear]") {
    const Grid g(0, 1, 500);
    const KernelSpec one = linear_kernel(1.0);
    const GridFunction x0 = GridFunction::zero(g);
    CHECK(ac_norm(apply_T(one, x0, GridFunction::zero(g))) == 0.0);
    const GridFunction tg = apply_T(one, x0, ramp(g));
    CHECK_THAT(tg(500), WithinAbs(0.5, 1e-4));
    CHECK_THAT(apply_T(one, x0, tg)(500), WithinAbs(1.0 / 6.0, 1e-3));
}

TEST_CASE("iterate_bound", "[linear][bound]") {
    const NeumannBound b = make_neumann_bound(1.0, 1.0, 1.0);
    CHECK(b.C == 2.0);
    CHECK(b.D == 2.0);
    CHECK(b.A == 1.0);
    CHECK(iterate_bound(1, b) == b.D);
    CHECK_THAT(iterate_bound(3, b), WithinRel(1.0, 1e-14));
    CHECK_THAT(iterate_bound(20, b), WithinRel(2.0 / std::tgamma(20.0), 1e-12));
    CHECK(iterate_bound(20, b) < 1.7e-17);

    const NeumannBound w = make_neumann_bound(2.5, 0.3, 1.7);
    for (std::size_t k = 1; k < 30; ++k) {
        const double direct = w.D * std::pow(w.A, k - 1.0) / std::tgamma(static_cast<double>(k));
        CHECK_THAT(iterate_bound(k, w), WithinRel(direct, 1e-12));
    }
    CHECK_THAT(tail_bound(1, b), WithinRel(2.0 * std::exp(1.0), 1e-14));
    CHECK(kind_of([&] { (void)iterate_bound(0, b); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([] { (void)make_neumann_bound(-1.0, 1.0, 1.0); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("neumann_solve", "[linear][neumann]") {
    const Grid g(0, 1, 500);
    const GridFunction t = ramp(g);
    const GridFunction x0 = GridFunction::zero(g);

    SECTION("zero kernel returns g after one iteration") {
        const NeumannResult r = neumann_solve(zero_kernel(), x0, t, 1e-12, 50);
        CHECK(r.report.iterations == 1);
        CHECK(r.report.residual_ac == 0.0);
        CHECK(r.report.converged);
        CHECK(r.report.certified);
        CHECK(ac_distance(r.solution, t) == 0.0);
    }
    SECTION("unit kernel solves h' + h = 1") {
        const NeumannResult r = neumann_solve(linear_kernel(1.0), x0, t, 1e-10, 100);
        REQUIRE(r.report.converged);
        CHECK(r.report.status == SolveStatus::Converged);
        CHECK_THAT(r.solution(500), WithinAbs(0.632121, 1e-4));
        CHECK_THAT(r.solution(500), WithinAbs(oracle::unit_ode(1.0), 1e-4));
        CHECK(r.report.residual_ac <= 1e-10);
        CHECK(r.report.bound.l_rho == Catch::Approx(1.1));
        CHECK(r.report.bound.M == 1.0);
    }
    SECTION("partial sums follow the alternating series") {
        const NeumannResult r = neumann_solve(linear_kernel(1.0), x0, t, 1e-300, 20);
        CHECK(r.report.iterations == 20);
        CHECK_FALSE(r.report.converged);
        CHECK(r.report.status == SolveStatus::MaxIterExceeded);
        double worst = 0.0;
        for (std::size_t i = 0; i < g.n_nodes(); ++i) {
            worst = std::max(worst, std::abs(r.solution(i) - oracle::alternating_partial_sum(19, g.node(i))));
        }
        CHECK(worst <= 1e-6);
    }
    SECTION("iterates are exactly g - Tg + T^2 g - ...") {
        const KernelSpec k = example1_kernel(1.0);
        Rng rng(1);
        const GridFunction state = random_smooth_function(g, 1, rng);
        const NeumannResult r = neumann_solve(k, state, t, 1e-300, 6);
        GridFunction term = t, sum = t;
        for (int i = 1; i < 6; ++i) {
            term = scale(-1.0, apply_T(k, state, term));
            sum = sum + term;
        }
        CHECK(ac_distance(r.solution, sum) <= 1e-12 * ac_norm(sum));
    }
    CHECK(kind_of([&] { (void)neumann_solve(zero_kernel(), x0, t, 0.0, 10); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("neumann solutions satisfy the equation to tol", "[linear][neumann][property]") {
    Rng rng(2);
    const Grid g(0, 1, 200);
    for (const KernelSpec& k : builtin_kernels()) {
        INFO(k.name);
        for (double tol : {1e-6, 1e-10}) {
            const GridFunction x0 = random_smooth_function(g, 1, rng);
            const GridFunction rhs = random_smooth_function(g, 1, rng);
            const NeumannResult r = neumann_solve(k, x0, rhs, tol, 200);
            REQUIRE(r.report.converged);
            CHECK(ac_distance(frechet_apply(k, x0, r.solution), rhs) <= tol);
        }
    }
}

TEST_CASE("certified tail bound", "[linear][neumann]") {
    const Grid g(0, 1, 100);
    const NeumannResult r = neumann_solve(linear_kernel(0.2), GridFunction::zero(g), ramp(g), 1e-6, 200);
    CHECK(r.report.converged);
    CHECK(r.report.tail_bound == Catch::Approx(tail_bound(r.report.iterations, r.report.bound)));
    CHECK(r.report.certified == (r.report.tail_bound < 1e-6));
}

TEST_CASE("collocation_solve", "[linear][collocation]") {
    const Grid g(0, 1, 500);
    const GridFunction t = ramp(g);
    const GridFunction x0 = GridFunction::zero(g);
    CHECK(ac_distance(collocation_solve(zero_kernel(), x0, t), t) == 0.0);
    const GridFunction h = collocation_solve(linear_kernel(1.0), x0, t);
    CHECK_THAT(h(500), WithinAbs(oracle::unit_ode(1.0), 1e-4));
    const GridFunction ode = from_callable(oracle::unit_ode, g);
    CHECK(ac_distance(h, ode) <= 1e-4 * ac_norm(ode));
}

TEST_CASE("collocation and Neumann agree", "[linear][property]") {
    Rng rng(3);
    const Grid g(0, 1, 150);
    for (const KernelSpec& k : builtin_kernels()) {
        INFO(k.name);
        for (int s = 0; s < 5; ++s) {
            const GridFunction x0 = random_smooth_function(g, 1, rng);
            const GridFunction rhs = random_smooth_function(g, 1, rng);
            const GridFunction direct = collocation_solve(k, x0, rhs);
            const NeumannResult iter = neumann_solve(k, x0, rhs, 1e-13, 300);
            CHECK(ac_distance(direct, iter.solution) <= 1e-8 * ac_norm(rhs));
            CHECK(ac_distance(frechet_apply(k, x0, direct), rhs) <= 1e-11 * ac_norm(rhs));
        }
    }
}

TEST_CASE("collocation in several dimensions", "[linear][collocation]") {
    const Grid g(0, 1, 100);
    const KernelSpec k = linear_kernel(0.8, {}, 3);
    const GridFunction rhs = from_callable([](double t) { return Vec{{t, t * t, std::sin(t)}}; }, g, 3);
    const GridFunction x0 = GridFunction::zero(g, 3);
    const GridFunction h = collocation_solve(k, x0, rhs);
    CHECK(ac_distance(frechet_apply(k, x0, h), rhs) <= 1e-12);
    CHECK(ac_distance(neumann_solve(k, x0, rhs, 1e-13, 200).solution, h) <= 1e-10);
}

TEST_CASE("singular diagonal block", "[linear][collocation]") {
    const Grid g(0, 1, 10);
    const KernelSpec k = linear_kernel(-2.0 / g.spacing());
    CHECK(kind_of([&] { (void)collocation_solve(k, GridFunction::zero(g), ramp(g)); }) == ErrorKind::SingularBlock);
    const KernelSpec k2 = linear_kernel(-2.0 / g.spacing(), {}, 2);
    CHECK(kind_of([&] { (void)collocation_solve(k2, GridFunction::zero(g, 2), GridFunction::zero(g, 2)); }) ==
          ErrorKind::SingularBlock);
}

TEST_CASE("estimate_l_rho", "[linear][l_rho]") {
    CHECK_THAT(estimate_l_rho(linear_kernel(-0.7), 3.0), WithinRel(1.1 * 0.7, 1e-14));
    CHECK(estimate_l_rho(zero_kernel(), 1.0) == 0.0);
    const KernelSpec k = example1_kernel(1.0);
    const double l = estimate_l_rho(k, 1.0);
    CHECK(std::isfinite(l));
    CHECK(l > 0.0);
    Rng rng(4);
    double fresh = 0.0;
    for (int s = 0; s < 10000; ++s) {
        const double t = rng.uniform();
        const double tau = t * rng.uniform();
        fresh = std::max(fresh, std::abs(k.vx(t, tau, Vec::Constant(1, rng.uniform(-1, 1)))(0, 0)));
    }
    CHECK(fresh <= l);
    CHECK(kind_of([&] { (void)estimate_l_rho(k, 0.0); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([&] { (void)estimate_l_rho(k, 1.0, 0); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("Neumann terms obey the factorial bound", "[linear][bound][property]") {
    Rng rng(5);
    const Grid g(0, 1, 200);
    int violations = 0;
    for (const KernelSpec& k : builtin_kernels()) {
        for (int s = 0; s < 10; ++s) {
            const GridFunction x0 = with_ac_norm(random_smooth_function(g, 1, rng), rng.uniform(0.1, 3));
            const GridFunction rhs = with_ac_norm(random_smooth_function(g, 1, rng), rng.uniform(0.1, 3));
            const NeumannBound b =
                make_neumann_bound(estimate_l_rho(k, sup_norm(x0) + 1.0), sup_norm(rhs), g.length());
            GridFunction term = rhs;
            for (std::size_t j = 1; j <= 15; ++j) {
                term = apply_T(k, x0, term);
                if (ac_norm(term) > iterate_bound(j, b) + 1e-6) ++violations;
            }
        }
    }
    CHECK(violations == 0);
}
