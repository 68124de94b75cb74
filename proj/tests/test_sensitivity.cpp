#include "catch_amalgamated.hpp"

#include "oracles.hpp"
#include "volterra/sensitivity.hpp"

#include <cmath>

using namespace volterra;
using Catch::Matchers::WithinAbs;

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

}  // namespace

TEST_CASE("sensitivity of the identity map", "[sensitivity]") {
    const Grid g(0, 1, 100);
    Rng rng(1);
    const GridFunction a = random_smooth_function(g, 1, rng);
    const GridFunction h = random_walk_function(g, 1, rng);
    const SensitivityResult s = directional_sensitivity(zero_kernel(), a, h, 1e-12);
    CHECK(ac_distance(s.sensitivity, h) <= 1e-14);
    CHECK(ac_distance(s.state, a) <= 1e-14);
    CHECK(fd_sensitivity_check(zero_kernel(), a, h, 1e-3) <= 1e-12);
    CHECK_THAT(robustness_modulus(zero_kernel(), a, 4, 1e-2), WithinAbs(1.0, 1e-12));
}

TEST_CASE("sensitivity of the linear resolvent", "[sensitivity][linear]") {
    const Grid g(0, 1, 500);
    const double lambda = 0.5;
    const KernelSpec k = linear_kernel(lambda);
    const auto hfun = [](double t) { return t * std::cos(3 * t); };
    const GridFunction h = from_callable(hfun, g);
    const GridFunction exact = from_callable([&](double t) { return oracle::linear_sensitivity(lambda, hfun, t); }, g);
    Rng rng(2);
    for (int s = 0; s < 3; ++s) {
        const GridFunction a = random_smooth_function(g, 1, rng);
        const SensitivityResult r = directional_sensitivity(k, a, h, 1e-10);
        CHECK(ac_distance(r.sensitivity, exact) <= 1e-4 * ac_norm(exact));
        CHECK(ac_distance(frechet_apply(k, r.state, r.sensitivity), h) <= 1e-10);
    }
    CHECK(fd_sensitivity_check(k, ramp(g), ramp(g), 1e-3) <= 1e-3);
}

TEST_CASE("sensitivity of the logarithmic example matches finite differences", "[sensitivity][example1]") {
    const Grid g(0, 1, 300);
    const KernelSpec k = example1_kernel(1.0);
    const GridFunction t = ramp(g);
    const SensitivityResult s = directional_sensitivity(k, t, t, 1e-12);
    const GridFunction fd = fd_sensitivity(k, t, t, 1e-3);
    CHECK(ac_distance(s.sensitivity, fd) <= 1e-3 * ac_norm(s.sensitivity));
    CHECK(s.linear.converged);
    CHECK(s.solve.converged);
}

TEST_CASE("sensitivity discrepancy shrinks with the difference step", "[sensitivity][property]") {
    const Grid g(0, 0.9, 300);
    const GridFunction t = ramp(g);
    for (const KernelSpec& k : {example1_kernel(1.0, {0.0, 0.9}), example2_linw_atan(0.9)}) {
        INFO(k.name);
        const double coarse = fd_sensitivity_check(k, t, t, 1e-2);
        const double fine = fd_sensitivity_check(k, t, t, 1e-3);
        CHECK(fine <= 1e-2);
        CHECK((fine < coarse || fine <= 1e-6));
    }
}

TEST_CASE("sensitivity is linear in the direction", "[sensitivity][property]") {
    const Grid g(0, 1, 200);
    Rng rng(3);
    const KernelSpec k = example2_linw_atan(1.0);
    const GridFunction a = random_smooth_function(g, 1, rng);
    const GridFunction h1 = random_smooth_function(g, 1, rng);
    const GridFunction h2 = random_smooth_function(g, 1, rng);
    constexpr double c = -1.7;
    const GridFunction s1 = directional_sensitivity(k, a, h1, 1e-13).sensitivity;
    const GridFunction s2 = directional_sensitivity(k, a, h2, 1e-13).sensitivity;
    const GridFunction s12 = directional_sensitivity(k, a, axpy(c, h1, h2), 1e-13).sensitivity;
    CHECK(ac_distance(s12, axpy(c, s1, s2)) <= 1e-8 * (1 + ac_norm(s12)));
}

TEST_CASE("robustness modulus", "[sensitivity][robustness]") {
    const Grid g(0, 1, 200);
    const GridFunction a = ramp(g);
    SECTION("linear kernel is bounded by its sensitivity over the same probes") {
        const KernelSpec k = linear_kernel(0.5);
        const double modulus = robustness_modulus(k, a, 6, 1e-3);
        CHECK(modulus > 0.0);
        CHECK(modulus <= 1.0);
        double sens = 0.0;
        for (const auto& h : robustness_probes(g, 1, 6)) {
            sens = std::max(sens, ac_norm(directional_sensitivity(k, a, h, 1e-12).sensitivity));
        }
        CHECK(std::abs(modulus - sens) <= 0.05 * sens);
    }
    SECTION("delta sweep stabilizes") {
        const KernelSpec k = example1_kernel(1.0);
        const double m1 = robustness_modulus(k, a, 4, 1e-1);
        const double m2 = robustness_modulus(k, a, 4, 1e-2);
        const double m3 = robustness_modulus(k, a, 4, 1e-3);
        CHECK(std::isfinite(m1));
        CHECK(std::abs(m3 - m2) <= 0.05 * m3);
    }
    SECTION("probes are unit and deterministic") {
        const auto p = robustness_probes(g, 2, 3, 99);
        const auto q = robustness_probes(g, 2, 3, 99);
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK_THAT(ac_norm(p[i]), WithinAbs(1.0, 1e-14));
            CHECK(ac_distance(p[i], q[i]) == 0.0);
        }
    }
}

TEST_CASE("sensitivity argument checks", "[sensitivity]") {
    const Grid g(0, 1, 50);
    const GridFunction a = ramp(g);
    CHECK(kind_of([&] { (void)directional_sensitivity(zero_kernel(), a, a, 0.0); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([&] { (void)fd_sensitivity_check(zero_kernel(), a, a, 0.0); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([&] { (void)robustness_modulus(zero_kernel(), a, 0, 1e-2); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([&] { (void)robustness_modulus(zero_kernel(), a, 2, -1.0); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([&] { (void)directional_sensitivity(zero_kernel(), a, ramp(Grid(0, 1, 51)), 1e-8); }) ==
          ErrorKind::GridMismatch);
}
