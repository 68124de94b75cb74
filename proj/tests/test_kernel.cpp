#include "catch_amalgamated.hpp"

#include "volterra/kernel.hpp"
#include "volterra/sampling.hpp"

#include <cmath>
#include <numbers>
#include <vector>

using namespace volterra;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

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

Vec scalar(double x) { return Vec::Constant(1, x); }

std::vector<KernelSpec> builtin_kernels() {
    return {zero_kernel(), linear_kernel(0.5), linear_kernel(-1.3), example1_kernel(1.0), example1_kernel(-2.0),
            example2_linw_atan(1.0)};
}

}  // namespace

TEST_CASE("triangular domain", "[kernel]") {
    const TriangularDomain d{0.0, 1.0};
    CHECK(d.contains(0.5, 0.5));
    CHECK(d.contains(1.0, 0.0));
    CHECK_FALSE(d.contains(0.5, 0.7));
    CHECK_FALSE(d.contains(1.1, 0.5));
    CHECK_FALSE(d.contains(0.5, -0.1));
}

TEST_CASE("logarithmic example kernel", "[kernel][example1]") {
    const KernelSpec k = example1_kernel(1.0);
    CHECK(k.diagonal_zero);
    CHECK(k.domain.alpha == 0.0);
    CHECK(k.domain.beta == 1.0);
    CHECK_THAT(k.v(1.0, 0.0, scalar(1.0))[0], WithinAbs(std::log(3.0), 1e-15));
    CHECK_THAT(std::log(3.0), WithinAbs(1.098612, 1e-6));
    for (double t : {0.0, 0.3, 1.0}) {
        for (double x : {-5.0, 0.0, 2.0}) {
            CHECK(k.v(t, t, scalar(x))[0] == 0.0);
            CHECK(eval_checked(k, KernelPart::V, t, t, scalar(x))(0, 0) == 0.0);
        }
    }
    const KernelSpec flat = example1_kernel(0.0);
    CHECK(flat.v(0.8, 0.1, scalar(3.0))[0] == 0.0);
    CHECK(flat.vx(0.8, 0.1, scalar(3.0))(0, 0) == 0.0);
}

TEST_CASE("feedback example kernel", "[kernel][example2]") {
    const KernelSpec k = example2_linw_atan(1.0);
    CHECK(k.diagonal_zero);
    CHECK_THAT(k.v(1.0, 0.5, scalar(1.0))[0], WithinAbs(0.5 * std::atan(1.0), 1e-15));
    CHECK_THAT(k.v(1.0, 0.5, scalar(1.0))[0], WithinAbs(0.392699, 1e-6));
    CHECK(k.v(0.7, 0.7, scalar(4.0))[0] == 0.0);

    const ScalarC1 zero_z{[](double) { return 0.0; }, [](double) { return 0.0; }};
    const ScalarC1 w{[](double s) { return std::sin(s); }, [](double s) { return std::cos(s); }};
    const KernelSpec silent = example2_kernel(w, zero_z, 0.0, 0.0, 2.0);
    CHECK(silent.v(1.5, 0.2, scalar(3.0))[0] == 0.0);
    CHECK(silent.domain.beta == 2.0);

    const ScalarC1 bad_w{[](double s) { return 1.0 + s; }, [](double) { return 1.0; }};
    CHECK(kind_of([&] { (void)example2_kernel(bad_w, zero_z, 1, 0, 1); }) == ErrorKind::KernelContract);
    CHECK(kind_of([&] { (void)example2_kernel(w, zero_z, -1, 0, 1); }) == ErrorKind::KernelContract);
    CHECK(kind_of([&] { (void)example2_kernel(w, zero_z, 1, 0, 0); }) == ErrorKind::KernelContract);
}

TEST_CASE("linear kernel", "[kernel][linear]") {
    const KernelSpec k = linear_kernel(0.5);
    CHECK_FALSE(k.diagonal_zero);
    for (double t : {0.0, 0.4, 1.0}) CHECK(k.v(t, 0.5 * t, scalar(2.0))[0] == 1.0);
    CHECK(eval_checked(linear_kernel(2.0), KernelPart::Vx, 0.9, 0.3, scalar(7.0))(0, 0) == 2.0);
    const KernelSpec none = linear_kernel(0.0);
    CHECK(none.v(0.5, 0.1, scalar(3.0))[0] == 0.0);

    const KernelSpec k3 = linear_kernel(2.0, {}, 3);
    const Mat j = k3.vx(0.5, 0.1, Vec::Ones(3));
    CHECK(j.isApprox(2.0 * Mat::Identity(3, 3)));
}

TEST_CASE("eval_checked guards the triangle and the dimension", "[kernel]") {
    const KernelSpec k = example1_kernel(1.0);
    CHECK(kind_of([&] { (void)eval_checked(k, KernelPart::V, 0.5, 0.7, scalar(1)); }) == ErrorKind::OutsideTriangle);
    CHECK(kind_of([&] { (void)eval_checked(k, KernelPart::Vt, 1.5, 0.7, scalar(1)); }) == ErrorKind::OutsideTriangle);
    CHECK(kind_of([&] { (void)eval_checked(k, KernelPart::Vx, 0.5, 0.2, Vec::Ones(2)); }) == ErrorKind::DimMismatch);
    CHECK(eval_checked(k, KernelPart::V, 0.5, 0.5, scalar(3)).norm() == 0.0);
}

TEST_CASE("evaluator derivatives match finite differences", "[kernel][property]") {
    constexpr double eps = 1e-5;
    Rng rng(5);
    for (const KernelSpec& k : builtin_kernels()) {
        INFO(k.name);
        const double a = k.domain.alpha, len = k.domain.beta - k.domain.alpha;
        for (int s = 0; s < 100; ++s) {
            // Interior points at least 0.05 away from the diagonal and the edges.
            const double t = a + len * rng.uniform(0.1, 0.95);
            const double tau = a + (t - a) * rng.uniform(0.0, 1.0) * 0.9;
            if (t - tau < 0.05 * len) continue;
            const Vec x = scalar(rng.uniform(-2, 2));
            const Vec dx = scalar(eps);
            const double vt_fd = (k.v(t + eps, tau, x)[0] - k.v(t - eps, tau, x)[0]) / (2 * eps);
            const double vx_fd = (k.v(t, tau, x + dx)[0] - k.v(t, tau, x - dx)[0]) / (2 * eps);
            const double vtx_fd = (k.vx(t + eps, tau, x)(0, 0) - k.vx(t - eps, tau, x)(0, 0)) / (2 * eps);
            const double vtx_fd2 = (k.vt(t, tau, x + dx)[0] - k.vt(t, tau, x - dx)[0]) / (2 * eps);
            CHECK_THAT(k.vt(t, tau, x)[0], WithinAbs(vt_fd, 1e-6));
            CHECK_THAT(k.vx(t, tau, x)(0, 0), WithinAbs(vx_fd, 1e-6));
            CHECK_THAT(k.vtx(t, tau, x)(0, 0), WithinAbs(vtx_fd, 1e-6));
            CHECK_THAT(k.vtx(t, tau, x)(0, 0), WithinAbs(vtx_fd2, 1e-6));
        }
    }
}

TEST_CASE("declared growth bounds hold", "[kernel][property]") {
    Rng rng(9);
    for (const KernelSpec& k : {example1_kernel(1.0), example1_kernel(-2.5), example2_linw_atan(0.9),
                                example2_linw_atan(1.0, 2.0, 0.5)}) {
        INFO(k.name);
        REQUIRE(k.bounds->has_diagonal_zero_bounds());
        const double a = k.domain.alpha, len = k.domain.beta - k.domain.alpha;
        int violations = 0;
        for (int s = 0; s < 1000; ++s) {
            const double t = a + len * rng.uniform();
            const double tau = a + (t - a) * rng.uniform();
            if (!(t > tau)) continue;
            const double x = rng.uniform(-10, 10);
            const double lhs = std::abs(k.vt(t, tau, scalar(x))[0]);
            if (lhs > k.bounds->c0(t, tau) * std::abs(x) + k.bounds->d0(t, tau) + 1e-10) ++violations;
        }
        CHECK(violations == 0);
    }
    for (const KernelSpec& k : {linear_kernel(0.5), linear_kernel(-3.0), zero_kernel()}) {
        INFO(k.name);
        REQUIRE(k.bounds->has_growth_bounds());
        for (int s = 0; s < 1000; ++s) {
            const double t = rng.uniform();
            const double tau = t * rng.uniform();
            const double x = rng.uniform(-10, 10);
            CHECK(std::abs(k.v(t, t, scalar(x))[0]) <= k.bounds->c1(t) * std::abs(x) + k.bounds->d1(t) + 1e-12);
            CHECK(std::abs(k.vt(t, tau, scalar(x))[0]) <=
                  k.bounds->c2(t, tau) * std::abs(x) + k.bounds->d2(t, tau) + 1e-12);
        }
    }
}

TEST_CASE("diagonal_zero flag is truthful", "[kernel][property]") {
    Rng rng(13);
    for (const KernelSpec& k : builtin_kernels()) {
        INFO(k.name);
        bool vanishes = true;
        for (int s = 0; s < 1000; ++s) {
            const double t = k.domain.alpha + (k.domain.beta - k.domain.alpha) * rng.uniform();
            if (k.v(t, t, scalar(rng.uniform(-10, 10))).norm() != 0.0) vanishes = false;
        }
        if (k.diagonal_zero) CHECK(vanishes);
    }
    CHECK_FALSE(linear_kernel(0.5).diagonal_zero);
}

TEST_CASE("example1 c0 bound has the closed-form square integral", "[kernel][example1]") {
    // int_0^1 int_0^t c0^2 = (8/9) a^2 int_0^1 int_0^t s^{4/3} ds dt = (4/35) a^2.
    const KernelSpec k = example1_kernel(1.5);
    const double c = k.bounds->c0(1.0, 0.0);
    CHECK_THAT(c * c, WithinRel(8.0 / 9.0 * 2.25, 1e-14));
    CHECK_THAT(k.bounds->d0(1.0, 0.0), WithinRel(3.0, 1e-14));
}
