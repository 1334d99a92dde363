#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "subdif/nonlocal.hpp"
#include "subdif/verify.hpp"

using namespace subdif;

namespace {

NonlocalOperator fractional_op(double alpha, const TimeGrid& g) {
    return NonlocalOperator(sample_cell_averages(KernelPair::fractional(alpha), KernelSide::K, g));
}

NonlocalOperator unit_op(const TimeGrid& g) {
    return NonlocalOperator(DiscreteKernel(g, std::vector<double>(static_cast<std::size_t>(g.steps), 1.0)));
}

}  // namespace

TEST_CASE("constant trajectory maps to zero") {
    const TimeGrid g(1.0, 16);
    const NonlocalOperator op = fractional_op(0.5, g);
    std::vector<double> v(17, 3.25);
    for (double d : apply(op, v, 3.25)) CHECK(d == 0.0);
}

TEST_CASE("unit kernel telescopes to v[n] - v[0]") {
    const TimeGrid g(1.0, 16);
    const NonlocalOperator op = unit_op(g);
    Rng rng(3);
    std::vector<double> v(17);
    for (auto& x : v) x = rng.uniform(-1.0, 1.0);
    const std::vector<double> d = apply(op, v, v[0]);
    for (int n = 1; n <= 16; ++n)
        CHECK(d[static_cast<std::size_t>(n)] ==
              doctest::Approx(v[static_cast<std::size_t>(n)] - v[0]).epsilon(1e-13));
}

TEST_CASE("g_1/2 derivative of t equals g_{3/2}: exact for piecewise-linear data") {
    const TimeGrid g(1.0, 64);
    const NonlocalOperator op = fractional_op(0.5, g);
    std::vector<double> v(65);
    for (int n = 0; n <= 64; ++n) v[static_cast<std::size_t>(n)] = g.node(n);
    const std::vector<double> d = apply(op, v, 0.0);
    for (int n = 1; n <= 64; ++n)
        CHECK(d[static_cast<std::size_t>(n)] ==
              doctest::Approx(2.0 * std::sqrt(g.node(n) / M_PI)).epsilon(1e-13));
}

TEST_CASE("g_1/2 derivative of t^2 converges to 2 g_{5/2}") {
    double prev = -1.0;
    for (int N : {64, 256, 1024}) {
        const TimeGrid g(1.0, N);
        const NonlocalOperator op = fractional_op(0.5, g);
        std::vector<double> v(static_cast<std::size_t>(N) + 1);
        for (int n = 0; n <= N; ++n) v[static_cast<std::size_t>(n)] = g.node(n) * g.node(n);
        const std::vector<double> d = apply(op, v, 0.0);
        double worst = 0.0;
        for (int n = 1; n <= N; ++n)
            worst = std::max(worst, std::abs(d[static_cast<std::size_t>(n)] -
                                             2.0 * std::pow(g.node(n), 1.5) / std::tgamma(2.5)));
        if (prev > 0.0) CHECK(worst < prev);
        prev = worst;
    }
    CHECK(prev < 2e-3);
}

TEST_CASE("classical L1 coefficients reproduced for g_{1-alpha}") {
    const double alpha = 0.3;
    const TimeGrid g(2.0, 64);
    const DiscreteKernel k = sample_cell_averages(KernelPair::fractional(alpha), KernelSide::K, g);
    for (int m = 1; m <= 64; ++m) {
        const double expected = (std::pow(g.node(m), 1.0 - alpha) - std::pow(g.node(m - 1), 1.0 - alpha)) /
                                (g.tau() * std::tgamma(2.0 - alpha));
        CHECK(k.cell(m) == doctest::Approx(expected).epsilon(1e-13));
    }
}

TEST_CASE("linearity of apply") {
    const TimeGrid g(1.0, 32);
    const NonlocalOperator op = fractional_op(0.4, g);
    Rng rng(11);
    std::vector<double> v(33), w(33);
    for (auto& x : v) x = rng.uniform(-2.0, 2.0);
    for (auto& x : w) x = rng.uniform(-2.0, 2.0);
    const double a = 1.7, b = -0.6;
    std::vector<double> mix(33);
    for (int i = 0; i <= 32; ++i)
        mix[static_cast<std::size_t>(i)] =
            a * v[static_cast<std::size_t>(i)] + b * w[static_cast<std::size_t>(i)];
    const auto dv = apply(op, v, v[0]);
    const auto dw = apply(op, w, w[0]);
    const auto dm = apply(op, mix, mix[0]);
    for (int n = 1; n <= 32; ++n)
        CHECK(dm[static_cast<std::size_t>(n)] ==
              doctest::Approx(a * dv[static_cast<std::size_t>(n)] + b * dw[static_cast<std::size_t>(n)])
                  .epsilon(1e-11));
}

TEST_CASE("tau-cumulative sum of apply matches convolve of increments") {
    // 1 * (k * v') = k * (v - v0) at the nodes, up to the product rule's O(tau)
    const TimeGrid g(1.0, 256);
    const DiscreteKernel k = sample_cell_averages(KernelPair::fractional(0.5), KernelSide::K, g);
    const NonlocalOperator op{k};
    std::vector<double> v(257), shifted(257);
    for (int n = 0; n <= 256; ++n) {
        v[static_cast<std::size_t>(n)] = std::sin(2.0 * g.node(n));
        shifted[static_cast<std::size_t>(n)] = v[static_cast<std::size_t>(n)] - v[0];
    }
    const auto d = apply(op, v, v[0]);
    const auto conv = convolve(k, shifted);
    double cum = 0.0, vmax = 1.0;
    for (int n = 1; n <= 256; ++n) {
        cum += g.tau() * d[static_cast<std::size_t>(n)];
        CHECK(std::abs(cum - conv[static_cast<std::size_t>(n)]) <= 10.0 * g.tau() * vmax);
    }
}

TEST_CASE("implicit split reconstructs apply") {
    const TimeGrid g(1.0, 24);
    const NonlocalOperator op = fractional_op(0.6, g);
    Rng rng(5);
    std::vector<double> v(25);
    for (auto& x : v) x = rng.uniform(-1.0, 1.0);
    const auto d = apply(op, v, v[0]);
    for (int n = 1; n <= 24; ++n) {
        const ImplicitSplit sp = implicit_split(op, std::span<const double>(v.data(), static_cast<std::size_t>(n)));
        CHECK(sp.diag == op.kernel.cell(1));
        CHECK(sp.diag * v[static_cast<std::size_t>(n)] - sp.rhs_history ==
              doctest::Approx(d[static_cast<std::size_t>(n)]).epsilon(1e-12));
    }
    // n = 1: history term is k(1) v[0]
    const ImplicitSplit sp1 = implicit_split(op, std::span<const double>(v.data(), 1));
    CHECK(sp1.rhs_history == doctest::Approx(op.kernel.cell(1) * v[0]));
}

TEST_CASE("unit kernel split: diag 1, history v[0]") {
    const TimeGrid g(1.0, 12);
    const NonlocalOperator op = unit_op(g);
    std::vector<double> v = {0.3, -0.2, 0.7, 0.1, 0.0, 0.5, 0.6, -0.4, 0.2, 0.9, -0.1, 0.8, 0.35};
    for (int n = 1; n <= 12; ++n) {
        const ImplicitSplit sp = implicit_split(op, std::span<const double>(v.data(), static_cast<std::size_t>(n)));
        CHECK(sp.diag == 1.0);
        CHECK(sp.rhs_history == doctest::Approx(v[0]).epsilon(1e-14));
    }
}

TEST_CASE("convexity margin: affine H gives zero, convex H stays nonnegative") {
    const TimeGrid g(1.0, 64);
    const NonlocalOperator op = fractional_op(0.5, g);
    Rng rng(23);
    std::vector<double> v(65);
    for (auto& x : v) x = rng.uniform(-1.0, 1.0);

    const double lin = convexity_margin(
        op, [](double y) { return 2.0 * y + 1.0; }, [](double) { return 2.0; }, v, v[0]);
    CHECK(std::abs(lin) <= 1e-12);

    const double sq = convexity_margin(
        op, [](double y) { return y * y; }, [](double y) { return 2.0 * y; }, v, v[0]);
    CHECK(sq >= -1e-10);

    const double eps = 0.1;
    const double habs = convexity_margin(
        op, [eps](double y) { return std::sqrt(y * y + eps * eps) - eps; },
        [eps](double y) { return y / std::sqrt(y * y + eps * eps); }, v, v[0]);
    CHECK(habs >= -1e-10);
}

TEST_CASE("randomized convexity property across families") {
    const TimeGrid g(1.0, 48);
    for (const KernelPair& pair :
         {KernelPair::fractional(0.5), KernelPair::tempered(0.5, 1.0), KernelPair::distributed_order()}) {
        const NonlocalOperator op(sample_cell_averages(pair, KernelSide::K, g));
        const CheckResult c = convexity_suite(op, 100, 99);
        CHECK(c.pass);
    }
}

TEST_CASE("operator construction rejects bad kernels") {
    const TimeGrid g(1.0, 4);
    CHECK_THROWS_AS(NonlocalOperator(DiscreteKernel(g, {1.0, -0.5, 0.2, 0.1})), std::invalid_argument);
    CHECK_THROWS_AS(NonlocalOperator(DiscreteKernel(g, {1.0, 2.0, 0.2, 0.1})), std::invalid_argument);
    const NonlocalOperator op = unit_op(g);
    std::vector<double> v(5, 1.0);
    CHECK_THROWS_AS(apply(op, v, 0.0), std::invalid_argument);
}
