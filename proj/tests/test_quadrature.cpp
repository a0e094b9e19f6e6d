#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "ergobox/quadrature.hpp"

namespace {

using namespace ergobox;

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
    const auto& nodes = gauss_legendre(8);
    double s14 = 0.0, s7 = 0.0, w = 0.0;
    for (const auto& nd : nodes) {
        s14 += nd.w * std::pow(nd.x, 14);
        s7 += nd.w * std::pow(nd.x, 7);
        w += nd.w;
    }
    EXPECT_NEAR(w, 2.0, 1e-14);
    EXPECT_NEAR(s14, 2.0 / 15.0, 1e-14);
    EXPECT_NEAR(s7, 0.0, 1e-15);
}

TEST(GaussLegendre, CachedReferenceIsStable) {
    const auto* a = &gauss_legendre(16);
    const auto* b = &gauss_legendre(16);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a->size(), 16u);
}

TEST(GaussLegendre, MappedIntervalIntegratesQuadratic) {
    double s = 0.0;
    for (const auto& nd : gauss_legendre_ab(6, 2.0, 5.0)) s += nd.w * nd.x * nd.x;
    EXPECT_NEAR(s, 39.0, 1e-12);
}

TEST(TanhSinh, HandlesEndpointSingularities) {
    double inv_sqrt = 0.0, logint = 0.0;
    for (const auto& nd : tanh_sinh_01(64)) {
        inv_sqrt += nd.w / std::sqrt(nd.x);
        logint += nd.w * std::log(nd.x);
    }
    EXPECT_NEAR(inv_sqrt, 2.0, 1e-10);
    EXPECT_NEAR(logint, -1.0, 1e-10);
}

TEST(CubicSplineTest, ReproducesSmoothFunction) {
    std::vector<double> xs, ys;
    for (int i = 0; i <= 60; ++i) {
        const double x = -2.0 + 4.0 * i / 60.0;
        xs.push_back(x);
        ys.push_back(std::sin(x));
    }
    const CubicSpline sp(xs, ys);
    EXPECT_DOUBLE_EQ(sp.xmin(), -2.0);
    EXPECT_DOUBLE_EQ(sp.xmax(), 2.0);
    for (double x : {-1.73, -0.4, 0.11, 1.9})
        EXPECT_NEAR(sp(x), std::sin(x), 1e-6);
}

TEST(MonotoneCubicTest, StaysWithinDataRange) {
    std::vector<double> xs{0.0, 1.0, 2.0, 3.0, 4.0};
    std::vector<double> ys{0.0, 0.0, 1.0, 1.0, 1.0};
    const MonotoneCubic mc(xs, ys);
    for (int i = 0; i <= 200; ++i) {
        const double x = 4.0 * i / 200.0;
        const double v = mc(x);
        EXPECT_GE(v, -1e-12);
        EXPECT_LE(v, 1.0 + 1e-12);
    }
    EXPECT_NEAR(mc(1.0), 0.0, 1e-14);
    EXPECT_NEAR(mc(3.5), 1.0, 1e-14);
}

TEST(Erfcx, MatchesDirectFormAtModerateArguments) {
    EXPECT_DOUBLE_EQ(erfcx(0.0), 1.0);
    EXPECT_NEAR(erfcx(1.0), 0.4275835761558070, 1e-14);
    for (double x : {0.1, 0.5, 1.0, 2.0})
        EXPECT_NEAR(erfcx(x), std::exp(x * x) * std::erfc(x), 1e-12);
}

TEST(Erfcx, FollowsAsymptoticTail) {
    const double x = 40.0;
    const double lead = 1.0 / (x * std::sqrt(kPi));
    EXPECT_NEAR(erfcx(x) / lead, 1.0, 1e-3);
    EXPECT_LT(erfcx(x), lead);
}

}  // namespace
