#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ergobox/boxweight.hpp"
#include "ergobox/quadrature.hpp"

namespace {

using namespace ergobox;

TEST(Sg, SeriesAndImagesAgreeAcrossDispatch) {
    EXPECT_LT(std::abs(sg_series(0.5, 1.0, WallSide::Minus) -
                       sg_images(0.5, 1.0, WallSide::Minus)),
              1e-12);
    double worst = 0.0;
    for (int i = 0; i < 15; ++i) {
        const double alpha = -1.0 + 2.0 * i / 14.0;
        for (double y : {0.8, 0.9, 1.0, 1.1, 1.2}) {
            for (WallSide side : {WallSide::Minus, WallSide::Plus}) {
                const double d = std::abs(sg_series(alpha, y, side) - sg_images(alpha, y, side));
                if (d > worst) worst = d;
            }
        }
    }
    EXPECT_LT(worst, 1e-10);
}

TEST(Sg, LargeYSingleModeValue) {
    EXPECT_NEAR(sg_sum(0.0, 3.0, WallSide::Minus) / std::exp(-4.5), 1.0, 1e-12);
}

TEST(Sg, VanishesOnItsWall) {
    for (double y : {0.4, 1.0, 2.5}) {
        EXPECT_EQ(sg_sum(-1.0, y, WallSide::Minus), 0.0);
        EXPECT_EQ(sg_sum(1.0, y, WallSide::Plus), 0.0);
    }
}

TEST(BoxWeight, MirrorIdentityIsExact) {
    for (double alpha : {-0.8, -0.3, 0.0, 0.55, 0.97}) {
        for (double s : {0.2, 0.5, 0.83}) {
            EXPECT_EQ(g_plus(alpha, 1.3, 2.0, s), g_minus(-alpha, 1.3, 2.0, s));
        }
    }
}

TEST(BoxWeight, SymmetricInBridgeFraction) {
    for (double alpha : {-0.5, 0.1, 0.8}) {
        for (double s : {0.1, 0.33, 0.45}) {
            EXPECT_EQ(g_minus(alpha, 0.9, 1.7, s), g_minus(alpha, 0.9, 1.7, 1.0 - s));
        }
    }
}

TEST(BoxWeight, FreeLineNormalization) {
    const double lam = 1.0;
    for (double x : {0.0, 0.5, 2.0}) {
        const double lmax = 8.0 * lam + std::abs(x);
        const double lmin = std::max(std::abs(x), 1e-12);
        double total = 0.0;
        const double panel = (lmax - lmin) / 200.0;
        const auto& snodes = tanh_sinh_01(80);
        for (int p = 0; p < 200; ++p) {
            const double a = lmin + p * panel;
            for (const auto& ln : gauss_legendre_ab(12, a, a + panel)) {
                const double alpha = x / ln.x;
                double sint = 0.0;
                for (const auto& sn : snodes)
                    sint += sn.w * (g_minus(alpha, lam, ln.x, sn.x) +
                                    g_minus(-alpha, lam, ln.x, sn.x));
                total += ln.w * sint;
            }
        }
        total /= std::sqrt(2.0 * kPi) * lam;
        EXPECT_NEAR(total, 1.0, 1e-6) << "x=" << x;
    }
}

TEST(BoxWeight, AsymptoticFormsMatchFullSum) {
    const double l = 1.0, s = 0.5;
    for (double alpha : {0.0, 0.3}) {
        EXPECT_NEAR(g_lowT(alpha, 10.0, l) / g_minus(alpha, 10.0, l, s), 1.0, 1e-12);
        EXPECT_NEAR(g_highT(alpha, 0.1, l, s) / g_minus(alpha, 0.1, l, s), 1.0, 1e-12);
    }
    EXPECT_EQ(g_highT(-1.0, 0.1, l, s), 0.0);
}

TEST(BoxWeight, LowTFormDropsTheBridgeFraction) {
    const double a = g_lowT(0.2, 5.0, 1.0);
    EXPECT_GT(a, 0.0);
    EXPECT_NEAR(g_minus(0.2, 5.0, 1.0, 0.3) / g_minus(0.2, 5.0, 1.0, 0.7), 1.0, 1e-12);
}

TEST(BoxWeight, PositiveOnRandomPoints) {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> ua(-1.0, 1.0), ul(0.05, 5.0), us(0.01, 0.99);
    for (int i = 0; i < 10000; ++i) {
        const double v = g_minus(ua(gen), ul(gen), 1.0, us(gen));
        EXPECT_GE(v, 0.0);
    }
}

TEST(BoxWeight, BridgeFractionWavelength) {
    for (double s : {0.04, 0.5, 0.96})
        EXPECT_DOUBLE_EQ(bridge_y(1.2, 2.0, s), kPi * 1.2 * std::sqrt(s) / 4.0);
}

}  // namespace
