#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ergobox/occupancy.hpp"
#include "ergobox/quadrature.hpp"

namespace {

using namespace ergobox;

TEST(Phi, FrozenReferenceValues) {
    EXPECT_NEAR(phi(-0.5, 0.25, 1.5) / 2.36166769423797385e-01, 1.0, 1e-12);
    EXPECT_NEAR(phi(0.3, -0.8, 0.6) / 7.56638846536712428e-01, 1.0, 1e-12);
    EXPECT_NEAR(phi(0.9, 0.95, 2.5) / 2.27436162116839737e-02, 1.0, 1e-12);
    EXPECT_NEAR(phi(0.7, 0.1, 3.0) / 8.80678213099541751e-01, 1.0, 1e-12);
    EXPECT_NEAR(phi(0.0, 0.99, 3.0) / 1.91897936567561063e-04, 1.0, 1e-10);
}

TEST(Phi, ClosedPointsAreExact) {
    EXPECT_NEAR(phi(0.0, 0.0, 1.0), 1.0, 1e-13);
    EXPECT_NEAR(phi(-0.2, -0.2, 0.4), 1.25, 1e-13);
}

TEST(Phi, NormalizationOverTheBox) {
    for (double alpha : {-0.9, -0.5, 0.0, 0.5, 0.9}) {
        for (double y : {0.3, 1.0, 3.0}) {
            double total = 0.0;
            for (const auto& nd : gauss_legendre_ab(96, -1.0, alpha))
                total += nd.w * phi(alpha, nd.x, y);
            for (const auto& nd : gauss_legendre_ab(96, alpha, 1.0))
                total += nd.w * phi(alpha, nd.x, y);
            EXPECT_NEAR(total, 1.0, 1e-10) << "alpha=" << alpha << " y=" << y;
        }
    }
}

TEST(Phi, SeriesAndImageRepresentationsAgree) {
    double worst = 0.0;
    for (int i = 0; i < 12; ++i) {
        const double alpha = -0.95 + 1.9 * i / 11.0;
        for (int j = 0; j < 12; ++j) {
            const double ap = -1.0 + 2.0 * j / 11.0;
            for (double y : {0.8, 0.9, 1.0, 1.1, 1.2}) {
                const double d = std::abs(phi_series(alpha, ap, y) - phi_highT(alpha, ap, y));
                if (d > worst) worst = d;
            }
        }
    }
    EXPECT_LT(worst, 1e-10);
}

TEST(Phi, DispatchSeamIsTiny) {
    for (double alpha : {-0.6, 0.0, 0.4}) {
        for (double ap : {-0.7, 0.2, 0.9}) {
            EXPECT_LT(std::abs(phi_series(alpha, ap, 1.0) - phi_highT(alpha, ap, 1.0)), 1e-9);
            EXPECT_LT(std::abs(phi(alpha, ap, 1.0 + 1e-6) - phi(alpha, ap, 1.0 - 1e-6)), 2e-8);
        }
    }
}

TEST(Phi, SingleModeFormAtLargeY) {
    EXPECT_NEAR(phi_lowT(0.0, 0.0, 2.0), 1.0, 1e-15);
    EXPECT_LT(phi_lowT(0.3, 1.0, 2.0), 1e-15);
    EXPECT_LT(phi_lowT(0.3, -1.0, 2.0), 1e-15);

    double worst2 = 0.0, worst3 = 0.0;
    for (int i = 0; i < 15; ++i) {
        const double alpha = -0.99 + 1.98 * i / 14.0;
        for (int j = 0; j < 15; ++j) {
            const double ap = -1.0 + 2.0 * j / 14.0;
            worst2 = std::max(worst2, std::abs(phi_lowT(alpha, ap, 2.0) - phi(alpha, ap, 2.0)));
            worst3 = std::max(worst3, std::abs(phi_lowT(alpha, ap, 3.0) - phi(alpha, ap, 3.0)));
        }
    }
    EXPECT_LT(worst2, 1e-2);
    EXPECT_LT(worst3, 1e-4);
}

TEST(Phi, HighTConcentratesBetweenPinAndWall) {
    EXPECT_NEAR(phi_highT(0.0, -0.5, 0.01), 1.0, 1e-12);
    EXPECT_NEAR(phi_highT(0.0, 0.5, 0.01), 0.0, 1e-12);
}

TEST(Phi, NotMirrorSymmetric) {
    EXPECT_GT(std::abs(phi(0.3, -0.8, 0.6) - phi(-0.3, 0.8, 0.6)), 1e-3);
}

TEST(Phi, NonNegativeOnRandomPoints) {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> ua(-0.999, 0.999), up(-1.0, 1.0),
        uy(0.02, 4.0);
    for (int i = 0; i < 10000; ++i) {
        const double v = phi(ua(gen), up(gen), uy(gen));
        EXPECT_GE(v, -1e-12);
    }
}

TEST(Phi, ValidationRejectsBadArguments) {
    EXPECT_THROW(phi_validate(1.0, 0.0, 1.0), std::invalid_argument);
    EXPECT_THROW(phi_validate(-1.0, 0.0, 1.0), std::invalid_argument);
    EXPECT_THROW(phi_validate(0.0, 1.5, 1.0), std::invalid_argument);
    EXPECT_THROW(phi_validate(0.0, 0.0, 0.0), std::invalid_argument);
    EXPECT_THROW(phi_validate(0.0, 0.0, -1.0), std::invalid_argument);
    EXPECT_NO_THROW(phi_validate(0.0, 1.0, 1.0));
    EXPECT_NO_THROW(phi_validate(0.0, -1.0, 1.0));
}

TEST(Phi, PointOverloadMatchesScalars) {
    const PhiPoint p{0.25, -0.4, 1.7};
    EXPECT_EQ(phi(p), phi(0.25, -0.4, 1.7));
}

}  // namespace
