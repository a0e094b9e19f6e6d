#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "ergobox/model.hpp"

namespace {

using namespace ergobox;

TEST(Potential, HarmonicValuesAndDerivatives) {
    const Potential p = Potential::harmonic(2.0, 3.0);
    EXPECT_EQ(p.kind(), PotentialKind::Harmonic);
    EXPECT_DOUBLE_EQ(p(0.5), 0.5 * 3.0 * 4.0 * 0.25);
    EXPECT_DOUBLE_EQ(p.deriv(0.5), 3.0 * 4.0 * 0.5);
    EXPECT_DOUBLE_EQ(p.deriv2(0.5), 12.0);
    EXPECT_DOUBLE_EQ(p.min_value(), 0.0);
    EXPECT_TRUE(p.finite_everywhere());
    EXPECT_TRUE(std::isinf(p.wall()));
    EXPECT_DOUBLE_EQ(p.omega(), 2.0);
    EXPECT_DOUBLE_EQ(p.harmonic_mass(), 3.0);
}

TEST(Potential, HarmonicRejectsBadParameters) {
    EXPECT_THROW(Potential::harmonic(0.0), std::invalid_argument);
    EXPECT_THROW(Potential::harmonic(-1.0), std::invalid_argument);
    EXPECT_THROW(Potential::harmonic(1.0, 0.0), std::invalid_argument);
}

TEST(Potential, PowerLawConventions) {
    const Potential over = Potential::power_law(4, 2.0, true);
    const Potential plain = Potential::power_law(4, 2.0, false);
    EXPECT_DOUBLE_EQ(over(1.5), 2.0 * std::pow(1.5, 4) / 4.0);
    EXPECT_DOUBLE_EQ(plain(1.5), 2.0 * std::pow(1.5, 4));
    EXPECT_EQ(over.power(), 4);
    EXPECT_DOUBLE_EQ(over.coefficient(), 2.0);
    EXPECT_TRUE(over.over_n());
    EXPECT_FALSE(plain.over_n());
}

TEST(Potential, PowerLawRejectsOddOrSmallExponent) {
    EXPECT_THROW(Potential::power_law(3, 1.0, true), std::invalid_argument);
    EXPECT_THROW(Potential::power_law(0, 1.0, true), std::invalid_argument);
    EXPECT_THROW(Potential::power_law(-2, 1.0, true), std::invalid_argument);
    EXPECT_THROW(Potential::power_law(2, 0.0, true), std::invalid_argument);
    EXPECT_THROW(Potential::power_law(2, -1.0, true), std::invalid_argument);
}

TEST(Potential, PowerLawDerivativeIsOdd) {
    const Potential p = Potential::power_law(6, 0.7, true);
    for (double z : {0.3, 1.1, 2.4}) {
        EXPECT_DOUBLE_EQ(p.deriv(-z), -p.deriv(z));
        EXPECT_DOUBLE_EQ(p.deriv2(-z), p.deriv2(z));
    }
    EXPECT_DOUBLE_EQ(p.deriv(0.0), 0.0);
}

TEST(Potential, QuadraticPowerLawMatchesHarmonic) {
    const double a = 1.3;
    const Potential p = Potential::power_law(2, a, false);
    const Potential h = Potential::harmonic(std::sqrt(2.0 * a), 1.0);
    for (double z : {0.0, 0.4, 1.7, 3.2}) EXPECT_NEAR(p(z), h(z), 1e-14);
}

TEST(Potential, InfiniteWellShape) {
    const Potential w = Potential::infinite_well(1.5, 0.7);
    EXPECT_EQ(w.kind(), PotentialKind::InfiniteWell);
    EXPECT_DOUBLE_EQ(w(0.0), -0.7);
    EXPECT_DOUBLE_EQ(w(1.49), -0.7);
    EXPECT_TRUE(std::isinf(w(1.51)));
    EXPECT_DOUBLE_EQ(w.wall(), 1.5);
    EXPECT_DOUBLE_EQ(w.min_value(), -0.7);
    EXPECT_DOUBLE_EQ(w.depth(), 0.7);
    EXPECT_FALSE(w.finite_everywhere());
    EXPECT_THROW(Potential::infinite_well(0.0, 0.0), std::invalid_argument);
}

TEST(Potential, EvaluationIsEvenBitExact) {
    const std::vector<Potential> pots{
        Potential::harmonic(1.3), Potential::power_law(6, 0.9, true),
        Potential::infinite_well(2.0, 0.4)};
    for (const auto& p : pots)
        for (double z : {0.1, 0.77, 1.9})
            EXPECT_EQ(p(z), p(-z));
}

TEST(Potential, TabulatedInterpolatesAndGuards) {
    std::vector<double> zs, vs;
    for (int i = 0; i <= 40; ++i) {
        const double z = 4.0 * i / 40.0;
        zs.push_back(z);
        vs.push_back(0.5 * z * z);
    }
    const Potential t = Potential::tabulated(zs, vs);
    EXPECT_EQ(t.kind(), PotentialKind::Tabulated);
    for (double z : {0.15, 1.3, 3.7}) {
        EXPECT_NEAR(t(z), 0.5 * z * z, 1e-6);
        EXPECT_EQ(t(z), t(-z));
    }
    EXPECT_THROW(t(4.2), NumericError);
    EXPECT_THROW(t(-4.2), NumericError);
    EXPECT_THROW(Potential::tabulated({0.0, 1.0, 2.0}, {0.0, 1.0, 4.0}),
                 std::invalid_argument);
}

TEST(ThermalState, ValidatesAndScales) {
    EXPECT_THROW(ThermalState(0.0), std::invalid_argument);
    EXPECT_THROW(ThermalState(-1.0), std::invalid_argument);
    EXPECT_THROW(ThermalState(1.0, 0.0), std::invalid_argument);
    EXPECT_THROW(ThermalState(1.0, 1.0, 0.0), std::invalid_argument);

    const ThermalState st(2.5, 3.0, 0.5);
    EXPECT_DOUBLE_EQ(st.beta, 2.5);
    EXPECT_DOUBLE_EQ(st.lambda_D(), std::sqrt(2.5 * 0.25 / 3.0));
    EXPECT_DOUBLE_EQ(ThermalState(4.0 * 2.5, 3.0, 0.5).lambda_D(),
                     2.0 * st.lambda_D());
}

TEST(Scales, HarmonicOscillatorUnits) {
    const ProblemScales s = scales(Potential::harmonic(2.0, 3.0), 3.0, 0.5);
    EXPECT_NEAR(s.length, std::sqrt(0.5 / (3.0 * 2.0)), 1e-15);
    EXPECT_NEAR(s.energy, 0.5 * 2.0, 1e-15);
}

TEST(Scales, PowerLawUnits) {
    const ProblemScales s1 = scales(Potential::power_law(2, 1.0, false));
    EXPECT_NEAR(s1.length, 1.0, 1e-14);
    EXPECT_NEAR(s1.energy, 1.0, 1e-14);

    const ProblemScales s2 = scales(Potential::power_law(4, 2.0, false));
    EXPECT_NEAR(s2.length, std::pow(2.0, -1.0 / 6.0), 1e-14);
}

TEST(Scales, PowerLawLengthIdentity) {
    for (int n : {2, 4, 6, 8, 10}) {
        for (double a : {0.5, 1.0, 2.0}) {
            const ProblemScales s = scales(Potential::power_law(n, a, false), 2.0, 3.0);
            EXPECT_NEAR(a * std::pow(s.length, n + 2) * 2.0 / 9.0, 1.0, 1e-12)
                << "n=" << n << " a=" << a;
        }
    }
}

TEST(Scales, WellUnitsAndTabulatedRejected) {
    const ProblemScales s = scales(Potential::infinite_well(2.0, 0.0));
    EXPECT_NEAR(s.length, 2.0, 1e-15);
    EXPECT_NEAR(s.energy, kPi * kPi / (8.0 * 4.0), 1e-14);

    std::vector<double> zs{0.0, 1.0, 2.0, 3.0, 4.0};
    std::vector<double> vs{0.0, 0.5, 2.0, 4.5, 8.0};
    EXPECT_THROW(scales(Potential::tabulated(zs, vs)), NumericError);
}

}  // namespace
