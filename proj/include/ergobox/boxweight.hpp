#pragma once

#include <cmath>
#include <stdexcept>

#include "ergobox/model.hpp"
#include "ergobox/occupancy.hpp"

namespace ergobox {

// Weight density g^-(alpha; y_s, y_{1-s}) for a thermal loop that is pinned
// at reduced position alpha and touches the box wall at -l (g^+ mirrors it,
// touching +l). Built from the one-wall sum Sg evaluated at the two reduced
// bridge widths y_s and y_{1-s}.

enum class WallSide { Minus, Plus };

inline double bridge_y(double lambda, double l, double s) {
    return kPi * lambda * std::sqrt(s) / (2.0 * l);
}

namespace detail {

inline void sg_validate(double alpha, double y) {
    if (!(std::abs(alpha) <= 1.0)) throw std::invalid_argument("sg_sum: |alpha| must be <= 1");
    if (!(y >= 0.0)) throw std::invalid_argument("sg_sum: y must be >= 0");
}

}  // namespace detail

// Eigenfunction series, preferred for y >= 1. The plus wall alternates signs.
inline double sg_series(double alpha, double y, WallSide side) {
    detail::sg_validate(alpha, y);
    if (y < 1e-8) return 0.0;
    const int nmax = static_cast<int>(9.0 / y) + 8;
    const double q = std::exp(-0.5 * y * y);
    detail::SinRecurrence ps(kPi * (alpha + 1.0) / 2.0);
    double es = q, step = q * q * q, sum = 0.0, sgnf = 1.0;
    const double flip = side == WallSide::Plus ? -1.0 : 1.0;
    for (int k = 1; k <= nmax; ++k) {
        sum += k * sgnf * ps.value() * es;
        ps.advance();
        es *= step;
        step *= q * q;
        sgnf *= flip;
    }
    return sum;
}

// Image (Poisson-resummed) form, preferred for y < 1.
inline double sg_images(double alpha, double y, WallSide side) {
    detail::sg_validate(alpha, y);
    if (y < 1e-8) return 0.0;
    const double c = kPi * kPi / (8.0 * y * y);
    const double pref = std::pow(kPi / (2.0 * y * y), 1.5);
    double sum = 0.0;
    for (int m = -6; m <= 6; ++m) {
        const double qv = side == WallSide::Plus ? 1.0 - alpha - 4.0 * m : 1.0 + alpha - 4.0 * m;
        const double e = -c * qv * qv;
        if (e > -740.0) sum += qv * std::exp(e);
    }
    return pref * sum;
}

inline double sg_sum(double alpha, double y, WallSide side) {
    return y >= 1.0 ? sg_series(alpha, y, side) : sg_images(alpha, y, side);
}

inline double g_minus(double alpha, double lambda, double l, double s) {
    if (!(lambda > 0.0 && l > 0.0) || !(s >= 0.0 && s <= 1.0))
        throw std::invalid_argument("g_minus: need lambda,l > 0 and s in [0,1]");
    const double ys = bridge_y(lambda, l, s);
    const double y1 = bridge_y(lambda, l, 1.0 - s);
    const double l2 = l * l;
    return std::sqrt(2.0 * kPi) * (kPi * kPi * lambda * lambda * lambda / (8.0 * l2 * l2)) *
           sg_sum(alpha, ys, WallSide::Minus) * sg_sum(alpha, y1, WallSide::Minus);
}

inline double g_plus(double alpha, double lambda, double l, double s) {
    return g_minus(-alpha, lambda, l, s);
}

// Deep-quantum envelope (lambda >> l): lowest mode only; s drops out.
inline double g_lowT(double alpha, double lambda, double l) {
    const double cs = std::cos(kPi * alpha / 2.0);
    const double l2 = l * l;
    return std::sqrt(2.0 * kPi) * (kPi * kPi * lambda * lambda * lambda / (8.0 * l2 * l2)) *
           cs * cs * std::exp(-kPi * kPi * lambda * lambda / (8.0 * l2));
}

// Classical envelope (lambda << l): nearest image of the minus wall only.
inline double g_highT(double alpha, double lambda, double l, double s) {
    const double u = s * (1.0 - s);
    const double op = 1.0 + alpha;
    const double e = -l * l * op * op / (2.0 * lambda * lambda * u);
    if (e < -740.0) return 0.0;
    return std::sqrt(2.0 / kPi) * (l * l / (lambda * lambda * lambda)) * op * op *
           std::exp(e) / (u * std::sqrt(u));
}

}  // namespace ergobox
