#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "ergobox/errors.hpp"
#include "ergobox/model.hpp"

namespace ergobox {

// Occupation-fraction kernel Phi(alpha, alpha', y): mean fraction of
// imaginary time a pinned Brownian bridge in a box of half-width l spends
// left of alpha'*l, given it touches the wall nearest to alpha*l.
// y = pi*lambda_D*sqrt(s)/(2l) is the reduced bridge width.

struct PhiPoint {
    double alpha;
    double alpha_p;
    double y;
};

struct PhiConfig {
    double y_star = 1.0;   // series for y >= y_star, image-sum form below
    double tol = 1e-14;    // series truncation target
    int max_terms = 512;
};

namespace detail {

inline void phi_validate(double alpha, double alpha_p, double y) {
    if (!(std::abs(alpha) < 1.0))
        throw std::invalid_argument("phi: |alpha| must be < 1");
    if (!(std::abs(alpha_p) <= 1.0))
        throw std::invalid_argument("phi: |alpha'| must be <= 1");
    if (!(y > 0.0)) throw std::invalid_argument("phi: y must be > 0");
}

// sin(n*theta) for n=1..nmax via the Chebyshev two-term recurrence; one
// sin/cos pair per theta instead of one sin per term.
struct SinRecurrence {
    double s_prev = 0.0, s_cur, two_cos;
    explicit SinRecurrence(double theta) : s_cur(std::sin(theta)), two_cos(2.0 * std::cos(theta)) {}
    double value() const { return s_cur; }
    void advance() {
        double nxt = two_cos * s_cur - s_prev;
        s_prev = s_cur;
        s_cur = nxt;
    }
};

}  // namespace detail

// Eigenfunction-series form, preferred for y >= 1.
inline void phi_series_row(double alpha, const double* alpha_p, double* out, int n, double y,
                           const PhiConfig& cfg = {}) {
    for (int j = 0; j < n; ++j) detail::phi_validate(alpha, alpha_p[j], y);
    const int nmax = std::min(static_cast<int>(9.0 / y) + 8, cfg.max_terms);
    const double q = std::exp(-0.5 * y * y);
    const double inv_y2 = 1.0 / (y * y);

    std::vector<double> es(nmax + 1), psal(nmax + 1);
    {
        detail::SinRecurrence pa(kPi * (alpha + 1.0) / 2.0);
        double e = q, step = q * q * q;
        for (int k = 1; k <= nmax; ++k) {
            es[k] = e;
            psal[k] = pa.value();
            pa.advance();
            e *= step;
            step *= q * q;
        }
    }
    double den = 0.0;
    for (int k = 1; k <= nmax; ++k) den += es[k] * k * psal[k];
    if (std::abs(den) < 1e-300)
        throw NumericError("phi_series: denominator underflow, regime unusable at this y");

    for (int j = 0; j < n; ++j) {
        const double ap = alpha_p[j];
        const double sgn = alpha > ap ? 1.0 : (alpha < ap ? -1.0 : 0.0);
        const double cA1 = 1.0 - alpha - 2.0 * ap;
        const double cA2 = 1.0 + alpha - 2.0 * ap - 2.0 * sgn;
        detail::SinRecurrence pp(kPi * (ap + 1.0) / 2.0);
        detail::SinRecurrence sA(kPi * (alpha + ap + 2.0) / 2.0);
        detail::SinRecurrence sB(kPi * (alpha - ap) / 2.0);
        double num = 0.0;
        for (int k = 1; k <= nmax; ++k) {
            const double An = (kPi / 8.0) * (cA1 * sA.value() + cA2 * sB.value());
            num += es[k] * pp.value() * (k * psal[k] * pp.value() + 2.0 * inv_y2 * An);
            if (es[k] * k * (1.0 + 2.0 * inv_y2) < cfg.tol) break;
            pp.advance();
            sA.advance();
            sB.advance();
        }
        out[j] = num / den;
    }
}

// Image-sum (Poisson-resummed) form, preferred for y < 1.
inline void phi_highT_row(double alpha, const double* alpha_p, double* out, int n, double y,
                          int mmax = 6) {
    for (int j = 0; j < n; ++j) detail::phi_validate(alpha, alpha_p[j], y);
    const double c = kPi * kPi / (y * y);
    const double al = alpha;

    double D = 1.0 + al, S1 = 0.0;
    std::vector<int> active;
    active.reserve(2 * mmax);
    for (int m = 1; m <= mmax; ++m) {
        for (int nn : {m, -m}) {
            double e1 = -c * nn * (1.0 + al + 2.0 * nn);
            if (e1 > -700.0) D += (1.0 + al + 4.0 * nn) * std::exp(e1);
            double e2 = -c * nn * (2.0 * nn - al - 1.0);
            if (e2 > -700.0) S1 += std::exp(e2);
            // Keep nn in the alpha'-loop only if its Gaussians can matter
            // anywhere on [-1,1]; both exponents are concave quadratics.
            auto qmax = [&](double p, double r) {
                double v = 0.5 * (p + r);
                double best = -1e30;
                for (double a : {-1.0, 1.0, std::clamp(v, -1.0, 1.0)})
                    best = std::max(best, -(c / 2.0) * (a - p) * (a - r));
                return best;
            };
            double mA = qmax(2.0 * nn - al, 1.0 + 2.0 * nn);
            double mB = qmax(al + 2.0 * nn, 2.0 * nn - 1.0);
            if (mA > -46.0 || mB > -46.0) active.push_back(nn);
        }
    }

    for (int j = 0; j < n; ++j) {
        const double ap = alpha_p[j];
        double SA = 0.0, SB = 0.0, SC = 0.0;
        for (int nn : active) {
            double exA = -(c / 2.0) * (ap + al - 2.0 * nn) * (ap - 1.0 - 2.0 * nn);
            double exB = -(c / 2.0) * (ap - al - 2.0 * nn) * (1.0 + ap - 2.0 * nn);
            if (exA > -46.0) SA += nn * std::exp(exA);
            if (exB > -46.0) {
                double eB = std::exp(exB);
                SB += nn * eB;
                SC += (1.0 - nn) * eB;
            }
        }
        if (ap < al) {
            out[j] = 0.5 + 0.5 * ((1.0 - al) + (1.0 - al) * S1) / D + (SA - SB) / D;
        } else {
            double ex0 = std::clamp(-(c / 2.0) * (ap - al) * (1.0 + ap), -700.0, 0.0);
            out[j] = 0.5 - 0.5 * ((1.0 + al) - 2.0 * std::exp(ex0) + (1.0 + al) * S1) / D +
                     (SA + SC) / D;
        }
    }
}

// Two-term low-temperature closed form, valid for large y. The self terms
// are written with cos*sin so the walls map to 0 without 0*inf artifacts.
inline double phi_lowT(double alpha, double alpha_p, double y) {
    detail::phi_validate(alpha, alpha_p, y);
    const double M = std::max(alpha, alpha_p), m = std::min(alpha, alpha_p);
    const double cc = std::cos(kPi * alpha_p / 2.0);
    const double c2 = cc * cc;
    const double t1 = (alpha_p - 1.0) * cc * std::sin(kPi * alpha_p / 2.0);
    const double t2 = (M - 1.0) * c2 * std::tan(kPi * M / 2.0);
    const double t3 = (1.0 + m) * c2 * std::tan(kPi * m / 2.0);
    return c2 + (kPi / (2.0 * y * y)) * (t1 + t2 + t3);
}

inline void phi_row(double alpha, const double* alpha_p, double* out, int n, double y,
                    const PhiConfig& cfg = {}) {
    if (y >= cfg.y_star)
        phi_series_row(alpha, alpha_p, out, n, y, cfg);
    else
        phi_highT_row(alpha, alpha_p, out, n, y);
}

inline double phi_series(double alpha, double alpha_p, double y, const PhiConfig& cfg = {}) {
    double out;
    phi_series_row(alpha, &alpha_p, &out, 1, y, cfg);
    return out;
}

inline double phi_highT(double alpha, double alpha_p, double y, int mmax = 6) {
    double out;
    phi_highT_row(alpha, &alpha_p, &out, 1, y, mmax);
    return out;
}

inline double phi(double alpha, double alpha_p, double y, const PhiConfig& cfg = {}) {
    double out;
    phi_row(alpha, &alpha_p, &out, 1, y, cfg);
    return out;
}

inline double phi(const PhiPoint& p, const PhiConfig& cfg = {}) {
    return phi(p.alpha, p.alpha_p, p.y, cfg);
}

}  // namespace ergobox
