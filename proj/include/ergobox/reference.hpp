#pragma once

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "ergobox/errors.hpp"
#include "ergobox/model.hpp"
#include "ergobox/quadrature.hpp"

namespace ergobox {

// Independent density-matrix engines used to validate the ergodic
// approximation: exact diagonalization, classical, Wigner-Kirkwood,
// Trotter transfer-matrix, and the semiclassical bounce formula.

struct Spectrum {
    std::vector<double> energies;             // ascending
    std::vector<std::vector<double>> states;  // states[k][i], sum phi^2 h = 1
    std::vector<double> grid;                 // interior nodes
    double half_width = 0.0;                  // hard wall at +-L
    double step = 0.0;
    std::vector<CubicSpline> interp;          // off-grid evaluation, 0 at +-L
};

namespace detail {

struct FdSolution {
    std::vector<double> grid;
    std::vector<double> energies;
    std::vector<std::vector<double>> states;  // unit Euclidean norm
    double h;
};

inline FdSolution fd_eigen(const Potential& pot, double L, int N, int k_count, double mass,
                           double hbar) {
    const double h = 2.0 * L / (N + 1);
    const double t = hbar * hbar / (2.0 * mass * h * h);
    std::vector<double> x(N), d(N), e(N - 1, -t);
    for (int i = 0; i < N; ++i) {
        x[i] = -L + h * (i + 1);
        d[i] = 2.0 * t + pot(x[i]);
    }
    std::vector<double> w(N), z(static_cast<size_t>(N) * k_count);
    std::vector<lapack_int> isuppz(2 * k_count);
    lapack_int m = 0;
    lapack_int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'I', N, d.data(), e.data(), 0.0, 0.0,
                                     1, k_count, 0.0, &m, w.data(), z.data(), N, isuppz.data());
    if (info != 0 || m < k_count) throw NumericError("solve_spectrum: eigensolver failed");
    FdSolution out;
    out.grid = std::move(x);
    out.h = h;
    out.energies.assign(w.begin(), w.begin() + k_count);
    out.states.resize(k_count);
    for (int k = 0; k < k_count; ++k)
        out.states[k].assign(z.begin() + static_cast<size_t>(k) * N,
                             z.begin() + static_cast<size_t>(k + 1) * N);
    return out;
}

}  // namespace detail

// Probability mass the state carries in the outer grid cells; the
// certificate that the hard wall at +-L does not bias the spectrum.
inline double boundary_mass(const Spectrum& sp, int k) {
    const auto& st = sp.states.at(k);
    const int n = static_cast<int>(st.size());
    double m = 0.0;
    for (int i : {0, 1, 2, 3, n - 4, n - 3, n - 2, n - 1}) m += st[i] * st[i] * sp.step;
    return m;
}

// Three-point finite differences on [-L, L] with hard walls, refined by
// Richardson extrapolation over N and N/2 (values and spline-resampled
// vectors), then re-orthonormalized. Plain second-order differences alone
// miss the stated tolerances by two orders of magnitude.
inline Spectrum solve_spectrum(const Potential& pot, double L, int N, int k_max = 16,
                               double mass = 1.0, double hbar = 1.0) {
    if (N < 512) throw std::invalid_argument("solve_spectrum: N must be >= 512");
    if (!(L > 0.0)) throw std::invalid_argument("solve_spectrum: L must be > 0");
    L = std::min(L, pot.wall());
    // odd N makes the half-resolution grid nest exactly (h_coarse = 2h)
    const int Nf = N % 2 == 0 ? N - 1 : N;
    const int kc = k_max + 1;

    auto fine = detail::fd_eigen(pot, L, Nf, kc, mass, hbar);
    auto coarse = detail::fd_eigen(pot, L, (Nf - 1) / 2, kc, mass, hbar);

    Spectrum sp;
    sp.half_width = L;
    sp.step = fine.h;
    sp.grid = fine.grid;
    sp.energies.resize(kc);
    for (int k = 0; k < kc; ++k)
        sp.energies[k] = (4.0 * fine.energies[k] - coarse.energies[k]) / 3.0;

    // resample coarse states on the fine grid and combine
    std::vector<double> cx(coarse.grid.size() + 2), cy(coarse.grid.size() + 2);
    cx.front() = -L;
    cx.back() = L;
    std::copy(coarse.grid.begin(), coarse.grid.end(), cx.begin() + 1);
    sp.states.resize(kc);
    const double ch = coarse.h;
    for (int k = 0; k < kc; ++k) {
        // align the coarse state's sign with the fine one before mixing
        double dot = 0.0;
        for (size_t i = 0; i < coarse.grid.size(); ++i)
            dot += coarse.states[k][i] * fine.states[k][2 * i + 1];
        const double csign = dot < 0.0 ? -1.0 : 1.0;
        cy.front() = cy.back() = 0.0;
        for (size_t i = 0; i < coarse.grid.size(); ++i)
            cy[i + 1] = csign * coarse.states[k][i] / std::sqrt(ch);
        CubicSpline cs(cx, cy);
        auto& v = sp.states[k];
        v.resize(fine.grid.size());
        for (size_t i = 0; i < fine.grid.size(); ++i) {
            const double f = fine.states[k][i] / std::sqrt(fine.h);
            v[i] = (4.0 * f - cs(fine.grid[i])) / 3.0;
        }
    }

    // modified Gram-Schmidt in the discrete L2 inner product
    for (int k = 0; k < kc; ++k) {
        auto& v = sp.states[k];
        for (int j = 0; j < k; ++j) {
            const auto& u = sp.states[j];
            double pr = 0.0;
            for (size_t i = 0; i < v.size(); ++i) pr += v[i] * u[i];
            pr *= sp.step;
            for (size_t i = 0; i < v.size(); ++i) v[i] -= pr * u[i];
        }
        double nrm = 0.0;
        for (double vi : v) nrm += vi * vi;
        nrm = std::sqrt(nrm * sp.step);
        for (double& vi : v) vi /= nrm;
    }

    // sign convention: phi_k(0+) > 0 for even k, phi_k'(0) > 0 for odd k
    const int ir = static_cast<int>(std::upper_bound(sp.grid.begin(), sp.grid.end(), 0.0) -
                                    sp.grid.begin());
    for (int k = 0; k < kc; ++k) {
        auto& v = sp.states[k];
        const double ref = k % 2 == 0 ? v[ir] : v[ir] - v[ir - 1];
        if (ref < 0.0)
            for (double& vi : v) vi = -vi;
    }

    std::vector<double> ix(sp.grid.size() + 2), iy(sp.grid.size() + 2);
    ix.front() = -L;
    ix.back() = L;
    std::copy(sp.grid.begin(), sp.grid.end(), ix.begin() + 1);
    for (int k = 0; k < kc; ++k) {
        iy.front() = iy.back() = 0.0;
        std::copy(sp.states[k].begin(), sp.states[k].end(), iy.begin() + 1);
        sp.interp.emplace_back(ix, iy);
    }
    return sp;
}

// Auto-domain variant: grows L until the highest requested state's
// boundary mass certifies below 1e-10.
inline Spectrum solve_spectrum_auto(const Potential& pot, int N, int k_max = 16, double mass = 1.0,
                                    double hbar = 1.0, double L0 = 4.0) {
    double L = std::min(L0, pot.wall());
    for (int it = 0; it < 24; ++it) {
        Spectrum sp = solve_spectrum(pot, L, N, k_max, mass, hbar);
        if (boundary_mass(sp, k_max) < 1e-10 || L >= pot.wall()) return sp;
        L *= 1.4;
    }
    throw NumericError("solve_spectrum_auto: domain did not certify");
}

inline void require_contained(const Spectrum& sp) {
    if (boundary_mass(sp, 0) > 1e-8)
        throw NumericError("solve_spectrum: domain too small (ground-state mass at boundary)");
}

namespace detail {

// Number of states needed so the first omitted Boltzmann weight, relative to
// the ground state, falls below cert. Refuses rather than truncate blindly.
inline int certified_state_count(const Spectrum& sp, double beta, double cert = 1e-14) {
    const int kc = static_cast<int>(sp.energies.size());
    for (int k = 1; k < kc; ++k)
        if (std::exp(-beta * (sp.energies[k] - sp.energies[0])) < cert) return k + 1;
    throw NumericError("spectral truncation not certified, spectrum too short for this beta");
}

}  // namespace detail

inline double rho_spectral(double x, double beta, const Spectrum& sp, int K = -1) {
    const int kc = static_cast<int>(sp.energies.size());
    if (K < 0) K = detail::certified_state_count(sp, beta) - 1;
    if (K >= kc) throw std::invalid_argument("rho_spectral: K exceeds available states");
    if (std::abs(x) >= sp.half_width) return 0.0;
    double r = 0.0;
    for (int k = 0; k <= K; ++k) {
        const double p = sp.interp[k](x);
        r += p * p * std::exp(-beta * sp.energies[k]);
    }
    return r;
}

inline double rho_classical(double x, const ThermalState& st, const Potential& pot) {
    const double v = pot(x);
    if (std::isinf(v)) return 0.0;
    return std::exp(-st.beta * v) / (std::sqrt(2.0 * kPi) * st.lambda_D());
}

inline double rho_wk(double x, const ThermalState& st, const Potential& pot) {
    const double b = st.beta, h2 = st.hbar * st.hbar;
    const double bracket = 1.0 - b * b * h2 * pot.deriv2(x) / (12.0 * st.mass) +
                           b * b * b * h2 * pot.deriv(x) * pot.deriv(x) / (24.0 * st.mass);
    return rho_classical(x, st, pot) * bracket;
}

struct TrotterGrid {
    double zmin;
    double zmax;
    int points;
};

// (N+1)-fold convolution of the short-time mid-point kernel, evaluated as a
// deterministic transfer matrix on a uniform grid.
inline double rho_trotter(double x, const ThermalState& st, const Potential& pot, int slices,
                          const TrotterGrid& grid) {
    if (slices < 0 || grid.points < 8)
        throw std::invalid_argument("rho_trotter: need slices >= 0 and a usable grid");
    const int G = grid.points;
    const double h = (grid.zmax - grid.zmin) / (G - 1);
    const double lam = st.lambda_D();
    const double np1 = slices + 1.0;
    if (lam / std::sqrt(np1) < 3.0 * h)
        throw NumericError("rho_trotter: kernel narrower than 3 grid steps, refine the grid");
    if (!(x >= grid.zmin && x <= grid.zmax))
        throw std::invalid_argument("rho_trotter: x outside the grid");

    std::vector<double> z(G);
    for (int i = 0; i < G; ++i) z[i] = grid.zmin + i * h;
    const int i0 =
        static_cast<int>(std::min<double>(G - 1.0, std::max(0.0, std::round((x - grid.zmin) / h))));

    const double pref = h * std::sqrt(np1) / (std::sqrt(2.0 * kPi) * lam);
    std::vector<double> M(static_cast<size_t>(G) * G);
    for (int i = 0; i < G; ++i) {
        for (int j = 0; j < G; ++j) {
            const double dz = z[i] - z[j];
            const double vm = pot(0.5 * (z[i] + z[j]));
            const double ex = -np1 * dz * dz / (2.0 * lam * lam) - st.beta * vm / np1;
            M[static_cast<size_t>(i) * G + j] = ex > -740.0 ? pref * std::exp(ex) : 0.0;
        }
    }
    std::vector<double> v(G, 0.0), u(G);
    v[i0] = 1.0;
    for (int a = 0; a <= slices; ++a) {
        for (int i = 0; i < G; ++i) {
            const double* row = &M[static_cast<size_t>(i) * G];
            double acc = 0.0;
            for (int j = 0; j < G; ++j) acc += row[j] * v[j];
            u[i] = acc;
        }
        std::swap(u, v);
    }
    return v[i0] / h;
}

inline double rho_harmonic_exact(double x, const ThermalState& st, double omega) {
    const double bw = st.beta * st.hbar * omega;
    const double mw = st.mass * omega / st.hbar;
    return std::sqrt(mw / (2.0 * kPi * std::sinh(bw))) *
           std::exp(-mw * std::tanh(0.5 * bw) * x * x);
}

// Bounce-time integrals I_n(y) and F_n(y). The u = 1 + w^2 substitution
// absorbs the inverse-square-root endpoint; the far tail uses the binomial
// series of (1 - u^-n)^{-1/2} integrated term by term.
inline double dashen_In(int n, double y) {
    if (y <= 1.0) return 0.0;
    const double us = std::min(y, 10.0);
    double r = 0.0;
    for (const auto& nd : gauss_legendre_ab(96, 0.0, std::sqrt(us - 1.0))) {
        const double w = nd.x;
        r += nd.w * 2.0 * w / std::sqrt(detail::ipow(1.0 + w * w, n) - 1.0);
    }
    if (y > us) {
        double ck = 1.0;
        for (int k = 0; k <= 8; ++k) {
            const double p = 1.0 - 0.5 * n - n * k;
            r += p == 0.0 ? ck * std::log(y / us) : ck * (std::pow(y, p) - std::pow(us, p)) / p;
            ck *= (k + 0.5) / (k + 1.0);
        }
    }
    return r;
}

inline double dashen_Fn(int n, double y) {
    if (y <= 1.0) return 0.0;
    const double us = std::min(y, 10.0);
    double r = 0.0;
    for (const auto& nd : gauss_legendre_ab(96, 0.0, std::sqrt(us - 1.0))) {
        const double w = nd.x;
        const double un = detail::ipow(1.0 + w * w, n);
        r += nd.w * 2.0 * w * un / std::sqrt(un - 1.0);
    }
    if (y > us) {
        double ck = 1.0;
        for (int k = 0; k <= 8; ++k) {
            const double p = 1.0 + 0.5 * n - n * k;
            r += p == 0.0 ? ck * std::log(y / us) : ck * (std::pow(y, p) - std::pow(us, p)) / p;
            ck *= (k + 0.5) / (k + 1.0);
        }
    }
    return std::pow(y, -0.5 * (n + 2)) * r;
}

inline double dashen_In_limit(int n) { return dashen_In(n, 1e9); }
inline double dashen_Fn_limit(int n) { return 2.0 / (n + 2.0); }

// Dashen bounce density. PowerLaw n > 2 solves the imaginary-time
// constraint for the turning point z0 by bisection; the harmonic member of
// the family is summed exactly in closed form.
inline double rho_semiclassical(double x, const ThermalState& st, const Potential& pot,
                                bool lowT_forms = false) {
    if (pot.kind() == PotentialKind::Harmonic)
        return rho_harmonic_exact(x, st, pot.omega());
    if (pot.kind() != PotentialKind::PowerLaw)
        throw std::invalid_argument("rho_semiclassical: PowerLaw or Harmonic only");
    if (x == 0.0) throw std::invalid_argument("rho_semiclassical: x must be nonzero");

    const int n = pot.power();
    const double an = pot.over_n() ? pot.coefficient() / pot.power() : pot.coefficient();
    if (n == 2) {
        const double w = std::sqrt(2.0 * an / st.mass);
        return rho_harmonic_exact(x, st, w);
    }
    const double hbar = st.hbar, m = st.mass;
    const double lp = std::pow(hbar * hbar / (m * an), 1.0 / (n + 2));
    const double ep = an * detail::ipow(lp, n);
    const double lam = hbar * std::sqrt(st.beta / m);
    const double X = std::abs(x);
    const double lhs = std::sqrt(2.0 * st.beta * ep);

    auto In = [&](double y) { return lowT_forms ? dashen_In_limit(n) : dashen_In(n, y); };
    auto Fn = [&](double y) { return lowT_forms ? dashen_Fn_limit(n) : dashen_Fn(n, y); };
    auto cons = [&](double z0) {
        return (z0 / lam) * std::pow(lp / z0, 0.5 * n) * 2.0 * In(X / z0) - lhs;
    };
    double a = 1e-12 * X, b = X * (1.0 - 1e-15);
    if (cons(b) < 0.0)
        throw NumericError("rho_semiclassical: no turning point brackets at this (x, beta)");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        (cons(mid) > 0.0 ? a : b) = mid;
        if (b - a < 1e-14 * X) break;
    }
    const double z0 = 0.5 * (a + b);
    const double yr = X / z0;
    const double S = st.beta * ep * std::pow(z0 / lp, n) *
                     (-1.0 + 2.0 * std::sqrt(2.0 / (st.beta * ep)) * (z0 / lam) *
                                 std::pow(lp / z0, 0.5 * n) * std::pow(yr, 0.5 * (n + 2)) * Fn(yr));
    const double r = std::pow(yr, n) - 1.0;
    const double dP = (n / (2.0 * X)) * std::sqrt(2.0 * m * ep) * std::pow(z0 / lp, 0.5 * n) /
                      (2.0 * std::sqrt(r) + (n - 2.0) * (z0 / X) * In(yr) * r);
    return std::exp(-S) * std::sqrt(dP) / std::sqrt(2.0 * kPi * hbar);
}

}  // namespace ergobox
