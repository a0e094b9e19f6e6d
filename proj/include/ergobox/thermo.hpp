#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "ergobox/ergodic.hpp"
#include "ergobox/errors.hpp"
#include "ergobox/model.hpp"
#include "ergobox/quadrature.hpp"
#include "ergobox/reference.hpp"

namespace ergobox {

enum class Method { Ergodic, Spectral, Classical, WK, Semiclassical };

inline const char* method_name(Method m) {
    switch (m) {
        case Method::Ergodic: return "ergodic";
        case Method::Spectral: return "spectral";
        case Method::Classical: return "classical";
        case Method::WK: return "wk";
        case Method::Semiclassical: return "semiclassical";
    }
    return "unknown";
}

inline Method method_from_name(const std::string& name) {
    if (name == "ergodic") return Method::Ergodic;
    if (name == "spectral") return Method::Spectral;
    if (name == "classical") return Method::Classical;
    if (name == "wk") return Method::WK;
    if (name == "semiclassical") return Method::Semiclassical;
    throw std::invalid_argument("unknown method name: " + name);
}

// Domain and step controls for line integrals of diagonal densities.
struct CutoffPolicy {
    double x0 = 4.0;
    double grow = 1.4;
    int max_grow = 64;
    double tail_rel = 1e-8;
    double refine_rel = 1e-8;
    int base_side_points = 16;
    int max_side_points = 1 << 17;
    bool assume_even = false;
};

struct PartitionResult {
    double beta = 0.0;
    double z = 0.0;
    std::vector<double> grid;
    std::vector<double> rho;
};

namespace detail {

// Composite trapezoid on the symmetric grid x_j = -X + j h, j = 0..2m.
// With assume_even the density is sampled on x >= 0 only and mirrored.
struct TrapezoidPass {
    std::vector<double> half;  // values at 0, h, ..., X
    double z = 0.0;
};

inline TrapezoidPass trapezoid_even(const std::function<double(double)>& f,
                                    double X, int m) {
    TrapezoidPass p;
    p.half.resize(m + 1);
    const double h = X / m;
    for (int j = 0; j <= m; ++j) p.half[j] = f(j * h);
    double s = 0.0;
    for (int j = 1; j < m; ++j) s += p.half[j];
    p.z = h * (p.half[0] + 2.0 * s + p.half[m]);
    return p;
}

inline TrapezoidPass trapezoid_full(const std::function<double(double)>& f,
                                    double X, int m) {
    TrapezoidPass p;
    p.half.resize(2 * m + 1);
    const double h = X / m;
    for (int j = 0; j <= 2 * m; ++j) p.half[j] = f(-X + j * h);
    double s = 0.0;
    for (int j = 1; j < 2 * m; ++j) s += p.half[j];
    p.z = h * (0.5 * p.half[0] + s + 0.5 * p.half[2 * m]);
    return p;
}

}  // namespace detail

// Integrates a diagonal density over the line. The symmetric domain grows
// geometrically until the edge contribution is negligible relative to the
// running integral, then the step halves until the trapezoid value settles.
// A tail that refuses to decay is reported as divergence.
inline PartitionResult partition(double beta,
                                 const std::function<double(double)>& rho,
                                 const CutoffPolicy& pol = {}) {
    if (!(beta > 0.0)) throw std::invalid_argument("partition requires beta > 0");

    double X = pol.x0;
    double z_coarse = 0.0;
    bool settled = false;
    for (int it = 0; it < pol.max_grow; ++it) {
        const int m0 = pol.base_side_points;
        const double edge = pol.assume_even
                                ? rho(X)
                                : 0.5 * (rho(X) + rho(-X));
        detail::TrapezoidPass coarse =
            pol.assume_even ? detail::trapezoid_even(rho, X, m0)
                            : detail::trapezoid_full(rho, X, m0);
        z_coarse = coarse.z;
        if (edge < 0.0)
            throw NumericError("density provider returned a negative value");
        if (z_coarse > 0.0 && edge * X < pol.tail_rel * z_coarse) {
            settled = true;
            break;
        }
        X *= pol.grow;
    }
    if (!settled)
        throw NumericError(
            "density tail does not decay; the line integral diverges");

    // Step refinement on the settled domain. Evaluation happens on the half
    // axis when symmetry is declared; the reported grid is always the full
    // symmetric one.
    int m = pol.base_side_points;
    double z_prev = 0.0;
    std::vector<double> half;
    bool converged = false;
    while (m <= pol.max_side_points) {
        detail::TrapezoidPass pass =
            pol.assume_even ? detail::trapezoid_even(rho, X, m)
                            : detail::trapezoid_full(rho, X, m);
        const double z = pass.z;
        half = std::move(pass.half);
        if (z_prev != 0.0 && std::abs(z - z_prev) <= pol.refine_rel * std::abs(z)) {
            z_prev = z;
            converged = true;
            break;
        }
        z_prev = z;
        m *= 2;
    }
    if (!converged)
        throw NumericError("partition refinement did not settle within the "
                           "point budget");
    if (!(z_prev > 0.0))
        throw NumericError("partition integral is not positive");

    PartitionResult out;
    out.beta = beta;
    out.z = z_prev;
    if (pol.assume_even) {
        const int mm = static_cast<int>(half.size()) - 1;
        out.grid.resize(2 * mm + 1);
        out.rho.resize(2 * mm + 1);
        const double h = X / mm;
        for (int j = 0; j <= 2 * mm; ++j) {
            out.grid[j] = -X + j * h;
            out.rho[j] = half[static_cast<std::size_t>(std::abs(j - mm))];
        }
    } else {
        const int n = static_cast<int>(half.size());
        out.grid.resize(n);
        out.rho = std::move(half);
        const int mm = (n - 1) / 2;
        const double h = X / mm;
        for (int j = 0; j < n; ++j) out.grid[j] = -X + j * h;
    }
    return out;
}

struct EnergyEstimate {
    double u = 0.0;
    bool step_warning = false;
};

// Central log-derivative of the partition function. The warning trips when
// the measured difference is within an order of magnitude of the quadrature
// tolerance, i.e. when the finite-difference step is noise-limited.
inline EnergyEstimate internal_energy_lnz(
    double beta, const std::function<double(double)>& lnz, double delta = 1e-3,
    double quad_tol = 1e-8) {
    if (!(beta > 0.0) || !(delta > 0.0) || !(delta < 1.0))
        throw std::invalid_argument("internal_energy_lnz needs beta > 0 and "
                                    "delta in (0,1)");
    const double lp = lnz(beta * (1.0 + delta));
    const double lm = lnz(beta * (1.0 - delta));
    EnergyEstimate e;
    e.u = -(lp - lm) / (2.0 * beta * delta);
    e.step_warning = std::abs(lp - lm) < 10.0 * quad_tol;
    return e;
}

inline double partition_spectral_sum(double beta, const Spectrum& sp,
                                     double cert = 1e-14) {
    const int k = detail::certified_state_count(sp, beta, cert);
    double s = 0.0;
    for (int j = k - 1; j >= 0; --j)
        s += std::exp(-beta * (sp.energies[j] - sp.energies[0]));
    return s * std::exp(-beta * sp.energies[0]);
}

inline double internal_energy_spectral(double beta, const Spectrum& sp,
                                       double cert = 1e-14) {
    const int k = detail::certified_state_count(sp, beta, cert);
    double num = 0.0, den = 0.0;
    for (int j = k - 1; j >= 0; --j) {
        const double w = std::exp(-beta * (sp.energies[j] - sp.energies[0]));
        num += sp.energies[j] * w;
        den += w;
    }
    return num / den;
}

struct ThermoResult {
    double beta = 0.0;
    double z = 0.0;
    double u = 0.0;
    std::vector<double> grid;
    std::vector<double> psi;
    Method method = Method::Classical;
    std::vector<std::string> warnings;
};

struct MethodContext {
    const Potential* pot = nullptr;
    double mass = 1.0;
    double hbar = 1.0;
    const Spectrum* spectrum = nullptr;
    QuadratureSpec erg{};
    CutoffPolicy cutoff{};
    double diff_delta = 1e-3;
};

// Diagonal-density closure for one method at one temperature. The
// semiclassical form is undefined on the symmetry axis, so the provider
// substitutes a small even-extension offset there.
inline std::function<double(double)> density_provider(Method m, double beta,
                                                      const MethodContext& c) {
    if (c.pot == nullptr)
        throw std::invalid_argument("method context has no potential");
    const Potential* pot = c.pot;
    const ThermalState st(beta, c.mass, c.hbar);
    switch (m) {
        case Method::Ergodic: {
            const QuadratureSpec spec = c.erg;
            return [pot, st, spec](double x) {
                return rho_erg(x, st, *pot, spec);
            };
        }
        case Method::Spectral: {
            if (c.spectrum == nullptr)
                throw std::invalid_argument("spectral method needs a spectrum");
            const Spectrum* sp = c.spectrum;
            return [sp, beta](double x) { return rho_spectral(x, beta, *sp); };
        }
        case Method::Classical:
            return [pot, st](double x) { return rho_classical(x, st, *pot); };
        case Method::WK:
            return [pot, st](double x) { return rho_wk(x, st, *pot); };
        case Method::Semiclassical: {
            const double eps = 1e-4 * scales(*pot, c.mass, c.hbar).length;
            return [pot, st, eps](double x) {
                double ax = std::abs(x);
                if (ax < eps) ax = eps;
                return rho_semiclassical(ax, st, *pot);
            };
        }
    }
    throw std::invalid_argument("unknown method");
}

// Full single-temperature evaluation: partition integral, internal energy,
// and normalized spatial distribution. The distribution is normalized by the
// trapezoid value on its own grid, so its discrete norm is exactly one.
inline ThermoResult evaluate(Method m, double beta, const MethodContext& c) {
    ThermoResult r;
    r.beta = beta;
    r.method = m;
    auto prov = density_provider(m, beta, c);
    PartitionResult p = partition(beta, prov, c.cutoff);
    r.grid = std::move(p.grid);
    r.psi.resize(r.grid.size());
    for (std::size_t j = 0; j < r.grid.size(); ++j) r.psi[j] = p.rho[j] / p.z;

    if (m == Method::Spectral) {
        r.z = partition_spectral_sum(beta, *c.spectrum);
        r.u = internal_energy_spectral(beta, *c.spectrum);
    } else {
        r.z = p.z;
        MethodContext cc = c;
        auto lnz = [&](double b) {
            return std::log(partition(b, density_provider(m, b, cc), cc.cutoff).z);
        };
        EnergyEstimate est =
            internal_energy_lnz(beta, lnz, c.diff_delta, c.cutoff.refine_rel);
        r.u = est.u;
        if (est.step_warning)
            r.warnings.push_back(
                "internal energy differencing step is noise-limited; increase "
                "delta or tighten the quadrature");
    }
    return r;
}

struct ErrorMetrics {
    double rel_u = 0.0;
    double pdf_mse = 0.0;
    bool resampled = false;
};

// Relative internal-energy error and normalized mean-square distribution
// error against a reference result. Mismatched grids are bridged by cubic
// resampling of the reference onto the trial grid.
inline ErrorMetrics error_metrics(const ThermoResult& trial,
                                  const ThermoResult& ref) {
    ErrorMetrics e;
    e.rel_u = std::abs(trial.u - ref.u) / std::abs(ref.u);

    const bool same_grid = trial.grid == ref.grid;
    std::vector<double> ref_on_trial;
    e.resampled = !same_grid;
    if (same_grid) {
        ref_on_trial = ref.psi;
    } else {
        CubicSpline s(ref.grid, ref.psi);
        ref_on_trial.resize(trial.grid.size());
        for (std::size_t j = 0; j < trial.grid.size(); ++j) {
            const double x =
                std::clamp(trial.grid[j], s.xmin(), s.xmax());
            ref_on_trial[j] = s(x);
        }
    }
    double num = 0.0, den = 0.0;
    for (std::size_t j = 1; j < trial.grid.size(); ++j) {
        const double h = trial.grid[j] - trial.grid[j - 1];
        const double da = 0.5 * (trial.psi[j] - ref_on_trial[j] +
                                 trial.psi[j - 1] - ref_on_trial[j - 1]);
        const double dr = 0.5 * (ref_on_trial[j] + ref_on_trial[j - 1]);
        num += h * da * da;
        den += h * dr * dr;
    }
    e.pdf_mse = num / den;
    return e;
}

struct SweepOptions {
    double mass = 1.0;
    double hbar = 1.0;
    QuadratureSpec erg{};
    CutoffPolicy cutoff{};
    int spectral_side_points = 4096;
    int spectral_k0 = 16;
    double cert = 1e-14;
    double diff_delta = 1e-3;
    bool units_delta01 = true;
};

struct SweepRow {
    double t = 0.0;
    double beta = 0.0;
    Method method = Method::Classical;
    double u = 0.0;
    double rel_u = 0.0;
    double pdf_mse = 0.0;
};

struct SweepResult {
    double delta01 = 0.0;
    Spectrum spectrum;
    std::vector<SweepRow> rows;
};

namespace detail {

// Smallest |x| with V(x) >= level, bracketed geometrically then bisected.
// Used to size the spectral box for the hottest sweep point.
inline double potential_reach(const Potential& pot, double level) {
    const double wall = pot.wall();
    double hi = 1.0;
    for (int it = 0; it < 200; ++it) {
        if (hi >= wall) return wall;
        if (pot(hi) >= level) break;
        hi *= 1.3;
    }
    hi = std::min(hi, wall);
    double lo = 0.0;
    for (int it = 0; it < 120; ++it) {
        const double mid = 0.5 * (lo + hi);
        (pot(mid) >= level ? hi : lo) = mid;
    }
    return hi;
}

}  // namespace detail

// Temperature sweep in units of the spectral gap. The spectrum is solved once
// with enough certified states for the hottest point and reused throughout;
// every non-spectral method is scored against it.
inline SweepResult thermo_sweep(const Potential& pot,
                                const std::vector<Method>& methods, double tmin,
                                double tmax, int points,
                                const SweepOptions& opt = {}) {
    if (!(tmin > 0.0)) throw std::invalid_argument("tmin must be positive");
    if (tmax < tmin) throw std::invalid_argument("sweep bounds must be ordered");
    if (points < 1) throw std::invalid_argument("points must be positive");
    if (points > 1 && !(tmax > tmin))
        throw std::invalid_argument("a multi-point sweep needs tmax > tmin");

    SweepResult out;
    Spectrum probe = solve_spectrum_auto(pot, opt.spectral_side_points,
                                         opt.spectral_k0, opt.mass, opt.hbar);
    out.delta01 = probe.energies[1] - probe.energies[0];
    const double gap_scale = opt.units_delta01 ? out.delta01 : 1.0;
    const double beta_min = 1.0 / (tmax * gap_scale);
    const double need = -std::log(opt.cert) / beta_min;

    if (probe.energies.back() - probe.energies[0] >= need) {
        out.spectrum = std::move(probe);
    } else {
        const double top = probe.energies[0] + 1.2 * need + 5.0;
        const double reach = detail::potential_reach(pot, top);
        double L = std::min(1.3 * reach + 2.0, pot.wall());
        int k = opt.spectral_k0;
        bool done = false;
        while (k <= 4096 && !done) {
            Spectrum sp = solve_spectrum(pot, L, opt.spectral_side_points, k,
                                         opt.mass, opt.hbar);
            if (sp.energies.back() - sp.energies[0] >= need) {
                if (boundary_mass(sp, k - 1) > 1e-10 && L < pot.wall()) {
                    L = std::min(L * 1.4, pot.wall());
                    continue;
                }
                out.spectrum = std::move(sp);
                done = true;
            } else {
                k *= 2;
            }
        }
        if (!done)
            throw NumericError("could not certify enough states for the "
                               "hottest sweep point");
    }

    MethodContext ctx;
    ctx.pot = &pot;
    ctx.mass = opt.mass;
    ctx.hbar = opt.hbar;
    ctx.spectrum = &out.spectrum;
    ctx.erg = opt.erg;
    ctx.cutoff = opt.cutoff;
    ctx.diff_delta = opt.diff_delta;

    for (int j = 0; j < points; ++j) {
        const double t =
            (points == 1)
                ? tmin
                : tmin * std::pow(tmax / tmin,
                                  static_cast<double>(j) / (points - 1));
        const double beta = 1.0 / (t * gap_scale);
        ThermoResult ref = evaluate(Method::Spectral, beta, ctx);
        for (Method m : methods) {
            SweepRow row;
            row.t = 1.0 / (beta * out.delta01);
            row.beta = beta;
            row.method = m;
            if (m == Method::Spectral) {
                row.u = ref.u;
                row.rel_u = 0.0;
                row.pdf_mse = 0.0;
            } else {
                ThermoResult res = evaluate(m, beta, ctx);
                ErrorMetrics em = error_metrics(res, ref);
                row.u = res.u;
                row.rel_u = em.rel_u;
                row.pdf_mse = em.pdf_mse;
            }
            out.rows.push_back(row);
        }
    }
    return out;
}

}  // namespace ergobox
