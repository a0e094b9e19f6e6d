#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ergobox/errors.hpp"
#include "ergobox/quadrature.hpp"

namespace ergobox {

inline constexpr double kPi = 3.14159265358979323846;

enum class PotentialKind { Harmonic, PowerLaw, InfiniteWell, Tabulated };

namespace detail {

inline double ipow(double base, int n) {
    double r = 1.0, b = base;
    for (int k = n; k > 0; k >>= 1) {
        if (k & 1) r *= b;
        b *= b;
    }
    return r;
}

}  // namespace detail

// Symmetric confining potential V(z)=V(-z). Evaluation takes |z| first, so
// the mirror symmetry holds bit-exactly.
class Potential {
  public:
    static Potential harmonic(double omega, double mass = 1.0) {
        if (omega <= 0.0 || mass <= 0.0)
            throw std::invalid_argument("harmonic: omega and mass must be positive");
        Potential p;
        p.kind_ = PotentialKind::Harmonic;
        p.omega_ = omega;
        p.mass_ = mass;
        return p;
    }

    // V(z) = a_n |z|^n / n by default; with over_n=false, V(z) = a_n |z|^n.
    static Potential power_law(int n, double a_n, bool over_n = true) {
        if (n < 2 || n % 2 != 0) throw std::invalid_argument("power_law: n must be even and >= 2");
        if (a_n <= 0.0) throw std::invalid_argument("power_law: a_n must be positive");
        Potential p;
        p.kind_ = PotentialKind::PowerLaw;
        p.n_ = n;
        p.a_n_ = a_n;
        p.over_n_ = over_n;
        return p;
    }

    // V(z) = -depth for |z| < half_width, +infinity outside.
    static Potential infinite_well(double half_width, double depth = 0.0) {
        if (half_width <= 0.0) throw std::invalid_argument("infinite_well: half_width must be positive");
        if (depth < 0.0) throw std::invalid_argument("infinite_well: depth must be >= 0");
        Potential p;
        p.kind_ = PotentialKind::InfiniteWell;
        p.wall_ = half_width;
        p.depth_ = depth;
        return p;
    }

    // Samples of V on an ascending grid starting at z=0; interpolated with a
    // monotone cubic in |z|. Queries beyond the grid throw.
    static Potential tabulated(std::vector<double> zs, std::vector<double> vs) {
        if (zs.size() != vs.size() || zs.size() < 4)
            throw std::invalid_argument("tabulated: need >= 4 matching samples");
        if (zs.front() != 0.0) throw std::invalid_argument("tabulated: grid must start at z=0");
        for (size_t i = 1; i < zs.size(); ++i)
            if (zs[i] <= zs[i - 1]) throw std::invalid_argument("tabulated: grid must be ascending");
        Potential p;
        p.kind_ = PotentialKind::Tabulated;
        p.min_value_ = *std::min_element(vs.begin(), vs.end());
        p.spline_ = MonotoneCubic(std::move(zs), std::move(vs));
        return p;
    }

    double operator()(double z) const {
        const double az = std::abs(z);
        switch (kind_) {
            case PotentialKind::Harmonic:
                return 0.5 * mass_ * omega_ * omega_ * az * az;
            case PotentialKind::PowerLaw: {
                double v = a_n_ * detail::ipow(az, n_);
                return over_n_ ? v / n_ : v;
            }
            case PotentialKind::InfiniteWell:
                return az < wall_ ? -depth_ : std::numeric_limits<double>::infinity();
            case PotentialKind::Tabulated:
                if (az > spline_.xmax())
                    throw NumericError("tabulated potential queried beyond its grid");
                return spline_(az);
        }
        return 0.0;
    }

    double deriv(double z) const {
        const double az = std::abs(z);
        const double sgn = z < 0.0 ? -1.0 : 1.0;
        switch (kind_) {
            case PotentialKind::Harmonic:
                return mass_ * omega_ * omega_ * z;
            case PotentialKind::PowerLaw: {
                double d = a_n_ * n_ * detail::ipow(az, n_ - 1);
                return sgn * (over_n_ ? d / n_ : d);
            }
            case PotentialKind::InfiniteWell:
                if (az >= wall_) throw NumericError("derivative at infinite wall");
                return 0.0;
            case PotentialKind::Tabulated:
                if (az > spline_.xmax())
                    throw NumericError("tabulated potential queried beyond its grid");
                return sgn * spline_.deriv(az);
        }
        return 0.0;
    }

    double deriv2(double z) const {
        const double az = std::abs(z);
        switch (kind_) {
            case PotentialKind::Harmonic:
                return mass_ * omega_ * omega_;
            case PotentialKind::PowerLaw: {
                double d = a_n_ * n_ * (n_ - 1) * detail::ipow(az, n_ - 2);
                return over_n_ ? d / n_ : d;
            }
            case PotentialKind::InfiniteWell:
                if (az >= wall_) throw NumericError("second derivative at infinite wall");
                return 0.0;
            case PotentialKind::Tabulated:
                if (az > spline_.xmax())
                    throw NumericError("tabulated potential queried beyond its grid");
                return spline_.deriv2(az);
        }
        return 0.0;
    }

    PotentialKind kind() const { return kind_; }
    bool finite_everywhere() const { return kind_ != PotentialKind::InfiniteWell; }

    // Hard-wall position; +infinity when the potential has no wall.
    double wall() const {
        return kind_ == PotentialKind::InfiniteWell ? wall_
                                                    : std::numeric_limits<double>::infinity();
    }

    // Global minimum of V, used in integration cutoff bounds.
    double min_value() const {
        switch (kind_) {
            case PotentialKind::Harmonic:
            case PotentialKind::PowerLaw:
                return 0.0;
            case PotentialKind::InfiniteWell:
                return -depth_;
            case PotentialKind::Tabulated:
                return min_value_;
        }
        return 0.0;
    }

    double omega() const { return omega_; }
    double harmonic_mass() const { return mass_; }
    int power() const { return n_; }
    double coefficient() const { return a_n_; }
    bool over_n() const { return over_n_; }
    double depth() const { return depth_; }

  private:
    Potential() = default;

    PotentialKind kind_ = PotentialKind::Harmonic;
    double omega_ = 1.0;
    double mass_ = 1.0;
    int n_ = 2;
    double a_n_ = 1.0;
    bool over_n_ = true;
    double wall_ = 1.0;
    double depth_ = 0.0;
    double min_value_ = 0.0;
    MonotoneCubic spline_;
};

// Inverse temperature plus particle constants; lambda_D is the thermal
// de Broglie length that controls every quantum correction in the library.
struct ThermalState {
    double beta;
    double mass;
    double hbar;

    ThermalState(double beta_, double mass_ = 1.0, double hbar_ = 1.0)
        : beta(beta_), mass(mass_), hbar(hbar_) {
        if (beta <= 0.0 || mass <= 0.0 || hbar <= 0.0)
            throw std::invalid_argument("ThermalState: beta, mass, hbar must be positive");
    }

    double lambda_D() const { return std::sqrt(beta * hbar * hbar / mass); }
};

// Characteristic length and energy of a potential, used to express results
// in reduced units.
struct ProblemScales {
    double length;
    double energy;
};

inline ProblemScales scales(const Potential& pot, double mass = 1.0, double hbar = 1.0) {
    switch (pot.kind()) {
        case PotentialKind::Harmonic: {
            double w = pot.omega();
            return {std::sqrt(hbar / (mass * w)), hbar * w};
        }
        case PotentialKind::PowerLaw: {
            int n = pot.power();
            double a = pot.coefficient();
            double lp = std::pow(hbar * hbar / (mass * a), 1.0 / (n + 2));
            return {lp, a * detail::ipow(lp, n)};
        }
        case PotentialKind::InfiniteWell: {
            double lp = pot.wall();
            return {lp, kPi * kPi * hbar * hbar / (8.0 * mass * lp * lp)};
        }
        case PotentialKind::Tabulated:
            throw NumericError("scales: no closed-form scales for tabulated potentials");
    }
    return {1.0, 1.0};
}

}  // namespace ergobox
