#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "ergobox/boxweight.hpp"
#include "ergobox/errors.hpp"
#include "ergobox/model.hpp"
#include "ergobox/occupancy.hpp"
#include "ergobox/quadrature.hpp"

namespace ergobox {

// rho_erg(x, beta): diagonal density matrix in the ergodic box
// approximation,
//   rho = int_|x|^inf dl int_0^1 ds (1/sqrt(2pi) lambda)
//         [ g^-(x/l) e^{-beta W(x/l)} + g^-(-x/l) e^{-beta W(-x/l)} ],
//   W(a) = int_-1^1 da' [ s Phi(a,a',y_s) + (1-s) Phi(a,a',y_{1-s}) ] V(a' l).

struct QuadratureSpec {
    int s_nodes = 64;          // tanh-sinh points on s in (0,1), n+1 nodes
    int l_panel_nodes = 16;    // Gauss-Legendre points per l panel of width lambda_D/2
    double l_tail = 1e-9;      // stop extending l when a panel falls below this fraction
    int alpha_nodes = 96;      // Gauss-Legendre points per alpha' side panel
    double exp_clamp = -700.0; // floor on Boltzmann exponents
    int max_panels = 256;
};

// A potential as the integrator sees it: a callable plus the two global
// facts a closure cannot carry.
struct PotentialView {
    std::function<double(double)> V;
    double wall = std::numeric_limits<double>::infinity();
    double vmin = 0.0;
    bool const_inside_wall = false;  // V == vmin wherever it is finite
};

inline PotentialView view(const Potential& p) {
    PotentialView pv;
    pv.V = [&p](double z) { return p(z); };
    pv.wall = p.wall();
    pv.vmin = p.min_value();
    pv.const_inside_wall = p.kind() == PotentialKind::InfiniteWell;
    return pv;
}

// W(alpha; l, s): mean potential energy along loops confined to (-l, l),
// pinned at alpha*l, that touch the wall at -l.
inline double inner_exponent(double alpha, double l, double s, double lambda,
                             const std::function<double(double)>& V, int alpha_nodes = 96,
                             const PhiConfig& cfg = {}) {
    if (!(std::abs(alpha) < 1.0)) throw std::invalid_argument("inner_exponent: |alpha| < 1");
    const double ys = bridge_y(lambda, l, s);
    const double y1 = bridge_y(lambda, l, 1.0 - s);
    std::vector<double> rs(alpha_nodes), r1(alpha_nodes);
    double out = 0.0;
    const double edges[2][2] = {{-1.0, alpha}, {alpha, 1.0}};
    for (const auto& e : edges) {
        if (e[1] - e[0] < 1e-14) continue;
        auto nodes = gauss_legendre_ab(alpha_nodes, e[0], e[1]);
        std::vector<double> xs(alpha_nodes);
        for (int j = 0; j < alpha_nodes; ++j) xs[j] = nodes[j].x;
        phi_row(alpha, xs.data(), rs.data(), alpha_nodes, ys, cfg);
        phi_row(alpha, xs.data(), r1.data(), alpha_nodes, y1, cfg);
        for (int j = 0; j < alpha_nodes; ++j)
            out += nodes[j].w * (s * rs[j] + (1.0 - s) * r1[j]) * V(xs[j] * l);
    }
    return out;
}

namespace detail {

// Contribution of one l value: the full s integral at fixed box size.
class ErgodicRow {
  public:
    ErgodicRow(double x, double l, double beta, double lambda, const PotentialView& pv,
               const QuadratureSpec& q)
        : x_(x), l_(l), beta_(beta), lambda_(lambda), pv_(&pv), q_(&q) {
        al_ = x / l;
        const int na = q.alpha_nodes;
        const double edges[2][2] = {{-1.0, al_}, {al_, 1.0}};
        for (const auto& e : edges) {
            if (e[1] - e[0] < 1e-14) continue;
            for (const auto& nd : gauss_legendre_ab(na, e[0], e[1])) {
                ap_.push_back(nd.x);
                nap_.push_back(-nd.x);
                wv_.push_back(nd.w * pv.V(nd.x * l));
            }
        }
        rs_.resize(ap_.size());
        r1_.resize(ap_.size());
    }

    double s_integral(const std::vector<QuadNode>& snodes) {
        double acc = 0.0;
        for (const auto& sn : snodes) {
            const double s = sn.x;
            const double gp = g_minus(al_, lambda_, l_, s);
            const double gm = g_minus(-al_, lambda_, l_, s);
            double val = 0.0;
            if (gp > 0.0) val += gp * boltzmann(weight(al_, ap_, s));
            if (gm > 0.0) val += gm * boltzmann(weight(-al_, nap_, s));
            acc += sn.w * val;
        }
        return acc;
    }

  private:
    double weight(double alpha, const std::vector<double>& nodes, double s) {
        if (pv_->const_inside_wall) return pv_->vmin;
        const int n = static_cast<int>(nodes.size());
        const double ys = bridge_y(lambda_, l_, s);
        const double y1 = bridge_y(lambda_, l_, 1.0 - s);
        phi_row(alpha, nodes.data(), rs_.data(), n, ys);
        phi_row(alpha, nodes.data(), r1_.data(), n, y1);
        double w = 0.0;
        for (int j = 0; j < n; ++j) w += (s * rs_[j] + (1.0 - s) * r1_[j]) * wv_[j];
        return w;
    }

    double boltzmann(double w) const {
        const double e = std::max(-beta_ * (w - pv_->vmin), q_->exp_clamp);
        return std::exp(e);
    }

    double x_, l_, beta_, lambda_, al_;
    const PotentialView* pv_;
    const QuadratureSpec* q_;
    std::vector<double> ap_, nap_, wv_, rs_, r1_;
};

}  // namespace detail

inline double log_rho_erg(double x, const ThermalState& st, const PotentialView& pv,
                          const QuadratureSpec& q = {}) {
    const double lam = st.lambda_D();
    const double ax = std::abs(x);
    if (ax >= pv.wall) return -std::numeric_limits<double>::infinity();

    // Window from the classical envelope: mass beyond |x| + d is bounded by
    // exp(-2 (d/lambda)^2) relative to the total, then verified panel-wise.
    const double dref = std::sqrt(std::max(0.5 * std::log(0.25 / q.l_tail), 4.5)) + 0.25;
    const double l_free = std::min(ax + dref * lam, pv.wall);
    const double h = 0.5 * lam;

    const auto snodes = tanh_sinh_01(q.s_nodes);
    double log_total = -std::numeric_limits<double>::infinity();
    double pa = ax;
    int panels = 0;
    while (panels < q.max_panels) {
        double pb = std::min(pa + h, pv.wall);
        if (pb - pa < 1e-15 * std::max(1.0, pv.wall == std::numeric_limits<double>::infinity()
                                                ? pa
                                                : pv.wall))
            break;
        double panel = 0.0;
        for (const auto& ln : gauss_legendre_ab(q.l_panel_nodes, pa, pb)) {
            detail::ErgodicRow row(x, ln.x, st.beta, lam, pv, q);
            panel += ln.w * row.s_integral(snodes);
        }
        ++panels;
        if (panel > 0.0) {
            const double lp = std::log(panel);
            if (log_total == -std::numeric_limits<double>::infinity())
                log_total = lp;
            else if (lp > log_total)
                log_total = lp + std::log1p(std::exp(log_total - lp));
            else
                log_total += std::log1p(std::exp(lp - log_total));
            if (pb >= l_free && lp < log_total + std::log(q.l_tail)) break;
        } else if (pb >= l_free) {
            break;
        }
        if (pb >= pv.wall) break;
        pa = pb;
    }
    return log_total - st.beta * pv.vmin - std::log(std::sqrt(2.0 * kPi) * lam);
}

inline double log_rho_erg(double x, const ThermalState& st, const Potential& V,
                          const QuadratureSpec& q = {}) {
    return log_rho_erg(x, st, view(V), q);
}

inline double rho_erg(double x, const ThermalState& st, const PotentialView& pv,
                      const QuadratureSpec& q = {}) {
    return std::exp(log_rho_erg(x, st, pv, q));
}

inline double rho_erg(double x, const ThermalState& st, const Potential& V,
                      const QuadratureSpec& q = {}) {
    return std::exp(log_rho_erg(x, st, view(V), q));
}

struct DensityCurve {
    std::vector<double> x;
    std::vector<double> rho;
    std::string method = "ergodic";
    double beta = 0.0;
    std::string potential;
};

inline DensityCurve rho_erg_curve(const std::vector<double>& xs, const ThermalState& st,
                                  const Potential& V, const QuadratureSpec& q = {}) {
    if (xs.empty()) throw std::invalid_argument("density curve needs at least one x");
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (!(xs[i] > xs[i - 1]))
            throw std::invalid_argument("density curve grid must be strictly increasing");

    DensityCurve c;
    c.x = xs;
    c.beta = st.beta;
    c.method = "ergodic";
    switch (V.kind()) {
        case PotentialKind::Harmonic: c.potential = "harmonic"; break;
        case PotentialKind::PowerLaw: c.potential = "power"; break;
        case PotentialKind::InfiniteWell: c.potential = "well"; break;
        case PotentialKind::Tabulated: c.potential = "tabulated"; break;
    }
    const PotentialView pv = view(V);
    c.rho.reserve(xs.size());
    for (double x : xs) c.rho.push_back(rho_erg(x, st, pv, q));
    return c;
}

}  // namespace ergobox
