#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "ergobox/errors.hpp"
#include "ergobox/model.hpp"
#include "ergobox/occupancy.hpp"

namespace ergobox {

// One Brownian bridge realization on the uniform grid u_i = i/M.
// The path is z(u) = x_i (1-u) + x_f u + lambda * xi(u) where xi is a
// standard bridge pinned to zero at both ends.
struct BridgeSample {
    std::vector<double> z;
    double x_i = 0.0;
    double x_f = 0.0;
    double lambda = 1.0;
    double ell = std::numeric_limits<double>::infinity();
    bool accepted = true;

    int steps() const { return static_cast<int>(z.size()) - 1; }
    double u(int i) const { return static_cast<double>(i) / steps(); }
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Layered rejection tables for the standard normal. 256 equal-area layers;
// the fast path consumes one 64-bit word and touches one table row.
struct NormalTables {
    double x[257];
    double f[257];
    double r[256];

    NormalTables() {
        const double tail = 3.6541528853610088;
        const double area = 4.92867323399e-3;
        x[1] = tail;
        x[0] = area / std::exp(-0.5 * tail * tail);
        for (int i = 2; i < 256; ++i) {
            const double fi =
                area / x[i - 1] + std::exp(-0.5 * x[i - 1] * x[i - 1]);
            x[i] = std::sqrt(-2.0 * std::log(fi));
        }
        x[256] = 0.0;
        for (int i = 0; i <= 256; ++i) f[i] = std::exp(-0.5 * x[i] * x[i]);
        for (int i = 0; i < 256; ++i) r[i] = x[i + 1] / x[i];
    }
};

inline const NormalTables& normal_tables() {
    static const NormalTables t;
    return t;
}

}  // namespace detail

// Deterministic normal/uniform stream: xoshiro256++ words feeding a layered
// rejection sampler for normals. One stream per worker thread keeps batches
// reproducible under a fixed seed regardless of scheduling.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed) : tab_(&detail::normal_tables()) {
        std::uint64_t x = seed;
        for (int i = 0; i < 4; ++i) {
            x = detail::splitmix64(x);
            s_[i] = x;
        }
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
    }

    double uniform() { return to_unit(next()); }

    double normal() {
        const detail::NormalTables& t = *tab_;
        for (;;) {
            const std::uint64_t v = next();
            const int i = static_cast<int>(v & 255);
            const double u =
                2.0 * (static_cast<double>(v >> 11) * 0x1.0p-53) - 1.0;
            if (std::abs(u) < t.r[i]) return u * t.x[i];
            if (i == 0) return tail(u < 0.0);
            const double z = u * t.x[i];
            if (t.f[i + 1] + uniform() * (t.f[i] - t.f[i + 1]) <
                std::exp(-0.5 * z * z))
                return z;
        }
    }

  private:
    static double to_unit(std::uint64_t x) {
        return static_cast<double>(x >> 11) * 0x1.0p-53;
    }

    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    double tail(bool negative) {
        const double tl = detail::normal_tables().x[1];
        double a, b;
        do {
            a = -std::log(1.0 - uniform()) / tl;
            b = -std::log(1.0 - uniform());
        } while (2.0 * b < a * a);
        return negative ? -(tl + a) : tl + a;
    }

    std::uint64_t s_[4];
    const detail::NormalTables* tab_;
};

namespace detail {

inline std::uint64_t thread_seed(std::uint64_t seed, unsigned k) {
    return splitmix64(seed ^ (0xA24BAED4963EE407ULL * (k + 1)));
}

inline void check_bridge_args(double lambda, int M) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("bridge sampling requires lambda > 0");
    if (M < 64)
        throw std::invalid_argument("bridge sampling requires at least 64 steps");
}

}  // namespace detail

// Draws one free bridge; the conditional mean/variance recursion reproduces
// the exact finite-dimensional law, so covariance checks hold to sampling
// error only.
inline BridgeSample sample_bridge(double x_i, double x_f, double lambda, int M,
                                  RandomStream& rng) {
    detail::check_bridge_args(lambda, M);
    if (!std::isfinite(x_i) || !std::isfinite(x_f))
        throw std::invalid_argument("bridge endpoints must be finite");

    BridgeSample s;
    s.x_i = x_i;
    s.x_f = x_f;
    s.lambda = lambda;
    s.z.resize(M + 1);
    s.z[0] = x_i;
    double xi = 0.0;
    const double inv_m = 1.0 / M;
    for (int i = 1; i < M; ++i) {
        const double u_prev = (i - 1) * inv_m;
        const double u_cur = i * inv_m;
        const double rem_prev = 1.0 - u_prev;
        const double rem_cur = 1.0 - u_cur;
        const double ratio = rem_cur / rem_prev;
        const double sd = std::sqrt(inv_m * ratio);
        xi = xi * ratio + sd * rng.normal();
        s.z[i] = x_i * rem_cur + x_f * u_cur + lambda * xi;
    }
    s.z[M] = x_f;
    return s;
}

inline BridgeSample sample_bridge(double x_i, double x_f, double lambda, int M,
                                  std::uint64_t seed) {
    RandomStream rng(seed);
    return sample_bridge(x_i, x_f, lambda, M, rng);
}

struct ConstrainedEnsemble {
    std::vector<BridgeSample> samples;
    double x_i = 0.0;
    double x_f = 0.0;
    double lambda = 1.0;
    double ell = 1.0;
    std::uint64_t attempts = 0;
    double acceptance = 0.0;
};

namespace detail {

struct BridgeStepTables {
    std::vector<double> ratio;
    std::vector<double> sd;
    std::vector<double> drift;
};

inline BridgeStepTables bridge_step_tables(double x_i, double x_f, int M) {
    BridgeStepTables t;
    t.ratio.resize(M);
    t.sd.resize(M);
    t.drift.resize(M);
    const double inv_m = 1.0 / M;
    for (int i = 1; i < M; ++i) {
        const double u_prev = (i - 1) * inv_m;
        const double u_cur = i * inv_m;
        const double rem_prev = 1.0 - u_prev;
        const double rem_cur = 1.0 - u_cur;
        t.ratio[i] = rem_cur / rem_prev;
        t.sd[i] = std::sqrt(inv_m * t.ratio[i]);
        t.drift[i] = x_i * rem_cur + x_f * u_cur;
    }
    return t;
}

// Rejection sampling of bridges confined to |z| < ell. Node values follow the
// exact bridge law; between nodes the path is killed with the first-passage
// probability exp(-2 d d' / (lambda^2 du)) per wall, so accepted paths carry
// the continuous-time conditioned law at the nodes. The two-wall product form
// drops image terms of order exp(-2 ell^2 M / lambda^2), far below sampling
// resolution for M >= 64 and the lambda/ell range the sampler accepts.
// Generation runs from the endpoint nearest a wall, where doomed attempts die
// within a step or two; the bridge law is reversible, so the stored path is
// flipped back when needed.
inline void sample_constrained_worker(double x_i0, double x_f0, double lambda,
                                      double ell, int M, int quota,
                                      std::uint64_t seed,
                                      ConstrainedEnsemble& out) {
    RandomStream rng(seed);
    const bool flip = std::min(x_f0 + ell, ell - x_f0) <
                      std::min(x_i0 + ell, ell - x_i0);
    const double a0 = flip ? x_f0 : x_i0;
    const double a1 = flip ? x_i0 : x_f0;
    const BridgeStepTables tab = bridge_step_tables(a0, a1, M);
    const double kfac = 2.0 * M / (lambda * lambda);
    // Kill factors below exp(-23) are unresolvable at any feasible sample
    // count; skipping them avoids the exp on segments far from the walls.
    const double win = 23.0 / kfac;
    const double dm_f = a1 + ell;
    const double dp_f = ell - a1;

    std::vector<double> z(M + 1);
    out.samples.reserve(out.samples.size() + quota);
    std::uint64_t attempts = 0;
    int accepted = 0;

    while (accepted < quota) {
        ++attempts;
        if (attempts % 20000 == 0 &&
            (accepted + 1.0) / static_cast<double>(attempts) < 1e-4) {
            out.attempts += attempts;
            throw InfeasibleError(
                "bridge acceptance fell below 1e-4; reduce lambda/ell or move "
                "the endpoints away from the walls");
        }

        z[0] = a0;
        double xi = 0.0;
        double dm_prev = a0 + ell;
        double dp_prev = ell - a0;
        bool alive = true;
        for (int i = 1; i < M; ++i) {
            xi = xi * tab.ratio[i] + tab.sd[i] * rng.normal();
            const double zi = tab.drift[i] + lambda * xi;
            const double dm = zi + ell;
            const double dp = ell - zi;
            if (dm <= 0.0 || dp <= 0.0) {
                alive = false;
                break;
            }
            const double pm = dm_prev * dm;
            if (pm < win && rng.uniform() < std::exp(-kfac * pm)) {
                alive = false;
                break;
            }
            const double pp = dp_prev * dp;
            if (pp < win && rng.uniform() < std::exp(-kfac * pp)) {
                alive = false;
                break;
            }
            z[i] = zi;
            dm_prev = dm;
            dp_prev = dp;
        }
        if (!alive) continue;

        const double pm_f = dm_prev * dm_f;
        if (pm_f < win && rng.uniform() < std::exp(-kfac * pm_f)) continue;
        const double pp_f = dp_prev * dp_f;
        if (pp_f < win && rng.uniform() < std::exp(-kfac * pp_f)) continue;

        z[M] = a1;
        if (flip) std::reverse(z.begin(), z.end());
        BridgeSample s;
        s.z = z;
        s.x_i = x_i0;
        s.x_f = x_f0;
        s.lambda = lambda;
        s.ell = ell;
        s.accepted = true;
        out.samples.push_back(std::move(s));
        ++accepted;
    }
    out.attempts += attempts;
}

}  // namespace detail

// Rejection ensemble of confined bridges. Work splits across a fixed number
// of worker streams with per-worker quotas, so the result depends only on the
// seed, never on scheduling.
inline ConstrainedEnsemble sample_constrained(double x_i, double x_f,
                                              double lambda, double ell, int M,
                                              int batch, std::uint64_t seed,
                                              unsigned threads = 8) {
    detail::check_bridge_args(lambda, M);
    if (!(ell > 0.0) || !std::isfinite(ell))
        throw std::invalid_argument("confined sampling requires finite ell > 0");
    if (std::abs(x_i) > ell || std::abs(x_f) > ell)
        throw std::invalid_argument("bridge endpoints must satisfy |x| <= ell");
    if (batch < 1) throw std::invalid_argument("batch must be positive");
    if (threads < 1) threads = 1;
    if (static_cast<int>(threads) > batch) threads = batch;

    // Endpoints sitting exactly on a wall are pulled one part in a thousand
    // inward; the pinned-wall limit is recovered by shrinking the inset.
    const double inset = ell * (1.0 - 1e-3);
    const double x_i0 = (std::abs(x_i) == ell) ? std::copysign(inset, x_i) : x_i;
    const double x_f0 = (std::abs(x_f) == ell) ? std::copysign(inset, x_f) : x_f;

    ConstrainedEnsemble out;
    out.x_i = x_i0;
    out.x_f = x_f0;
    out.lambda = lambda;
    out.ell = ell;

    std::vector<ConstrainedEnsemble> parts(threads);
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    const int base = batch / static_cast<int>(threads);
    const int rem = batch % static_cast<int>(threads);
    for (unsigned k = 0; k < threads; ++k) {
        const int quota = base + (static_cast<int>(k) < rem ? 1 : 0);
        pool.emplace_back([&, k, quota]() {
            try {
                detail::sample_constrained_worker(
                    x_i0, x_f0, lambda, ell, M, quota,
                    detail::thread_seed(seed, k), parts[k]);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (unsigned k = 0; k < threads; ++k)
        if (errors[k]) std::rethrow_exception(errors[k]);

    for (auto& p : parts) {
        out.attempts += p.attempts;
        for (auto& s : p.samples) out.samples.push_back(std::move(s));
    }
    out.acceptance =
        static_cast<double>(out.samples.size()) / static_cast<double>(out.attempts);
    return out;
}

struct OccupationHistogram {
    std::vector<double> edges;
    std::vector<double> theta;
    std::vector<double> stderr_theta;
    std::vector<long> visits;
    long count = 0;
};

// Time-average occupation density over accepted paths. Each segment's time
// step is split across the bins its chord overlaps, so every path deposits a
// total occupation of exactly one.
inline OccupationHistogram occupation_histogram(
    const std::vector<BridgeSample>& samples, int bins) {
    if (bins < 1) throw std::invalid_argument("histogram needs at least one bin");
    const BridgeSample* first = nullptr;
    for (const auto& s : samples)
        if (s.accepted) {
            first = &s;
            break;
        }
    if (first == nullptr)
        throw std::invalid_argument("histogram needs at least one accepted path");
    const double ell = first->ell;
    if (!std::isfinite(ell))
        throw std::invalid_argument("histogram needs confined samples");

    OccupationHistogram h;
    h.edges.resize(bins + 1);
    const double width = 2.0 * ell / bins;
    for (int j = 0; j <= bins; ++j) h.edges[j] = -ell + j * width;
    h.edges[0] = -ell;
    h.edges[bins] = ell;

    std::vector<double> mean(bins, 0.0), m2(bins, 0.0), occ(bins, 0.0);
    h.visits.assign(bins, 0);
    long n = 0;
    const double inv_width = 1.0 / width;

    for (const auto& s : samples) {
        if (!s.accepted) continue;
        if (s.ell != ell)
            throw std::invalid_argument("histogram samples must share one box");
        const int M = s.steps();
        const double dt = 1.0 / M;
        std::fill(occ.begin(), occ.end(), 0.0);
        auto bin_of = [&](double x) {
            int j = static_cast<int>((x + ell) * inv_width);
            if (j < 0) j = 0;
            if (j >= bins) j = bins - 1;
            return j;
        };
        for (int i = 0; i < M; ++i) {
            const double a = s.z[i];
            const double b = s.z[i + 1];
            const double lo = std::min(a, b);
            const double hi = std::max(a, b);
            const int jlo = bin_of(lo);
            const int jhi = bin_of(hi);
            if (jlo == jhi) {
                occ[jlo] += dt;
                continue;
            }
            const double inv_len = dt / (hi - lo);
            occ[jlo] += (h.edges[jlo + 1] - lo) * inv_len;
            for (int j = jlo + 1; j < jhi; ++j)
                occ[j] += width * inv_len;
            occ[jhi] += (hi - h.edges[jhi]) * inv_len;
        }
        ++n;
        for (int j = 0; j < bins; ++j) {
            if (occ[j] > 0.0) ++h.visits[j];
            const double theta_j = occ[j] * inv_width;
            const double delta = theta_j - mean[j];
            mean[j] += delta / n;
            m2[j] += delta * (theta_j - mean[j]);
        }
    }

    h.count = n;
    h.theta = mean;
    h.stderr_theta.assign(bins, 0.0);
    if (n > 1)
        for (int j = 0; j < bins; ++j)
            h.stderr_theta[j] = std::sqrt(m2[j] / (n - 1.0) / n);
    return h;
}

namespace detail {

// Bracket series for the absorbing-box propagator with the slowest mode
// factored out:  G(b,t|a) = (1/ell) e^{-t c} B(t;a,b),
// B = sum_n S_n(a) S_n(b) exp(-t c (n^2-1)),  c = lambda^2 pi^2 / (8 ell^2).
// An endpoint placed exactly on a wall switches its factor to the pinned
// limit S_n -> n (times an alternating sign at +ell); the linearization
// constant cancels between numerator and denominator of the bridge density.
struct WallFactor {
    bool pinned = false;
    bool plus_wall = false;
    SinRecurrence rec{0.0};
    int n = 0;

    WallFactor(double x, double ell)
        : pinned(std::abs(x) == ell),
          plus_wall(x > 0.0),
          rec(pinned ? 0.0 : kPi * 0.5 * (x / ell + 1.0)) {}

    double next() {
        ++n;
        if (!pinned) {
            const double v = rec.value();
            rec.advance();
            return v;
        }
        const double v = (plus_wall && n % 2 == 0) ? -static_cast<double>(n)
                                                   : static_cast<double>(n);
        return v;
    }
};

inline double green_bracket(double t, double a, double b, double lambda,
                            double ell) {
    const double c = lambda * lambda * kPi * kPi / (8.0 * ell * ell);
    const double tc = t * c;
    WallFactor fa(a, ell);
    WallFactor fb(b, ell);
    double sum = 0.0;
    const long n_cap = 4000000;
    for (long n = 1; n <= n_cap; ++n) {
        const double decay = std::exp(-tc * (static_cast<double>(n) * n - 1.0));
        const double term = fa.next() * fb.next() * decay;
        sum += term;
        const double envelope = static_cast<double>(n + 1) * (n + 1) * decay;
        if (n >= 8 && envelope < 1e-14 * (std::abs(sum) + 1e-300)) return sum;
    }
    throw NumericError("absorbing-box series did not converge");
}

}  // namespace detail

// Density of the confined bridge position at interior time u, normalized over
// z for every u. Endpoints given exactly as +-ell use the pinned-wall limit.
inline double green_density(double z, double u, double x_i, double x_f,
                            double lambda, double ell) {
    if (!(ell > 0.0) || !std::isfinite(ell))
        throw std::invalid_argument("green density requires finite ell > 0");
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
    if (std::abs(z) >= ell)
        throw std::invalid_argument("green density requires |z| < ell");
    if (!(u > 0.0) || !(u < 1.0))
        throw std::invalid_argument("green density requires u in (0,1)");
    if (std::abs(x_i) > ell || std::abs(x_f) > ell)
        throw std::invalid_argument("endpoints must satisfy |x| <= ell");

    const double den = detail::green_bracket(1.0, x_i, x_f, lambda, ell);
    if (!(den > 0.0))
        throw NumericError("bridge endpoints are not connectable inside the box");
    const double num_a = detail::green_bracket(u, x_i, z, lambda, ell);
    const double num_b = detail::green_bracket(1.0 - u, z, x_f, lambda, ell);
    return num_a * num_b / (den * ell);
}

}  // namespace ergobox
