#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace ergobox {

struct QuadNode {
    double x;
    double w;
};

namespace detail {

// Gauss-Legendre nodes on [-1,1] by Newton iteration on P_n.
inline std::vector<QuadNode> gauss_legendre_base(int n) {
    std::vector<QuadNode> out(n);
    const double pi = 3.14159265358979323846;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        out[i] = {-x, w};
        out[n - 1 - i] = {x, w};
    }
    return out;
}

}  // namespace detail

// Cached base rule; scaling to [a,b] is done per call.
inline const std::vector<QuadNode>& gauss_legendre(int n) {
    static std::map<int, std::vector<QuadNode>> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, detail::gauss_legendre_base(n)).first;
    return it->second;
}

inline std::vector<QuadNode> gauss_legendre_ab(int n, double a, double b) {
    const auto& base = gauss_legendre(n);
    std::vector<QuadNode> out(base.size());
    const double c = 0.5 * (b - a), m = 0.5 * (a + b);
    for (size_t i = 0; i < base.size(); ++i) out[i] = {c * base[i].x + m, c * base[i].w};
    return out;
}

// Double-exponential (tanh-sinh) rule on (0,1); n+1 nodes.
// Endpoint nodes reach 0/1 in double precision; integrands with endpoint
// singularities must tolerate that (weights there are ~1e-17).
inline std::vector<QuadNode> tanh_sinh_01(int n) {
    const double pi = 3.14159265358979323846;
    const double tmax = 3.2;
    const double h = 2.0 * tmax / n;
    std::vector<QuadNode> out;
    out.reserve(n + 1);
    for (int i = -n / 2; i <= n / 2; ++i) {
        double k = i * h;
        double sh = 0.5 * pi * std::sinh(k);
        double u = std::tanh(sh);
        double ch = std::cosh(sh);
        double w = h * 0.5 * pi * std::cosh(k) / (ch * ch);
        out.push_back({0.5 * (1.0 + u), 0.5 * w});
    }
    return out;
}

// Natural cubic spline. Used for eigenfunction interpolation and tabulated
// potentials (monotone variant below).
class CubicSpline {
  public:
    CubicSpline() = default;

    CubicSpline(std::vector<double> xs, std::vector<double> ys)
        : x_(std::move(xs)), y_(std::move(ys)) {
        size_t n = x_.size();
        if (n < 3 || y_.size() != n) throw std::invalid_argument("CubicSpline: need >=3 points");
        std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), r(n, 0.0);
        b[0] = 1.0;
        b[n - 1] = 1.0;
        for (size_t i = 1; i + 1 < n; ++i) {
            double hl = x_[i] - x_[i - 1], hr = x_[i + 1] - x_[i];
            a[i] = hl / 6.0;
            b[i] = (hl + hr) / 3.0;
            c[i] = hr / 6.0;
            r[i] = (y_[i + 1] - y_[i]) / hr - (y_[i] - y_[i - 1]) / hl;
        }
        m_.assign(n, 0.0);
        for (size_t i = 1; i < n; ++i) {
            double f = a[i] / b[i - 1];
            b[i] -= f * c[i - 1];
            r[i] -= f * r[i - 1];
        }
        m_[n - 1] = r[n - 1] / b[n - 1];
        for (size_t i = n - 1; i-- > 0;) m_[i] = (r[i] - c[i] * m_[i + 1]) / b[i];
    }

    double operator()(double x) const {
        size_t i = locate(x);
        double h = x_[i + 1] - x_[i];
        double A = (x_[i + 1] - x) / h, B = (x - x_[i]) / h;
        return A * y_[i] + B * y_[i + 1] +
               ((A * A * A - A) * m_[i] + (B * B * B - B) * m_[i + 1]) * h * h / 6.0;
    }

    double deriv(double x) const {
        size_t i = locate(x);
        double h = x_[i + 1] - x_[i];
        double A = (x_[i + 1] - x) / h, B = (x - x_[i]) / h;
        return (y_[i + 1] - y_[i]) / h +
               ((3 * B * B - 1) * m_[i + 1] - (3 * A * A - 1) * m_[i]) * h / 6.0;
    }

    double deriv2(double x) const {
        size_t i = locate(x);
        double h = x_[i + 1] - x_[i];
        double A = (x_[i + 1] - x) / h, B = (x - x_[i]) / h;
        return A * m_[i] + B * m_[i + 1];
    }

    double xmin() const { return x_.front(); }
    double xmax() const { return x_.back(); }

  private:
    size_t locate(double x) const {
        size_t lo = 0, hi = x_.size() - 1;
        while (hi - lo > 1) {
            size_t mid = (lo + hi) / 2;
            (x_[mid] > x ? hi : lo) = mid;
        }
        return lo;
    }

    std::vector<double> x_, y_, m_;
};

// Fritsch-Carlson monotone cubic Hermite interpolant.
class MonotoneCubic {
  public:
    MonotoneCubic() = default;

    MonotoneCubic(std::vector<double> xs, std::vector<double> ys)
        : x_(std::move(xs)), y_(std::move(ys)) {
        size_t n = x_.size();
        if (n < 2 || y_.size() != n) throw std::invalid_argument("MonotoneCubic: need >=2 points");
        std::vector<double> d(n - 1);
        for (size_t i = 0; i + 1 < n; ++i) d[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
        t_.assign(n, 0.0);
        t_[0] = d[0];
        t_[n - 1] = d[n - 2];
        for (size_t i = 1; i + 1 < n; ++i)
            t_[i] = (d[i - 1] * d[i] <= 0.0) ? 0.0 : 0.5 * (d[i - 1] + d[i]);
        for (size_t i = 0; i + 1 < n; ++i) {
            if (d[i] == 0.0) {
                t_[i] = t_[i + 1] = 0.0;
                continue;
            }
            double a = t_[i] / d[i], b = t_[i + 1] / d[i];
            double s = a * a + b * b;
            if (s > 9.0) {
                double tau = 3.0 / std::sqrt(s);
                t_[i] = tau * a * d[i];
                t_[i + 1] = tau * b * d[i];
            }
        }
    }

    double operator()(double x) const {
        size_t i = locate(x);
        double h = x_[i + 1] - x_[i], t = (x - x_[i]) / h;
        double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
        double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
        return h00 * y_[i] + h * h10 * t_[i] + h01 * y_[i + 1] + h * h11 * t_[i + 1];
    }

    double deriv(double x) const {
        size_t i = locate(x);
        double h = x_[i + 1] - x_[i], t = (x - x_[i]) / h;
        double d00 = 6 * t * t - 6 * t, d10 = 3 * t * t - 4 * t + 1;
        double d01 = -d00, d11 = 3 * t * t - 2 * t;
        return (d00 * y_[i] + d01 * y_[i + 1]) / h + d10 * t_[i] + d11 * t_[i + 1];
    }

    double deriv2(double x) const {
        size_t i = locate(x);
        double h = x_[i + 1] - x_[i], t = (x - x_[i]) / h;
        double s00 = 12 * t - 6, s10 = 6 * t - 4, s01 = -s00, s11 = 6 * t - 2;
        return (s00 * y_[i] + s01 * y_[i + 1]) / (h * h) + (s10 * t_[i] + s11 * t_[i + 1]) / h;
    }

    double xmin() const { return x_.front(); }
    double xmax() const { return x_.back(); }

  private:
    size_t locate(double x) const {
        size_t lo = 0, hi = x_.size() - 1;
        while (hi - lo > 1) {
            size_t mid = (lo + hi) / 2;
            (x_[mid] > x ? hi : lo) = mid;
        }
        return lo;
    }

    std::vector<double> x_, y_, t_;
};

// Scaled complementary error function, adequate for arguments in [0, 20].
inline double erfcx(double x) {
    if (x < 0.0) throw std::invalid_argument("erfcx: negative argument");
    if (x <= 20.0) return std::exp(x * x) * std::erfc(x);
    double x2 = x * x;
    return (1.0 - 0.5 / x2 + 0.75 / (x2 * x2)) / (x * 1.7724538509055160273);
}

}  // namespace ergobox
