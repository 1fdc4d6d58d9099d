#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "gslab/errors.hpp"
#include "gslab/profile.hpp"

namespace gslab {

/// Area of the unit sphere in R^N, 2 pi^{N/2} / Gamma(N/2).
double sphere_area(int N);

/// x^n for integer n (n may be negative).
double ipow(double x, int n);

/// Upper incomplete gamma Gamma(n, x) for integer n >= 1.
double upper_gamma_int(int n, double x);

namespace detail {
// 6-point Gauss-Legendre rule on [0, 1]
inline constexpr double kGlNode[6] = {
    0.03376524289842399, 0.16939530676686776, 0.38069040695840156,
    0.61930959304159844, 0.83060469323313224, 0.96623475710157601};
inline constexpr double kGlWeight[6] = {
    0.08566224618958517, 0.18038078652406930, 0.23395696728634552,
    0.23395696728634552, 0.18038078652406930, 0.08566224618958517};
// embedded 3-point rule used for the error estimate
inline constexpr double kGl3Node[3] = {0.11270166537925831, 0.5, 0.88729833462074169};
inline constexpr double kGl3Weight[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

inline double hermite(double y0, double d0, double y1, double d1, double h, double t) {
    const double t2 = t * t, t3 = t2 * t;
    return y0 * (2 * t3 - 3 * t2 + 1) + h * d0 * (t3 - 2 * t2 + t) +
           y1 * (-2 * t3 + 3 * t2) + h * d1 * (t3 - t2);
}
} // namespace detail

struct QuadResult {
    double value = 0.0;
    double error_estimate = 0.0;
};

/// Composite Gauss-Legendre quadrature of fn(r, y(r)) over the panels of a
/// nodal grid, with y reconstructed per panel by cubic Hermite interpolation
/// from values and derivatives. The error estimate compares against an
/// embedded lower-order rule.
template <class F>
QuadResult panel_integral(const std::vector<double>& r, const std::vector<double>& y,
                          const std::vector<double>& dy, F&& fn) {
    QuadResult out;
    for (std::size_t i = 0; i + 1 < r.size(); ++i) {
        const double h = r[i + 1] - r[i];
        if (!(h > 0.0)) throw ParamError("panel_integral: grid not increasing");
        double s6 = 0.0, s3 = 0.0;
        for (int k = 0; k < 6; ++k) {
            const double t = detail::kGlNode[k];
            const double yy = detail::hermite(y[i], dy[i], y[i + 1], dy[i + 1], h, t);
            s6 += detail::kGlWeight[k] * fn(r[i] + t * h, yy);
        }
        for (int k = 0; k < 3; ++k) {
            const double t = detail::kGl3Node[k];
            const double yy = detail::hermite(y[i], dy[i], y[i + 1], dy[i + 1], h, t);
            s3 += detail::kGl3Weight[k] * fn(r[i] + t * h, yy);
        }
        out.value += h * s6;
        out.error_estimate += std::abs(h * (s6 - s3));
    }
    return out;
}

/// Cumulative panel integrals: entry i is the integral over [r_0, r_i].
template <class F>
std::vector<double> panel_cumulative(const std::vector<double>& r,
                                     const std::vector<double>& y,
                                     const std::vector<double>& dy, F&& fn) {
    std::vector<double> cum(r.size(), 0.0);
    for (std::size_t i = 0; i + 1 < r.size(); ++i) {
        const double h = r[i + 1] - r[i];
        double s6 = 0.0;
        for (int k = 0; k < 6; ++k) {
            const double t = detail::kGlNode[k];
            const double yy = detail::hermite(y[i], dy[i], y[i + 1], dy[i + 1], h, t);
            s6 += detail::kGlWeight[k] * fn(r[i] + t * h, yy);
        }
        cum[i + 1] = cum[i] + h * s6;
    }
    return cum;
}

/// Composite Gauss-Legendre integral of a callable f(r) over [a, b] with
/// geometric (log-spaced) or uniform panels, refined until two successive
/// panel counts agree to rel_tol.
template <class F>
double integrate_function(F&& f, double a, double b, double rel_tol = 1e-12,
                          bool log_panels = true, int initial_panels = 64) {
    if (!(b > a)) throw ParamError("integrate_function: empty interval");
    auto pass = [&](int n) {
        double total = 0.0;
        const double ratio = log_panels ? std::pow(b / a, 1.0 / n) : 0.0;
        double lo = a;
        for (int i = 0; i < n; ++i) {
            const double hi = log_panels ? lo * ratio : a + (b - a) * (i + 1.0) / n;
            const double h = hi - lo;
            double s = 0.0;
            for (int k = 0; k < 6; ++k)
                s += detail::kGlWeight[k] * f(lo + detail::kGlNode[k] * h);
            total += h * s;
            lo = hi;
        }
        return total;
    };
    if (log_panels && !(a > 0.0)) throw ParamError("integrate_function: log panels need a > 0");
    int n = initial_panels;
    double prev = pass(n);
    for (int iter = 0; iter < 8; ++iter) {
        n *= 2;
        const double cur = pass(n);
        if (std::abs(cur - prev) <= rel_tol * std::max(std::abs(cur), 1e-300)) return cur;
        prev = cur;
    }
    return prev;
}

/// Integral over [R, infinity) of r^{N-1} u(r)^s for the tail model.
/// Exponential tails always converge; polynomial tails need s*rate > N.
double tail_moment(const TailModel& tail, int N, double s, double R);

/// Integral over [R, infinity) of r^{N-1} |u'(r)|^p for the tail model.
double tail_grad_moment(const TailModel& tail, int N, double p, double R);

} // namespace gslab
