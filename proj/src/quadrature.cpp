#include "gslab/quadrature.hpp"

#include <cmath>

namespace gslab {

double sphere_area(int N) {
    if (N < 1) throw ParamError("sphere_area requires N >= 1");
    return 2.0 * std::pow(M_PI, 0.5 * N) / std::tgamma(0.5 * N);
}

double ipow(double x, int n) {
    if (n < 0) return 1.0 / ipow(x, -n);
    double acc = 1.0, base = x;
    while (n > 0) {
        if (n & 1) acc *= base;
        base *= base;
        n >>= 1;
    }
    return acc;
}

double upper_gamma_int(int n, double x) {
    if (n < 1) throw ParamError("upper_gamma_int requires n >= 1");
    if (x < 0.0) throw ParamError("upper_gamma_int requires x >= 0");
    // Gamma(n, x) = (n-1)! e^{-x} sum_{k=0}^{n-1} x^k / k!
    double sum = 1.0, term = 1.0;
    for (int k = 1; k < n; ++k) {
        term *= x / k;
        sum += term;
    }
    double fact = 1.0;
    for (int k = 2; k < n; ++k) fact *= k;
    return fact * std::exp(-x) * sum;
}

double tail_moment(const TailModel& tail, int N, double s, double R) {
    if (!(R > 0.0)) throw ParamError("tail_moment requires R > 0");
    switch (tail.kind) {
    case TailKind::NoTail:
        return 0.0;
    case TailKind::Exponential: {
        const double b = s * tail.rate;
        return std::pow(tail.amplitude, s) * upper_gamma_int(N, b * R) / ipow(b, N);
    }
    case TailKind::Polynomial: {
        const double drop = s * tail.rate - N;
        if (!(drop > 0.0))
            throw IntegrabilityError("tail integral diverges: s * gamma <= N (s = " +
                                     std::to_string(s) + ", gamma = " +
                                     std::to_string(tail.rate) + ", N = " +
                                     std::to_string(N) + ")");
        return std::pow(tail.amplitude, s) * std::pow(R, -drop) / drop;
    }
    }
    return 0.0;
}

double tail_grad_moment(const TailModel& tail, int N, double p, double R) {
    if (!(R > 0.0)) throw ParamError("tail_grad_moment requires R > 0");
    switch (tail.kind) {
    case TailKind::NoTail:
        return 0.0;
    case TailKind::Exponential: {
        const double b = p * tail.rate;
        return std::pow(tail.rate * tail.amplitude, p) * upper_gamma_int(N, b * R) /
               ipow(b, N);
    }
    case TailKind::Polynomial: {
        const double drop = (tail.rate + 1.0) * p - N;
        if (!(drop > 0.0))
            throw IntegrabilityError("tail gradient integral diverges");
        return std::pow(tail.rate * tail.amplitude, p) * std::pow(R, -drop) / drop;
    }
    }
    return 0.0;
}

} // namespace gslab
