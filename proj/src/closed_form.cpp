#include "gslab/closed_form.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "gslab/quadrature.hpp"

namespace gslab {

void ExtremalParams::validate() const {
    if (!(p > 1.0) || !(p < static_cast<double>(N)))
        throw ParamError("extremal family requires 1 < p < N");
    if (!(lambda > 0.0)) throw ParamError("extremal family requires lambda > 0");
}

double U_eval(const ExtremalParams& ep, double r) {
    ep.validate();
    if (r < 0.0) throw ParamError("U_eval requires r >= 0");
    const double pp = ep.pprime(), k = ep.kappa();
    const double num = std::pow(ep.lambda, pp / ep.p) * std::pow(k, 1.0 / pp) *
                       std::pow(static_cast<double>(ep.N), 1.0 / ep.p);
    const double den = std::pow(ep.lambda, pp) + std::pow(r, pp);
    return std::pow(num / den, k / pp);
}

double U_prime_eval(const ExtremalParams& ep, double r) {
    if (r == 0.0) return 0.0;
    const double pp = ep.pprime(), k = ep.kappa();
    const double rp = std::pow(r, pp);
    return -k * (rp / r) / (std::pow(ep.lambda, pp) + rp) * U_eval(ep, r);
}

double U_tail_amplitude(const ExtremalParams& ep) {
    const double pp = ep.pprime(), k = ep.kappa();
    const double num = std::pow(ep.lambda, pp / ep.p) * std::pow(k, 1.0 / pp) *
                       std::pow(static_cast<double>(ep.N), 1.0 / ep.p);
    return std::pow(num, k / pp);
}

namespace {

std::mutex g_cache_mutex;
std::map<std::pair<int, double>, double> g_sobolev_cache;
std::map<std::pair<int, double>, double> g_qstar_cache;

// \omega_{N-1} \int_0^\infty r^{N-1} |U_1'|^p dr, evaluated on a log grid with
// the analytic power tail appended.
double grad_norm_pow_U1(int N, double p) {
    ExtremalParams ep{N, p, 1.0};
    const double r_lo = 1e-9, r_hi = 1e7;
    auto f = [&](double r) {
        return std::pow(r, N - 1.0) * std::pow(std::abs(U_prime_eval(ep, r)), p);
    };
    double core = integrate_function(f, r_lo, r_hi, 1e-13);
    TailModel tail{TailKind::Polynomial, ep.kappa(), U_tail_amplitude(ep), 1.0, 0.0, 0.0};
    core += tail_grad_moment(tail, N, p, r_hi);
    return sphere_area(N) * core;
}

} // namespace

double sobolev_constant(int N, double p) {
    const auto key = std::make_pair(N, p);
    {
        std::lock_guard<std::mutex> lock(g_cache_mutex);
        auto it = g_sobolev_cache.find(key);
        if (it != g_sobolev_cache.end()) return it->second;
    }
    const double value = std::pow(grad_norm_pow_U1(N, p), p / static_cast<double>(N));
    std::lock_guard<std::mutex> lock(g_cache_mutex);
    g_sobolev_cache.emplace(key, value);
    return value;
}

double W_eval(int N, double p, double lambda, double r) {
    const double s = std::pow(sobolev_constant(N, p), 1.0 / p);
    return U_eval({N, p, lambda}, s * r);
}

double q_star(int N, double p) {
    const auto key = std::make_pair(N, p);
    {
        std::lock_guard<std::mutex> lock(g_cache_mutex);
        auto it = g_qstar_cache.find(key);
        if (it != g_qstar_cache.end()) return it->second;
    }
    const double ps = p_star(N, p);
    auto f = [&](double r) { return std::pow(r, N - 1.0) * std::pow(W_eval(N, p, 1.0, r), ps); };
    const double r_lo = 1e-9;
    double value = integrate_function(f, r_lo, 1.0, 1e-13);
    value += std::pow(W_eval(N, p, 1.0, 0.0), ps) * std::pow(r_lo, N) / N; // center cap
    value *= sphere_area(N);
    std::lock_guard<std::mutex> lock(g_cache_mutex);
    g_qstar_cache.emplace(key, value);
    return value;
}

double W1_norm_pow(int N, double p, double s) {
    ExtremalParams ep{N, p, 1.0};
    const double kappa = ep.kappa();
    if (!(s * kappa > N))
        throw IntegrabilityError("W_1 is not in L^s: s kappa <= N");
    const double sp = std::pow(sobolev_constant(N, p), 1.0 / p);
    const double r_lo = 1e-9, r_hi = 1e7;
    auto f = [&](double r) { return std::pow(r, N - 1.0) * std::pow(U_eval(ep, sp * r), s); };
    double core = integrate_function(f, r_lo, r_hi, 1e-13);
    core += std::pow(U_eval(ep, 0.0), s) * std::pow(r_lo, N) / N;
    TailModel tail{TailKind::Polynomial, kappa,
                   U_tail_amplitude(ep) * std::pow(sp, -kappa), 1.0, 0.0, 0.0};
    core += tail_moment(tail, N, s, r_hi);
    return sphere_area(N) * core;
}

RadialProfile emden_fowler_profile(int N, double p, double lambda, double r_lo,
                                   double r_hi, int points_per_decade) {
    ExtremalParams ep{N, p, lambda};
    ep.validate();
    if (!(r_hi > r_lo) || !(r_lo > 0.0))
        throw ParamError("emden_fowler_profile requires 0 < r_lo < r_hi");
    const int n = std::max(3, static_cast<int>(std::ceil(
                                  std::log10(r_hi / r_lo) * points_per_decade)) + 1);
    RadialProfile out;
    // the (q, l) slots are unused by the Emden-Fowler right-hand side
    out.params = ProblemParams{N, p, p_star(N, p), p_star(N, p) + 1.0, 0.0};
    out.kind = EquationKind::EmdenFowler;
    out.a = U_eval(ep, 0.0);
    out.classification = ShotClass::Groundstate;
    out.grid.resize(n);
    out.values.resize(n);
    out.slopes.resize(n);
    out.flux.resize(n);
    const double ratio = std::pow(r_hi / r_lo, 1.0 / (n - 1));
    double r = r_lo;
    for (int i = 0; i < n; ++i) {
        const double u = U_eval(ep, r);
        const double du = U_prime_eval(ep, r);
        out.grid[i] = r;
        out.values[i] = u;
        out.slopes[i] = du;
        out.flux[i] = std::pow(r, N - 1.0) * std::pow(std::abs(du), p - 2.0) * du;
        r *= ratio;
    }
    out.grid.back() = r_hi;
    out.tail.kind = TailKind::Polynomial;
    out.tail.rate = ep.kappa();
    out.tail.amplitude = U_tail_amplitude(ep);
    out.tail.r_squared = 1.0;
    out.tail.fit_r_lo = r_hi / 10.0;
    out.tail.fit_r_hi = r_hi;
    return out;
}

void TestFunctionParams::validate() const {
    if (!(mu > 0.0)) throw ParamError("test function requires mu > 0");
    if (std::isfinite(R) && !(R >= 10.0 * mu))
        throw ParamError("cutoff radius must satisfy R >= 10 mu");
    if (shell_panels < 64) throw ParamError("cutoff shell needs >= 64 panels");
}

double cutoff_eval(double R, double r) {
    if (!std::isfinite(R) || r <= R) return 1.0;
    if (r >= 2.0 * R) return 0.0;
    const double t = (r - R) / R;
    return 1.0 - t * t * (3.0 - 2.0 * t);
}

double cutoff_prime_eval(double R, double r) {
    if (!std::isfinite(R) || r <= R || r >= 2.0 * R) return 0.0;
    const double t = (r - R) / R;
    return -6.0 * t * (1.0 - t) / R;
}

double test_quotient(const ProblemParams& params, const TestFunctionParams& tf) {
    tf.validate();
    const Regime regime = classify_regime(params);
    if (regime.kind != RegimeKind::Critical)
        throw RegimeError("test_quotient is defined in the critical regime");
    if (!(params.eps > 0.0)) throw ParamError("test_quotient requires eps > 0");

    const int N = params.N;
    const double p = params.p;
    ExtremalParams ep{N, p, tf.mu};
    const double sp = std::pow(sobolev_constant(N, p), 1.0 / p);
    const bool no_cutoff = !std::isfinite(tf.R);
    if (no_cutoff && !(p * p < static_cast<double>(N)))
        throw ConstraintError("uncut bubble is admissible only for p < sqrt(N)");

    auto w = [&](double r) { return cutoff_eval(tf.R, r) * U_eval(ep, sp * r); };
    auto wprime = [&](double r) {
        return cutoff_prime_eval(tf.R, r) * U_eval(ep, sp * r) +
               cutoff_eval(tf.R, r) * sp * U_prime_eval(ep, sp * r);
    };
    auto grad_integrand = [&](double r) {
        return std::pow(r, N - 1.0) * std::pow(std::abs(wprime(r)), p);
    };
    auto constraint_integrand = [&](double r) {
        return std::pow(r, N - 1.0) * F_eval(params, EquationKind::FullProblem, w(r));
    };

    const double r_lo = 1e-9 * tf.mu;
    double grad, constraint;
    if (no_cutoff) {
        const double r_hi = 1e7 * tf.mu;
        grad = integrate_function(grad_integrand, r_lo, r_hi, 1e-12);
        constraint = integrate_function(constraint_integrand, r_lo, r_hi, 1e-12);
        const double kappa = ep.kappa();
        TailModel wtail{TailKind::Polynomial, kappa,
                        U_tail_amplitude(ep) * std::pow(sp, -kappa), 1.0, 0.0, 0.0};
        grad += tail_grad_moment(wtail, N, p, r_hi);
        for (const auto& t : rhs_terms(params, EquationKind::FullProblem))
            constraint += t.coef / (t.expo + 1.0) * tail_moment(wtail, N, t.expo + 1.0, r_hi);
    } else {
        grad = integrate_function(grad_integrand, r_lo, tf.R, 1e-12);
        constraint = integrate_function(constraint_integrand, r_lo, tf.R, 1e-12);
        // resolve the cutoff shell with linear panels
        grad += integrate_function(grad_integrand, tf.R, 2.0 * tf.R, 1e-12, false,
                                   tf.shell_panels);
        constraint += integrate_function(constraint_integrand, tf.R, 2.0 * tf.R, 1e-12,
                                         false, tf.shell_panels);
    }
    constraint += F_eval(params, EquationKind::FullProblem, w(0.0)) * std::pow(r_lo, N) / N;
    grad *= sphere_area(N);
    constraint *= sphere_area(N) * params.pstar();

    if (!(constraint > 0.0))
        throw ConstraintError("test function misses the constraint set: p* Int F <= 0");
    return grad / std::pow(constraint, (N - p) / static_cast<double>(N));
}

double psi_eval(const ProblemParams& params, double mu, double R) {
    const Regime regime = classify_regime(params);
    if (regime.kind != RegimeKind::Critical)
        throw RegimeError("psi_eval is defined in the critical regime");
    const double N = params.N, p = params.p, l = params.l;
    const double ps = params.pstar();
    const double decay = (N - p) / p * (l - ps);
    if (regime.branch == DimensionBranch::BelowSqrtN) {
        const double beta_p = (ps / p) * W1_norm_pow(params.N, p, p);
        const double beta_l = (ps / l) * W1_norm_pow(params.N, p, l);
        return beta_p * params.eps * std::pow(mu, p) + beta_l * std::pow(mu, -decay);
    }
    const double ratio = R / mu;
    const double shell = std::pow(ratio, -(N - p) / (p - 1.0));
    const double bulk = std::pow(mu, -decay);
    if (regime.branch == DimensionBranch::EqualSqrtN)
        return shell + params.eps * std::pow(mu, p) * std::log(R) + bulk;
    return shell +
           params.eps * std::pow(mu, (N - p) / (p - 1.0)) *
               std::pow(R, (p * p - N) / (p - 1.0)) +
           bulk;
}

double emden_fowler_fd_residual(int N, double p, double h_rel, double r_lo, double r_hi,
                                int points) {
    ExtremalParams ep{N, p, 1.0};
    ep.validate();
    if (!(h_rel > 0.0) || !(h_rel < 0.1)) throw ParamError("h_rel out of range");
    const double ps = p_star(N, p);
    auto uprime = [&](double x, double h) {
        return (U_eval(ep, x + h) - U_eval(ep, x - h)) / (2.0 * h);
    };
    auto flux = [&](double x, double h) {
        const double du = uprime(x, h);
        return std::pow(x, N - 1.0) * std::pow(std::abs(du), p - 2.0) * du;
    };
    double worst = 0.0;
    const double ratio = std::pow(r_hi / r_lo, 1.0 / (points - 1));
    double r = r_lo;
    for (int i = 0; i < points; ++i) {
        const double h = h_rel * r;
        const double lap = (flux(r + h, h) - flux(r - h, h)) / (2.0 * h * std::pow(r, N - 1.0));
        const double rhs = std::pow(U_eval(ep, r), ps - 1.0);
        worst = std::max(worst, std::abs(lap + rhs) / rhs);
        r *= ratio;
    }
    return worst;
}

TestScales optimal_test_scales(const ProblemParams& params) {
    const Regime regime = classify_regime(params);
    if (regime.kind != RegimeKind::Critical)
        throw RegimeError("optimal_test_scales is defined in the critical regime");
    if (!(params.eps > 0.0)) throw ParamError("optimal_test_scales requires eps > 0");
    const double N = params.N, p = params.p, l = params.l, eps = params.eps;
    const double ps = params.pstar();
    TestScales out;
    switch (regime.branch) {
    case DimensionBranch::BelowSqrtN:
        out.mu = std::pow(eps, -p / ((N - p) * (l - p)));
        out.R = std::numeric_limits<double>::infinity();
        break;
    case DimensionBranch::EqualSqrtN:
        out.R = std::pow(eps, -1.0 / p);
        out.mu = std::pow(eps * std::log(1.0 / eps), -p / ((N - p) * (l - p)));
        break;
    case DimensionBranch::AboveSqrtN:
        out.mu = std::pow(eps, -1.0 / ((l - ps) * (p - 1.0) + p));
        out.R = std::pow(eps, -1.0 / p);
        break;
    }
    out.psi = psi_eval(params, out.mu, out.R);
    return out;
}

} // namespace gslab
