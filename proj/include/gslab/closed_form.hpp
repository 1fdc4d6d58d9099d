#pragma once

#include <limits>

#include "gslab/problem.hpp"
#include "gslab/profile.hpp"

namespace gslab {

/// Parameters of the explicit radial extremal family
///   U_lambda(r) = [ lambda^{p'/p} kappa^{1/p'} N^{1/p} / (lambda^{p'} + r^{p'}) ]^{kappa/p'},
/// with p' = p/(p-1) and kappa = (N-p)/(p-1).
struct ExtremalParams {
    int N = 3;
    double p = 2.0;
    double lambda = 1.0;

    double pprime() const { return p / (p - 1.0); }
    double kappa() const { return (N - p) / (p - 1.0); }
    void validate() const;
};

/// U_lambda(r); strictly decreasing in r.
double U_eval(const ExtremalParams& ep, double r);

/// d/dr U_lambda(r).
double U_prime_eval(const ExtremalParams& ep, double r);

/// Coefficient C in U_lambda(r) ~ C r^{-kappa} as r -> infinity.
double U_tail_amplitude(const ExtremalParams& ep);

/// Best constant of the gradient-to-critical-norm embedding, computed by
/// quadrature from the extremal profile and cached per (N, p).
double sobolev_constant(int N, double p);

/// Minimizer of the normalized problem: W_lambda(r) = U_lambda(S^{1/p} r),
/// with unit critical norm.
double W_eval(int N, double p, double lambda, double r);

/// Critical-norm mass of W_1 inside the unit ball; lies strictly in (0, 1).
/// Cached per (N, p).
double q_star(int N, double p);

/// ||W_1||_s^s over the whole space (diverges unless s * kappa > N).
double W1_norm_pow(int N, double p, double s);

/// Sample the extremal solution into a RadialProfile (log-spaced grid,
/// exact nodal values/slopes/flux, analytic polynomial tail attached).
RadialProfile emden_fowler_profile(int N, double p, double lambda, double r_lo,
                                   double r_hi, int points_per_decade = 256);

/// Scaled bubble with a smooth radial cutoff: 1 on [0, R], cubic smoothstep
/// down to 0 on [R, 2R]. R may be infinite (no cutoff), which requires
/// p < sqrt(N) for integrability.
struct TestFunctionParams {
    double mu = 1.0;
    double R = std::numeric_limits<double>::infinity();
    int shell_panels = 64; // panels resolving the cutoff shell

    void validate() const; // enforces R >= 10 mu for finite R
};

/// Cutoff value and derivative at radius r.
double cutoff_eval(double R, double r);
double cutoff_prime_eval(double R, double r);

/// Rayleigh quotient of the cutoff bubble for the full-problem energy:
///   ||grad(eta_R W_mu)||_p^p / (p* Integral F_eps(eta_R W_mu))^{(N-p)/N}.
/// Upper-bound witness for the constrained level; requires the critical
/// regime and a positive constraint integral.
double test_quotient(const ProblemParams& params, const TestFunctionParams& tf);

struct TestScales {
    double mu = 0.0;
    double R = 0.0; // infinite when no cutoff is needed
    double psi = 0.0;
};

/// Branch-dependent near-optimal bubble scale, cutoff radius, and the value
/// of the penalty function psi at them. The expected level gap is psi up to
/// a constant factor.
TestScales optimal_test_scales(const ProblemParams& params);

/// Penalty function psi_eps(mu, R) for the given critical parameters.
double psi_eval(const ProblemParams& params, double mu, double R);

/// Max relative residual of the extremal profile against its equation over a
/// log grid of radii, with the radial operator assembled by nested centered
/// finite differences of step h_rel * r. Second order: halving h_rel cuts
/// the residual by about four.
double emden_fowler_fd_residual(int N, double p, double h_rel, double r_lo = 0.01,
                                double r_hi = 50.0, int points = 200);

} // namespace gslab
