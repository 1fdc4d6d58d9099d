#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gslab/profile.hpp"

namespace gslab {

struct NormEntry {
    double s = 0.0;
    double value = 0.0;     // ||u||_s^s
    bool tail_corrected = false;
};

/// Full-space norms of a radial profile: quadrature over the grid plus the
/// closed-form tail integral of the fitted tail model.
struct NormReport {
    std::vector<NormEntry> norms;
    double grad_p = 0.0; // ||grad u||_p^p
    bool grad_tail_corrected = false;
    double quadrature_error_estimate = 0.0;

    double get(double s) const; // throws ParamError when s is absent
};

/// ||u||_s^s. Requires s >= 1; polynomial tails additionally need
/// s * gamma > N for convergence.
double norm_Ls(const RadialProfile& profile, double s);

/// ||grad u||_p^p, with the gradient recovered from the flux.
double grad_norm_Lp(const RadialProfile& profile);

/// Norm report for the standard exponent set {p, q, l, p*} plus extras.
NormReport norm_report(const RadialProfile& profile,
                       const std::vector<double>& extra_exponents = {});

/// Relative residual of ||grad u||_p^p = p* Int F(u) dx.
double pohozaev_residual(const RadialProfile& profile);

/// Relative residual of ||grad u||_p^p = Int f(u) u dx.
double nehari_residual(const RadialProfile& profile);

/// Constrained level and energy recovered from the gradient norm:
/// S = (||grad u||_p^p)^{p/N}, E = (1/p - 1/p*) S^{N/p}.
std::pair<double, double> S_from_profile(const RadialProfile& profile);

struct IdentityReport {
    double pohozaev_residual = 0.0;
    double nehari_residual = 0.0;
    double S_value = 0.0;
    double energy = 0.0;
    std::vector<std::pair<std::string, double>> extra; // named residuals
};

IdentityReport identity_report(const RadialProfile& profile);

/// Residuals of the critical-regime norm relations for the constrained
/// minimizer w: ||w||_l^l = k eps ||w||_p^p and
/// ||w||_{p*}^{p*} = 1 + (k+1) eps ||w||_p^p.
struct CriticalRelationReport {
    double k = 0.0;
    double res_l = 0.0;
    double res_pstar = 0.0;
    double eps_norm_p = 0.0; // eps ||w||_p^p
    double norm_l = 0.0;
    double norm_pstar = 0.0;
};

CriticalRelationReport critical_relation_residuals(const RadialProfile& w,
                                                   const ProblemParams& params);

/// Closed-form limits of (||w_0||_q^q, ||w_0||_l^l) for the zero-mass
/// minimizer in the supercritical regime.
std::pair<double, double> supercritical_targets(const ProblemParams& params);

/// Closed-form limits of (||w||_p^p, ||w||_q^q) for the rescaled-problem
/// minimizer in the subcritical regime.
std::pair<double, double> subcritical_limits(const ProblemParams& params);

} // namespace gslab
