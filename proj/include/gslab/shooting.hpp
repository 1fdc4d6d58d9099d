#pragma once

#include <utility>

#include "gslab/problem.hpp"
#include "gslab/profile.hpp"

namespace gslab {

/// Controls for the radial initial value integration and the bisection.
struct IntegratorConfig {
    double r_start_factor = 1e-6; // r_start = factor * max(1, a^{(p-q)/p})
    double r_max = 0.0;           // 0 selects the kind-dependent default
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double bisection_tol = 1e-14; // relative bracket width at convergence
    int max_bisections = 90;
    double u_floor_rel = 1e-13;   // stop once u <= floor * a while decreasing
    long max_steps = 4000000;

    double r_start_for(double a, const ProblemParams& params) const;
};

/// Default integration horizon: positive-mass kinds scale with the mass
/// coefficient, zero-mass kinds use a fixed large horizon.
double default_r_max(const ProblemParams& params, EquationKind kind);

/// Admissible central values (g(a) > 0 and positive potential ahead):
/// the a-interval scanned when constructing the shooting bracket.
std::pair<double, double> shooting_domain(const ProblemParams& params, EquationKind kind);

/// Integrate the radial problem outward from the origin series with central
/// value a. Stops at the first classification event, the value floor, or the
/// horizon. Throws SolverError if the series start is invalid (g(a) <= 0) or
/// the step size underflows.
RadialProfile integrate(const ProblemParams& params, EquationKind kind, double a,
                        const IntegratorConfig& config = {});

/// Classification implied by the recorded events of a profile.
ShotClass classify(const RadialProfile& profile);

/// Least-squares tail fit over the last decade of the grid: log u against r
/// for positive-mass kinds, log u against log r for zero-mass kinds.
/// Requires the profile values to drop below 1e-6 of the central value.
TailModel attach_tail(const RadialProfile& profile);

/// Bisect the central value between undershoot and overshoot witnesses and
/// return the groundstate profile with a fitted tail model.
RadialProfile find_groundstate(const ProblemParams& params, EquationKind kind,
                               const IntegratorConfig& config = {});

} // namespace gslab
