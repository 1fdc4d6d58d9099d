#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gslab/norms.hpp"
#include "gslab/profile.hpp"
#include "gslab/shooting.hpp"

namespace gslab {

/// v(x) = eps^{-1/(q-p)} u(x / eps^{1/p}), mapping the full problem onto the
/// rescaled equation.
RadialProfile canonical_rescale(const RadialProfile& u, double eps);

struct ConcentrationResult {
    double lambda = 0.0;
    RadialProfile v; // lambda^{(N-p)/p} w(lambda x)
};

/// Unique lambda with Q(lambda) = q_star_value, where Q is the cumulative
/// critical-norm mass of w inside B_lambda; also returns the optimally
/// rescaled profile. Throws SolverError when the total mass is below the
/// threshold (eps too large).
ConcentrationResult concentration_lambda(const RadialProfile& w, double q_star_value);

struct SweepRecord {
    double eps = 0.0;
    double a = 0.0;      // u_eps(0)
    double S = 0.0;      // constrained level of the regime's minimizer problem
    double sigma = 0.0;  // S minus the regime's limit level
    double lambda = 0.0; // concentration scale (critical regime only)
    double v0 = 0.0;     // central value of the regime's rescaled profile
    double v_norm_p_pow = 0.0; // ||v||_p^p of the optimally rescaled profile
    NormReport norms;          // norms of the constrained minimizer w
    IdentityReport identities; // identities of the solved groundstate
    bool ok = false;
    std::string status = "pending";
};

struct SweepTable {
    ProblemParams params; // the eps field is ignored
    Regime regime;
    double S_limit = 0.0; // level subtracted to form sigma
    std::vector<SweepRecord> records;

    std::vector<double> column(const std::string& name) const; // ok records only
    std::vector<double> eps_column() const;
};

std::vector<double> make_eps_grid(double eps_lo, double eps_hi, int points_per_decade);

/// Regime-dependent default grid (the logarithmic branch gets extra decades).
std::vector<double> default_eps_grid(const ProblemParams& params);

/// Solve the full problem across the eps grid and collect levels, norms,
/// identities, and concentration scales. Per-record failures are recorded;
/// the sweep throws only if more than half the records fail.
SweepTable run_sweep(const ProblemParams& params, const std::vector<double>& eps_grid,
                     const IntegratorConfig& config = {}, int jobs = 0);

struct FitResult {
    double exponent = 0.0;
    double log_power = 0.0; // fixed value used in the fit (0 = pure power law)
    double prefactor = 0.0;
    double r_squared = 0.0;
    double eps_lo = 0.0, eps_hi = 0.0; // fit window
    int points = 0;
};

/// Least squares of log(value) against log(eps), optionally subtracting a
/// fixed multiple of log log(1/eps). The window keeps the smallest-eps
/// fraction of the data; requires >= 6 points spanning >= 1 decade in eps.
FitResult fit_power_law(const std::vector<double>& eps, const std::vector<double>& value,
                        std::optional<double> fixed_log_power = {},
                        double window_fraction = 0.5);

struct BarrierReport {
    bool hypotheses_hold = false;
    double max_violation = 0.0;   // max (LHS - RHS)/scale over the grid
    double max_equality_gap = 0.0; // max |LHS - RHS|/scale (p = 2 case)
    int points = 0;
};

/// Pointwise inequality check for the barrier h(r) = r^{-gamma} e^{-mu r}:
///   -Delta_p h + mu^p (p-1) h^{p-1}
///     <= mu gamma^{p-2}(N-1-2gamma(p-1)) r^{1-p} h^{p-1}
///        + gamma^{p-1}(N-p-gamma(p-1)) r^{-p} h^{p-1},
/// evaluated with the analytically expanded radial operator. Requires p >= 2;
/// if the sign hypotheses fail the check is skipped and reported as such.
/// At p = 2 the two sides agree identically.
BarrierReport barrier_check(int N, double p, double gamma,
                            const std::vector<double>& mu_grid,
                            const std::vector<double>& r_grid);

struct BlowUpReport {
    DimensionBranch branch = DimensionBranch::BelowSqrtN;
    double bound = 0.0; // max (bounded branch) or min ratio (divergent branches)
    bool ok = false;
    std::string detail;
};

/// Branch-appropriate check of the rescaled-mass growth along a critical
/// sweep: bounded for p < sqrt(N), logarithmically or polynomially divergent
/// at the stated rate otherwise.
BlowUpReport blow_up_norm_check(const SweepTable& table);

struct PointwiseBounds {
    double C_gradient = 0.0; // sup u r^{(N-p)/p} / ||grad u||_p
    double C_moment = 0.0;   // sup u r^{N/s} / ||u||_s
    double s_used = 0.0;
};

/// Smallest constants realizing the radial decay bounds on the grid.
PointwiseBounds pointwise_bound_checks(const RadialProfile& profile, double s = 0.0);

struct DecayReport {
    double fitted_exponent = 0.0;
    double target = 0.0; // (N-p)/(p-1)
    double rel_error = 0.0;
    double c_lower = 0.0, c_upper = 0.0; // two-sided envelope constants
};

/// Tail exponent of a zero-mass groundstate against the fast-decay rate.
DecayReport decay_exponent_check(const RadialProfile& profile);

/// Fitted constants (C1, C2) of the two-sided scale sandwich
/// sigma^{-(p*-p)/(p(l-p*))} <= C1 lambda and lambda <= C2 C1 eps^{-1/p} sigma^{1/p}.
std::pair<double, double> sandwich_constants(const SweepTable& table);

/// Smallest ratio of the optimally rescaled profile to the lower barrier
/// r^{-(N-p)/(p-1)} exp(-(eps S)^{1/p} lambda r) over the far-field window.
double lower_barrier_constant(const RadialProfile& v, double eps, double S, double lambda);

} // namespace gslab
