#pragma once

#include <string>
#include <vector>

#include "gslab/errors.hpp"

namespace gslab {

/// Critical Sobolev exponent pN/(N-p). Requires 1 < p < N.
double p_star(int N, double p);

/// Exponents of the quasilinear model and the small parameter.
///
/// The reference equation is
///   -div(|grad u|^{p-2} grad u) + eps u^{p-1} - u^{q-1} + u^{l-1} = 0
/// with 1 < p < N and p < q < l. eps = 0 is permitted only for limit
/// equations that ignore it.
struct ProblemParams {
    int N = 3;
    double p = 2.0;
    double q = 4.0;
    double l = 6.0;
    double eps = 0.0;

    double pstar() const { return p_star(N, p); }
    void validate() const; // throws ParamError
};

enum class RegimeKind { Subcritical, Critical, Supercritical };

/// Dimension branch of the critical regime, set by the sign of p^2 - N.
enum class DimensionBranch { BelowSqrtN, EqualSqrtN, AboveSqrtN };

struct Regime {
    RegimeKind kind = RegimeKind::Subcritical;
    DimensionBranch branch = DimensionBranch::BelowSqrtN; // critical only
    /// Two-sided rate estimates available for this (N, p) combination.
    bool matching_bounds_proven = true;
};

/// Relative tolerance for deciding q == p* and p^2 == N.
inline constexpr double kCriticalTol = 1e-12;

Regime classify_regime(const ProblemParams& params);

inline bool is_critical(const ProblemParams& params) {
    return classify_regime(params).kind == RegimeKind::Critical;
}

/// Which member of the model family the right-hand side g represents,
/// reading the equation as -Delta_p u = g(u).
enum class EquationKind {
    FullProblem,       // g = -eps s^{p-1} + s^{q-1} - s^{l-1}
    CanonicalRescaled, // g = -s^{p-1} + s^{q-1} - eps^{(l-q)/(q-p)} s^{l-1}
    PositiveMassLimit, // g = -s^{p-1} + s^{q-1}
    ZeroMassLimit,     // g = s^{q-1} - s^{l-1}
    EmdenFowler,       // g = s^{p*-1}
};

std::string to_string(EquationKind kind);
EquationKind equation_kind_from_string(const std::string& name);

/// One monomial of the right-hand side: coef * s^expo on s >= 0.
struct PowerTerm {
    double coef = 0.0;
    double expo = 0.0;
};

/// Monomial decomposition of g for the given kind, exponents ascending.
std::vector<PowerTerm> rhs_terms(const ProblemParams& params, EquationKind kind);

/// g(s) for s >= 0; rejects negative s.
double f_eval(const ProblemParams& params, EquationKind kind, double s);

/// Antiderivative of g with F(0) = 0.
double F_eval(const ProblemParams& params, EquationKind kind, double s);

/// k = l(p*-p) / (p(l-p*)); defined in the critical regime with l > p*.
double k_factor(const ProblemParams& params);

/// Largest eps for which F_eps still has a positive part, i.e. the
/// existence threshold of the full problem. Depends on (p, q, l) only.
double eps_star(const ProblemParams& params);

/// Predicted small-eps exponents for the detected regime. Laws are of the
/// form C * eps^expo * log(1/eps)^log_power; log powers vanish except on
/// the p = sqrt(N) branch.
struct RatePrediction {
    Regime regime;
    double lambda_exponent = 0.0;
    double lambda_log_power = 0.0;
    /// Exponent of u_eps(0) obtained by composing the lambda rate with
    /// u_eps(0) = lambda^{-(N-p)/p} v_eps(0).
    double u0_exponent_consistent = 0.0;
    /// Exponent of u_eps(0) as printed in the source results.
    double u0_exponent_printed = 0.0;
    double sigma_exponent = 0.0;
    double sigma_log_power = 0.0;
    bool matching_bounds_proven = true;
    std::string note; // non-fatal warning when two-sided bounds are open
};

RatePrediction predicted_rates(const ProblemParams& params);

/// eps^expo * log(1/eps)^log_power, the constant-free law value.
double power_log_law(double eps, double expo, double log_power);

} // namespace gslab
