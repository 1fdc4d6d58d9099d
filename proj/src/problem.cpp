#include "gslab/problem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gslab {

double p_star(int N, double p) {
    if (!(p > 1.0) || !(p < static_cast<double>(N)))
        throw ParamError("p_star requires 1 < p < N, got p = " + std::to_string(p) +
                         ", N = " + std::to_string(N));
    return p * N / (N - p);
}

void ProblemParams::validate() const {
    if (N < 2) throw ParamError("dimension N must be >= 2");
    if (!(p > 1.0) || !(p < static_cast<double>(N)))
        throw ParamError("exponent p must satisfy 1 < p < N");
    if (!(q > p)) throw ParamError("exponent q must satisfy q > p");
    if (!(l > q)) throw ParamError("exponent l must satisfy l > q");
    if (!(eps >= 0.0) || !std::isfinite(eps))
        throw ParamError("eps must be finite and >= 0");
    const double ps = pstar();
    if (!(ps > p) || !std::isfinite(ps))
        throw ParamError("critical exponent p* is not finite");
}

namespace {

bool nearly_equal(double x, double y, double rel) {
    return std::abs(x - y) <= rel * std::max(std::abs(x), std::abs(y));
}

} // namespace

Regime classify_regime(const ProblemParams& params) {
    params.validate();
    Regime regime;
    const double ps = params.pstar();
    if (nearly_equal(params.q, ps, kCriticalTol)) {
        regime.kind = RegimeKind::Critical;
        const double p2 = params.p * params.p;
        const double N = static_cast<double>(params.N);
        if (nearly_equal(p2, N, kCriticalTol))
            regime.branch = DimensionBranch::EqualSqrtN;
        else if (p2 < N)
            regime.branch = DimensionBranch::BelowSqrtN;
        else
            regime.branch = DimensionBranch::AboveSqrtN;

        switch (regime.branch) {
        case DimensionBranch::BelowSqrtN:
            regime.matching_bounds_proven = true;
            break;
        case DimensionBranch::EqualSqrtN:
            regime.matching_bounds_proven = (params.N >= 4);
            break;
        case DimensionBranch::AboveSqrtN:
            regime.matching_bounds_proven =
                (params.N >= 4 && params.p < 0.5 * (params.N + 1)) ||
                (params.N == 3 && nearly_equal(params.p, 2.0, kCriticalTol));
            break;
        }
    } else if (params.q < ps) {
        regime.kind = RegimeKind::Subcritical;
        regime.matching_bounds_proven = true;
    } else {
        regime.kind = RegimeKind::Supercritical;
        regime.matching_bounds_proven = true;
    }
    return regime;
}

std::string to_string(EquationKind kind) {
    switch (kind) {
    case EquationKind::FullProblem: return "full";
    case EquationKind::CanonicalRescaled: return "rescaled";
    case EquationKind::PositiveMassLimit: return "positive_mass";
    case EquationKind::ZeroMassLimit: return "zero_mass";
    case EquationKind::EmdenFowler: return "emden_fowler";
    }
    return "unknown";
}

EquationKind equation_kind_from_string(const std::string& name) {
    if (name == "full") return EquationKind::FullProblem;
    if (name == "rescaled") return EquationKind::CanonicalRescaled;
    if (name == "positive_mass") return EquationKind::PositiveMassLimit;
    if (name == "zero_mass") return EquationKind::ZeroMassLimit;
    if (name == "emden_fowler") return EquationKind::EmdenFowler;
    throw ConfigError("unknown equation kind '" + name + "'");
}

std::vector<PowerTerm> rhs_terms(const ProblemParams& params, EquationKind kind) {
    params.validate();
    const double p = params.p, q = params.q, l = params.l, eps = params.eps;
    switch (kind) {
    case EquationKind::FullProblem:
        if (!(eps > 0.0)) throw ParamError("full problem requires eps > 0");
        return {{-eps, p - 1.0}, {1.0, q - 1.0}, {-1.0, l - 1.0}};
    case EquationKind::CanonicalRescaled: {
        if (!(eps > 0.0)) throw ParamError("rescaled problem requires eps > 0");
        const double mu = std::pow(eps, (l - q) / (q - p));
        return {{-1.0, p - 1.0}, {1.0, q - 1.0}, {-mu, l - 1.0}};
    }
    case EquationKind::PositiveMassLimit:
        return {{-1.0, p - 1.0}, {1.0, q - 1.0}};
    case EquationKind::ZeroMassLimit:
        return {{1.0, q - 1.0}, {-1.0, l - 1.0}};
    case EquationKind::EmdenFowler:
        return {{1.0, params.pstar() - 1.0}};
    }
    throw ParamError("unhandled equation kind");
}

double f_eval(const ProblemParams& params, EquationKind kind, double s) {
    if (s < 0.0) throw ParamError("f_eval requires s >= 0");
    if (s == 0.0) return 0.0;
    double g = 0.0;
    for (const auto& t : rhs_terms(params, kind)) g += t.coef * std::pow(s, t.expo);
    return g;
}

double F_eval(const ProblemParams& params, EquationKind kind, double s) {
    if (s < 0.0) throw ParamError("F_eval requires s >= 0");
    if (s == 0.0) return 0.0;
    double F = 0.0;
    for (const auto& t : rhs_terms(params, kind))
        F += t.coef / (t.expo + 1.0) * std::pow(s, t.expo + 1.0);
    return F;
}

double k_factor(const ProblemParams& params) {
    const Regime regime = classify_regime(params);
    if (regime.kind != RegimeKind::Critical)
        throw RegimeError("k_factor is defined only in the critical regime (q = p*)");
    const double ps = params.pstar();
    if (!(params.l > ps))
        throw RegimeError("k_factor requires l > p*");
    return params.l * (ps - params.p) / (params.p * (params.l - ps));
}

double eps_star(const ProblemParams& params) {
    ProblemParams base = params;
    base.eps = 0.0;
    base.validate();
    const double p = base.p, q = base.q, l = base.l;

    // phi(s) = s^{q-p} - s^{l-p} is the eps level at which g(s) vanishes.
    auto phi = [&](double s) { return std::pow(s, q - p) - std::pow(s, l - p); };
    const double s_m = std::pow((q - p) / (l - p), 1.0 / (l - q));
    const double phi_max = phi(s_m);

    // Largest s with phi(s) = eps, located right of the hump maximum.
    auto s_plus = [&](double eps) {
        double lo = s_m, hi = s_m;
        while (phi(hi) > eps) hi *= 2.0;
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            (phi(mid) > eps ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };
    auto peak_F = [&](double eps) {
        const double sp = s_plus(eps);
        return -eps * std::pow(sp, p) / p + std::pow(sp, q) / q - std::pow(sp, l) / l;
    };

    double lo = 0.0, hi = phi_max;
    if (peak_F(hi) > 0.0) return hi; // cannot happen for l > q, kept as a guard
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (peak_F(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

RatePrediction predicted_rates(const ProblemParams& params) {
    const Regime regime = classify_regime(params);
    RatePrediction out;
    out.regime = regime;
    out.matching_bounds_proven = regime.matching_bounds_proven;

    const double N = static_cast<double>(params.N);
    const double p = params.p, q = params.q, l = params.l;
    const double ps = params.pstar();

    switch (regime.kind) {
    case RegimeKind::Subcritical:
        out.u0_exponent_consistent = 1.0 / (q - p);
        out.u0_exponent_printed = 1.0 / (q - p);
        out.sigma_exponent = (l - q) / (q - p); // level gap of the rescaled family
        break;

    case RegimeKind::Supercritical:
        out.u0_exponent_consistent = 0.0;
        out.u0_exponent_printed = 0.0;
        if (regime.branch == DimensionBranch::BelowSqrtN) {
            out.sigma_exponent = 1.0;
        } else if (regime.branch == DimensionBranch::EqualSqrtN) {
            out.sigma_exponent = 1.0;
            out.sigma_log_power = 1.0;
        } else {
            out.sigma_exponent = (N - p) / (p * (p - 1.0));
        }
        break;

    case RegimeKind::Critical: {
        switch (regime.branch) {
        case DimensionBranch::BelowSqrtN:
            out.lambda_exponent = -(ps - p) / (p * (l - p));
            out.sigma_exponent = (l - ps) / (l - p);
            out.u0_exponent_printed = l / (l - p);
            break;
        case DimensionBranch::EqualSqrtN:
            out.lambda_exponent = -(ps - p) / (p * (l - p));
            out.lambda_log_power = out.lambda_exponent;
            out.sigma_exponent = (l - ps) / (l - p);
            out.sigma_log_power = out.sigma_exponent;
            out.u0_exponent_printed = l / (l - p);
            break;
        case DimensionBranch::AboveSqrtN: {
            const double denom = (l - ps) * (p - 1.0) + p;
            out.lambda_exponent = -1.0 / denom;
            out.sigma_exponent = (N - p) * (l - ps) / (p * denom);
            out.u0_exponent_printed = (N - p) / (p * denom);
            break;
        }
        }
        out.u0_exponent_consistent = -(N - p) / p * out.lambda_exponent;
        if (!regime.matching_bounds_proven) {
            std::ostringstream msg;
            msg << "two-sided rate bounds are open for N = " << params.N
                << ", p = " << p << "; reported exponents are one-sided";
            out.note = msg.str();
        }
        break;
    }
    }
    return out;
}

double power_log_law(double eps, double expo, double log_power) {
    if (!(eps > 0.0) || !(eps < 1.0))
        throw ParamError("power_log_law requires 0 < eps < 1");
    double v = std::pow(eps, expo);
    if (log_power != 0.0) v *= std::pow(std::log(1.0 / eps), log_power);
    return v;
}

} // namespace gslab
