#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gslab/problem.hpp"

namespace gslab {

/// Outcome of one shot of the radial initial value problem.
enum class ShotClass {
    Groundstate,  // assigned by find_groundstate after bisection + tail fit
    Overshoot,    // u crossed zero with u' < 0
    Undershoot,   // u' turned positive, or decay degenerated to the slow branch
    Inconclusive, // horizon or floor reached without a classification event
};

std::string to_string(ShotClass c);

enum class TailKind { Exponential, Polynomial, NoTail };

/// Far-field model of a profile: C e^{-rate r} or C r^{-rate}.
struct TailModel {
    TailKind kind = TailKind::NoTail;
    double rate = 0.0;      // decay rate (exponential) or exponent (polynomial)
    double amplitude = 0.0; // C
    double r_squared = 0.0; // quality of the log-linear fit
    double fit_r_lo = 0.0;
    double fit_r_hi = 0.0;

    /// Model value at radius r (0 for NoTail).
    double eval(double r) const;
};

/// Classification events recorded while integrating outward.
struct ShotEvents {
    double r_cross_zero = -1.0; // u hit zero with negative flux
    double r_flux_turn = -1.0;  // flux crossed zero with u still positive
    double r_slow_decay = -1.0; // log-slope settled below the fast-decay band
    bool reached_floor = false; // u fell below the relative floor, still decaying
    bool reached_rmax = false;
};

/// A solved (or sampled) radial solution u(r) with its flux
/// m(r) = r^{N-1} |u'|^{p-2} u'.
struct RadialProfile {
    ProblemParams params;
    EquationKind kind = EquationKind::PositiveMassLimit;
    double a = 0.0; // central value u(0)

    std::vector<double> grid;   // strictly increasing, grid.front() = r_start
    std::vector<double> values; // u_i >= 0
    std::vector<double> slopes; // u'_i recovered from the flux
    std::vector<double> flux;   // m_i

    ShotClass classification = ShotClass::Inconclusive;
    TailModel tail;
    ShotEvents events;

    // solver diagnostics
    double bracket_width = 0.0; // relative width at bisection convergence
    int bisections = 0;
    std::vector<std::pair<double, double>> bracket_history; // (under, over)
    double series_check = 0.0; // start-series Richardson discrepancy
    std::string warning;

    std::size_t size() const { return grid.size(); }
    double r_end() const { return grid.empty() ? 0.0 : grid.back(); }
    double u_end() const { return values.empty() ? 0.0 : values.back(); }
};

/// Represents v(x) = amp * u(stretch * x) on the transformed grid.
/// Values, slopes, flux and tail are mapped exactly; the (params, kind)
/// tag of the result is supplied by the caller.
RadialProfile profile_scale(const RadialProfile& u, double amp, double stretch,
                            const ProblemParams& new_params, EquationKind new_kind);

/// Largest value of the profile (groundstates are decreasing, so values[0]).
double profile_max(const RadialProfile& profile);

/// Relative residual of the profile against -Delta_p u = g(u) for the given
/// equation, evaluated by finite differences of the stored flux at interior
/// nodes. Returns the median over nodes with meaningful magnitude.
double equation_residual(const RadialProfile& profile, const ProblemParams& params,
                         EquationKind kind);

} // namespace gslab
