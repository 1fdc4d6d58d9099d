#include "gslab/shooting.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "gslab/quadrature.hpp"

namespace gslab {

namespace {

using Vec2 = std::array<double, 2>; // (u, m)

bool zero_mass_kind(EquationKind kind) {
    return kind == EquationKind::ZeroMassLimit || kind == EquationKind::EmdenFowler;
}

// odd extension of the nonlinearity; RK stages may probe u < 0 transiently
struct RadialSystem {
    int N;
    double p;
    std::vector<PowerTerm> terms;

    double g(double u) const {
        const double s = std::abs(u);
        if (s == 0.0) return 0.0;
        double v = 0.0;
        for (const auto& t : terms) v += t.coef * std::pow(s, t.expo);
        return u >= 0.0 ? v : -v;
    }
    double uprime(double m, double r) const {
        if (m == 0.0) return 0.0;
        const double w = std::abs(m) * ipow(r, 1 - N); // |u'|^{p-1}
        const double up = (p == 2.0) ? w : std::pow(w, 1.0 / (p - 1.0));
        return m > 0.0 ? up : -up;
    }
    Vec2 rhs(double r, const Vec2& y) const {
        return {uprime(y[1], r), -ipow(r, N - 1) * g(y[0])};
    }
};

// Dormand-Prince 5(4) with the standard quartic dense output.
struct DormandPrince {
    const RadialSystem& sys;
    explicit DormandPrince(const RadialSystem& s) : sys(s) {}

    std::array<Vec2, 7> k{};
    Vec2 y1{};
    Vec2 err{};
    std::array<Vec2, 5> rcont{};

    bool attempt(double r, const Vec2& y0, double h) {
        static constexpr double a21 = 1.0 / 5;
        static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                                a53 = 64448.0 / 6561, a54 = -212.0 / 729;
        static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                                a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                                a65 = -5103.0 / 18656;
        static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                                b5 = -2187.0 / 6784, b6 = 11.0 / 84;
        static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                                e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

        auto fma2 = [](const Vec2& y, double h_, std::initializer_list<std::pair<double, const Vec2*>> terms_) {
            Vec2 out = y;
            for (const auto& [c, kk] : terms_) {
                out[0] += h_ * c * (*kk)[0];
                out[1] += h_ * c * (*kk)[1];
            }
            return out;
        };

        k[1] = sys.rhs(r + h / 5, fma2(y0, h, {{a21, &k[0]}}));
        k[2] = sys.rhs(r + 3 * h / 10, fma2(y0, h, {{a31, &k[0]}, {a32, &k[1]}}));
        k[3] = sys.rhs(r + 4 * h / 5, fma2(y0, h, {{a41, &k[0]}, {a42, &k[1]}, {a43, &k[2]}}));
        k[4] = sys.rhs(r + 8 * h / 9,
                       fma2(y0, h, {{a51, &k[0]}, {a52, &k[1]}, {a53, &k[2]}, {a54, &k[3]}}));
        k[5] = sys.rhs(r + h, fma2(y0, h, {{a61, &k[0]}, {a62, &k[1]}, {a63, &k[2]},
                                           {a64, &k[3]}, {a65, &k[4]}}));
        y1 = fma2(y0, h, {{b1, &k[0]}, {b3, &k[2]}, {b4, &k[3]}, {b5, &k[4]}, {b6, &k[5]}});
        k[6] = sys.rhs(r + h, y1);
        for (int i = 0; i < 2; ++i)
            err[i] = h * (e1 * k[0][i] + e3 * k[2][i] + e4 * k[3][i] + e5 * k[4][i] +
                          e6 * k[5][i] + e7 * k[6][i]);
        return std::isfinite(y1[0]) && std::isfinite(y1[1]) && std::isfinite(err[0]) &&
               std::isfinite(err[1]);
    }

    void build_dense(const Vec2& y0, double h) {
        static constexpr double d1 = -12715105075.0 / 11282082432.0;
        static constexpr double d3 = 87487479700.0 / 32700410799.0;
        static constexpr double d4 = -10690763975.0 / 1880347072.0;
        static constexpr double d5 = 701980252875.0 / 199316789632.0;
        static constexpr double d6 = -1453857185.0 / 822651844.0;
        static constexpr double d7 = 69997945.0 / 29380423.0;
        for (int i = 0; i < 2; ++i) {
            const double ydiff = y1[i] - y0[i];
            const double bspl = h * k[0][i] - ydiff;
            rcont[0][i] = y0[i];
            rcont[1][i] = ydiff;
            rcont[2][i] = bspl;
            rcont[3][i] = ydiff - h * k[6][i] - bspl;
            rcont[4][i] = h * (d1 * k[0][i] + d3 * k[2][i] + d4 * k[3][i] + d5 * k[4][i] +
                               d6 * k[5][i] + d7 * k[6][i]);
        }
    }

    Vec2 dense(double theta) const {
        Vec2 out;
        const double t1 = 1.0 - theta;
        for (int i = 0; i < 2; ++i)
            out[i] = rcont[0][i] +
                     theta * (rcont[1][i] +
                              t1 * (rcont[2][i] +
                                    theta * (rcont[3][i] + t1 * rcont[4][i])));
        return out;
    }
};

// root of fn(theta) = 0 on [lo, hi] with fn(lo), fn(hi) of opposite sign
template <class F>
double theta_root(F&& fn, double lo, double hi, double h, double r_base) {
    double flo = fn(lo);
    const double tol = 1e-12 * std::max(1.0, r_base) / std::max(h, 1e-300);
    for (int i = 0; i < 120 && hi - lo > tol; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = fn(mid);
        if ((flo <= 0.0) == (fm <= 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

struct SlowDecayWatch {
    bool enabled = false;
    double theta_mid = 0.0; // midpoint of the fast/slow log-slope band
    double u_gate = 0.0;    // engage once u < u_gate
    double window_start = -1.0;

    // returns the window-start radius when the slow branch is confirmed
    double update(double r, double u, double du) {
        if (!enabled || u <= 0.0 || du >= 0.0) {
            window_start = -1.0;
            return -1.0;
        }
        if (u >= u_gate) return -1.0;
        const double slope = -r * du / u;
        if (slope >= theta_mid) {
            window_start = -1.0;
            return -1.0;
        }
        if (window_start < 0.0) {
            window_start = r;
            return -1.0;
        }
        return (r >= 2.0 * window_start) ? window_start : -1.0;
    }
};

} // namespace

double IntegratorConfig::r_start_for(double a, const ProblemParams& params) const {
    return r_start_factor * std::max(1.0, std::pow(a, (params.p - params.q) / params.p));
}

double default_r_max(const ProblemParams& params, EquationKind kind) {
    switch (kind) {
    case EquationKind::FullProblem:
        return 200.0 * std::pow(params.eps, -1.0 / params.p);
    case EquationKind::CanonicalRescaled:
    case EquationKind::PositiveMassLimit:
        return 200.0;
    case EquationKind::ZeroMassLimit:
    case EquationKind::EmdenFowler:
        return 1e4;
    }
    return 1e4;
}

std::pair<double, double> shooting_domain(const ProblemParams& params, EquationKind kind) {
    params.validate();
    const double p = params.p, q = params.q, l = params.l;
    switch (kind) {
    case EquationKind::FullProblem:
    case EquationKind::CanonicalRescaled: {
        const double mass = (kind == EquationKind::FullProblem) ? params.eps : 1.0;
        const double cl = (kind == EquationKind::FullProblem)
                              ? 1.0
                              : std::pow(params.eps, (l - q) / (q - p));
        if (!(mass > 0.0)) throw ParamError("positive-mass kind requires eps > 0");
        // phi(s) = s^{q-p} - cl s^{l-p} must exceed the mass coefficient somewhere
        auto phi = [&](double s) {
            return std::pow(s, q - p) - cl * std::pow(s, l - p);
        };
        const double s_m = std::pow((q - p) / (cl * (l - p)), 1.0 / (l - q));
        if (!(phi(s_m) > mass))
            throw SolverError("no shooting bracket: eps >= eps_* "
                              "(no finite-energy groundstates at this eps)");
        auto bisect = [](auto&& fn, double lo, double hi) {
            for (int i = 0; i < 200; ++i) {
                const double mid = 0.5 * (lo + hi);
                (fn(mid) > 0.0 ? lo : hi) = mid;
            }
            return 0.5 * (lo + hi);
        };
        // largest zero of g and the zero of F bracketing the admissible range
        double hi = s_m;
        while (phi(hi) > mass) hi *= 2.0;
        const double s_plus = bisect([&](double s) { return phi(s) - mass; }, s_m, hi);
        double lo = s_m;
        while (phi(lo) > mass) lo *= 0.5;
        const double s_minus =
            bisect([&](double s) { return mass - phi(s); }, lo, s_m);
        auto Fv = [&](double s) {
            return -mass * std::pow(s, p) / p + std::pow(s, q) / q -
                   cl * std::pow(s, l) / l;
        };
        if (!(Fv(s_plus) > 0.0))
            throw SolverError("no shooting bracket: eps >= eps_* "
                              "(no finite-energy groundstates at this eps)");
        const double zeta =
            bisect([&](double s) { return -Fv(s); }, s_minus, s_plus);
        return {zeta * (1.0 + 1e-9), s_plus * (1.0 - 1e-9)};
    }
    case EquationKind::PositiveMassLimit: {
        const double zeta = std::pow(q / p, 1.0 / (q - p));
        return {zeta * (1.0 + 1e-9), 1e7};
    }
    case EquationKind::ZeroMassLimit:
        return {1e-4, 1.0 - 1e-9};
    case EquationKind::EmdenFowler:
        throw ParamError("the dilation family admits a continuum of groundstates; "
                         "use the closed form");
    }
    throw ParamError("unhandled equation kind");
}

RadialProfile integrate(const ProblemParams& params, EquationKind kind, double a,
                        const IntegratorConfig& config) {
    params.validate();
    if (!(a > 0.0)) throw ParamError("integrate requires a > 0");
    RadialSystem sys{params.N, params.p, rhs_terms(params, kind)};
    const double ga = sys.g(a);
    if (!(ga > 0.0))
        throw SolverError("series start invalid: g(a) <= 0 at the central value");

    const double r_max = config.r_max > 0.0 ? config.r_max : default_r_max(params, kind);
    // shrinking the series start below its natural scale is always safe
    const double r0 = std::min(config.r_start_for(a, params), 1e-3 * r_max);
    if (!(r0 > 0.0) || !(r0 < 0.25 * r_max))
        throw ParamError("r_start must be positive and well below r_max");

    const double u_floor = config.u_floor_rel * a;
    const double abs_u = config.abs_tol * std::max(1.0, a);

    RadialProfile prof;
    prof.params = params;
    prof.kind = kind;
    prof.a = a;

    // two-term origin series, started at r0/2 so the value at r0 doubles as a
    // Richardson check of the truncation
    const double cbase = std::pow(ga / params.N, 1.0 / (params.p - 1.0));
    const double pp = params.p / (params.p - 1.0);
    auto series_u = [&](double r) {
        return a - (params.p - 1.0) / params.p * cbase * std::pow(r, pp);
    };
    auto series_m = [&](double r) { return -ga * ipow(r, params.N) / params.N; };

    double r = 0.5 * r0;
    Vec2 y{series_u(r), series_m(r)};
    double h = 0.05 * r;

    DormandPrince stepper(sys);
    stepper.k[0] = sys.rhs(r, y);

    SlowDecayWatch slow;
    if (kind == EquationKind::ZeroMassLimit) {
        const double kappa = (params.N - params.p) / (params.p - 1.0);
        const double slow_rate = (params.N - params.p) / params.p;
        slow.enabled = true;
        slow.theta_mid = 0.5 * (kappa + slow_rate);
        slow.u_gate = 0.02 * a;
    }

    bool emitted_start = false;
    bool stopped = false;
    long steps = 0;

    auto emit = [&](double rr, const Vec2& yy) {
        prof.grid.push_back(rr);
        prof.values.push_back(yy[0]);
        prof.slopes.push_back(sys.uprime(yy[1], rr));
        prof.flux.push_back(yy[1]);
    };

    while (!stopped) {
        if (++steps > config.max_steps)
            throw SolverError("integration exceeded the step budget");
        if (r + h > r_max) h = r_max - r;

        if (!stepper.attempt(r, y, h)) {
            h *= 0.25;
            if (h < 1e-14 * std::max(1.0, r))
                throw SolverError("integrator step size underflow");
            continue;
        }
        double err = 0.0;
        {
            const double sc_u =
                abs_u + config.rel_tol * std::max(std::abs(y[0]), std::abs(stepper.y1[0]));
            const double sc_m =
                1e-300 + config.rel_tol * std::max(std::abs(y[1]), std::abs(stepper.y1[1]));
            const double eu = stepper.err[0] / sc_u;
            const double em = stepper.err[1] / sc_m;
            err = std::sqrt(0.5 * (eu * eu + em * em));
        }
        if (err > 1.0) {
            h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
            if (h < 1e-14 * std::max(1.0, r))
                throw SolverError("integrator step size underflow");
            continue;
        }

        stepper.build_dense(y, h);

        // place interior output nodes densely enough for quadrature
        int n_sub = 2;
        {
            const double up0 = sys.uprime(y[1], r), up1 = sys.uprime(stepper.y1[1], r + h);
            const double mp0 = -ipow(r, params.N - 1) * sys.g(y[0]);
            const double mp1 = -ipow(r + h, params.N - 1) * sys.g(stepper.y1[0]);
            double ell = std::numeric_limits<double>::infinity();
            auto scale = [](double v, double dv) {
                return (dv == 0.0) ? std::numeric_limits<double>::infinity()
                                   : std::abs(v) / std::abs(dv);
            };
            ell = std::min({scale(y[0], up0), scale(stepper.y1[0], up1),
                            scale(y[1], mp0), scale(stepper.y1[1], mp1)});
            if (std::isfinite(ell) && ell > 0.0)
                n_sub = std::clamp(static_cast<int>(std::ceil(h / (0.04 * ell))), 2, 32);
        }

        double theta_prev = 0.0;
        Vec2 y_prev = y;
        for (int j = 1; j <= n_sub && !stopped; ++j) {
            const double theta = static_cast<double>(j) / n_sub;
            const Vec2 yj = (j == n_sub) ? stepper.y1 : stepper.dense(theta);
            const double rj = r + theta * h;

            // floor crossing: stop if the solution is decaying gently
            if (y_prev[0] > u_floor && yj[0] <= u_floor) {
                const double th = theta_root(
                    [&](double t) { return stepper.dense(t)[0] - u_floor; }, theta_prev,
                    theta, h, r);
                const Vec2 ye = stepper.dense(th);
                const double re = r + th * h;
                const double du = sys.uprime(ye[1], re);
                const bool gentle =
                    du < 0.0 && ye[0] / std::max(-du, 1e-300) >= 1e-3 * re;
                if (gentle) {
                    if (!emitted_start) { // floor before r0: degenerate start
                        emit(re, ye);
                        emitted_start = true;
                    } else {
                        emit(re, ye);
                    }
                    prof.events.reached_floor = true;
                    stopped = true;
                    break;
                }
            }
            // zero crossing: overshoot
            if (y_prev[0] > 0.0 && yj[0] <= 0.0) {
                const double th = theta_root([&](double t) { return stepper.dense(t)[0]; },
                                             theta_prev, theta, h, r);
                const Vec2 ye = stepper.dense(th);
                const double re = r + th * h;
                emit(re, {0.0, ye[1]});
                prof.events.r_cross_zero = re;
                stopped = true;
                break;
            }
            // flux turning positive: undershoot (or floor noise)
            if (y_prev[1] < 0.0 && yj[1] >= 0.0) {
                const double th = theta_root([&](double t) { return stepper.dense(t)[1]; },
                                             theta_prev, theta, h, r);
                const Vec2 ye = stepper.dense(th);
                const double re = r + th * h;
                emit(re, {ye[0], 0.0});
                if (ye[0] > 3.0 * u_floor)
                    prof.events.r_flux_turn = re;
                else
                    prof.events.reached_floor = true;
                stopped = true;
                break;
            }

            // regular node emission, with the exact r0 node inserted first
            if (!emitted_start) {
                if (rj >= r0) {
                    const double th0 = (r0 - r) / h;
                    const Vec2 y0v = (th0 <= 0.0) ? y : stepper.dense(th0);
                    emit(r0, y0v);
                    prof.series_check = std::abs(y0v[0] - series_u(r0)) / a;
                    emitted_start = true;
                    if (rj > r0 * (1.0 + 1e-12)) emit(rj, yj);
                }
            } else {
                emit(rj, yj);
            }

            if (emitted_start && !stopped) {
                const double du = sys.uprime(yj[1], rj);
                const double win = slow.update(rj, yj[0], du);
                if (win > 0.0) {
                    prof.events.r_slow_decay = win;
                    stopped = true;
                    break;
                }
            }
            theta_prev = theta;
            y_prev = yj;
        }
        if (stopped) break;

        r += h;
        y = stepper.y1;
        stepper.k[0] = stepper.k[6]; // FSAL
        if (r >= r_max * (1.0 - 1e-14)) {
            prof.events.reached_rmax = true;
            break;
        }
        h *= std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 1.0, 6.0);
    }

    if (prof.grid.empty()) {
        emit(r, y);
    }
    prof.classification = classify(prof);
    return prof;
}

ShotClass classify(const RadialProfile& profile) {
    if (profile.classification == ShotClass::Groundstate) return ShotClass::Groundstate;
    if (profile.events.r_cross_zero >= 0.0) return ShotClass::Overshoot;
    if (profile.events.r_flux_turn >= 0.0) return ShotClass::Undershoot;
    if (profile.events.r_slow_decay >= 0.0) return ShotClass::Undershoot;
    return ShotClass::Inconclusive;
}

TailModel attach_tail(const RadialProfile& profile) {
    if (profile.classification != ShotClass::Groundstate)
        throw ParamError("attach_tail expects a groundstate profile");
    if (profile.size() < 16) throw SolverError("profile too short for a tail fit");
    if (!(profile.u_end() <= 1e-6 * profile.a))
        throw SolverError("insufficient tail: grid ends before u drops below 1e-6 a");

    const double r_hi = profile.r_end();
    const double r_lo = r_hi / 10.0;
    const bool poly = zero_mass_kind(profile.kind);

    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < profile.size(); ++i) {
        if (profile.grid[i] < r_lo) continue;
        if (!(profile.values[i] > 0.0)) continue;
        const double x = poly ? std::log(profile.grid[i]) : profile.grid[i];
        const double yv = std::log(profile.values[i]);
        sx += x;
        sy += yv;
        sxx += x * x;
        sxy += x * yv;
        syy += yv * yv;
        ++n;
    }
    if (n < 8) throw SolverError("insufficient tail: too few nodes in the last decade");
    const double det = n * sxx - sx * sx;
    const double slope = (n * sxy - sx * sy) / det;
    const double intercept = (sy - slope * sx) / n;
    double ss_res = 0.0, ss_tot = 0.0;
    const double ybar = sy / n;
    for (std::size_t i = 0; i < profile.size(); ++i) {
        if (profile.grid[i] < r_lo || !(profile.values[i] > 0.0)) continue;
        const double x = poly ? std::log(profile.grid[i]) : profile.grid[i];
        const double yv = std::log(profile.values[i]);
        const double fit = intercept + slope * x;
        ss_res += (yv - fit) * (yv - fit);
        ss_tot += (yv - ybar) * (yv - ybar);
    }
    TailModel tail;
    tail.kind = poly ? TailKind::Polynomial : TailKind::Exponential;
    tail.rate = -slope;
    tail.amplitude = std::exp(intercept);
    tail.r_squared = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 0.0;
    tail.fit_r_lo = r_lo;
    tail.fit_r_hi = r_hi;
    return tail;
}

namespace {

struct Shot {
    RadialProfile profile;
    ShotClass cls = ShotClass::Inconclusive;
};

// classify with the horizon extended when the default cannot discriminate
Shot classify_shot(const ProblemParams& params, EquationKind kind, double a,
                   const IntegratorConfig& config, double r_max_cap) {
    IntegratorConfig cfg = config;
    if (cfg.r_max <= 0.0) cfg.r_max = default_r_max(params, kind);
    for (;;) {
        Shot shot;
        shot.profile = integrate(params, kind, a, cfg);
        shot.cls = classify(shot.profile);
        if (shot.cls != ShotClass::Inconclusive || shot.profile.events.reached_floor ||
            cfg.r_max >= r_max_cap)
            return shot;
        cfg.r_max = std::min(cfg.r_max * 16.0, r_max_cap);
    }
}

} // namespace

RadialProfile find_groundstate(const ProblemParams& params, EquationKind kind,
                               const IntegratorConfig& config) {
    if (kind == EquationKind::EmdenFowler)
        throw ParamError("the dilation family admits a continuum of groundstates; "
                         "use the closed form");
    auto [lo, hi] = shooting_domain(params, kind);
    const bool zero_mass = zero_mass_kind(kind);
    const double base_rmax = config.r_max > 0.0 ? config.r_max : default_r_max(params, kind);
    const double r_max_cap = zero_mass ? 1e8 : 8.0 * base_rmax;

    // geometric scan of the admissible interval to locate a dichotomy flip
    const int n_scan = 24;
    std::vector<double> scan_a;
    std::vector<ShotClass> scan_c;
    std::string warning;

    auto run_scan = [&](double slo, double shi) {
        scan_a.clear();
        scan_c.clear();
        const double ratio = std::pow(shi / slo, 1.0 / (n_scan - 1));
        double av = slo;
        for (int i = 0; i < n_scan; ++i) {
            Shot s = classify_shot(params, kind, av, config, r_max_cap);
            scan_a.push_back(av);
            scan_c.push_back(s.cls);
            av *= ratio;
        }
    };

    run_scan(lo, hi);
    auto find_flips = [&]() {
        std::vector<int> flips;
        for (int i = 0; i + 1 < n_scan; ++i) {
            if (scan_c[i] == ShotClass::Inconclusive ||
                scan_c[i + 1] == ShotClass::Inconclusive)
                continue;
            if (scan_c[i] != scan_c[i + 1]) flips.push_back(i);
        }
        return flips;
    };

    std::vector<int> flips = find_flips();
    int expansions = 0;
    while (flips.empty() && expansions < 5) {
        ++expansions;
        if (kind == EquationKind::PositiveMassLimit) {
            hi *= 16.0;
        } else if (kind == EquationKind::ZeroMassLimit) {
            lo *= 1e-2;
        } else {
            break;
        }
        run_scan(lo, hi);
        flips = find_flips();
    }
    if (flips.empty())
        throw SolverError("no shooting bracket: eps >= eps_* or the parameters "
                          "admit no groundstate");
    if (flips.size() > 1) {
        std::ostringstream os;
        os << "multiple shooting brackets found (" << flips.size()
           << "); using the lowest. candidates near a = ";
        for (int f : flips) os << scan_a[f] << " ";
        warning = os.str();
    }

    const int f = flips.front();
    double a_under, a_over;
    if (scan_c[f] == ShotClass::Undershoot) {
        a_under = scan_a[f];
        a_over = scan_a[f + 1];
    } else {
        a_under = scan_a[f + 1];
        a_over = scan_a[f];
    }

    std::vector<std::pair<double, double>> history;
    history.emplace_back(a_under, a_over);
    int iterations = 0;
    double a_final = std::sqrt(a_under * a_over);

    auto rel_width = [&]() {
        return std::abs(a_over - a_under) / std::max(a_over, a_under);
    };

    while (rel_width() > config.bisection_tol && iterations < config.max_bisections) {
        ++iterations;
        const double mid = std::sqrt(a_under * a_over);
        Shot s = classify_shot(params, kind, mid, config, r_max_cap);
        if (s.cls == ShotClass::Undershoot) {
            a_under = mid;
        } else if (s.cls == ShotClass::Overshoot) {
            a_over = mid;
        } else {
            // clean decay to the floor, or beyond the horizon cap: the shot
            // cannot be discriminated further, so the bracket is resolved
            a_final = mid;
            if (!s.profile.events.reached_floor && rel_width() > 1e-6 && warning.empty())
                warning = "bisection stalled on an inconclusive shot at the horizon";
            break;
        }
        history.emplace_back(a_under, a_over);
        a_final = std::sqrt(a_under * a_over);
    }

    // final pass: integrate the converged value with a floor low enough for
    // the tail fit but above the bracket-resolution contamination level
    const double w = rel_width();
    IntegratorConfig fin = config;
    if (fin.r_max <= 0.0) fin.r_max = base_rmax;
    if (zero_mass) {
        fin.r_max = std::max(fin.r_max, 3e8);
        fin.u_floor_rel = std::clamp(100.0 * w, 1e-7, 0.99e-6);
    } else {
        fin.u_floor_rel = std::clamp(300.0 * std::sqrt(w), 3e-7, 0.99e-6);
    }

    RadialProfile prof;
    for (int attempt = 0;; ++attempt) {
        prof = integrate(params, kind, a_final, fin);
        const ShotClass c = classify(prof);
        if (c == ShotClass::Inconclusive) break;
        if (attempt >= 3) {
            prof.warning = "final shot classified " + to_string(c) +
                           "; tail may be contaminated";
            break;
        }
        fin.u_floor_rel = std::min(fin.u_floor_rel * 3.0, 0.99e-6);
    }

    prof.classification = ShotClass::Groundstate;
    prof.a = a_final;
    prof.bracket_width = w;
    prof.bisections = iterations;
    prof.bracket_history = std::move(history);
    if (!warning.empty())
        prof.warning = prof.warning.empty() ? warning : prof.warning + "; " + warning;

    prof.tail = attach_tail(prof);
    if (prof.tail.r_squared < 0.99 && prof.warning.empty())
        prof.warning = "tail fit quality is low (r^2 < 0.99)";
    if (zero_mass) {
        const double kappa = (params.N - params.p) / (params.p - 1.0);
        if (std::abs(prof.tail.rate - kappa) > 0.3 * kappa && prof.warning.empty())
            prof.warning = "tail exponent deviates from the fast-decay rate";
    }
    if (kind == EquationKind::FullProblem && !(profile_max(prof) < 1.0))
        throw SolverError("groundstate exceeds the rest range (max u >= 1)");
    return prof;
}

} // namespace gslab
