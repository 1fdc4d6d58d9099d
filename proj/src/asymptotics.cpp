#include "gslab/asymptotics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "gslab/closed_form.hpp"
#include "gslab/quadrature.hpp"

namespace gslab {

RadialProfile canonical_rescale(const RadialProfile& u, double eps) {
    if (!(eps > 0.0)) throw ParamError("canonical_rescale requires eps > 0");
    if (u.kind != EquationKind::FullProblem)
        throw ParamError("canonical_rescale expects a full-problem profile");
    ProblemParams params = u.params;
    params.eps = eps;
    const double amp = std::pow(eps, -1.0 / (params.q - params.p));
    const double stretch = std::pow(eps, -1.0 / params.p);
    return profile_scale(u, amp, stretch, params, EquationKind::CanonicalRescaled);
}

ConcentrationResult concentration_lambda(const RadialProfile& w, double q_star_value) {
    if (w.size() < 3) throw ParamError("concentration_lambda needs a solved profile");
    if (!(q_star_value > 0.0) || !(q_star_value < 1.0))
        throw ParamError("concentration threshold must lie in (0, 1)");
    const double ps = w.params.pstar();
    const double omega = sphere_area(w.params.N);
    auto fn = [&](double r, double u) {
        return std::pow(r, w.params.N - 1.0) * std::pow(std::max(u, 0.0), ps);
    };
    std::vector<double> cum = panel_cumulative(w.grid, w.values, w.slopes, fn);
    const double cap = std::pow(std::max(w.values.front(), 0.0), ps) *
                       std::pow(w.grid.front(), w.params.N) / w.params.N;
    double tail = 0.0;
    if (w.tail.kind != TailKind::NoTail)
        tail = tail_moment(w.tail, w.params.N, ps, w.r_end());
    const double total = omega * (cum.back() + cap + tail);
    if (!(total > q_star_value))
        throw SolverError("concentration mass below the threshold (eps too large)");

    // locate the crossing panel, then refine inside it
    const double target = q_star_value / omega - cap;
    std::size_t idx = 0;
    while (idx + 1 < cum.size() && cum[idx + 1] < target) ++idx;
    if (idx + 1 >= cum.size())
        throw SolverError("concentration threshold beyond the grid");

    const double r0 = w.grid[idx], r1 = w.grid[idx + 1];
    const double h = r1 - r0;
    auto partial = [&](double lambda) {
        // GL quadrature of the Hermite reconstruction over [r0, lambda]
        const double hh = lambda - r0;
        double s = 0.0;
        for (int k = 0; k < 6; ++k) {
            const double rr = r0 + detail::kGlNode[k] * hh;
            const double t = (rr - r0) / h;
            const double u = detail::hermite(w.values[idx], w.slopes[idx],
                                             w.values[idx + 1], w.slopes[idx + 1], h, t);
            s += detail::kGlWeight[k] * fn(rr, u);
        }
        return cum[idx] + hh * s;
    };
    double lo = r0, hi = r1;
    for (int i = 0; i < 200 && (hi - lo) > 1e-14 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (partial(mid) < target ? lo : hi) = mid;
    }
    ConcentrationResult out;
    out.lambda = 0.5 * (lo + hi);
    const double amp = std::pow(out.lambda, (w.params.N - w.params.p) / w.params.p);
    out.v = profile_scale(w, amp, out.lambda, w.params, w.kind);
    return out;
}

std::vector<double> make_eps_grid(double eps_lo, double eps_hi, int points_per_decade) {
    if (!(eps_lo > 0.0) || !(eps_hi > eps_lo))
        throw ParamError("eps grid requires 0 < eps_lo < eps_hi");
    if (points_per_decade < 1) throw ParamError("points_per_decade must be >= 1");
    const double decades = std::log10(eps_hi / eps_lo);
    const int n = std::max(2, static_cast<int>(std::lround(decades * points_per_decade)) + 1);
    std::vector<double> grid(n);
    for (int i = 0; i < n; ++i)
        grid[i] = eps_hi * std::pow(eps_lo / eps_hi, static_cast<double>(i) / (n - 1));
    return grid;
}

std::vector<double> default_eps_grid(const ProblemParams& params) {
    const Regime regime = classify_regime(params);
    if (regime.kind == RegimeKind::Critical) {
        if (regime.branch == DimensionBranch::EqualSqrtN)
            return make_eps_grid(1e-9, 1e-2, 8);
        return make_eps_grid(1e-6, 1e-2, 8);
    }
    return make_eps_grid(1e-5, 1e-1, 8);
}

namespace {

SweepRecord solve_record(const ProblemParams& base, const Regime& regime, double eps,
                         double S_limit, double q_star_value,
                         const IntegratorConfig& config) {
    SweepRecord rec;
    rec.eps = eps;
    try {
        ProblemParams params = base;
        params.eps = eps;
        RadialProfile u = find_groundstate(params, EquationKind::FullProblem, config);
        rec.a = u.a;
        rec.identities = identity_report(u);

        if (regime.kind == RegimeKind::Subcritical) {
            RadialProfile v = canonical_rescale(u, eps);
            auto [Sv, energy] = S_from_profile(v);
            (void)energy;
            rec.S = Sv;
            rec.sigma = Sv - S_limit;
            rec.v0 = std::pow(eps, -1.0 / (params.q - params.p)) * u.a;
            RadialProfile wv = profile_scale(v, 1.0, std::pow(Sv, 1.0 / params.p),
                                             v.params, v.kind);
            rec.norms = norm_report(wv);
            rec.v_norm_p_pow = norm_Ls(v, params.p);
        } else {
            const double S = rec.identities.S_value;
            rec.S = S;
            rec.sigma = S - S_limit;
            RadialProfile w = profile_scale(u, 1.0, std::pow(S, 1.0 / params.p),
                                            u.params, u.kind);
            rec.norms = norm_report(w);
            if (regime.kind == RegimeKind::Critical) {
                ConcentrationResult conc = concentration_lambda(w, q_star_value);
                rec.lambda = conc.lambda;
                rec.v0 = std::pow(conc.lambda, (params.N - params.p) / params.p) * u.a;
                rec.v_norm_p_pow =
                    std::pow(conc.lambda, -params.p) * rec.norms.get(params.p);
            } else {
                rec.v0 = u.a;
                rec.v_norm_p_pow = rec.norms.get(params.p);
            }
        }
        rec.ok = true;
        rec.status = u.warning.empty() ? "ok" : "ok (" + u.warning + ")";
    } catch (const std::exception& e) {
        rec.ok = false;
        rec.status = e.what();
    }
    return rec;
}

} // namespace

SweepTable run_sweep(const ProblemParams& params, const std::vector<double>& eps_grid,
                     const IntegratorConfig& config, int jobs) {
    if (eps_grid.empty()) throw ParamError("empty eps grid");
    for (std::size_t i = 0; i + 1 < eps_grid.size(); ++i)
        if (!(eps_grid[i] > eps_grid[i + 1]))
            throw ParamError("eps grid must be positive and decreasing");
    if (!(eps_grid.back() > 0.0)) throw ParamError("eps grid must be positive");

    SweepTable table;
    table.params = params;
    table.regime = classify_regime(params);

    // limit level subtracted to form sigma, computed once up front
    double q_star_value = 0.0;
    switch (table.regime.kind) {
    case RegimeKind::Critical:
        table.S_limit = sobolev_constant(params.N, params.p);
        q_star_value = q_star(params.N, params.p);
        break;
    case RegimeKind::Supercritical: {
        RadialProfile u0 = find_groundstate(params, EquationKind::ZeroMassLimit, config);
        table.S_limit = S_from_profile(u0).first;
        break;
    }
    case RegimeKind::Subcritical: {
        RadialProfile v0 = find_groundstate(params, EquationKind::PositiveMassLimit, config);
        table.S_limit = S_from_profile(v0).first;
        break;
    }
    }

    table.records.resize(eps_grid.size());
    std::atomic<std::size_t> next{0};
    int n_jobs = jobs > 0 ? jobs : static_cast<int>(std::thread::hardware_concurrency());
    n_jobs = std::clamp<int>(n_jobs, 1, static_cast<int>(eps_grid.size()));

    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= eps_grid.size()) return;
            table.records[i] = solve_record(params, table.regime, eps_grid[i],
                                            table.S_limit, q_star_value, config);
        }
    };
    if (n_jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_jobs);
        for (int t = 0; t < n_jobs; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    const std::size_t failures =
        static_cast<std::size_t>(std::count_if(table.records.begin(), table.records.end(),
                                               [](const SweepRecord& r) { return !r.ok; }));
    if (2 * failures > table.records.size()) {
        std::ostringstream os;
        os << "sweep failed: " << failures << " of " << table.records.size()
           << " records errored; first: ";
        for (const auto& r : table.records)
            if (!r.ok) {
                os << "(eps = " << r.eps << ") " << r.status;
                break;
            }
        throw SolverError(os.str());
    }
    return table;
}

std::vector<double> SweepTable::eps_column() const {
    std::vector<double> out;
    for (const auto& r : records)
        if (r.ok) out.push_back(r.eps);
    return out;
}

std::vector<double> SweepTable::column(const std::string& name) const {
    std::vector<double> out;
    for (const auto& r : records) {
        if (!r.ok) continue;
        if (name == "eps") out.push_back(r.eps);
        else if (name == "a") out.push_back(r.a);
        else if (name == "S") out.push_back(r.S);
        else if (name == "sigma") out.push_back(r.sigma);
        else if (name == "lambda") out.push_back(r.lambda);
        else if (name == "v0") out.push_back(r.v0);
        else if (name == "v_norm_p") out.push_back(r.v_norm_p_pow);
        else if (name == "norm_p") out.push_back(r.norms.get(params.p));
        else if (name == "norm_q") out.push_back(r.norms.get(params.q));
        else if (name == "norm_l") out.push_back(r.norms.get(params.l));
        else if (name == "norm_pstar") out.push_back(r.norms.get(params.pstar()));
        else if (name == "grad_p") out.push_back(r.norms.grad_p);
        else if (name == "poho_res") out.push_back(r.identities.pohozaev_residual);
        else if (name == "nehari_res") out.push_back(r.identities.nehari_residual);
        else if (name == "eps_norm_p") out.push_back(r.eps * r.norms.get(params.p));
        else throw ParamError("unknown sweep column '" + name + "'");
    }
    return out;
}

FitResult fit_power_law(const std::vector<double>& eps, const std::vector<double>& value,
                        std::optional<double> fixed_log_power, double window_fraction) {
    if (eps.size() != value.size()) throw ParamError("fit input size mismatch");
    std::vector<std::pair<double, double>> data;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        if (!(eps[i] > 0.0) || !(value[i] > 0.0)) continue;
        data.emplace_back(eps[i], value[i]);
    }
    std::sort(data.begin(), data.end()); // ascending eps
    const std::size_t keep = std::max<std::size_t>(
        2, static_cast<std::size_t>(std::ceil(window_fraction * data.size())));
    if (data.size() > keep) data.resize(keep); // smallest-eps window
    if (data.size() < 6)
        throw FitError("degenerate fit: fewer than 6 records in the window");
    if (!(data.back().first / data.front().first >= 10.0 * (1.0 - 1e-12)))
        throw FitError("degenerate fit: eps window spans less than one decade");

    const double b = fixed_log_power.value_or(0.0);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [e, v] : data) {
        const double x = std::log(e);
        const double y = std::log(v) - b * std::log(std::log(1.0 / e));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(data.size());
    const double det = n * sxx - sx * sx;
    FitResult fit;
    fit.exponent = (n * sxy - sx * sy) / det;
    fit.log_power = b;
    const double intercept = (sy - fit.exponent * sx) / n;
    fit.prefactor = std::exp(intercept);
    double ss_res = 0.0, ss_tot = 0.0;
    const double ybar = sy / n;
    for (const auto& [e, v] : data) {
        const double x = std::log(e);
        const double y = std::log(v) - b * std::log(std::log(1.0 / e));
        const double f = intercept + fit.exponent * x;
        ss_res += (y - f) * (y - f);
        ss_tot += (y - ybar) * (y - ybar);
    }
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;
    fit.eps_lo = data.front().first;
    fit.eps_hi = data.back().first;
    fit.points = static_cast<int>(data.size());
    return fit;
}

BarrierReport barrier_check(int N, double p, double gamma,
                            const std::vector<double>& mu_grid,
                            const std::vector<double>& r_grid) {
    if (!(p >= 2.0)) throw ParamError("barrier_check requires p >= 2");
    if (!(gamma > 0.0)) throw ParamError("barrier_check requires gamma > 0");
    BarrierReport report;
    const double hyp1 = N - 1.0 - 2.0 * gamma * (p - 1.0);
    const double hyp2 = gamma * (N - p - gamma * (p - 1.0));
    report.hypotheses_hold = hyp1 <= 0.0 && hyp2 <= 0.0;
    if (!report.hypotheses_hold) return report; // reported, check skipped

    double worst = -std::numeric_limits<double>::infinity();
    double worst_gap = 0.0;
    for (double mu : mu_grid) {
        for (double r : r_grid) {
            const double t = mu + gamma / r;
            // analytic radial operator of h = r^{-gamma} e^{-mu r}, divided by h^{p-1}
            const double minus_lap = std::pow(t, p - 1.0) * ((N - 1.0) / r - (p - 1.0) * t) -
                                     (p - 1.0) * std::pow(t, p - 2.0) * gamma / (r * r);
            const double lhs = minus_lap + std::pow(mu, p) * (p - 1.0);
            const double rhs = mu * std::pow(gamma, p - 2.0) * hyp1 / std::pow(r, p - 1.0) +
                               std::pow(gamma, p - 1.0) * (N - p - gamma * (p - 1.0)) /
                                   std::pow(r, p);
            const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
            worst = std::max(worst, (lhs - rhs) / scale);
            worst_gap = std::max(worst_gap, std::abs(lhs - rhs) / scale);
            ++report.points;
        }
    }
    report.max_violation = worst;
    report.max_equality_gap = worst_gap;
    return report;
}

BlowUpReport blow_up_norm_check(const SweepTable& table) {
    if (table.regime.kind != RegimeKind::Critical)
        throw RegimeError("blow_up_norm_check requires a critical sweep");
    BlowUpReport report;
    report.branch = table.regime.branch;
    const double p = table.params.p;
    const double N = table.params.N;

    std::vector<double> ratios;
    double vmax = 0.0;
    for (const auto& r : table.records) {
        if (!r.ok) continue;
        vmax = std::max(vmax, r.v_norm_p_pow);
        const double scale = std::pow(r.eps, 1.0 / p) * r.lambda;
        if (!(scale > 0.0) || !(scale < 1.0)) continue;
        double predicted = 0.0;
        if (table.regime.branch == DimensionBranch::EqualSqrtN)
            predicted = std::log(1.0 / scale);
        else if (table.regime.branch == DimensionBranch::AboveSqrtN)
            predicted = std::pow(1.0 / scale, (p * p - N) / (p - 1.0));
        if (predicted > 0.0) ratios.push_back(r.v_norm_p_pow / predicted);
    }

    std::ostringstream os;
    switch (table.regime.branch) {
    case DimensionBranch::BelowSqrtN:
        report.bound = vmax;
        report.ok = std::isfinite(vmax) && vmax > 0.0;
        os << "max ||v||_p^p = " << vmax << " (bounded branch)";
        break;
    case DimensionBranch::EqualSqrtN:
    case DimensionBranch::AboveSqrtN: {
        if (ratios.empty()) {
            report.ok = false;
            os << "no usable records for the divergent-branch ratio";
            break;
        }
        report.bound = *std::min_element(ratios.begin(), ratios.end());
        report.ok = report.bound > 0.0;
        os << "min ratio to the predicted growth = " << report.bound;
        break;
    }
    }
    report.detail = os.str();
    return report;
}

PointwiseBounds pointwise_bound_checks(const RadialProfile& profile, double s) {
    if (profile.size() < 2) throw ParamError("pointwise_bound_checks needs a profile");
    PointwiseBounds out;
    out.s_used = s > 0.0 ? s : profile.params.l;
    const double grad = std::pow(grad_norm_Lp(profile), 1.0 / profile.params.p);
    const double ns = std::pow(norm_Ls(profile, out.s_used), 1.0 / out.s_used);
    const double drop = (profile.params.N - profile.params.p) / profile.params.p;
    for (std::size_t i = 0; i < profile.size(); ++i) {
        const double r = profile.grid[i];
        const double u = std::max(profile.values[i], 0.0);
        out.C_gradient = std::max(out.C_gradient, u * std::pow(r, drop) / grad);
        out.C_moment = std::max(out.C_moment,
                                u * std::pow(r, profile.params.N / out.s_used) / ns);
    }
    return out;
}

DecayReport decay_exponent_check(const RadialProfile& profile) {
    if (profile.tail.kind != TailKind::Polynomial)
        throw ParamError("decay_exponent_check requires a polynomial tail");
    DecayReport rep;
    rep.fitted_exponent = profile.tail.rate;
    rep.target = (profile.params.N - profile.params.p) / (profile.params.p - 1.0);
    rep.rel_error = std::abs(rep.fitted_exponent - rep.target) / rep.target;
    rep.c_lower = std::numeric_limits<double>::infinity();
    rep.c_upper = 0.0;
    for (std::size_t i = 0; i < profile.size(); ++i) {
        const double r = profile.grid[i];
        if (r < profile.tail.fit_r_lo) continue;
        const double c = std::max(profile.values[i], 0.0) * std::pow(r, rep.target);
        rep.c_lower = std::min(rep.c_lower, c);
        rep.c_upper = std::max(rep.c_upper, c);
    }
    return rep;
}

std::pair<double, double> sandwich_constants(const SweepTable& table) {
    if (table.regime.kind != RegimeKind::Critical)
        throw RegimeError("sandwich_constants requires a critical sweep");
    const double p = table.params.p;
    const double ps = table.params.pstar();
    const double l = table.params.l;
    const double expo = -(ps - p) / (p * (l - ps));
    double c1 = 0.0;
    for (const auto& r : table.records) {
        if (!r.ok || !(r.sigma > 0.0) || !(r.lambda > 0.0)) continue;
        c1 = std::max(c1, std::pow(r.sigma, expo) / r.lambda);
    }
    double c2 = 0.0;
    for (const auto& r : table.records) {
        if (!r.ok || !(r.sigma > 0.0) || !(r.lambda > 0.0)) continue;
        const double upper = std::pow(r.eps, -1.0 / p) * std::pow(r.sigma, 1.0 / p);
        if (c1 > 0.0) c2 = std::max(c2, r.lambda / (c1 * upper));
    }
    return {c1, c2};
}

double lower_barrier_constant(const RadialProfile& v, double eps, double S, double lambda) {
    if (!(eps > 0.0) || !(S > 0.0) || !(lambda > 0.0))
        throw ParamError("lower_barrier_constant requires positive eps, S, lambda");
    const double p = v.params.p;
    const double kappa = (v.params.N - p) / (p - 1.0);
    const double mu = std::pow(eps * S, 1.0 / p) * lambda;
    const double window_hi = std::min(v.r_end(), 1.0 / mu);
    const double window_lo = std::max(v.grid.front() * 4.0, 0.05 * window_hi);
    double c = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double r = v.grid[i];
        if (r < window_lo || r > window_hi) continue;
        const double barrier = std::pow(r, -kappa) * std::exp(-mu * r);
        if (barrier > 0.0)
            c = std::min(c, std::max(v.values[i], 0.0) / barrier);
    }
    if (!std::isfinite(c)) throw ParamError("lower barrier window is empty");
    return c;
}

} // namespace gslab
