#include "gslab/norms.hpp"

#include <algorithm>
#include <cmath>

#include "gslab/quadrature.hpp"

namespace gslab {

namespace {

constexpr double kTailFlagLevel = 1e-12;

double core_cap_moment(const RadialProfile& prof, double s) {
    // [0, r_start] contribution with u frozen at the central value
    const double u0 = prof.values.empty() ? prof.a : prof.values.front();
    return std::pow(std::max(u0, 0.0), s) * std::pow(prof.grid.front(), prof.params.N) /
           prof.params.N;
}

std::vector<double> flux_derivatives(const RadialProfile& prof) {
    std::vector<double> mp(prof.size());
    const double N = prof.params.N;
    for (std::size_t i = 0; i < prof.size(); ++i)
        mp[i] = -std::pow(prof.grid[i], N - 1.0) *
                f_eval(prof.params, prof.kind, std::max(prof.values[i], 0.0));
    return mp;
}

} // namespace

double NormReport::get(double s) const {
    for (const auto& e : norms)
        if (std::abs(e.s - s) <= 1e-9 * std::max(1.0, std::abs(s))) return e.value;
    throw ParamError("norm exponent not present in report: s = " + std::to_string(s));
}

double norm_Ls(const RadialProfile& prof, double s) {
    if (prof.size() < 2) throw ParamError("norm_Ls requires a nonempty profile");
    if (!(s >= 1.0)) throw ParamError("norm_Ls requires s >= 1");
    auto fn = [&](double r, double u) {
        return std::pow(r, prof.params.N - 1.0) * std::pow(std::max(u, 0.0), s);
    };
    QuadResult q = panel_integral(prof.grid, prof.values, prof.slopes, fn);
    double total = q.value + core_cap_moment(prof, s);
    if (prof.tail.kind != TailKind::NoTail) {
        const double t = tail_moment(prof.tail, prof.params.N, s, prof.r_end());
        total += t;
    }
    return sphere_area(prof.params.N) * total;
}

double grad_norm_Lp(const RadialProfile& prof) {
    if (prof.size() < 2) throw ParamError("grad_norm_Lp requires a nonempty profile");
    const double p = prof.params.p;
    const double N = prof.params.N;
    const double pc = p / (p - 1.0);
    auto fn = [&](double r, double m) {
        return std::pow(std::abs(m), pc) * std::pow(r, -(N - 1.0) / (p - 1.0));
    };
    const std::vector<double> mp = flux_derivatives(prof);
    QuadResult q = panel_integral(prof.grid, prof.flux, mp, fn);
    // [0, r_start] contribution from the series behaviour m ~ -g(a) r^N / N
    const double u0 = prof.values.empty() ? prof.a : prof.values.front();
    const double ga = f_eval(prof.params, prof.kind, std::max(u0, 0.0));
    double total = q.value;
    if (ga > 0.0) {
        const double r0 = prof.grid.front();
        total += std::pow(ga / N, pc) * std::pow(r0, N + pc) / (N + pc);
    }
    if (prof.tail.kind != TailKind::NoTail)
        total += tail_grad_moment(prof.tail, prof.params.N, p, prof.r_end());
    return sphere_area(prof.params.N) * total;
}

NormReport norm_report(const RadialProfile& prof, const std::vector<double>& extra) {
    NormReport report;
    std::vector<double> exps = {prof.params.p, prof.params.q, prof.params.l,
                                prof.params.pstar()};
    exps.insert(exps.end(), extra.begin(), extra.end());
    std::sort(exps.begin(), exps.end());
    exps.erase(std::unique(exps.begin(), exps.end(),
                           [](double x, double y) { return std::abs(x - y) < 1e-12; }),
               exps.end());

    double err_acc = 0.0;
    for (double s : exps) {
        NormEntry entry;
        entry.s = s;
        auto fn = [&](double r, double u) {
            return std::pow(r, prof.params.N - 1.0) * std::pow(std::max(u, 0.0), s);
        };
        QuadResult q = panel_integral(prof.grid, prof.values, prof.slopes, fn);
        double total = q.value + core_cap_moment(prof, s);
        double tail = 0.0;
        if (prof.tail.kind != TailKind::NoTail)
            tail = tail_moment(prof.tail, prof.params.N, s, prof.r_end());
        total += tail;
        entry.value = sphere_area(prof.params.N) * total;
        entry.tail_corrected = tail > kTailFlagLevel * total;
        if (total > 0.0) err_acc = std::max(err_acc, q.error_estimate / total);
        report.norms.push_back(entry);
    }
    report.grad_p = grad_norm_Lp(prof);
    if (prof.tail.kind != TailKind::NoTail) {
        const double gt = tail_grad_moment(prof.tail, prof.params.N, prof.params.p,
                                           prof.r_end());
        report.grad_tail_corrected =
            gt * sphere_area(prof.params.N) > kTailFlagLevel * report.grad_p;
    }
    report.quadrature_error_estimate = err_acc;
    return report;
}

namespace {

// integral of r^{N-1} F(u(r)) over the whole space (per unit sphere area)
double F_integral(const RadialProfile& prof) {
    auto fn = [&](double r, double u) {
        return std::pow(r, prof.params.N - 1.0) *
               F_eval(prof.params, prof.kind, std::max(u, 0.0));
    };
    QuadResult q = panel_integral(prof.grid, prof.values, prof.slopes, fn);
    const double u0 = prof.values.empty() ? prof.a : prof.values.front();
    double total = q.value + F_eval(prof.params, prof.kind, std::max(u0, 0.0)) *
                                 std::pow(prof.grid.front(), prof.params.N) /
                                 prof.params.N;
    if (prof.tail.kind != TailKind::NoTail) {
        for (const auto& t : rhs_terms(prof.params, prof.kind))
            total += t.coef / (t.expo + 1.0) *
                     tail_moment(prof.tail, prof.params.N, t.expo + 1.0, prof.r_end());
    }
    return total;
}

// integral of r^{N-1} f(u(r)) u(r)
double fu_integral(const RadialProfile& prof) {
    auto fn = [&](double r, double u) {
        const double uc = std::max(u, 0.0);
        return std::pow(r, prof.params.N - 1.0) * f_eval(prof.params, prof.kind, uc) * uc;
    };
    QuadResult q = panel_integral(prof.grid, prof.values, prof.slopes, fn);
    const double u0 = std::max(prof.values.empty() ? prof.a : prof.values.front(), 0.0);
    double total = q.value + f_eval(prof.params, prof.kind, u0) * u0 *
                                 std::pow(prof.grid.front(), prof.params.N) /
                                 prof.params.N;
    if (prof.tail.kind != TailKind::NoTail) {
        for (const auto& t : rhs_terms(prof.params, prof.kind))
            total += t.coef *
                     tail_moment(prof.tail, prof.params.N, t.expo + 1.0, prof.r_end());
    }
    return total;
}

double rel_residual(double lhs, double rhs) {
    const double scale = std::max(std::abs(lhs), std::abs(rhs));
    if (scale == 0.0) return 0.0;
    return std::abs(lhs - rhs) / scale;
}

} // namespace

double pohozaev_residual(const RadialProfile& prof) {
    const double grad = grad_norm_Lp(prof);
    const double rhs = prof.params.pstar() * sphere_area(prof.params.N) * F_integral(prof);
    return rel_residual(grad, rhs);
}

double nehari_residual(const RadialProfile& prof) {
    const double grad = grad_norm_Lp(prof);
    const double rhs = sphere_area(prof.params.N) * fu_integral(prof);
    return rel_residual(grad, rhs);
}

std::pair<double, double> S_from_profile(const RadialProfile& prof) {
    const double grad = grad_norm_Lp(prof);
    const double S = std::pow(grad, prof.params.p / static_cast<double>(prof.params.N));
    const double energy = (1.0 / prof.params.p - 1.0 / prof.params.pstar()) * grad;
    return {S, energy};
}

IdentityReport identity_report(const RadialProfile& prof) {
    IdentityReport report;
    report.pohozaev_residual = pohozaev_residual(prof);
    report.nehari_residual = nehari_residual(prof);
    auto [S, energy] = S_from_profile(prof);
    report.S_value = S;
    report.energy = energy;
    return report;
}

CriticalRelationReport critical_relation_residuals(const RadialProfile& w,
                                                   const ProblemParams& params) {
    const Regime regime = classify_regime(params);
    if (regime.kind != RegimeKind::Critical)
        throw RegimeError("critical_relation_residuals requires q = p*");
    CriticalRelationReport rep;
    rep.k = k_factor(params);
    const double eps = params.eps;
    const double np = norm_Ls(w, params.p);
    rep.norm_l = norm_Ls(w, params.l);
    rep.norm_pstar = norm_Ls(w, params.pstar());
    rep.eps_norm_p = eps * np;
    rep.res_l = rel_residual(rep.norm_l, rep.k * eps * np);
    rep.res_pstar = rel_residual(rep.norm_pstar, 1.0 + (rep.k + 1.0) * eps * np);
    return rep;
}

std::pair<double, double> supercritical_targets(const ProblemParams& params) {
    if (classify_regime(params).kind != RegimeKind::Supercritical)
        throw RegimeError("supercritical_targets requires q > p*");
    const double ps = params.pstar(), q = params.q, l = params.l;
    return {q * (l - ps) / (ps * (l - q)), l * (q - ps) / (ps * (l - q))};
}

std::pair<double, double> subcritical_limits(const ProblemParams& params) {
    if (classify_regime(params).kind != RegimeKind::Subcritical)
        throw RegimeError("subcritical_limits requires q < p*");
    const double ps = params.pstar(), p = params.p, q = params.q;
    return {p * (ps - q) / (ps * (q - p)), q * (ps - p) / (ps * (q - p))};
}

} // namespace gslab
