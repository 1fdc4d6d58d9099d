#include "gslab/profile.hpp"

#include <algorithm>
#include <cmath>

namespace gslab {

std::string to_string(ShotClass c) {
    switch (c) {
    case ShotClass::Groundstate: return "groundstate";
    case ShotClass::Overshoot: return "overshoot";
    case ShotClass::Undershoot: return "undershoot";
    case ShotClass::Inconclusive: return "inconclusive";
    }
    return "unknown";
}

double TailModel::eval(double r) const {
    switch (kind) {
    case TailKind::Exponential: return amplitude * std::exp(-rate * r);
    case TailKind::Polynomial: return amplitude * std::pow(r, -rate);
    case TailKind::NoTail: return 0.0;
    }
    return 0.0;
}

RadialProfile profile_scale(const RadialProfile& u, double amp, double stretch,
                            const ProblemParams& new_params, EquationKind new_kind) {
    if (!(amp > 0.0) || !(stretch > 0.0))
        throw ParamError("profile_scale requires positive amplitude and stretch");
    RadialProfile v;
    v.params = new_params;
    v.kind = new_kind;
    v.a = amp * u.a;
    v.classification = u.classification;
    v.events = u.events;
    v.bracket_width = u.bracket_width;
    v.bisections = u.bisections;
    v.warning = u.warning;

    const double p = u.params.p;
    const double N = static_cast<double>(u.params.N);
    const double flux_factor = std::pow(amp, p - 1.0) * std::pow(stretch, p - N);
    const std::size_t n = u.size();
    v.grid.resize(n);
    v.values.resize(n);
    v.slopes.resize(n);
    v.flux.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        v.grid[i] = u.grid[i] / stretch;
        v.values[i] = amp * u.values[i];
        v.slopes[i] = amp * stretch * u.slopes[i];
        v.flux[i] = flux_factor * u.flux[i];
    }

    v.tail = u.tail;
    if (u.tail.kind == TailKind::Exponential) {
        v.tail.rate = u.tail.rate * stretch;
        v.tail.amplitude = amp * u.tail.amplitude;
    } else if (u.tail.kind == TailKind::Polynomial) {
        v.tail.amplitude = amp * u.tail.amplitude * std::pow(stretch, -u.tail.rate);
    }
    v.tail.fit_r_lo = u.tail.fit_r_lo / stretch;
    v.tail.fit_r_hi = u.tail.fit_r_hi / stretch;
    return v;
}

double profile_max(const RadialProfile& profile) {
    if (profile.values.empty()) return 0.0;
    return *std::max_element(profile.values.begin(), profile.values.end());
}

double equation_residual(const RadialProfile& profile, const ProblemParams& params,
                         EquationKind kind) {
    const std::size_t n = profile.size();
    if (n < 3) throw ParamError("equation_residual needs at least 3 grid nodes");
    const double N = static_cast<double>(params.N);
    std::vector<double> res;
    res.reserve(n - 2);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double r0 = profile.grid[i - 1], r1 = profile.grid[i], r2 = profile.grid[i + 1];
        const double h1 = r1 - r0, h2 = r2 - r1;
        // three-point derivative of the flux on a nonuniform grid
        const double dm = (profile.flux[i + 1] * h1 * h1 - profile.flux[i - 1] * h2 * h2 +
                           profile.flux[i] * (h2 * h2 - h1 * h1)) /
                          (h1 * h2 * (h1 + h2));
        const double u = std::max(profile.values[i], 0.0);
        const double target = -std::pow(r1, N - 1.0) * f_eval(params, kind, u);
        const double scale = std::abs(target);
        if (scale <= 0.0) continue;
        res.push_back(std::abs(dm - target) / scale);
    }
    if (res.empty()) return 0.0;
    std::nth_element(res.begin(), res.begin() + res.size() / 2, res.end());
    return res[res.size() / 2];
}

} // namespace gslab
