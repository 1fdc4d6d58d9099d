#include "gslab/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "gslab/asymptotics.hpp"
#include "gslab/closed_form.hpp"
#include "gslab/config.hpp"

namespace gslab {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string sanitize_status(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n') c = ';';
    return s;
}

char hash_hex(std::uint64_t h, int nibble) {
    return "0123456789abcdef"[(h >> (4 * nibble)) & 0xf];
}

std::string hash_string(std::uint64_t h) {
    std::string s(16, '0');
    for (int i = 0; i < 16; ++i) s[i] = hash_hex(h, 15 - i);
    return s;
}

struct Manifest {
    fs::path path;
    json body;
    std::chrono::steady_clock::time_point t0;

    Manifest(const fs::path& dir, const RunConfig& cfg, const std::string& command) {
        path = dir / "manifest.json";
        t0 = std::chrono::steady_clock::now();
        body["tool"] = "gslab";
        body["version"] = kToolVersion;
        body["command"] = command;
        body["config_hash"] = hash_string(config_hash(cfg));
        body["status"] = "running";
        body["records"] = json::array();
        body["files"] = json::array();
        body["wall_clock_sec"] = 0.0;
        body["config"] = serialize_config(cfg);
        write();
    }
    void add_file(const std::string& name) { body["files"].push_back(name); }
    void finalize(const std::string& status = "complete") {
        body["status"] = status;
        body["wall_clock_sec"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        write();
    }
    void write() const {
        std::ofstream out(path);
        out << body.dump(2) << "\n";
    }
};

json tail_to_json(const TailModel& tail) {
    json j;
    switch (tail.kind) {
    case TailKind::Exponential: j["kind"] = "exponential"; break;
    case TailKind::Polynomial: j["kind"] = "polynomial"; break;
    case TailKind::NoTail: j["kind"] = "none"; break;
    }
    j["rate"] = tail.rate;
    j["amplitude"] = tail.amplitude;
    j["r_squared"] = tail.r_squared;
    return j;
}

void write_profile_csv(const fs::path& file, const RadialProfile& prof) {
    std::ofstream out(file);
    out << "r,u,du,m\n";
    for (std::size_t i = 0; i < prof.size(); ++i)
        out << fmt12(prof.grid[i]) << ',' << fmt12(prof.values[i]) << ','
            << fmt12(prof.slopes[i]) << ',' << fmt12(prof.flux[i]) << "\n";
}

// ---------------------------------------------------------------- solve ----

int cmd_solve(const RunConfig& cfg) {
    ProblemParams params = cfg.problem();
    fs::create_directories(cfg.out_dir);
    Manifest manifest(cfg.out_dir, cfg, "solve");

    RadialProfile prof;
    if (cfg.kind == EquationKind::EmdenFowler) {
        // shoot from the exact central value and extend far enough for a tail
        ExtremalParams ep{params.N, params.p, 1.0};
        const double a = U_eval(ep, 0.0);
        IntegratorConfig icfg = cfg.integrator;
        const double r_need =
            2.0 * std::pow(U_tail_amplitude(ep) / (1e-6 * a), 1.0 / ep.kappa());
        icfg.r_max = std::max(icfg.r_max > 0.0 ? icfg.r_max : 0.0,
                              std::max(default_r_max(params, cfg.kind), r_need));
        prof = integrate(params, cfg.kind, a, icfg);
        prof.classification = ShotClass::Groundstate;
        prof.tail = attach_tail(prof);
    } else {
        prof = find_groundstate(params, cfg.kind, cfg.integrator);
    }

    write_profile_csv(fs::path(cfg.out_dir) / "profile.csv", prof);
    manifest.add_file("profile.csv");

    const IdentityReport ids = identity_report(prof);
    json jid;
    jid["a"] = prof.a;
    jid["kind"] = to_string(cfg.kind);
    jid["pohozaev_residual"] = ids.pohozaev_residual;
    jid["nehari_residual"] = ids.nehari_residual;
    jid["S"] = ids.S_value;
    jid["energy"] = ids.energy;
    jid["tail"] = tail_to_json(prof.tail);
    jid["bracket_width"] = prof.bracket_width;
    jid["bisections"] = prof.bisections;
    if (!prof.warning.empty()) jid["warning"] = prof.warning;
    if (cfg.kind == EquationKind::FullProblem &&
        classify_regime(params).kind == RegimeKind::Critical) {
        const double S = ids.S_value;
        RadialProfile w = profile_scale(prof, 1.0, std::pow(S, 1.0 / params.p),
                                        params, prof.kind);
        const CriticalRelationReport crit = critical_relation_residuals(w, params);
        jid["critical_relations"] = {{"k", crit.k},
                                     {"res_l", crit.res_l},
                                     {"res_pstar", crit.res_pstar},
                                     {"eps_norm_p", crit.eps_norm_p},
                                     {"norm_pstar", crit.norm_pstar}};
    }
    std::ofstream(fs::path(cfg.out_dir) / "identities.json") << jid.dump(2) << "\n";
    manifest.add_file("identities.json");

    const NormReport norms = norm_report(prof);
    json jn;
    jn["grad_p"] = norms.grad_p;
    jn["quadrature_error_estimate"] = norms.quadrature_error_estimate;
    json entries = json::array();
    for (const auto& e : norms.norms)
        entries.push_back({{"s", e.s}, {"value", e.value}, {"tail_corrected", e.tail_corrected}});
    jn["norms"] = entries;
    std::ofstream(fs::path(cfg.out_dir) / "norms.json") << jn.dump(2) << "\n";
    manifest.add_file("norms.json");

    manifest.body["records"].push_back(
        {{"eps", params.eps}, {"status", sanitize_status(prof.warning.empty() ? "ok" : prof.warning)}});
    manifest.finalize();
    std::cout << "solved " << to_string(cfg.kind) << ": a = " << fmt12(prof.a)
              << ", S = " << fmt12(ids.S_value) << "\n";
    return 0;
}

// ---------------------------------------------------------------- sweep ----

int cmd_sweep(const RunConfig& cfg) {
    if (cfg.kind != EquationKind::FullProblem)
        throw ConfigError("sweep runs the full problem; set problem.kind = full");
    ProblemParams params = cfg.problem();
    fs::create_directories(cfg.out_dir);
    Manifest manifest(cfg.out_dir, cfg, "sweep");

    std::vector<double> grid;
    if (cfg.eps_lo > 0.0 && cfg.eps_hi > 0.0)
        grid = make_eps_grid(cfg.eps_lo, cfg.eps_hi, cfg.points_per_decade);
    else
        grid = default_eps_grid(params);

    SweepTable table = run_sweep(params, grid, cfg.integrator, cfg.jobs);

    CsvTable csv;
    csv.header = {"eps",    "a",          "S",      "sigma",    "lambda",
                  "norm_p", "norm_q",     "norm_l", "norm_pstar", "grad_p",
                  "poho_res", "nehari_res", "status"};
    const double nan = std::nan("");
    for (const auto& rec : table.records) {
        auto val = [&](auto getter) { return rec.ok ? getter() : nan; };
        csv.rows.push_back(
            {fmt12(rec.eps), fmt12(val([&] { return rec.a; })),
             fmt12(val([&] { return rec.S; })), fmt12(val([&] { return rec.sigma; })),
             fmt12(val([&] { return rec.lambda; })),
             fmt12(val([&] { return rec.norms.get(params.p); })),
             fmt12(val([&] { return rec.norms.get(params.q); })),
             fmt12(val([&] { return rec.norms.get(params.l); })),
             fmt12(val([&] { return rec.norms.get(params.pstar()); })),
             fmt12(val([&] { return rec.norms.grad_p; })),
             fmt12(val([&] { return rec.identities.pohozaev_residual; })),
             fmt12(val([&] { return rec.identities.nehari_residual; })),
             sanitize_status(rec.status)});
        manifest.body["records"].push_back(
            {{"eps", rec.eps}, {"status", sanitize_status(rec.status)}});
    }
    write_csv((fs::path(cfg.out_dir) / "sweep.csv").string(), csv);
    manifest.add_file("sweep.csv");

    if (cfg.emit_plot_data) {
        auto emit = [&](const std::string& name, const std::string& column) {
            CsvTable plot;
            plot.header = {"log10_eps", "log10_" + column};
            for (const auto& rec : table.records) {
                if (!rec.ok) continue;
                double v = 0.0;
                if (column == "a") v = rec.a;
                else if (column == "sigma") v = rec.sigma;
                else if (column == "lambda") v = rec.lambda;
                if (!(v > 0.0)) continue;
                plot.rows.push_back({fmt12(std::log10(rec.eps)), fmt12(std::log10(v))});
            }
            write_csv((fs::path(cfg.out_dir) / name).string(), plot);
            manifest.add_file(name);
        };
        emit("plot_a.csv", "a");
        emit("plot_sigma.csv", "sigma");
        if (table.regime.kind == RegimeKind::Critical) emit("plot_lambda.csv", "lambda");
    }

    manifest.body["S_limit"] = table.S_limit;
    manifest.finalize();
    std::cout << "sweep complete: " << table.records.size() << " records, S_limit = "
              << fmt12(table.S_limit) << "\n";
    return 0;
}

// ------------------------------------------------------------------ fit ----

int cmd_fit(const RunConfig& cfg) {
    ProblemParams params = cfg.problem();
    if (cfg.fit_table.empty()) throw ConfigError("fit.table is required");
    fs::create_directories(cfg.out_dir);
    Manifest manifest(cfg.out_dir, cfg, "fit");

    CsvTable table = read_csv(cfg.fit_table);
    std::vector<double> eps = table.numeric_column("eps", "ok");
    std::vector<double> value;
    if (cfg.fit_column == "eps_norm_p") {
        std::vector<double> np = table.numeric_column("norm_p", "ok");
        value.resize(np.size());
        for (std::size_t i = 0; i < np.size(); ++i) value[i] = eps[i] * np[i];
    } else {
        value = table.numeric_column(cfg.fit_column, "ok");
    }

    const RatePrediction rates = predicted_rates(params);
    std::optional<double> log_power;
    if (cfg.fit_log_power == "auto") {
        double lp = 0.0;
        if (rates.regime.branch == DimensionBranch::EqualSqrtN &&
            rates.regime.kind == RegimeKind::Critical) {
            if (cfg.fit_column == "lambda") lp = rates.lambda_log_power;
            else if (cfg.fit_column == "a") lp = rates.u0_exponent_consistent;
            else if (cfg.fit_column == "sigma") lp = rates.sigma_log_power;
        }
        if (lp != 0.0) log_power = lp;
    } else if (cfg.fit_log_power != "none") {
        log_power = std::stod(cfg.fit_log_power);
    }

    const FitResult fit = fit_power_law(eps, value, log_power, cfg.fit_window);

    json out;
    out["column"] = cfg.fit_column;
    out["exponent"] = fit.exponent;
    out["log_power"] = fit.log_power;
    out["prefactor"] = fit.prefactor;
    out["r_squared"] = fit.r_squared;
    out["window"] = {fit.eps_lo, fit.eps_hi};
    out["points"] = fit.points;
    out["tolerance"] = cfg.fit_tolerance;

    bool pass = true;
    json targets = json::array();
    auto add_target = [&](const std::string& name, double target, bool gates) {
        const bool ok = std::abs(fit.exponent - target) <=
                        cfg.fit_tolerance * std::max(std::abs(target), 1e-12);
        targets.push_back({{"name", name}, {"exponent", target}, {"pass", ok}});
        if (gates) pass = pass && ok;
    };
    if (cfg.fit_column == "lambda" && rates.regime.kind == RegimeKind::Critical) {
        add_target("lambda_exponent", rates.lambda_exponent, true);
    } else if (cfg.fit_column == "a") {
        add_target("u0_exponent_consistent", rates.u0_exponent_consistent, true);
        add_target("u0_exponent_printed", rates.u0_exponent_printed, false);
    } else if (cfg.fit_column == "sigma") {
        add_target("sigma_exponent", rates.sigma_exponent, true);
    }
    out["targets"] = targets;
    out["pass"] = pass;

    const std::string name = "fit_" + cfg.fit_column + ".json";
    std::ofstream(fs::path(cfg.out_dir) / name) << out.dump(2) << "\n";
    manifest.add_file(name);

    if (cfg.emit_plot_data) {
        CsvTable plot;
        plot.header = {"log_eps", "log_" + cfg.fit_column};
        for (std::size_t i = 0; i < eps.size(); ++i)
            if (value[i] > 0.0)
                plot.rows.push_back({fmt12(std::log(eps[i])), fmt12(std::log(value[i]))});
        const std::string pname = "fit_" + cfg.fit_column + "_points.csv";
        write_csv((fs::path(cfg.out_dir) / pname).string(), plot);
        manifest.add_file(pname);
    }
    manifest.finalize();
    std::cout << "fit " << cfg.fit_column << ": exponent = " << fmt12(fit.exponent)
              << ", r^2 = " << fmt12(fit.r_squared) << (pass ? " [pass]" : " [fail]")
              << "\n";
    return 0;
}

// ---------------------------------------------------------------- verify ----

int cmd_verify(const RunConfig& cfg) {
    ProblemParams params = cfg.problem();
    fs::create_directories(cfg.out_dir);
    Manifest manifest(cfg.out_dir, cfg, "verify");

    json checks = json::array();
    bool all_ok = true;
    auto add = [&](const std::string& name, bool ok, double value,
                   const std::string& detail) {
        checks.push_back({{"name", name}, {"pass", ok}, {"value", value}, {"detail", detail}});
        all_ok = all_ok && ok;
    };

    // closed-form residual under grid refinement
    {
        const double res = emden_fowler_fd_residual(params.N, params.p, 2e-4);
        const double res_half = emden_fowler_fd_residual(params.N, params.p, 1e-4);
        add("closed_form_residual", res < 1e-6, res, "finite-difference residual");
        add("closed_form_refinement", res_half * 3.5 < res || res < 1e-10, res / res_half,
            "residual drops under step halving");
    }
    // gradient and critical norms of the extremal agree
    {
        RadialProfile u1 = emden_fowler_profile(params.N, params.p, 1.0, 1e-6, 1e6);
        const double grad = grad_norm_Lp(u1);
        const double crit = norm_Ls(u1, params.pstar());
        const double rel = std::abs(grad - crit) / crit;
        add("sobolev_identity", rel < 1e-3, rel, "|grad - crit| / crit");
        RadialProfile u2 = emden_fowler_profile(params.N, params.p, 2.0, 1e-6, 1e6);
        const double S1 = std::pow(grad, params.p / static_cast<double>(params.N));
        const double S2 =
            std::pow(grad_norm_Lp(u2), params.p / static_cast<double>(params.N));
        add("sobolev_dilation_invariance", std::abs(S1 - S2) / S1 < 1e-8,
            std::abs(S1 - S2) / S1, "S from U_1 vs U_2");
    }
    // barrier inequality / equality
    if (params.p >= 2.0) {
        const double gamma = (params.N - params.p) / (params.p - 1.0);
        std::vector<double> mu = make_eps_grid(0.01, 10.0, 8);
        std::vector<double> rr = make_eps_grid(0.1, 100.0, 16);
        const BarrierReport rep = barrier_check(params.N, params.p, gamma, mu, rr);
        if (!rep.hypotheses_hold) {
            add("barrier_inequality", true, 0.0, "hypotheses violated; check skipped");
        } else if (params.p == 2.0) {
            add("barrier_equality", rep.max_equality_gap < 1e-10, rep.max_equality_gap,
                "two sides coincide at p = 2");
        } else {
            add("barrier_inequality", rep.max_violation <= 1e-12, rep.max_violation,
                "left side below right side");
        }
    } else {
        add("barrier_inequality", true, 0.0, "p < 2: out of the lemma's range, skipped");
    }
    // closed-form norm targets solve their identity systems exactly
    {
        double worst = 0.0;
        for (double dq : {0.3, 1.1, 2.7}) {
            ProblemParams sc = params;
            sc.q = sc.pstar() + dq;
            sc.l = sc.q + 1.0 + dq;
            auto [tq, tl] = supercritical_targets(sc);
            worst = std::max(worst, std::abs(tq - tl - 1.0));
            worst = std::max(worst, std::abs(sc.pstar() / sc.q * tq -
                                             sc.pstar() / sc.l * tl - 1.0));
        }
        add("supercritical_targets_consistency", worst < 1e-12, worst,
            "two identity combinations equal 1");
    }
    {
        double worst = 0.0;
        for (double frac : {0.3, 0.5, 0.8}) {
            ProblemParams sc = params;
            sc.q = sc.p + frac * (sc.pstar() - sc.p);
            sc.l = sc.pstar() + 1.0;
            auto [lp, lq] = subcritical_limits(sc);
            // the limits solve: 1 = lq - lp (mass balance) and the scaled sum
            const double nehari = lq - lp;
            const double poho = sc.pstar() / sc.q * lq - sc.pstar() / sc.p * lp;
            worst = std::max(worst, std::abs(nehari - 1.0));
            worst = std::max(worst, std::abs(poho - 1.0));
        }
        add("subcritical_limits_consistency", worst < 1e-12, worst,
            "limit pair solves the identity system");
    }
    // pointwise radial bounds on the extremal
    {
        RadialProfile u1 = emden_fowler_profile(params.N, params.p, 1.0, 1e-6, 1e6);
        const PointwiseBounds pb = pointwise_bound_checks(u1, params.pstar());
        add("pointwise_gradient_bound", std::isfinite(pb.C_gradient) && pb.C_gradient < 100.0,
            pb.C_gradient, "sup u r^{(N-p)/p} / ||grad u||_p");
        add("pointwise_moment_bound", std::isfinite(pb.C_moment) && pb.C_moment < 100.0,
            pb.C_moment, "sup u r^{N/s} / ||u||_s");
    }

    json out;
    out["checks"] = checks;
    out["pass"] = all_ok;
    std::ofstream(fs::path(cfg.out_dir) / "verify.json") << out.dump(2) << "\n";
    manifest.add_file("verify.json");
    manifest.finalize(all_ok ? "complete" : "failed");
    for (const auto& c : checks)
        std::cout << (c["pass"].get<bool>() ? "[pass] " : "[FAIL] ")
                  << c["name"].get<std::string>() << "\n";
    return all_ok ? 0 : 1;
}

// ---------------------------------------------------------------- rates ----

int cmd_rates(const RunConfig& cfg) {
    ProblemParams params = cfg.problem();
    fs::create_directories(cfg.out_dir);
    Manifest manifest(cfg.out_dir, cfg, "rates");
    const RatePrediction rates = predicted_rates(params);
    json out;
    switch (rates.regime.kind) {
    case RegimeKind::Subcritical: out["regime"] = "subcritical"; break;
    case RegimeKind::Critical: out["regime"] = "critical"; break;
    case RegimeKind::Supercritical: out["regime"] = "supercritical"; break;
    }
    switch (rates.regime.branch) {
    case DimensionBranch::BelowSqrtN: out["branch"] = "p_below_sqrtN"; break;
    case DimensionBranch::EqualSqrtN: out["branch"] = "p_equal_sqrtN"; break;
    case DimensionBranch::AboveSqrtN: out["branch"] = "p_above_sqrtN"; break;
    }
    out["lambda_exponent"] = rates.lambda_exponent;
    out["lambda_log_power"] = rates.lambda_log_power;
    out["u0_exponent_consistent"] = rates.u0_exponent_consistent;
    out["u0_exponent_printed"] = rates.u0_exponent_printed;
    out["sigma_exponent"] = rates.sigma_exponent;
    out["sigma_log_power"] = rates.sigma_log_power;
    out["matching_bounds_proven"] = rates.matching_bounds_proven;
    if (!rates.note.empty()) out["note"] = rates.note;
    std::ofstream(fs::path(cfg.out_dir) / "rates.json") << out.dump(2) << "\n";
    manifest.add_file("rates.json");
    manifest.finalize();
    std::cout << out.dump(2) << "\n";
    if (!rates.note.empty()) std::cerr << "warning: " << rates.note << "\n";
    return 0;
}

} // namespace

int cli_main(const std::vector<std::string>& args) {
    CLI::App app{"radial groundstate laboratory"};
    app.fallthrough(true);

    std::string config_path;
    std::string out_override;
    std::vector<std::string> overrides;
    int jobs_override = -1;
    bool emit_plot = false;

    app.add_option("--config", config_path, "configuration file (key = value sections)");
    app.add_option("--set", overrides, "override a config key: section.key=value");
    app.add_option("--out", out_override, "output directory");
    app.add_option("--jobs", jobs_override, "sweep parallelism (0 = hardware)");
    app.add_flag("--emit-plot-data", emit_plot, "emit two-column plot CSVs");

    auto* solve = app.add_subcommand("solve", "solve one groundstate and write reports");
    auto* sweep = app.add_subcommand("sweep", "solve across an eps grid");
    auto* fit = app.add_subcommand("fit", "fit a power law to a sweep column");
    auto* verify = app.add_subcommand("verify", "run the closed-form property suite");
    auto* rates = app.add_subcommand("rates", "print the predicted exponents");
    app.require_subcommand(1);

    std::vector<char*> argv;
    std::vector<std::string> storage;
    storage.push_back("gslab");
    storage.insert(storage.end(), args.begin(), args.end());
    argv.reserve(storage.size());
    for (auto& s : storage) argv.push_back(s.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 3;
    }

    try {
        RunConfig cfg;
        if (!config_path.empty()) cfg = load_config(config_path);
        for (const auto& kv : overrides) cfg.apply_override(kv);
        if (!out_override.empty()) cfg.out_dir = out_override;
        if (const char* env = std::getenv("GROUNDSTATE_LAB_OUT"))
            if (*env) cfg.out_dir = env;
        if (jobs_override >= 0) cfg.jobs = jobs_override;
        if (emit_plot) cfg.emit_plot_data = true;

        if (solve->parsed()) return cmd_solve(cfg);
        if (sweep->parsed()) return cmd_sweep(cfg);
        if (fit->parsed()) return cmd_fit(cfg);
        if (verify->parsed()) return cmd_verify(cfg);
        if (rates->parsed()) return cmd_rates(cfg);
        throw ConfigError("no subcommand given");
    } catch (const FitError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const SolverError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ConstraintError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const ParamError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const RegimeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const IntegrabilityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace gslab
