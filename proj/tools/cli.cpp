#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "ergodev/asclt.hpp"
#include "ergodev/bias.hpp"
#include "ergodev/bounds.hpp"
#include "ergodev/errors.hpp"
#include "ergodev/montecarlo.hpp"
#include "ergodev/parallel.hpp"
#include "ergodev/poisson.hpp"
#include "ergodev/registry.hpp"

namespace ergodev::cli {

namespace {

constexpr double kTargetAlpha = 3.085;

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

// Exact round-trip formatting for metadata.
std::string exact(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<double> linspace(double lo, double hi, int count) {
    if (count < 1) throw ConfigError("a-count must be >= 1");
    if (count == 1) return {lo};
    if (!(hi > lo)) throw ConfigError("a-max must exceed a-min");
    std::vector<double> g;
    for (int i = 0; i < count; ++i) g.push_back(lo + (hi - lo) * i / (count - 1));
    return g;
}

std::map<std::string, double> parse_params(const std::vector<std::string>& items) {
    std::map<std::string, double> p;
    for (const auto& it : items) {
        const auto eq = it.find('=');
        if (eq == std::string::npos) throw ConfigError("--param expects key=value, got '" + it + "'");
        const std::string key = trim(it.substr(0, eq));
        const std::string val = trim(it.substr(eq + 1));
        try {
            std::size_t used = 0;
            double v = std::stod(val, &used);
            if (used != val.size()) throw std::invalid_argument(val);
            p[key] = v;
        } catch (const std::logic_error&) {
            throw ConfigError("parameter '" + key + "' is not a number: '" + val + "'");
        }
    }
    return p;
}

// Resolved parameters (re-usable as a config file) plus derived provenance.
struct Meta {
    std::vector<std::pair<std::string, std::string>> options;
    std::vector<std::pair<std::string, std::string>> info;

    void opt(const std::string& k, const std::string& v) { options.emplace_back(k, v); }
    void opt(const std::string& k, double v) { options.emplace_back(k, exact(v)); }
    void opt_u(const std::string& k, std::uint64_t v) { options.emplace_back(k, std::to_string(v)); }
    void note(const std::string& k, const std::string& v) { info.emplace_back(k, v); }
    void note(const std::string& k, double v) { info.emplace_back(k, exact(v)); }

    void write(std::ostream& os, const std::string& command) const {
        os << "#: ergodev " << kVersion << "\n";
        os << "#: command = " << command << "\n";
        for (const auto& [k, v] : options) os << "# " << k << " = " << v << "\n";
        for (const auto& [k, v] : info) os << "#: " << k << " = " << v << "\n";
    }
};

struct Common {
    std::string model;
    std::vector<std::string> params;
    std::string innovation;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    std::string output;
    std::string config;
};

void add_common(CLI::App* s, Common& c, bool with_model = true) {
    if (with_model) {
        s->add_option("--model", c.model, "registry model name");
        s->add_option("--param", c.params, "model parameter key=value (repeatable)");
        s->add_option("--innovation", c.innovation, "gaussian or rademacher (default: model's)");
    }
    s->add_option("--seed", c.seed, "master seed");
    s->add_option("--threads", c.threads, "worker threads")->envname("ERGODEV_THREADS");
    s->add_option("-o,--output", c.output, "output CSV path (default stdout)");
    s->add_option("--config", c.config, "flat key = value file");
}

unsigned threads_of(const Common& c) { return c.threads == 0 ? default_threads() : c.threads; }

ModelBundle load_bundle(const Common& c, Meta& meta) {
    ModelBundle b = registry_get(c.model, parse_params(c.params));
    if (!c.innovation.empty()) b.innov.kind = parse_innovation(c.innovation);
    meta.opt("model", c.model);
    for (const auto& [k, v] : b.params) meta.opt("param", k + "=" + exact(v));
    meta.opt("innovation", to_string(b.innov.kind));
    return b;
}

void emit(const Common& c, const std::string& body, std::ostream& out) {
    if (c.output.empty()) {
        out << body;
        out.flush();
        return;
    }
    std::ofstream f(c.output, std::ios::binary);
    if (!f) throw ConfigError("cannot open output file '" + c.output + "'");
    f << body;
}

BoundParams base_params(const ModelBundle& b) {
    BoundParams p;
    p.sigma_sup = b.model->sigma_sup();
    p.grad_sup = b.phi->grad_sup();
    p.phi_lip = b.phi->lip1();
    p.theta_lip = b.theta_lip;
    p.f_lip = b.phi->lip1();
    return p;
}

double default_alpha(const ModelBundle& b, bool recompute, double given, unsigned threads, Meta& meta) {
    if (given > 0.0) {
        meta.note("alpha_source", "flag");
        return given;
    }
    if (b.name == "confluent2d" && !recompute) {
        meta.note("alpha_source", "published constant");
        return kTargetAlpha;
    }
    ConfluenceEstimate e = confluence_alpha_scan(*b.model, ConfluenceGrid{}, threads);
    if (e.violated) throw ConfigError("confluence condition fails on the search box; pass --alpha");
    meta.note("alpha_source", "confluence grid search");
    meta.note("alpha_p", e.p_exponent);
    return e.alpha;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    Common c;
    double theta = 0.5;
    std::uint64_t n = 1000;
    bool bias = false;
    int M = 10;
};

void cmd_simulate(const SimulateArgs& a, std::ostream& out) {
    Meta meta;
    ModelBundle b = load_bundle(a.c, meta);
    StepSequence steps(a.theta, b.gamma0);
    TrajectoryOptions opt;
    opt.n = a.n;
    opt.seed = a.c.seed;
    opt.x0 = b.x0;
    opt.observables.push_back({"x1", [](const Vec& x) { return x(0); }});
    opt.observables.push_back({"x1_sq", [](const Vec& x) { return x(0) * x(0); }});
    if (a.bias) {
        BiasOptions bo;
        bo.M = a.M;
        bo.beta = b.beta;
        opt.bias = bo;
    }
    TrajectoryResult r = run_trajectory(*b.model, *b.phi, steps, b.innov, opt);

    meta.opt("theta", a.theta);
    meta.opt_u("n", a.n);
    meta.opt_u("seed", a.c.seed);
    meta.opt("bias", a.bias ? "true" : "false");
    meta.opt("M", std::to_string(a.M));
    std::ostringstream os;
    meta.write(os, "simulate");
    os << "quantity,value\n";
    os << "Gamma_n," << num(r.Gamma_n) << "\n";
    os << "nu_Aphi," << num(r.nu_Aphi) << "\n";
    os << "statistic," << num(r.statistic()) << "\n";
    os << "nu_phi," << num(r.nu_phi) << "\n";
    os << "nu_sigma2," << num(r.nu_sigma2) << "\n";
    os << "nu_carre," << num(r.nu_carre) << "\n";
    os << "nu_x1," << num(r.nu_obs[0]) << "\n";
    os << "nu_x1_sq," << num(r.nu_obs[1]) << "\n";
    for (int i = 0; i < r.x_final.size(); ++i) os << "x_final_" << i + 1 << "," << num(r.x_final(i)) << "\n";
    if (r.has_bias) {
        os << "E_n," << num(r.E) << "\n";
        os << "drift_term," << num(r.drift_term) << "\n";
        os << "increment_term," << num(r.increment_term) << "\n";
        os << "B_n," << num(r.E + r.drift_term + r.increment_term) << "\n";
        const double an = bias_radius_a_n(b.phi->third_holder(b.beta), b.model->sigma_sup(), b.innov, steps,
                                          a.n, b.beta);
        os << "a_n," << num(an) << "\n";
    }
    emit(a.c, os.str(), out);
}

// ---------------------------------------------------------------- figure

struct FigureArgs {
    Common c;
    std::string id;
    std::vector<double> thetas;
    std::uint64_t n = 0;
    std::uint64_t mc = 0;
    double a_min = 0.0, a_max = 0.0;
    int a_count = 0;
    std::string statistic;
    int M = 10;
    bool carre = false;
    bool recompute_alpha = false;
    double alpha = 0.0;
    double nu_ref = std::nan("");
    std::uint64_t nu_ref_nc = 500000;
    std::uint64_t nu_ref_replicates = 100;
    std::uint64_t calib_n = 10000;
    double calib_theta = 1.0 / 3.0 + 1e-3;
    std::uint64_t calib_replicates = 1;
};

struct FigureDefaults {
    std::string model;
    std::vector<double> thetas;
    std::uint64_t n, mc;
    std::string statistic;
    double a_min, a_max;
    int a_count;
    bool carre;
};

FigureDefaults figure_defaults(const std::string& id, double beta) {
    if (id == "fig1") return {"hypo1d-drifted", theta_grid(), 50000, 10000, "unbiased", 0.0, 3.0, 61, false};
    if (id == "fig2") return {"hypo1d-cos", {1.0 / 3.0}, 5000000, 10000, "biased", 0.0, 3.0, 61, false};
    if (id == "fig3") return {"hypo1d-cos", {1.0 / 3.0}, 1000000, 10000, "biased", 0.0, 3.0, 61, true};
    if (id == "fig4")
        return {"confluent2d", {1.0 / (2.0 + beta) + 1e-3}, 50000, 1000, "slutsky", 0.0, 1.0, 51, false};
    throw ConfigError("unknown figure id '" + id + "' (fig1, fig2, fig3, fig4)");
}

void cmd_figure(FigureArgs a, CLI::App* sub, std::ostream& out) {
    double beta_hint = 0.5;
    for (const auto& [k, v] : parse_params(a.c.params))
        if (k == "beta") beta_hint = v;
    const FigureDefaults d = figure_defaults(a.id, beta_hint);
    auto unset = [&](const char* name) { return sub->count(name) == 0; };
    if (a.c.model.empty()) a.c.model = d.model;
    if (unset("--theta")) a.thetas = d.thetas;
    if (unset("--n")) a.n = d.n;
    if (unset("--mc")) a.mc = d.mc;
    if (unset("--statistic")) a.statistic = d.statistic;
    if (unset("--a-min")) a.a_min = d.a_min;
    if (unset("--a-max")) a.a_max = d.a_max;
    if (unset("--a-count")) a.a_count = d.a_count;
    if (unset("--carre")) a.carre = d.carre;

    Meta meta;
    ModelBundle b = load_bundle(a.c, meta);
    const unsigned threads = threads_of(a.c);
    DeviationExperiment exp;
    exp.bundle = b;
    exp.thetas = a.thetas;
    exp.n = a.n;
    exp.mc = a.mc;
    exp.a_grid = linspace(a.a_min, a.a_max, a.a_count);
    exp.mode = parse_statistic(a.statistic);
    exp.seed = a.c.seed;
    exp.M = a.M;
    exp.threads = threads;

    for (double t : a.thetas) meta.opt("theta", t);
    meta.opt_u("n", a.n);
    meta.opt_u("mc", a.mc);
    meta.opt("a-min", a.a_min);
    meta.opt("a-max", a.a_max);
    meta.opt("a-count", std::to_string(a.a_count));
    meta.opt("statistic", a.statistic);
    meta.opt("M", std::to_string(a.M));
    meta.opt("carre", a.carre ? "true" : "false");
    meta.opt_u("seed", a.c.seed);
    meta.opt_u("calib-n", a.calib_n);
    meta.opt("calib-theta", a.calib_theta);
    meta.opt_u("calib-replicates", a.calib_replicates);
    meta.note("figure", a.id);
    meta.note("proof_sequences", "c_n = C_n = 1, e_n = 0, q = 1 (limits)");

    const bool slutsky = exp.mode == StatisticMode::slutsky;
    double alpha = 0.0;
    if (slutsky) {
        if (std::isnan(a.nu_ref)) {
            ReferenceEstimate ref = estimate_reference(b, a.nu_ref_nc, a.thetas.front(), a.c.seed + 1,
                                                       a.nu_ref_replicates, threads);
            exp.nu_ref = ref.value;
            meta.opt_u("nu-ref-nc", a.nu_ref_nc);
            meta.opt_u("nu-ref-replicates", a.nu_ref_replicates);
            meta.note("nu_ref", ref.value);
            meta.note("nu_ref_ci_half", ref.ci_half);
            meta.note("nu_ref_provenance", "ergodic estimate, seed + 1, theta = first theta");
        } else {
            exp.nu_ref = a.nu_ref;
            meta.opt("nu-ref", a.nu_ref);
            meta.note("nu_ref_provenance", "flag");
        }
        if (a.alpha > 0.0) meta.opt("alpha", a.alpha);
        meta.opt("recompute-alpha", a.recompute_alpha ? "true" : "false");
        alpha = default_alpha(b, a.recompute_alpha, a.alpha, threads, meta);
        meta.note("alpha", alpha);
    }

    const std::vector<TailTable> tables = run_deviation_curve(exp);

    BoundParams bp = base_params(b);
    if (!slutsky) {
        const std::uint64_t calib_seed = a.c.seed ^ 0x9E3779B97F4A7C15ull;
        ReferenceEstimate cal = estimate_reference(b, a.calib_n, a.calib_theta, calib_seed, a.calib_replicates, threads);
        bp.nu_sigma2 = cal.nu_sigma2;
        bp.nu_carre = cal.nu_carre;
        meta.note("calib_seed", std::to_string(calib_seed));
        meta.note("nu_sigma2_estimate", cal.nu_sigma2);
        meta.note("nu_carre_estimate", cal.nu_carre);
        meta.note("theta_lip", b.theta_lip);
    }

    std::ostringstream os;
    meta.write(os, "figure");
    os << "theta,a,g_emp,ci_lo,ci_hi,S_n,S_nc,S_nA,P_lambda_min" << (a.carre ? ",P_lambda_min_carre" : "") << "\n";
    for (const TailTable& t : tables) {
        std::vector<CurveRow> curves;
        if (!slutsky) {
            BoundParams p = bp;
            if (exp.mode == StatisticMode::biased) {
                StepSequence steps(t.theta, b.gamma0);
                p.a_n = bias_radius_a_n(b.phi->third_holder(b.beta), p.sigma_sup, b.innov, steps, a.n, b.beta);
            }
            curves = comparison_curves(exp.a_grid, p, t.Gamma_n, a.carre);
        }
        for (std::size_t i = 0; i < t.rows.size(); ++i) {
            const TailRow& r = t.rows[i];
            os << num(t.theta) << "," << num(r.a) << "," << num(r.g_emp) << "," << num(r.ci_lo) << ","
               << num(r.ci_hi) << ",";
            if (slutsky) {
                const double s = -r.a * r.a * alpha * alpha / (2.0 * bp.f_lip * bp.f_lip);
                os << num(s) << ",nan,nan,nan" << (a.carre ? ",nan" : "");
            } else {
                const CurveRow& c = curves[i];
                os << num(c.S_n) << "," << num(c.S_nc) << "," << num(c.S_nA) << "," << num(c.P_lambda_min);
                if (a.carre) os << "," << num(c.P_lambda_min_carre);
            }
            os << "\n";
        }
    }
    emit(a.c, os.str(), out);
}

// ---------------------------------------------------------------- bounds

struct BoundsArgs {
    Common c;
    double theta = 0.5;
    std::uint64_t n = 10000;
    double a_min = 0.0, a_max = 3.0;
    int a_count = 31;
    std::string form = "proof";
    std::string statistic = "unbiased";
    double nu_sigma2 = std::nan("");
    double nu_carre = std::nan("");
    std::uint64_t calib_n = 10000;
    double calib_theta = 1.0 / 3.0 + 1e-3;
};

void cmd_bounds(const BoundsArgs& a, std::ostream& out) {
    Meta meta;
    ModelBundle b = load_bundle(a.c, meta);
    StepSequence steps(a.theta, b.gamma0);
    const double G = steps.gamma_sum(a.n);
    if (a.form != "proof" && a.form != "theorem") throw ConfigError("--form must be proof or theorem");
    const CoboundaryForm form = a.form == "proof" ? CoboundaryForm::proof : CoboundaryForm::theorem;
    const StatisticMode mode = parse_statistic(a.statistic);

    BoundParams p = base_params(b);
    meta.opt("theta", a.theta);
    meta.opt_u("n", a.n);
    meta.opt("a-min", a.a_min);
    meta.opt("a-max", a.a_max);
    meta.opt("a-count", std::to_string(a.a_count));
    meta.opt("form", a.form);
    meta.opt("statistic", a.statistic);
    meta.opt_u("seed", a.c.seed);
    if (std::isnan(a.nu_sigma2) || std::isnan(a.nu_carre)) {
        ReferenceEstimate cal = estimate_reference(b, a.calib_n, a.calib_theta, a.c.seed, 1, threads_of(a.c));
        p.nu_sigma2 = cal.nu_sigma2;
        p.nu_carre = cal.nu_carre;
        meta.opt_u("calib-n", a.calib_n);
        meta.opt("calib-theta", a.calib_theta);
    }
    if (!std::isnan(a.nu_sigma2)) {
        p.nu_sigma2 = a.nu_sigma2;
        meta.opt("nu-sigma2", a.nu_sigma2);
    }
    if (!std::isnan(a.nu_carre)) {
        p.nu_carre = a.nu_carre;
        meta.opt("nu-carre", a.nu_carre);
    }
    if (mode == StatisticMode::biased)
        p.a_n = bias_radius_a_n(b.phi->third_holder(b.beta), p.sigma_sup, b.innov, steps, a.n, b.beta);
    meta.note("Gamma_n", G);
    meta.note("a_n", p.a_n);
    meta.note("nu_sigma2", p.nu_sigma2);
    meta.note("nu_carre", p.nu_carre);
    meta.note("A_tilde", coboundary_A_tilde(p));
    meta.note("B_tilde", coboundary_B_tilde(p));
    meta.note("proof_sequences", "c_n = C_n = 1, e_n = 0, q = 1 (limits)");

    const std::vector<double> grid = linspace(a.a_min, a.a_max, a.a_count);
    const std::vector<CurveRow> curves = comparison_curves(grid, p, G, true);
    const double At = coboundary_A_tilde(p), Bt = coboundary_B_tilde(p);
    std::ostringstream os;
    meta.write(os, "bounds");
    os << "a,curve,value\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double av = grid[i];
        const double e = std::max(av - p.a_n, 0.0);
        const CoboundaryBranches cb = coboundary_branches(e, G, p, form);
        const auto row = [&](const char* name, double v) { os << num(av) << "," << name << "," << num(v) << "\n"; };
        row("gaussian_log_bound", gaussian_log_bound(av, p, false));
        row("coboundary_log_bound", cb.log_bound);
        row("coboundary_quadratic", cb.quadratic);
        row("coboundary_quartic", cb.quartic);
        row("S_n", curves[i].S_n);
        row("S_nc", curves[i].S_nc);
        row("S_nA", curves[i].S_nA);
        row("P_lambda_min", curves[i].P_lambda_min);
        row("P_lambda_min_carre", curves[i].P_lambda_min_carre);
        row("rho_star", e > 0.0 ? optimize_rho(e, G, At, Bt).rho : std::nan(""));
    }
    emit(a.c, os.str(), out);
}

// ---------------------------------------------------------------- interval

struct IntervalArgs {
    Common c;
    double theta = std::nan("");
    std::uint64_t n = 500000;
    double coverage = 0.95;
    double a = std::nan("");
    double alpha = 0.0;
    bool recompute_alpha = false;
};

void cmd_interval(const IntervalArgs& a, std::ostream& out) {
    Meta meta;
    ModelBundle b = load_bundle(a.c, meta);
    const double theta = std::isnan(a.theta) ? 1.0 / (2.0 + b.beta) + 1e-3 : a.theta;
    const double av = std::isnan(a.a) ? coverage_to_a(a.coverage) : a.a;
    const unsigned threads = threads_of(a.c);
    BoundParams p = base_params(b);
    p.alpha = default_alpha(b, a.recompute_alpha, a.alpha, threads, meta);

    StepSequence steps(theta, b.gamma0);
    TrajectoryOptions opt;
    opt.n = a.n;
    opt.seed = a.c.seed;
    opt.x0 = b.x0;
    TrajectoryResult r = run_trajectory(*b.model, *b.phi, steps, b.innov, opt);

    meta.opt("theta", theta);
    meta.opt_u("n", a.n);
    if (std::isnan(a.a))
        meta.opt("coverage", a.coverage);
    else
        meta.opt("a", a.a);
    if (a.alpha > 0.0) meta.opt("alpha", a.alpha);
    meta.opt("recompute-alpha", a.recompute_alpha ? "true" : "false");
    meta.opt_u("seed", a.c.seed);
    meta.note("a_level", av);
    meta.note("alpha", p.alpha);
    meta.note("f_lip", p.f_lip);
    meta.note("Gamma_n", r.Gamma_n);
    meta.note("nu_n_sigma2", r.nu_sigma2);

    std::ostringstream os;
    meta.write(os, "interval");
    os << "mode,nu_n_f,lower,upper,half_width,coverage\n";
    const std::pair<const char*, IntervalMode> modes[] = {
        {"plain", IntervalMode::plain}, {"slutsky", IntervalMode::slutsky}, {"lipschitz", IntervalMode::lipschitz}};
    for (const auto& [name, mode] : modes) {
        ConfidenceInterval ci = confidence_interval(r.nu_phi, av, p, r.Gamma_n, mode, r.nu_sigma2);
        os << name << "," << num(r.nu_phi) << "," << num(ci.lower) << "," << num(ci.upper) << ","
           << num(ci.half_width) << "," << num(ci.coverage) << "\n";
    }
    emit(a.c, os.str(), out);
}

// ---------------------------------------------------------------- confluence

struct ConfluenceArgs {
    Common c;
    double p = std::nan("");
    double lo = -10.0, hi = 10.0;
    int resolution = 200;
    int directions = 720;
};

void cmd_confluence(const ConfluenceArgs& a, std::ostream& out) {
    Meta meta;
    ModelBundle b = load_bundle(a.c, meta);
    ConfluenceGrid g{a.lo, a.hi, a.resolution, a.directions};
    const unsigned threads = threads_of(a.c);
    ConfluenceEstimate e = std::isnan(a.p) ? confluence_alpha_scan(*b.model, g, threads)
                                           : confluence_alpha(*b.model, a.p, g, threads);
    if (!std::isnan(a.p)) meta.opt("p", a.p);
    meta.opt("lo", a.lo);
    meta.opt("hi", a.hi);
    meta.opt("resolution", std::to_string(a.resolution));
    meta.opt("directions", std::to_string(a.directions));
    std::ostringstream os;
    meta.write(os, "confluence");
    os << "key,value\n";
    os << "alpha," << num(e.alpha) << "\n";
    os << "p," << num(e.p_exponent) << "\n";
    os << "max_value," << num(e.max_value) << "\n";
    os << "violated," << (e.violated ? "true" : "false") << "\n";
    for (int i = 0; i < e.worst_x.size(); ++i) os << "witness_x" << i + 1 << "," << num(e.worst_x(i)) << "\n";
    for (int i = 0; i < e.worst_xi.size(); ++i) os << "witness_xi" << i + 1 << "," << num(e.worst_xi(i)) << "\n";
    if (!e.violated) os << "gradient_bound," << num(gradient_bound(b.phi->lip1(), e.alpha)) << "\n";
    emit(a.c, os.str(), out);
}

// ---------------------------------------------------------------- asclt

struct AscltArgs {
    Common c;
    std::uint64_t n = 100000;
    std::uint64_t runs = 1000;
    std::string f = "sinx";
    std::string innovation = "gaussian";
    double a_min = 0.0, a_max = 3.0;
    int a_count = 31;
};

void cmd_asclt(const AscltArgs& a, std::ostream& out) {
    Observable f;
    double lip = 1.0;
    if (a.f == "sinx") {
        f = {"sinx", [](const Vec& x) { return std::sin(x(0)); }};
    } else if (a.f == "x") {
        f = {"x", [](const Vec& x) { return x(0); }};
    } else if (a.f == "x2") {
        f = {"x2", [](const Vec& x) { return x(0) * x(0) - 1.0; }};
        lip = std::numeric_limits<double>::infinity();
    } else if (a.f == "cubic") {
        f = {"cubic", [](const Vec& x) { return std::clamp(x(0) * x(0) * x(0), -10.0, 10.0); }};
        lip = 3.0 * std::cbrt(100.0);
    } else {
        throw ConfigError("unknown --f '" + a.f + "' (sinx, x, x2, cubic)");
    }
    InnovationDistribution innov{parse_innovation(a.innovation), 1};
    if (a.runs < 1) throw ConfigError("--runs must be >= 1");
    std::vector<AscltResult> res(a.runs);
    parallel_for(a.runs, threads_of(a.c), [&](std::uint64_t t) { res[t] = simulate_asclt(innov, a.n, a.c.seed, t, {f}); });
    std::vector<double> stats;
    double rec = 0.0;
    for (const auto& r : res) {
        stats.push_back(r.statistic);
        rec = std::max(rec, r.max_recursion_error);
    }
    const std::vector<double> grid = linspace(a.a_min, a.a_max, a.a_count);
    const std::vector<TailRow> rows = tail_estimate(stats, grid);

    Meta meta;
    meta.opt_u("n", a.n);
    meta.opt_u("runs", a.runs);
    meta.opt("f", a.f);
    meta.opt("innovation", a.innovation);
    meta.opt("a-min", a.a_min);
    meta.opt("a-max", a.a_max);
    meta.opt("a-count", std::to_string(a.a_count));
    meta.opt_u("seed", a.c.seed);
    meta.note("f_lip", lip);
    meta.note("run0_nu_Z", res[0].nu_Z[0]);
    meta.note("run0_nu_X", res[0].nu_X[0]);
    meta.note("run0_max_coupling", res[0].max_coupling);
    meta.note("max_recursion_error", rec);
    meta.note("proof_sequences", "c_n = C_n = 1 (limits)");
    std::ostringstream os;
    meta.write(os, "asclt");
    os << "a,g_emp,ci_lo,ci_hi,bound\n";
    for (const TailRow& r : rows) {
        const double bound = std::log(2.0) - r.a * r.a / (2.0 * 4.0 * lip * lip);
        os << num(r.a) << "," << num(r.g_emp) << "," << num(r.ci_lo) << "," << num(r.ci_hi) << "," << num(bound)
           << "\n";
    }
    emit(a.c, os.str(), out);
}

// Inserts config-file tokens for keys not already given on the command line.
std::vector<std::string> merge_config(const std::vector<std::string>& args) {
    std::string path;
    std::set<std::string> given;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string& t = args[i];
        if (t.rfind("--", 0) != 0) continue;
        std::string key = t.substr(2);
        std::string val;
        const auto eq = key.find('=');
        if (eq != std::string::npos) {
            val = key.substr(eq + 1);
            key = key.substr(0, eq);
        } else if (i + 1 < args.size()) {
            val = args[i + 1];
        }
        if (key == "config") path = val;
        given.insert(key);
    }
    if (path.empty()) return args;
    std::vector<std::string> merged = args;
    for (const auto& [k, v] : read_flat_config(path))
        if (!given.count(k)) merged.push_back("--" + k + "=" + v);
    return merged;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> read_flat_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::vector<std::pair<std::string, std::string>> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
        kv.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    return kv;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    CLI::App app("Decreasing-step Euler schemes, deviation bounds and Monte Carlo deviation curves", "ergodev");
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    SimulateArgs sim;
    auto* s_sim = app.add_subcommand("simulate", "run one trajectory and print nu_n summaries");
    add_common(s_sim, sim.c);
    sim.c.model = "ou1d";
    s_sim->add_option("--theta", sim.theta, "step exponent");
    s_sim->add_option("--n", sim.n, "horizon");
    s_sim->add_flag("--bias", sim.bias, "accumulate the bias corrector terms");
    s_sim->add_option("--M", sim.M, "midpoint nodes for the bias integrals");

    FigureArgs fig;
    auto* s_fig = app.add_subcommand("figure", "Monte Carlo deviation curves with bound overlays");
    add_common(s_fig, fig.c);
    s_fig->add_option("id", fig.id, "fig1, fig2, fig3 or fig4")->required();
    s_fig->add_option("--theta", fig.thetas, "step exponents (repeatable)");
    s_fig->add_option("--n", fig.n, "horizon");
    s_fig->add_option("--mc", fig.mc, "trajectories per theta");
    s_fig->add_option("--a-min", fig.a_min);
    s_fig->add_option("--a-max", fig.a_max);
    s_fig->add_option("--a-count", fig.a_count);
    s_fig->add_option("--statistic", fig.statistic, "unbiased, biased, biased-full, slutsky");
    s_fig->add_option("--M", fig.M, "midpoint nodes for the bias integrals");
    s_fig->add_flag("--carre", fig.carre, "add the carre du champ P(lambda_min) column");
    s_fig->add_flag("--recompute-alpha", fig.recompute_alpha, "grid-search alpha instead of the published value");
    s_fig->add_option("--alpha", fig.alpha, "gradient-bound constant");
    s_fig->add_option("--nu-ref", fig.nu_ref, "reference value of nu(f) for the slutsky statistic");
    s_fig->add_option("--nu-ref-nc", fig.nu_ref_nc);
    s_fig->add_option("--nu-ref-replicates", fig.nu_ref_replicates);
    s_fig->add_option("--calib-n", fig.calib_n);
    s_fig->add_option("--calib-theta", fig.calib_theta);
    s_fig->add_option("--calib-replicates", fig.calib_replicates);

    BoundsArgs bnd;
    auto* s_bnd = app.add_subcommand("bounds", "closed-form deviation bounds on an a-grid");
    add_common(s_bnd, bnd.c);
    bnd.c.model = "hypo1d-drifted";
    s_bnd->add_option("--theta", bnd.theta);
    s_bnd->add_option("--n", bnd.n);
    s_bnd->add_option("--a-min", bnd.a_min);
    s_bnd->add_option("--a-max", bnd.a_max);
    s_bnd->add_option("--a-count", bnd.a_count);
    s_bnd->add_option("--form", bnd.form, "proof or theorem");
    s_bnd->add_option("--statistic", bnd.statistic);
    s_bnd->add_option("--nu-sigma2", bnd.nu_sigma2);
    s_bnd->add_option("--nu-carre", bnd.nu_carre);
    s_bnd->add_option("--calib-n", bnd.calib_n);
    s_bnd->add_option("--calib-theta", bnd.calib_theta);

    IntervalArgs itv;
    auto* s_itv = app.add_subcommand("interval", "non-asymptotic confidence intervals for nu(f)");
    add_common(s_itv, itv.c);
    itv.c.model = "confluent2d";
    s_itv->add_option("--theta", itv.theta);
    s_itv->add_option("--n", itv.n);
    s_itv->add_option("--coverage", itv.coverage);
    s_itv->add_option("--a", itv.a, "deviation level (overrides --coverage)");
    s_itv->add_option("--alpha", itv.alpha);
    s_itv->add_flag("--recompute-alpha", itv.recompute_alpha);

    ConfluenceArgs con;
    auto* s_con = app.add_subcommand("confluence", "grid search of the confluence constant alpha");
    add_common(s_con, con.c);
    con.c.model = "confluent2d";
    s_con->add_option("--p", con.p, "exponent in [1,2); default scans 1, 1.5, 2-1e-6");
    s_con->add_option("--lo", con.lo);
    s_con->add_option("--hi", con.hi);
    s_con->add_option("--resolution", con.resolution);
    s_con->add_option("--directions", con.directions);

    AscltArgs asc;
    auto* s_asc = app.add_subcommand("asclt", "almost-sure CLT deviation curve");
    add_common(s_asc, asc.c, false);
    s_asc->add_option("--n", asc.n);
    s_asc->add_option("--runs", asc.runs);
    s_asc->add_option("--f", asc.f, "sinx, x, x2, cubic");
    s_asc->add_option("--innovation", asc.innovation);
    s_asc->add_option("--a-min", asc.a_min);
    s_asc->add_option("--a-max", asc.a_max);
    s_asc->add_option("--a-count", asc.a_count);

    try {
        std::vector<std::string> args = merge_config(raw_args);
        std::vector<std::string> rev(args.rbegin(), args.rend());
        try {
            app.parse(rev);
        } catch (const CLI::ParseError& e) {
            const int code = app.exit(e, out, err);
            return code == 0 ? 0 : 2;
        }
        if (s_sim->parsed()) cmd_simulate(sim, out);
        else if (s_fig->parsed()) cmd_figure(fig, s_fig, out);
        else if (s_bnd->parsed()) cmd_bounds(bnd, out);
        else if (s_itv->parsed()) cmd_interval(itv, out);
        else if (s_con->parsed()) cmd_confluence(con, out);
        else if (s_asc->parsed()) cmd_asclt(asc, out);
        return 0;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const SimulationError& e) {
        err << "simulation error: " << e.what() << "\n";
        return 3;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "simulation error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace ergodev::cli
