// Acceptance suite: one PASS/FAIL line per criterion. Tolerances are pinned here.
// Usage: acceptance [--only N]

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "cli.hpp"
#include "ergodev/asclt.hpp"
#include "ergodev/bias.hpp"
#include "ergodev/bounds.hpp"
#include "ergodev/montecarlo.hpp"
#include "ergodev/parallel.hpp"
#include "ergodev/poisson.hpp"
#include "ergodev/registry.hpp"
#include "oracles.hpp"

using namespace ergodev;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

const double kLog2 = std::log(2.0);
const double kTargetAlpha = 3.085;

Outcome c1_confluence() {
    auto b = registry_get("confluent2d");
    auto t0 = std::chrono::steady_clock::now();
    ConfluenceEstimate e = confluence_alpha_scan(*b.model, {-10.0, 10.0, 200, 720}, default_threads());
    const double t = seconds_since(t0);
    const bool ok = e.alpha >= 3.075 && e.alpha <= 3.095 && t < 30.0;
    return {ok, fmt("alpha = %.4f (p = %.6g), target [3.075, 3.095], %.1f s", e.alpha, e.p_exponent, t)};
}

ReferenceEstimate confluent_reference(std::uint64_t replicates) {
    auto b = registry_get("confluent2d");
    return estimate_reference(b, 500000, 1.0 / (2.0 + b.beta) + 1e-3, 20240601, replicates, default_threads());
}

Outcome c2_reference() {
    auto t0 = std::chrono::steady_clock::now();
    ReferenceEstimate r = confluent_reference(100);
    const double t = seconds_since(t0);
    const bool ok = std::abs(r.value - 0.71308) <= 0.005 && t < 600.0;
    return {ok, fmt("nu(f) = %.5f +- %.5f, target 0.71308 +- 0.005, %.1f s", r.value, r.ci_half, t)};
}

Outcome c3_figure1() {
    auto b = registry_get("hypo1d-drifted");
    DeviationExperiment e;
    e.bundle = b;
    e.thetas = theta_grid();
    e.n = 10000;
    e.mc = 1000;
    for (int i = 0; i <= 60; ++i) e.a_grid.push_back(0.05 * i);
    e.seed = 1;
    e.threads = default_threads();
    auto tables = run_deviation_curve(e);

    ReferenceEstimate cal = estimate_reference(b, 10000, 1.0 / 3.0 + 1e-3, 2, 1, 1);
    BoundParams p;
    p.sigma_sup = b.model->sigma_sup();
    p.grad_sup = b.phi->grad_sup();
    p.phi_lip = b.phi->lip1();
    p.theta_lip = b.theta_lip;
    p.nu_sigma2 = cal.nu_sigma2;
    p.nu_carre = cal.nu_carre;

    int checked = 0, bad = 0;
    double worst = -1e300;
    for (const auto& t : tables) {
        auto curves = comparison_curves(e.a_grid, p, t.Gamma_n);
        for (std::size_t i = 0; i < t.rows.size(); ++i) {
            const TailRow& r = t.rows[i];
            if (r.hits < 10) continue;
            ++checked;
            const double m1 = r.g_emp - (curves[i].S_n + kLog2);
            worst = std::max(worst, m1);
            if (m1 > 0.0) ++bad;
            if (r.a <= 1.0) {
                const double m2 = r.g_emp - (curves[i].P_lambda_min + kLog2);
                worst = std::max(worst, m2);
                if (m2 > 0.0) ++bad;
            }
        }
    }
    return {bad == 0 && checked > 0,
            fmt("%g grid points checked, %g violations, max excess %.4f", checked, bad, worst)};
}

Outcome c4_figure4() {
    auto b = registry_get("confluent2d");
    ReferenceEstimate ref = confluent_reference(100);
    DeviationExperiment e;
    e.bundle = b;
    e.thetas = {1.0 / (2.0 + b.beta) + 1e-3};
    e.n = 10000;
    e.mc = 500;
    for (int i = 0; i <= 50; ++i) e.a_grid.push_back(0.02 * i);
    e.mode = StatisticMode::slutsky;
    e.nu_ref = ref.value;
    e.seed = 4;
    e.threads = default_threads();
    auto t = run_deviation_curve(e).front();
    int checked = 0, bad = 0;
    double worst = -1e300;
    for (const TailRow& r : t.rows) {
        if (r.hits < 10) continue;
        ++checked;
        const double m = r.g_emp - (-r.a * r.a * kTargetAlpha * kTargetAlpha / 2.0 + kLog2);
        worst = std::max(worst, m);
        if (m > 0.0) ++bad;
    }
    return {bad == 0 && checked > 0, fmt("nu_ref = %.5f; %g points checked, %g violations, max excess %.4f",
                                         ref.value, checked, bad, worst)};
}

Outcome c5_cardan() {
    std::mt19937_64 g(5);
    std::uniform_real_distribution<double> lu(-6.0, 6.0);
    std::vector<std::pair<double, double>> cubics;
    for (int i = 0; i < 10000; ++i) cubics.emplace_back(std::pow(10.0, lu(g)), -std::pow(10.0, lu(g)));
    auto t0 = std::chrono::steady_clock::now();
    std::vector<double> roots;
    for (auto [p, q] : cubics) roots.push_back(cardan_root(p, q));
    const double t = seconds_since(t0);
    double worst_res = 0.0, worst_rel = 0.0;
    for (std::size_t i = 0; i < cubics.size(); ++i) {
        auto [p, q] = cubics[i];
        const double z = roots[i];
        worst_res = std::max(worst_res, std::abs(z * z * z + p * z + q) / std::max(std::abs(q), 1.0));
        const double zb = oracle::bisect([&](double x) { return x * x * x + p * x + q; }, 0.0,
                                         10.0 * std::max(1.0, std::cbrt(-q)));
        worst_rel = std::max(worst_rel, std::abs(z - zb) / zb);
    }
    return {worst_res < 1e-10 && worst_rel < 1e-9 && t < 1.0,
            fmt("max residual %.2e, max rel. gap to bisection %.2e, %.4f s", worst_res, worst_rel, t)};
}

Outcome c6_consistency() {
    std::mt19937_64 g(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double a = 0.05 + 5 * u(g), G = std::pow(10.0, 1 + 5 * u(g));
        const double At = 0.05 + 2 * u(g), Bt = 0.05 + 2 * u(g), rho = 1.0 + std::pow(10.0, -3 + 4 * u(g));
        const double A = rho * At, B = rho * rho * rho * Bt / (rho - 1.0);
        const double via = oracle::poly_P(cardan_lambda_min(a, G, A, B), a, G, A, B);
        worst = std::max(worst, std::abs(p_lambda_min(a, G, At, Bt, rho) - via) / std::abs(via));
    }
    return {worst < 1e-8, fmt("max relative gap %.2e", worst)};
}

Outcome c7_asclt() {
    double worst = 0.0;
    for (auto kind : {InnovationKind::gaussian, InnovationKind::rademacher})
        worst = std::max(worst, simulate_asclt({kind, 1}, 100000, 7, 0, {}).max_recursion_error);
    return {worst < 1e-12, fmt("max |Z_rec - S/sqrt(n)| = %.2e", worst)};
}

Outcome c8_wallis() {
    const double w = wallis_rho(1000000) / std::sqrt(M_PI * 1e6);
    return {w >= 0.999 && w <= 1.001, fmt("rho_n / sqrt(pi n) = %.7f", w)};
}

Outcome c9_bias() {
    auto b = registry_get("hypo1d-cos");
    StepSequence steps(1.0 / 3.0);
    std::vector<double> ratio(100);
    parallel_for(100, default_threads(), [&](std::uint64_t s) {
        TrajectoryOptions o;
        o.n = 1000;
        o.seed = 9;
        o.stream = s;
        o.x0 = b.x0;
        o.bias = BiasOptions{};
        ratio[s] = run_trajectory(*b.model, *b.phi, steps, b.innov, o).max_E_ratio;
    });
    int bad = 0;
    double worst = 0.0;
    for (double r : ratio) {
        worst = std::max(worst, r);
        bad += r > 1.0;
    }
    return {bad == 0, fmt("%g violations, max_k |E_k|/a_k = %.4f", bad, worst)};
}

Outcome c10_ou() {
    auto b = registry_get("ou1d");
    StepSequence steps(0.5);
    TrajectoryOptions o;
    o.n = 1000000;
    o.seed = 2024;
    o.observables.push_back({"x2", [](const Vec& x) { return x(0) * x(0); }});
    const double v = run_trajectory(*b.model, *b.phi, steps, b.innov, o).nu_obs[0];
    return {std::abs(v - 1.0) <= 0.02, fmt("nu_n(x^2) = %.5f", v)};
}

Outcome c11_derivatives() {
    double worst = 0.0;
    std::mt19937_64 g(11);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    std::vector<ModelBundle> bundles;
    for (const auto& name : registry_names()) bundles.push_back(registry_get(name));
    bundles.push_back(registry_get("hypo1d-drifted", {{"caption", 1}}));
    for (const auto& b : bundles) {
        const DiffusionModel& m = *b.model;
        const TestFunction& phi = *b.phi;
        const int d = m.dim();
        for (int k = 0; k < 100; ++k) {
            Vec x(d);
            for (int i = 0; i < d; ++i) x(i) = u(g);
            auto upd = [&](const Mat& a) { worst = std::max(worst, a.cwiseAbs().maxCoeff()); };
            upd(oracle::fd_jacobian([&](const Vec& y) { return m.drift(y); }, x) - m.drift_jacobian(x));
            for (int j = 0; j < m.noise_dim(); ++j)
                upd(oracle::fd_jacobian([&](const Vec& y) { return Vec(m.sigma(y).col(j)); }, x) -
                    m.sigma_column_jacobian(x, j));
            upd(oracle::fd_gradient([&](const Vec& y) { return phi.value(y); }, x) - phi.gradient(x));
            if (phi.order() >= 3) {
                upd(oracle::fd_jacobian([&](const Vec& y) { return phi.gradient(y); }, x) - phi.hessian(x));
                Tensor3 T = phi.third(x);
                for (int c = 0; c < d; ++c)
                    upd(oracle::fd_jacobian([&](const Vec& y) { return Vec(phi.hessian(y).col(c)); }, x) -
                        T.slice[c]);
            }
        }
    }
    return {worst < 1e-6, fmt("max |analytic - finite difference| = %.2e", worst)};
}

Outcome c12_determinism() {
    auto run = [](const std::vector<std::string>& a) {
        std::ostringstream o, e;
        const int c = cli::run(a, o, e);
        return c == 0 ? o.str() : std::string("exit ") + std::to_string(c) + ": " + e.str();
    };
    bool ok = true;
    std::vector<std::vector<std::string>> cmds = {
        {"figure", "fig1", "--n", "2000", "--mc", "200", "--calib-n", "2000", "--seed", "12"},
        {"figure", "fig2", "--n", "1000", "--mc", "100", "--calib-n", "1000", "--seed", "12"},
        {"figure", "fig4", "--n", "2000", "--mc", "100", "--nu-ref", "0.2", "--seed", "12"},
    };
    for (const auto& c : cmds) {
        std::vector<std::string> outs;
        for (const char* th : {"1", "1", "8", "8"}) {
            auto a = c;
            a.push_back("--threads");
            a.push_back(th);
            outs.push_back(run(a));
        }
        for (const auto& s : outs) ok = ok && s == outs[0] && s.rfind("exit", 0) != 0;
    }
    return {ok, ok ? "fig1, fig2, fig4 byte-identical across runs and threads {1, 8}" : "outputs differ"};
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i)
        if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);

    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"confluence constant", c1_confluence},  {"reference ergodic value", c2_reference},
        {"figure 1 dominance", c3_figure1},      {"figure 4 dominance", c4_figure4},
        {"Cardan oracle", c5_cardan},            {"P(lambda_min) consistency", c6_consistency},
        {"ASCLT recursion", c7_asclt},           {"Wallis asymptotics", c8_wallis},
        {"bias dominance", c9_bias},             {"ou1d invariant variance", c10_ou},
        {"derivative consistency", c11_derivatives}, {"determinism", c12_determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (only && only != static_cast<int>(i + 1)) continue;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("criterion %2zu %-28s %s  %s\n", i + 1, criteria[i].first, o.pass ? "PASS" : "FAIL",
                    o.detail.c_str());
        std::fflush(stdout);
        failed += !o.pass;
    }
    return failed == 0 ? 0 : 1;
}
