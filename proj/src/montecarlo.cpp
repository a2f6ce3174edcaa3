#include "ergodev/montecarlo.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <limits>

#include "ergodev/errors.hpp"
#include "ergodev/parallel.hpp"

namespace ergodev {

StatisticMode parse_statistic(const std::string& s) {
    if (s == "unbiased") return StatisticMode::unbiased;
    if (s == "biased") return StatisticMode::biased;
    if (s == "biased-full") return StatisticMode::biased_full;
    if (s == "slutsky") return StatisticMode::slutsky;
    throw ConfigError("unknown statistic '" + s + "' (unbiased, biased, biased-full, slutsky)");
}

std::string to_string(StatisticMode m) {
    switch (m) {
        case StatisticMode::unbiased: return "unbiased";
        case StatisticMode::biased: return "biased";
        case StatisticMode::biased_full: return "biased-full";
        case StatisticMode::slutsky: return "slutsky";
    }
    return "?";
}

std::vector<double> theta_grid() {
    std::vector<double> t;
    for (int j = 1; j <= 5; ++j) t.push_back(1.0 / 3.0 + (2.0 / 3.0) * j / 5.0);
    return t;
}

ProportionInterval clopper_pearson(std::uint64_t k, std::uint64_t n, double level) {
    const double tail = (1.0 - level) / 2.0;
    ProportionInterval ci;
    const double kd = static_cast<double>(k), nd = static_cast<double>(n);
    ci.lo = k == 0 ? 0.0 : boost::math::ibeta_inv(kd, nd - kd + 1.0, tail);
    ci.hi = k == n ? 1.0 : boost::math::ibeta_inv(kd + 1.0, nd - kd, 1.0 - tail);
    return ci;
}

std::vector<TailRow> tail_estimate(const std::vector<double>& stats, const std::vector<double>& grid) {
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw ConfigError("a-grid must be strictly increasing");
    std::vector<TailRow> rows;
    const std::uint64_t total = stats.size();
    for (double a : grid) {
        TailRow r;
        r.a = a;
        r.total = total;
        for (double s : stats)
            if (std::abs(s) >= a) ++r.hits;
        const ProportionInterval ci = clopper_pearson(r.hits, total);
        const double ninf = -std::numeric_limits<double>::infinity();
        r.g_emp = r.hits == 0 ? ninf : std::log(static_cast<double>(r.hits) / total);
        r.ci_lo = ci.lo > 0.0 ? std::log(ci.lo) : ninf;
        r.ci_hi = std::log(ci.hi);
        rows.push_back(r);
    }
    return rows;
}

std::vector<TailTable> run_deviation_curve(const DeviationExperiment& exp) {
    if (exp.mc < 1) throw ConfigError("MC must be >= 1");
    const ModelBundle& m = exp.bundle;
    const bool biased = exp.mode == StatisticMode::biased || exp.mode == StatisticMode::biased_full;
    if (biased && m.phi->order() < 3) throw ConfigError("biased statistic needs D^3 phi");
    if (exp.mode != StatisticMode::slutsky && m.phi->order() < 2)
        throw ConfigError("statistic needs A phi; use the slutsky statistic for a source model");

    std::vector<TailTable> out;
    for (std::size_t j = 0; j < exp.thetas.size(); ++j) {
        StepSequence steps(exp.thetas[j], m.gamma0);
        TrajectoryOptions opt;
        opt.n = exp.n;
        opt.seed = exp.seed;
        opt.x0 = m.x0;
        if (biased) {
            BiasOptions b;
            b.M = exp.M;
            b.beta = m.beta;
            b.with_E = exp.mode == StatisticMode::biased_full;
            b.with_D2 = true;
            opt.bias = b;
        }
        std::vector<double> stats(exp.mc), sig(exp.mc);
        double Gamma_n = 0.0;
        parallel_for(exp.mc, exp.threads, [&](std::uint64_t t) {
            TrajectoryOptions o = opt;
            o.stream = (static_cast<std::uint64_t>(j) << 40) + t;
            TrajectoryResult r = run_trajectory(*m.model, *m.phi, steps, m.innov, o);
            const double sG = std::sqrt(r.Gamma_n);
            double s = 0.0;
            switch (exp.mode) {
                case StatisticMode::unbiased: s = sG * r.nu_Aphi; break;
                case StatisticMode::biased: s = sG * r.nu_Aphi + r.drift_term + r.increment_term; break;
                case StatisticMode::biased_full:
                    s = sG * r.nu_Aphi + r.E + r.drift_term + r.increment_term;
                    break;
                case StatisticMode::slutsky: s = sG * (r.nu_phi - exp.nu_ref) / std::sqrt(r.nu_sigma2); break;
            }
            stats[t] = s;
            sig[t] = r.nu_sigma2;
            if (t == 0) Gamma_n = r.Gamma_n;
        });
        TailTable tab;
        tab.theta = exp.thetas[j];
        tab.Gamma_n = Gamma_n;
        tab.rows = tail_estimate(stats, exp.a_grid);
        KahanSum ms;
        for (double v : sig) ms.add(v);
        tab.mean_nu_sigma2 = ms.value() / exp.mc;
        tab.statistics = std::move(stats);
        out.push_back(std::move(tab));
    }
    return out;
}

ReferenceEstimate estimate_reference(const ModelBundle& m, std::uint64_t n_c, double theta_c,
                                     std::uint64_t seed, std::uint64_t replicates, unsigned threads,
                                     const std::function<double(const Vec&)>& f) {
    if (replicates < 1) throw ConfigError("need at least one replicate");
    StepSequence steps(theta_c, m.gamma0);
    TrajectoryOptions opt;
    opt.n = n_c;
    opt.seed = seed;
    opt.x0 = m.x0;
    if (f) opt.observables.push_back({"f", f});
    std::vector<double> val(replicates), s2(replicates), cc(replicates);
    parallel_for(replicates, threads, [&](std::uint64_t t) {
        TrajectoryOptions o = opt;
        o.stream = t;
        TrajectoryResult r = run_trajectory(*m.model, *m.phi, steps, m.innov, o);
        val[t] = f ? r.nu_obs[0] : r.nu_phi;
        s2[t] = r.nu_sigma2;
        cc[t] = r.nu_carre;
    });
    auto mean = [&](const std::vector<double>& v) {
        KahanSum s;
        for (double x : v) s.add(x);
        return s.value() / static_cast<double>(v.size());
    };
    ReferenceEstimate e;
    e.value = mean(val);
    e.nu_sigma2 = mean(s2);
    e.nu_carre = mean(cc);
    if (replicates > 1) {
        KahanSum ss;
        for (double x : val) ss.add((x - e.value) * (x - e.value));
        e.ci_half = 1.96 * std::sqrt(ss.value() / (replicates - 1) / replicates);
    }
    e.replicates = replicates;
    e.n_c = n_c;
    e.theta_c = theta_c;
    e.seed = seed;
    return e;
}

}  // namespace ergodev
