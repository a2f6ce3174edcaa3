#include "ergodev/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ergodev/errors.hpp"
#include "ergodev/parallel.hpp"

namespace ergodev {

unsigned default_threads() {
    unsigned h = std::thread::hardware_concurrency();
    return h == 0 ? 1u : h;
}

namespace {

Vec initial_point(const InitialCondition& x0, int d, Rng& rng) {
    Vec x = x0.point.size() == d ? x0.point : Vec::Zero(d);
    if (x0.random_sign) x *= rng.sign();
    return x;
}

void check_finite(const Vec& x, std::uint64_t n) {
    if (!x.allFinite()) throw SimulationError("non-finite scheme state", n);
}

}  // namespace

void step(SchemeState& s, const DiffusionModel& model, const StepSequence& steps,
          const InnovationDistribution& innov, Rng& rng) {
    const double g = steps.gamma(s.n + 1);
    Vec u;
    innov.sample(rng, u);
    s.x = s.x + g * model.drift(s.x) + std::sqrt(g) * (model.sigma(s.x) * u);
    s.gamma_sum.add(g);
    ++s.n;
    check_finite(s.x, s.n);
}

TrajectoryResult run_trajectory(const DiffusionModel& model, const TestFunction& phi,
                                const StepSequence& steps, const InnovationDistribution& innov,
                                const TrajectoryOptions& opt) {
    if (opt.n == 0) throw ConfigError("horizon n must be >= 1");
    if (innov.r != model.noise_dim()) throw ConfigError("innovation dimension does not match sigma");
    const int d = model.dim();
    Rng rng(opt.seed, opt.stream);
    TrajectoryResult res;
    Vec x = initial_point(opt.x0, d, rng);
    res.x0 = x;

    const bool second = phi.order() >= 2;
    EmpiricalAccumulator acc(4 + opt.observables.size());
    std::optional<BiasAccumulator> bias;
    if (opt.bias) bias.emplace(model, phi, innov, *opt.bias);

    // running a_k for the pathwise |E_k| <= a_k check
    double a_const = 0.0;
    KahanSum holder_sum;
    if (bias && opt.bias->with_E) {
        const double beta = opt.bias->beta;
        const double p = 3.0 + beta;
        a_const = phi.third_holder(beta) * std::pow(model.sigma_sup(), p) * innov.abs_moment(p) /
                  ((1.0 + beta) * (2.0 + beta) * (3.0 + beta));
    }

    Vec u;
    for (std::uint64_t k = 1; k <= opt.n; ++k) {
        const double g = steps.gamma(k);
        const Vec b = model.drift(x);
        const Mat s = model.sigma(x);
        const Vec grad = phi.gradient(x);

        acc.add_weight(g);
        const double sig2 = s.squaredNorm();
        if (second) {
            const Mat S = s * s.transpose();
            acc.add(0, g, b.dot(grad) + 0.5 * S.cwiseProduct(phi.hessian(x)).sum());
            if (bias) bias->observe(x, b, s, S, g);
        }
        acc.add(1, g, phi.value(x));
        acc.add(2, g, sig2);
        acc.add(3, g, (s.transpose() * grad).squaredNorm());
        for (std::size_t i = 0; i < opt.observables.size(); ++i)
            acc.add(4 + i, g, opt.observables[i].f(x));
        if (acc.overflowed()) throw SimulationError("empirical measure overflowed", k);

        if (bias && opt.bias->with_E && a_const > 0.0) {
            holder_sum.add(std::pow(g, (3.0 + opt.bias->beta) / 2.0));
            const double G = acc.gamma_sum();
            const double a_k = a_const * holder_sum.value() / std::sqrt(G);
            res.max_E_ratio = std::max(res.max_E_ratio, std::abs(bias->E(G)) / a_k);
        }

        innov.sample(rng, u);
        x = x + g * b + std::sqrt(g) * (s * u);
        check_finite(x, k);
    }

    res.n = opt.n;
    res.Gamma_n = acc.gamma_sum();
    res.x_final = x;
    res.nu_Aphi = second ? acc.nu(0) : std::numeric_limits<double>::quiet_NaN();
    res.nu_phi = acc.nu(1);
    res.nu_sigma2 = acc.nu(2);
    res.nu_carre = acc.nu(3);
    for (std::size_t i = 0; i < opt.observables.size(); ++i) res.nu_obs.push_back(acc.nu(4 + i));
    if (bias) {
        res.has_bias = true;
        res.E = bias->E(res.Gamma_n);
        res.drift_term = bias->drift_term(res.Gamma_n);
        res.increment_term = bias->increment_term(res.Gamma_n);
    }
    return res;
}

LyapunovReport lyapunov_diagnostic(const DiffusionModel& model, const StepSequence& steps,
                                   const InnovationDistribution& innov,
                                   const std::function<double(const Vec&)>& V, double lambda,
                                   std::uint64_t n, std::uint64_t trajectories, std::uint64_t seed,
                                   const InitialCondition& x0, int checkpoints, unsigned threads) {
    if (checkpoints < 1 || n < 1 || trajectories < 1) throw ConfigError("diagnostic needs positive sizes");
    LyapunovReport rep;
    for (int c = 1; c <= checkpoints; ++c)
        rep.steps.push_back(std::max<std::uint64_t>(1, n * c / checkpoints));

    std::vector<std::vector<double>> per(trajectories);
    std::vector<char> overflow(trajectories, 0);
    parallel_for(trajectories, threads, [&](std::uint64_t t) {
        Rng rng(seed, t);
        SchemeState s;
        s.x = initial_point(x0, model.dim(), rng);
        std::vector<double>& row = per[t];
        row.assign(rep.steps.size(), 0.0);
        std::size_t c = 0;
        try {
            for (std::uint64_t k = 1; k <= n && c < rep.steps.size(); ++k) {
                step(s, model, steps, innov, rng);
                while (c < rep.steps.size() && rep.steps[c] == k) {
                    double v = std::exp(lambda * V(s.x));
                    if (!std::isfinite(v)) throw SimulationError("exp overflow", k);
                    row[c++] = v;
                }
            }
        } catch (const SimulationError&) {
            overflow[t] = 1;
            for (; c < row.size(); ++c) row[c] = std::numeric_limits<double>::infinity();
        }
    });

    rep.mean_exp.assign(rep.steps.size(), 0.0);
    for (std::uint64_t t = 0; t < trajectories; ++t) {
        rep.overflow = rep.overflow || overflow[t];
        for (std::size_t c = 0; c < rep.steps.size(); ++c) rep.mean_exp[c] += per[t][c] / trajectories;
    }
    const std::size_t head = std::max<std::size_t>(1, rep.steps.size() / 10);
    const double ref = *std::max_element(rep.mean_exp.begin(), rep.mean_exp.begin() + head);
    for (std::size_t c = head; c < rep.mean_exp.size(); ++c)
        if (!(rep.mean_exp[c] <= 2.0 * ref)) rep.growth_flag = true;
    if (rep.overflow) rep.growth_flag = true;
    return rep;
}

}  // namespace ergodev
