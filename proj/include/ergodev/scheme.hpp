#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ergodev/bias.hpp"
#include "ergodev/model.hpp"
#include "ergodev/registry.hpp"
#include "ergodev/rng.hpp"
#include "ergodev/steps.hpp"

namespace ergodev {

struct SchemeState {
    std::uint64_t n = 0;
    Vec x;
    KahanSum gamma_sum;  // Gamma_n
};

// X_{n+1} = X_n + g b(X_n) + sqrt(g) sigma(X_n) U_{n+1}, g = gamma_{n+1}
void step(SchemeState& state, const DiffusionModel& model, const StepSequence& steps,
          const InnovationDistribution& innov, Rng& rng);

struct Observable {
    std::string name;
    std::function<double(const Vec&)> f;
};

// Weighted sums sum_k gamma_k f(X_{k-1}); nu_n(f) = sum / Gamma_n.
class EmpiricalAccumulator {
public:
    explicit EmpiricalAccumulator(std::size_t count = 0) : sums_(count) {}
    void add(std::size_t i, double weight, double value) { sums_[i].add(weight * value); }
    void add_weight(double weight) { gamma_.add(weight); }
    double nu(std::size_t i) const { return sums_[i].value() / gamma_.value(); }
    double gamma_sum() const { return gamma_.value(); }
    std::size_t size() const { return sums_.size(); }
    // NaN is left alone: a source may be undefined at isolated points
    bool overflowed() const {
        for (const KahanSum& k : sums_)
            if (std::isinf(k.sum)) return true;
        return false;
    }

private:
    std::vector<KahanSum> sums_;
    KahanSum gamma_;
};

struct TrajectoryOptions {
    std::uint64_t n = 1000;
    std::uint64_t seed = 1;
    std::uint64_t stream = 0;  // trajectory index within a Monte Carlo batch
    InitialCondition x0;
    std::vector<Observable> observables;
    std::optional<BiasOptions> bias;
};

struct TrajectoryResult {
    std::uint64_t n = 0;
    double Gamma_n = 0.0;
    Vec x_final;
    Vec x0;
    double nu_Aphi = 0.0;   // NaN when phi is a first-order source
    double nu_phi = 0.0;
    double nu_sigma2 = 0.0;  // nu_n(|sigma|^2)
    double nu_carre = 0.0;   // nu_n(|sigma^T grad phi|^2)
    std::vector<double> nu_obs;
    bool has_bias = false;
    double E = 0.0;
    double drift_term = 0.0;
    double increment_term = 0.0;
    double max_E_ratio = 0.0;  // max_k |E_k| / a_k seen along the path (bias runs)

    double statistic() const { return std::sqrt(Gamma_n) * nu_Aphi; }
};

// Runs one path and accumulates nu_n of A phi, phi, |sigma|^2, the carre du
// champ and the extra observables. Deterministic in (seed, stream).
TrajectoryResult run_trajectory(const DiffusionModel& model, const TestFunction& phi,
                                const StepSequence& steps, const InnovationDistribution& innov,
                                const TrajectoryOptions& opt);

struct LyapunovReport {
    std::vector<std::uint64_t> steps;
    std::vector<double> mean_exp;  // empirical E[exp(lambda V(X_k))]
    bool growth_flag = false;
    bool overflow = false;
};

// Tracks E[exp(lambda V(X_k))] over `trajectories` paths at `checkpoints`
// evenly spaced steps; flags values beyond twice the max over the first 10%.
LyapunovReport lyapunov_diagnostic(const DiffusionModel& model, const StepSequence& steps,
                                   const InnovationDistribution& innov,
                                   const std::function<double(const Vec&)>& V, double lambda,
                                   std::uint64_t n, std::uint64_t trajectories, std::uint64_t seed,
                                   const InitialCondition& x0, int checkpoints = 100,
                                   unsigned threads = 1);

}  // namespace ergodev
