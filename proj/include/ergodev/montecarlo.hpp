#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ergodev/registry.hpp"
#include "ergodev/scheme.hpp"

namespace ergodev {

enum class StatisticMode {
    unbiased,     // sqrt(Gamma_n) nu_n(A phi)
    biased,       // ... + (B_{n,1} - E_n^1) with M-point quantization
    biased_full,  // ... + B_{n,1}
    slutsky,      // sqrt(Gamma_n)(nu_n(f) - nu_ref) / sqrt(nu_n(|sigma|^2))
};

StatisticMode parse_statistic(const std::string& s);
std::string to_string(StatisticMode m);

// theta_j = 1/3 + (2/3) j / 5, j = 1..5
std::vector<double> theta_grid();

struct DeviationExperiment {
    ModelBundle bundle;
    std::vector<double> thetas;
    std::uint64_t n = 10000;
    std::uint64_t mc = 1000;
    std::vector<double> a_grid;
    StatisticMode mode = StatisticMode::unbiased;
    std::uint64_t seed = 1;
    double nu_ref = 0.0;
    int M = 10;
    unsigned threads = 1;
};

struct TailRow {
    double a = 0.0;
    std::uint64_t hits = 0;
    std::uint64_t total = 0;
    double g_emp = 0.0;  // log of hits/total, -inf for zero hits
    double ci_lo = 0.0;  // log of the Clopper-Pearson 95% band
    double ci_hi = 0.0;
};

struct TailTable {
    double theta = 0.0;
    double Gamma_n = 0.0;
    std::vector<TailRow> rows;
    std::vector<double> statistics;  // one per trajectory, index order
    double mean_nu_sigma2 = 0.0;
};

struct ProportionInterval {
    double lo = 0.0;
    double hi = 1.0;
};

ProportionInterval clopper_pearson(std::uint64_t hits, std::uint64_t total, double level = 0.95);

// Empirical log-tail of |statistics| on the a-grid.
std::vector<TailRow> tail_estimate(const std::vector<double>& statistics, const std::vector<double>& a_grid);

std::vector<TailTable> run_deviation_curve(const DeviationExperiment& exp);

struct ReferenceEstimate {
    double value = 0.0;
    double ci_half = 0.0;  // 1.96 * standard error over replicates
    double nu_sigma2 = 0.0;
    double nu_carre = 0.0;
    std::uint64_t replicates = 0;
    std::uint64_t n_c = 0;
    double theta_c = 0.0;
    std::uint64_t seed = 0;
};

// Ergodic estimate of nu(f) (f = bundle.phi unless given), nu(|sigma|^2) and
// nu(|sigma^T grad phi|^2) averaged over independent replicates.
ReferenceEstimate estimate_reference(const ModelBundle& bundle, std::uint64_t n_c, double theta_c,
                                     std::uint64_t seed, std::uint64_t replicates = 100,
                                     unsigned threads = 1,
                                     const std::function<double(const Vec&)>& f = nullptr);

}  // namespace ergodev
