#pragma once

#include <cstdint>
#include <vector>

#include "ergodev/model.hpp"
#include "ergodev/scheme.hpp"

namespace ergodev {

// r_n = sqrt(1 - 1/(n+1)) - 1 + 1/(2(n+1))
double asclt_r(std::uint64_t n);

// prod_{k=1}^n 2k/(2k-1)
double wallis_rho(std::uint64_t n);

struct AscltResult {
    std::uint64_t n = 0;
    double Gamma_n = 0.0;
    std::vector<double> nu_Z;          // nu_n^Z(f) per observable
    std::vector<double> nu_X;          // companion scheme nu_n^X(f)
    double max_coupling = 0.0;         // sup_k |Z_k - X_k|
    double mean_abs_coupling = 0.0;    // (1/Gamma_n) sum gamma_k |Delta_{k-1}|
    double coupling_reference = 0.0;   // (1/Gamma_n) sum_{l<n} |U_l| / l^{3/2}
    double max_recursion_error = 0.0;  // sup_k |Z_k (recursion) - S_k/sqrt(k)|
    double statistic = 0.0;            // sqrt(log n + 1) nu_n^Z(first observable)
};

// Normalised partial sums Z_n = S_n / sqrt(n) run alongside the decreasing
// step scheme X_{n+1} = X_n - (g/2) X_n + sqrt(g) U_{n+1}, g = 1/(n+1), on
// shared innovations.
AscltResult simulate_asclt(const InnovationDistribution& innov, std::uint64_t n, std::uint64_t seed,
                           std::uint64_t stream, const std::vector<Observable>& observables);

}  // namespace ergodev
