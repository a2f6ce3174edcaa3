#include "ergodev/asclt.hpp"

#include <algorithm>
#include <cmath>

#include "ergodev/errors.hpp"
#include "ergodev/steps.hpp"

namespace ergodev {

double asclt_r(std::uint64_t n) {
    // sqrt(1-h) - (1 - h/2) = -(h^2/4) / (sqrt(1-h) + 1 - h/2), h = 1/(n+1)
    const double h = 1.0 / (static_cast<double>(n) + 1.0);
    return -(h * h / 4.0) / (std::sqrt(1.0 - h) + 1.0 - h / 2.0);
}

double wallis_rho(std::uint64_t n) {
    if (n <= 1000) {
        double p = 1.0;
        for (std::uint64_t k = 1; k <= n; ++k) p *= 2.0 * k / (2.0 * k - 1.0);
        return p;
    }
    KahanSum s;
    for (std::uint64_t k = 1; k <= n; ++k) s.add(std::log1p(1.0 / (2.0 * k - 1.0)));
    return std::exp(s.value());
}

AscltResult simulate_asclt(const InnovationDistribution& innov, std::uint64_t n, std::uint64_t seed,
                           std::uint64_t stream, const std::vector<Observable>& obs) {
    if (n == 0) throw ConfigError("asclt horizon must be >= 1");
    const int r = innov.r;
    Rng rng(seed, stream);
    Vec S = Vec::Zero(r), Z = Vec::Zero(r), Zrec = Vec::Zero(r), X = Vec::Zero(r), U;
    std::vector<KahanSum> sz(obs.size()), sx(obs.size());
    KahanSum gam, dabs, uref;
    AscltResult res;
    res.n = n;

    for (std::uint64_t k = 1; k <= n; ++k) {
        const double g = 1.0 / static_cast<double>(k);
        gam.add(g);
        for (std::size_t i = 0; i < obs.size(); ++i) {
            sz[i].add(g * obs[i].f(Z));
            sx[i].add(g * obs[i].f(X));
        }
        dabs.add(g * (Z - X).norm());

        innov.sample(rng, U);
        if (k < n) uref.add(U.norm() / std::pow(static_cast<double>(k), 1.5));
        const double sg = std::sqrt(g);
        S += U;
        Z = S / std::sqrt(static_cast<double>(k));
        Zrec = Zrec - (g / 2.0) * Zrec + sg * U + asclt_r(k - 1) * Zrec;
        X = X - (g / 2.0) * X + sg * U;
        res.max_recursion_error = std::max(res.max_recursion_error, (Zrec - Z).cwiseAbs().maxCoeff());
        res.max_coupling = std::max(res.max_coupling, (Z - X).norm());
    }

    res.Gamma_n = gam.value();
    for (std::size_t i = 0; i < obs.size(); ++i) {
        res.nu_Z.push_back(sz[i].value() / res.Gamma_n);
        res.nu_X.push_back(sx[i].value() / res.Gamma_n);
    }
    res.mean_abs_coupling = dabs.value() / res.Gamma_n;
    res.coupling_reference = uref.value() / res.Gamma_n;
    if (!obs.empty()) res.statistic = std::sqrt(std::log(static_cast<double>(n)) + 1.0) * res.nu_Z[0];
    return res;
}

}  // namespace ergodev
