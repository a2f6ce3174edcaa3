#include "ergodev/steps.hpp"

#include <cmath>
#include <stdexcept>

#include "ergodev/errors.hpp"

namespace ergodev {

StepSequence::StepSequence(double theta, double gamma0)
    : theta_(theta), gamma0_(gamma0), cache_(std::make_shared<Cache>()) {
    if (!(theta > 0.0 && theta <= 1.0)) throw ConfigError("theta must lie in (0,1]");
    if (!(gamma0 > 0.0)) throw ConfigError("gamma0 must be positive");
}

double StepSequence::gamma(std::uint64_t k) const {
    if (k == 0) throw std::domain_error("step index starts at 1");
    return gamma0_ * std::pow(static_cast<double>(k), -theta_);
}

double StepSequence::gamma_sum(std::uint64_t n, double ell) const {
    if (n == 0) throw std::domain_error("gamma_sum needs n >= 1");
    std::lock_guard<std::mutex> lock(cache_->mu);
    Table& t = cache_->tables[ell];
    if (t.prefix.size() < n) {
        t.prefix.reserve(n);
        for (std::uint64_t k = t.prefix.size() + 1; k <= n; ++k) {
            t.acc.add(std::pow(gamma(k), ell));
            t.prefix.push_back(t.acc.value());
        }
    }
    return t.prefix[n - 1];
}

double StepSequence::bias_ratio(std::uint64_t n, double beta) const {
    return gamma_sum(n, (3.0 + beta) / 2.0) / std::sqrt(gamma_sum(n, 1.0));
}

}  // namespace ergodev
