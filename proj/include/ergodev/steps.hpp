#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

namespace ergodev {

// Neumaier compensated accumulator.
struct KahanSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double v) {
        double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

// gamma_k = gamma0 * k^-theta and cached partial sums of gamma_k^ell.
class StepSequence {
public:
    explicit StepSequence(double theta, double gamma0 = 1.0);

    double theta() const { return theta_; }
    double gamma0() const { return gamma0_; }

    double gamma(std::uint64_t k) const;

    // Sum_{k<=n} gamma_k^ell. Tables grow on demand and are shared by copies.
    double gamma_sum(std::uint64_t n, double ell = 1.0) const;

    // Gamma_n^{((3+beta)/2)} / sqrt(Gamma_n)
    double bias_ratio(std::uint64_t n, double beta) const;

private:
    struct Table {
        std::vector<double> prefix;  // prefix[n-1] = partial sum up to n
        KahanSum acc;
    };
    struct Cache {
        std::mutex mu;
        std::map<double, Table> tables;
    };

    double theta_;
    double gamma0_;
    std::shared_ptr<Cache> cache_;
};

}  // namespace ergodev
