#pragma once

#include <cstdint>
#include <vector>

#include "ergodev/model.hpp"
#include "ergodev/quadrature.hpp"
#include "ergodev/steps.hpp"

namespace ergodev {

// Discrete law standing in for U: all 2^r sign vectors for rademacher,
// a tensor Gauss-Hermite grid for gaussian.
struct InnovationRule {
    std::vector<Vec> points;
    std::vector<double> weights;
};

InnovationRule make_innovation_rule(const InnovationDistribution& innov, int gh_nodes = 8);

// Lambda_{k-1}(t,u,x) = E[ D^3 phi(x + g b(x) + u t sqrt(g) sigma(x) U)[sigma U]^3 ]
double lambda_term(const DiffusionModel& model, const TestFunction& phi, const Vec& x,
                   double gamma_k, double t, double u, const InnovationRule& rule);
double lambda_term(const DiffusionModel& model, const TestFunction& phi, const Vec& x,
                   double gamma_k, double t, double u, const InnovationDistribution& innov,
                   int gh_nodes = 8);

struct BiasOptions {
    int M = 10;            // midpoint nodes for the t and u integrals
    int gh_nodes = 8;      // Gauss-Hermite nodes per axis
    bool with_E = true;    // third-derivative term E_n
    bool with_D2 = true;   // drift-quadratic and increment terms (beta = 1 only)
    double beta = 1.0;
};

// Running sums for the bias corrector of the optimal-rate regime.
class BiasAccumulator {
public:
    BiasAccumulator(const DiffusionModel& model, const TestFunction& phi,
                    const InnovationDistribution& innov, BiasOptions opt = {});

    // Called once per step with the pre-step point X_{k-1} and gamma_k.
    void observe(const Vec& x, const Vec& b, const Mat& sigma, const Mat& Sigma, double gamma_k);

    double E(double Gamma_n) const;
    double drift_term(double Gamma_n) const;      // D^2 phi drift-quadratic term
    double increment_term(double Gamma_n) const;  // D^2 phi increment term
    // B_{n,beta} - E_n: zero unless beta = 1
    double corrector(double Gamma_n) const;
    // B_{n,beta}
    double full(double Gamma_n) const;

    const BiasOptions& options() const { return opt_; }

private:
    const DiffusionModel& model_;
    const TestFunction& phi_;
    BiasOptions opt_;
    InnovationRule rule_;
    QuadratureRule mid_;
    KahanSum sE_, sB_, sS_;
};

// a_n = [phi^(3)]_beta |sigma|^{3+beta} E|U|^{3+beta} / ((1+beta)(2+beta)(3+beta))
//       * Gamma_n^{((3+beta)/2)} / sqrt(Gamma_n)
double bias_radius_a_n(double third_holder, double sigma_sup, const InnovationDistribution& innov,
                       const StepSequence& steps, std::uint64_t n, double beta);

}  // namespace ergodev
