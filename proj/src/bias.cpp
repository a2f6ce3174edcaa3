#include "ergodev/bias.hpp"

#include <cmath>

#include "ergodev/errors.hpp"

namespace ergodev {

InnovationRule make_innovation_rule(const InnovationDistribution& innov, int gh_nodes) {
    InnovationRule rule;
    const int r = innov.r;
    if (innov.kind == InnovationKind::rademacher) {
        if (r > 20) throw ConfigError("rademacher enumeration limited to r <= 20");
        const std::uint64_t count = std::uint64_t{1} << r;
        const double w = 1.0 / static_cast<double>(count);
        for (std::uint64_t m = 0; m < count; ++m) {
            Vec u(r);
            for (int i = 0; i < r; ++i) u(i) = (m >> i) & 1u ? 1.0 : -1.0;
            rule.points.push_back(u);
            rule.weights.push_back(w);
        }
        return rule;
    }
    QuadratureRule gh = gauss_hermite_normal(gh_nodes);
    std::vector<int> idx(r, 0);
    while (true) {
        Vec u(r);
        double w = 1.0;
        for (int i = 0; i < r; ++i) {
            u(i) = gh.nodes[idx[i]];
            w *= gh.weights[idx[i]];
        }
        rule.points.push_back(u);
        rule.weights.push_back(w);
        int i = 0;
        while (i < r && ++idx[i] == gh_nodes) idx[i++] = 0;
        if (i == r) break;
    }
    return rule;
}

double lambda_term(const DiffusionModel& model, const TestFunction& phi, const Vec& x,
                   double gamma_k, double t, double u, const InnovationRule& rule) {
    const Vec base = x + gamma_k * model.drift(x);
    const Mat s = model.sigma(x);
    const double scale = u * t * std::sqrt(gamma_k);
    double acc = 0.0;
    for (std::size_t m = 0; m < rule.points.size(); ++m) {
        Vec v = s * rule.points[m];
        acc += rule.weights[m] * phi.third(base + scale * v).cubic(v);
    }
    return acc;
}

double lambda_term(const DiffusionModel& model, const TestFunction& phi, const Vec& x,
                   double gamma_k, double t, double u, const InnovationDistribution& innov,
                   int gh_nodes) {
    return lambda_term(model, phi, x, gamma_k, t, u, make_innovation_rule(innov, gh_nodes));
}

BiasAccumulator::BiasAccumulator(const DiffusionModel& model, const TestFunction& phi,
                                 const InnovationDistribution& innov, BiasOptions opt)
    : model_(model), phi_(phi), opt_(opt), mid_(midpoint_uniform(opt.M)) {
    if (opt_.with_E) rule_ = make_innovation_rule(innov, opt_.gh_nodes);
    if (phi.order() < 3) throw ConfigError("bias terms need third derivatives of phi");
}

void BiasAccumulator::observe(const Vec& x, const Vec& b, const Mat& sigma, const Mat& Sigma,
                              double gamma_k) {
    const QuadratureRule& q = mid_;
    const int M = opt_.M;
    if (opt_.with_E) {
        const Vec base = x + gamma_k * b;
        const double sg = std::sqrt(gamma_k);
        double acc = 0.0;
        for (std::size_t m = 0; m < rule_.points.size(); ++m) {
            const Vec v = sigma * rule_.points[m];
            double inner = 0.0;
            for (int i = 0; i < M; ++i) {
                const double t = q.nodes[i];
                double su = 0.0;
                for (int j = 0; j < M; ++j)
                    su += phi_.third(base + (q.nodes[j] * t * sg) * v).cubic(v);
                inner += (1.0 - t) * t * su;
            }
            acc += rule_.weights[m] * inner;
        }
        sE_.add(gamma_k * sg * acc / (static_cast<double>(M) * M));
    }
    if (opt_.with_D2 && opt_.beta == 1.0) {
        double acc = 0.0;
        for (int i = 0; i < M; ++i) {
            const double t = q.nodes[i];
            acc += (1.0 - t) * b.dot(phi_.hessian(x + (t * gamma_k) * b) * b);
        }
        sB_.add(gamma_k * gamma_k * acc / M);
        const Mat dH = phi_.hessian(x + gamma_k * b) - phi_.hessian(x);
        sS_.add(0.5 * gamma_k * dH.cwiseProduct(Sigma).sum());
    }
}

double BiasAccumulator::E(double G) const { return sE_.value() / std::sqrt(G); }
double BiasAccumulator::drift_term(double G) const { return sB_.value() / std::sqrt(G); }
double BiasAccumulator::increment_term(double G) const { return sS_.value() / std::sqrt(G); }
double BiasAccumulator::corrector(double G) const { return drift_term(G) + increment_term(G); }
double BiasAccumulator::full(double G) const { return E(G) + corrector(G); }

double bias_radius_a_n(double third_holder, double sigma_sup, const InnovationDistribution& innov,
                       const StepSequence& steps, std::uint64_t n, double beta) {
    if (third_holder == 0.0) return 0.0;
    const double p = 3.0 + beta;
    return third_holder * std::pow(sigma_sup, p) * innov.abs_moment(p) /
           ((1.0 + beta) * (2.0 + beta) * (3.0 + beta)) * steps.bias_ratio(n, beta);
}

}  // namespace ergodev
