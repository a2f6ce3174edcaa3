#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ergodev/bias.hpp"
#include "ergodev/errors.hpp"
#include "ergodev/registry.hpp"
#include "ergodev/scheme.hpp"
#include "oracles.hpp"

using namespace ergodev;

namespace {

std::shared_ptr<TestFunction> quadratic1d(double c) {
    return make_function_test({1, 3, [c](const Vec& x) { return c * x(0) * x(0); },
                               [c](const Vec& x) { return vec1(2 * c * x(0)); },
                               [c](const Vec&) { return Mat::Constant(1, 1, 2 * c); },
                               [](const Vec&) { return Tensor3(1); }, 0.0, 0.0, 0.0,
                               [](double) { return 0.0; }});
}

TrajectoryResult run_bias(const ModelBundle& b, const TestFunction& phi, double theta, std::uint64_t n, int M,
                          std::uint64_t stream = 0, std::uint64_t seed = 1) {
    StepSequence steps(theta, b.gamma0);
    TrajectoryOptions opt;
    opt.n = n;
    opt.seed = seed;
    opt.stream = stream;
    opt.x0 = b.x0;
    BiasOptions bo;
    bo.M = M;
    opt.bias = bo;
    return run_trajectory(*b.model, phi, steps, b.innov, opt);
}

}  // namespace

TEST_CASE("lambda term vanishes without third derivative or noise") {
    auto ou = registry_get("ou1d");
    CHECK(lambda_term(*ou.model, *ou.phi, vec1(0.3), 0.5, 0.5, 0.5, ou.innov) == 0.0);
    auto cosb = registry_get("hypo1d-cos");
    auto still = make_linear_model(Mat::Constant(1, 1, -0.5), Mat::Constant(1, 1, 0.0));
    CHECK(lambda_term(*still, *cosb.phi, vec1(0.3), 0.5, 0.5, 0.5, cosb.innov) == 0.0);
}

TEST_CASE("lambda term by hand enumeration") {
    auto b = registry_get("hypo1d-cos");
    // phi''' = sin, b(0) = 0, sigma(0) = 1
    const double v = lambda_term(*b.model, *b.phi, vec1(0.0), 1.0, 0.5, 0.5, b.innov);
    const double hand = 0.5 * (std::sin(0.25) * 1.0 + std::sin(-0.25) * -1.0);
    CHECK(std::abs(v - hand) < 1e-14);

    const double x = 0.7, g = 0.3, t = 0.2, u = 0.9;
    const double base = x + g * (-x / 2.0), s = std::cos(x);
    double h2 = 0.0;
    for (double U : {-1.0, 1.0}) h2 += 0.5 * std::sin(base + u * t * std::sqrt(g) * s * U) * std::pow(s * U, 3);
    CHECK(std::abs(lambda_term(*b.model, *b.phi, vec1(x), g, t, u, b.innov) - h2) < 1e-14);
}

TEST_CASE("gaussian lambda term against a dense Hermite rule") {
    auto b = registry_get("hypo1d-cos");
    InnovationDistribution g{InnovationKind::gaussian, 1};
    const double a = lambda_term(*b.model, *b.phi, vec1(0.4), 0.2, 0.6, 0.3, g, 8);
    // closed form: E[sin(c + kU)(sU)^3] = s^3 e^{-k^2/2} (3k - k^3) cos(c)
    const double x = 0.4, gg = 0.2, s = std::cos(x), c = x - gg * x / 2.0, k = 0.6 * 0.3 * std::sqrt(gg) * s;
    const double exact = std::pow(s, 3) * std::exp(-k * k / 2.0) * (3 * k - k * k * k) * std::cos(c);
    CHECK(std::abs(a - exact) < 1e-12);
}

TEST_CASE("rademacher enumeration cap") {
    auto b = registry_get("hypo1d-cos");
    CHECK_THROWS_AS(make_innovation_rule({InnovationKind::rademacher, 21}), ConfigError);
    CHECK(make_innovation_rule({InnovationKind::rademacher, 3}).points.size() == 8);
    CHECK_THROWS_AS(BiasAccumulator(*registry_get("confluent2d").model, *registry_get("confluent2d").phi,
                                    b.innov),
                    ConfigError);
}

TEST_CASE("quadratic phi keeps only the drift term") {
    auto b = registry_get("hypo1d-cos");
    auto q = quadratic1d(1.5);
    auto r = run_bias(b, *q, 0.5, 500, 10);
    CHECK(r.E == 0.0);
    CHECK(r.increment_term == 0.0);
    CHECK(r.drift_term > 0.0);
}

TEST_CASE("zero noise leaves the drift term alone") {
    auto b = registry_get("hypo1d-cos");
    auto still = make_linear_model(Mat::Constant(1, 1, -0.5), Mat::Constant(1, 1, 0.0));
    StepSequence steps(0.5);
    TrajectoryOptions opt;
    opt.n = 300;
    opt.x0 = {vec1(1.0), false};
    opt.bias = BiasOptions{};
    auto r = run_trajectory(*still, *b.phi, steps, b.innov, opt);
    CHECK(r.E == 0.0);
    CHECK(r.increment_term == 0.0);
    // drift term by direct recursion: X_k = X_{k-1}(1 - g/2), midpoint rule in t
    double x = 1.0, sum = 0.0, G = 0.0;
    for (std::uint64_t k = 1; k <= 300; ++k) {
        const double g = steps.gamma(k), bb = -x / 2.0;
        double acc = 0.0;
        for (int i = 0; i < 10; ++i) {
            const double t = (2 * i + 1) / 20.0;
            acc += (1 - t) * bb * bb * -std::cos(x + t * g * bb);
        }
        sum += g * g * acc / 10.0;
        G += g;
        x += g * bb;
    }
    CHECK(r.drift_term == doctest::Approx(sum / std::sqrt(G)).epsilon(1e-12));
}

TEST_CASE("E_n is dominated by a_n along hypo1d-cos paths") {
    auto b = registry_get("hypo1d-cos");
    StepSequence steps(1.0 / 3.0);
    const double an = bias_radius_a_n(b.phi->third_holder(1.0), 1.0, b.innov, steps, 1000, 1.0);
    CHECK(an == doctest::Approx(steps.gamma_sum(1000, 2.0) / (24.0 * std::sqrt(steps.gamma_sum(1000)))));
    for (std::uint64_t s = 0; s < 10; ++s) {
        auto r = run_bias(b, *b.phi, 1.0 / 3.0, 1000, 10, s);
        CHECK(std::abs(r.E) <= an);
        CHECK(r.max_E_ratio <= 1.0);
    }
}

TEST_CASE("a_n edge cases") {
    InnovationDistribution rad{InnovationKind::rademacher, 1};
    StepSequence s1(1.0);
    CHECK(bias_radius_a_n(0.0, 1.0, rad, s1, 100, 1.0) == 0.0);
    double prev = 1e300;
    for (std::uint64_t n = 1000; n <= 1000000; n *= 10) {
        const double v = bias_radius_a_n(1.0, 1.0, rad, s1, n, 1.0);
        CHECK(v < prev);
        prev = v;
    }
    CHECK(prev < 0.02);
}

TEST_CASE("coarse quantization agrees with a fine one") {
    auto b = registry_get("hypo1d-cos");
    auto r10 = run_bias(b, *b.phi, 1.0 / 3.0, 1000, 10);
    auto r1000 = run_bias(b, *b.phi, 1.0 / 3.0, 1000, 1000);
    CHECK(std::abs(r10.E - r1000.E) < 1e-3);
    CHECK(std::abs(r10.drift_term - r1000.drift_term) < 1e-3);
}

TEST_CASE("quantization error decays with M") {
    // error of E_n against M = 640 on one fixed path; the midpoint product rule is
    // second order for this smooth integrand, so the slope sits near -2
    auto b = registry_get("hypo1d-cos");
    const double ref = run_bias(b, *b.phi, 1.0 / 3.0, 200, 640).E;
    std::vector<double> lx, ly;
    for (int M : {5, 10, 20, 40, 80}) {
        lx.push_back(std::log(M));
        ly.push_back(std::log(std::abs(run_bias(b, *b.phi, 1.0 / 3.0, 200, M).E - ref)));
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) mx += lx[i] / lx.size(), my += ly[i] / ly.size();
    double num = 0, den = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) num += (lx[i] - mx) * (ly[i] - my), den += (lx[i] - mx) * (lx[i] - mx);
    const double slope = num / den;
    MESSAGE("log-log slope " << slope);
    CHECK(slope < -0.8);
}
