#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Eigenvalues>
#include <random>

#include "ergodev/errors.hpp"
#include "ergodev/registry.hpp"
#include "oracles.hpp"

using namespace ergodev;

namespace {

std::vector<Vec> random_points(int d, int count, std::uint64_t seed) {
    std::mt19937_64 g(seed);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    std::vector<Vec> pts;
    for (int i = 0; i < count; ++i) {
        Vec x(d);
        for (int k = 0; k < d; ++k) x(k) = u(g);
        pts.push_back(x);
    }
    return pts;
}

// Runs the finite-difference comparison for every derivative the bundle exposes.
void check_derivatives(const ModelBundle& b, double tol = 1e-6) {
    const DiffusionModel& m = *b.model;
    const TestFunction& phi = *b.phi;
    const int d = m.dim();
    for (const Vec& x : random_points(d, 100, 17)) {
        Mat J = oracle::fd_jacobian([&](const Vec& y) { return m.drift(y); }, x);
        CHECK((J - m.drift_jacobian(x)).cwiseAbs().maxCoeff() < tol);
        for (int j = 0; j < m.noise_dim(); ++j) {
            Mat Js = oracle::fd_jacobian([&](const Vec& y) { return Vec(m.sigma(y).col(j)); }, x);
            CHECK((Js - m.sigma_column_jacobian(x, j)).cwiseAbs().maxCoeff() < tol);
        }
        Vec g = oracle::fd_gradient([&](const Vec& y) { return phi.value(y); }, x);
        CHECK((g - phi.gradient(x)).cwiseAbs().maxCoeff() < tol);
        if (phi.order() >= 3) {
            Mat H = oracle::fd_jacobian([&](const Vec& y) { return phi.gradient(y); }, x);
            CHECK((H - phi.hessian(x)).cwiseAbs().maxCoeff() < tol);
            Tensor3 T = phi.third(x);
            for (int k = 0; k < d; ++k) {
                Mat Hk = oracle::fd_jacobian([&](const Vec& y) { return Vec(phi.hessian(y).col(k)); }, x);
                for (int i = 0; i < d; ++i)
                    for (int jj = 0; jj < d; ++jj) CHECK(std::abs(Hk(i, jj) - T(i, k, jj)) < tol);
            }
        }
    }
}

}  // namespace

TEST_CASE("derivative suite over the registry") {
    for (const auto& name : registry_names()) {
        CAPTURE(name);
        check_derivatives(registry_get(name));
    }
    check_derivatives(registry_get("hypo1d-drifted", {{"caption", 1}}));
    check_derivatives(registry_get("hypo1d-drifted", {{"eps", 0.3}}));
    check_derivatives(registry_get("asclt-ou", {{"dim", 3}}));
    check_derivatives(registry_get("confluent2d", {{"beta", 1.0}}));
}

TEST_CASE("registry errors") {
    CHECK_THROWS_AS(registry_get("nope"), ConfigError);
    CHECK_THROWS_AS(registry_get("ou1d", {{"eps", 1}}), ConfigError);
    CHECK_THROWS_AS(registry_get("confluent2d", {{"beta", 0}}), ConfigError);
    CHECK_THROWS_AS(registry_get("asclt-ou", {{"dim", 1.5}}), ConfigError);
    try {
        registry_get("nope");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("confluent2d") != std::string::npos);
    }
}

TEST_CASE("hypo1d-drifted seminorms against a grid") {
    ModelBundle b = registry_get("hypo1d-drifted", {{"eps", 0.01}});
    CHECK(b.phi->grad_sup() == doctest::Approx(1.01));
    CHECK(b.model->sigma_sup() == doctest::Approx(1.0));
    double gmax = 0.0, smax = 0.0;
    for (int i = 0; i <= 200000; ++i) {
        Vec x = vec1(-10.0 + 20.0 * i / 200000.0);
        gmax = std::max(gmax, std::abs(b.phi->gradient(x)(0)));
        smax = std::max(smax, b.model->sigma(x).norm());
    }
    CHECK(gmax <= b.phi->grad_sup() + 1e-12);
    CHECK(gmax == doctest::Approx(1.01).epsilon(1e-6));
    CHECK(smax <= 1.0 + 1e-12);
    CHECK(smax == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("hypo1d-cos third derivative Lipschitz ratio") {
    ModelBundle b = registry_get("hypo1d-cos");
    CHECK(b.phi->third_holder(1.0) == doctest::Approx(1.0));
    double best = 0.0;
    for (int i = 0; i < 2000; ++i) {
        const double x = -10.0 + 20.0 * i / 2000.0;
        for (double h : {1e-4, 1e-2, 0.3, 1.0, 2.0}) {
            const double r = std::abs(b.phi->third(vec1(x + h))(0, 0, 0) - b.phi->third(vec1(x))(0, 0, 0)) / h;
            best = std::max(best, r);
        }
    }
    CHECK(best <= 1.0 + 1e-12);
    CHECK(best > 0.999);
}

TEST_CASE("holder seminorm of sin dominates sampled ratios") {
    for (double beta : {0.25, 0.5, 0.75}) {
        const double c = sin_holder(beta);
        double best = 0.0;
        for (int i = 1; i < 4000; ++i) {
            const double h = 1e-3 + 2 * M_PI * i / 4000.0;
            best = std::max(best, 2.0 * std::abs(std::sin(h / 2.0)) / std::pow(h, beta));
        }
        CHECK(best <= c + 1e-9);
        CHECK(best > c * 0.999);
    }
}

TEST_CASE("confluent2d symmetric drift eigenvalues") {
    ModelBundle b = registry_get("confluent2d");
    Mat J = b.model->drift_jacobian(vec2(0.3, -1.0));
    Eigen::Matrix2d S = (0.5 * (J + J.transpose())).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(S);
    CHECK(es.eigenvalues()(0) == doctest::Approx(-(std::sqrt(2.0) + 9.0) / 2.0).epsilon(1e-12));
    CHECK(es.eigenvalues()(1) == doctest::Approx((std::sqrt(2.0) - 9.0) / 2.0).epsilon(1e-12));
}

TEST_CASE("confluent2d Cholesky and ellipticity") {
    ModelBundle b = registry_get("confluent2d");
    for (const Vec& x : random_points(2, 500, 3)) {
        Mat s = b.model->sigma(x);
        CHECK(s(0, 1) == 0.0);
        CHECK(((s * s.transpose()) - b.model->Sigma(x)).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(s.norm() <= b.model->sigma_sup() + 1e-12);
    }
    double lo = 1e300;
    for (int i = 0; i < 100; ++i)
        for (int j = 0; j < 100; ++j) {
            Vec x = vec2(-10.0 + 20.0 * i / 99.0, -10.0 + 20.0 * j / 99.0);
            Eigen::Matrix2d S = b.model->Sigma(x);
            lo = std::min(lo, Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(S).eigenvalues()(0));
        }
    CHECK(lo >= 0.2);
}

TEST_CASE("confluent2d source Lipschitz constant") {
    ModelBundle b = registry_get("confluent2d");
    CHECK(b.phi->lip1() == 1.0);
    double best = 0.0;
    for (int i = 0; i <= 20000; ++i) best = std::max(best, b.phi->gradient(vec2(i * 1e-3, 0.0)).norm());
    CHECK(best <= 1.0);
    CHECK(std::isinf(registry_get("confluent2d", {{"caption", 1}}).phi->grad_sup()));
}

TEST_CASE("generator against finite differences") {
    ModelBundle b = registry_get("hypo1d-cos");
    for (double x : {-2.0, -0.3, 0.0, 0.7, 3.1}) {
        const Vec v = vec1(x);
        const double expect = 0.5 * x * std::sin(x) - 0.5 * std::pow(std::cos(x), 3);
        CHECK(generator_apply(*b.model, *b.phi, v) == doctest::Approx(expect).epsilon(1e-12));
        const double h = 1e-4;
        auto f = [](double y) { return std::cos(y); };
        const double d1 = (f(x + h) - f(x - h)) / (2 * h);
        const double d2 = (f(x + h) - 2 * f(x) + f(x - h)) / (h * h);
        const double fd = -0.5 * x * d1 + 0.5 * std::cos(x) * std::cos(x) * d2;
        CHECK(std::abs(generator_apply(*b.model, *b.phi, v) - fd) < 1e-6);
    }
    auto ou = registry_get("ou1d");
    auto sq = make_function_test({1, 3, [](const Vec& x) { return x(0) * x(0); },
                                  [](const Vec& x) { return vec1(2 * x(0)); },
                                  [](const Vec&) { return Mat::Constant(1, 1, 2.0); },
                                  [](const Vec&) { return Tensor3(1); }, 0.0, 0.0, 0.0, nullptr});
    CHECK(generator_apply(*ou.model, *sq, vec1(0.0)) == doctest::Approx(1.0));
    CHECK(generator_apply(*ou.model, *sq, vec1(1.5)) == doctest::Approx(1.0 - 1.5 * 1.5));
    auto cst = make_function_test({1, 3, [](const Vec&) { return 4.0; }, [](const Vec&) { return vec1(0.0); },
                                   [](const Vec&) { return Mat::Zero(1, 1); }, [](const Vec&) { return Tensor3(1); },
                                   0.0, 0.0, 0.0, nullptr});
    CHECK(generator_apply(*b.model, *cst, vec1(0.4)) == 0.0);
}

TEST_CASE("innovation absolute moments") {
    CHECK(InnovationDistribution{InnovationKind::rademacher, 1}.abs_moment(4) == doctest::Approx(1.0));
    CHECK(InnovationDistribution{InnovationKind::rademacher, 3}.abs_moment(4) == doctest::Approx(9.0));
    CHECK(InnovationDistribution{InnovationKind::gaussian, 1}.abs_moment(2) == doctest::Approx(1.0));
    CHECK(InnovationDistribution{InnovationKind::gaussian, 2}.abs_moment(4) == doctest::Approx(8.0));
    CHECK(InnovationDistribution{InnovationKind::gaussian, 1}.abs_moment(4) == doctest::Approx(3.0));

    // Monte Carlo oracle, 1e7 draws
    InnovationDistribution g{InnovationKind::gaussian, 2};
    std::mt19937_64 eng(11);
    std::normal_distribution<double> nd;
    double s = 0.0;
    const int N = 10000000;
    for (int i = 0; i < N; ++i) {
        const double a = nd(eng), c = nd(eng);
        const double r2 = a * a + c * c;
        s += r2 * r2;
    }
    CHECK(s / N == doctest::Approx(g.abs_moment(4)).epsilon(0.01));
}

TEST_CASE("innovation sample moments") {
    for (auto kind : {InnovationKind::gaussian, InnovationKind::rademacher}) {
        InnovationDistribution dist{kind, 2};
        Rng rng(5, 0);
        const int N = 1000000;
        // running sums of first, second and third order products
        std::vector<double> s1(2), s1q(2), s2(4), s2q(4), s3(8), s3q(8);
        Vec u;
        for (int n = 0; n < N; ++n) {
            dist.sample(rng, u);
            for (int i = 0; i < 2; ++i) {
                s1[i] += u(i);
                s1q[i] += u(i) * u(i);
                for (int j = 0; j < 2; ++j) {
                    const double v = u(i) * u(j) - (i == j);
                    s2[2 * i + j] += v;
                    s2q[2 * i + j] += v * v;
                    for (int k = 0; k < 2; ++k) {
                        const double w = u(i) * u(j) * u(k);
                        s3[4 * i + 2 * j + k] += w;
                        s3q[4 * i + 2 * j + k] += w * w;
                    }
                }
            }
        }
        auto within = [&](double sum, double sumsq) {
            const double m = sum / N;
            const double var = std::max(sumsq / N - m * m, 1e-300);
            return std::abs(m) <= 5.0 * std::sqrt(var / N) + 1e-15;
        };
        for (int i = 0; i < 2; ++i) CHECK(within(s1[i], s1q[i]));
        for (int i = 0; i < 4; ++i) CHECK(within(s2[i], s2q[i]));
        for (int i = 0; i < 8; ++i) CHECK(within(s3[i], s3q[i]));
    }
}

TEST_CASE("innovation names") {
    CHECK(parse_innovation("gaussian") == InnovationKind::gaussian);
    CHECK(parse_innovation("rademacher") == InnovationKind::rademacher);
    CHECK(parse_innovation("bernoulli") == InnovationKind::rademacher);
    CHECK_THROWS_AS(parse_innovation("cauchy"), ConfigError);
    CHECK(to_string(InnovationKind::rademacher) == "rademacher");
}
