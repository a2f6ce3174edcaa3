#include "ergodev/model.hpp"

#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ergodev/errors.hpp"

namespace ergodev {

Mat TestFunction::hessian(const Vec&) const {
    throw std::logic_error("test function has no second derivative");
}

Tensor3 TestFunction::third(const Vec&) const {
    throw std::logic_error("test function has no third derivative");
}

double TestFunction::hess_lip() const { return std::numeric_limits<double>::infinity(); }

double TestFunction::third_holder(double) const { return std::numeric_limits<double>::infinity(); }

double InnovationDistribution::abs_moment(double p) const {
    if (p < 0.0) throw std::domain_error("moment order must be nonnegative");
    if (kind == InnovationKind::rademacher) return std::pow(static_cast<double>(r), p / 2.0);
    return std::exp(p / 2.0 * std::log(2.0) + std::lgamma((r + p) / 2.0) - std::lgamma(r / 2.0));
}

InnovationKind parse_innovation(const std::string& s) {
    if (s == "gaussian") return InnovationKind::gaussian;
    if (s == "rademacher" || s == "bernoulli") return InnovationKind::rademacher;
    throw ConfigError("unknown innovation kind '" + s + "' (gaussian, rademacher)");
}

std::string to_string(InnovationKind k) {
    return k == InnovationKind::gaussian ? "gaussian" : "rademacher";
}

double generator_apply(const DiffusionModel& model, const TestFunction& phi, const Vec& x) {
    Vec b = model.drift(x);
    Vec g = phi.gradient(x);
    Mat S = model.Sigma(x);
    Mat H = phi.hessian(x);
    return b.dot(g) + 0.5 * (S.cwiseProduct(H)).sum();
}

double carre_du_champ(const DiffusionModel& model, const TestFunction& phi, const Vec& x) {
    return (model.sigma(x).transpose() * phi.gradient(x)).squaredNorm();
}

double sin_holder(double beta) {
    if (!(beta > 0.0 && beta <= 1.0)) throw std::domain_error("beta must lie in (0,1]");
    if (beta == 1.0) return 1.0;
    // |sin(x+h)-sin(x)| <= 2|sin(h/2)|, equality reachable; ratio peaks for h in (0, pi]
    auto neg = [beta](double h) { return -2.0 * std::sin(h / 2.0) / std::pow(h, beta); };
    auto r = boost::math::tools::brent_find_minima(neg, 1e-12, M_PI, 52);
    return -r.second;
}

namespace {

class FunctionModel final : public DiffusionModel {
public:
    explicit FunctionModel(FunctionModelSpec s) : s_(std::move(s)) {}
    int dim() const override { return s_.dim; }
    int noise_dim() const override { return s_.noise_dim; }
    Vec drift(const Vec& x) const override { return s_.drift(x); }
    Mat drift_jacobian(const Vec& x) const override { return s_.drift_jacobian(x); }
    Mat sigma(const Vec& x) const override { return s_.sigma(x); }
    Mat sigma_column_jacobian(const Vec& x, int j) const override {
        return s_.sigma_column_jacobian(x, j);
    }
    double sigma_sup() const override { return s_.sigma_sup; }

private:
    FunctionModelSpec s_;
};

class FunctionTest final : public TestFunction {
public:
    explicit FunctionTest(FunctionTestSpec s) : s_(std::move(s)) {}
    int dim() const override { return s_.dim; }
    int order() const override { return s_.order; }
    double value(const Vec& x) const override { return s_.value(x); }
    Vec gradient(const Vec& x) const override { return s_.gradient(x); }
    Mat hessian(const Vec& x) const override {
        if (!s_.hessian) return TestFunction::hessian(x);
        return s_.hessian(x);
    }
    Tensor3 third(const Vec& x) const override {
        if (!s_.third) return TestFunction::third(x);
        return s_.third(x);
    }
    double grad_sup() const override { return s_.grad_sup; }
    double lip1() const override { return s_.lip1 > 0.0 ? s_.lip1 : s_.grad_sup; }
    double hess_lip() const override { return s_.hess_lip; }
    double third_holder(double beta) const override {
        if (!s_.third_holder) return TestFunction::third_holder(beta);
        return s_.third_holder(beta);
    }

private:
    FunctionTestSpec s_;
};

class LinearModel final : public DiffusionModel {
public:
    LinearModel(const Mat& B, const Mat& sigma) : B_(B), sigma_(sigma) {}
    int dim() const override { return static_cast<int>(B_.rows()); }
    int noise_dim() const override { return static_cast<int>(sigma_.cols()); }
    Vec drift(const Vec& x) const override { return B_ * x; }
    Mat drift_jacobian(const Vec&) const override { return B_; }
    Mat sigma(const Vec&) const override { return sigma_; }
    Mat sigma_column_jacobian(const Vec&, int) const override { return Mat::Zero(dim(), dim()); }
    double sigma_sup() const override { return sigma_.norm(); }

private:
    Mat B_;
    Mat sigma_;
};

}  // namespace

std::shared_ptr<DiffusionModel> make_function_model(FunctionModelSpec spec) {
    return std::make_shared<FunctionModel>(std::move(spec));
}

std::shared_ptr<TestFunction> make_function_test(FunctionTestSpec spec) {
    return std::make_shared<FunctionTest>(std::move(spec));
}

std::shared_ptr<DiffusionModel> make_linear_model(const Mat& B, const Mat& sigma) {
    return std::make_shared<LinearModel>(B, sigma);
}

}  // namespace ergodev
