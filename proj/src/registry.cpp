#include "ergodev/registry.hpp"

#include <cmath>
#include <limits>
#include <set>

#include "ergodev/errors.hpp"

namespace ergodev {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// b = -x/2 with sigma = cos x, or sigma = x + eps cos x for the caption variant.
class Hypo1d final : public DiffusionModel {
public:
    Hypo1d(bool linear_sigma, double eps) : linear_(linear_sigma), eps_(eps) {}
    int dim() const override { return 1; }
    Vec drift(const Vec& x) const override { return vec1(-0.5 * x(0)); }
    Mat drift_jacobian(const Vec&) const override { return Mat::Constant(1, 1, -0.5); }
    Mat sigma(const Vec& x) const override {
        double s = linear_ ? x(0) + eps_ * std::cos(x(0)) : std::cos(x(0));
        return Mat::Constant(1, 1, s);
    }
    Mat sigma_column_jacobian(const Vec& x, int) const override {
        double ds = linear_ ? 1.0 - eps_ * std::sin(x(0)) : -std::sin(x(0));
        return Mat::Constant(1, 1, ds);
    }
    double sigma_sup() const override { return linear_ ? kInf : 1.0; }

private:
    bool linear_;
    double eps_;
};

// phi(x) = x + eps cos x
class DriftedLinear final : public TestFunction {
public:
    explicit DriftedLinear(double eps) : eps_(eps) {}
    int dim() const override { return 1; }
    double value(const Vec& x) const override { return x(0) + eps_ * std::cos(x(0)); }
    Vec gradient(const Vec& x) const override { return vec1(1.0 - eps_ * std::sin(x(0))); }
    Mat hessian(const Vec& x) const override { return Mat::Constant(1, 1, -eps_ * std::cos(x(0))); }
    Tensor3 third(const Vec& x) const override {
        Tensor3 t(1);
        t(0, 0, 0) = eps_ * std::sin(x(0));
        return t;
    }
    double grad_sup() const override { return 1.0 + std::abs(eps_); }
    double hess_lip() const override { return std::abs(eps_); }
    double third_holder(double beta) const override { return std::abs(eps_) * sin_holder(beta); }

private:
    double eps_;
};

class Cosine final : public TestFunction {
public:
    int dim() const override { return 1; }
    double value(const Vec& x) const override { return std::cos(x(0)); }
    Vec gradient(const Vec& x) const override { return vec1(-std::sin(x(0))); }
    Mat hessian(const Vec& x) const override { return Mat::Constant(1, 1, -std::cos(x(0))); }
    Tensor3 third(const Vec& x) const override {
        Tensor3 t(1);
        t(0, 0, 0) = std::sin(x(0));
        return t;
    }
    double grad_sup() const override { return 1.0; }
    double hess_lip() const override { return 1.0; }
    double third_holder(double beta) const override { return sin_holder(beta); }
};

// phi(x) = x_1
class Coordinate final : public TestFunction {
public:
    explicit Coordinate(int d) : d_(d) {}
    int dim() const override { return d_; }
    double value(const Vec& x) const override { return x(0); }
    Vec gradient(const Vec&) const override {
        Vec g = Vec::Zero(d_);
        g(0) = 1.0;
        return g;
    }
    Mat hessian(const Vec&) const override { return Mat::Zero(d_, d_); }
    Tensor3 third(const Vec&) const override { return Tensor3(d_); }
    double grad_sup() const override { return 1.0; }
    double hess_lip() const override { return 0.0; }
    double third_holder(double) const override { return 0.0; }

private:
    int d_;
};

class Confluent2d final : public DiffusionModel {
public:
    int dim() const override { return 2; }
    Vec drift(const Vec& x) const override {
        return vec2(-4.0 * x(0) + 6.0 * x(1), -5.0 * x(0) - 5.0 * x(1));
    }
    Mat drift_jacobian(const Vec&) const override {
        Mat j(2, 2);
        j << -4.0, 6.0, -5.0, -5.0;
        return j;
    }
    Mat Sigma(const Vec& x) const override {
        Entries e = entries(x);
        Mat s(2, 2);
        s << e.s11, e.s12, e.s12, e.s22;
        return s;
    }
    Mat sigma(const Vec& x) const override {
        Entries e = entries(x);
        Mat s(2, 2);
        s << e.a, 0.0, e.c, e.e;
        return s;
    }
    Mat sigma_column_jacobian(const Vec& x, int j) const override {
        Entries e = entries(x);
        Mat m = Mat::Zero(2, 2);
        if (j == 0) {
            m.row(0) = e.da.transpose();
            m.row(1) = e.dc.transpose();
        } else {
            m.row(1) = e.de.transpose();
        }
        return m;
    }
    double sigma_sup() const override { return std::sqrt(3.0); }

private:
    struct Entries {
        double s11, s12, s22, a, c, e;
        Eigen::Vector2d da, dc, de;
    };
    static Entries entries(const Vec& x) {
        const double x1 = x(0), x2 = x(1);
        const double s1 = std::sin(x1), c1 = std::cos(x1);
        const double s2 = std::sin(x2), c2 = std::cos(x2);
        const double sp = std::sin(x1 + x2), cp = std::cos(x1 + x2);
        Entries r;
        r.s11 = cp / 2.0 + 1.0;
        r.s12 = s1 * s2 / 4.0;
        r.s22 = 1.0 - s2 / 2.0;
        r.a = std::sqrt(r.s11);
        r.c = r.s12 / r.a;
        r.e = std::sqrt(r.s22 - r.c * r.c);
        Eigen::Vector2d ds11(-sp / 2.0, -sp / 2.0);
        Eigen::Vector2d ds12(c1 * s2 / 4.0, s1 * c2 / 4.0);
        Eigen::Vector2d ds22(0.0, -c2 / 2.0);
        r.da = ds11 / (2.0 * r.a);
        r.dc = (ds12 - r.c * r.da) / r.a;
        r.de = (ds22 - 2.0 * r.c * r.dc) / (2.0 * r.e);
        return r;
    }
};

// f(x) = |x|^{1+beta}/(1+|x|^beta), or |x|^beta/(1+|x|^beta) for the caption variant.
class RadialSource final : public TestFunction {
public:
    RadialSource(double beta, bool caption) : beta_(beta), caption_(caption) {}
    int dim() const override { return 2; }
    int order() const override { return 1; }
    double value(const Vec& x) const override {
        double r = x.norm();
        double rb = std::pow(r, beta_);
        return (caption_ ? rb : r * rb) / (1.0 + rb);
    }
    Vec gradient(const Vec& x) const override {
        double r = x.norm();
        if (r == 0.0) {
            if (caption_) return Vec::Constant(2, std::numeric_limits<double>::quiet_NaN());
            return Vec::Zero(2);
        }
        double rb = std::pow(r, beta_);
        double den = (1.0 + rb) * (1.0 + rb);
        double g = caption_ ? beta_ * rb / r / den : ((1.0 + beta_) * rb + rb * rb) / den;
        return (g / r) * x;
    }
    // g'(r) <= 1 iff (beta-1) r^beta <= 1, true for beta <= 1; caption variant blows up at 0
    double grad_sup() const override { return caption_ ? kInf : 1.0; }

private:
    double beta_;
    bool caption_;
};

double take(std::map<std::string, double>& p, const std::string& key, double def) {
    auto it = p.find(key);
    if (it == p.end()) return def;
    double v = it->second;
    p.erase(it);
    return v;
}

}  // namespace

std::vector<std::string> registry_names() {
    return {"hypo1d-drifted", "hypo1d-cos", "ou1d", "confluent2d", "asclt-ou"};
}

ModelBundle registry_get(const std::string& name, const std::map<std::string, double>& params) {
    std::map<std::string, double> p = params;
    ModelBundle m;
    m.name = name;
    auto record = [&](const std::string& k, double v) { m.params.emplace_back(k, v); };

    if (name == "hypo1d-drifted" || name == "hypo1d-cos") {
        const bool drifted = name == "hypo1d-drifted";
        double eps = drifted ? take(p, "eps", 0.01) : 0.0;
        bool caption = drifted && take(p, "caption", 0.0) != 0.0;
        bool rsign = take(p, "x0_sign", 1.0) != 0.0;
        m.model = std::make_shared<Hypo1d>(caption, eps);
        if (drifted)
            m.phi = std::make_shared<DriftedLinear>(eps);
        else
            m.phi = std::make_shared<Cosine>();
        m.innov = {InnovationKind::rademacher, 1};
        m.x0 = {vec1(rsign ? 1.0 : 0.0), rsign};
        m.beta = 1.0;
        if (drifted) {
            record("eps", eps);
            record("caption", caption ? 1.0 : 0.0);
        }
        record("x0_sign", rsign ? 1.0 : 0.0);
    } else if (name == "ou1d") {
        m.model = make_linear_model(Mat::Constant(1, 1, -0.5), Mat::Constant(1, 1, 1.0));
        m.phi = std::make_shared<Coordinate>(1);
        m.innov = {InnovationKind::gaussian, 1};
        m.x0 = {vec1(0.0), false};
    } else if (name == "asclt-ou") {
        double dd = take(p, "dim", 1.0);
        int d = static_cast<int>(dd);
        if (d < 1 || d > kMaxDim || d != dd) throw ConfigError("asclt-ou: dim must be an integer in [1,4]");
        m.model = make_linear_model(-0.5 * Mat::Identity(d, d), Mat::Identity(d, d));
        m.phi = std::make_shared<Coordinate>(d);
        m.innov = {InnovationKind::gaussian, d};
        m.x0 = {Vec::Zero(d), false};
        record("dim", d);
    } else if (name == "confluent2d") {
        double beta = take(p, "beta", 0.5);
        if (!(beta > 0.0 && beta <= 1.0)) throw ConfigError("confluent2d: beta must lie in (0,1]");
        bool caption = take(p, "caption", 0.0) != 0.0;
        m.model = std::make_shared<Confluent2d>();
        m.phi = std::make_shared<RadialSource>(beta, caption);
        m.phi_is_source = true;
        m.innov = {InnovationKind::gaussian, 2};
        m.x0 = {Vec::Zero(2), false};
        m.beta = beta;
        // |1 + gamma mu| < 1 for the eigenvalues mu of Db needs gamma < 0.18
        m.gamma0 = 0.1;
        record("beta", beta);
        record("caption", caption ? 1.0 : 0.0);
    } else {
        std::string list;
        for (const auto& n : registry_names()) list += (list.empty() ? "" : ", ") + n;
        throw ConfigError("unknown model '" + name + "'; registry: " + list);
    }

    m.gamma0 = take(p, "gamma0", m.gamma0);
    if (!(m.gamma0 > 0.0)) throw ConfigError("gamma0 must be positive");
    record("gamma0", m.gamma0);
    m.theta_lip = take(p, "theta_lip", m.phi->lip1());
    record("theta_lip", m.theta_lip);
    if (!p.empty()) throw ConfigError("unknown parameter '" + p.begin()->first + "' for model " + name);
    return m;
}

}  // namespace ergodev
