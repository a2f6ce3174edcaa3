#pragma once

#include <functional>
#include <memory>
#include <string>

#include "ergodev/linalg.hpp"
#include "ergodev/rng.hpp"

namespace ergodev {

class DiffusionModel {
public:
    virtual ~DiffusionModel() = default;

    virtual int dim() const = 0;
    virtual int noise_dim() const { return dim(); }

    virtual Vec drift(const Vec& x) const = 0;
    virtual Mat drift_jacobian(const Vec& x) const = 0;
    virtual Mat sigma(const Vec& x) const = 0;  // d x r
    // (i, k) entry = d sigma_{ij} / d x_k
    virtual Mat sigma_column_jacobian(const Vec& x, int j) const = 0;
    virtual Mat Sigma(const Vec& x) const {
        Mat s = sigma(x);
        return s * s.transpose();
    }
    // sup_x of the Frobenius norm of sigma
    virtual double sigma_sup() const = 0;
};

class TestFunction {
public:
    virtual ~TestFunction() = default;

    virtual int dim() const = 0;
    // Highest derivative order implemented (1 or 3).
    virtual int order() const { return 3; }

    virtual double value(const Vec& x) const = 0;
    virtual Vec gradient(const Vec& x) const = 0;
    virtual Mat hessian(const Vec& x) const;
    virtual Tensor3 third(const Vec& x) const;

    virtual double grad_sup() const = 0;
    virtual double lip1() const { return grad_sup(); }
    virtual double hess_lip() const;
    virtual double third_holder(double beta) const;
};

enum class InnovationKind { gaussian, rademacher };

struct InnovationDistribution {
    InnovationKind kind = InnovationKind::gaussian;
    int r = 1;

    double abs_moment(double p) const;

    void sample(Rng& rng, Vec& u) const {
        u.resize(r);
        if (kind == InnovationKind::gaussian)
            for (int i = 0; i < r; ++i) u(i) = rng.normal();
        else
            for (int i = 0; i < r; ++i) u(i) = rng.sign();
    }
};

InnovationKind parse_innovation(const std::string& s);
std::string to_string(InnovationKind k);

// b(x).grad phi(x) + 1/2 Tr(Sigma(x) D^2 phi(x))
double generator_apply(const DiffusionModel& model, const TestFunction& phi, const Vec& x);

// |sigma^T grad phi|^2, the carre du champ density
double carre_du_champ(const DiffusionModel& model, const TestFunction& phi, const Vec& x);

// sup_{h>0} |sin(x+h) - sin(x)| / h^beta over all x
double sin_holder(double beta);

// Models and functions built from callables; used by tests and bindings.
struct FunctionModelSpec {
    int dim = 1;
    int noise_dim = 1;
    std::function<Vec(const Vec&)> drift;
    std::function<Mat(const Vec&)> drift_jacobian;
    std::function<Mat(const Vec&)> sigma;
    std::function<Mat(const Vec&, int)> sigma_column_jacobian;
    double sigma_sup = 0.0;
};
std::shared_ptr<DiffusionModel> make_function_model(FunctionModelSpec spec);

struct FunctionTestSpec {
    int dim = 1;
    int order = 3;
    std::function<double(const Vec&)> value;
    std::function<Vec(const Vec&)> gradient;
    std::function<Mat(const Vec&)> hessian;
    std::function<Tensor3(const Vec&)> third;
    double grad_sup = 0.0;
    double lip1 = 0.0;
    double hess_lip = 0.0;
    std::function<double(double)> third_holder;
};
std::shared_ptr<TestFunction> make_function_test(FunctionTestSpec spec);

// Linear drift b(x) = B x with constant sigma.
std::shared_ptr<DiffusionModel> make_linear_model(const Mat& B, const Mat& sigma);

}  // namespace ergodev
