#pragma once

#include <functional>
#include <vector>

#include "ergodev/model.hpp"
#include "ergodev/quadrature.hpp"

namespace ergodev {

struct ConfluenceGrid {
    double lo = -10.0;
    double hi = 10.0;
    int resolution = 200;   // points per axis
    int directions = 720;   // unit vectors sampled on the circle (d = 2)
};

struct ConfluenceEstimate {
    double alpha = 0.0;       // minus the largest sampled value of the form
    double p_exponent = 2.0;
    double max_value = 0.0;
    Vec worst_x;
    Vec worst_xi;
    bool violated = false;    // max_value >= 0
    ConfluenceGrid grid;
};

// Value of the confluence form at x for unit direction xi.
double confluence_form(const DiffusionModel& model, const Vec& x, const Vec& xi, double p);

// Sup of the confluence form over grid x sphere samples for one exponent p.
ConfluenceEstimate confluence_alpha(const DiffusionModel& model, double p_exponent,
                                    const ConfluenceGrid& grid = {}, unsigned threads = 1);

// Scans p in {1, 1.5, 2 - 1e-6} and keeps the largest alpha.
ConfluenceEstimate confluence_alpha_scan(const DiffusionModel& model, const ConfluenceGrid& grid = {},
                                         unsigned threads = 1);

// rho (kappa / sigma_lower)^{-1/2} for d >= 2, rho for d = 1
double bakry_emery_alpha(double rho, double kappa, double sigma_lower, int d);

// [f]_1 / alpha
double gradient_bound(double f_lip, double alpha);

// Normalised bump eta(u) = c exp(-1/(1-|u|^2)) on the unit ball of R^d, d <= 2.
class Mollifier {
public:
    Mollifier(int dim, double delta, int nodes = 32);

    int dim() const { return dim_; }
    double delta() const { return delta_; }
    double eta(const Vec& u) const;        // normalised kernel
    double eta_delta(const Vec& x) const;  // delta^-d eta(x / delta)
    double C_eta() const { return c_eta_; }  // int |u| eta(u) du
    // integral of eta_delta over its support by the product Gauss-Legendre rule
    double mass() const;

    double smooth(const std::function<double(const Vec&)>& f, const Vec& x) const;
    Vec smooth_gradient(const std::function<double(const Vec&)>& f, const Vec& x) const;

private:
    double raw(double r2) const;
    Vec grad_eta(const Vec& u) const;
    template <class Fn>
    void for_each_node(Fn&& fn) const;

    int dim_;
    double delta_;
    QuadratureRule gl_;
    double norm_ = 1.0;
    double c_eta_ = 0.0;
};

}  // namespace ergodev
