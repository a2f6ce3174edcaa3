#include "ergodev/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ergodev/errors.hpp"

namespace ergodev {

namespace {

constexpr double kLog2 = 0.69314718055994530942;

double positive_part(double v) { return v > 0.0 ? v : 0.0; }

}  // namespace

double lambda_n(double a, double q, const BoundParams& p, double Gamma_n) {
    const double den = q * p.sigma_sup * p.sigma_sup * p.grad_sup * p.grad_sup;
    if (!(den > 0.0)) throw ConfigError("lambda_n: zero variance proxy");
    return a * std::sqrt(Gamma_n) / den;
}

double gaussian_log_bound(double a, const BoundParams& p, bool bias_centered) {
    const double r = bias_centered ? a : positive_part(a - p.a_n);
    const double v = p.sigma_sup * p.sigma_sup * p.grad_sup * p.grad_sup;
    return kLog2 - r * r / (2.0 * v);
}

double cardan_root(double p, double q) {
    const double disc = q * q / 4.0 + p * p * p / 27.0;  // Delta / 108
    if (disc < 0.0) throw std::domain_error("cubic has three real roots");
    // take the cube root whose argument does not cancel, then use u v = -p/3
    const double D = std::sqrt(disc);
    const double w = q >= 0.0 ? -q / 2.0 - D : -q / 2.0 + D;
    const double u = std::cbrt(w);
    if (u == 0.0) return 0.0;
    const double v = -p / (3.0 * u);
    if (p <= 0.0) return u + v;
    // u + v cancels when p dominates; (u^3 + v^3) / (u^2 - uv + v^2) does not
    return -q / (u * u + p / 3.0 + v * v);
}

double cardan_lambda_min(double a, double G, double A, double B) {
    if (!(A > 0.0 && B > 0.0)) throw std::domain_error("cardan_lambda_min needs A, B > 0");
    return cardan_root(A * G * G / (2.0 * B), -a * std::pow(G, 2.5) / (4.0 * B));
}

double p_polynomial(double l, double a, double G, double A, double B) {
    const double sG = std::sqrt(G);
    return -a * l / sG + l * l * A / G + l * l * l * l * B / (G * G * G);
}

double phi_n_rho(double a, double G, double At, double Bt, double rho) {
    if (!(rho > 1.0)) throw std::domain_error("rho must exceed 1");
    const double x = a / (std::sqrt(G) * Bt);
    const double k = 2.0 * At / (3.0 * Bt);
    const double s = std::sqrt((rho - 1.0) * k * k * k + x * x);
    const double first = std::cbrt(x + s);
    // cbrt(x - s) = -(rho-1)^{1/3} k / cbrt(x + s), free of cancellation
    const double second = -std::cbrt(rho - 1.0) * k / first;
    return first + second;
}

double p_lambda_min(double a, double G, double At, double Bt, double rho) {
    const double phi = phi_n_rho(a, G, At, Bt, rho);
    const double sG = std::sqrt(G);
    const double c = std::cbrt(rho - 1.0);
    return -(sG / 4.0) * (c / rho) * phi * (1.5 * a - (sG / 2.0) * c * At * phi);
}

RhoOptimum optimize_rho(double a, double G, double At, double Bt, double tol) {
    auto f = [&](double s) { return p_lambda_min(a, G, At, Bt, 1.0 + std::exp(s)); };
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = -20.0, hi = 20.0;
    double c = hi - invphi * (hi - lo), d = lo + invphi * (hi - lo);
    double fc = f(c), fd = f(d);
    while (hi - lo > tol) {
        if (fc <= fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - invphi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + invphi * (hi - lo);
            fd = f(d);
        }
    }
    const double s = 0.5 * (lo + hi);
    return {1.0 + std::exp(s), f(s)};
}

double coboundary_A_tilde(const BoundParams& p) { return p.phi_lip * p.phi_lip * p.nu_sigma2 / 2.0; }

double coboundary_B_tilde(const BoundParams& p) {
    const double f2 = p.phi_lip * p.phi_lip;
    return f2 * f2 * p.sigma_sup * p.sigma_sup * p.theta_lip * p.theta_lip / 8.0;
}

CoboundaryBranches coboundary_branches(double a, double G, const BoundParams& p, CoboundaryForm form) {
    CoboundaryBranches br;
    if (a <= 0.0) {
        br.log_bound = kLog2;
        return br;
    }
    const double At = coboundary_A_tilde(p);
    const double Bt = coboundary_B_tilde(p);
    const double ratio = std::cbrt(G / (a * a));
    if (form == CoboundaryForm::proof) {
        br.quadratic = -a * a / (4.0 * At) *
                       (1.0 - 2.0 / (1.0 + std::sqrt(1.0 + 4.0 * At * At * At * G / (Bt * a * a))));
        const double q = -std::pow(a, 4.0 / 3.0) / 4.0 * std::cbrt(G / Bt) *
                         (1.0 - (2.0 / 3.0) * At / std::cbrt(Bt) * ratio);
        br.quartic = std::min(q, 0.0);
    } else {
        const double cbar = At / std::cbrt(Bt);
        const double den = 2.0 * p.nu_sigma2 * p.grad_sup * p.grad_sup;
        const double phi1 = a * a * (1.0 - 2.0 / (1.0 + std::sqrt(1.0 + 4.0 * cbar * cbar * cbar * G / (a * a))));
        const double phi2 = std::pow(a, 4.0 / 3.0) * std::pow(G, cbar / 3.0) *
                            positive_part(1.0 - (2.0 / 3.0) * cbar * ratio);
        br.quadratic = -phi1 / den;
        br.quartic = -phi2 / den;
    }
    br.log_bound = kLog2 + std::min(br.quadratic, br.quartic);
    return br;
}

double coboundary_log_bound(double a, double G, const BoundParams& p, CoboundaryForm form) {
    return coboundary_branches(a, G, p, form).log_bound;
}

double quadratic_rho_star(double a, double G, double At, double Bt) {
    const double alpha = Bt * a * a / (4.0 * At * At * At * G);
    const double xi = 1.0 / (1.0 + std::sqrt(1.0 + 1.0 / alpha));
    return 1.0 + alpha / xi;
}

ConfidenceInterval confidence_interval(double nu_n_f, double a, const BoundParams& p, double G,
                                       IntervalMode mode, double nu_n_sigma2) {
    if (!(p.alpha > 0.0)) throw ConfigError("confidence interval needs alpha > 0");
    double scale = p.sigma_sup;
    if (mode == IntervalMode::slutsky) {
        if (!(nu_n_sigma2 > 0.0)) throw std::domain_error("slutsky interval needs nu_n(|sigma|^2) > 0");
        scale = std::sqrt(nu_n_sigma2);
    }
    ConfidenceInterval ci;
    ci.half_width = a * scale * p.f_lip / (p.alpha * std::sqrt(G));
    ci.lower = nu_n_f - ci.half_width;
    ci.upper = nu_n_f + ci.half_width;
    ci.coverage = positive_part(1.0 - 2.0 * std::exp(-a * a / 2.0));
    return ci;
}

double coverage_to_a(double coverage) {
    if (!(coverage > 0.0 && coverage < 1.0)) throw ConfigError("coverage must lie in (0,1)");
    return std::sqrt(2.0 * std::log(2.0 / (1.0 - coverage)));
}

std::vector<CurveRow> comparison_curves(const std::vector<double>& grid, const BoundParams& p,
                                        double G, bool with_carre) {
    const double At = coboundary_A_tilde(p);
    const double Bt = coboundary_B_tilde(p);
    const double g2 = p.grad_sup * p.grad_sup;
    std::vector<CurveRow> rows;
    rows.reserve(grid.size());
    for (double a : grid) {
        CurveRow r;
        r.a = a;
        const double e = positive_part(a - p.a_n);
        r.S_n = -e * e / (2.0 * p.sigma_sup * p.sigma_sup * g2);
        r.S_nc = -e * e / (2.0 * p.nu_sigma2 * g2);
        r.S_nA = -e * e / (2.0 * p.nu_carre);
        r.P_lambda_min = e > 0.0 ? optimize_rho(e, G, At, Bt).value : 0.0;
        if (with_carre) r.P_lambda_min_carre = e > 0.0 ? optimize_rho(e, G, p.nu_carre / 2.0, Bt).value : 0.0;
        rows.push_back(r);
    }
    return rows;
}

}  // namespace ergodev
