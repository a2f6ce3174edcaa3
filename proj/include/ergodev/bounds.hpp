#pragma once

#include <string>
#include <vector>

namespace ergodev {

struct BoundParams {
    double sigma_sup = 1.0;   // |sigma|_inf
    double grad_sup = 1.0;    // |grad phi|_inf
    double phi_lip = 1.0;     // [phi]_1
    double theta_lip = 1.0;   // [vartheta]_1
    double nu_sigma2 = 1.0;   // estimate of nu(|sigma|^2)
    double nu_carre = 1.0;    // estimate of nu(|sigma^T grad phi|^2)
    double alpha = 1.0;       // gradient-bound constant
    double f_lip = 1.0;       // [f]_1
    double a_n = 0.0;         // bias radius
};

// a sqrt(Gamma_n) / (q |sigma|^2 |grad phi|^2)
double lambda_n(double a, double q, const BoundParams& p, double Gamma_n);

// log 2 - max(a - a_n, 0)^2 / (2 |sigma|^2 |grad phi|^2)
double gaussian_log_bound(double a, const BoundParams& p, bool bias_centered = true);

// Real root of z^3 + p z + q = 0 when 4p^3 + 27q^2 > 0.
double cardan_root(double p, double q);

// Unique real root of l^3 + (A G^2 / (2B)) l - a G^{5/2} / (4B) = 0.
double cardan_lambda_min(double a, double Gamma_n, double A, double B);

// P(l) = -a l / sqrt(G) + l^2 A / G + l^4 B / G^3
double p_polynomial(double lambda, double a, double Gamma_n, double A, double B);

// Phi_n(a, rho): the two-cube-root expression of the closed form optimum.
double phi_n_rho(double a, double Gamma_n, double A_tilde, double B_tilde, double rho);

// P(lambda_min(rho)) in closed form.
double p_lambda_min(double a, double Gamma_n, double A_tilde, double B_tilde, double rho);

struct RhoOptimum {
    double rho = 0.0;
    double value = 0.0;
};

// Golden-section search over rho = 1 + e^s, s in [-20, 20].
RhoOptimum optimize_rho(double a, double Gamma_n, double A_tilde, double B_tilde, double tol = 1e-8);

// A~ = [phi]_1^2 nu(|sigma|^2) / 2
double coboundary_A_tilde(const BoundParams& p);
// B~ = [phi]_1^4 |sigma|^2 [vartheta]_1^2 / 8
double coboundary_B_tilde(const BoundParams& p);

enum class CoboundaryForm { proof, theorem };

struct CoboundaryBranches {
    double quadratic = 0.0;  // exponent of the quadratic regime (<= 0)
    double quartic = 0.0;    // exponent of the quartic regime (<= 0)
    double log_bound = 0.0;
};

// Log of the coboundary deviation bound with the two regimes exposed.
CoboundaryBranches coboundary_branches(double a, double Gamma_n, const BoundParams& p,
                                       CoboundaryForm form = CoboundaryForm::proof);
double coboundary_log_bound(double a, double Gamma_n, const BoundParams& p,
                            CoboundaryForm form = CoboundaryForm::proof);

// Quadratic-regime optimum rho* = 1 + alpha_n / xi*.
double quadratic_rho_star(double a, double Gamma_n, double A_tilde, double B_tilde);

enum class IntervalMode { plain, slutsky, lipschitz };

struct ConfidenceInterval {
    double lower = 0.0;
    double upper = 0.0;
    double half_width = 0.0;
    double coverage = 0.0;  // lower bound, clamped at 0
};

ConfidenceInterval confidence_interval(double nu_n_f, double a, const BoundParams& p,
                                       double Gamma_n, IntervalMode mode,
                                       double nu_n_sigma2 = 0.0);

// a with 2 exp(-a^2/2) = 1 - coverage
double coverage_to_a(double coverage);

struct CurveRow {
    double a = 0.0;
    double S_n = 0.0;
    double S_nc = 0.0;
    double S_nA = 0.0;
    double P_lambda_min = 0.0;
    double P_lambda_min_carre = 0.0;
};

// S_{n,theta}, S_{n,theta,c}, S_{n,theta,A} and the rho-optimised P(lambda_min),
// all evaluated at max(a - a_n, 0).
std::vector<CurveRow> comparison_curves(const std::vector<double>& a_grid, const BoundParams& p,
                                        double Gamma_n, bool with_carre = false);

}  // namespace ergodev
