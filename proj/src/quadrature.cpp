#include "ergodev/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace ergodev {

namespace {

// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix, weights come
// from the first eigenvector components.
QuadratureRule golub_welsch(int n, double mu0, double (*offdiag)(int)) {
    if (n < 1) throw std::invalid_argument("quadrature needs at least one node");
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) J(i, i - 1) = J(i - 1, i) = offdiag(i);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    QuadratureRule q;
    q.nodes.resize(n);
    q.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        q.nodes[i] = es.eigenvalues()(i);
        double v = es.eigenvectors()(0, i);
        q.weights[i] = mu0 * v * v;
    }
    return q;
}

}  // namespace

QuadratureRule gauss_hermite_normal(int n) {
    // He_k recurrence: x He_k = He_{k+1} + k He_{k-1}
    return golub_welsch(n, 1.0, [](int i) { return std::sqrt(static_cast<double>(i)); });
}

QuadratureRule gauss_legendre(int n) {
    QuadratureRule q = golub_welsch(n, 2.0, [](int i) {
        double k = i;
        return k / std::sqrt(4.0 * k * k - 1.0);
    });
    // eigenvector weights lose a few digits; renormalise against the exact mass
    double s = 0.0;
    for (double w : q.weights) s += w;
    for (double& w : q.weights) w *= 2.0 / s;
    return q;
}

QuadratureRule midpoint_uniform(int m) {
    if (m < 1) throw std::invalid_argument("midpoint rule needs M >= 1");
    QuadratureRule q;
    for (int i = 1; i <= m; ++i) {
        q.nodes.push_back((2.0 * i - 1.0) / (2.0 * m));
        q.weights.push_back(1.0 / m);
    }
    return q;
}

}  // namespace ergodev
