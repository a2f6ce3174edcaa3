#pragma once

#include <Eigen/Core>
#include <array>

namespace ergodev {

// Registry models live in d <= 2; the cap keeps small vectors on the stack.
inline constexpr int kMaxDim = 4;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

// Third derivative tensor: slice[k](i, j) = d^3 phi / dx_i dx_j dx_k.
struct Tensor3 {
    int dim = 0;
    std::array<Mat, kMaxDim> slice;

    explicit Tensor3(int d = 0) : dim(d) {
        for (int k = 0; k < d; ++k) slice[k] = Mat::Zero(d, d);
    }
    double operator()(int i, int j, int k) const { return slice[k](i, j); }
    double& operator()(int i, int j, int k) { return slice[k](i, j); }

    // sum_{ijk} T_ijk v_i v_j v_k
    double cubic(const Vec& v) const {
        double s = 0.0;
        for (int k = 0; k < dim; ++k) s += v(k) * v.dot(slice[k] * v);
        return s;
    }
    // (T w)_{ij} = sum_k T_ijk w_k
    Mat contract(const Vec& w) const {
        Mat m = Mat::Zero(dim, dim);
        for (int k = 0; k < dim; ++k) m += w(k) * slice[k];
        return m;
    }
};

inline Vec vec1(double x) {
    Vec v(1);
    v(0) = x;
    return v;
}

inline Vec vec2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

}  // namespace ergodev
