#include "ergodev/poisson.hpp"

#include <cmath>
#include <stdexcept>

#include "ergodev/errors.hpp"
#include "ergodev/parallel.hpp"

namespace ergodev {

double confluence_form(const DiffusionModel& model, const Vec& x, const Vec& xi, double p) {
    const Mat J = model.drift_jacobian(x);
    double v = xi.dot(J * xi);  // <(Db + Db^T)/2 xi, xi> = <Db xi, xi>
    const double n2 = xi.squaredNorm();
    for (int j = 0; j < model.noise_dim(); ++j) {
        const Vec w = model.sigma_column_jacobian(x, j) * xi;
        const double ip = w.dot(xi);
        v += 0.5 * ((p - 2.0) * ip * ip / n2 + w.squaredNorm());
    }
    return v;
}

namespace {

std::vector<Vec> sphere_directions(int d, int count) {
    std::vector<Vec> dirs;
    if (d == 1) {
        dirs.push_back(vec1(1.0));
        return dirs;
    }
    if (d == 2) {
        for (int k = 0; k < count; ++k) {
            const double a = 2.0 * M_PI * k / count;
            dirs.push_back(vec2(std::cos(a), std::sin(a)));
        }
        return dirs;
    }
    if (d == 3) {
        const double golden = M_PI * (3.0 - std::sqrt(5.0));
        for (int k = 0; k < count; ++k) {
            const double z = 1.0 - 2.0 * (k + 0.5) / count;
            const double r = std::sqrt(1.0 - z * z);
            Vec v(3);
            v << r * std::cos(golden * k), r * std::sin(golden * k), z;
            dirs.push_back(v);
        }
        return dirs;
    }
    throw ConfigError("confluence search supports d <= 3");
}

}  // namespace

ConfluenceEstimate confluence_alpha(const DiffusionModel& model, double p, const ConfluenceGrid& grid,
                                    unsigned threads) {
    if (!(p >= 1.0 && p < 2.0)) throw ConfigError("confluence exponent p must lie in [1,2)");
    if (grid.resolution < 1 || !(grid.hi >= grid.lo)) throw ConfigError("bad confluence grid");
    const int d = model.dim();
    const int R = grid.resolution;
    const std::vector<Vec> dirs = sphere_directions(d, grid.directions);
    auto coord = [&](int i) { return R == 1 ? grid.lo : grid.lo + (grid.hi - grid.lo) * i / (R - 1); };

    std::uint64_t cells = 1;
    for (int k = 1; k < d; ++k) cells *= R;  // outer loop over all axes but the first

    struct Best {
        double v = -INFINITY;
        Vec x, xi;
    };
    std::vector<Best> best(cells);
    parallel_for(cells, threads, [&](std::uint64_t c) {
        Vec x(d);
        std::uint64_t rest = c;
        for (int k = 1; k < d; ++k) {
            x(k) = coord(static_cast<int>(rest % R));
            rest /= R;
        }
        Best& b = best[c];
        std::vector<Mat> dsig(model.noise_dim());
        for (int i = 0; i < R; ++i) {
            x(0) = coord(i);
            const Mat J = model.drift_jacobian(x);
            for (int j = 0; j < model.noise_dim(); ++j) dsig[j] = model.sigma_column_jacobian(x, j);
            for (const Vec& xi : dirs) {
                double v = xi.dot(J * xi);
                for (const Mat& D : dsig) {
                    const Vec w = D * xi;
                    const double ip = w.dot(xi);
                    v += 0.5 * ((p - 2.0) * ip * ip + w.squaredNorm());
                }
                if (v > b.v) {
                    b.v = v;
                    b.x = x;
                    b.xi = xi;
                }
            }
        }
    });

    ConfluenceEstimate est;
    est.p_exponent = p;
    est.grid = grid;
    est.max_value = -INFINITY;
    for (const Best& b : best)
        if (b.v > est.max_value) {
            est.max_value = b.v;
            est.worst_x = b.x;
            est.worst_xi = b.xi;
        }
    est.alpha = -est.max_value;
    est.violated = est.max_value >= 0.0;
    return est;
}

ConfluenceEstimate confluence_alpha_scan(const DiffusionModel& model, const ConfluenceGrid& grid,
                                         unsigned threads) {
    ConfluenceEstimate best;
    bool first = true;
    for (double p : {1.0, 1.5, 2.0 - 1e-6}) {
        ConfluenceEstimate e = confluence_alpha(model, p, grid, threads);
        if (first || e.alpha > best.alpha) best = e;
        first = false;
    }
    return best;
}

double bakry_emery_alpha(double rho, double kappa, double sigma_lower, int d) {
    if (!(rho > 0.0 && kappa > 0.0 && sigma_lower > 0.0)) throw ConfigError("Bakry-Emery inputs must be positive");
    return d == 1 ? rho : rho / std::sqrt(kappa / sigma_lower);
}

double gradient_bound(double f_lip, double alpha) {
    if (!(alpha > 0.0)) throw std::domain_error("gradient bound needs alpha > 0");
    return f_lip / alpha;
}

Mollifier::Mollifier(int dim, double delta, int nodes) : dim_(dim), delta_(delta), gl_(gauss_legendre(nodes)) {
    if (dim < 1 || dim > 2) throw ConfigError("mollification supports d <= 2");
    if (!(delta > 0.0)) throw ConfigError("mollifier bandwidth must be positive");
    // Normalise against the same product rule used for convolution so that
    // linear sources are reproduced exactly.
    double mass = 0.0;
    for_each_node([&](const Vec& u, double w) { mass += w * raw(u.squaredNorm()); });
    norm_ = 1.0 / mass;
    c_eta_ = 0.0;
    for_each_node([&](const Vec& u, double w) { c_eta_ += w * u.norm() * eta(u); });
}

double Mollifier::raw(double r2) const { return r2 < 1.0 ? std::exp(-1.0 / (1.0 - r2)) : 0.0; }

double Mollifier::eta(const Vec& u) const { return norm_ * raw(u.squaredNorm()); }

double Mollifier::eta_delta(const Vec& x) const {
    return eta(x / delta_) / std::pow(delta_, dim_);
}

Vec Mollifier::grad_eta(const Vec& u) const {
    const double r2 = u.squaredNorm();
    if (r2 >= 1.0) return Vec::Zero(dim_);
    const double s = 1.0 - r2;
    return (-2.0 * norm_ * raw(r2) / (s * s)) * u;
}

template <class Fn>
void Mollifier::for_each_node(Fn&& fn) const {
    const std::size_t n = gl_.nodes.size();
    Vec u(dim_);
    if (dim_ == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            u(0) = gl_.nodes[i];
            fn(u, gl_.weights[i]);
        }
        return;
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            u(0) = gl_.nodes[i];
            u(1) = gl_.nodes[j];
            fn(u, gl_.weights[i] * gl_.weights[j]);
        }
}

double Mollifier::mass() const {
    // int eta_delta(z) dz with z = delta u
    double m = 0.0;
    const double jac = std::pow(delta_, dim_);
    for_each_node([&](const Vec& u, double w) { m += w * jac * eta_delta(delta_ * u); });
    return m;
}

double Mollifier::smooth(const std::function<double(const Vec&)>& f, const Vec& x) const {
    double s = 0.0;
    for_each_node([&](const Vec& u, double w) {
        const double k = eta(u);
        if (k > 0.0) s += w * k * f(x - delta_ * u);
    });
    return s;
}

Vec Mollifier::smooth_gradient(const std::function<double(const Vec&)>& f, const Vec& x) const {
    Vec g = Vec::Zero(dim_);
    for_each_node([&](const Vec& u, double w) {
        const Vec ge = grad_eta(u);
        if (ge.squaredNorm() > 0.0) g += (w * f(x - delta_ * u)) * ge;
    });
    return g / delta_;
}

}  // namespace ergodev
