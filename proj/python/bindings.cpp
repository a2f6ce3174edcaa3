#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ergodev/asclt.hpp"
#include "ergodev/bounds.hpp"
#include "ergodev/errors.hpp"
#include "ergodev/montecarlo.hpp"
#include "ergodev/poisson.hpp"
#include "ergodev/registry.hpp"

namespace py = pybind11;
using namespace ergodev;

namespace {

py::dict simulate(const std::string& name, double theta, std::uint64_t n, std::uint64_t seed,
                  const std::map<std::string, double>& params) {
    ModelBundle b = registry_get(name, params);
    StepSequence steps(theta, b.gamma0);
    TrajectoryOptions opt;
    opt.n = n;
    opt.seed = seed;
    opt.x0 = b.x0;
    TrajectoryResult r;
    {
        py::gil_scoped_release nogil;
        r = run_trajectory(*b.model, *b.phi, steps, b.innov, opt);
    }
    py::dict d;
    d["Gamma_n"] = r.Gamma_n;
    d["nu_Aphi"] = r.nu_Aphi;
    d["nu_phi"] = r.nu_phi;
    d["nu_sigma2"] = r.nu_sigma2;
    d["nu_carre"] = r.nu_carre;
    d["statistic"] = r.statistic();
    d["x_final"] = std::vector<double>(r.x_final.data(), r.x_final.data() + r.x_final.size());
    return d;
}

py::dict confluence(const std::string& name, double p, double lo, double hi, int resolution, int directions) {
    ModelBundle b = registry_get(name);
    ConfluenceEstimate e;
    {
        py::gil_scoped_release nogil;
        e = confluence_alpha(*b.model, p, {lo, hi, resolution, directions});
    }
    py::dict d;
    d["alpha"] = e.alpha;
    d["p"] = e.p_exponent;
    d["violated"] = e.violated;
    d["worst_x"] = std::vector<double>(e.worst_x.data(), e.worst_x.data() + e.worst_x.size());
    d["worst_xi"] = std::vector<double>(e.worst_xi.data(), e.worst_xi.data() + e.worst_xi.size());
    return d;
}

}  // namespace

PYBIND11_MODULE(_ergodev, m) {
    m.doc() = "decreasing-step Euler schemes and deviation bounds";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<SimulationError>(m, "SimulationError", PyExc_RuntimeError);

    py::class_<StepSequence>(m, "StepSequence")
        .def(py::init<double, double>(), py::arg("theta"), py::arg("gamma0") = 1.0)
        .def_property_readonly("theta", &StepSequence::theta)
        .def_property_readonly("gamma0", &StepSequence::gamma0)
        .def("gamma", &StepSequence::gamma, py::arg("k"))
        .def("gamma_sum", &StepSequence::gamma_sum, py::arg("n"), py::arg("ell") = 1.0)
        .def("bias_ratio", &StepSequence::bias_ratio, py::arg("n"), py::arg("beta"));

    m.def("registry_names", &registry_names);
    m.def("simulate", &simulate, py::arg("model"), py::arg("theta"), py::arg("n"), py::arg("seed") = 1,
          py::arg("params") = std::map<std::string, double>{});
    m.def("confluence_alpha", &confluence, py::arg("model"), py::arg("p") = 2.0 - 1e-6, py::arg("lo") = -10.0,
          py::arg("hi") = 10.0, py::arg("resolution") = 200, py::arg("directions") = 720);

    m.def("cardan_root", &cardan_root, py::arg("p"), py::arg("q"));
    m.def("cardan_lambda_min", &cardan_lambda_min, py::arg("a"), py::arg("Gamma_n"), py::arg("A"), py::arg("B"));
    m.def("p_polynomial", &p_polynomial, py::arg("lam"), py::arg("a"), py::arg("Gamma_n"), py::arg("A"),
          py::arg("B"));
    m.def("p_lambda_min", &p_lambda_min, py::arg("a"), py::arg("Gamma_n"), py::arg("A_tilde"), py::arg("B_tilde"),
          py::arg("rho"));
    m.def(
        "optimize_rho",
        [](double a, double G, double At, double Bt) {
            RhoOptimum o = optimize_rho(a, G, At, Bt);
            return py::make_tuple(o.rho, o.value);
        },
        py::arg("a"), py::arg("Gamma_n"), py::arg("A_tilde"), py::arg("B_tilde"));
    m.def("coverage_to_a", &coverage_to_a, py::arg("coverage"));
    m.def("gradient_bound", &gradient_bound, py::arg("f_lip"), py::arg("alpha"));
    m.def("bakry_emery_alpha", &bakry_emery_alpha, py::arg("rho"), py::arg("kappa"), py::arg("sigma_lower"),
          py::arg("d"));

    m.def("asclt_r", &asclt_r, py::arg("n"));
    m.def("wallis_rho", &wallis_rho, py::arg("n"));

    m.def(
        "clopper_pearson",
        [](std::uint64_t k, std::uint64_t n, double level) {
            ProportionInterval ci = clopper_pearson(k, n, level);
            return py::make_tuple(ci.lo, ci.hi);
        },
        py::arg("hits"), py::arg("total"), py::arg("level") = 0.95);
    m.def(
        "tail_estimate",
        [](const std::vector<double>& stats, const std::vector<double>& grid) {
            py::list out;
            for (const TailRow& r : tail_estimate(stats, grid))
                out.append(py::make_tuple(r.a, r.hits, r.g_emp, r.ci_lo, r.ci_hi));
            return out;
        },
        py::arg("statistics"), py::arg("a_grid"));
    m.def("theta_grid", &theta_grid);
}
