#pragma once

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "ergodev/model.hpp"

namespace ergodev {

struct InitialCondition {
    Vec point;
    bool random_sign = false;  // X0 = +-point with probability 1/2 each
};

struct ModelBundle {
    std::string name;
    std::shared_ptr<const DiffusionModel> model;
    // Poisson-side test function phi (the statistic uses A phi) or, when
    // phi_is_source, the source f itself.
    std::shared_ptr<const TestFunction> phi;
    bool phi_is_source = false;
    InnovationDistribution innov;
    InitialCondition x0;
    double gamma0 = 1.0;
    double beta = 1.0;       // Holder order of D^3 phi used by the bias terms
    double theta_lip = 1.0;  // [vartheta]_1 for the coboundary bound
    std::vector<std::pair<std::string, double>> params;  // resolved parameters
};

std::vector<std::string> registry_names();

// Throws ConfigError for unknown names or parameters.
ModelBundle registry_get(const std::string& name, const std::map<std::string, double>& params = {});

}  // namespace ergodev
