#pragma once

#include "nhfi/core.hpp"

#include <functional>
#include <string>

namespace nhfi {

/// One conserved quantity: value map, analytic gradient, target level and
/// feedback gain. Integrals flagged on_constraint_only hold along the flow
/// only on the constraint set; test suites sample them there.
struct IntegralSpec {
    std::string name;
    std::function<double(const VecX&)> value;
    std::function<VecX(const VecX&)> gradient;
    double target = 0.0;
    double gain = 0.0;
    bool on_constraint_only = false;
};

}  // namespace nhfi
