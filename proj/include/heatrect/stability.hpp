// stability.hpp: Heuristic detection of parametric instability in driven networks

#pragma once

#include <string>

#include "heatrect/model.hpp"

namespace heatrect {

struct StabilityOptions {
    int steps_per_period{0};  // 0 picks a step resolving the fastest mode
    double multiplier_tol{1e-9};
    double condition_limit{1e10};
    int probes{64};
};

struct StabilityReport {
    bool stable{true};
    bool proxy_unstable{false};     // Markovian monodromy test
    bool spectral_unstable{false};  // Floquet block-system conditioning
    double max_multiplier{0.0};
    double max_condition{0.0};
    double worst_probe{0.0};
    std::string reason;
};

// One-period propagator of M x'' + 2 Gamma x' + V(t) x = 0 in the phase space (x, p), where
// Gamma carries each bath's gamma on its node. Classical RK4.
Matrix monodromy(const Model& model, int steps);

StabilityReport stability_check(const Model& model, const StabilityOptions& opts = {});

} // namespace heatrect
