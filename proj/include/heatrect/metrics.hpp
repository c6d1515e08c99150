// metrics.hpp: Rectification coefficients, quasi-currents, maps and transistor amplification

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "heatrect/currents.hpp"
#include "heatrect/model.hpp"
#include "heatrect/stability.hpp"

namespace heatrect {

// |a + b| / max(|a|, |b|). Throws DomainError ("no transport") when both magnitudes are below 1e-14.
double rectification(double q_fwd, double q_rev);

// W_alpha + Q_alpha per bath.
std::vector<double> quasi_currents(const CurrentsReport& report);

struct RectificationPoint {
    double omega_d{0.0};
    double c0{0.0};
    double q_fwd{0.0};
    double q_rev{0.0};
    double w_fwd{0.0};  // local work rate on bath 1, forward
    double w_rev{0.0};
    double r_full{0.0};
    double r_quasi{0.0};
    double residual{0.0};  // worst relative first-law residual of the two runs
    bool stable{true};
    std::string reason;
};

// Builds the model for one grid point (omega_d, c0).
using PointBuilder = std::function<Model(double omega_d, double c0)>;

struct MapOptions {
    SolverOptions solver{};
    StabilityOptions stability{};
    unsigned workers{1};
    std::function<void(std::size_t, std::size_t)> progress{};
};

// Forward and temperature-swapped (baths 0 and 1) runs at one point. Unstable or failed
// points come back with stable = false, NaN currents and a reason code.
RectificationPoint rectification_point(const Model& model, double omega_d, double c0, const MapOptions& opts = {});

// Row-major grid over omega_d (outer) and c0 (inner).
std::vector<RectificationPoint> rectification_map(const PointBuilder& build, const std::vector<double>& omega_d,
                                                  const std::vector<double>& c0, const MapOptions& opts = {});
std::vector<RectificationPoint> rectification_map(const TwoOscillatorParams& base, const std::vector<double>& omega_d,
                                                  const std::vector<double>& c0, const MapOptions& opts = {});

// count points from lo to hi inclusive.
std::vector<double> linspace(double lo, double hi, int count);

struct AmplificationPoint {
    double control{0.0};
    double e_dot{0.0};
    std::vector<double> a;  // per bath that is not the control
    double a1{0.0};
    double a2{0.0};
    double derivative_step{0.0};
    double residual{0.0};  // a1 + a2 + 1
};

// A_alpha = (dQ_alpha/d omega_d) / (dW/d omega_d) by Richardson-extrapolated central differences.
AmplificationPoint amplification_dynamic(const Model& model, double omega_d, double step = 0.0,
                                         const SolverOptions& opts = {});

// A_alpha = (dQ_alpha/dT3) / (dQ3/dT3) for a three-bath static model, the third bath being the
// control. Throws ValidationError if |A_alpha| exceeds 1 + 1e-6.
AmplificationPoint amplification_static(const Model& model3, double t3, double step = 0.0,
                                        const SolverOptions& opts = {});

// I_{alpha 3} = int T0_{alpha 3} dn_3/dT3 over the real line for alpha = 1, 2; the static
// amplification is then -I_{alpha 3} / (I_13 + I_23).
std::vector<double> static_control_integrals(const Model& model3, const SolverOptions& opts = {});

} // namespace heatrect
