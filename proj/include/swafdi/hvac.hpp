#pragma once

#include <vector>

#include "swafdi/discretize.hpp"
#include "swafdi/model.hpp"

namespace swafdi::hvac {

/// Physical constants of the thermal zone model.
struct Parameters {
    double h_w = 180.0;
    double h_fg = 1078.25;
    double W_o = 0.018;
    double W_s = 0.007;
    double C_p = 0.24;
    double T_o = 85.0;
    double V_s = 58464.0;
    double V_he = 60.75;
    double rho = 0.074;
    double flow = 17000.0;   // fan, ft^3/min
    double gpm_on = 58.0;    // chilled water pump when on
};

/// Sampling period, in the model's time unit, that reproduces the temperature
/// and humidity couplings of the reference discrete model.
inline constexpr double kSamplePeriod = 10.0 / 48.0;

inline constexpr int kOnMode = 0;
inline constexpr int kOffMode = 1;

/// Augmented 5-state ODE (T_TS, W_TS, T_SA, Q_o, M_o) at the given fan flow and pump rate.
AffineOde continuous_model(const Parameters& params, double flow, double gpm, double sample_period = kSamplePeriod);

/// Reference discrete nominal model: two modes (chiller on, off), outputs T_TS and W_TS.
SwaModel nominal_model();

/// Fan at half speed, pump at half speed while on, humidity sensor biased by +0.005.
SwaModel fan_fault(const Parameters& params = {});
SwaModel pump_fault();
SwaModel humidity_fault();

/// The three fault models in order.
std::vector<SwaModel> fault_library(const Parameters& params = {});

/// Reference nominal A and chiller-off drift, for discretization checks.
Eigen::MatrixXd reference_A();
Eigen::VectorXd reference_f_off();

}  // namespace swafdi::hvac
