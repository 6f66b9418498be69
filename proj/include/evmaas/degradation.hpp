#pragma once

#include <optional>

namespace evmaas {

/// Cyclic-aging model parameters.
///
/// Two modes are supported. In calibrated mode (`q_eol_override` set) the
/// end-of-life throughput is taken as given and the square-root aging curve is
/// anchored at (q_eol, de_eol). In physical mode Q_eol is evaluated from kappa
/// and the charging voltage, then multiplied by `q_eol_scale` so the result is
/// in kWh under whichever unit convention the coefficients were fitted in.
struct DegradationParams {
    double b1 = -2.87e-4;
    double b2 = 3.352e-2;
    double b3 = 3.8e-3;
    double b4 = 3.578e-5;
    double b5 = 2.274e-4;
    double b6 = 1.02e-2;
    double phi_z = 0.5;        // average SoC
    double dz = 0.8;           // depth of discharge
    double c_rate_ch = 0.55;   // 1/h
    double c_rate_dch = 0.55;  // 1/h
    double v_ch = 350.0;       // V
    double de_eol = 0.2;       // normalized capacity drop at end of life
    double p_batt = 4000.0;    // EUR
    std::optional<double> q_eol_override = 59250.0;  // kWh
    double q_eol_scale = 1.0;  // physical mode only

    /// Throws Error when an invariant does not hold.
    void validate() const;
};

namespace degradation {

double kappa(const DegradationParams& params);

/// End-of-life throughput in kWh. Throws when kappa <= 0 without an override.
double q_eol(const DegradationParams& params);

/// Linearized degradation cost per kWh of throughput (charged or discharged).
double marginal_cost(const DegradationParams& params);

/// Normalized capacity drop after `q_throughput_kwh` of throughput.
double capacity_drop(const DegradationParams& params, double q_throughput_kwh);

/// Linear chord through (0, 0) and (q_eol, de_eol).
double capacity_drop_linear(const DegradationParams& params, double q_throughput_kwh);

double lifetime_days(const DegradationParams& params, double daily_throughput_kwh);

}  // namespace degradation
}  // namespace evmaas
