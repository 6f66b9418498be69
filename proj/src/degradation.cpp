#include "evmaas/degradation.hpp"

#include <cmath>

#include "evmaas/common.hpp"

namespace evmaas {

void DegradationParams::validate() const {
    if (!(de_eol > 0.0 && de_eol <= 1.0)) throw Error("degradation: de_eol must lie in (0, 1]");
    if (!(p_batt >= 0.0)) throw Error("degradation: p_batt must be >= 0");
    if (!(v_ch > 0.0)) throw Error("degradation: v_ch must be > 0");
    if (!(q_eol_scale > 0.0)) throw Error("degradation: q_eol_scale must be > 0");
    if (q_eol_override && !(*q_eol_override > 0.0))
        throw Error("degradation: q_eol_kwh must be > 0");
}

namespace degradation {

double kappa(const DegradationParams& p) {
    const double soc = p.phi_z - p.b2;
    return p.b1 * soc * soc + p.b3 * p.dz + p.b4 * p.c_rate_ch + p.b5 * p.c_rate_dch + p.b6;
}

double q_eol(const DegradationParams& p) {
    if (p.q_eol_override) return *p.q_eol_override;
    const double k = kappa(p);
    if (!(k > 0.0)) throw Error("degradation-free battery; set q_eol_override");
    const double ratio = p.de_eol / k;
    return ratio * ratio * p.v_ch * p.q_eol_scale;
}

double marginal_cost(const DegradationParams& p) {
    if (p.p_batt == 0.0) return 0.0;
    return p.p_batt / q_eol(p);
}

double capacity_drop(const DegradationParams& p, double q) {
    if (q < 0.0) throw Error("capacity_drop: negative throughput");
    if (p.q_eol_override) return p.de_eol * std::sqrt(q / *p.q_eol_override);
    // kappa / sqrt(V_ch) * sqrt(Q) with Q expressed in the fitted unit
    return kappa(p) * std::sqrt(q / (p.v_ch * p.q_eol_scale));
}

double capacity_drop_linear(const DegradationParams& p, double q) {
    if (q < 0.0) throw Error("capacity_drop_linear: negative throughput");
    return p.de_eol * q / q_eol(p);
}

double lifetime_days(const DegradationParams& p, double daily_throughput_kwh) {
    if (!(daily_throughput_kwh > 0.0)) throw Error("lifetime_days: throughput must be > 0");
    return q_eol(p) / daily_throughput_kwh;
}

}  // namespace degradation
}  // namespace evmaas
