#pragma once

#include <optional>
#include <vector>

namespace evmaas {

/// One transition of a fixed vehicle chain.
struct ChargeWindow {
    double consumption_kwh = 0.0;  // energy driven during the transition
    double max_exchange_kwh = 0.0; // 0 when no station is visited
    double buy_cost = 0.0;         // EUR per kWh charged (price + degradation + tie-break)
    double sell_value = 0.0;       // EUR per kWh discharged (price - degradation - tie-break)
};

struct ChargeProblem {
    double initial_kwh = 0.0;
    double final_kwh = 0.0;
    double capacity_kwh = 0.0;
    std::vector<ChargeWindow> windows;
};

struct ChargeSchedule {
    std::vector<double> charged;     // Cp per window
    std::vector<double> discharged;  // Cm per window
    std::vector<double> energy;      // state of energy after each window
    double cost = 0.0;               // sum of buy_cost*Cp - sell_value*Cm
};

/// Cheapest charge/discharge amounts for a fixed chain, or nullopt when no
/// amounts keep the energy after every window inside [0, capacity] and end
/// at `final_kwh`.
///
/// The chain is a line network: each window's node receives the carried
/// energy and the grid exchange, and emits the consumption plus the carried
/// energy. Energy is routed one cheapest marginal unit at a time
/// (successive shortest paths), starting from a state where every profitable
/// discharge is taken. All arc costs are non-negative in that state, so no
/// negative cycle exists and each augmentation keeps the flow optimal for its
/// value. Windows that would both buy and sell form a cycle of cost
/// buy - sell > 0, so the result never charges and discharges in the same
/// window when buy_cost > sell_value.
std::optional<ChargeSchedule> solve_charge_schedule(const ChargeProblem& problem);

}  // namespace evmaas
