#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "evmaas/common.hpp"
#include "evmaas/degradation.hpp"

namespace evmaas {

struct TravelRequest {
    int id = 0;
    Point origin;
    Point destination;
    int t_request = 0;     // minutes from horizon start
    double revenue = 0.0;  // EUR
};

struct ChargingStation {
    int id = 0;
    Point location;
    double power_kw = 22.0;
};

struct FleetSpec {
    int n_vehicles = 1;
    double e_max_kwh = 40.0;  // usable capacity
    double e0_kwh = 20.0;
    double econ_kwh_per_km = 0.15;
    Point depot;
    double speed_kmh = 30.0;
    double detour_factor = 1.3;  // road distance = factor * straight line
    // Count the o_j -> d_j service leg in the energy of transition ij.
    bool count_service_energy = true;
};

/// Piecewise-constant price signal on right-open intervals [b_k, b_{k+1}).
/// The last interval extends to the horizon. Input values are kept in
/// EUR/MWh; every query returns EUR/kWh.
class PriceSeries {
public:
    PriceSeries() = default;
    PriceSeries(std::vector<int> breakpoints, std::vector<double> eur_per_mwh, int horizon);

    static PriceSeries flat(double eur_per_kwh, int horizon);

    const std::vector<int>& breakpoints() const { return breakpoints_; }
    const std::vector<double>& eur_per_mwh() const { return eur_per_mwh_; }
    int horizon() const { return horizon_; }

    /// Price of the interval containing t, in EUR/kWh. Requires 0 <= t < horizon.
    double price_at(double t) const;

    /// Integral of the price over [a, b] in (EUR/kWh)*minutes; a, b are clamped to the horizon.
    double integral(double a, double b) const;

    /// Time-weighted mean over [a, b]; degenerates to the price at a when b <= a.
    double average(double a, double b) const;

    friend bool operator==(const PriceSeries&, const PriceSeries&) = default;

private:
    std::vector<int> breakpoints_;
    std::vector<double> eur_per_mwh_;
    int horizon_ = 0;
};

struct Scenario {
    std::vector<TravelRequest> requests;
    std::vector<ChargingStation> stations;
    FleetSpec fleet;
    PriceSeries prices;
    DegradationParams degradation;
    int horizon = 1440;

    /// Throws Error when an invariant does not hold.
    void validate() const;
};

double price_at(const PriceSeries& prices, double t);

/// Reads requests.csv, stations.csv, prices.csv and fleet.cfg from `dir`.
Scenario load_scenario(const std::filesystem::path& dir);

/// Writes the four files read by load_scenario. Creates `dir` if needed.
void save_scenario(const Scenario& scenario, const std::filesystem::path& dir);

/// Parses the key-value fleet configuration into `scenario` (fleet,
/// degradation, horizon). Unknown keys are rejected. Returns the keys seen.
std::set<std::string> apply_config(Scenario& scenario, const std::string& text, const std::string& file_name);
std::string format_config(const Scenario& scenario);

enum class DemandProfile { Uniform, Bimodal };
enum class PricePattern { Flat, TwoLevel };

struct SyntheticOptions {
    std::uint64_t seed = 1;
    int n_requests = 10;
    int n_vehicles = 2;
    int n_stations = 1;
    DemandProfile profile = DemandProfile::Bimodal;
    PricePattern price_pattern = PricePattern::TwoLevel;
    double area_km = 10.0;  // side of the square service area
    int horizon = 1440;
    double price_low_eur_per_mwh = 60.0;
    double price_high_eur_per_mwh = 180.0;
    int day_start_min = 420;  // high-price interval [day_start, day_end)
    int day_end_min = 1320;
    double fare_base_eur = 2.5;
    double fare_per_km_eur = 1.0;
    double station_power_kw = 22.0;
    FleetSpec fleet;
};

Scenario generate_synthetic(const SyntheticOptions& options);

DemandProfile parse_profile(const std::string& name);

}  // namespace evmaas
