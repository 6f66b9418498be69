#include "evmaas/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "text.hpp"

namespace evmaas {

// ---------------------------------------------------------------------------
// PriceSeries

PriceSeries::PriceSeries(std::vector<int> breakpoints, std::vector<double> eur_per_mwh, int horizon)
    : breakpoints_(std::move(breakpoints)), eur_per_mwh_(std::move(eur_per_mwh)), horizon_(horizon) {
    if (breakpoints_.size() != eur_per_mwh_.size())
        throw Error("price series: breakpoint/value count mismatch");
    if (breakpoints_.empty() || breakpoints_.front() != 0)
        throw Error("price series: horizon coverage gap, first breakpoint must be 0");
    if (horizon_ <= 0) throw Error("price series: horizon must be positive");
    for (std::size_t k = 1; k < breakpoints_.size(); ++k) {
        if (breakpoints_[k] <= breakpoints_[k - 1])
            throw Error("price series: breakpoints must be strictly increasing");
    }
    if (breakpoints_.back() >= horizon_)
        throw Error("price series: breakpoint beyond horizon");
}

PriceSeries PriceSeries::flat(double eur_per_kwh, int horizon) {
    return PriceSeries({0}, {eur_per_kwh * 1000.0}, horizon);
}

double PriceSeries::price_at(double t) const {
    if (!(t >= 0.0 && t < horizon_)) throw Error("price_at: t outside horizon");
    const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t,
                                     [](double v, int b) { return v < b; });
    const auto k = static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
    return eur_per_mwh_[k] / 1000.0;
}

double PriceSeries::integral(double a, double b) const {
    a = std::clamp(a, 0.0, static_cast<double>(horizon_));
    b = std::clamp(b, 0.0, static_cast<double>(horizon_));
    if (b <= a) return 0.0;
    double total = 0.0;
    for (std::size_t k = 0; k < breakpoints_.size(); ++k) {
        const double lo = breakpoints_[k];
        const double hi = k + 1 < breakpoints_.size() ? breakpoints_[k + 1] : horizon_;
        const double overlap = std::min(b, hi) - std::max(a, lo);
        if (overlap > 0.0) total += overlap * eur_per_mwh_[k] / 1000.0;
    }
    return total;
}

double PriceSeries::average(double a, double b) const {
    const double lo = std::clamp(a, 0.0, static_cast<double>(horizon_));
    const double hi = std::clamp(b, 0.0, static_cast<double>(horizon_));
    if (hi <= lo) {
        const double t = std::min(lo, std::nextafter(static_cast<double>(horizon_), 0.0));
        return price_at(t);
    }
    return integral(lo, hi) / (hi - lo);
}

double price_at(const PriceSeries& prices, double t) { return prices.price_at(t); }

// ---------------------------------------------------------------------------
// Validation

void Scenario::validate() const {
    if (horizon <= 0) throw Error("scenario: horizon must be positive");
    if (fleet.n_vehicles < 1) throw Error("scenario: at least one vehicle is required");
    if (!(fleet.e_max_kwh > 0.0)) throw Error("scenario: e_max_kwh must be > 0");
    if (!(fleet.e0_kwh >= 0.0 && fleet.e0_kwh <= fleet.e_max_kwh))
        throw Error("scenario: e0_kwh must lie in [0, e_max_kwh]");
    if (!(fleet.econ_kwh_per_km > 0.0)) throw Error("scenario: econ_kwh_per_km must be > 0");
    if (!(fleet.speed_kmh > 0.0)) throw Error("scenario: speed_kmh must be > 0");
    if (!(fleet.detour_factor > 0.0)) throw Error("scenario: detour_factor must be > 0");
    if (prices.horizon() != horizon) throw Error("scenario: price series horizon mismatch");
    for (const auto& r : requests) {
        const auto who = "scenario: request " + std::to_string(r.id);
        if (r.t_request < 0 || r.t_request >= horizon) throw Error(who + " outside horizon");
        if (r.origin == r.destination) throw Error(who + " has origin == destination");
        if (!(r.revenue >= 0.0)) throw Error(who + " has negative revenue");
    }
    for (const auto& s : stations) {
        if (!(s.power_kw > 0.0))
            throw Error("scenario: station " + std::to_string(s.id) + " power must be > 0");
    }
    degradation.validate();
}

// ---------------------------------------------------------------------------
// Files

namespace {

constexpr const char* kRequestsHeader = "id,origin_x,origin_y,dest_x,dest_y,t_min,revenue_eur";
constexpr const char* kStationsHeader = "id,x,y,p_ch_kw";
constexpr const char* kPricesHeader = "t_min,price_eur_per_mwh";

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
}

/// Calls `row(fields, line_no)` for every non-empty data line after the header.
void for_each_csv_row(const std::string& content, const std::string& file, std::string_view header,
                      std::size_t columns,
                      const std::function<void(const std::vector<std::string_view>&, std::size_t)>& row) {
    std::istringstream in(content);
    std::string line;
    std::size_t line_no = 0;
    bool seen_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = text::trim(line);
        if (t.empty()) continue;
        if (!seen_header) {
            if (t != header) throw ParseError(file, line_no, "expected header '" + std::string(header) + "'");
            seen_header = true;
            continue;
        }
        const auto fields = text::split(t, ',');
        if (fields.size() != columns)
            throw ParseError(file, line_no, "expected " + std::to_string(columns) + " fields");
        row(fields, line_no);
    }
    if (!seen_header) throw ParseError(file, line_no, "missing header row");
}

double field_double(std::string_view s, const std::string& file, std::size_t line, const char* name) {
    const auto v = text::to_double(s);
    if (!v || !std::isfinite(*v)) throw ParseError(file, line, std::string("bad number in ") + name);
    return *v;
}

int field_int(std::string_view s, const std::string& file, std::size_t line, const char* name) {
    const auto v = text::to_int(s);
    if (!v) throw ParseError(file, line, std::string("bad integer in ") + name);
    return static_cast<int>(*v);
}

bool parse_bool(std::string_view s, const std::string& file, std::size_t line) {
    if (s == "1" || s == "true" || s == "yes") return true;
    if (s == "0" || s == "false" || s == "no") return false;
    throw ParseError(file, line, "bad boolean '" + std::string(s) + "'");
}

}  // namespace

std::set<std::string> apply_config(Scenario& sc, const std::string& content, const std::string& file) {
    auto& f = sc.fleet;
    auto& d = sc.degradation;
    std::map<std::string, std::function<void(std::string_view, std::size_t)>> setters;
    auto number = [&](double& target) {
        return [&target, &file](std::string_view v, std::size_t line) {
            target = field_double(v, file, line, "value");
        };
    };
    setters["n_vehicles"] = [&](std::string_view v, std::size_t line) {
        f.n_vehicles = field_int(v, file, line, "n_vehicles");
    };
    setters["horizon_min"] = [&](std::string_view v, std::size_t line) {
        sc.horizon = field_int(v, file, line, "horizon_min");
    };
    setters["count_service_energy"] = [&](std::string_view v, std::size_t line) {
        f.count_service_energy = parse_bool(v, file, line);
    };
    setters["q_eol_kwh"] = [&](std::string_view v, std::size_t line) {
        if (v == "none" || v.empty()) d.q_eol_override.reset();
        else d.q_eol_override = field_double(v, file, line, "q_eol_kwh");
    };
    setters["c_rate"] = [&](std::string_view v, std::size_t line) {
        d.c_rate_ch = d.c_rate_dch = field_double(v, file, line, "c_rate");
    };
    setters["e_max_kwh"] = number(f.e_max_kwh);
    setters["e0_kwh"] = number(f.e0_kwh);
    setters["econ_kwh_per_km"] = number(f.econ_kwh_per_km);
    setters["speed_kmh"] = number(f.speed_kmh);
    setters["depot_x"] = number(f.depot.x);
    setters["depot_y"] = number(f.depot.y);
    setters["detour_factor"] = number(f.detour_factor);
    setters["b1"] = number(d.b1);
    setters["b2"] = number(d.b2);
    setters["b3"] = number(d.b3);
    setters["b4"] = number(d.b4);
    setters["b5"] = number(d.b5);
    setters["b6"] = number(d.b6);
    setters["phi_z"] = number(d.phi_z);
    setters["dz"] = number(d.dz);
    setters["c_rate_ch"] = number(d.c_rate_ch);
    setters["c_rate_dch"] = number(d.c_rate_dch);
    setters["v_ch"] = number(d.v_ch);
    setters["de_eol"] = number(d.de_eol);
    setters["p_batt_eur"] = number(d.p_batt);
    setters["q_eol_scale"] = number(d.q_eol_scale);

    std::set<std::string> seen;
    std::istringstream in(content);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto t = text::trim(line);
        if (const auto hash = t.find('#'); hash != std::string_view::npos) t = text::trim(t.substr(0, hash));
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string_view::npos) throw ParseError(file, line_no, "expected key = value");
        const std::string key(text::trim(t.substr(0, eq)));
        const auto value = text::trim(t.substr(eq + 1));
        const auto it = setters.find(key);
        if (it == setters.end()) throw ParseError(file, line_no, "unknown key '" + key + "'");
        it->second(value, line_no);
        seen.insert(key);
    }
    return seen;
}

std::string format_config(const Scenario& sc) {
    const auto& f = sc.fleet;
    const auto& d = sc.degradation;
    std::ostringstream out;
    auto kv = [&](const char* key, double v) { out << key << " = " << text::format(v) << '\n'; };
    out << "# fleet\n";
    out << "n_vehicles = " << f.n_vehicles << '\n';
    kv("e_max_kwh", f.e_max_kwh);
    kv("e0_kwh", f.e0_kwh);
    kv("econ_kwh_per_km", f.econ_kwh_per_km);
    kv("speed_kmh", f.speed_kmh);
    kv("depot_x", f.depot.x);
    kv("depot_y", f.depot.y);
    kv("detour_factor", f.detour_factor);
    out << "count_service_energy = " << (f.count_service_energy ? 1 : 0) << '\n';
    out << "horizon_min = " << sc.horizon << '\n';
    out << "# degradation\n";
    kv("b1", d.b1);
    kv("b2", d.b2);
    kv("b3", d.b3);
    kv("b4", d.b4);
    kv("b5", d.b5);
    kv("b6", d.b6);
    kv("phi_z", d.phi_z);
    kv("dz", d.dz);
    kv("c_rate_ch", d.c_rate_ch);
    kv("c_rate_dch", d.c_rate_dch);
    kv("v_ch", d.v_ch);
    kv("de_eol", d.de_eol);
    kv("p_batt_eur", d.p_batt);
    if (d.q_eol_override) kv("q_eol_kwh", *d.q_eol_override);
    else out << "q_eol_kwh = none\n";
    kv("q_eol_scale", d.q_eol_scale);
    return out.str();
}

Scenario load_scenario(const std::filesystem::path& dir) {
    Scenario sc;
    const auto cfg_path = dir / "fleet.cfg";
    const auto keys = apply_config(sc, read_file(cfg_path), cfg_path.string());
    // C-rate follows the charger power unless configured explicitly.
    const bool c_rate_given = keys.count("c_rate") + keys.count("c_rate_ch") + keys.count("c_rate_dch") > 0;

    const auto req_path = dir / "requests.csv";
    const auto req_name = req_path.string();
    for_each_csv_row(read_file(req_path), req_name, kRequestsHeader, 7,
                     [&](const std::vector<std::string_view>& f, std::size_t line) {
                         TravelRequest r;
                         r.id = field_int(f[0], req_name, line, "id");
                         r.origin = {field_double(f[1], req_name, line, "origin_x"),
                                     field_double(f[2], req_name, line, "origin_y")};
                         r.destination = {field_double(f[3], req_name, line, "dest_x"),
                                          field_double(f[4], req_name, line, "dest_y")};
                         r.t_request = field_int(f[5], req_name, line, "t_min");
                         r.revenue = field_double(f[6], req_name, line, "revenue_eur");
                         if (r.t_request < 0 || r.t_request >= sc.horizon)
                             throw ParseError(req_name, line, "t_min outside horizon [0, " +
                                                                  std::to_string(sc.horizon) + ")");
                         if (r.origin == r.destination)
                             throw ParseError(req_name, line, "origin equals destination");
                         if (r.revenue < 0.0) throw ParseError(req_name, line, "negative revenue");
                         sc.requests.push_back(r);
                     });

    const auto st_path = dir / "stations.csv";
    const auto st_name = st_path.string();
    for_each_csv_row(read_file(st_path), st_name, kStationsHeader, 4,
                     [&](const std::vector<std::string_view>& f, std::size_t line) {
                         ChargingStation s;
                         s.id = field_int(f[0], st_name, line, "id");
                         s.location = {field_double(f[1], st_name, line, "x"),
                                       field_double(f[2], st_name, line, "y")};
                         s.power_kw = field_double(f[3], st_name, line, "p_ch_kw");
                         if (!(s.power_kw > 0.0)) throw ParseError(st_name, line, "p_ch_kw must be > 0");
                         sc.stations.push_back(s);
                     });

    const auto pr_path = dir / "prices.csv";
    const auto pr_name = pr_path.string();
    std::vector<int> breakpoints;
    std::vector<double> values;
    std::size_t last_line = 0;
    for_each_csv_row(read_file(pr_path), pr_name, kPricesHeader, 2,
                     [&](const std::vector<std::string_view>& f, std::size_t line) {
                         const int t = field_int(f[0], pr_name, line, "t_min");
                         if (!breakpoints.empty() && t <= breakpoints.back())
                             throw ParseError(pr_name, line, "breakpoints must be strictly increasing");
                         if (breakpoints.empty() && t != 0)
                             throw ParseError(pr_name, line, "horizon coverage gap: first breakpoint must be 0");
                         if (t >= sc.horizon) throw ParseError(pr_name, line, "breakpoint beyond horizon");
                         breakpoints.push_back(t);
                         values.push_back(field_double(f[1], pr_name, line, "price_eur_per_mwh"));
                         last_line = line;
                     });
    if (breakpoints.empty())
        throw ParseError(pr_name, last_line, "horizon coverage gap: no price rows");
    sc.prices = PriceSeries(std::move(breakpoints), std::move(values), sc.horizon);

    if (!c_rate_given) {
        double p = 22.0;
        if (!sc.stations.empty()) {
            p = std::max_element(sc.stations.begin(), sc.stations.end(), [](const auto& a, const auto& b) {
                    return a.power_kw < b.power_kw;
                })->power_kw;
        }
        sc.degradation.c_rate_ch = sc.degradation.c_rate_dch = p / sc.fleet.e_max_kwh;
    }
    sc.validate();
    return sc;
}

void save_scenario(const Scenario& sc, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::ostringstream req;
    req << kRequestsHeader << '\n';
    for (const auto& r : sc.requests) {
        req << r.id << ',' << text::format(r.origin.x) << ',' << text::format(r.origin.y) << ','
            << text::format(r.destination.x) << ',' << text::format(r.destination.y) << ',' << r.t_request
            << ',' << text::format(r.revenue) << '\n';
    }
    write_file(dir / "requests.csv", req.str());

    std::ostringstream st;
    st << kStationsHeader << '\n';
    for (const auto& s : sc.stations) {
        st << s.id << ',' << text::format(s.location.x) << ',' << text::format(s.location.y) << ','
           << text::format(s.power_kw) << '\n';
    }
    write_file(dir / "stations.csv", st.str());

    std::ostringstream pr;
    pr << kPricesHeader << '\n';
    for (std::size_t k = 0; k < sc.prices.breakpoints().size(); ++k)
        pr << sc.prices.breakpoints()[k] << ',' << text::format(sc.prices.eur_per_mwh()[k]) << '\n';
    write_file(dir / "prices.csv", pr.str());

    write_file(dir / "fleet.cfg", format_config(sc));
}

// ---------------------------------------------------------------------------
// Synthetic scenarios

namespace {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // 53 random mantissa bits; independent of the standard library's distributions.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double normal() {
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

private:
    std::mt19937_64 engine_;
};

double round_to(double v, double quantum) { return std::round(v / quantum) * quantum; }

}  // namespace

DemandProfile parse_profile(const std::string& name) {
    if (name == "uniform") return DemandProfile::Uniform;
    if (name == "bimodal" || name == "bimodal-peaks") return DemandProfile::Bimodal;
    throw Error("unknown demand profile '" + name + "'");
}

Scenario generate_synthetic(const SyntheticOptions& o) {
    if (o.n_requests < 0 || o.n_vehicles < 0 || o.n_stations < 0)
        throw Error("generate_synthetic: counts must be >= 0");
    Rng rng(o.seed);
    Scenario sc;
    sc.horizon = o.horizon;
    sc.fleet = o.fleet;
    sc.fleet.n_vehicles = o.n_vehicles;
    sc.fleet.depot = {o.area_km / 2.0, o.area_km / 2.0};

    auto location = [&] {
        return Point{round_to(rng.uniform() * o.area_km, 1e-3), round_to(rng.uniform() * o.area_km, 1e-3)};
    };

    for (int c = 0; c < o.n_stations; ++c) sc.stations.push_back({c, location(), o.station_power_kw});

    // Morning and evening commute peaks, placed relative to the horizon.
    const double peak_a = o.horizon * (8.0 / 24.0);
    const double peak_b = o.horizon * (17.5 / 24.0);
    const double spread = o.horizon * (1.0 / 24.0);
    auto request_time = [&] {
        while (true) {
            double t = 0.0;
            if (o.profile == DemandProfile::Uniform) {
                t = std::floor(rng.uniform() * o.horizon);
            } else {
                const double centre = rng.uniform() < 0.5 ? peak_a : peak_b;
                t = std::round(centre + spread * rng.normal());
            }
            if (t >= 0.0 && t < o.horizon) return static_cast<int>(t);
        }
    };

    for (int n = 0; n < o.n_requests; ++n) {
        TravelRequest r;
        r.t_request = request_time();
        r.origin = location();
        do {
            r.destination = location();
        } while (euclidean(r.origin, r.destination) < 0.5);
        const double km = euclidean(r.origin, r.destination) * sc.fleet.detour_factor;
        r.revenue = round_to(o.fare_base_eur + o.fare_per_km_eur * km, 0.01);
        sc.requests.push_back(r);
    }
    std::stable_sort(sc.requests.begin(), sc.requests.end(),
                     [](const auto& a, const auto& b) { return a.t_request < b.t_request; });
    for (std::size_t n = 0; n < sc.requests.size(); ++n) sc.requests[n].id = static_cast<int>(n) + 1;

    if (o.price_pattern == PricePattern::Flat) {
        sc.prices = PriceSeries({0}, {o.price_high_eur_per_mwh}, o.horizon);
    } else {
        std::vector<int> bp{0};
        std::vector<double> val{o.price_low_eur_per_mwh};
        if (o.day_start_min > 0 && o.day_start_min < o.horizon) {
            bp.push_back(o.day_start_min);
            val.push_back(o.price_high_eur_per_mwh);
        } else if (o.day_start_min <= 0) {
            val.front() = o.price_high_eur_per_mwh;
        }
        if (o.day_end_min > o.day_start_min && o.day_end_min < o.horizon) {
            bp.push_back(o.day_end_min);
            val.push_back(o.price_low_eur_per_mwh);
        }
        sc.prices = PriceSeries(std::move(bp), std::move(val), o.horizon);
    }
    sc.degradation.c_rate_ch = sc.degradation.c_rate_dch = o.station_power_kw / sc.fleet.e_max_kwh;
    if (o.n_vehicles >= 1) sc.validate();
    return sc;
}

}  // namespace evmaas
