#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gasplan/complement.hpp"
#include "gasplan/core.hpp"
#include "gasplan/forecast.hpp"
#include "gasplan/geo.hpp"
#include "gasplan/listopt.hpp"
#include "gasplan/risk.hpp"
#include "gasplan/routeopt.hpp"
#include "gasplan/sim.hpp"

namespace gasplan::io {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Meter readings CSV: meter_id,date,cumulative_m3 (missing days absent)
// ---------------------------------------------------------------------------

struct ReadingRow {
    std::string meter_id;
    Day date{};
    double cumulative = 0;
    Provenance provenance = Provenance::observed;
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

inline std::vector<ReadingRow> read_readings_csv(std::istream& in) {
    std::vector<ReadingRow> rows;
    std::string line;
    int lineno = 0;
    bool header = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto f = split_csv_line(line);
        if (header) {
            if (f.size() < 3 || f[0] != "meter_id" || f[1] != "date")
                throw ParseError("line 1: expected header meter_id,date,cumulative_m3");
            header = false;
            continue;
        }
        if (f.size() < 3)
            throw ParseError("line " + std::to_string(lineno) + ": expected 3 fields");
        ReadingRow r;
        r.meter_id = f[0];
        r.date = day_from_iso(f[1]);
        try {
            r.cumulative = std::stod(f[2]);
        } catch (const std::exception&) {
            throw ParseError("line " + std::to_string(lineno) + ": bad number '" + f[2] + "'");
        }
        rows.push_back(r);
    }
    return rows;
}

/// kind_of: called per meter id to decide smart/conventional; defaults smart.
inline std::map<std::string, MeterSeries> series_from_rows(
    const std::vector<ReadingRow>& rows,
    const std::map<std::string, MeterKind>* kinds = nullptr) {
    std::map<std::string, std::map<Day, double>> per;
    for (const auto& r : rows) per[r.meter_id][r.date] = r.cumulative;
    std::map<std::string, MeterSeries> out;
    for (const auto& [id, readings] : per) {
        MeterSeries s;
        s.meter_id = id;
        if (kinds && kinds->count(id)) s.kind = kinds->at(id);
        s.start = readings.begin()->first;
        Day last = readings.rbegin()->first;
        s.readings.assign(static_cast<std::size_t>(date_diff(last, s.start)) + 1, std::nullopt);
        for (const auto& [d, v] : readings)
            s.readings[static_cast<std::size_t>(date_diff(d, s.start))] = v;
        out.emplace(id, std::move(s));
    }
    return out;
}

inline void write_readings_csv(std::ostream& os, const std::map<std::string, MeterSeries>& meters,
                               const std::map<std::string, std::vector<Provenance>>* prov = nullptr) {
    os << "meter_id,date,cumulative_m3" << (prov ? ",provenance" : "") << "\n";
    for (const auto& [id, s] : meters)
        for (int i = 0; i < s.size(); ++i) {
            if (!s.readings[static_cast<std::size_t>(i)]) continue;
            os << id << "," << day_to_iso(s.day_at(i)) << "," << *s.readings[static_cast<std::size_t>(i)];
            if (prov) {
                const char* p = "observed";
                if (prov->count(id)) {
                    auto pv = prov->at(id)[static_cast<std::size_t>(i)];
                    p = pv == Provenance::interpolated ? "interpolated"
                        : pv == Provenance::extrapolated ? "extrapolated"
                                                         : "observed";
                }
                os << "," << p;
            }
            os << "\n";
        }
}

// ---------------------------------------------------------------------------
// Customers JSON
// ---------------------------------------------------------------------------

inline json customer_to_json(const Customer& c) {
    json j;
    j["customer_id"] = c.customer_id;
    j["lon"] = c.lon;
    j["lat"] = c.lat;
    j["meters"] = c.meters;
    j["cylinder_count"] = c.cylinder_count;
    j["cylinder_unit_weight"] = c.cylinder_unit_weight;
    j["cylinder_size"] = c.cylinder_size == CylinderSize::large ? "large" : "small";
    j["cylinder_capacity"] = c.cylinder_capacity;
    j["remaining_gas"] = c.remaining_gas;
    j["reference_day"] = day_to_iso(c.reference_day);
    j["time_window"] = {c.tw_lb, c.tw_ub};
    j["replacement_duration"] = c.replacement_duration;
    std::vector<std::string> unavailable;
    for (Day d : c.unavailable_days) unavailable.push_back(day_to_iso(d));
    j["unavailable_days"] = unavailable;
    return j;
}

inline Customer customer_from_json(const json& j) {
    Customer c;
    c.customer_id = j.at("customer_id").get<std::string>();
    c.lon = j.at("lon").get<double>();
    c.lat = j.at("lat").get<double>();
    c.meters = j.at("meters").get<std::vector<std::string>>();
    c.cylinder_count = j.at("cylinder_count").get<int>();
    c.cylinder_unit_weight = j.at("cylinder_unit_weight").get<double>();
    std::string size = j.at("cylinder_size").get<std::string>();
    if (size != "large" && size != "small") throw ParseError("cylinder_size must be large or small");
    c.cylinder_size = size == "large" ? CylinderSize::large : CylinderSize::small;
    c.cylinder_capacity = j.at("cylinder_capacity").get<double>();
    c.remaining_gas = j.at("remaining_gas").get<double>();
    if (j.count("reference_day")) c.reference_day = day_from_iso(j.at("reference_day"));
    if (j.count("time_window")) {
        c.tw_lb = j.at("time_window").at(0).get<double>();
        c.tw_ub = j.at("time_window").at(1).get<double>();
    }
    if (j.count("replacement_duration")) c.replacement_duration = j.at("replacement_duration");
    if (j.count("unavailable_days"))
        for (const auto& s : j.at("unavailable_days")) c.unavailable_days.insert(day_from_iso(s));
    return c;
}

// ---------------------------------------------------------------------------
// World and truck
// ---------------------------------------------------------------------------

inline json truck_to_json(const TruckSpec& t) {
    json j;
    j["max_weight"] = t.max_weight;
    j["max_large"] = t.max_large;
    j["epsilon"] = t.epsilon;
    json table = json::array();
    for (const auto& p : t.space_table) table.push_back({{"large", p.large}, {"small", p.small}});
    j["space_table"] = table;
    return j;
}

inline TruckSpec truck_from_json(const json& j) {
    TruckSpec t;
    t.max_weight = j.at("max_weight").get<double>();
    t.max_large = j.at("max_large").get<int>();
    if (j.count("epsilon")) t.epsilon = j.at("epsilon").get<double>();
    t.space_table.clear();
    for (const auto& row : j.at("space_table"))
        t.space_table.push_back({row.at("large").get<int>(), row.at("small").get<int>()});
    fit_truck_line(t);
    return t;
}

inline json world_to_json(const World& w) {
    json j;
    json customers = json::array();
    for (const auto& [id, c] : w.customers) customers.push_back(customer_to_json(c));
    j["customers"] = customers;
    json meters = json::array();
    for (const auto& [id, s] : w.meters) {
        json m;
        m["meter_id"] = id;
        m["kind"] = s.kind == MeterKind::smart ? "smart" : "conventional";
        m["start"] = day_to_iso(s.start);
        json readings = json::array();
        for (const auto& r : s.readings)
            readings.push_back(r ? json(*r) : json(nullptr));
        m["readings"] = readings;
        meters.push_back(m);
    }
    j["meters"] = meters;
    j["depot"] = {{"lon", w.depot.lon}, {"lat", w.depot.lat}};
    j["truck"] = truck_to_json(w.truck);
    j["work_window"] = {w.work_lb, w.work_ub};
    j["overwork_limit"] = w.overwork_limit;
    j["truck_speed_kmh"] = w.truck_speed_kmh;
    j["supernode_break"] = w.supernode_break;
    json hp;
    hp["alpha_high"] = w.hp.alpha_high;
    hp["q_high"] = w.hp.q_high;
    hp["alpha_mdr"] = w.hp.alpha_mdr;
    hp["q_mdr"] = w.hp.q_mdr;
    hp["lookback_days"] = w.hp.lookback_days;
    hp["plan_horizon"] = w.hp.plan_horizon;
    hp["n_p"] = w.hp.n_p;
    hp["n_s"] = w.hp.n_s;
    hp["n_f"] = w.hp.n_f;
    hp["k"] = w.hp.k;
    j["hyperparams"] = hp;
    return j;
}

inline World world_from_json(const json& j) {
    World w;
    for (const auto& cj : j.at("customers")) {
        auto c = customer_from_json(cj);
        w.customers.emplace(c.customer_id, std::move(c));
    }
    for (const auto& mj : j.at("meters")) {
        MeterSeries s;
        s.meter_id = mj.at("meter_id").get<std::string>();
        std::string kind = mj.at("kind").get<std::string>();
        s.kind = kind == "smart" ? MeterKind::smart : MeterKind::conventional;
        s.start = day_from_iso(mj.at("start"));
        for (const auto& r : mj.at("readings"))
            s.readings.push_back(r.is_null() ? std::optional<double>() : std::optional<double>(r.get<double>()));
        w.meters.emplace(s.meter_id, std::move(s));
    }
    w.depot.lon = j.at("depot").at("lon").get<double>();
    w.depot.lat = j.at("depot").at("lat").get<double>();
    w.truck = truck_from_json(j.at("truck"));
    w.work_lb = j.at("work_window").at(0).get<double>();
    w.work_ub = j.at("work_window").at(1).get<double>();
    if (j.count("overwork_limit")) w.overwork_limit = j.at("overwork_limit").get<double>();
    if (j.count("truck_speed_kmh")) w.truck_speed_kmh = j.at("truck_speed_kmh").get<double>();
    if (j.count("supernode_break")) w.supernode_break = j.at("supernode_break").get<double>();
    if (j.count("hyperparams")) {
        const auto& hp = j.at("hyperparams");
        w.hp.alpha_high = hp.value("alpha_high", w.hp.alpha_high);
        w.hp.q_high = hp.value("q_high", w.hp.q_high);
        w.hp.alpha_mdr = hp.value("alpha_mdr", w.hp.alpha_mdr);
        w.hp.q_mdr = hp.value("q_mdr", w.hp.q_mdr);
        w.hp.lookback_days = hp.value("lookback_days", w.hp.lookback_days);
        w.hp.plan_horizon = hp.value("plan_horizon", w.hp.plan_horizon);
        w.hp.n_p = hp.value("n_p", w.hp.n_p);
        w.hp.n_s = hp.value("n_s", w.hp.n_s);
        w.hp.n_f = hp.value("n_f", w.hp.n_f);
        w.hp.k = hp.value("k", w.hp.k);
    }
    w.validate();
    return w;
}

// ---------------------------------------------------------------------------
// Distance matrix CSV: from_id,to_id,km,minutes
// ---------------------------------------------------------------------------

inline void load_matrix_csv(std::istream& in, DistanceProvider& provider) {
    std::string line;
    int lineno = 0;
    bool header = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto f = split_csv_line(line);
        if (header) {
            if (f.size() < 4 || f[0] != "from_id")
                throw ParseError("line 1: expected header from_id,to_id,km,minutes");
            header = false;
            continue;
        }
        if (f.size() < 4) throw ParseError("line " + std::to_string(lineno) + ": expected 4 fields");
        try {
            provider.set_matrix_entry(f[0], f[1], std::stod(f[2]), std::stod(f[3]));
        } catch (const std::exception&) {
            throw ParseError("line " + std::to_string(lineno) + ": bad number");
        }
    }
}

// ---------------------------------------------------------------------------
// Pipeline artifacts
// ---------------------------------------------------------------------------

inline json forecast_to_json(const ForecastResult& f) {
    json j;
    j["meter_id"] = f.meter_id;
    j["start"] = day_to_iso(f.start);
    j["mean"] = f.mean;
    j["variance"] = f.variance;
    j["model_tag"] = to_string(f.tag);
    return j;
}

inline json risk_rows_json(const RiskAssessment& a) {
    json rows = json::array();
    for (std::size_t i = 0; i < a.r_high.size(); ++i) {
        json j;
        j["customer_id"] = a.customer_id;
        j["day"] = day_to_iso(move_date(a.start, static_cast<int>(i) + 1));
        j["r_high"] = a.r_high[i];
        j["r_mdr"] = a.r_mdr[i];
        j["category"] = a.category[i] == RiskCategory::high       ? "high"
                        : a.category[i] == RiskCategory::moderate ? "moderate"
                                                                  : "low";
        rows.push_back(j);
    }
    return rows;
}

inline json delivery_list_to_json(const DeliveryList& dl) {
    json j;
    json dates = json::array();
    for (Day d : dl.slot_dates) dates.push_back(day_to_iso(d));
    j["slot_dates"] = dates;
    j["optimal"] = dl.optimal;
    j["objective"] = dl.objective;
    json rows = json::array();
    for (const auto& [st, entries] : dl.assignments)
        for (const auto& e : entries) {
            json r;
            r["slot"] = st.first;
            r["trip"] = st.second;
            r["customer_id"] = e.customer_id;
            r["role"] = to_string(e.role);
            r["risk"] = e.risk;
            rows.push_back(r);
        }
    j["assignments"] = rows;
    return j;
}

inline DeliveryList delivery_list_from_json(const json& j) {
    DeliveryList dl;
    for (const auto& d : j.at("slot_dates")) dl.slot_dates.push_back(day_from_iso(d));
    dl.optimal = j.value("optimal", true);
    dl.objective = j.value("objective", 0.0);
    for (const auto& r : j.at("assignments")) {
        DeliveryEntry e;
        e.customer_id = r.at("customer_id").get<std::string>();
        std::string role = r.at("role").get<std::string>();
        e.role = role == "high"                     ? ListRole::high
                 : role == "moderate_upgraded_high" ? ListRole::moderate_upgraded_high
                                                    : ListRole::moderate;
        e.risk = r.value("risk", 0.0);
        dl.at(r.at("slot").get<int>(), r.at("trip").get<int>()).push_back(e);
    }
    return dl;
}

inline json route_plan_to_json(const RoutePlan& p) {
    json j;
    j["method"] = p.method;
    j["makespan"] = p.makespan;
    j["served"] = p.served;
    j["skipped"] = p.skipped;
    json trips = json::array();
    for (const auto& t : p.trips) {
        json tj;
        tj["start_time"] = t.start_time;
        tj["end_time"] = t.end_time;
        tj["distance_km"] = t.distance_km;
        json order = json::array(), arrival = json::array();
        for (const auto& v : t.visits) {
            order.push_back(v.customer_id);
            arrival.push_back(v.arrival);
        }
        tj["order"] = order;
        tj["arrival"] = arrival;
        trips.push_back(tj);
    }
    j["trips"] = trips;
    return j;
}

inline json metrics_to_json(const MetricsReport& r) {
    json j;
    j["rate_average"] = r.rate_average;
    j["rate_median"] = r.rate_median;
    j["success"] = r.success;
    j["fail_out"] = r.fail_out;
    j["fail_over"] = r.fail_over;
    j["fail_time"] = r.fail_time;
    j["visit"] = r.visit;
    j["visit_per_day"] = r.visit_per_day;
    j["time_per_customer"] = r.time_per_customer;
    j["time_per_customer_driving"] = r.time_per_customer_driving;
    j["distance_per_trip"] = r.distance_per_trip;
    j["run_out"] = r.run_out;
    j["fail_over_threshold"] = r.fail_over_threshold;
    return j;
}

inline json scenario_to_json(const ScenarioSpec& s) {
    json j;
    j["seed"] = s.seed;
    j["n_customers"] = s.n_customers;
    j["smart_fraction"] = s.smart_fraction;
    j["n_clusters"] = s.n_clusters;
    j["cluster_spread_deg"] = s.cluster_spread_deg;
    j["area_deg"] = s.area_deg;
    j["base_usage_min"] = s.base_usage_min;
    j["base_usage_max"] = s.base_usage_max;
    j["weekly_amplitude"] = s.weekly_amplitude;
    j["noise_sigma"] = s.noise_sigma;
    j["smart_missing_prob"] = s.smart_missing_prob;
    j["conventional_cadence"] = s.conventional_cadence;
    j["history_days"] = s.history_days;
    j["horizon_days"] = s.horizon_days;
    j["cylinder_capacity"] = s.cylinder_capacity;
    j["cylinder_weight"] = s.cylinder_weight;
    j["small_cylinder_fraction"] = s.small_cylinder_fraction;
    j["truck_weight"] = s.truck_weight;
    j["max_large"] = s.max_large;
    j["initial_fill_min"] = s.initial_fill_min;
    j["initial_fill_max"] = s.initial_fill_max;
    j["replacement_minutes"] = s.replacement_minutes;
    j["depot_lon"] = s.depot_lon;
    j["depot_lat"] = s.depot_lat;
    j["work_lb"] = s.work_lb;
    j["work_ub"] = s.work_ub;
    j["truck_speed_kmh"] = s.truck_speed_kmh;
    json hp;
    hp["alpha_high"] = s.hp.alpha_high;
    hp["q_high"] = s.hp.q_high;
    hp["alpha_mdr"] = s.hp.alpha_mdr;
    hp["q_mdr"] = s.hp.q_mdr;
    hp["lookback_days"] = s.hp.lookback_days;
    hp["plan_horizon"] = s.hp.plan_horizon;
    hp["n_p"] = s.hp.n_p;
    hp["n_s"] = s.hp.n_s;
    hp["n_f"] = s.hp.n_f;
    hp["k"] = s.hp.k;
    j["hyperparams"] = hp;
    return j;
}

inline ScenarioSpec scenario_from_json(const json& j) {
    ScenarioSpec s;
    static const std::set<std::string> known{
        "seed", "n_customers", "smart_fraction", "n_clusters", "cluster_spread_deg", "area_deg",
        "base_usage_min", "base_usage_max", "weekly_amplitude", "noise_sigma", "smart_missing_prob",
        "conventional_cadence", "history_days", "horizon_days", "cylinder_capacity",
        "cylinder_weight", "small_cylinder_fraction", "truck_weight", "max_large",
        "initial_fill_min", "initial_fill_max", "replacement_minutes", "depot_lon", "depot_lat",
        "work_lb", "work_ub", "truck_speed_kmh", "hyperparams"};
    for (const auto& [key, value] : j.items())
        if (!known.count(key)) throw ValidationError("unknown scenario key: " + key);
    s.seed = j.value("seed", s.seed);
    s.n_customers = j.value("n_customers", s.n_customers);
    s.smart_fraction = j.value("smart_fraction", s.smart_fraction);
    s.n_clusters = j.value("n_clusters", s.n_clusters);
    s.cluster_spread_deg = j.value("cluster_spread_deg", s.cluster_spread_deg);
    s.area_deg = j.value("area_deg", s.area_deg);
    s.base_usage_min = j.value("base_usage_min", s.base_usage_min);
    s.base_usage_max = j.value("base_usage_max", s.base_usage_max);
    s.weekly_amplitude = j.value("weekly_amplitude", s.weekly_amplitude);
    s.noise_sigma = j.value("noise_sigma", s.noise_sigma);
    s.smart_missing_prob = j.value("smart_missing_prob", s.smart_missing_prob);
    s.conventional_cadence = j.value("conventional_cadence", s.conventional_cadence);
    s.history_days = j.value("history_days", s.history_days);
    s.horizon_days = j.value("horizon_days", s.horizon_days);
    s.cylinder_capacity = j.value("cylinder_capacity", s.cylinder_capacity);
    s.cylinder_weight = j.value("cylinder_weight", s.cylinder_weight);
    s.small_cylinder_fraction = j.value("small_cylinder_fraction", s.small_cylinder_fraction);
    s.truck_weight = j.value("truck_weight", s.truck_weight);
    s.max_large = j.value("max_large", s.max_large);
    s.initial_fill_min = j.value("initial_fill_min", s.initial_fill_min);
    s.initial_fill_max = j.value("initial_fill_max", s.initial_fill_max);
    s.replacement_minutes = j.value("replacement_minutes", s.replacement_minutes);
    s.depot_lon = j.value("depot_lon", s.depot_lon);
    s.depot_lat = j.value("depot_lat", s.depot_lat);
    s.work_lb = j.value("work_lb", s.work_lb);
    s.work_ub = j.value("work_ub", s.work_ub);
    s.truck_speed_kmh = j.value("truck_speed_kmh", s.truck_speed_kmh);
    if (j.count("hyperparams")) {
        const auto& hp = j.at("hyperparams");
        s.hp.alpha_high = hp.value("alpha_high", s.hp.alpha_high);
        s.hp.q_high = hp.value("q_high", s.hp.q_high);
        s.hp.alpha_mdr = hp.value("alpha_mdr", s.hp.alpha_mdr);
        s.hp.q_mdr = hp.value("q_mdr", s.hp.q_mdr);
        s.hp.lookback_days = hp.value("lookback_days", s.hp.lookback_days);
        s.hp.plan_horizon = hp.value("plan_horizon", s.hp.plan_horizon);
        s.hp.n_p = hp.value("n_p", s.hp.n_p);
        s.hp.n_s = hp.value("n_s", s.hp.n_s);
        s.hp.n_f = hp.value("n_f", s.hp.n_f);
        s.hp.k = hp.value("k", s.hp.k);
    }
    return s;
}

// ---------------------------------------------------------------------------
// Plan log as JSON lines
// ---------------------------------------------------------------------------

inline void log_to_jsonl(std::ostream& os, const SimLog& log) {
    for (const auto& r : log.replacements) {
        json j{{"type", "replacement"},
               {"day", day_to_iso(r.day)},
               {"customer_id", r.customer_id},
               {"rate", r.rate},
               {"window_ok", r.window_ok}};
        os << j.dump() << "\n";
    }
    for (const auto& [d, c] : log.daily_run_out) {
        json j{{"type", "run_out"}, {"day", day_to_iso(d)}, {"count", c}};
        os << j.dump() << "\n";
    }
    for (const auto& p : log.plans) {
        json j{{"type", "plan"},
               {"day", day_to_iso(p.day)},
               {"trips", p.trips},
               {"visits", p.visits},
               {"duration_minutes", p.duration_minutes},
               {"replacement_minutes", p.replacement_minutes},
               {"distance_km", p.distance_km},
               {"method", p.method}};
        os << j.dump() << "\n";
    }
    json j{{"type", "summary"}, {"working_days", log.working_days}};
    os << j.dump() << "\n";
}

inline SimLog log_from_jsonl(std::istream& in) {
    SimLog log;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
        }
        std::string type = j.value("type", "");
        if (type == "replacement") {
            log.replacements.push_back(ReplacementRecord{day_from_iso(j.at("day")),
                                                         j.at("customer_id").get<std::string>(),
                                                         j.at("rate").get<double>(),
                                                         j.value("window_ok", true)});
        } else if (type == "run_out") {
            log.daily_run_out.emplace_back(day_from_iso(j.at("day")), j.at("count").get<int>());
        } else if (type == "plan") {
            PlanRecord p;
            p.day = day_from_iso(j.at("day"));
            p.trips = j.value("trips", 0);
            p.visits = j.value("visits", 0);
            p.duration_minutes = j.value("duration_minutes", 0.0);
            p.replacement_minutes = j.value("replacement_minutes", 0.0);
            p.distance_km = j.value("distance_km", 0.0);
            p.method = j.value("method", "");
            log.plans.push_back(std::move(p));
        } else if (type == "summary") {
            log.working_days = j.value("working_days", 0);
        } else {
            throw ParseError("line " + std::to_string(lineno) + ": unknown record type '" + type + "'");
        }
    }
    return log;
}

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    return j;
}

inline void save_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open " + path + " for writing");
    out << j.dump(2) << "\n";
}

} // namespace gasplan::io
