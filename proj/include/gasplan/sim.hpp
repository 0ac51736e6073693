#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "gasplan/complement.hpp"
#include "gasplan/core.hpp"
#include "gasplan/forecast.hpp"
#include "gasplan/geo.hpp"
#include "gasplan/listopt.hpp"
#include "gasplan/risk.hpp"
#include "gasplan/routeopt.hpp"
#include "gasplan/tripdiv.hpp"

namespace gasplan {

// ---------------------------------------------------------------------------
// Scenario generation
// ---------------------------------------------------------------------------

struct ScenarioSpec {
    std::uint64_t seed = 1;
    int n_customers = 40;
    double smart_fraction = 0.63;
    int n_clusters = 3;
    double cluster_spread_deg = 0.01;
    double area_deg = 0.08;
    double base_usage_min = 0.3, base_usage_max = 1.2; // m^3/day
    double weekly_amplitude = 0.2;
    double noise_sigma = 0.05;
    double smart_missing_prob = 0.00181; // the observed smart-meter drop rate
    int conventional_cadence = 29;       // days between conventional readings
    int history_days = 60;
    int horizon_days = 28;
    double cylinder_capacity = 20.0; // m^3 per cylinder
    double cylinder_weight = 50.0;   // kg, gas plus steel
    double small_cylinder_fraction = 0.3;
    double truck_weight = 2000.0;
    int max_large = 34;
    double initial_fill_min = 0.3, initial_fill_max = 1.0;
    double replacement_minutes = 10.0;
    double depot_lon = 140.10, depot_lat = 35.60;
    double work_lb = 7 * 60.0, work_ub = 19 * 60.0;
    double truck_speed_kmh = 30.0;
    Hyperparams hp;
};

struct SimWorld {
    World world; // observable readings only (missing days masked)
    std::map<std::string, std::vector<double>> truth_du; // per meter, full span
    std::map<std::string, double> initial_gas;           // per customer at sim_begin
    Day start{};     // first day of generated history
    Day sim_begin{}; // first simulated day (a Monday)
    int horizon_days = 0;
    double smart_missing_prob = 0.00181;
    int conventional_cadence = 29;

    double truth_usage(const std::string& meter, Day d) const {
        int i = date_diff(d, start);
        const auto& v = truth_du.at(meter);
        if (i < 0 || i >= static_cast<int>(v.size())) return 0.0;
        return v[static_cast<std::size_t>(i)];
    }
};

/// Deterministic synthetic world: clustered customers, per-customer base
/// usage with weekly seasonality and noise, smart meters with rare drops and
/// conventional meters read on a fixed cadence. Ground truth is kept apart
/// from the observable (masked) readings.
inline SimWorld generate(const ScenarioSpec& spec) {
    SimWorld sw;
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    sw.start = day_from_iso("2021-01-04"); // a Monday
    sw.horizon_days = spec.horizon_days;
    sw.smart_missing_prob = spec.smart_missing_prob;
    sw.conventional_cadence = spec.conventional_cadence;
    // First simulated day: the first Monday at or after start + history.
    Day sb = move_date(sw.start, spec.history_days);
    while (weekday(sb) != 0) sb = move_date(sb, 1);
    sw.sim_begin = sb;
    int total_days = date_diff(sb, sw.start) + spec.horizon_days + 14;

    auto& w = sw.world;
    w.depot = {spec.depot_lon, spec.depot_lat};
    w.work_lb = spec.work_lb;
    w.work_ub = spec.work_ub;
    w.truck_speed_kmh = spec.truck_speed_kmh;
    w.hp = spec.hp;
    w.truck.max_weight = spec.truck_weight;
    w.truck.max_large = spec.max_large;
    w.truck.space_table = default_space_table();
    fit_truck_line(w.truck);

    std::vector<std::pair<double, double>> centers;
    for (int c = 0; c < spec.n_clusters; ++c)
        centers.emplace_back(spec.depot_lon + (unit(rng) * 2 - 1) * spec.area_deg,
                             spec.depot_lat + (unit(rng) * 2 - 1) * spec.area_deg);

    int n_smart = static_cast<int>(std::lround(spec.smart_fraction * spec.n_customers));
    for (int i = 0; i < spec.n_customers; ++i) {
        std::string cid = "C" + std::to_string(1000 + i);
        std::string mid = "M" + std::to_string(1000 + i);
        Customer c;
        c.customer_id = cid;
        const auto& ctr = centers[static_cast<std::size_t>(i % spec.n_clusters)];
        c.lon = ctr.first + gauss(rng) * spec.cluster_spread_deg;
        c.lat = ctr.second + gauss(rng) * spec.cluster_spread_deg;
        c.meters = {mid};
        c.cylinder_count = 1 + (unit(rng) < 0.2 ? 1 : 0);
        c.cylinder_unit_weight = spec.cylinder_weight;
        c.cylinder_size = unit(rng) < spec.small_cylinder_fraction ? CylinderSize::small
                                                                   : CylinderSize::large;
        c.cylinder_capacity = spec.cylinder_capacity;
        c.replacement_duration = spec.replacement_minutes;
        c.tw_lb = spec.work_lb;
        c.tw_ub = 24 * 60.0;
        c.reference_day = sw.sim_begin;

        bool smart = i < n_smart;
        double base = spec.base_usage_min + unit(rng) * (spec.base_usage_max - spec.base_usage_min);
        double phase = unit(rng) * 7.0;
        std::vector<double> du;
        du.reserve(static_cast<std::size_t>(total_days));
        for (int d = 0; d < total_days; ++d) {
            double season = 1.0 + spec.weekly_amplitude * std::sin(2.0 * kPi * (d + phase) / 7.0);
            double v = base * season + gauss(rng) * spec.noise_sigma;
            du.push_back(std::max(0.0, v));
        }

        MeterSeries s;
        s.meter_id = mid;
        s.kind = smart ? MeterKind::smart : MeterKind::conventional;
        s.start = sw.start;
        double cu = 0;
        int observed_until = spec.history_days; // readings up to sim_begin arrive later
        observed_until = date_diff(sw.sim_begin, sw.start);
        for (int d = 0; d <= observed_until; ++d) {
            bool present;
            if (smart) {
                present = unit(rng) >= spec.smart_missing_prob;
            } else {
                present = d % spec.conventional_cadence == 0 || d == observed_until;
            }
            s.readings.push_back(present ? std::optional<double>(cu) : std::nullopt);
            if (d < total_days) cu += du[static_cast<std::size_t>(d)];
        }
        if (!s.readings.front()) s.readings.front() = 0.0; // anchor the series

        double fill = spec.initial_fill_min + unit(rng) * (spec.initial_fill_max - spec.initial_fill_min);
        c.remaining_gas = fill * c.total_capacity();
        sw.initial_gas[cid] = c.remaining_gas;

        sw.truth_du[mid] = std::move(du);
        w.customers.emplace(cid, std::move(c));
        w.meters.emplace(mid, std::move(s));
    }
    w.validate();
    return sw;
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

struct ReplacementRecord {
    Day day{};
    std::string customer_id;
    double rate = 0.0; // remaining gas rate at replacement
    bool window_ok = true;
};

struct PlanRecord {
    Day day{};
    int trips = 0;
    int visits = 0;
    double duration_minutes = 0;     // driving plus replacement
    double replacement_minutes = 0;  // the replacement share
    double distance_km = 0;
    std::string method;
};

struct SimLog {
    std::vector<ReplacementRecord> replacements;
    std::vector<std::pair<Day, int>> daily_run_out;
    std::vector<PlanRecord> plans;
    int working_days = 0;
};

struct MetricsReport {
    double rate_average = 0, rate_median = 0;
    double success = 0, fail_out = 0, fail_over = 0;
    long fail_time = 0;
    long visit = 0;
    double visit_per_day = 0;
    double time_per_customer = 0;         // includes replacement
    double time_per_customer_driving = 0; // excludes replacement
    double distance_per_trip = 0;
    double run_out = 0;
    double fail_over_threshold = 0.15;
};

inline MetricsReport compute_metrics(const SimLog& log, double fail_over_threshold = 0.15) {
    if (log.replacements.empty() && log.daily_run_out.empty())
        throw EmptyLogError("nothing simulated");
    MetricsReport r;
    r.fail_over_threshold = fail_over_threshold;
    std::vector<double> rates;
    long success = 0, fail_out = 0, fail_over = 0;
    for (const auto& rec : log.replacements) {
        rates.push_back(rec.rate);
        if (rec.rate <= 0)
            ++fail_out;
        else if (rec.rate > fail_over_threshold)
            ++fail_over;
        else
            ++success;
        if (!rec.window_ok) ++r.fail_time;
    }
    if (!rates.empty()) {
        r.rate_average = mean(rates);
        r.rate_median = median(rates);
        double total = static_cast<double>(rates.size());
        r.success = success / total;
        r.fail_out = fail_out / total;
        r.fail_over = fail_over / total;
    }
    r.visit = static_cast<long>(log.replacements.size());
    if (log.working_days > 0) r.visit_per_day = static_cast<double>(r.visit) / log.working_days;
    double dur = 0, rep = 0, dist = 0;
    long trips = 0;
    for (const auto& p : log.plans) {
        dur += p.duration_minutes;
        rep += p.replacement_minutes;
        dist += p.distance_km;
        trips += p.trips;
    }
    if (r.visit > 0) {
        r.time_per_customer = dur / static_cast<double>(r.visit);
        r.time_per_customer_driving = (dur - rep) / static_cast<double>(r.visit);
    }
    if (trips > 0) r.distance_per_trip = dist / static_cast<double>(trips);
    if (!log.daily_run_out.empty()) {
        double s = 0;
        for (const auto& [d, c] : log.daily_run_out) s += c;
        r.run_out = s / static_cast<double>(log.daily_run_out.size());
    }
    return r;
}

// ---------------------------------------------------------------------------
// Rolling-horizon simulation
// ---------------------------------------------------------------------------

enum class ListModel { multibb, minbb, maxrisk, greedy };

struct SimConfig {
    ListModel list_model = ListModel::multibb;
    RouteStrategy route_strategy = RouteStrategy::tsp;
    TripAlgorithm trip_algorithm = TripAlgorithm::fava;
    ComplementAlgorithm smart_complement = ComplementAlgorithm::linear;
    double solver_time_limit = 1800.0; // the field-test 30-minute cap
    bool oracle_forecast = false; // forecast the ground truth with zero variance
    double fail_over_threshold = 0.15;
    int lb = -1; // -1: default_lb
    double ellipse_kappa = 1.2;
    int ellipse_k = 3;
    int availability_search_bound = 60;
};

namespace detail {

struct PlannerState {
    std::map<std::string, MeterSeries> readings; // grows day by day
    std::map<std::string, double> gas;           // ground truth remaining
    std::map<std::string, Day> last_refill;      // planner-visible refills
    std::map<std::string, double> gas_at_refill;
};

inline bool working_day(Day d) { return !is_weekend(d); }

/// The next `count` working days strictly after d.
inline std::vector<Day> next_working_days(Day d, int count) {
    std::vector<Day> out;
    Day cur = move_date(d, 1);
    while (static_cast<int>(out.size()) < count) {
        if (working_day(cur)) out.push_back(cur);
        cur = move_date(cur, 1);
    }
    return out;
}

} // namespace detail

struct DailyPlan {
    Day execute_on{};
    RoutePlan route;
    DeliveryList list;
};

struct StageOutputs {
    std::map<std::string, ForecastResult> forecasts;
    std::map<std::string, std::map<Day, double>> daily; // complemented daily usage
};

/// Complement plus forecast (or the oracle short-circuit) for every meter.
inline StageOutputs run_forecast_stage(const SimWorld& sw,
                                       const std::map<std::string, MeterSeries>& readings,
                                       Day today, const SimConfig& cfg, int need_f) {
    const auto& w = sw.world;
    StageOutputs out;
    if (cfg.oracle_forecast) {
        for (const auto& [mid, s] : readings) {
            ForecastResult f;
            f.meter_id = mid;
            f.start = today;
            for (int i = 0; i < need_f; ++i) {
                f.mean.push_back(sw.truth_usage(mid, move_date(today, i)));
                f.variance.push_back(0.0);
            }
            f.tag = ModelTag::ar;
            out.forecasts.emplace(mid, std::move(f));
            std::map<Day, double> du;
            for (Day d = sw.start; d < today; d = move_date(d, 1)) du[d] = sw.truth_usage(mid, d);
            out.daily[mid] = std::move(du);
        }
        return out;
    }
    ComplementConfig ccfg;
    ccfg.smart_algorithm = cfg.smart_complement;
    ccfg.k = w.hp.k;
    auto comp = complement_all(readings, ccfg, today);
    auto index = build_similarity_index(readings, ccfg.min_overlap);
    ForecastConfig fcfg;
    fcfg.n_p = w.hp.n_p;
    fcfg.n_s = w.hp.n_s;
    fcfg.n_f = need_f;
    fcfg.k = w.hp.k;
    out.forecasts = forecast_all(comp, index, today, fcfg);
    for (const auto& [mid, cm] : comp) {
        std::map<Day, double> du;
        try {
            auto d = daily_from_cumulative(cm.series, &cm.reading_prov);
            for (int i = 0; i < d.size(); ++i) du[d.day_at(i)] = d.values[static_cast<std::size_t>(i)];
        } catch (const Error&) {
        }
        out.daily[mid] = std::move(du);
    }
    return out;
}

/// Per-customer risk vectors over `horizon` days after today. Refill
/// overrides shift the remaining-gas reference to the latest replacement.
inline std::map<std::string, RiskAssessment> run_risk_stage(
    const SimWorld& sw, const StageOutputs& stage, Day today, int horizon, const SimConfig& cfg,
    const std::map<std::string, Day>* last_refill = nullptr,
    const std::map<std::string, double>* gas_at_refill = nullptr,
    std::map<std::string, double>* remaining_out = nullptr) {
    const auto& w = sw.world;
    std::map<std::string, RiskAssessment> assessments;
    for (const auto& [cid, c] : w.customers) {
        Customer ref = c;
        if (last_refill && last_refill->count(cid)) ref.reference_day = last_refill->at(cid);
        if (gas_at_refill && gas_at_refill->count(cid)) ref.remaining_gas = gas_at_refill->at(cid);
        double s;
        if (cfg.oracle_forecast) {
            s = ref.remaining_gas;
            for (const auto& mid : c.meters)
                for (Day d = ref.reference_day; d < today; d = move_date(d, 1))
                    s -= sw.truth_usage(mid, d);
        } else {
            s = estimate_remaining(ref, stage.daily, today);
        }
        if (remaining_out) (*remaining_out)[cid] = s;
        auto dist = aggregate(c, stage.forecasts);
        auto avail = [&](Day d) { return detail::working_day(d) && c.customer_available(d); };
        assessments.emplace(cid, assess(c, dist, s, w.hp, avail, today, horizon,
                                        cfg.availability_search_bound));
    }
    return assessments;
}

/// Builds the list-problem slots from the assessments: per-slot categories
/// and the high-risk trip division.
inline ListProblemInput build_list_input(const World& w,
                                         const std::map<std::string, RiskAssessment>& assessments,
                                         const std::vector<Day>& slot_dates, Day today,
                                         const SimConfig& cfg) {
    ListProblemInput input;
    input.customers = &w.customers;
    input.truck = w.truck;
    input.time_limit_s = cfg.solver_time_limit;
    input.lb = cfg.lb >= 0 ? cfg.lb : default_lb(w.customers, w.truck);
    for (Day d : slot_dates) {
        DayCandidates day;
        day.date = d;
        int idx = date_diff(d, today) - 1;
        for (const auto& [cid, a] : assessments) {
            if (idx >= static_cast<int>(a.category.size())) continue;
            auto cat = a.category[static_cast<std::size_t>(idx)];
            if (cat == RiskCategory::high) {
                day.high.push_back(cid);
                day.risk[cid] = a.r_high[static_cast<std::size_t>(idx)];
            } else if (cat == RiskCategory::moderate) {
                day.moderate.push_back(cid);
                day.risk[cid] = a.r_mdr[static_cast<std::size_t>(idx)];
            }
        }
        std::vector<Customer> high_customers;
        for (const auto& id : day.high) high_customers.push_back(w.customers.at(id));
        day.trips = divide_trips(high_customers, w.truck, cfg.trip_algorithm);
        input.days.push_back(std::move(day));
    }
    return input;
}

/// Solves the configured delivery-list model with the greedy backstop.
inline DeliveryList solve_list(const World& w, const ListProblemInput& input, const SimConfig& cfg) {
    auto elig = build_eligibility(input);
    try {
        switch (cfg.list_model) {
            case ListModel::multibb:
                return upgrade_postprocess(solve_multi_bb(input), elig);
            case ListModel::minbb: {
                int day0 = static_cast<int>(input.days[0].high.size() + input.days[0].moderate.size());
                int lb_start = std::min(input.lb, day0 / input.n_trips(0));
                for (int lb = lb_start; lb >= 0; --lb) {
                    try {
                        return solve_min_bb(input, lb);
                    } catch (const InfeasibleError&) {
                        if (lb == 0) throw;
                    }
                }
                break;
            }
            case ListModel::maxrisk: {
                auto cands = ellipse_candidates(input.days[0].high, input.days[0].moderate,
                                                w.customers, cfg.ellipse_k, cfg.ellipse_kappa);
                return solve_max_risk(input, cands);
            }
            case ListModel::greedy:
                return dl_greedy(input);
        }
    } catch (const Error&) {
        // solver starved or infeasible: fall through to the greedy backstop
    }
    return dl_greedy(input);
}

/// Routes one slot of a delivery list.
inline RoutePlan route_slot(const World& w, const DeliveryList& list, int slot, int n_trips,
                            const SimConfig& cfg, const DistanceProvider& provider) {
    std::vector<std::vector<RouteCustomer>> trips;
    for (int t = 0; t < n_trips; ++t) {
        std::vector<RouteCustomer> trip;
        if (const auto* entries = list.find(slot, t)) {
            for (const auto& e : *entries) {
                const auto& c = w.customers.at(e.customer_id);
                RouteCustomer rc;
                rc.id = e.customer_id;
                rc.mandatory = e.role != ListRole::moderate;
                rc.risk = e.risk;
                rc.tw_lb = c.tw_lb;
                rc.tw_ub = c.tw_ub;
                rc.rep = c.replacement_duration;
                trip.push_back(std::move(rc));
            }
        }
        trips.push_back(std::move(trip));
    }
    auto minutes = [&](const std::string& a, const std::string& b) { return provider.minutes(a, b); };
    auto kms = [&](const std::string& a, const std::string& b) { return provider.km(a, b); };
    auto graph = build_graph(trips, w.work_lb, w.work_ub, w.supernode_break, minutes, kms);
    RouteConfig rcfg;
    rcfg.time_limit_s = cfg.solver_time_limit;
    rcfg.overwork_limit = w.overwork_limit;
    return orchestrate(graph, rcfg, cfg.route_strategy);
}

/// One planning pass: complement, forecast, categorize, divide, list, route.
/// Returns the plan for the next working day after `today`.
inline DailyPlan plan_one_day(const SimWorld& sw, const detail::PlannerState& st, Day today,
                              const SimConfig& cfg) {
    const auto& w = sw.world;
    int slots_n = w.hp.plan_horizon + 1;
    auto slot_dates = detail::next_working_days(today, slots_n);
    int need_f = std::max(w.hp.n_f, date_diff(slot_dates.back(), today) + w.hp.lookback_days + 3);
    auto stage = run_forecast_stage(sw, st.readings, today, cfg, need_f);
    int horizon = date_diff(slot_dates.back(), today);
    auto assessments =
        run_risk_stage(sw, stage, today, horizon, cfg, &st.last_refill, &st.gas_at_refill);
    auto input = build_list_input(w, assessments, slot_dates, today, cfg);
    DailyPlan plan;
    plan.execute_on = slot_dates[0];
    plan.list = solve_list(w, input, cfg);
    DistanceProvider provider(w);
    plan.route = route_slot(w, plan.list, 0, input.n_trips(0), cfg, provider);
    return plan;
}

/// Rolling-horizon run: each working day executes the stored plan in the
/// morning, then plans the next working day. Consumption applies daily from
/// the ground truth; replacements refill to full capacity.
inline std::pair<MetricsReport, SimLog> run(const SimWorld& sw, const SimConfig& cfg) {
    const auto& w = sw.world;
    detail::PlannerState st;
    st.readings = w.meters;
    for (const auto& [cid, c] : w.customers) st.gas[cid] = sw.initial_gas.at(cid);

    SimLog log;
    std::map<std::int32_t, DailyPlan> pending; // keyed by execute_on ordinal

    for (int dd = 0; dd < sw.horizon_days; ++dd) {
        Day today = move_date(sw.sim_begin, dd);

        // 00:00 readings for `today` arrive.
        for (auto& [mid, s] : st.readings) {
            int idx = date_diff(today, s.start);
            while (s.size() <= idx) s.readings.push_back(std::nullopt);
            double cu = 0;
            for (Day d = s.start; d < today; d = move_date(d, 1)) cu += sw.truth_usage(mid, d);
            bool present;
            if (s.kind == MeterKind::smart) {
                // Deterministic pseudo-drop tied to the meter and date.
                std::uint64_t h = std::hash<std::string>{}(mid) * 1000003ULL +
                                  static_cast<std::uint64_t>(today.ordinal);
                h ^= h >> 33;
                h *= 0xff51afd7ed558ccdULL;
                h ^= h >> 33;
                auto cut = static_cast<std::uint64_t>(1000000 * sw.smart_missing_prob + 0.5);
                present = (h % 1000000) >= cut || dd == 0;
            } else {
                present = idx % sw.conventional_cadence == 0;
            }
            if (present) s.readings[static_cast<std::size_t>(idx)] = cu;
        }

        // Execute today's plan.
        if (auto it = pending.find(today.ordinal); it != pending.end()) {
            const auto& plan = it->second;
            PlanRecord pr;
            pr.day = today;
            pr.method = plan.route.method;
            for (const auto& tr : plan.route.trips) {
                if (tr.visits.empty()) continue;
                ++pr.trips;
                pr.duration_minutes += tr.end_time - tr.start_time;
                pr.distance_km += tr.distance_km;
                for (const auto& v : tr.visits) {
                    const auto& c = w.customers.at(v.customer_id);
                    double rate = st.gas[v.customer_id] / c.total_capacity();
                    bool window_ok = v.arrival >= c.tw_lb - 1e-9 &&
                                     v.arrival <= c.tw_ub - c.replacement_duration + 1e-9;
                    log.replacements.push_back(
                        ReplacementRecord{today, v.customer_id, rate, window_ok});
                    st.gas[v.customer_id] = c.total_capacity();
                    st.last_refill[v.customer_id] = today;
                    st.gas_at_refill[v.customer_id] = c.total_capacity();
                    pr.replacement_minutes += c.replacement_duration;
                    ++pr.visits;
                }
            }
            log.plans.push_back(pr);
            pending.erase(it);
        }

        // Plan for the next working day.
        if (detail::working_day(today)) {
            ++log.working_days;
            auto plan = plan_one_day(sw, st, today, cfg);
            pending[plan.execute_on.ordinal] = std::move(plan);
        }

        // Consumption during the day, then the run-out census.
        int out = 0;
        for (auto& [cid, gas] : st.gas) {
            for (const auto& mid : w.customers.at(cid).meters) gas -= sw.truth_usage(mid, today);
            if (gas <= 0) ++out;
        }
        log.daily_run_out.emplace_back(today, out);
    }

    return {compute_metrics(log, cfg.fail_over_threshold), log};
}

} // namespace gasplan
