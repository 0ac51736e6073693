// gasplan: cylinder replacement planning pipeline.
//
// Subcommands map to the pipeline stages: complement, forecast, risk,
// plan-list, plan-route, simulate, metrics, fit-space-line. All file formats
// are documented in the README; every run is deterministic for fixed inputs.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "gasplan/io.hpp"

using namespace gasplan;
using nlohmann::json;

namespace {

int log_level() {
    const char* env = std::getenv("PLANNER_LOG");
    if (!env) return 0;
    std::string v = env;
    if (v == "debug" || v == "2") return 2;
    if (v == "0" || v == "off" || v.empty()) return 0;
    return 1;
}

void info(const std::string& msg) {
    if (log_level() >= 1) std::cerr << "[gasplan] " << msg << "\n";
}

ListModel parse_list_model(const std::string& s) {
    if (s == "multibb") return ListModel::multibb;
    if (s == "minbb") return ListModel::minbb;
    if (s == "maxrisk") return ListModel::maxrisk;
    if (s == "greedy") return ListModel::greedy;
    throw ValidationError("unknown list model: " + s);
}

RouteStrategy parse_strategy(const std::string& s) {
    if (s == "ip") return RouteStrategy::ip;
    if (s == "tsp") return RouteStrategy::tsp;
    throw ValidationError("unknown route strategy: " + s);
}

TripAlgorithm parse_trip_algorithm(const std::string& s) {
    if (s == "next_fit") return TripAlgorithm::next_fit;
    if (s == "fava") return TripAlgorithm::fava;
    throw ValidationError("unknown trip algorithm: " + s);
}

ComplementAlgorithm parse_complement_algorithm(const std::string& s) {
    if (s == "linear") return ComplementAlgorithm::linear;
    if (s == "periodic") return ComplementAlgorithm::periodic;
    if (s == "similar") return ComplementAlgorithm::similar;
    if (s == "knn") return ComplementAlgorithm::knn;
    throw ValidationError("unknown complement algorithm: " + s);
}

struct CliOptions {
    SimConfig sim;
    std::string list_model = "multibb";
    std::string route_strategy = "tsp";
    std::string trip_algorithm = "fava";
    std::string smart_complement = "linear";
    double fail_over_threshold = 0.15;

    void finalize() {
        sim.list_model = parse_list_model(list_model);
        sim.route_strategy = parse_strategy(route_strategy);
        sim.trip_algorithm = parse_trip_algorithm(trip_algorithm);
        sim.smart_complement = parse_complement_algorithm(smart_complement);
        sim.fail_over_threshold = fail_over_threshold;
    }
};

/// One JSON config document; command-line flags override its values.
void apply_config_file(const std::string& path, CliOptions& opt, Hyperparams* hp) {
    auto j = io::load_json_file(path);
    static const std::set<std::string> known{
        "list_model", "route_strategy", "trip_algorithm", "smart_complement",
        "solver_time_limit", "fail_over_threshold", "lb", "ellipse_kappa", "ellipse_k",
        "oracle_forecast", "hyperparams", "availability_search_bound"};
    for (const auto& [key, value] : j.items())
        if (!known.count(key)) throw ValidationError("unknown config key: " + key);
    opt.list_model = j.value("list_model", opt.list_model);
    opt.route_strategy = j.value("route_strategy", opt.route_strategy);
    opt.trip_algorithm = j.value("trip_algorithm", opt.trip_algorithm);
    opt.smart_complement = j.value("smart_complement", opt.smart_complement);
    opt.sim.solver_time_limit = j.value("solver_time_limit", opt.sim.solver_time_limit);
    opt.fail_over_threshold = j.value("fail_over_threshold", opt.fail_over_threshold);
    opt.sim.lb = j.value("lb", opt.sim.lb);
    opt.sim.ellipse_kappa = j.value("ellipse_kappa", opt.sim.ellipse_kappa);
    opt.sim.ellipse_k = j.value("ellipse_k", opt.sim.ellipse_k);
    opt.sim.oracle_forecast = j.value("oracle_forecast", opt.sim.oracle_forecast);
    opt.sim.availability_search_bound =
        j.value("availability_search_bound", opt.sim.availability_search_bound);
    if (hp && j.count("hyperparams")) {
        const auto& h = j.at("hyperparams");
        hp->alpha_high = h.value("alpha_high", hp->alpha_high);
        hp->q_high = h.value("q_high", hp->q_high);
        hp->alpha_mdr = h.value("alpha_mdr", hp->alpha_mdr);
        hp->q_mdr = h.value("q_mdr", hp->q_mdr);
        hp->lookback_days = h.value("lookback_days", hp->lookback_days);
        hp->plan_horizon = h.value("plan_horizon", hp->plan_horizon);
        hp->n_p = h.value("n_p", hp->n_p);
        hp->n_s = h.value("n_s", hp->n_s);
        hp->n_f = h.value("n_f", hp->n_f);
        hp->k = h.value("k", hp->k);
    }
}

SimWorld shim_world(World w) {
    SimWorld sw;
    sw.world = std::move(w);
    return sw;
}

void write_output(const std::string& path, const json& j) {
    if (path.empty() || path == "-") {
        std::cout << j.dump(2) << "\n";
    } else {
        io::save_json_file(path, j);
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"gasplan: cylinder replacement planning toolkit"};
    app.require_subcommand(1);

    CliOptions opt;
    std::string config_path, dump_model;
    app.add_option("--config", config_path, "JSON config file; flags override its values");
    app.add_option("--dump-model", dump_model, "append every MILP in LP-style text to this file");

    // --- complement ---------------------------------------------------------
    auto* c_cmd = app.add_subcommand("complement", "fill missing cumulative readings");
    std::string c_readings, c_out, c_world, c_date;
    c_cmd->add_option("--readings", c_readings, "meter readings CSV")->required();
    c_cmd->add_option("--out", c_out, "output CSV (default stdout)");
    c_cmd->add_option("--world", c_world, "world JSON supplying meter kinds");
    c_cmd->add_option("--date", c_date, "treat this date as today (default: last reading)");
    c_cmd->add_option("--algorithm", opt.smart_complement,
                      "smart-meter algorithm: linear|periodic|similar|knn");

    // --- forecast ------------------------------------------------------------
    auto* f_cmd = app.add_subcommand("forecast", "per-meter demand forecast");
    std::string f_world, f_out, f_date;
    int f_horizon = 9;
    f_cmd->add_option("--world", f_world, "world JSON")->required();
    f_cmd->add_option("--horizon", f_horizon, "forecast days n_f");
    f_cmd->add_option("--date", f_date, "forecast start date (default: day after last reading)");
    f_cmd->add_option("--out", f_out, "output JSON (default stdout)");

    // --- risk ----------------------------------------------------------------
    auto* r_cmd = app.add_subcommand("risk", "per-customer shortage probabilities");
    std::string r_world, r_out, r_date, r_customers, r_readings;
    int r_horizon = 4;
    r_cmd->add_option("--world", r_world, "world JSON");
    r_cmd->add_option("--customers", r_customers, "customers JSON array (with --readings)");
    r_cmd->add_option("--readings", r_readings, "meter readings CSV (with --customers)");
    r_cmd->add_option("--date", r_date, "planning date (default: day after last reading)");
    r_cmd->add_option("--horizon", r_horizon, "days after the planning date to assess");
    r_cmd->add_option("--availability-bound", opt.sim.availability_search_bound,
                      "availability search bound in days");
    r_cmd->add_option("--out", r_out, "output JSON (default stdout)");

    // --- plan-list -----------------------------------------------------------
    auto* l_cmd = app.add_subcommand("plan-list", "customer list for replacement");
    std::string l_world, l_out, l_date, l_customers, l_readings;
    l_cmd->add_option("--world", l_world, "world JSON");
    l_cmd->add_option("--customers", l_customers, "customers JSON array (with --readings)");
    l_cmd->add_option("--readings", l_readings, "meter readings CSV (with --customers)");
    l_cmd->add_option("--date", l_date, "planning date (default: day after last reading)");
    l_cmd->add_option("--model", opt.list_model, "multibb|minbb|maxrisk|greedy");
    l_cmd->add_option("--lb", opt.sim.lb, "per-trip delivery lower bound (-1: auto)");
    l_cmd->add_option("--time-limit", opt.sim.solver_time_limit, "MILP time limit seconds");
    l_cmd->add_option("--trip-algorithm", opt.trip_algorithm, "next_fit|fava");
    l_cmd->add_option("--ellipse-kappa", opt.sim.ellipse_kappa, "maxRisk ellipse size factor");
    l_cmd->add_option("--ellipse-k", opt.sim.ellipse_k, "maxRisk high-risk neighbor count");
    l_cmd->add_option("--out", l_out, "output JSON (default stdout)");

    // --- plan-route ----------------------------------------------------------
    auto* p_cmd = app.add_subcommand("plan-route", "visit order for a delivery list");
    std::string p_world, p_list, p_out, p_matrix;
    int p_slot = 0;
    p_cmd->add_option("--world", p_world, "world JSON")->required();
    p_cmd->add_option("--list", p_list, "delivery list JSON from plan-list")->required();
    p_cmd->add_option("--strategy", opt.route_strategy, "ip|tsp");
    p_cmd->add_option("--slot", p_slot, "which slot of the list to route");
    p_cmd->add_option("--matrix", p_matrix, "optional distance/duration matrix CSV");
    p_cmd->add_option("--time-limit", opt.sim.solver_time_limit, "MILP time limit seconds");
    p_cmd->add_option("--out", p_out, "output JSON (default stdout)");

    // --- simulate --------------------------------------------------------------
    auto* s_cmd = app.add_subcommand("simulate", "rolling-horizon synthetic experiment");
    std::string s_scenario, s_out, s_log, s_world_out;
    s_cmd->add_option("--scenario", s_scenario, "scenario spec JSON")->required();
    s_cmd->add_option("--out", s_out, "metrics report JSON (default stdout)");
    s_cmd->add_option("--log", s_log, "plan log JSONL output");
    s_cmd->add_option("--world-out", s_world_out, "write the generated world JSON");
    s_cmd->add_option("--list-model", opt.list_model, "multibb|minbb|maxrisk|greedy");
    s_cmd->add_option("--route-strategy", opt.route_strategy, "ip|tsp");
    s_cmd->add_option("--trip-algorithm", opt.trip_algorithm, "next_fit|fava");
    s_cmd->add_option("--time-limit", opt.sim.solver_time_limit, "MILP time limit seconds");
    s_cmd->add_flag("--oracle-forecast", opt.sim.oracle_forecast,
                    "forecast the ground truth with zero variance");

    // --- metrics ---------------------------------------------------------------
    auto* m_cmd = app.add_subcommand("metrics", "evaluation metrics from a plan log");
    std::string m_log, m_out;
    m_cmd->add_option("--log", m_log, "plan log JSONL")->required();
    m_cmd->add_option("--threshold", opt.fail_over_threshold, "fail-over rate threshold");
    m_cmd->add_option("--out", m_out, "output JSON (default stdout)");

    // --- fit-space-line ----------------------------------------------------------
    auto* t_cmd = app.add_subcommand("fit-space-line", "fit the cylinder space table line");
    std::string t_world;
    t_cmd->add_option("--world", t_world, "world JSON with the truck table (default: desk table)");

    CLI11_PARSE(app, argc, argv);

    try {
        Hyperparams config_hp;
        bool have_config = !config_path.empty();
        if (have_config) apply_config_file(config_path, opt, &config_hp);
        opt.finalize();
        if (!dump_model.empty()) mip::dump_model_path() = dump_model;

        auto load_world = [&](const std::string& path) {
            auto w = io::world_from_json(io::load_json_file(path));
            if (have_config) w.hp = config_hp;
            return w;
        };
        // Assembles a world from the plain customers-array and readings-CSV
        // formats, with a default truck and staff window.
        auto assemble_world = [&](const std::string& customers_path,
                                  const std::string& readings_path) {
            World w;
            for (const auto& cj : io::load_json_file(customers_path)) {
                auto c = io::customer_from_json(cj);
                w.customers.emplace(c.customer_id, std::move(c));
            }
            std::ifstream in(readings_path);
            if (!in) throw ParseError("cannot open " + readings_path);
            w.meters = io::series_from_rows(io::read_readings_csv(in));
            if (!w.customers.empty()) {
                double lon = 0, lat = 0;
                for (const auto& [id, c] : w.customers) {
                    lon += c.lon;
                    lat += c.lat;
                }
                w.depot.lon = lon / static_cast<double>(w.customers.size());
                w.depot.lat = lat / static_cast<double>(w.customers.size());
            }
            w.truck.space_table = default_space_table();
            fit_truck_line(w.truck);
            if (have_config) w.hp = config_hp;
            w.validate();
            return w;
        };
        auto world_of = [&](const std::string& world_path, const std::string& customers_path,
                            const std::string& readings_path) {
            if (!world_path.empty()) return load_world(world_path);
            if (customers_path.empty() || readings_path.empty())
                throw ValidationError("provide either --world or both --customers and --readings");
            return assemble_world(customers_path, readings_path);
        };
        auto last_reading_day = [](const std::map<std::string, MeterSeries>& meters) {
            Day last{0};
            for (const auto& [id, s] : meters)
                for (int i = s.size() - 1; i >= 0; --i)
                    if (s.readings[static_cast<std::size_t>(i)]) {
                        last = std::max(last, s.day_at(i));
                        break;
                    }
            return last;
        };

        if (*c_cmd) {
            std::ifstream in(c_readings);
            if (!in) throw ParseError("cannot open " + c_readings);
            auto rows = io::read_readings_csv(in);
            std::map<std::string, MeterKind> kinds;
            if (!c_world.empty()) {
                auto w = load_world(c_world);
                for (const auto& [mid, s] : w.meters) kinds[mid] = s.kind;
            }
            auto series = io::series_from_rows(rows, kinds.empty() ? nullptr : &kinds);
            Day today = c_date.empty() ? last_reading_day(series) : day_from_iso(c_date);
            ComplementConfig ccfg;
            ccfg.smart_algorithm = parse_complement_algorithm(opt.smart_complement);
            auto out = complement_all(series, ccfg, today);
            info("complemented " + std::to_string(out.size()) + " meters");
            std::map<std::string, MeterSeries> filled;
            std::map<std::string, std::vector<Provenance>> prov;
            for (const auto& [id, cm] : out) {
                filled[id] = cm.series;
                prov[id] = cm.reading_prov;
            }
            if (c_out.empty()) {
                io::write_readings_csv(std::cout, filled, &prov);
            } else {
                std::ofstream os(c_out);
                if (!os) throw ParseError("cannot open " + c_out + " for writing");
                io::write_readings_csv(os, filled, &prov);
            }
        } else if (*f_cmd) {
            auto w = load_world(f_world);
            Day today = f_date.empty() ? move_date(last_reading_day(w.meters), 0) : day_from_iso(f_date);
            auto sw = shim_world(w);
            SimConfig scfg = opt.sim;
            scfg.oracle_forecast = false;
            auto stage = run_forecast_stage(sw, sw.world.meters, today, scfg, f_horizon);
            json out = json::array();
            for (const auto& [mid, f] : stage.forecasts) out.push_back(io::forecast_to_json(f));
            write_output(f_out, out);
        } else if (*r_cmd) {
            auto w = world_of(r_world, r_customers, r_readings);
            Day today = r_date.empty() ? last_reading_day(w.meters) : day_from_iso(r_date);
            auto sw = shim_world(w);
            SimConfig scfg = opt.sim;
            scfg.oracle_forecast = false;
            int need_f = std::max(sw.world.hp.n_f, r_horizon + sw.world.hp.lookback_days + 3);
            auto stage = run_forecast_stage(sw, sw.world.meters, today, scfg, need_f);
            auto assessments = run_risk_stage(sw, stage, today, r_horizon, scfg);
            json out = json::array();
            for (const auto& [cid, a] : assessments)
                for (const auto& row : io::risk_rows_json(a)) out.push_back(row);
            write_output(r_out, out);
        } else if (*l_cmd) {
            auto w = world_of(l_world, l_customers, l_readings);
            Day today = l_date.empty() ? last_reading_day(w.meters) : day_from_iso(l_date);
            auto sw = shim_world(w);
            SimConfig scfg = opt.sim;
            scfg.oracle_forecast = false;
            auto slot_dates = detail::next_working_days(today, w.hp.plan_horizon + 1);
            int need_f = std::max(w.hp.n_f, date_diff(slot_dates.back(), today) + w.hp.lookback_days + 3);
            auto stage = run_forecast_stage(sw, sw.world.meters, today, scfg, need_f);
            int horizon = date_diff(slot_dates.back(), today);
            auto assessments = run_risk_stage(sw, stage, today, horizon, scfg);
            auto input = build_list_input(w, assessments, slot_dates, today, scfg);
            auto list = solve_list(w, input, scfg);
            list.base_day = today;
            info("planned " + std::to_string(list.assignments.size()) + " trip slots");
            write_output(l_out, io::delivery_list_to_json(list));
        } else if (*p_cmd) {
            auto w = load_world(p_world);
            auto list = io::delivery_list_from_json(io::load_json_file(p_list));
            DistanceProvider provider(w);
            if (!p_matrix.empty()) {
                std::ifstream in(p_matrix);
                if (!in) throw ParseError("cannot open " + p_matrix);
                io::load_matrix_csv(in, provider);
            }
            int n_trips = 1;
            for (const auto& [st, entries] : list.assignments)
                if (st.first == p_slot) n_trips = std::max(n_trips, st.second + 1);
            SimConfig scfg = opt.sim;
            auto plan = route_slot(w, list, p_slot, n_trips, scfg, provider);
            write_output(p_out, io::route_plan_to_json(plan));
        } else if (*s_cmd) {
            auto spec = io::scenario_from_json(io::load_json_file(s_scenario));
            if (have_config) spec.hp = config_hp;
            auto sw = generate(spec);
            if (!s_world_out.empty()) io::save_json_file(s_world_out, io::world_to_json(sw.world));
            info("simulating " + std::to_string(spec.horizon_days) + " days, " +
                 std::to_string(spec.n_customers) + " customers");
            auto [report, log] = run(sw, opt.sim);
            if (!s_log.empty()) {
                std::ofstream os(s_log);
                if (!os) throw ParseError("cannot open " + s_log + " for writing");
                io::log_to_jsonl(os, log);
            }
            write_output(s_out, io::metrics_to_json(report));
        } else if (*m_cmd) {
            std::ifstream in(m_log);
            if (!in) throw ParseError("cannot open " + m_log);
            auto log = io::log_from_jsonl(in);
            auto report = compute_metrics(log, opt.fail_over_threshold);
            write_output(m_out, io::metrics_to_json(report));
        } else if (*t_cmd) {
            TruckSpec truck;
            truck.space_table = default_space_table();
            if (!t_world.empty()) truck = load_world(t_world).truck;
            auto fit = fit_space_line(truck.space_table, truck.epsilon, true);
            json out{{"a", fit.a}, {"b", fit.b}, {"missed_points", fit.missed_points}};
            std::cout << out.dump(2) << "\n";
        }
    } catch (const Error& e) {
        json err{{"error", "planning_error"}, {"message", e.what()}};
        if (dynamic_cast<const ParseError*>(&e)) err["error"] = "parse_error";
        if (dynamic_cast<const ValidationError*>(&e)) err["error"] = "validation_error";
        std::cerr << err.dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        json err{{"error", "internal_error"}, {"message", e.what()}};
        std::cerr << err.dump() << "\n";
        return 2;
    }
    return 0;
}
