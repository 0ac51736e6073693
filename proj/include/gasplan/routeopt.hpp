#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gasplan/core.hpp"
#include "gasplan/geo.hpp"
#include "gasplan/mip.hpp"

namespace gasplan {

// ---------------------------------------------------------------------------
// Routing input and graph
// ---------------------------------------------------------------------------

struct RouteCustomer {
    std::string id;
    int trip = 0;
    bool mandatory = false; // high risk or upgraded
    double risk = 0.0;
    double tw_lb = 0.0, tw_ub = 24.0 * 60.0;
    double rep = 0.0; // replacement duration, minutes
};

struct RouteGraph {
    int n_trips = 0;
    std::vector<RouteCustomer> customers;        // vertex 0..n-1
    std::vector<std::vector<int>> trip_members;  // per trip, indices into customers
    std::vector<std::vector<double>> dur;        // customer-to-customer minutes
    std::vector<double> from_depot, to_depot;    // depot legs
    std::vector<double> km_from_depot, km_to_depot;
    std::vector<std::vector<double>> km;         // customer-to-customer km
    std::vector<std::pair<int, int>> inter_edges; // directed, within a trip
    double work_lb = 0, work_ub = 0;
    double supernode_break = 0;

    int n_customers() const { return static_cast<int>(customers.size()); }
};

/// Vertices are the slot's customers plus n_trips+1 supernodes in a chain;
/// customer-to-customer arcs go from each customer to its five nearest
/// neighbors within the same trip. Supernode arcs guarantee every customer
/// at least one in- and out-arc.
template <typename DurationFn, typename KmFn>
inline RouteGraph build_graph(const std::vector<std::vector<RouteCustomer>>& trips,
                              double work_lb, double work_ub, double supernode_break,
                              DurationFn&& minutes, KmFn&& kms, int knn = 5) {
    RouteGraph g;
    g.n_trips = static_cast<int>(trips.size());
    g.work_lb = work_lb;
    g.work_ub = work_ub;
    g.supernode_break = supernode_break;
    for (int t = 0; t < g.n_trips; ++t) {
        g.trip_members.emplace_back();
        for (const auto& c : trips[static_cast<std::size_t>(t)]) {
            g.trip_members.back().push_back(g.n_customers());
            g.customers.push_back(c);
            g.customers.back().trip = t;
        }
    }
    int n = g.n_customers();
    g.dur.assign(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), 0.0));
    g.km.assign(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), 0.0));
    g.from_depot.resize(static_cast<std::size_t>(n));
    g.to_depot.resize(static_cast<std::size_t>(n));
    g.km_from_depot.resize(static_cast<std::size_t>(n));
    g.km_to_depot.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        g.from_depot[static_cast<std::size_t>(i)] = minutes("depot", g.customers[static_cast<std::size_t>(i)].id);
        g.to_depot[static_cast<std::size_t>(i)] = minutes(g.customers[static_cast<std::size_t>(i)].id, "depot");
        g.km_from_depot[static_cast<std::size_t>(i)] = kms("depot", g.customers[static_cast<std::size_t>(i)].id);
        g.km_to_depot[static_cast<std::size_t>(i)] = kms(g.customers[static_cast<std::size_t>(i)].id, "depot");
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            g.dur[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                minutes(g.customers[static_cast<std::size_t>(i)].id, g.customers[static_cast<std::size_t>(j)].id);
            g.km[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                kms(g.customers[static_cast<std::size_t>(i)].id, g.customers[static_cast<std::size_t>(j)].id);
        }
    }
    std::set<std::pair<int, int>> edges;
    for (int t = 0; t < g.n_trips; ++t) {
        const auto& members = g.trip_members[static_cast<std::size_t>(t)];
        for (int i : members) {
            std::vector<std::pair<double, int>> near;
            for (int j : members)
                if (j != i) near.emplace_back(g.dur[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], j);
            std::sort(near.begin(), near.end());
            int take = std::min<int>(knn, static_cast<int>(near.size()));
            for (int k = 0; k < take; ++k) edges.insert({i, near[static_cast<std::size_t>(k)].second});
        }
    }
    g.inter_edges.assign(edges.begin(), edges.end());
    return g;
}

// ---------------------------------------------------------------------------
// Plans and schedules
// ---------------------------------------------------------------------------

struct Visit {
    std::string customer_id;
    double arrival = 0;
    bool mandatory = false;
    double risk = 0.0;
};

struct TripRoute {
    std::vector<Visit> visits;
    double start_time = 0, end_time = 0; // depot departure and return
    double distance_km = 0;
};

struct RoutePlan {
    std::vector<TripRoute> trips;
    std::vector<std::string> served, skipped;
    double makespan = 0;
    std::string method;
};

namespace detail {

/// Earliest-arrival schedule for per-trip orders (vertex indices). Returns
/// nullopt when some window cannot be met. Trips run back to back with the
/// supernode break in between.
inline std::optional<RoutePlan> schedule(const RouteGraph& g,
                                         const std::vector<std::vector<int>>& orders,
                                         bool enforce_windows = true) {
    RoutePlan plan;
    double clock = g.work_lb;
    for (int t = 0; t < static_cast<int>(orders.size()); ++t) {
        TripRoute tr;
        tr.start_time = clock;
        double at = clock;
        int prev = -1;
        for (int v : orders[static_cast<std::size_t>(t)]) {
            const auto& c = g.customers[static_cast<std::size_t>(v)];
            double travel = prev < 0 ? g.from_depot[static_cast<std::size_t>(v)]
                                     : g.dur[static_cast<std::size_t>(prev)][static_cast<std::size_t>(v)];
            double arrive = std::max(at + travel, c.tw_lb);
            if (enforce_windows && arrive > c.tw_ub - c.rep + 1e-9) return std::nullopt;
            tr.visits.push_back(Visit{c.id, arrive, c.mandatory, c.risk});
            tr.distance_km += prev < 0 ? g.km_from_depot[static_cast<std::size_t>(v)]
                                       : g.km[static_cast<std::size_t>(prev)][static_cast<std::size_t>(v)];
            at = arrive + c.rep;
            prev = v;
            plan.served.push_back(c.id);
        }
        if (prev >= 0) {
            at += g.to_depot[static_cast<std::size_t>(prev)];
            tr.distance_km += g.km_to_depot[static_cast<std::size_t>(prev)];
        }
        tr.end_time = at;
        plan.trips.push_back(std::move(tr));
        clock = at + g.supernode_break;
    }
    plan.makespan = plan.trips.empty() ? g.work_lb : plan.trips.back().end_time;
    return plan;
}

inline void fill_skipped(RoutePlan& plan, const RouteGraph& g) {
    std::set<std::string> served(plan.served.begin(), plan.served.end());
    plan.skipped.clear();
    for (const auto& c : g.customers)
        if (!served.count(c.id)) plan.skipped.push_back(c.id);
}

} // namespace detail

/// All windows and the staff span hold under the canonical earliest schedule.
inline bool plan_fits_work_end(const RoutePlan& p, double work_ub) {
    return p.makespan <= work_ub + 1e-9;
}

// ---------------------------------------------------------------------------
// MILP models: maxDeli and minWork
// ---------------------------------------------------------------------------

namespace detail {

struct EdgeVar {
    int from, to; // vertex index, customers 0..n-1, supernode s encoded as n+s
    int var;
};

struct RouteModel {
    mip::Model model;
    std::vector<EdgeVar> edges;
    std::vector<int> tvars;
    int n = 0; // customers
};

/// Shared constraint skeleton of the two formulations. Vertices: customers
/// plus supernodes sn_0..sn_m (m = n_trips). Arcs: 5-NN within-trip pairs,
/// sn_t -> trip-t customers, trip-t customers -> sn_{t+1}, sn_t -> sn_{t+1}.
/// Order variables stay continuous; applying the printed MTZ rows to
/// supernode arcs would make full-service solutions infeasible, so they cover
/// customer-customer arcs only.
inline RouteModel build_route_model(const RouteGraph& g, const std::vector<bool>& mandatory,
                                    const std::vector<bool>& present, bool maximize_visits) {
    RouteModel rm;
    auto& m = rm.model;
    int n = g.n_customers();
    rm.n = n;
    int n_sn = g.n_trips + 1;
    double t_max = 24.0 * 60.0;

    auto sn = [&](int s) { return n + s; };

    // Edge variables.
    std::map<std::pair<int, int>, int> evar;
    auto add_edge = [&](int a, int b) {
        if (evar.count({a, b})) return;
        int v = m.add_binary("z_" + std::to_string(a) + "_" + std::to_string(b));
        evar[{a, b}] = v;
        rm.edges.push_back({a, b, v});
    };
    for (auto [a, b] : g.inter_edges)
        if (present[static_cast<std::size_t>(a)] && present[static_cast<std::size_t>(b)]) add_edge(a, b);
    for (int t = 0; t < g.n_trips; ++t) {
        for (int v : g.trip_members[static_cast<std::size_t>(t)]) {
            if (!present[static_cast<std::size_t>(v)]) continue;
            add_edge(sn(t), v);
            add_edge(v, sn(t + 1));
        }
        add_edge(sn(t), sn(t + 1)); // lets an all-optional trip stay empty
    }

    // Arrival times; customers get window-linked bounds below, supernodes the
    // staff window directly. Unvisited customers keep t = 0, so the customer
    // range is [0, work_ub].
    std::vector<int> tvar(static_cast<std::size_t>(n + n_sn), -1);
    for (int v = 0; v < n; ++v)
        if (present[static_cast<std::size_t>(v)])
            tvar[static_cast<std::size_t>(v)] = m.add_continuous("t_c" + std::to_string(v), 0.0, g.work_ub);
    for (int s = 0; s < n_sn; ++s)
        tvar[static_cast<std::size_t>(sn(s))] = m.add_continuous("t_s" + std::to_string(s), g.work_lb, g.work_ub);

    // Order variables for the MTZ rows (continuous, customers only).
    std::vector<int> uvar(static_cast<std::size_t>(n), -1);
    int total_vertices = n + n_sn;
    for (int v = 0; v < n; ++v)
        if (present[static_cast<std::size_t>(v)])
            uvar[static_cast<std::size_t>(v)] = m.add_continuous("u_" + std::to_string(v), 1.0,
                                                                 static_cast<double>(total_vertices - 1));

    auto in_edges = [&](int v) {
        std::vector<std::pair<int, double>> row;
        for (const auto& e : rm.edges)
            if (e.to == v) row.emplace_back(e.var, 1.0);
        return row;
    };
    auto out_edges = [&](int v) {
        std::vector<std::pair<int, double>> row;
        for (const auto& e : rm.edges)
            if (e.from == v) row.emplace_back(e.var, 1.0);
        return row;
    };

    // Flow conservation: optional customers (<= 1), mandatory (= 1).
    for (int v = 0; v < n; ++v) {
        if (!present[static_cast<std::size_t>(v)]) continue;
        auto in = in_edges(v), out = out_edges(v);
        auto balance = in;
        for (auto& [var, coef] : out) balance.emplace_back(var, -1.0);
        m.add_constraint(balance, mip::Sense::eq, 0.0, "flow_" + std::to_string(v));
        bool must = mandatory[static_cast<std::size_t>(v)];
        m.add_constraint(in, must ? mip::Sense::eq : mip::Sense::le, 1.0, "deg_" + std::to_string(v));
    }
    // Supernode chain: one departure from sn_0..sn_{m-1}, one arrival into
    // sn_1..sn_m.
    for (int s = 0; s < n_sn - 1; ++s)
        m.add_constraint(out_edges(sn(s)), mip::Sense::eq, 1.0, "sno_" + std::to_string(s));
    for (int s = 1; s < n_sn; ++s)
        m.add_constraint(in_edges(sn(s)), mip::Sense::eq, 1.0, "sni_" + std::to_string(s));

    // MTZ subtour elimination over customer-customer arcs.
    for (const auto& e : rm.edges) {
        if (e.from >= n || e.to >= n) continue;
        m.add_constraint({{uvar[static_cast<std::size_t>(e.from)], 1.0},
                          {uvar[static_cast<std::size_t>(e.to)], -1.0},
                          {e.var, static_cast<double>(total_vertices - 1)}},
                         mip::Sense::le, static_cast<double>(total_vertices - 2));
    }

    // Customer time windows gated by the visit indicator, and the staff
    // window likewise (an unvisited customer keeps t = 0).
    for (int v = 0; v < n; ++v) {
        if (!present[static_cast<std::size_t>(v)]) continue;
        const auto& c = g.customers[static_cast<std::size_t>(v)];
        auto in = in_edges(v);
        double lb = std::max(c.tw_lb, g.work_lb);
        double ub = std::min(c.tw_ub - c.rep, g.work_ub);
        auto lo = in;
        for (auto& [var, coef] : lo) coef = lb;
        lo.emplace_back(tvar[static_cast<std::size_t>(v)], -1.0);
        m.add_constraint(lo, mip::Sense::le, 0.0, "twl_" + std::to_string(v));
        auto hi = in;
        for (auto& [var, coef] : hi) coef = -ub;
        hi.emplace_back(tvar[static_cast<std::size_t>(v)], 1.0);
        m.add_constraint(hi, mip::Sense::le, 0.0, "twu_" + std::to_string(v));
    }

    // Time propagation along chosen arcs, and the printed span rows.
    auto rep_of = [&](int v) {
        return v < n ? g.customers[static_cast<std::size_t>(v)].rep : g.supernode_break;
    };
    auto dur_of = [&](int a, int b) {
        if (a < n && b < n) return g.dur[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
        if (a >= n && b < n) return g.from_depot[static_cast<std::size_t>(b)];
        if (a < n && b >= n) return g.to_depot[static_cast<std::size_t>(a)];
        return 0.0; // supernode to supernode
    };
    for (const auto& e : rm.edges) {
        double need = rep_of(e.from) + dur_of(e.from, e.to);
        // The tightest valid big-M: with z = 0 the row must allow
        // t_to = 0 against t_from = work_ub.
        double big_m = g.work_ub + need;
        m.add_constraint({{tvar[static_cast<std::size_t>(e.to)], 1.0},
                          {tvar[static_cast<std::size_t>(e.from)], -1.0},
                          {e.var, -(need + big_m)}},
                         mip::Sense::ge, -big_m);
        m.add_constraint({{tvar[static_cast<std::size_t>(e.from)], 1.0},
                          {tvar[static_cast<std::size_t>(e.to)], -1.0}},
                         mip::Sense::le, t_max - rep_of(e.to));
    }

    if (maximize_visits) {
        m.set_objective(mip::ObjSense::maximize);
        for (const auto& e : rm.edges) m.set_obj_coeff(e.var, 1.0);
    } else {
        m.set_objective(mip::ObjSense::minimize);
        int lambda = m.add_continuous("makespan", 0.0, 2.0 * t_max);
        m.set_obj_coeff(lambda, 1.0);
        for (int v = 0; v < n + n_sn; ++v) {
            if (tvar[static_cast<std::size_t>(v)] < 0) continue;
            m.add_constraint({{tvar[static_cast<std::size_t>(v)], 1.0}, {lambda, -1.0}},
                             mip::Sense::le, -rep_of(v));
        }
        // Telescoping the time-propagation rows along the single path:
        // the final arrival is at least the work start plus every traversed
        // service-and-travel leg. Ties the makespan to the arc variables so
        // the relaxation carries a route-length bound.
        std::vector<std::pair<int, double>> path_row{{lambda, -1.0}};
        for (const auto& e : rm.edges)
            path_row.emplace_back(e.var, rep_of(e.from) + dur_of(e.from, e.to));
        m.add_constraint(path_row, mip::Sense::le, -g.work_lb, "path_lb");
    }
    rm.tvars = tvar;
    return rm;
}

/// Reads per-trip visit orders out of a solved route model by walking the
/// supernode chain.
inline std::vector<std::vector<int>> extract_orders(const RouteGraph& g, const RouteModel& rm,
                                                    const std::vector<double>& x) {
    int n = rm.n;
    std::map<int, int> succ;
    for (const auto& e : rm.edges)
        if (x[static_cast<std::size_t>(e.var)] > 0.5) succ[e.from] = e.to;
    std::vector<std::vector<int>> orders(static_cast<std::size_t>(g.n_trips));
    int v = n; // sn_0
    int trip = 0;
    long guard = 0;
    while (trip < g.n_trips && succ.count(v)) {
        int next = succ.at(v);
        if (next >= n) {
            v = next;
            trip = next - n;
            if (trip >= g.n_trips) break;
            continue;
        }
        orders[static_cast<std::size_t>(trip)].push_back(next);
        v = next;
        if (++guard > 10000) throw Error("cycle while reading a route solution");
    }
    return orders;
}

} // namespace detail

enum class RouteSolveStatus { solved, infeasible, no_incumbent };

struct RouteSolveResult {
    RouteSolveStatus status = RouteSolveStatus::infeasible;
    RoutePlan plan;
    bool optimal = false;
};

/// maxDeli: maximize visits with mandatory customers forced, then reschedule
/// the chosen orders at earliest arrival. Overrides let the orchestrators run
/// the high-risk-only variant (present = high set, nothing mandatory).
inline RouteSolveResult solve_max_deli(const RouteGraph& g, double time_limit_s,
                                       const std::vector<bool>* mandatory_override = nullptr,
                                       const std::vector<bool>* present_override = nullptr) {
    int n = g.n_customers();
    std::vector<bool> mandatory(static_cast<std::size_t>(n)), present(static_cast<std::size_t>(n), true);
    for (int v = 0; v < n; ++v) mandatory[static_cast<std::size_t>(v)] = g.customers[static_cast<std::size_t>(v)].mandatory;
    if (mandatory_override) mandatory = *mandatory_override;
    if (present_override) present = *present_override;
    auto rm = detail::build_route_model(g, mandatory, present, /*maximize_visits=*/true);
    auto r = mip::solve_milp(rm.model, time_limit_s);
    RouteSolveResult out;
    if (r.status == mip::MilpStatus::infeasible) {
        out.status = RouteSolveStatus::infeasible;
        return out;
    }
    if (!r.has_solution()) {
        out.status = RouteSolveStatus::no_incumbent;
        return out;
    }
    auto orders = detail::extract_orders(g, rm, r.x);
    auto plan = detail::schedule(g, orders);
    if (!plan) {
        out.status = RouteSolveStatus::infeasible;
        return out;
    }
    out.status = RouteSolveStatus::solved;
    out.optimal = r.status == mip::MilpStatus::optimal;
    out.plan = std::move(*plan);
    out.plan.method = "maxDeli";
    detail::fill_skipped(out.plan, g);
    return out;
}

/// minWork: minimize the makespan while visiting exactly the given vertex
/// set.
inline RouteSolveResult solve_min_work(const RouteGraph& g, const std::vector<bool>& serve,
                                       double time_limit_s) {
    std::vector<bool> mandatory = serve, present = serve;
    auto rm = detail::build_route_model(g, mandatory, present, /*maximize_visits=*/false);
    auto r = mip::solve_milp(rm.model, time_limit_s);
    RouteSolveResult out;
    if (r.status == mip::MilpStatus::infeasible) {
        out.status = RouteSolveStatus::infeasible;
        return out;
    }
    if (!r.has_solution()) {
        out.status = RouteSolveStatus::no_incumbent;
        return out;
    }
    auto orders = detail::extract_orders(g, rm, r.x);
    auto plan = detail::schedule(g, orders);
    if (!plan) {
        out.status = RouteSolveStatus::infeasible;
        return out;
    }
    out.status = RouteSolveStatus::solved;
    out.optimal = r.status == mip::MilpStatus::optimal;
    out.plan = std::move(*plan);
    out.plan.method = "minWork";
    detail::fill_skipped(out.plan, g);
    return out;
}

// ---------------------------------------------------------------------------
// Heuristics
// ---------------------------------------------------------------------------

/// Depot-anchored tour over the given vertices: nearest-neighbor start, then
/// 2-opt until no improving move remains. Windows are ignored here.
inline std::vector<int> tsp_2opt(const RouteGraph& g, std::vector<int> vertices) {
    if (vertices.empty()) return {};
    auto leg = [&](int a, int b) {
        if (a < 0) return g.from_depot[static_cast<std::size_t>(b)];
        if (b < 0) return g.to_depot[static_cast<std::size_t>(a)];
        return g.dur[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
    };
    // Nearest-neighbor construction from the depot; ties by vertex index.
    std::vector<int> order;
    std::vector<bool> used(vertices.size(), false);
    int prev = -1;
    for (std::size_t step = 0; step < vertices.size(); ++step) {
        int best = -1;
        double best_d = 0;
        for (std::size_t i = 0; i < vertices.size(); ++i) {
            if (used[i]) continue;
            double dd = leg(prev, vertices[i]);
            if (best < 0 || dd < best_d ||
                (dd == best_d && vertices[i] < vertices[static_cast<std::size_t>(best)])) {
                best = static_cast<int>(i);
                best_d = dd;
            }
        }
        used[static_cast<std::size_t>(best)] = true;
        order.push_back(vertices[static_cast<std::size_t>(best)]);
        prev = vertices[static_cast<std::size_t>(best)];
    }
    // 2-opt: reverse segments while the closed tour (depot..depot) shortens.
    auto tour_gain = [&](const std::vector<int>& o, std::size_t i, std::size_t j) {
        int a = i == 0 ? -1 : o[i - 1];
        int b = o[i];
        int c = o[j];
        int d = j + 1 == o.size() ? -1 : o[j + 1];
        return (leg(a, b) + leg(c, d)) - (leg(a, c) + leg(b, d));
    };
    bool improved = true;
    while (improved) {
        improved = false;
        double best_gain = 1e-9;
        std::size_t bi = 0, bj = 0;
        for (std::size_t i = 0; i < order.size(); ++i)
            for (std::size_t j = i + 1; j < order.size(); ++j) {
                double gain = tour_gain(order, i, j);
                if (gain > best_gain) {
                    best_gain = gain;
                    bi = i;
                    bj = j;
                    improved = true;
                }
            }
        if (improved) std::reverse(order.begin() + static_cast<std::ptrdiff_t>(bi),
                                   order.begin() + static_cast<std::ptrdiff_t>(bj) + 1);
    }
    return order;
}

/// 2-opt per trip over a vertex filter; windows not enforced (callers check
/// the schedule afterwards).
inline std::vector<std::vector<int>> tsp_orders(const RouteGraph& g,
                                                const std::vector<bool>& include) {
    std::vector<std::vector<int>> orders(static_cast<std::size_t>(g.n_trips));
    for (int t = 0; t < g.n_trips; ++t) {
        std::vector<int> vs;
        for (int v : g.trip_members[static_cast<std::size_t>(t)])
            if (include[static_cast<std::size_t>(v)]) vs.push_back(v);
        orders[static_cast<std::size_t>(t)] = tsp_2opt(g, std::move(vs));
    }
    return orders;
}

struct TsptwResult {
    std::vector<std::vector<int>> orders;
    std::vector<int> unplaceable;
};

namespace detail {

/// Feasibility of one trip's order given a start clock; returns the end time.
inline std::optional<double> trip_end_time(const RouteGraph& g, const std::vector<int>& order,
                                           double start) {
    double at = start;
    int prev = -1;
    for (int v : order) {
        const auto& c = g.customers[static_cast<std::size_t>(v)];
        double travel = prev < 0 ? g.from_depot[static_cast<std::size_t>(v)]
                                 : g.dur[static_cast<std::size_t>(prev)][static_cast<std::size_t>(v)];
        double arrive = std::max(at + travel, c.tw_lb);
        if (arrive > c.tw_ub - c.rep + 1e-9) return std::nullopt;
        at = arrive + c.rep;
        prev = v;
    }
    if (prev >= 0) at += g.to_depot[static_cast<std::size_t>(prev)];
    return at;
}

} // namespace detail

/// Cheapest-feasible-insertion construction per trip plus window-respecting
/// 2-opt improvement. Customers with no feasible slot anywhere in their trip
/// are reported unplaceable rather than thrown.
inline TsptwResult tsptw_insertion(const RouteGraph& g, const std::vector<bool>& include) {
    TsptwResult res;
    res.orders.resize(static_cast<std::size_t>(g.n_trips));
    double clock = g.work_lb;
    for (int t = 0; t < g.n_trips; ++t) {
        auto& order = res.orders[static_cast<std::size_t>(t)];
        std::vector<int> pending;
        for (int v : g.trip_members[static_cast<std::size_t>(t)])
            if (include[static_cast<std::size_t>(v)]) pending.push_back(v);
        // Tight windows first so they are placed while there is room.
        std::sort(pending.begin(), pending.end(), [&](int a, int b) {
            const auto& ca = g.customers[static_cast<std::size_t>(a)];
            const auto& cb = g.customers[static_cast<std::size_t>(b)];
            if (ca.tw_ub != cb.tw_ub) return ca.tw_ub < cb.tw_ub;
            return a < b;
        });
        for (int v : pending) {
            double best_end = 0;
            int best_pos = -1;
            for (std::size_t pos = 0; pos <= order.size(); ++pos) {
                auto attempt = order;
                attempt.insert(attempt.begin() + static_cast<std::ptrdiff_t>(pos), v);
                auto end = detail::trip_end_time(g, attempt, clock);
                if (!end) continue;
                if (best_pos < 0 || *end < best_end) {
                    best_end = *end;
                    best_pos = static_cast<int>(pos);
                }
            }
            if (best_pos < 0) {
                res.unplaceable.push_back(v);
            } else {
                order.insert(order.begin() + best_pos, v);
            }
        }
        // Window-respecting 2-opt.
        bool improved = true;
        auto cur_end = detail::trip_end_time(g, order, clock);
        while (improved && cur_end) {
            improved = false;
            for (std::size_t i = 0; i < order.size() && !improved; ++i)
                for (std::size_t j = i + 1; j < order.size() && !improved; ++j) {
                    auto attempt = order;
                    std::reverse(attempt.begin() + static_cast<std::ptrdiff_t>(i),
                                 attempt.begin() + static_cast<std::ptrdiff_t>(j) + 1);
                    auto end = detail::trip_end_time(g, attempt, clock);
                    if (end && *end < *cur_end - 1e-9) {
                        order = std::move(attempt);
                        cur_end = end;
                        improved = true;
                    }
                }
        }
        if (cur_end) clock = *cur_end + g.supernode_break;
    }
    return res;
}

/// Drops the optional visit whose removal saves the most makespan until the
/// plan finishes by t_limit. Mandatory visits stay; throws when they alone
/// still overrun.
inline std::vector<std::vector<int>> modify_route(const RouteGraph& g,
                                                  std::vector<std::vector<int>> orders,
                                                  double t_limit) {
    auto end_of = [&](const std::vector<std::vector<int>>& os) {
        auto plan = detail::schedule(g, os);
        return plan ? plan->makespan : std::numeric_limits<double>::infinity();
    };
    double cur = end_of(orders);
    while (cur > t_limit + 1e-9) {
        double best_end = cur;
        int best_trip = -1, best_pos = -1;
        for (int t = 0; t < static_cast<int>(orders.size()); ++t)
            for (int pos = 0; pos < static_cast<int>(orders[static_cast<std::size_t>(t)].size()); ++pos) {
                int v = orders[static_cast<std::size_t>(t)][static_cast<std::size_t>(pos)];
                if (g.customers[static_cast<std::size_t>(v)].mandatory) continue;
                auto attempt = orders;
                auto& vec = attempt[static_cast<std::size_t>(t)];
                vec.erase(vec.begin() + pos);
                double end = end_of(attempt);
                if (end < best_end - 1e-9) {
                    best_end = end;
                    best_trip = t;
                    best_pos = pos;
                }
            }
        if (best_trip < 0)
            throw CannotSatisfyError("only mandatory visits remain but the plan still overruns");
        auto& vec = orders[static_cast<std::size_t>(best_trip)];
        vec.erase(vec.begin() + best_pos);
        cur = best_end;
    }
    return orders;
}

/// Greedy fallback: mandatory visits first in descending risk via cheapest
/// feasible insertion, a 2-opt pass, then optional customers likewise while
/// the work window holds. Always returns a window-feasible plan; customers
/// that fit nowhere are skipped.
inline RoutePlan squeeze_greedy(const RouteGraph& g) {
    std::vector<std::vector<int>> orders(static_cast<std::size_t>(g.n_trips));
    auto try_insert = [&](int trip, int v) {
        // Re-derive trip start times for the attempt.
        auto feasible_plan = [&](const std::vector<std::vector<int>>& os) -> std::optional<double> {
            auto plan = detail::schedule(g, os);
            if (!plan) return std::nullopt;
            if (!plan_fits_work_end(*plan, g.work_ub)) return std::nullopt;
            return plan->makespan;
        };
        double best = 0;
        int best_pos = -1;
        for (std::size_t pos = 0; pos <= orders[static_cast<std::size_t>(trip)].size(); ++pos) {
            auto attempt = orders;
            auto& vec = attempt[static_cast<std::size_t>(trip)];
            vec.insert(vec.begin() + static_cast<std::ptrdiff_t>(pos), v);
            auto end = feasible_plan(attempt);
            if (end && (best_pos < 0 || *end < best)) {
                best = *end;
                best_pos = static_cast<int>(pos);
            }
        }
        if (best_pos < 0) return false;
        auto& vec = orders[static_cast<std::size_t>(trip)];
        vec.insert(vec.begin() + best_pos, v);
        return true;
    };
    auto by_risk_desc = [&](std::vector<int> vs) {
        std::sort(vs.begin(), vs.end(), [&](int a, int b) {
            const auto& ca = g.customers[static_cast<std::size_t>(a)];
            const auto& cb = g.customers[static_cast<std::size_t>(b)];
            if (ca.risk != cb.risk) return ca.risk > cb.risk;
            return ca.id < cb.id;
        });
        return vs;
    };
    for (int pass = 0; pass < 2; ++pass) {
        bool want_mandatory = pass == 0;
        for (int t = 0; t < g.n_trips; ++t) {
            std::vector<int> vs;
            for (int v : g.trip_members[static_cast<std::size_t>(t)])
                if (g.customers[static_cast<std::size_t>(v)].mandatory == want_mandatory) vs.push_back(v);
            for (int v : by_risk_desc(vs)) try_insert(t, v);
        }
    }
    auto plan = detail::schedule(g, orders);
    // The insertion loop only accepted window-feasible placements.
    RoutePlan out = plan ? std::move(*plan) : RoutePlan{};
    out.method = "squeeze";
    detail::fill_skipped(out, g);
    return out;
}

// ---------------------------------------------------------------------------
// Orchestrators
// ---------------------------------------------------------------------------

struct RouteConfig {
    double time_limit_s = 1800.0;
    double overwork_limit = 0.0; // 0 -> work_ub + 60
};

namespace detail {

inline double overwork_of(const RouteGraph& g, const RouteConfig& cfg) {
    return cfg.overwork_limit > 0 ? cfg.overwork_limit : g.work_ub + 60.0;
}

inline std::vector<bool> mandatory_mask(const RouteGraph& g) {
    std::vector<bool> m(static_cast<std::size_t>(g.n_customers()));
    for (int v = 0; v < g.n_customers(); ++v) m[static_cast<std::size_t>(v)] = g.customers[static_cast<std::size_t>(v)].mandatory;
    return m;
}

inline std::vector<bool> served_mask(const RouteGraph& g, const RoutePlan& plan) {
    std::set<std::string> served(plan.served.begin(), plan.served.end());
    std::vector<bool> m(static_cast<std::size_t>(g.n_customers()));
    for (int v = 0; v < g.n_customers(); ++v)
        m[static_cast<std::size_t>(v)] = served.count(g.customers[static_cast<std::size_t>(v)].id) > 0;
    return m;
}

/// Shared tail of both flowcharts: minWork over the high-risk set, then the
/// 2-opt route, then maxDeli with the high-risk customers optional, then the
/// squeeze fallback. Total by construction.
inline RoutePlan high_only_chain(const RouteGraph& g, const RouteConfig& cfg) {
    auto mand = mandatory_mask(g);
    auto mw = solve_min_work(g, mand, cfg.time_limit_s);
    if (mw.status == RouteSolveStatus::solved) {
        mw.plan.method = "minWork(high)";
        return mw.plan;
    }
    auto orders = tsp_orders(g, mand);
    if (auto plan = schedule(g, orders); plan && plan_fits_work_end(*plan, g.work_ub)) {
        plan->method = "2opt(high)";
        fill_skipped(*plan, g);
        return *plan;
    }
    // maxDeli restricted to the high-risk customers, none of them forced.
    std::vector<bool> none(static_cast<std::size_t>(g.n_customers()), false);
    auto md = solve_max_deli(g, cfg.time_limit_s, &none, &mand);
    if (md.status == RouteSolveStatus::solved) {
        md.plan.method = "maxDeli(high-only)";
        return md.plan;
    }
    return squeeze_greedy(g);
}

} // namespace detail

/// IP-based flow: a 2-opt route over the high-risk customers decides which
/// model to solve; the main path is maxDeli followed by minWork over the
/// served set; every failure edge lands in the high-only chain and finally in
/// the squeeze fallback, so a plan always comes back.
inline RoutePlan orchestrate_ip(const RouteGraph& g, const RouteConfig& cfg) {
    double overwork = detail::overwork_of(g, cfg);
    auto mand = detail::mandatory_mask(g);
    bool any_optional = false;
    for (int v = 0; v < g.n_customers(); ++v)
        if (!mand[static_cast<std::size_t>(v)]) any_optional = true;

    auto probe_orders = tsp_orders(g, mand);
    auto probe = detail::schedule(g, probe_orders, /*enforce_windows=*/false);
    double last_arrival = probe ? probe->makespan : std::numeric_limits<double>::infinity();

    if (last_arrival < g.work_ub && any_optional) {
        auto md = solve_max_deli(g, cfg.time_limit_s);
        if (md.status == RouteSolveStatus::solved) {
            auto serve = detail::served_mask(g, md.plan);
            auto mw = solve_min_work(g, serve, cfg.time_limit_s);
            if (mw.status == RouteSolveStatus::solved) {
                mw.plan.method = "maxDeli+minWork";
                return mw.plan;
            }
            md.plan.method = "maxDeli";
            return md.plan; // minWork failed; the maxDeli schedule is valid
        }
        return detail::high_only_chain(g, cfg);
    }
    if (last_arrival < overwork || !any_optional) {
        // Between work end and the overwork limit: compress the high-risk set.
        return detail::high_only_chain(g, cfg);
    }
    // Beyond the overwork limit: give up on serving every high-risk customer.
    std::vector<bool> none(static_cast<std::size_t>(g.n_customers()), false);
    auto md = solve_max_deli(g, cfg.time_limit_s, &none, &mand);
    if (md.status == RouteSolveStatus::solved) {
        md.plan.method = "maxDeli(high-only)";
        return md.plan;
    }
    return squeeze_greedy(g);
}

/// TSP-based flow: a TSPTW route over everyone; within work hours it is the
/// answer, a moderate overrun is trimmed by modify and re-compressed, and a
/// heavy overrun falls back to maxDeli. Mandatory customers the TSPTW cannot
/// place divert to the high-only chain.
inline RoutePlan orchestrate_tsp(const RouteGraph& g, const RouteConfig& cfg) {
    double overwork = detail::overwork_of(g, cfg);
    std::vector<bool> all(static_cast<std::size_t>(g.n_customers()), true);
    auto tw = tsptw_insertion(g, all);
    for (int v : tw.unplaceable)
        if (g.customers[static_cast<std::size_t>(v)].mandatory) return detail::high_only_chain(g, cfg);

    auto plan = detail::schedule(g, tw.orders);
    if (!plan) return detail::high_only_chain(g, cfg);
    double last_arrival = plan->makespan;

    if (last_arrival <= g.work_ub) {
        // modify is a no-op here.
        plan->method = "tsptw";
        detail::fill_skipped(*plan, g);
        return *plan;
    }
    if (last_arrival <= overwork) {
        try {
            auto trimmed = modify_route(g, tw.orders, g.work_ub);
            auto tplan = detail::schedule(g, trimmed);
            if (tplan) {
                auto serve = detail::served_mask(g, *tplan);
                auto mw = solve_min_work(g, serve, cfg.time_limit_s);
                if (mw.status == RouteSolveStatus::solved) {
                    mw.plan.method = "modify+minWork";
                    return mw.plan;
                }
                tplan->method = "modify";
                detail::fill_skipped(*tplan, g);
                return *tplan;
            }
        } catch (const CannotSatisfyError&) {
            // fall through to the high-only chain
        }
        return detail::high_only_chain(g, cfg);
    }
    auto md = solve_max_deli(g, cfg.time_limit_s);
    if (md.status == RouteSolveStatus::solved) {
        auto serve = detail::served_mask(g, md.plan);
        auto mw = solve_min_work(g, serve, cfg.time_limit_s);
        if (mw.status == RouteSolveStatus::solved) {
            mw.plan.method = "maxDeli+minWork";
            return mw.plan;
        }
        md.plan.method = "maxDeli";
        return md.plan;
    }
    return detail::high_only_chain(g, cfg);
}

enum class RouteStrategy { ip, tsp };

inline RoutePlan orchestrate(const RouteGraph& g, const RouteConfig& cfg, RouteStrategy strategy) {
    return strategy == RouteStrategy::ip ? orchestrate_ip(g, cfg) : orchestrate_tsp(g, cfg);
}

} // namespace gasplan
