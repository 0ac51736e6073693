#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gasplan/capacity.hpp"
#include "gasplan/core.hpp"
#include "gasplan/mip.hpp"
#include "gasplan/tripdiv.hpp"

namespace gasplan {

enum class ListRole { high, moderate_upgraded_high, moderate };

inline const char* to_string(ListRole r) {
    switch (r) {
        case ListRole::high: return "high";
        case ListRole::moderate_upgraded_high: return "moderate_upgraded_high";
        case ListRole::moderate: return "moderate";
    }
    return "?";
}

struct DeliveryEntry {
    std::string customer_id;
    ListRole role = ListRole::moderate;
    double risk = 0.0;
};

/// Customer list for replacement: slot s is the s-th candidate delivery date,
/// each holding per-trip entries. Every trip set passes check_load and each
/// customer appears in at most one (slot, trip).
struct DeliveryList {
    Day base_day{};
    std::vector<Day> slot_dates;
    std::map<std::pair<int, int>, std::vector<DeliveryEntry>> assignments;
    bool optimal = true;
    double objective = 0.0;

    std::vector<DeliveryEntry>& at(int slot, int trip) { return assignments[{slot, trip}]; }
    const std::vector<DeliveryEntry>* find(int slot, int trip) const {
        auto it = assignments.find({slot, trip});
        return it == assignments.end() ? nullptr : &it->second;
    }
};

/// Candidates for one delivery slot.
struct DayCandidates {
    Day date{};
    std::vector<std::string> high;
    std::vector<std::string> moderate;
    std::map<std::string, double> risk; // r_mdr for moderates, r_high for high
    std::vector<Trip> trips;            // division of the slot's high customers
};

struct ListProblemInput {
    std::vector<DayCandidates> days;
    const std::map<std::string, Customer>* customers = nullptr;
    TruckSpec truck;
    int lb = 0;
    double time_limit_s = 1800.0;

    const Customer& customer(const std::string& id) const { return customers->at(id); }
    int n_trips(int slot) const {
        return std::max(1, static_cast<int>(days[static_cast<std::size_t>(slot)].trips.size()));
    }
};

/// Default per-trip delivery lower bound: 80% of the average number of
/// customers a truck holds.
inline int default_lb(const std::map<std::string, Customer>& customers, const TruckSpec& truck) {
    if (customers.empty()) return 0;
    double mean_weight = 0, mean_cn = 0;
    for (const auto& [id, c] : customers) {
        mean_weight += c.cylinder_count * c.cylinder_unit_weight;
        mean_cn += c.cylinder_count;
    }
    mean_weight /= static_cast<double>(customers.size());
    mean_cn /= static_cast<double>(customers.size());
    double by_weight = mean_weight > 0 ? truck.max_weight / mean_weight : 1e9;
    double by_space = mean_cn > 0 ? (truck.line_b > 0 ? truck.line_b : truck.max_large) / mean_cn : 1e9;
    double cap_customers = std::min(by_weight, std::max(1.0, by_space));
    return static_cast<int>(std::ceil(0.8 * cap_customers));
}

// ---------------------------------------------------------------------------
// Ellipse preprocessing (maxRisk)
// ---------------------------------------------------------------------------

namespace detail {

inline double deg_dist(const Customer& a, const Customer& b) {
    return std::hypot(a.lon - b.lon, a.lat - b.lat);
}

} // namespace detail

/// A moderate customer is a candidate when it sits inside some ellipse whose
/// foci are a high-risk customer C0 and one of C0's k nearest high-risk
/// neighbors, with major-axis length kappa times the focal distance.
/// Distances are plain Euclidean on raw (lon, lat) degrees.
inline std::vector<std::string> ellipse_candidates(const std::vector<std::string>& high,
                                                   const std::vector<std::string>& moderate,
                                                   const std::map<std::string, Customer>& customers,
                                                   int k, double kappa) {
    std::vector<std::string> out;
    if (high.empty()) return out;
    for (const auto& mid : moderate) {
        const auto& cm = customers.at(mid);
        bool inside = false;
        for (const auto& h0 : high) {
            if (inside) break;
            const auto& c0 = customers.at(h0);
            // k nearest high-risk neighbors of c0 (excluding itself).
            std::vector<std::pair<double, std::string>> near;
            for (const auto& h1 : high)
                if (h1 != h0) near.emplace_back(detail::deg_dist(c0, customers.at(h1)), h1);
            std::sort(near.begin(), near.end());
            if (static_cast<int>(near.size()) > k) near.resize(static_cast<std::size_t>(k));
            for (const auto& [focal, h1] : near) {
                const auto& c1 = customers.at(h1);
                if (detail::deg_dist(cm, c0) + detail::deg_dist(cm, c1) <= kappa * focal + 1e-12) {
                    inside = true;
                    break;
                }
            }
        }
        if (inside) out.push_back(mid);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Shared model pieces
// ---------------------------------------------------------------------------

namespace detail {

/// Adds the truck weight, space-line and large-count rows over the given
/// (variable, customer) pairs.
inline void add_capacity_rows(mip::Model& m,
                              const std::vector<std::pair<int, const Customer*>>& vars,
                              const TruckSpec& truck, const std::string& tag) {
    std::vector<std::pair<int, double>> weight, space, large;
    for (const auto& [v, c] : vars) {
        weight.emplace_back(v, c->cylinder_count * c->cylinder_unit_weight);
        if (c->cylinder_size == CylinderSize::large) {
            space.emplace_back(v, -truck.line_a * c->cylinder_count);
            large.emplace_back(v, static_cast<double>(c->cylinder_count));
        } else {
            space.emplace_back(v, static_cast<double>(c->cylinder_count));
        }
    }
    if (!weight.empty()) m.add_constraint(weight, mip::Sense::le, truck.max_weight, tag + "_w");
    if (!space.empty()) m.add_constraint(space, mip::Sense::le, truck.line_b, tag + "_s");
    if (!large.empty())
        m.add_constraint(large, mip::Sense::le, static_cast<double>(truck.max_large), tag + "_l");
}

struct RectVars {
    int w_lb, w_ub, v_lb, v_ub;
};

inline RectVars add_rect(mip::Model& m, const std::string& tag, double mw, double mv) {
    RectVars r;
    r.w_lb = m.add_continuous(tag + "_wlb", 0.0, mw);
    r.w_ub = m.add_continuous(tag + "_wub", 0.0, mw);
    r.v_lb = m.add_continuous(tag + "_vlb", 0.0, mv);
    r.v_ub = m.add_continuous(tag + "_vub", 0.0, mv);
    m.add_constraint({{r.w_lb, 1.0}, {r.w_ub, -1.0}}, mip::Sense::le, 0.0);
    m.add_constraint({{r.v_lb, 1.0}, {r.v_ub, -1.0}}, mip::Sense::le, 0.0);
    return r;
}

/// lon within [w_lb, w_ub] and lat within [v_lb, v_ub] whenever x = 1.
inline void add_cover_rows(mip::Model& m, int x, const Customer& c, const RectVars& r, double mw,
                           double mv) {
    m.add_constraint({{x, c.lon}, {r.w_ub, -1.0}}, mip::Sense::le, 0.0);
    m.add_constraint({{r.w_lb, 1.0}, {x, mw - c.lon}}, mip::Sense::le, mw);
    m.add_constraint({{x, c.lat}, {r.v_ub, -1.0}}, mip::Sense::le, 0.0);
    m.add_constraint({{r.v_lb, 1.0}, {x, mv - c.lat}}, mip::Sense::le, mv);
}

} // namespace detail

// ---------------------------------------------------------------------------
// maxRisk
// ---------------------------------------------------------------------------

/// One-day model: high-risk customers stay pinned to their divided trips;
/// ellipse-filtered moderates may join any one trip; maximize the sum of
/// squared risks of the added moderates under the truck constraints.
inline DeliveryList solve_max_risk(const ListProblemInput& input,
                                   const std::vector<std::string>& candidates) {
    const auto& day = input.days.at(0);
    mip::Model m;
    m.set_objective(mip::ObjSense::maximize);
    int n_trips = input.n_trips(0);

    std::map<std::pair<std::string, int>, int> var;
    std::vector<std::vector<std::pair<int, const Customer*>>> trip_vars(
        static_cast<std::size_t>(n_trips));
    for (int t = 0; t < static_cast<int>(day.trips.size()); ++t)
        for (const auto& id : day.trips[static_cast<std::size_t>(t)].members) {
            int v = m.add_var("x_" + id, mip::VarKind::binary, 1.0, 1.0); // forced
            var[{id, t}] = v;
            trip_vars[static_cast<std::size_t>(t)].emplace_back(v, &input.customer(id));
        }
    for (const auto& id : candidates) {
        std::vector<std::pair<int, double>> once;
        for (int t = 0; t < n_trips; ++t) {
            int v = m.add_binary("x_" + id + "_t" + std::to_string(t));
            var[{id, t}] = v;
            trip_vars[static_cast<std::size_t>(t)].emplace_back(v, &input.customer(id));
            double r = day.risk.count(id) ? day.risk.at(id) : 0.0;
            m.set_obj_coeff(v, r * r);
            once.emplace_back(v, 1.0);
        }
        m.add_constraint(once, mip::Sense::le, 1.0, "once_" + id);
    }
    for (int t = 0; t < n_trips; ++t)
        detail::add_capacity_rows(m, trip_vars[static_cast<std::size_t>(t)], input.truck,
                                  "cap_t" + std::to_string(t));

    auto r = mip::solve_milp(m, input.time_limit_s);
    if (r.status == mip::MilpStatus::infeasible)
        throw InfeasibleError("maxRisk: forced high-risk set violates the truck constraints");
    if (!r.has_solution())
        throw InfeasibleError("maxRisk: no incumbent within the time limit");

    DeliveryList out;
    out.slot_dates = {day.date};
    out.optimal = r.status == mip::MilpStatus::optimal;
    out.objective = r.objective;
    for (const auto& [key, v] : var) {
        if (r.x[static_cast<std::size_t>(v)] < 0.5) continue;
        const auto& [id, t] = key;
        bool is_high = std::find(day.high.begin(), day.high.end(), id) != day.high.end();
        out.at(0, t).push_back(DeliveryEntry{id, is_high ? ListRole::high : ListRole::moderate,
                                             day.risk.count(id) ? day.risk.at(id) : 0.0});
    }
    return out;
}

// ---------------------------------------------------------------------------
// minBB / multiBB
// ---------------------------------------------------------------------------

namespace detail {

struct BbExtent {
    double mw = 0, mv = 0;
};

inline BbExtent coord_extent(const ListProblemInput& input) {
    BbExtent e;
    for (const auto& day : input.days) {
        auto scan = [&](const std::vector<std::string>& ids) {
            for (const auto& id : ids) {
                const auto& c = input.customer(id);
                e.mw = std::max(e.mw, c.lon);
                e.mv = std::max(e.mv, c.lat);
            }
        };
        scan(day.high);
        scan(day.moderate);
    }
    return e;
}

} // namespace detail

/// One-day minBB at the given per-trip lower bound. Throws InfeasibleError
/// when the bound cannot be met; the pipeline driver decrements and retries.
inline DeliveryList solve_min_bb(const ListProblemInput& input, int lb) {
    const auto& day = input.days.at(0);
    auto ext = detail::coord_extent(input);
    int n_trips = input.n_trips(0);

    mip::Model m;
    m.set_objective(mip::ObjSense::minimize);
    std::map<std::pair<std::string, int>, int> var;
    std::vector<std::vector<std::pair<int, const Customer*>>> trip_vars(
        static_cast<std::size_t>(n_trips));
    std::vector<detail::RectVars> rects;
    for (int t = 0; t < n_trips; ++t) {
        auto r = detail::add_rect(m, "r" + std::to_string(t), ext.mw, ext.mv);
        m.set_obj_coeff(r.w_ub, 1.0);
        m.set_obj_coeff(r.w_lb, -1.0);
        m.set_obj_coeff(r.v_ub, 1.0);
        m.set_obj_coeff(r.v_lb, -1.0);
        rects.push_back(r);
    }

    auto add_customer = [&](const std::string& id, bool forced) {
        std::vector<std::pair<int, double>> spread;
        for (int t = 0; t < n_trips; ++t) {
            int v = m.add_binary("x_" + id + "_t" + std::to_string(t));
            var[{id, t}] = v;
            trip_vars[static_cast<std::size_t>(t)].emplace_back(v, &input.customer(id));
            detail::add_cover_rows(m, v, input.customer(id), rects[static_cast<std::size_t>(t)],
                                   ext.mw, ext.mv);
            spread.emplace_back(v, 1.0);
        }
        m.add_constraint(spread, forced ? mip::Sense::eq : mip::Sense::le, 1.0, "pick_" + id);
    };
    for (const auto& id : day.high) add_customer(id, true);
    for (const auto& id : day.moderate) add_customer(id, false);

    for (int t = 0; t < n_trips; ++t) {
        std::vector<std::pair<int, double>> count;
        for (const auto& [key, v] : var)
            if (key.second == t) count.emplace_back(v, 1.0);
        m.add_constraint(count, mip::Sense::ge, static_cast<double>(lb), "lb_t" + std::to_string(t));
        detail::add_capacity_rows(m, trip_vars[static_cast<std::size_t>(t)], input.truck,
                                  "cap_t" + std::to_string(t));
    }

    auto r = mip::solve_milp(m, input.time_limit_s);
    if (r.status == mip::MilpStatus::infeasible)
        throw InfeasibleError("minBB infeasible at LB=" + std::to_string(lb));
    if (!r.has_solution()) throw InfeasibleError("minBB: no incumbent within the time limit");

    DeliveryList out;
    out.slot_dates = {day.date};
    out.optimal = r.status == mip::MilpStatus::optimal;
    out.objective = r.objective;
    for (const auto& [key, v] : var) {
        if (r.x[static_cast<std::size_t>(v)] < 0.5) continue;
        const auto& [id, t] = key;
        bool is_high = std::find(day.high.begin(), day.high.end(), id) != day.high.end();
        out.at(0, t).push_back(DeliveryEntry{id, is_high ? ListRole::high : ListRole::moderate,
                                             day.risk.count(id) ? day.risk.at(id) : 0.0});
    }
    return out;
}

/// Days on which a customer may be served: its moderate days plus the first
/// day it turns high.
struct Eligibility {
    std::map<std::string, std::vector<int>> slots;     // customer -> slot indices
    std::map<std::string, int> first_high;             // customer -> slot of D*_C
};

inline Eligibility build_eligibility(const ListProblemInput& input) {
    Eligibility e;
    for (int s = 0; s < static_cast<int>(input.days.size()); ++s) {
        const auto& day = input.days[static_cast<std::size_t>(s)];
        for (const auto& id : day.high)
            if (!e.first_high.count(id)) {
                e.first_high[id] = s;
                e.slots[id].push_back(s);
            }
        for (const auto& id : day.moderate)
            if (!e.first_high.count(id)) e.slots[id].push_back(s);
    }
    return e;
}

/// Largest per-trip lower bound a day-candidate structure can possibly meet:
/// every trip of a day needs lb customers, so lb*n_trips cannot exceed the
/// day's eligible-customer count. Bounds above this are skipped by the
/// decrement loops without a solve.
inline int feasible_lb_cap(const ListProblemInput& input, const Eligibility& elig) {
    int cap = std::numeric_limits<int>::max();
    for (int s = 0; s < static_cast<int>(input.days.size()); ++s) {
        int eligible = 0;
        for (const auto& [id, slots] : elig.slots)
            if (std::find(slots.begin(), slots.end(), s) != slots.end()) ++eligible;
        cap = std::min(cap, eligible / input.n_trips(s));
    }
    return cap;
}

/// Multi-day model minimizing the largest rectangle half-perimeter over all
/// (day, trip) pairs. Infeasibility triggers the LB-decrement loop; at LB=0
/// only an unsatisfiable coverage constraint remains, which is an error.
/// After solving, duplicate selections of one customer are reduced to the
/// last selected day.
inline DeliveryList solve_multi_bb(const ListProblemInput& input) {
    auto ext = detail::coord_extent(input);
    auto elig = build_eligibility(input);
    int n_days = static_cast<int>(input.days.size());

    int lb_start = std::min(std::max(0, input.lb), std::max(0, feasible_lb_cap(input, elig)));
    for (int lb = lb_start; lb >= 0; --lb) {
        mip::Model m;
        m.set_objective(mip::ObjSense::minimize);
        int lambda = m.add_continuous("max_size", 0.0, 2.0 * (ext.mw + ext.mv));
        m.set_obj_coeff(lambda, 1.0);

        std::map<std::pair<std::string, std::pair<int, int>>, int> var; // (id,(slot,trip))
        std::map<std::pair<int, int>, std::vector<std::pair<int, const Customer*>>> trip_vars;
        std::map<std::pair<int, int>, detail::RectVars> rects;
        for (int s = 0; s < n_days; ++s)
            for (int t = 0; t < input.n_trips(s); ++t) {
                auto tag = "r" + std::to_string(s) + "_" + std::to_string(t);
                auto r = detail::add_rect(m, tag, ext.mw, ext.mv);
                rects[{s, t}] = r;
                // lambda >= (w_ub-w_lb) + (v_ub-v_lb)
                m.add_constraint({{r.w_ub, 1.0}, {r.w_lb, -1.0}, {r.v_ub, 1.0}, {r.v_lb, -1.0},
                                  {lambda, -1.0}},
                                 mip::Sense::le, 0.0, "L_" + tag);
            }

        for (const auto& [id, slots] : elig.slots) {
            const auto& c = input.customer(id);
            std::vector<std::pair<int, double>> cover;
            for (int s : slots) {
                std::vector<std::pair<int, double>> per_day;
                for (int t = 0; t < input.n_trips(s); ++t) {
                    int v = m.add_binary("x_" + id + "_" + std::to_string(s) + "_" + std::to_string(t));
                    var[{id, {s, t}}] = v;
                    trip_vars[{s, t}].emplace_back(v, &c);
                    detail::add_cover_rows(m, v, c, rects[{s, t}], ext.mw, ext.mv);
                    per_day.emplace_back(v, 1.0);
                    cover.emplace_back(v, 1.0);
                }
                m.add_constraint(per_day, mip::Sense::le, 1.0,
                                 "day_" + id + "_" + std::to_string(s));
            }
            if (elig.first_high.count(id) && !cover.empty())
                m.add_constraint(cover, mip::Sense::ge, 1.0, "serve_" + id);
        }

        for (const auto& [st, tv] : trip_vars) {
            std::vector<std::pair<int, double>> count;
            for (const auto& [v, c] : tv) count.emplace_back(v, 1.0);
            auto tag = std::to_string(st.first) + "_" + std::to_string(st.second);
            if (lb > 0) m.add_constraint(count, mip::Sense::ge, static_cast<double>(lb), "lb_" + tag);
            detail::add_capacity_rows(m, tv, input.truck, "cap_" + tag);
        }

        auto r = mip::solve_milp(m, input.time_limit_s);
        if (r.status == mip::MilpStatus::infeasible) continue; // decrement LB
        if (!r.has_solution())
            throw InfeasibleError("multiBB: no incumbent within the time limit");

        // Extract, keeping only the last selected day of each customer.
        std::map<std::string, std::pair<int, int>> chosen;
        for (const auto& [key, v] : var) {
            if (r.x[static_cast<std::size_t>(v)] < 0.5) continue;
            const auto& [id, st] = key;
            auto it = chosen.find(id);
            if (it == chosen.end() || st.first > it->second.first) chosen[id] = st;
        }
        DeliveryList out;
        out.base_day = input.days.front().date;
        for (const auto& day : input.days) out.slot_dates.push_back(day.date);
        out.optimal = r.status == mip::MilpStatus::optimal;
        out.objective = r.objective;
        for (const auto& [id, st] : chosen) {
            bool is_high = elig.first_high.count(id) && elig.first_high.at(id) == st.first;
            const auto& day = input.days[static_cast<std::size_t>(st.first)];
            out.at(st.first, st.second)
                .push_back(DeliveryEntry{id, is_high ? ListRole::high : ListRole::moderate,
                                         day.risk.count(id) ? day.risk.at(id) : 0.0});
        }
        return out;
    }
    throw InfeasibleError("multiBB: coverage constraint unsatisfiable even at LB=0");
}

/// Marks customers that turn high later in the horizon but were scheduled on
/// an earlier (moderate) day: their visit becomes mandatory for routing.
inline DeliveryList upgrade_postprocess(DeliveryList list, const Eligibility& elig) {
    for (auto& [st, entries] : list.assignments)
        for (auto& e : entries) {
            if (e.role != ListRole::moderate) continue;
            auto it = elig.first_high.find(e.customer_id);
            if (it != elig.first_high.end() && st.first < it->second)
                e.role = ListRole::moderate_upgraded_high;
        }
    return list;
}

// ---------------------------------------------------------------------------
// Greedy baseline
// ---------------------------------------------------------------------------

/// Forced high-risk first (their divided trips), then moderates in descending
/// risk (ties by id) into the first trip that still passes check_load.
inline DeliveryList dl_greedy(const ListProblemInput& input) {
    const auto& day = input.days.at(0);
    int n_trips = input.n_trips(0);
    std::vector<std::vector<Customer>> bins(static_cast<std::size_t>(n_trips));
    DeliveryList out;
    out.slot_dates = {day.date};
    for (int t = 0; t < static_cast<int>(day.trips.size()); ++t)
        for (const auto& id : day.trips[static_cast<std::size_t>(t)].members) {
            bins[static_cast<std::size_t>(t)].push_back(input.customer(id));
            out.at(0, t).push_back(
                DeliveryEntry{id, ListRole::high, day.risk.count(id) ? day.risk.at(id) : 0.0});
        }
    for (int t = 0; t < n_trips; ++t)
        if (!bins[static_cast<std::size_t>(t)].empty() &&
            !check_load(bins[static_cast<std::size_t>(t)], input.truck))
            throw InfeasibleError("greedy: high-risk trip exceeds capacity");

    auto moderates = day.moderate;
    std::sort(moderates.begin(), moderates.end(), [&](const std::string& a, const std::string& b) {
        double ra = day.risk.count(a) ? day.risk.at(a) : 0.0;
        double rb = day.risk.count(b) ? day.risk.at(b) : 0.0;
        if (ra != rb) return ra > rb;
        return a < b;
    });
    for (const auto& id : moderates) {
        for (int t = 0; t < n_trips; ++t) {
            auto attempt = bins[static_cast<std::size_t>(t)];
            attempt.push_back(input.customer(id));
            if (check_load(attempt, input.truck)) {
                bins[static_cast<std::size_t>(t)] = std::move(attempt);
                out.at(0, t).push_back(
                    DeliveryEntry{id, ListRole::moderate, day.risk.count(id) ? day.risk.at(id) : 0.0});
                break;
            }
        }
    }
    return out;
}

} // namespace gasplan
