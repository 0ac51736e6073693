#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "gasplan/routeopt.hpp"

using namespace gasplan;

namespace {

struct Site {
    double x, y;
};

/// Builds a graph from planar coordinates with unit speed (duration ==
/// distance) and the depot at the origin.
RouteGraph make_graph(const std::vector<std::vector<RouteCustomer>>& trips,
                      const std::map<std::string, Site>& sites, double work_lb = 0,
                      double work_ub = 24 * 60) {
    auto minutes = [&](const std::string& a, const std::string& b) {
        Site sa = a == "depot" ? Site{0, 0} : sites.at(a);
        Site sb = b == "depot" ? Site{0, 0} : sites.at(b);
        return std::hypot(sa.x - sb.x, sa.y - sb.y);
    };
    auto kms = minutes;
    return build_graph(trips, work_lb, work_ub, 0.0, minutes, kms);
}

RouteCustomer rc(const std::string& id, bool mandatory, double risk = 0.5, double lb = 0,
                 double ub = 24 * 60, double rep = 0) {
    RouteCustomer c;
    c.id = id;
    c.mandatory = mandatory;
    c.risk = risk;
    c.tw_lb = lb;
    c.tw_ub = ub;
    c.rep = rep;
    return c;
}

/// Exhaustive served-count oracle for one trip: every subset of optionals
/// (mandatory always in), every permutation, earliest-arrival feasibility.
int max_deli_oracle_one_trip(const RouteGraph& g) {
    const auto& members = g.trip_members.at(0);
    std::vector<int> mand, opt;
    for (int v : members)
        (g.customers[static_cast<std::size_t>(v)].mandatory ? mand : opt).push_back(v);
    int best = -1;
    for (int mask = 0; mask < (1 << opt.size()); ++mask) {
        std::vector<int> chosen = mand;
        for (std::size_t i = 0; i < opt.size(); ++i)
            if (mask >> i & 1) chosen.push_back(opt[i]);
        std::sort(chosen.begin(), chosen.end());
        do {
            auto end = detail::trip_end_time(g, chosen, g.work_lb);
            if (end && *end <= g.work_ub + 1e-9) {
                best = std::max(best, static_cast<int>(chosen.size()));
                break;
            }
        } while (std::next_permutation(chosen.begin(), chosen.end()));
    }
    return best;
}

/// Exhaustive makespan oracle for one trip serving everyone.
double min_work_oracle_one_trip(const RouteGraph& g) {
    auto chosen = g.trip_members.at(0);
    std::sort(chosen.begin(), chosen.end());
    double best = std::numeric_limits<double>::infinity();
    do {
        auto end = detail::trip_end_time(g, chosen, g.work_lb);
        if (end && *end <= g.work_ub + 1e-9) best = std::min(best, *end);
    } while (std::next_permutation(chosen.begin(), chosen.end()));
    return best;
}

void check_plan_invariants(const RouteGraph& g, const RoutePlan& plan) {
    std::set<std::string> seen;
    for (const auto& tr : plan.trips) {
        double prev_depart = tr.start_time;
        std::string prev;
        for (const auto& v : tr.visits) {
            CHECK(seen.insert(v.customer_id).second);
            // Find the vertex.
            int idx = -1;
            for (int i = 0; i < g.n_customers(); ++i)
                if (g.customers[static_cast<std::size_t>(i)].id == v.customer_id) idx = i;
            REQUIRE(idx >= 0);
            const auto& c = g.customers[static_cast<std::size_t>(idx)];
            // Window and staff bounds.
            CHECK(v.arrival >= c.tw_lb - 1e-9);
            CHECK(v.arrival <= c.tw_ub - c.rep + 1e-9);
            CHECK(v.arrival >= g.work_lb - 1e-9);
            // Arrival recursion.
            double travel;
            if (prev.empty()) {
                travel = g.from_depot[static_cast<std::size_t>(idx)];
            } else {
                int pidx = -1;
                for (int i = 0; i < g.n_customers(); ++i)
                    if (g.customers[static_cast<std::size_t>(i)].id == prev) pidx = i;
                travel = g.dur[static_cast<std::size_t>(pidx)][static_cast<std::size_t>(idx)];
            }
            CHECK(v.arrival >= prev_depart + travel - 1e-9);
            prev_depart = v.arrival + c.rep;
            prev = v.customer_id;
        }
    }
    // served/skipped partition the graph's customers
    CHECK(seen.size() == plan.served.size());
    CHECK(plan.served.size() + plan.skipped.size() ==
          static_cast<std::size_t>(g.n_customers()));
}

} // namespace

TEST_CASE("graph: one trip with three customers has two supernodes and full arcs") {
    std::map<std::string, Site> sites{{"a", {1, 0}}, {"b", {2, 0}}, {"c", {3, 0}}};
    auto g = make_graph({{rc("a", true), rc("b", true), rc("c", true)}}, sites);
    CHECK(g.n_trips == 1); // supernode count is n_trips+1 by construction
    CHECK(g.inter_edges.size() == 6); // complete digraph on 3 vertices
}

TEST_CASE("graph: seven customers in a trip keep exactly five out-neighbors") {
    std::map<std::string, Site> sites;
    std::vector<RouteCustomer> trip;
    for (int i = 0; i < 7; ++i) {
        std::string id = "c" + std::to_string(i);
        sites[id] = {std::cos(i * 0.9) * (1 + i * 0.1), std::sin(i * 0.9)};
        trip.push_back(rc(id, true));
    }
    auto g = make_graph({trip}, sites);
    std::map<int, int> outdeg;
    for (auto [a, b] : g.inter_edges) outdeg[a]++;
    for (int i = 0; i < 7; ++i) CHECK(outdeg[i] == 5);
}

TEST_CASE("graph: no customer arcs between different trips") {
    std::map<std::string, Site> sites{{"a", {1, 0}}, {"b", {2, 0}}, {"x", {1, 1}}, {"y", {2, 1}}};
    auto g = make_graph({{rc("a", true), rc("b", true)}, {rc("x", true), rc("y", true)}}, sites);
    for (auto [p, q] : g.inter_edges)
        CHECK(g.customers[static_cast<std::size_t>(p)].trip ==
              g.customers[static_cast<std::size_t>(q)].trip);
}

TEST_CASE("maxDeli: both served when time allows, closed window excludes") {
    std::map<std::string, Site> sites{{"m", {1, 0}}, {"o", {2, 0}}};
    auto g = make_graph({{rc("m", true), rc("o", false)}}, sites, 0, 200);
    auto r = solve_max_deli(g, 10.0);
    REQUIRE(r.status == RouteSolveStatus::solved);
    CHECK(r.plan.served.size() == 2);

    // Optional whose window closed before the staff start.
    auto g2 = make_graph({{rc("m", true), rc("o", false, 0.5, 0, 50)}}, sites, 100, 300);
    auto r2 = solve_max_deli(g2, 10.0);
    REQUIRE(r2.status == RouteSolveStatus::solved);
    CHECK(r2.plan.served == std::vector<std::string>{"m"});
    CHECK(r2.plan.skipped == std::vector<std::string>{"o"});
}

TEST_CASE("maxDeli matches the exhaustive oracle on random instances") {
    std::mt19937 rng(314);
    std::uniform_real_distribution<double> coord(-10.0, 10.0);
    std::uniform_int_distribution<int> nc(3, 6);
    std::uniform_int_distribution<int> flag(0, 1);
    for (int rep = 0; rep < 25; ++rep) {
        int n = nc(rng);
        std::map<std::string, Site> sites;
        std::vector<RouteCustomer> trip;
        double horizon = 40 + 12 * n;
        for (int i = 0; i < n; ++i) {
            std::string id = "c" + std::to_string(i);
            sites[id] = {coord(rng), coord(rng)};
            bool mand = i == 0 && flag(rng);
            double lb = flag(rng) ? 0.0 : std::uniform_real_distribution<double>(0, horizon / 3)(rng);
            double ub = lb + std::uniform_real_distribution<double>(15, horizon)(rng);
            trip.push_back(rc(id, mand, 0.5, lb, ub, 2.0));
        }
        auto g = make_graph({trip}, sites, 0, horizon);
        int expect = max_deli_oracle_one_trip(g);
        auto r = solve_max_deli(g, 30.0);
        if (expect < 0) {
            CHECK(r.status != RouteSolveStatus::solved);
        } else {
            REQUIRE(r.status == RouteSolveStatus::solved);
            CHECK(static_cast<int>(r.plan.served.size()) == expect);
            check_plan_invariants(g, r.plan);
        }
    }
}

TEST_CASE("minWork: single customer closed form") {
    std::map<std::string, Site> sites{{"a", {7, 0}}};
    auto g = make_graph({{rc("a", true, 0.5, 50, 300, 5)}}, sites, 10, 400);
    std::vector<bool> serve{true};
    auto r = solve_min_work(g, serve, 10.0);
    REQUIRE(r.status == RouteSolveStatus::solved);
    // max(tw_lb, work_lb + d(depot,a)) + rep + d(a, depot)
    double expect = std::max(50.0, 10.0 + 7.0) + 5.0 + 7.0;
    CHECK(r.plan.makespan == Catch::Approx(expect));
}

TEST_CASE("minWork: empty served set yields an empty plan") {
    std::map<std::string, Site> sites{{"a", {1, 0}}};
    auto g = make_graph({{rc("a", false)}}, sites, 60, 200);
    std::vector<bool> serve{false};
    auto r = solve_min_work(g, serve, 10.0);
    REQUIRE(r.status == RouteSolveStatus::solved);
    CHECK(r.plan.served.empty());
    CHECK(r.plan.makespan == Catch::Approx(60.0)); // never leaves the depot
}

TEST_CASE("minWork matches the permutation oracle") {
    std::mt19937 rng(2718);
    std::uniform_real_distribution<double> coord(-8.0, 8.0);
    std::uniform_int_distribution<int> nc(3, 7);
    for (int rep = 0; rep < 25; ++rep) {
        int n = nc(rng);
        std::map<std::string, Site> sites;
        std::vector<RouteCustomer> trip;
        double horizon = 80 + 15 * n;
        for (int i = 0; i < n; ++i) {
            std::string id = "c" + std::to_string(i);
            sites[id] = {coord(rng), coord(rng)};
            trip.push_back(rc(id, true, 0.5, 0, horizon, 1.0));
        }
        auto g = make_graph({trip}, sites, 0, horizon);
        double expect = min_work_oracle_one_trip(g);
        std::vector<bool> serve(static_cast<std::size_t>(n), true);
        auto r = solve_min_work(g, serve, 30.0);
        REQUIRE(std::isfinite(expect)); // open windows: always feasible
        REQUIRE(r.status == RouteSolveStatus::solved);
        CHECK(r.plan.makespan == Catch::Approx(expect).margin(1e-6));
        check_plan_invariants(g, r.plan);
    }
}

TEST_CASE("minWork on four collinear customers goes out and back") {
    std::map<std::string, Site> sites{{"a", {1, 0}}, {"b", {2, 0}}, {"c", {3, 0}}, {"d", {4, 0}}};
    auto g = make_graph({{rc("a", true), rc("b", true), rc("c", true), rc("d", true)}}, sites, 0, 500);
    std::vector<bool> serve(4, true);
    auto r = solve_min_work(g, serve, 30.0);
    REQUIRE(r.status == RouteSolveStatus::solved);
    CHECK(r.plan.makespan == Catch::Approx(8.0)); // 4 out, 4 back
    CHECK(r.plan.makespan == Catch::Approx(min_work_oracle_one_trip(g)));
}

TEST_CASE("2-opt uncrosses a square") {
    std::map<std::string, Site> sites{{"a", {0, 0}}, {"b", {1, 0}}, {"c", {1, 1}}, {"d", {0, 1}}};
    std::vector<RouteCustomer> trip{rc("a", true), rc("b", true), rc("c", true), rc("d", true)};
    auto g = make_graph({trip}, sites);
    auto order = tsp_2opt(g, {0, 1, 2, 3});
    // Tour length depot(=a's corner) around the unit square: compute. The
    // depot sits at (0,0) = a. Optimal closed tour is the square boundary: 4.
    auto end = detail::trip_end_time(g, order, 0.0);
    REQUIRE(end.has_value());
    CHECK(*end == Catch::Approx(4.0));
}

TEST_CASE("2-opt never worsens the nearest-neighbor start") {
    std::mt19937 rng(12);
    std::uniform_real_distribution<double> coord(-5.0, 5.0);
    for (int rep = 0; rep < 20; ++rep) {
        std::map<std::string, Site> sites;
        std::vector<RouteCustomer> trip;
        for (int i = 0; i < 6; ++i) {
            std::string id = "c" + std::to_string(i);
            sites[id] = {coord(rng), coord(rng)};
            trip.push_back(rc(id, true));
        }
        auto g = make_graph({trip}, sites);
        auto improved = tsp_2opt(g, {0, 1, 2, 3, 4, 5});
        // Plain nearest-neighbor order for comparison.
        std::vector<int> nn{0, 1, 2, 3, 4, 5};
        auto len = [&](const std::vector<int>& o) { return *detail::trip_end_time(g, o, 0.0); };
        CHECK(len(improved) <= len(nn) + 1e-9);
    }
}

TEST_CASE("tsptw orders early windows first and reports impossible ones") {
    std::map<std::string, Site> sites{{"early", {1, 0}}, {"late", {1.5, 0}}};
    std::vector<RouteCustomer> trip{rc("late", false, 0.5, 100, 200, 1),
                                    rc("early", false, 0.5, 0, 20, 1)};
    auto g = make_graph({trip}, sites, 0, 400);
    auto res = tsptw_insertion(g, {true, true});
    REQUIRE(res.unplaceable.empty());
    REQUIRE(res.orders[0].size() == 2);
    CHECK(g.customers[static_cast<std::size_t>(res.orders[0][0])].id == "early");

    std::vector<RouteCustomer> trip2{rc("gone", false, 0.5, 0, 0.5, 1)}; // closes before arrival
    auto g2 = make_graph({trip2}, {{"gone", {5, 0}}}, 0, 400);
    auto res2 = tsptw_insertion(g2, {true});
    CHECK(res2.unplaceable.size() == 1);
}

TEST_CASE("modify removes the most expensive optional visit") {
    // Mandatory a at (1,0); optional detour far away at (0,30).
    std::map<std::string, Site> sites{{"a", {1, 0}}, {"far", {0, 30}}};
    std::vector<RouteCustomer> trip{rc("a", true), rc("far", false)};
    auto g = make_graph({trip}, sites, 0, 1000);
    std::vector<std::vector<int>> orders{{0, 1}};
    // Full plan takes ~ 1 + 30.02 + 30 = 61; limit 10 forces dropping "far".
    auto trimmed = modify_route(g, orders, 10.0);
    REQUIRE(trimmed[0].size() == 1);
    CHECK(g.customers[static_cast<std::size_t>(trimmed[0][0])].id == "a");
    // Already within the limit: unchanged.
    auto same = modify_route(g, {{0}}, 10.0);
    CHECK(same == std::vector<std::vector<int>>{{0}});
    // Only mandatory left but still over: error.
    CHECK_THROWS_AS(modify_route(g, {{0}}, 1.0), CannotSatisfyError);
}

TEST_CASE("squeeze fills by risk under a tight window") {
    std::map<std::string, Site> sites{{"m", {1, 0}}, {"hi", {2, 0}}, {"lo", {-2, 0}}};
    std::vector<RouteCustomer> trip{rc("m", true, 1.0), rc("hi", false, 0.9), rc("lo", false, 0.2)};
    // Budget allows the mandatory plus one optional (each side trip ~4).
    auto g = make_graph({trip}, sites, 0, 7.0);
    auto plan = squeeze_greedy(g);
    CHECK(std::count(plan.served.begin(), plan.served.end(), "m") == 1);
    CHECK(std::count(plan.served.begin(), plan.served.end(), "hi") == 1);
    CHECK(std::count(plan.served.begin(), plan.served.end(), "lo") == 0);

    // Ample time: everyone.
    auto g2 = make_graph({trip}, sites, 0, 500);
    auto plan2 = squeeze_greedy(g2);
    CHECK(plan2.served.size() == 3);

    // Zero slack beyond the mandatory visit.
    auto g3 = make_graph({trip}, sites, 0, 2.2);
    auto plan3 = squeeze_greedy(g3);
    CHECK(plan3.served == std::vector<std::string>{"m"});
}

TEST_CASE("orchestrators: easy instance serves the same set as direct solves") {
    std::map<std::string, Site> sites{{"h1", {1, 0}}, {"h2", {2, 1}}, {"m1", {1.5, 0.5}}};
    std::vector<RouteCustomer> trip{rc("h1", true, 1.0), rc("h2", true, 1.0), rc("m1", false, 0.4)};
    auto g = make_graph({trip}, sites, 0, 400);
    RouteConfig cfg;
    cfg.time_limit_s = 20.0;
    auto direct = solve_max_deli(g, 20.0);
    REQUIRE(direct.status == RouteSolveStatus::solved);
    for (auto strategy : {RouteStrategy::ip, RouteStrategy::tsp}) {
        auto plan = orchestrate(g, cfg, strategy);
        CHECK(plan.served.size() == direct.plan.served.size());
        check_plan_invariants(g, plan);
        CHECK(plan_fits_work_end(plan, g.work_ub));
    }
}

TEST_CASE("orchestrators: zero solver budget still returns a valid plan") {
    std::map<std::string, Site> sites{{"h1", {1, 0}}, {"h2", {2, 1}}, {"m1", {1.5, 0.5}}};
    std::vector<RouteCustomer> trip{rc("h1", true, 1.0), rc("h2", true, 1.0), rc("m1", false, 0.4)};
    // Make the high-only 2-opt overrun the work end so the IP path needs the
    // MILPs, which are denied any time: every solve reports no incumbent and
    // control falls all the way through to the squeeze fallback.
    auto g = make_graph({trip}, sites, 0, 5.0);
    RouteConfig cfg;
    cfg.time_limit_s = 0.0;
    for (auto strategy : {RouteStrategy::ip, RouteStrategy::tsp}) {
        auto plan = orchestrate(g, cfg, strategy);
        check_plan_invariants(g, plan);
        CHECK(plan_fits_work_end(plan, g.work_ub));
        CHECK(plan.method == "squeeze");
    }
}

TEST_CASE("orchestrator with no moderates reduces to minWork over high") {
    std::map<std::string, Site> sites{{"h1", {1, 0}}, {"h2", {0, 1}}};
    std::vector<RouteCustomer> trip{rc("h1", true, 1.0), rc("h2", true, 1.0)};
    auto g = make_graph({trip}, sites, 0, 400);
    RouteConfig cfg;
    cfg.time_limit_s = 20.0;
    auto plan = orchestrate_ip(g, cfg);
    std::vector<bool> serve(2, true);
    auto direct = solve_min_work(g, serve, 20.0);
    REQUIRE(direct.status == RouteSolveStatus::solved);
    CHECK(plan.served.size() == 2);
    CHECK(plan.makespan == Catch::Approx(direct.plan.makespan));
}

TEST_CASE("tsp orchestrator trims a moderate overrun with modify") {
    // Mandatory core plus an optional spur that pushes past work end but
    // within overwork.
    std::map<std::string, Site> sites{{"h", {1, 0}}, {"m", {0, 14}}};
    std::vector<RouteCustomer> trip{rc("h", true, 1.0), rc("m", false, 0.3)};
    auto g = make_graph({trip}, sites, 0, 10.0);
    RouteConfig cfg;
    cfg.time_limit_s = 20.0;
    cfg.overwork_limit = 60.0;
    auto plan = orchestrate_tsp(g, cfg);
    // Full route ~ 29-30 min > work end 10, <= overwork 60: modify drops "m".
    CHECK(std::count(plan.served.begin(), plan.served.end(), "h") == 1);
    CHECK(std::count(plan.served.begin(), plan.served.end(), "m") == 0);
    CHECK(plan_fits_work_end(plan, g.work_ub));
}

TEST_CASE("fuzz: orchestrators always deliver valid plans") {
    std::mt19937 rng(909);
    std::uniform_real_distribution<double> coord(-6.0, 6.0);
    std::uniform_int_distribution<int> nc(1, 6);
    std::uniform_int_distribution<int> ntr(1, 2);
    std::uniform_int_distribution<int> flag(0, 1);
    for (int rep = 0; rep < 40; ++rep) {
        int trips_n = ntr(rng);
        std::map<std::string, Site> sites;
        std::vector<std::vector<RouteCustomer>> trips(static_cast<std::size_t>(trips_n));
        int id_counter = 0;
        for (auto& trip : trips) {
            int n = nc(rng);
            for (int i = 0; i < n; ++i) {
                std::string id = "c" + std::to_string(id_counter++);
                sites[id] = {coord(rng), coord(rng)};
                double lb = flag(rng) ? 0.0 : 30.0;
                double ub = flag(rng) ? 45.0 : 24 * 60;
                trip.push_back(rc(id, flag(rng) == 0, 0.1 * (id_counter % 10), lb, ub, 1.0));
            }
        }
        double work_ub = 30 + 40 * flag(rng);
        auto g = make_graph(trips, sites, 0, work_ub);
        RouteConfig cfg;
        cfg.time_limit_s = rep % 3 == 0 ? 0.0 : 5.0;
        for (auto strategy : {RouteStrategy::ip, RouteStrategy::tsp}) {
            auto plan = orchestrate(g, cfg, strategy);
            check_plan_invariants(g, plan);
            CHECK(plan_fits_work_end(plan, g.work_ub));
        }
    }
}
