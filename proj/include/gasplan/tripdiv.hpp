#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "gasplan/capacity.hpp"
#include "gasplan/core.hpp"
#include "gasplan/geo.hpp"

namespace gasplan {

struct Trip {
    int trip_id = 0;
    std::vector<std::string> members;
};

namespace detail {

inline std::vector<PlanarPoint> project(const std::vector<Customer>& cs) {
    double ref = 0;
    for (const auto& c : cs) ref += c.lat;
    if (!cs.empty()) ref /= static_cast<double>(cs.size());
    std::vector<PlanarPoint> pts;
    pts.reserve(cs.size());
    for (const auto& c : cs) pts.push_back(planar_xm(c.lon, c.lat, ref));
    return pts;
}

inline std::pair<std::size_t, std::size_t> farthest_pair(const std::vector<PlanarPoint>& pts) {
    std::pair<std::size_t, std::size_t> best{0, 0};
    double best_d = -1;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            double d = planar_dist(pts[i], pts[j]);
            if (d > best_d) {
                best_d = d;
                best = {i, j};
            }
        }
    return best;
}

inline void require_individual_fit(const std::vector<Customer>& cs, const TruckSpec& truck) {
    for (const auto& c : cs)
        if (!check_load(std::vector<Customer>{c}, truck))
            throw CustomerTooLargeError("customer " + c.customer_id + " exceeds the truck capacity alone");
}

} // namespace detail

/// Sorts customers by scalar projection onto the segment between the farthest
/// pair, then packs them next-fit: extend the current trip while check_load
/// holds, otherwise open a new one.
inline std::vector<Trip> updated_next_fit(const std::vector<Customer>& highrisk, const TruckSpec& truck) {
    if (highrisk.empty()) return {};
    detail::require_individual_fit(highrisk, truck);
    auto pts = detail::project(highrisk);
    auto [a, b] = detail::farthest_pair(pts);
    double ax = pts[b].x - pts[a].x, ay = pts[b].y - pts[a].y;
    std::vector<std::size_t> order(highrisk.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        double pi = (pts[i].x - pts[a].x) * ax + (pts[i].y - pts[a].y) * ay;
        double pj = (pts[j].x - pts[a].x) * ax + (pts[j].y - pts[a].y) * ay;
        if (pi != pj) return pi < pj;
        return highrisk[i].customer_id < highrisk[j].customer_id;
    });

    std::vector<Trip> trips;
    std::vector<Customer> current;
    for (std::size_t idx : order) {
        auto attempt = current;
        attempt.push_back(highrisk[idx]);
        if (!current.empty() && !check_load(attempt, truck)) {
            Trip t;
            t.trip_id = static_cast<int>(trips.size());
            for (const auto& c : current) t.members.push_back(c.customer_id);
            trips.push_back(std::move(t));
            current.clear();
        }
        current.push_back(highrisk[idx]);
    }
    if (!current.empty()) {
        Trip t;
        t.trip_id = static_cast<int>(trips.size());
        for (const auto& c : current) t.members.push_back(c.customer_id);
        trips.push_back(std::move(t));
    }
    return trips;
}

/// Anchor-based division: n_trips anchors picked greedily as far apart as
/// possible (the first is the farthest-pair endpoint with the smaller id),
/// remaining customers assigned in descending variance of their distances to
/// the anchors, each to the nearest trip that still passes check_load.
/// Returns nullopt when some customer fits no trip; the caller retries with
/// one more trip.
inline std::optional<std::vector<Trip>> fava(const std::vector<Customer>& highrisk, int n_trips,
                                             const TruckSpec& truck) {
    if (highrisk.empty()) return std::vector<Trip>{};
    detail::require_individual_fit(highrisk, truck);
    n_trips = std::min<int>(n_trips, static_cast<int>(highrisk.size()));
    if (n_trips < 1) throw ValidationError("fava needs at least one trip");
    auto pts = detail::project(highrisk);

    std::vector<std::size_t> anchors;
    if (highrisk.size() == 1) {
        anchors.push_back(0);
    } else {
        auto [a, b] = detail::farthest_pair(pts);
        anchors.push_back(highrisk[a].customer_id < highrisk[b].customer_id ? a : b);
    }
    while (static_cast<int>(anchors.size()) < n_trips) {
        std::size_t best = 0;
        double best_min = -1;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (std::find(anchors.begin(), anchors.end(), i) != anchors.end()) continue;
            double dmin = std::numeric_limits<double>::infinity();
            for (std::size_t anc : anchors) dmin = std::min(dmin, planar_dist(pts[i], pts[anc]));
            if (dmin > best_min ||
                (dmin == best_min && highrisk[i].customer_id < highrisk[best].customer_id)) {
                best_min = dmin;
                best = i;
            }
        }
        anchors.push_back(best);
    }

    std::vector<std::vector<Customer>> bins(anchors.size());
    for (std::size_t t = 0; t < anchors.size(); ++t) bins[t].push_back(highrisk[anchors[t]]);

    // Non-anchors ordered by descending variance of anchor distances.
    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < highrisk.size(); ++i)
        if (std::find(anchors.begin(), anchors.end(), i) == anchors.end()) rest.push_back(i);
    auto variance_of = [&](std::size_t i) {
        double m = 0;
        for (std::size_t anc : anchors) m += planar_dist(pts[i], pts[anc]);
        m /= static_cast<double>(anchors.size());
        double v = 0;
        for (std::size_t anc : anchors) {
            double d = planar_dist(pts[i], pts[anc]) - m;
            v += d * d;
        }
        return v / static_cast<double>(anchors.size());
    };
    std::sort(rest.begin(), rest.end(), [&](std::size_t i, std::size_t j) {
        double vi = variance_of(i), vj = variance_of(j);
        if (vi != vj) return vi > vj;
        return highrisk[i].customer_id < highrisk[j].customer_id;
    });

    for (std::size_t i : rest) {
        std::vector<std::size_t> trip_order(anchors.size());
        for (std::size_t t = 0; t < trip_order.size(); ++t) trip_order[t] = t;
        std::sort(trip_order.begin(), trip_order.end(), [&](std::size_t t1, std::size_t t2) {
            double d1 = planar_dist(pts[i], pts[anchors[t1]]);
            double d2 = planar_dist(pts[i], pts[anchors[t2]]);
            if (d1 != d2) return d1 < d2;
            return t1 < t2;
        });
        bool placed = false;
        for (std::size_t t : trip_order) {
            auto attempt = bins[t];
            attempt.push_back(highrisk[i]);
            if (check_load(attempt, truck)) {
                bins[t] = std::move(attempt);
                placed = true;
                break;
            }
        }
        if (!placed) return std::nullopt;
    }

    std::vector<Trip> trips;
    for (std::size_t t = 0; t < bins.size(); ++t) {
        Trip tr;
        tr.trip_id = static_cast<int>(t);
        for (const auto& c : bins[t]) tr.members.push_back(c.customer_id);
        trips.push_back(std::move(tr));
    }
    return trips;
}

enum class TripAlgorithm { next_fit, fava };

/// Config-selected division. FAVA starts from the next-fit trip count and
/// adds trips until the assignment succeeds (it must, once every customer
/// fits a truck alone).
inline std::vector<Trip> divide_trips(const std::vector<Customer>& highrisk, const TruckSpec& truck,
                                      TripAlgorithm algo) {
    if (highrisk.empty()) return {};
    auto nf = updated_next_fit(highrisk, truck);
    if (algo == TripAlgorithm::next_fit) return nf;
    for (int n = static_cast<int>(nf.size()); n <= static_cast<int>(highrisk.size()); ++n)
        if (auto trips = fava(highrisk, n, truck)) return *trips;
    throw InfeasibleError("trip division failed even with one trip per customer");
}

} // namespace gasplan
