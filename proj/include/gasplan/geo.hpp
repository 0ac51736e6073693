#pragma once

#include <cmath>
#include <map>
#include <string>
#include <utility>

#include "gasplan/core.hpp"

namespace gasplan {

inline constexpr double kEarthRadiusKm = 6371.0;
inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double d) { return d * kPi / 180.0; }

inline double haversine_km(double lon1, double lat1, double lon2, double lat2) {
    double dlat = deg2rad(lat2 - lat1);
    double dlon = deg2rad(lon2 - lon1);
    double a = std::sin(dlat / 2) * std::sin(dlat / 2) +
               std::cos(deg2rad(lat1)) * std::cos(deg2rad(lat2)) *
                   std::sin(dlon / 2) * std::sin(dlon / 2);
    return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(a)));
}

/// Equirectangular projection to kilometres around a reference latitude;
/// good enough for ordering and variance computations at city scale.
struct PlanarPoint {
    double x = 0.0, y = 0.0;
};

inline PlanarPoint planar_xm(double lon, double lat, double ref_lat) {
    double kx = kEarthRadiusKm * std::cos(deg2rad(ref_lat)) * kPi / 180.0;
    double ky = kEarthRadiusKm * kPi / 180.0;
    return {lon * kx, lat * ky};
}

inline double planar_dist(const PlanarPoint& a, const PlanarPoint& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

/// Travel distances/durations between named sites (customers plus "depot").
/// Backed by an explicit matrix when one was loaded; otherwise haversine at a
/// constant speed.
class DistanceProvider {
public:
    DistanceProvider() = default;
    DistanceProvider(const World& world) : speed_kmh_(world.truck_speed_kmh) {
        sites_["depot"] = {world.depot.lon, world.depot.lat};
        for (const auto& [id, c] : world.customers) sites_[id] = {c.lon, c.lat};
    }

    void set_matrix_entry(const std::string& from, const std::string& to, double km, double minutes) {
        matrix_[{from, to}] = {km, minutes};
    }
    bool has_matrix() const { return !matrix_.empty(); }

    double km(const std::string& from, const std::string& to) const {
        if (from == to) return 0.0;
        if (auto it = matrix_.find({from, to}); it != matrix_.end()) return it->second.first;
        auto a = site(from), b = site(to);
        return haversine_km(a.first, a.second, b.first, b.second);
    }

    double minutes(const std::string& from, const std::string& to) const {
        if (from == to) return 0.0;
        if (auto it = matrix_.find({from, to}); it != matrix_.end()) return it->second.second;
        return km(from, to) / speed_kmh_ * 60.0;
    }

private:
    std::pair<double, double> site(const std::string& id) const {
        auto it = sites_.find(id);
        if (it == sites_.end()) throw ValidationError("unknown site in distance lookup: " + id);
        return it->second;
    }

    std::map<std::string, std::pair<double, double>> sites_;
    std::map<std::pair<std::string, std::string>, std::pair<double, double>> matrix_;
    double speed_kmh_ = 30.0;
};

} // namespace gasplan
