#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "gasplan/core.hpp"

namespace gasplan {

struct SpaceLineFit {
    double a = 0.0;
    double b = 0.0;
    long missed_points = 0; // lattice points of the table the line cuts off
};

namespace detail {

inline long double cap_value(const SpacePoint& p, double eps) {
    return static_cast<long double>(p.small) + 1.0L - static_cast<long double>(eps);
}

inline bool line_feasible(long double a, long double b, const std::vector<SpacePoint>& table,
                          double eps) {
    for (const auto& p : table)
        if (a * p.large + b > cap_value(p, eps) + 1e-9L) return false;
    return true;
}

/// Number of integer loads 0..y_i the line y <= a*x+b cuts off at column x_i,
/// summed over the table: ceil(y_i - (a x_i + b)) clamped at zero.
inline long line_missed(long double a, long double b, const std::vector<SpacePoint>& table) {
    long missed = 0;
    for (const auto& p : table) {
        long double deficit = static_cast<long double>(p.small) - (a * p.large + b);
        if (deficit > 1e-9L) missed += static_cast<long>(std::ceil(static_cast<double>(deficit) - 1e-9));
    }
    return missed;
}

} // namespace detail

/// Fits the line small <= a*large + b against the space table, minimizing the
/// number of missed lattice points subject to a*x_i + b <= y_i + 1 - eps
/// (`relaxed`) or <= y_i (strict, the basic problem). The optimum of this
/// two-variable problem sits on a line through two of the candidate points
/// {(x_i, y_i + 1 - eps)} u {(x_i, y_i)}, so exhaustive pair enumeration is
/// exact at desk scale.
inline SpaceLineFit fit_space_line(const std::vector<SpacePoint>& table, double eps,
                                   bool relaxed = true) {
    if (table.empty()) throw EmptyTableError("space table is empty");
    auto cap = [&](const SpacePoint& p) {
        return relaxed ? detail::cap_value(p, eps) : static_cast<long double>(p.small);
    };

    struct Candidate {
        long double x, y;
    };
    std::vector<Candidate> pts;
    for (const auto& p : table) {
        pts.push_back({static_cast<long double>(p.large), cap(p)});
        pts.push_back({static_cast<long double>(p.large), static_cast<long double>(p.small)});
    }

    bool found = false;
    SpaceLineFit best;
    long double best_a = 0, best_b = 0;
    auto consider = [&](long double a, long double b) {
        // Feasibility against the active cap.
        for (const auto& p : table)
            if (a * p.large + b > cap(p) + 1e-9L) return;
        long missed = detail::line_missed(a, b, table);
        bool take = !found;
        if (found && missed != best.missed_points) take = missed < best.missed_points;
        else if (found) {
            // Tie-break toward the least restrictive line, deterministically.
            if (std::fabs(static_cast<double>(b - best_b)) > 1e-12) take = b > best_b;
            else take = a > best_a;
        }
        if (take) {
            found = true;
            best.missed_points = missed;
            best_a = a;
            best_b = b;
        }
    };

    // Horizontal lines through each candidate point.
    for (const auto& p : pts) consider(0.0L, p.y);
    // Lines through every pair with distinct x.
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            if (pts[i].x == pts[j].x) continue;
            long double a = (pts[j].y - pts[i].y) / (pts[j].x - pts[i].x);
            long double b = pts[i].y - a * pts[i].x;
            consider(a, b);
        }

    if (!found) throw InfeasibleError("no feasible space line (inconsistent table)");
    best.a = static_cast<double>(best_a);
    best.b = static_cast<double>(best_b);
    return best;
}

inline void fit_truck_line(TruckSpec& truck) {
    auto fit = fit_space_line(truck.space_table, truck.epsilon, /*relaxed=*/true);
    truck.line_a = fit.a;
    truck.line_b = fit.b;
    truck.line_fitted = true;
}

/// Aggregate load of a customer set against the truck: total weight, the
/// fitted space line, and the hard cap on large cylinders.
template <typename CustomerRange>
inline bool check_load(const CustomerRange& customers, const TruckSpec& truck) {
    if (!truck.line_fitted) throw ValidationError("truck space line has not been fitted");
    double weight = 0;
    double large = 0, small = 0;
    for (const auto& c : customers) {
        weight += c.cylinder_count * c.cylinder_unit_weight;
        if (c.cylinder_size == CylinderSize::large)
            large += c.cylinder_count;
        else
            small += c.cylinder_count;
    }
    if (weight > truck.max_weight + 1e-9) return false;
    if (large > truck.max_large + 1e-9) return false;
    return small <= truck.line_a * large + truck.line_b + 1e-9;
}

/// The example table from the desk setting: the printed rows plus a linear
/// extension down to zero large cylinders.
inline std::vector<SpacePoint> default_space_table() {
    std::vector<SpacePoint> t{{34, 0}, {33, 1}, {32, 3}, {31, 4}, {30, 5}};
    for (int x = 29; x >= 0; --x)
        t.push_back({x, static_cast<int>(std::floor(5.0 + (30 - x) * 4.0 / 3.0))});
    return t;
}

} // namespace gasplan
