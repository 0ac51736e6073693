#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace gasplan {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonMonotonicError : Error { using Error::Error; };
struct GapPresentError : Error { using Error::Error; };
struct NoHistoryError : Error { using Error::Error; };
struct WeekdayUncoveredError : Error { using Error::Error; };
struct EmptyNeighborSetError : Error { using Error::Error; };
struct InsufficientHistoryError : Error { using Error::Error; };
struct SingularDesignError : Error { using Error::Error; };
struct MissingForecastError : Error { using Error::Error; };
struct NoAvailableDateError : Error { using Error::Error; };
struct EmptyTableError : Error { using Error::Error; };
struct CustomerTooLargeError : Error { using Error::Error; };
struct InfeasibleError : Error { using Error::Error; };
struct CannotSatisfyError : Error { using Error::Error; };
struct EmptyLogError : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };

// ---------------------------------------------------------------------------
// Calendar
// ---------------------------------------------------------------------------

/// A calendar day as a plain ordinal (days since 1970-01-01). All date
/// arithmetic is exact integer arithmetic; rendering to yyyy-mm-dd happens
/// only at the I/O boundary.
struct Day {
    std::int32_t ordinal = 0;

    friend auto operator<=>(const Day&, const Day&) = default;
};

inline Day move_date(Day d, std::int32_t k) { return Day{d.ordinal + k}; }

/// Number of days d1 lies after d2 (negative when before).
inline std::int32_t date_diff(Day d1, Day d2) { return d1.ordinal - d2.ordinal; }

/// 0 = Monday ... 6 = Sunday. 1970-01-01 was a Thursday.
inline int weekday(Day d) {
    int w = static_cast<int>((d.ordinal + 3) % 7);
    return w < 0 ? w + 7 : w;
}

inline bool is_weekend(Day d) { return weekday(d) >= 5; }

// Civil-date conversions (proleptic Gregorian, days since 1970-01-01).
inline std::int32_t days_from_civil(int y, unsigned m, unsigned dd) {
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + dd - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<int>(doe) - 719468;
}

inline void civil_from_days(std::int32_t z, int& y, unsigned& m, unsigned& d) {
    z += 719468;
    const int era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int yr = static_cast<int>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y = yr + (m <= 2);
}

inline Day day_from_ymd(int y, unsigned m, unsigned d) { return Day{days_from_civil(y, m, d)}; }

/// Parses "yyyy-mm-dd".
inline Day day_from_iso(const std::string& s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-')
        throw ParseError("bad date: '" + s + "' (expected yyyy-mm-dd)");
    for (int i : {0, 1, 2, 3, 5, 6, 8, 9})
        if (s[i] < '0' || s[i] > '9') throw ParseError("bad date: '" + s + "'");
    int y = std::stoi(s.substr(0, 4));
    unsigned m = static_cast<unsigned>(std::stoi(s.substr(5, 2)));
    unsigned d = static_cast<unsigned>(std::stoi(s.substr(8, 2)));
    if (m < 1 || m > 12 || d < 1 || d > 31) throw ParseError("bad date: '" + s + "'");
    return day_from_ymd(y, m, d);
}

inline std::string day_to_iso(Day day) {
    int y;
    unsigned m, d;
    civil_from_days(day.ordinal, y, m, d);
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", y, m, d);
    return buf;
}

// ---------------------------------------------------------------------------
// Meter readings and daily usage
// ---------------------------------------------------------------------------

enum class MeterKind { smart, conventional };

/// Cumulative meter readings over a contiguous span of days; absent values
/// are missing readings. Cumulative usage is non-decreasing where present.
struct MeterSeries {
    std::string meter_id;
    MeterKind kind = MeterKind::smart;
    Day start{};
    std::vector<std::optional<double>> readings;  // index i -> day start+i
    bool high_usage = false;

    int size() const { return static_cast<int>(readings.size()); }
    Day day_at(int i) const { return move_date(start, i); }
    bool in_range(Day d) const {
        int i = date_diff(d, start);
        return i >= 0 && i < size();
    }
    std::optional<double> reading(Day d) const {
        return in_range(d) ? readings[static_cast<std::size_t>(date_diff(d, start))]
                           : std::nullopt;
    }
    void set_reading(Day d, double v) {
        readings.at(static_cast<std::size_t>(date_diff(d, start))) = v;
    }
};

enum class Provenance { observed, interpolated, extrapolated };

/// Daily usage values over a contiguous span (value at index i is the usage
/// between day start+i and start+i+1, i.e. du_D = cu_{D+1} - cu_D).
struct DailyUsage {
    Day start{};
    std::vector<double> values;
    std::vector<Provenance> provenance;

    int size() const { return static_cast<int>(values.size()); }
    Day day_at(int i) const { return move_date(start, i); }
    bool in_range(Day d) const {
        int i = date_diff(d, start);
        return i >= 0 && i < size();
    }
    double at(Day d) const { return values.at(static_cast<std::size_t>(date_diff(d, start))); }
};

/// Converts a gap-free cumulative series into daily usage. du_D inherits the
/// provenance of whichever bounding reading (cu_D or cu_{D+1}) was
/// reconstructed, preferring the later one.
inline DailyUsage daily_from_cumulative(const MeterSeries& series,
                                        const std::vector<Provenance>* reading_prov = nullptr) {
    DailyUsage out;
    out.start = series.start;
    if (series.size() < 2) return out;
    out.values.reserve(static_cast<std::size_t>(series.size() - 1));
    out.provenance.reserve(static_cast<std::size_t>(series.size() - 1));
    for (int i = 0; i + 1 < series.size(); ++i) {
        const auto& a = series.readings[static_cast<std::size_t>(i)];
        const auto& b = series.readings[static_cast<std::size_t>(i + 1)];
        if (!a || !b)
            throw GapPresentError("meter " + series.meter_id + ": missing reading on " +
                                  day_to_iso(series.day_at(a ? i + 1 : i)));
        double du = *b - *a;
        if (du < 0)
            throw NonMonotonicError("meter " + series.meter_id + ": cumulative usage decreases at " +
                                    day_to_iso(series.day_at(i + 1)));
        out.values.push_back(du);
        Provenance p = Provenance::observed;
        if (reading_prov) {
            Provenance pa = (*reading_prov)[static_cast<std::size_t>(i)];
            Provenance pb = (*reading_prov)[static_cast<std::size_t>(i + 1)];
            p = (pb != Provenance::observed) ? pb : pa;
        }
        out.provenance.push_back(p);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Customers, truck, world
// ---------------------------------------------------------------------------

enum class CylinderSize { large, small };

struct Customer {
    std::string customer_id;
    double lon = 0.0, lat = 0.0;
    std::vector<std::string> meters;
    int cylinder_count = 1;            // cn
    double cylinder_unit_weight = 0.0; // cw, kg
    CylinderSize cylinder_size = CylinderSize::large;
    double cylinder_capacity = 0.0;    // m^3 per cylinder
    double remaining_gas = 0.0;        // m^3 at reference_day
    Day reference_day{};
    double tw_lb = 0.0, tw_ub = 24.0 * 60.0; // minutes of day
    std::set<Day> unavailable_days;          // availability defaults to 1
    double replacement_duration = 10.0;      // rep, minutes

    double total_capacity() const { return cylinder_capacity * cylinder_count; }
    bool customer_available(Day d) const { return !unavailable_days.count(d); }
};

/// Piecewise table row: with x large cylinders loaded, at most y small ones fit.
struct SpacePoint {
    int large = 0;
    int small = 0;
};

struct TruckSpec {
    double max_weight = 1000.0;          // W, kg
    std::vector<SpacePoint> space_table; // y non-increasing in x
    int max_large = 34;                  // M_Large
    double epsilon = 1e-6;
    // Fitted line small <= a*large + b, produced by fit_space_line.
    double line_a = 0.0, line_b = 0.0;
    bool line_fitted = false;
};

struct Hyperparams {
    double alpha_high = 0.0;  // remaining-gas rate threshold for high risk
    double q_high = 0.9;      // probability threshold for high risk
    double alpha_mdr = 0.05;
    double q_mdr = 0.1;
    int lookback_days = 3;    // D_lbd
    int plan_horizon = 3;     // D_ph
    int n_p = 7;              // AR lag length
    int n_s = 14;             // training samples
    int n_f = 9;              // forecast days
    int k = 10;               // neighbors
};

struct Depot {
    double lon = 0.0, lat = 0.0;
};

struct World {
    std::map<std::string, Customer> customers;
    std::map<std::string, MeterSeries> meters;
    Depot depot;
    TruckSpec truck;
    double work_lb = 7 * 60.0;   // staff window, minutes of day
    double work_ub = 19 * 60.0;
    double overwork_limit = 0.0; // 0 -> default work_ub + 60
    double truck_speed_kmh = 30.0;
    double supernode_break = 0.0; // rep for supernodes, minutes
    Hyperparams hp;

    double overwork() const { return overwork_limit > 0 ? overwork_limit : work_ub + 60.0; }

    void validate() const {
        for (const auto& [id, c] : customers) {
            if (c.customer_id != id) throw ValidationError("customer id mismatch: " + id);
            if (c.cylinder_count < 1) throw ValidationError("customer " + id + ": cylinder_count < 1");
            if (!(c.tw_lb < c.tw_ub)) throw ValidationError("customer " + id + ": empty time window");
            if (c.remaining_gas > c.total_capacity() + 1e-9)
                throw ValidationError("customer " + id + ": remaining gas exceeds capacity");
            for (const auto& m : c.meters)
                if (!meters.count(m))
                    throw ValidationError("customer " + id + ": unknown meter " + m);
        }
        if (!(work_lb < work_ub)) throw ValidationError("empty staff window");
    }
};

// ---------------------------------------------------------------------------
// Small numeric helpers shared across modules
// ---------------------------------------------------------------------------

/// Type-7 quantile (linear interpolation between order statistics).
inline double quantile(std::vector<double> v, double q) {
    if (v.empty()) throw NoHistoryError("quantile of empty sample");
    std::sort(v.begin(), v.end());
    double h = (static_cast<double>(v.size()) - 1.0) * q;
    auto lo = static_cast<std::size_t>(std::floor(h));
    auto hi = std::min(lo + 1, v.size() - 1);
    double frac = h - std::floor(h);
    return v[lo] + frac * (v[hi] - v[lo]);
}

inline double third_quartile(const std::vector<double>& v) { return quantile(v, 0.75); }

inline double mean(const std::vector<double>& v) {
    if (v.empty()) throw NoHistoryError("mean of empty sample");
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

} // namespace gasplan
