#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "gasplan/core.hpp"
#include "gasplan/forecast.hpp"

namespace gasplan {

// ---------------------------------------------------------------------------
// Deterministic normal CDF
// ---------------------------------------------------------------------------

namespace detail {

/// Cody-style rational approximation of erf/erfc, so that probabilities are
/// bit-identical across platforms (they feed MILP objective coefficients).
/// jint = 0 -> erf(x), jint = 1 -> erfc(x).
inline double calerf(double x, int jint) {
    static const double a[5] = {3.16112374387056560e00, 1.13864154151050156e02,
                                3.77485237685302021e02, 3.20937758913846947e03,
                                1.85777706184603153e-1};
    static const double b[4] = {2.36012909523441209e01, 2.44024637934444173e02,
                                1.28261652607737228e03, 2.84423683343917062e03};
    static const double c[9] = {5.64188496988670089e-1, 8.88314979438837594e00,
                                6.61191906371416295e01, 2.98635138197400131e02,
                                8.81952221241769090e02, 1.71204761263407058e03,
                                2.05107837782607147e03, 1.23033935479799725e03,
                                2.15311535474403846e-8};
    static const double d[8] = {1.57449261107098347e01, 1.17693950891312499e02,
                                5.37181101862009858e02, 1.62138957456669019e03,
                                3.29079923573345963e03, 4.36261909014324716e03,
                                3.43936767414372164e03, 1.23033935480374942e03};
    static const double p[6] = {3.05326634961232344e-1, 3.60344899949804439e-1,
                                1.25781726111229246e-1, 1.60837851487422766e-2,
                                6.58749161529837803e-4, 1.63153871373020978e-2};
    static const double q[5] = {2.56852019228982242e00, 1.87295284992346047e00,
                                5.27905102951428412e-1, 6.05183413124413191e-2,
                                2.33520497626869185e-3};
    constexpr double sqrpi = 5.6418958354775628695e-1;
    constexpr double thresh = 0.46875;
    constexpr double xsmall = 1.11e-16;
    constexpr double xbig = 26.543;

    double y = std::fabs(x);
    double result;
    if (y <= thresh) {
        double ysq = y > xsmall ? y * y : 0.0;
        double xnum = a[4] * ysq;
        double xden = ysq;
        for (int i = 0; i < 3; ++i) {
            xnum = (xnum + a[i]) * ysq;
            xden = (xden + b[i]) * ysq;
        }
        result = x * (xnum + a[3]) / (xden + b[3]);
        if (jint == 1) result = 1.0 - result;
        return result;
    }
    if (y <= 4.0) {
        double xnum = c[8] * y;
        double xden = y;
        for (int i = 0; i < 7; ++i) {
            xnum = (xnum + c[i]) * y;
            xden = (xden + d[i]) * y;
        }
        result = (xnum + c[7]) / (xden + d[7]);
        double ysq = std::trunc(y * 16.0) / 16.0;
        double del = (y - ysq) * (y + ysq);
        result = std::exp(-ysq * ysq) * std::exp(-del) * result;
    } else if (y < xbig) {
        double ysq = 1.0 / (y * y);
        double xnum = p[5] * ysq;
        double xden = ysq;
        for (int i = 0; i < 4; ++i) {
            xnum = (xnum + p[i]) * ysq;
            xden = (xden + q[i]) * ysq;
        }
        result = ysq * (xnum + p[4]) / (xden + q[4]);
        result = (sqrpi - result) / y;
        double ysq2 = std::trunc(y * 16.0) / 16.0;
        double del = (y - ysq2) * (y + ysq2);
        result = std::exp(-ysq2 * ysq2) * std::exp(-del) * result;
    } else {
        result = 0.0;
    }
    // result currently holds erfc(|x|).
    if (jint == 1) return x < 0 ? 2.0 - result : result;
    return x < 0 ? result - 1.0 : 1.0 - result;
}

} // namespace detail

inline double erfc_det(double x) { return detail::calerf(x, 1); }

inline double normal_cdf(double z) {
    return 0.5 * erfc_det(-z * 0.70710678118654752440);
}

// ---------------------------------------------------------------------------
// Per-customer usage distribution
// ---------------------------------------------------------------------------

/// Cumulative usage distribution of a customer: index i holds the mean and
/// variance of the total usage over days D0 .. D0+i (i+1 days), summed over
/// the customer's meters by the reproductive property of the normal.
struct CustomerDistribution {
    std::string customer_id;
    Day start{};
    std::vector<double> cum_mean;
    std::vector<double> cum_var;

    int horizon() const { return static_cast<int>(cum_mean.size()); }
};

inline CustomerDistribution aggregate(const Customer& c,
                                      const std::map<std::string, ForecastResult>& forecasts) {
    CustomerDistribution d;
    d.customer_id = c.customer_id;
    int n_f = -1;
    for (const auto& mid : c.meters) {
        auto it = forecasts.find(mid);
        if (it == forecasts.end())
            throw MissingForecastError("customer " + c.customer_id + ": no forecast for meter " + mid);
        int len = static_cast<int>(it->second.mean.size());
        n_f = n_f < 0 ? len : std::min(n_f, len);
        d.start = it->second.start;
    }
    if (n_f <= 0) throw MissingForecastError("customer " + c.customer_id + ": empty forecasts");
    d.cum_mean.assign(static_cast<std::size_t>(n_f), 0.0);
    d.cum_var.assign(static_cast<std::size_t>(n_f), 0.0);
    for (const auto& mid : c.meters) {
        const auto& f = forecasts.at(mid);
        for (int i = 0; i < n_f; ++i) {
            d.cum_mean[static_cast<std::size_t>(i)] += f.mean[static_cast<std::size_t>(i)];
            d.cum_var[static_cast<std::size_t>(i)] += f.variance[static_cast<std::size_t>(i)];
        }
    }
    for (int i = 1; i < n_f; ++i) {
        d.cum_mean[static_cast<std::size_t>(i)] += d.cum_mean[static_cast<std::size_t>(i) - 1];
        d.cum_var[static_cast<std::size_t>(i)] += d.cum_var[static_cast<std::size_t>(i) - 1];
    }
    return d;
}

/// P(usage over days 0..day_index >= remaining - eps_alpha). Zero variance
/// degenerates to a step function.
inline double shortage_probability(const CustomerDistribution& d, double remaining, double eps_alpha,
                                   int day_index) {
    double threshold = remaining - eps_alpha;
    double mu = d.cum_mean.at(static_cast<std::size_t>(day_index));
    double var = d.cum_var.at(static_cast<std::size_t>(day_index));
    if (var <= 0.0) return mu >= threshold ? 1.0 : 0.0;
    return normal_cdf((mu - threshold) / std::sqrt(var));
}

/// First index i >= n_f such that the customer can be served on day
/// D0 + i + 1 (per the displayed definition). `avail` must already combine
/// staff working days with the customer's own availability.
inline int availability_shift(const std::function<bool(Day)>& avail, Day d0, int n_f,
                              int search_bound = 60) {
    for (int i = n_f; i <= n_f + search_bound; ++i)
        if (avail(move_date(d0, i + 1))) return i;
    throw NoAvailableDateError("no available date within " + std::to_string(search_bound) +
                               " days after day " + std::to_string(n_f));
}

// ---------------------------------------------------------------------------
// Categorization
// ---------------------------------------------------------------------------

enum class RiskCategory { low, moderate, high };

struct RiskAssessment {
    std::string customer_id;
    Day start{};                     // D0 (planning day)
    std::vector<double> r_high;      // index j -> candidate delivery day D0+1+j
    std::vector<double> r_mdr;
    std::vector<int> shifted_index;  // n_f* used for day j
    std::vector<RiskCategory> category;
};

/// Threshold comparisons use >= ; a customer that turns high within
/// D_lbd days is promoted from low to moderate (look-back rule). The
/// `extended_high` flags may be longer than the vectors to let promotions
/// see past the horizon end.
inline std::vector<RiskCategory> categorize(const std::vector<double>& r_high,
                                            const std::vector<double>& r_mdr, double q_high,
                                            double q_mdr, int lookback_days,
                                            const std::vector<bool>* extended_high = nullptr) {
    int n = static_cast<int>(r_high.size());
    std::vector<bool> high(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) high[static_cast<std::size_t>(j)] = r_high[static_cast<std::size_t>(j)] >= q_high;
    auto high_at = [&](int j) {
        if (extended_high && j < static_cast<int>(extended_high->size()))
            return (*extended_high)[static_cast<std::size_t>(j)];
        return j < n && high[static_cast<std::size_t>(j)];
    };
    std::vector<RiskCategory> cat(static_cast<std::size_t>(n), RiskCategory::low);
    for (int j = 0; j < n; ++j) {
        if (high[static_cast<std::size_t>(j)]) {
            cat[static_cast<std::size_t>(j)] = RiskCategory::high;
        } else if (r_mdr[static_cast<std::size_t>(j)] >= q_mdr) {
            cat[static_cast<std::size_t>(j)] = RiskCategory::moderate;
        } else {
            for (int dd = 1; dd <= lookback_days; ++dd)
                if (high_at(j + dd)) {
                    cat[static_cast<std::size_t>(j)] = RiskCategory::moderate;
                    break;
                }
        }
    }
    return cat;
}

/// Planner-side estimate of the remaining gas at d0: the stored amount at the
/// customer's reference day minus the (complemented) usage since then.
inline double estimate_remaining(const Customer& c,
                                 const std::map<std::string, std::map<Day, double>>& daily_by_meter,
                                 Day d0) {
    double s = c.remaining_gas;
    for (const auto& mid : c.meters) {
        auto it = daily_by_meter.find(mid);
        if (it == daily_by_meter.end()) continue;
        for (const auto& [d, u] : it->second)
            if (d >= c.reference_day && d < d0) s -= u;
    }
    return s;
}

/// Full per-customer assessment for `horizon` candidate delivery days
/// starting tomorrow. Internally evaluates lookback_days past the horizon so
/// the promotion rule sees customers that turn high just beyond it. Shift
/// indices are clamped to the forecast length.
inline RiskAssessment assess(const Customer& c, const CustomerDistribution& dist, double remaining,
                             const Hyperparams& hp, const std::function<bool(Day)>& avail, Day d0,
                             int horizon, int search_bound = 60) {
    RiskAssessment a;
    a.customer_id = c.customer_id;
    a.start = d0;
    double eps_high = hp.alpha_high * c.total_capacity();
    double eps_mdr = hp.alpha_mdr * c.total_capacity();
    int ext = horizon + hp.lookback_days;
    std::vector<bool> ext_high;
    for (int j = 0; j < ext; ++j) {
        int idx = availability_shift(avail, d0, j + 1, search_bound);
        idx = std::min(idx, dist.horizon() - 1);
        double rh = shortage_probability(dist, remaining, eps_high, idx);
        bool is_high = rh >= hp.q_high;
        ext_high.push_back(is_high);
        if (j < horizon) {
            a.shifted_index.push_back(idx);
            a.r_high.push_back(rh);
            a.r_mdr.push_back(shortage_probability(dist, remaining, eps_mdr, idx));
        }
    }
    a.category = categorize(a.r_high, a.r_mdr, hp.q_high, hp.q_mdr, hp.lookback_days, &ext_high);
    return a;
}

} // namespace gasplan
