#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "gasplan/complement.hpp"
#include "gasplan/core.hpp"

namespace gasplan {

// ---------------------------------------------------------------------------
// Autoregressive model for smart meters
// ---------------------------------------------------------------------------

struct ArModel {
    std::vector<double> beta; // beta_0 (intercept), beta_1 .. beta_{n_p}
    int n_p = 0;
};

namespace detail {

/// Gaussian elimination with partial pivoting; throws SingularDesignError on
/// a pivot below tolerance.
inline std::vector<double> solve_dense(std::vector<std::vector<double>> a, std::vector<double> b) {
    int n = static_cast<int>(b.size());
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::fabs(a[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)]) >
                std::fabs(a[static_cast<std::size_t>(piv)][static_cast<std::size_t>(col)]))
                piv = r;
        if (std::fabs(a[static_cast<std::size_t>(piv)][static_cast<std::size_t>(col)]) < 1e-12)
            throw SingularDesignError("rank-deficient design matrix");
        std::swap(a[static_cast<std::size_t>(col)], a[static_cast<std::size_t>(piv)]);
        std::swap(b[static_cast<std::size_t>(col)], b[static_cast<std::size_t>(piv)]);
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            double f = a[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] /
                       a[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
            if (f == 0) continue;
            for (int c = col; c < n; ++c)
                a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] -=
                    f * a[static_cast<std::size_t>(col)][static_cast<std::size_t>(c)];
            b[static_cast<std::size_t>(r)] -= f * b[static_cast<std::size_t>(col)];
        }
    }
    std::vector<double> x(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        x[static_cast<std::size_t>(i)] = b[static_cast<std::size_t>(i)] / a[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
    return x;
}

} // namespace detail

/// Ordinary least squares on one-step-ahead design rows [1, du_{t-1}, ...,
/// du_{t-n_p}] over the n_s most recent targets. `history` is daily usage in
/// day order, ending with du_{D0-1}. An optional ridge term handles
/// rank-deficient designs (constant histories).
inline ArModel fit_ar(const std::vector<double>& history, int n_p, int n_s, double ridge = 0.0) {
    int len = static_cast<int>(history.size());
    if (len < n_p + n_s)
        throw InsufficientHistoryError("need " + std::to_string(n_p + n_s) + " days, have " +
                                       std::to_string(len));
    int dim = n_p + 1;
    std::vector<std::vector<double>> xtx(static_cast<std::size_t>(dim),
                                         std::vector<double>(static_cast<std::size_t>(dim), 0.0));
    std::vector<double> xty(static_cast<std::size_t>(dim), 0.0);
    for (int s = 0; s < n_s; ++s) {
        int t = len - 1 - s; // target index in history
        std::vector<double> row(static_cast<std::size_t>(dim));
        row[0] = 1.0;
        for (int j = 1; j <= n_p; ++j) row[static_cast<std::size_t>(j)] = history[static_cast<std::size_t>(t - j)];
        for (int i = 0; i < dim; ++i) {
            xty[static_cast<std::size_t>(i)] += row[static_cast<std::size_t>(i)] * history[static_cast<std::size_t>(t)];
            for (int j = 0; j < dim; ++j)
                xtx[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] +=
                    row[static_cast<std::size_t>(i)] * row[static_cast<std::size_t>(j)];
        }
    }
    for (int i = 0; i < dim; ++i) xtx[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] += ridge;
    ArModel m;
    m.n_p = n_p;
    m.beta = detail::solve_dense(std::move(xtx), std::move(xty));
    return m;
}

/// Multi-step recursion: forecasts feed back as lags; every emitted value is
/// clamped at zero before reuse (usage cannot be negative and an unclamped
/// recursion can diverge).
inline std::vector<double> forecast_recursive(const ArModel& m, const std::vector<double>& history, int n_f) {
    if (static_cast<int>(history.size()) < m.n_p)
        throw InsufficientHistoryError("need " + std::to_string(m.n_p) + " trailing days");
    std::vector<double> lags(history.end() - m.n_p, history.end()); // lags[0] oldest
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n_f));
    for (int i = 0; i < n_f; ++i) {
        double y = m.beta[0];
        for (int j = 1; j <= m.n_p; ++j)
            y += m.beta[static_cast<std::size_t>(j)] * lags[lags.size() - static_cast<std::size_t>(j)];
        y = std::max(0.0, y);
        out.push_back(y);
        lags.push_back(y);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Conventional-meter models
// ---------------------------------------------------------------------------

/// Similarity-weighted average of the neighbors' forecast vectors.
inline std::vector<double> forecast_knn(const std::string& meter_id,
                                        const std::map<Day, double>& target_du,
                                        const std::map<std::string, std::vector<double>>& neighbor_forecasts,
                                        const SimilarityIndex& index, int k) {
    auto nbrs = index.neighbors(meter_id, target_du, k);
    std::erase_if(nbrs, [&](const auto& nb) { return !neighbor_forecasts.count(nb.id); });
    if (nbrs.empty()) throw EmptyNeighborSetError("meter " + meter_id + ": no neighbors with forecasts");
    double wsum = 0;
    for (const auto& nb : nbrs) wsum += nb.weight;
    std::size_t n_f = neighbor_forecasts.at(nbrs.front().id).size();
    std::vector<double> out(n_f, 0.0);
    for (const auto& nb : nbrs) {
        const auto& f = neighbor_forecasts.at(nb.id);
        for (std::size_t i = 0; i < n_f; ++i) out[i] += nb.weight / wsum * f[i];
    }
    return out;
}

/// Constant vector at the meter's own third quartile.
inline std::vector<double> forecast_tq(const std::vector<double>& daily_history, int n_f) {
    if (daily_history.empty()) throw NoHistoryError("tq forecast without history");
    return std::vector<double>(static_cast<std::size_t>(n_f), third_quartile(daily_history));
}

/// Constant vector at the average usage over all meters (mean of per-meter
/// means, so every meter weighs equally).
inline std::vector<double> forecast_allmean(const std::vector<std::vector<double>>& all_histories, int n_f) {
    double sum = 0;
    int cnt = 0;
    for (const auto& h : all_histories) {
        if (h.empty()) continue;
        sum += mean(h);
        ++cnt;
    }
    if (cnt == 0) throw NoHistoryError("allmean forecast without any history");
    return std::vector<double>(static_cast<std::size_t>(n_f), sum / cnt);
}

// ---------------------------------------------------------------------------
// Forecast error variance
// ---------------------------------------------------------------------------

/// Backtests the forecaster over n_s anchor dates D0-n_f .. D0-(n_f+n_s-1)
/// and returns dv = (1/n_s) * sum (e_i - mean(e))^2 elementwise. The
/// forecaster is re-run from each anchor using only data before it.
inline std::vector<double> estimate_error_variance(
    const std::function<std::vector<double>(Day)>& forecast_from,
    const std::map<Day, double>& actual, Day d0, int n_f, int n_s) {
    std::vector<std::vector<double>> errors;
    for (int i = n_f; i < n_f + n_s; ++i) {
        Day anchor = move_date(d0, -i);
        auto fc = forecast_from(anchor);
        if (static_cast<int>(fc.size()) != n_f)
            throw InsufficientHistoryError("backtest forecast has wrong length");
        std::vector<double> e(static_cast<std::size_t>(n_f));
        for (int j = 0; j < n_f; ++j) {
            auto it = actual.find(move_date(anchor, j));
            if (it == actual.end())
                throw InsufficientHistoryError("no actual usage on " + day_to_iso(move_date(anchor, j)));
            e[static_cast<std::size_t>(j)] = it->second - fc[static_cast<std::size_t>(j)];
        }
        errors.push_back(std::move(e));
    }
    std::vector<double> ebar(static_cast<std::size_t>(n_f), 0.0);
    for (const auto& e : errors)
        for (int j = 0; j < n_f; ++j) ebar[static_cast<std::size_t>(j)] += e[static_cast<std::size_t>(j)] / n_s;
    std::vector<double> dv(static_cast<std::size_t>(n_f), 0.0);
    for (const auto& e : errors)
        for (int j = 0; j < n_f; ++j) {
            double d = e[static_cast<std::size_t>(j)] - ebar[static_cast<std::size_t>(j)];
            dv[static_cast<std::size_t>(j)] += d * d / n_s;
        }
    return dv;
}

// ---------------------------------------------------------------------------
// Model selection and driver
// ---------------------------------------------------------------------------

enum class ModelTag { ar, knn, tq, allmean };

inline const char* to_string(ModelTag t) {
    switch (t) {
        case ModelTag::ar: return "ar";
        case ModelTag::knn: return "knn";
        case ModelTag::tq: return "tq";
        case ModelTag::allmean: return "allmean";
    }
    return "?";
}

struct ForecastResult {
    std::string meter_id;
    Day start{};                   // D0
    std::vector<double> mean;      // length n_f
    std::vector<double> variance;  // length n_f
    ModelTag tag = ModelTag::allmean;
};

/// smart & healthy -> ar; conventional (or long-missing smart) -> tq when
/// high usage else knn. Training failures downgrade to allmean, so the
/// selection is total.
inline ModelTag select_model(bool treated_conventional, bool high_usage) {
    if (!treated_conventional) return ModelTag::ar;
    return high_usage ? ModelTag::tq : ModelTag::knn;
}

struct ForecastConfig {
    int n_p = 7;
    int n_s = 14;
    int n_f = 9;
    int k = 10;
    double ridge = 0.0;
};

namespace detail {

inline std::vector<double> du_values_until(const std::map<Day, double>& du, Day end_exclusive) {
    std::vector<double> v;
    for (const auto& [d, u] : du) {
        if (d >= end_exclusive) break;
        v.push_back(u);
    }
    return v;
}

} // namespace detail

/// Runs the per-meter model selection over complemented meters. The kNN model
/// averages the AR forecasts of the complete smart meters nearest to the
/// target, per the flow in the paper; variances come from re-running each
/// forecaster across historical anchors, and fall back to zero when the
/// history cannot support a backtest.
inline std::map<std::string, ForecastResult> forecast_all(
    const std::map<std::string, ComplementedMeter>& comp, const SimilarityIndex& index, Day d0,
    const ForecastConfig& cfg) {
    std::map<std::string, ForecastResult> out;
    std::map<std::string, std::map<Day, double>> du_full;  // complemented daily usage
    std::vector<std::vector<double>> all_histories;

    for (const auto& [id, cm] : comp) {
        std::map<Day, double> du;
        try {
            auto d = daily_from_cumulative(cm.series, &cm.reading_prov);
            for (int i = 0; i < d.size(); ++i)
                if (d.day_at(i) < d0) du[d.day_at(i)] = d.values[static_cast<std::size_t>(i)];
        } catch (const Error&) {
            // corrupt or empty series: leave du empty, allmean will cover it
        }
        all_histories.push_back(detail::du_values_until(du, d0));
        du_full[id] = std::move(du);
    }

    auto allmean_from = [&](Day anchor) {
        std::vector<std::vector<double>> hs;
        hs.reserve(du_full.size());
        for (const auto& [id, du] : du_full) hs.push_back(detail::du_values_until(du, anchor));
        return forecast_allmean(hs, cfg.n_f);
    };

    auto variance_or_zero = [&](const std::function<std::vector<double>(Day)>& fc,
                                const std::map<Day, double>& actual) {
        try {
            return estimate_error_variance(fc, actual, d0, cfg.n_f, cfg.n_s);
        } catch (const Error&) {
            return std::vector<double>(static_cast<std::size_t>(cfg.n_f), 0.0);
        }
    };

    // Pass 1: AR forecasts for smart meters (also the neighbor pool for kNN).
    std::map<std::string, std::vector<double>> ar_means;
    for (const auto& [id, cm] : comp) {
        if (cm.treated_conventional) continue;
        ForecastResult r;
        r.meter_id = id;
        r.start = d0;
        const auto& du = du_full[id];
        auto ar_from = [&](Day anchor) {
            auto hist = detail::du_values_until(du, anchor);
            auto model = fit_ar(hist, cfg.n_p, cfg.n_s, cfg.ridge);
            return forecast_recursive(model, hist, cfg.n_f);
        };
        try {
            r.mean = ar_from(d0);
            r.tag = ModelTag::ar;
            r.variance = variance_or_zero(ar_from, du);
            ar_means[id] = r.mean;
        } catch (const Error&) {
            r.tag = ModelTag::allmean;
            r.mean = allmean_from(d0);
            r.variance = variance_or_zero(allmean_from, du);
        }
        out.emplace(id, std::move(r));
    }

    // Pass 2: conventional (and conventional-treated) meters.
    for (const auto& [id, cm] : comp) {
        if (out.count(id)) continue;
        ForecastResult r;
        r.meter_id = id;
        r.start = d0;
        const auto& du = du_full[id];
        ModelTag want = select_model(true, cm.high_usage);
        try {
            if (want == ModelTag::tq) {
                auto tq_from = [&](Day anchor) {
                    return forecast_tq(detail::du_values_until(du, anchor), cfg.n_f);
                };
                r.mean = tq_from(d0);
                r.tag = ModelTag::tq;
                r.variance = variance_or_zero(tq_from, du);
            } else {
                auto proxy = interval_mean_daily(cm.series);
                r.mean = forecast_knn(id, proxy, ar_means, index, cfg.k);
                r.tag = ModelTag::knn;
                // Backtest the kNN model by averaging the neighbors' AR
                // forecasts re-fit at each anchor.
                auto nbrs = index.neighbors(id, proxy, cfg.k);
                std::erase_if(nbrs, [&](const auto& nb) { return !ar_means.count(nb.id); });
                auto knn_from = [&, nbrs](Day anchor) {
                    std::map<std::string, std::vector<double>> nf;
                    for (const auto& nb : nbrs) {
                        const auto& ndu = du_full.at(nb.id);
                        auto hist = detail::du_values_until(ndu, anchor);
                        auto model = fit_ar(hist, cfg.n_p, cfg.n_s, cfg.ridge);
                        nf[nb.id] = forecast_recursive(model, hist, cfg.n_f);
                    }
                    return forecast_knn(id, proxy, nf, index, cfg.k);
                };
                r.variance = variance_or_zero(knn_from, du);
            }
        } catch (const Error&) {
            r.tag = ModelTag::allmean;
            try {
                r.mean = allmean_from(d0);
            } catch (const Error&) {
                r.mean.assign(static_cast<std::size_t>(cfg.n_f), 0.0);
            }
            r.variance = variance_or_zero(allmean_from, du);
        }
        out.emplace(id, std::move(r));
    }
    return out;
}

} // namespace gasplan
