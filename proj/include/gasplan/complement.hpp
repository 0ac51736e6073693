#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gasplan/core.hpp"

namespace gasplan {

enum class GapKind { interpolation, extrapolation };

/// A maximal run of missing readings. Extrapolation gaps sit before the first
/// or after the last reading of the series; `leading` marks the former.
struct Gap {
    std::string meter_id;
    Day start{};   // first missing day D_start
    int length = 0; // n_m
    GapKind kind = GapKind::interpolation;
    bool leading = false;

    Day end() const { return move_date(start, length - 1); } // last missing day
};

inline std::vector<Gap> find_gaps(const MeterSeries& s) {
    std::vector<Gap> gaps;
    int n = s.size();
    int first = -1, last = -1;
    for (int i = 0; i < n; ++i)
        if (s.readings[static_cast<std::size_t>(i)]) {
            if (first < 0) first = i;
            last = i;
        }
    if (first < 0) return gaps; // nothing known; nothing fillable
    if (first > 0)
        gaps.push_back(Gap{s.meter_id, s.start, first, GapKind::extrapolation, true});
    int run = 0;
    for (int i = first; i <= last; ++i) {
        if (!s.readings[static_cast<std::size_t>(i)]) { ++run; continue; }
        if (run > 0)
            gaps.push_back(Gap{s.meter_id, s.day_at(i - run), run, GapKind::interpolation, false});
        run = 0;
    }
    if (last < n - 1)
        gaps.push_back(Gap{s.meter_id, s.day_at(last + 1), n - 1 - last, GapKind::extrapolation, false});
    return gaps;
}

/// Daily usage filled in for a gap: `daily` starts at `daily_start` and the
/// reconstructed cumulative readings cover the gap days themselves.
struct GapFill {
    Day daily_start{};
    std::vector<double> daily;
    std::vector<double> cumulative; // for days gap.start .. gap.start+n_m-1
};

// ---------------------------------------------------------------------------
// Daily-usage views of a series
// ---------------------------------------------------------------------------

/// Observed daily usage from consecutive present readings only.
inline std::map<Day, double> observed_daily(const MeterSeries& s) {
    std::map<Day, double> out;
    for (int i = 0; i + 1 < s.size(); ++i) {
        const auto& a = s.readings[static_cast<std::size_t>(i)];
        const auto& b = s.readings[static_cast<std::size_t>(i + 1)];
        if (a && b) out[s.day_at(i)] = std::max(0.0, *b - *a);
    }
    return out;
}

/// Daily usage with every reading interval spread uniformly across its days.
/// For a smart meter this equals observed_daily; for a conventional meter it
/// is the natural per-day proxy used for similarity and quartiles.
inline std::map<Day, double> interval_mean_daily(const MeterSeries& s) {
    std::map<Day, double> out;
    int prev = -1;
    for (int i = 0; i < s.size(); ++i) {
        if (!s.readings[static_cast<std::size_t>(i)]) continue;
        if (prev >= 0) {
            double diff = *s.readings[static_cast<std::size_t>(i)] - *s.readings[static_cast<std::size_t>(prev)];
            double per_day = std::max(0.0, diff) / static_cast<double>(i - prev);
            for (int d = prev; d < i; ++d) out[s.day_at(d)] = per_day;
        }
        prev = i;
    }
    return out;
}

inline std::vector<double> daily_values(const std::map<Day, double>& m) {
    std::vector<double> v;
    v.reserve(m.size());
    for (const auto& [d, u] : m) v.push_back(u);
    return v;
}

// ---------------------------------------------------------------------------
// Similarity index over complete smart meters
// ---------------------------------------------------------------------------

/// Neighbor lookup over the complete smart meters M_s*. Weights are inverse
/// L2 distances of daily-usage vectors over the longest contiguous run of
/// days both meters cover (minimum `min_overlap`); identical profiles get a
/// large finite weight, ties break on meter id.
class SimilarityIndex {
public:
    explicit SimilarityIndex(int min_overlap = 14) : min_overlap_(min_overlap) {}

    void add_base_meter(const std::string& id, std::map<Day, double> du) {
        base_[id] = std::move(du);
    }
    bool empty() const { return base_.empty(); }
    int size() const { return static_cast<int>(base_.size()); }
    const std::map<std::string, std::map<Day, double>>& base() const { return base_; }

    bool base_covers(const std::string& id, Day from, Day to) const {
        auto it = base_.find(id);
        if (it == base_.end()) return false;
        for (Day d = from; d <= to; d = move_date(d, 1))
            if (!it->second.count(d)) return false;
        return true;
    }

    double base_usage(const std::string& id, Day d) const { return base_.at(id).at(d); }

    struct Neighbor {
        std::string id;
        double weight;
    };

    /// Top-k base meters most similar to `target_du`, excluding `self_id`.
    /// When `cover_from <= cover_to`, only meters covering that day range are
    /// eligible.
    std::vector<Neighbor> neighbors(const std::string& self_id, const std::map<Day, double>& target_du,
                                    int k, Day cover_from = Day{1}, Day cover_to = Day{0}) const {
        std::vector<Neighbor> all;
        for (const auto& [id, du] : base_) {
            if (id == self_id) continue;
            if (cover_from <= cover_to && !base_covers(id, cover_from, cover_to)) continue;
            auto w = weight(target_du, du);
            if (w) all.push_back(Neighbor{id, *w});
        }
        std::sort(all.begin(), all.end(), [](const Neighbor& a, const Neighbor& b) {
            if (a.weight != b.weight) return a.weight > b.weight;
            return a.id < b.id;
        });
        if (static_cast<int>(all.size()) > k) all.resize(static_cast<std::size_t>(k));
        return all;
    }

    /// Inverse L2 distance over the longest shared contiguous day run;
    /// nullopt when the shared run is shorter than min_overlap.
    std::optional<double> weight(const std::map<Day, double>& a, const std::map<Day, double>& b) const {
        // Longest contiguous run of days present in both.
        Day best_start{}, run_start{};
        int best = 0, run = 0;
        Day prev{0};
        for (const auto& [d, _] : a) {
            bool shared = b.count(d) > 0;
            if (shared && run > 0 && date_diff(d, prev) == 1) {
                ++run;
            } else if (shared) {
                run = 1;
                run_start = d;
            } else {
                run = 0;
            }
            if (run > best) { best = run; best_start = run_start; }
            prev = d;
        }
        if (best < min_overlap_) return std::nullopt;
        double ss = 0;
        for (int i = 0; i < best; ++i) {
            Day d = move_date(best_start, i);
            double diff = a.at(d) - b.at(d);
            ss += diff * diff;
        }
        double dist = std::sqrt(ss);
        return dist < 1e-12 ? kIdenticalWeight : 1.0 / dist;
    }

    static constexpr double kIdenticalWeight = 1e12;

private:
    std::map<std::string, std::map<Day, double>> base_;
    int min_overlap_;
};

// ---------------------------------------------------------------------------
// Complement algorithms
// ---------------------------------------------------------------------------

namespace detail {

inline double bound_before(const MeterSeries& s, const Gap& g) {
    auto v = s.reading(move_date(g.start, -1));
    if (!v) throw GapPresentError("meter " + s.meter_id + ": no reading before gap");
    return *v;
}

inline double bound_after(const MeterSeries& s, const Gap& g) {
    auto v = s.reading(move_date(g.start, g.length));
    if (!v) throw GapPresentError("meter " + s.meter_id + ": no reading after gap");
    return *v;
}

/// Turns a daily profile over indices [-1, n_m-1] into a GapFill, rescaling
/// to the bounded total for interpolation and accumulating raw values for
/// extrapolation.
inline GapFill assemble(const MeterSeries& s, const Gap& g, std::vector<double> profile) {
    GapFill out;
    int nm = g.length;
    if (g.kind == GapKind::interpolation) {
        double lo = bound_before(s, g), hi = bound_after(s, g);
        if (hi < lo) throw NonMonotonicError("meter " + s.meter_id + ": bounding readings decrease");
        double total = hi - lo;
        double denom = 0;
        for (double p : profile) denom += p;
        if (denom <= 1e-12) {
            // Degenerate profile: fall back to an even split.
            profile.assign(static_cast<std::size_t>(nm) + 1, 1.0);
            denom = static_cast<double>(nm + 1);
        }
        for (double& p : profile) p = p / denom * total;
        out.daily_start = move_date(g.start, -1);
        out.daily = profile;
        double cu = lo;
        for (int i = 0; i < nm; ++i) {
            cu += profile[static_cast<std::size_t>(i)];
            out.cumulative.push_back(cu);
        }
    } else if (!g.leading) {
        double last = bound_before(s, g);
        out.daily_start = move_date(g.start, -1);
        out.daily = profile;
        double cu = last;
        for (int i = 0; i < nm; ++i) {
            cu += profile[static_cast<std::size_t>(i)];
            out.cumulative.push_back(cu);
        }
    } else {
        // Leading gap: accumulate backwards from the first known reading,
        // clamped at zero so cumulatives stay non-negative and monotone.
        double first_known = bound_after(s, g);
        out.daily_start = g.start;
        out.cumulative.assign(static_cast<std::size_t>(nm), 0.0);
        double cu = first_known;
        for (int i = nm - 1; i >= 0; --i) {
            cu = std::max(0.0, cu - profile[static_cast<std::size_t>(i) + 1]);
            out.cumulative[static_cast<std::size_t>(i)] = cu;
        }
        out.daily.resize(static_cast<std::size_t>(nm));
        for (int i = 0; i < nm; ++i) {
            double next = (i + 1 < nm) ? out.cumulative[static_cast<std::size_t>(i) + 1] : first_known;
            out.daily[static_cast<std::size_t>(i)] = next - out.cumulative[static_cast<std::size_t>(i)];
        }
    }
    return out;
}

} // namespace detail

/// Even split of the bounded total across the gap.
inline GapFill linear_interpolate(const MeterSeries& s, const Gap& g) {
    if (g.kind != GapKind::interpolation) throw ValidationError("linear_interpolate needs an interior gap");
    return detail::assemble(s, g, std::vector<double>(static_cast<std::size_t>(g.length) + 1, 1.0));
}

/// Constant extension at tq (the meter's own third quartile of daily usage).
inline GapFill linear_extrapolate(const MeterSeries& s, const Gap& g, double tq) {
    if (g.kind != GapKind::extrapolation) throw ValidationError("linear_extrapolate needs an edge gap");
    return detail::assemble(s, g, std::vector<double>(static_cast<std::size_t>(g.length) + 1, tq));
}

inline double tq_of(const MeterSeries& s) {
    auto du = interval_mean_daily(s);
    if (du.empty()) throw NoHistoryError("meter " + s.meter_id + ": no daily usage to take a quartile of");
    return third_quartile(daily_values(du));
}

/// Weekday-mean profile, rescaled to the bounded total for interpolation.
inline GapFill periodic_complement(const MeterSeries& s, const Gap& g) {
    auto du = observed_daily(s);
    double wd_sum[7] = {};
    int wd_cnt[7] = {};
    for (const auto& [d, u] : du) {
        wd_sum[weekday(d)] += u;
        wd_cnt[weekday(d)] += 1;
    }
    std::vector<double> profile;
    for (int i = -1; i < g.length; ++i) {
        int wd = weekday(move_date(g.start, i));
        if (wd_cnt[wd] == 0)
            throw WeekdayUncoveredError("meter " + s.meter_id + ": no history for weekday " + std::to_string(wd));
        profile.push_back(wd_sum[wd] / wd_cnt[wd]);
    }
    return detail::assemble(s, g, std::move(profile));
}

namespace detail {

inline GapFill neighbor_complement(const MeterSeries& s, const Gap& g, const SimilarityIndex& index,
                                   int k, bool weighted) {
    Day from = move_date(g.start, -1);
    Day to = g.end();
    auto nbrs = index.neighbors(s.meter_id, interval_mean_daily(s), k, from, to);
    if (nbrs.empty()) throw EmptyNeighborSetError("meter " + s.meter_id + ": no similar meters cover the gap");
    double wsum = 0;
    for (const auto& nb : nbrs) wsum += nb.weight;
    std::vector<double> profile(static_cast<std::size_t>(g.length) + 1, 0.0);
    for (const auto& nb : nbrs) {
        double w = weighted ? nb.weight / wsum : 1.0 / static_cast<double>(nbrs.size());
        for (int i = -1; i < g.length; ++i)
            profile[static_cast<std::size_t>(i + 1)] += w * index.base_usage(nb.id, move_date(g.start, i));
    }
    return assemble(s, g, std::move(profile));
}

} // namespace detail

/// Unweighted mean of the k most similar complete smart meters.
inline GapFill similar_complement(const MeterSeries& s, const Gap& g, const SimilarityIndex& index, int k) {
    return detail::neighbor_complement(s, g, index, k, /*weighted=*/false);
}

/// Similarity-weighted mean (weights normalised to sum to one).
inline GapFill knn_complement(const MeterSeries& s, const Gap& g, const SimilarityIndex& index, int k) {
    return detail::neighbor_complement(s, g, index, k, /*weighted=*/true);
}

// ---------------------------------------------------------------------------
// High-usage classification and long-missing reclassification
// ---------------------------------------------------------------------------

/// Maximum third quartile of daily usage over the complete smart meters.
inline double tq_sm(const SimilarityIndex& index) {
    if (index.empty()) throw NoHistoryError("no complete smart meters");
    double best = -1;
    for (const auto& [id, du] : index.base())
        if (!du.empty()) best = std::max(best, third_quartile(daily_values(du)));
    if (best < 0) throw NoHistoryError("no usable smart-meter history");
    return best;
}

/// A meter counts as high usage when its own Q3 strictly exceeds TQ_SM.
inline bool classify_high_usage(const MeterSeries& s, const SimilarityIndex& index) {
    auto du = interval_mean_daily(s);
    if (du.empty()) return false;
    return third_quartile(daily_values(du)) > tq_sm(index);
}

/// A smart meter whose readings are missing for more than the trailing 80
/// days (counted back from `today`) is handled like a conventional meter.
inline bool reclassify_long_missing(const MeterSeries& s, Day today, int threshold_days = 80) {
    if (s.kind != MeterKind::smart) return false;
    std::optional<Day> last_present;
    for (int i = std::min(s.size() - 1, date_diff(today, s.start)); i >= 0; --i)
        if (s.readings[static_cast<std::size_t>(i)]) {
            last_present = s.day_at(i);
            break;
        }
    if (!last_present) return true;
    return date_diff(today, *last_present) > threshold_days;
}

// ---------------------------------------------------------------------------
// Driver
// ---------------------------------------------------------------------------

enum class ComplementAlgorithm { linear, periodic, similar, knn };

struct ComplementConfig {
    ComplementAlgorithm smart_algorithm = ComplementAlgorithm::linear;
    int k = 10;
    int min_overlap = 14;
    int long_missing_days = 80;
};

struct ComplementedMeter {
    MeterSeries series;                   // gap-free over the known span
    std::vector<Provenance> reading_prov; // aligned with series.readings
    bool treated_conventional = false;
    bool high_usage = false;
};

/// Builds the similarity base M_s* (smart meters with no missing readings).
inline SimilarityIndex build_similarity_index(const std::map<std::string, MeterSeries>& meters,
                                              int min_overlap = 14) {
    SimilarityIndex index(min_overlap);
    for (const auto& [id, s] : meters) {
        if (s.kind != MeterKind::smart) continue;
        bool complete = s.size() >= 2;
        for (const auto& r : s.readings)
            if (!r) { complete = false; break; }
        if (complete) index.add_base_meter(id, observed_daily(s));
    }
    return index;
}

/// Fills every gap of one meter, applying the paper's selection rule:
/// conventional (or long-missing smart) meters use kNN, unless flagged high
/// usage, which forces the Linear algorithm; healthy smart meters use the
/// configured algorithm. Gaps are processed in chronological order so later
/// fills see earlier ones. Failures fall back to Linear, then to a flat
/// zero-usage extension so the driver is total.
inline ComplementedMeter complement_meter(const MeterSeries& original, const SimilarityIndex& index,
                                          const ComplementConfig& cfg, Day today) {
    ComplementedMeter out;
    out.series = original;
    out.reading_prov.assign(static_cast<std::size_t>(original.size()), Provenance::observed);
    out.treated_conventional = original.kind == MeterKind::conventional ||
                               reclassify_long_missing(original, today, cfg.long_missing_days);
    if (!index.empty() && !interval_mean_daily(original).empty())
        out.high_usage = classify_high_usage(original, index);
    out.series.high_usage = out.high_usage;

    ComplementAlgorithm algo = cfg.smart_algorithm;
    if (out.treated_conventional)
        algo = out.high_usage ? ComplementAlgorithm::linear : ComplementAlgorithm::knn;

    auto gaps = find_gaps(out.series);
    for (const auto& g : gaps) {
        GapFill fill;
        bool done = false;
        auto try_algo = [&](ComplementAlgorithm a) {
            if (done) return;
            try {
                switch (a) {
                    case ComplementAlgorithm::linear:
                        fill = g.kind == GapKind::interpolation
                                   ? linear_interpolate(out.series, g)
                                   : linear_extrapolate(out.series, g, tq_of(original));
                        break;
                    case ComplementAlgorithm::periodic:
                        fill = periodic_complement(out.series, g);
                        break;
                    case ComplementAlgorithm::similar:
                        fill = similar_complement(out.series, g, index, cfg.k);
                        break;
                    case ComplementAlgorithm::knn:
                        fill = knn_complement(out.series, g, index, cfg.k);
                        break;
                }
                done = true;
            } catch (const Error&) {
                // fall through to the next candidate
            }
        };
        try_algo(algo);
        try_algo(ComplementAlgorithm::linear);
        if (!done) {
            // Last resort: flat extension / even split with zero usage.
            if (g.kind == GapKind::interpolation) {
                fill = linear_interpolate(out.series, g);
            } else {
                fill = linear_extrapolate(out.series, g, 0.0);
            }
        }
        for (int i = 0; i < g.length; ++i) {
            Day d = move_date(g.start, i);
            out.series.set_reading(d, fill.cumulative[static_cast<std::size_t>(i)]);
            out.reading_prov[static_cast<std::size_t>(date_diff(d, out.series.start))] =
                g.kind == GapKind::interpolation ? Provenance::interpolated : Provenance::extrapolated;
        }
    }
    return out;
}

inline std::map<std::string, ComplementedMeter> complement_all(
    const std::map<std::string, MeterSeries>& meters, const ComplementConfig& cfg, Day today) {
    auto index = build_similarity_index(meters, cfg.min_overlap);
    std::map<std::string, ComplementedMeter> out;
    for (const auto& [id, s] : meters) out.emplace(id, complement_meter(s, index, cfg, today));
    return out;
}

} // namespace gasplan
