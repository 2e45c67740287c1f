#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "curve.hpp"
#include "dataset.hpp"
#include "fit.hpp"
#include "geometry.hpp"
#include "heads.hpp"
#include "knot_vector.hpp"
#include "mlp.hpp"
#include "training.hpp"
#include "types.hpp"

namespace parnet {

enum class RefinementStrategy { kKsn, kMidpoint };

inline std::string to_string(RefinementStrategy s) {
    return s == RefinementStrategy::kKsn ? "ksn" : "midpoint";
}

inline RefinementStrategy refinement_strategy_from(const std::string& s) {
    if (s == "ksn") return RefinementStrategy::kKsn;
    if (s == "midpoint") return RefinementStrategy::kMidpoint;
    throw ParseError("unknown refinement strategy: " + s);
}

struct PipelineConfig {
    int degree = 3;
    std::size_t l = 100;  // network input length per segment
    double kappa_threshold = 0.0;
    double hausdorff_target = 1e-2;
    std::size_t max_knots = 20;  // interior knots, including segment boundaries
    std::size_t sample_density = 10;
    bool curvature_median_split = false;
    RefinementStrategy strategy = RefinementStrategy::kKsn;
};

/// Calibration constant for the segmentation rule: the q-th percentile
/// of total absolute curvature across the training split (all instances
/// when the dataset carries no split).
inline double compute_kappa_threshold(const Dataset& ds, double q = 98.0) {
    std::vector<std::size_t> idx = ds.split_indices(false);
    if (idx.empty()) {
        idx.resize(ds.instances.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
    }
    require(!idx.empty(), "compute_kappa_threshold: empty dataset");
    std::vector<double> totals;
    totals.reserve(idx.size());
    for (std::size_t i : idx) {
        const PointSeq& p = ds.instances[i].points;
        totals.push_back(total_curvature(p, curvature(p)));
    }
    return percentile(std::move(totals), q);
}

namespace detail {

inline double slice_total_curvature(const PointSeq& p, std::size_t first, std::size_t last) {
    if (last - first + 1 < 3) return 0.0;
    PointSeq s(p.begin() + static_cast<std::ptrdiff_t>(first),
               p.begin() + static_cast<std::ptrdiff_t>(last) + 1);
    return total_curvature(s, curvature(s));
}

inline std::size_t split_index(const PointSeq& p, std::size_t first, std::size_t last,
                               bool curvature_median) {
    if (!curvature_median || last - first + 1 < 3) return first + (last - first) / 2;
    // First index where the accumulated curvature integral reaches half
    // the slice total, kept strictly inside the range.
    PointSeq s(p.begin() + static_cast<std::ptrdiff_t>(first),
               p.begin() + static_cast<std::ptrdiff_t>(last) + 1);
    std::vector<double> k = curvature(s);
    const double half = total_curvature(s, k) / 2.0;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        acc += (std::abs(k[i]) + std::abs(k[i + 1])) * distance(s[i], s[i + 1]) / 2.0;
        if (acc >= half)
            return std::clamp(first + i + 1, first + 1, last - 1);
    }
    return first + (last - first) / 2;
}

inline void segment_recurse(const PointSeq& p, std::size_t first, std::size_t last,
                            double threshold, bool curvature_median,
                            std::vector<std::pair<std::size_t, std::size_t>>& out) {
    if (slice_total_curvature(p, first, last) <= threshold) {
        out.emplace_back(first, last);
        return;
    }
    if (last - first + 1 < 4)
        throw SegmentationError(
            "segment: a range above the curvature threshold has fewer than 4 points");
    std::size_t mid = split_index(p, first, last, curvature_median);
    segment_recurse(p, first, mid, threshold, curvature_median, out);
    segment_recurse(p, mid, last, threshold, curvature_median, out);
}

}  // namespace detail

/// Recursive split into index ranges whose total absolute curvature sits
/// at or below the threshold. Adjacent ranges share their boundary point.
inline std::vector<std::pair<std::size_t, std::size_t>> segment(
    const PointSeq& p, double threshold, bool curvature_median = false) {
    require(p.size() >= 4, "segment: need at least four points");
    require(threshold >= 0.0, "segment: negative threshold");
    std::vector<std::pair<std::size_t, std::size_t>> out;
    detail::segment_recurse(p, 0, p.size() - 1, threshold, curvature_median, out);
    return out;
}

struct Resampled {
    PointSeq points;
    std::vector<std::size_t> removed;  // slice-relative indices dropped
    std::vector<bool> temporary;       // per output point: inserted midpoint
};

/// Bring a slice to exactly l points: evenly thin when too long, sweep
/// chord midpoints in from the left when too short.
inline Resampled resample(const PointSeq& slice, std::size_t l) {
    require(slice.size() >= 2, "resample: need at least two points");
    require(l >= 2, "resample: need at least two output points");
    const std::size_t n = slice.size();
    Resampled r;
    if (n >= l) {
        const double m = static_cast<double>(n - 1);
        std::vector<bool> kept(n, false);
        for (std::size_t i = 0; i < l; ++i)
            kept[static_cast<std::size_t>(
                std::llround(static_cast<double>(i) * m / static_cast<double>(l - 1)))] = true;
        for (std::size_t j = 0; j < n; ++j) {
            if (kept[j])
                r.points.push_back(slice[j]);
            else
                r.removed.push_back(j);
        }
        r.temporary.assign(l, false);
        return r;
    }
    r.points = slice;
    r.temporary.assign(n, false);
    while (r.points.size() < l) {
        for (std::size_t i = 0; i + 1 < r.points.size() && r.points.size() < l; i += 2) {
            Vec2 mid = (r.points[i] + r.points[i + 1]) * 0.5;
            r.points.insert(r.points.begin() + static_cast<std::ptrdiff_t>(i) + 1, mid);
            r.temporary.insert(r.temporary.begin() + static_cast<std::ptrdiff_t>(i) + 1, true);
        }
    }
    return r;
}

namespace detail {

/// resample() applied to points and their parameters in lockstep;
/// inserted chord midpoints get the parameter midpoint.
inline std::pair<PointSeq, ParamVec> resample_with_params(const PointSeq& pts,
                                                          const ParamVec& ts,
                                                          std::size_t l) {
    require(pts.size() == ts.size(), "resample_with_params: size mismatch");
    Resampled r = resample(pts, l);
    ParamVec out;
    out.reserve(l);
    if (pts.size() >= l) {
        std::size_t next_removed = 0;
        for (std::size_t j = 0; j < ts.size(); ++j) {
            if (next_removed < r.removed.size() && r.removed[next_removed] == j)
                ++next_removed;
            else
                out.push_back(ts[j]);
        }
        return {std::move(r.points), std::move(out)};
    }
    out = ts;
    while (out.size() < l)
        for (std::size_t i = 0; i + 1 < out.size() && out.size() < l; i += 2)
            out.insert(out.begin() + static_cast<std::ptrdiff_t>(i) + 1,
                       (out[i] + out[i + 1]) / 2.0);
    return {std::move(r.points), std::move(out)};
}

}  // namespace detail

struct Segment {
    std::size_t first = 0;  // original index range, inclusive
    std::size_t last = 0;
    PointSeq resampled;                 // exactly l points
    Vec2 box_min, box_max;              // normalization box of the resampled points
    std::vector<std::size_t> removed;   // original indices thinned away
    std::vector<bool> temporary;        // per resampled point: inserted midpoint
};

/// Segmentation plus per-segment resampling and normalization records.
inline std::vector<Segment> make_segments(const PointSeq& p, const PipelineConfig& cfg) {
    std::vector<Segment> segs;
    for (auto [first, last] : segment(p, cfg.kappa_threshold, cfg.curvature_median_split)) {
        PointSeq slice(p.begin() + static_cast<std::ptrdiff_t>(first),
                       p.begin() + static_cast<std::ptrdiff_t>(last) + 1);
        Resampled r = resample(slice, cfg.l);
        Segment s;
        s.first = first;
        s.last = last;
        s.resampled = std::move(r.points);
        s.temporary = std::move(r.temporary);
        for (std::size_t j : r.removed) s.removed.push_back(first + j);
        s.box_min = s.box_max = s.resampled.front();
        for (const Vec2& q : s.resampled) {
            s.box_min.x = std::min(s.box_min.x, q.x);
            s.box_min.y = std::min(s.box_min.y, q.y);
            s.box_max.x = std::max(s.box_max.x, q.x);
            s.box_max.y = std::max(s.box_max.y, q.y);
        }
        segs.push_back(std::move(s));
    }
    return segs;
}

struct AssembledParams {
    ParamVec t;                    // one parameter per original point
    std::vector<double> interior;  // knots at the segment boundaries
};

/// Stitch per-segment network parameters into one global vector: segment
/// spans sized by arc length, thinned points re-inserted by chord-length
/// interpolation between their surviving neighbors, midpoint insertions
/// dropped.
inline AssembledParams assemble_parameters(const PointSeq& p,
                                           const std::vector<Segment>& segs,
                                           const Mlp& ppn) {
    require(!segs.empty(), "assemble_parameters: no segments");
    require(segs.front().first == 0 && segs.back().last == p.size() - 1,
            "assemble_parameters: segments do not cover the points");
    for (std::size_t k = 0; k + 1 < segs.size(); ++k)
        require(segs[k].last == segs[k + 1].first,
                "assemble_parameters: segments must share boundary points");

    const std::vector<double> pre = arclen_prefix(p);
    const double total = pre.back();
    require(total > 0.0, "assemble_parameters: degenerate point sequence");

    std::vector<double> u(segs.size() + 1, 0.0);
    for (std::size_t k = 0; k < segs.size(); ++k)
        u[k + 1] = u[k] + (pre[segs[k].last] - pre[segs[k].first]) / total;
    u.back() = 1.0;

    ParamVec t(p.size(), 0.0);
    for (std::size_t k = 0; k < segs.size(); ++k) {
        const Segment& seg = segs[k];
        ParamVec tbar = ppn_parametrize(ppn, seg.resampled);

        std::vector<std::size_t> kept;
        {
            std::size_t next_removed = 0;
            for (std::size_t j = seg.first; j <= seg.last; ++j) {
                if (next_removed < seg.removed.size() && seg.removed[next_removed] == j)
                    ++next_removed;
                else
                    kept.push_back(j);
            }
        }
        std::size_t kpos = 0;
        for (std::size_t r = 0; r < seg.resampled.size(); ++r) {
            if (seg.temporary[r]) continue;
            require(kpos < kept.size(), "assemble_parameters: segment bookkeeping broken");
            t[kept[kpos]] = std::lerp(u[k], u[k + 1], tbar[r]);
            ++kpos;
        }
        require(kpos == kept.size(), "assemble_parameters: segment bookkeeping broken");

        for (std::size_t j : seg.removed) {
            auto it = std::upper_bound(kept.begin(), kept.end(), j);
            std::size_t omega = *it;
            std::size_t alpha = *(it - 1);
            double denom = pre[omega] - pre[alpha];
            t[j] = denom > 0.0 ? t[alpha] + (t[omega] - t[alpha]) * (pre[j] - pre[alpha]) / denom
                               : (t[alpha] + t[omega]) / 2.0;
        }
    }
    t.front() = 0.0;
    t.back() = 1.0;
    for (std::size_t i = 1; i < t.size(); ++i)
        if (!(t[i] > t[i - 1]))
            throw InvalidStateError("assemble_parameters: parameters not strictly increasing");

    AssembledParams out;
    out.t = std::move(t);
    for (std::size_t k = 1; k < segs.size(); ++k) out.interior.push_back(u[k]);
    return out;
}

/// Nearest parameter strictly inside (a, b) to the proposed knot, ties
/// to the lower value; parameters already used as knots are passed over.
inline double snap_into_span(const ParamVec& t, const std::vector<double>& knots, double a,
                             double b, double proposed) {
    double best = 0.0;
    double best_dist = std::numeric_limits<double>::infinity();
    bool found = false;
    for (double ti : t) {
        if (!(ti > a && ti < b)) continue;
        if (std::find(knots.begin(), knots.end(), ti) != knots.end()) continue;
        double d = std::abs(ti - proposed);
        if (d < best_dist) {
            best_dist = d;
            best = ti;
            found = true;
        }
    }
    if (!found)
        throw UnrefinableError("snap_into_span: no free parameter strictly inside the span");
    return best;
}

struct ApproximationResult {
    BSplineCurve curve;
    ParamVec t;
    std::vector<double> hausdorff_history;  // one entry per fit
    std::vector<double> inserted_knots;     // snapping decisions, in order
    bool reached_target = false;
};

/// End-to-end approximation: segment, resample, parametrize with the
/// first network, fit with endpoint interpolation, then add one knot at
/// a time (placed by the second network or at span midpoints) in the
/// span with the worst Hausdorff distance until the target is met, the
/// knot budget is spent, or no span has a free parameter value left.
/// Returns the best fit seen.
inline ApproximationResult parnet_approximate(const PointSeq& p, const Mlp& ppn,
                                              const Mlp* ksn, const PipelineConfig& cfg) {
    require(p.size() >= 4, "parnet_approximate: need at least four points");
    require(cfg.strategy == RefinementStrategy::kMidpoint || ksn != nullptr,
            "parnet_approximate: knot network required for the ksn strategy");
    AssembledParams ap = assemble_parameters(p, make_segments(p, cfg), ppn);
    std::vector<double> interior = ap.interior;
    const ParamVec& t = ap.t;

    ApproximationResult res{fit_constrained(p, t, KnotVector::clamped(cfg.degree, interior)),
                            t,
                            {},
                            {},
                            false};
    double best_h = std::numeric_limits<double>::infinity();
    while (true) {
        KnotVector kv = KnotVector::clamped(cfg.degree, interior);
        BSplineCurve curve = fit_constrained(p, t, kv);
        double h = hausdorff_curve_points(curve, p, cfg.sample_density);
        res.hausdorff_history.push_back(h);
        if (h < best_h) {
            best_h = h;
            res.curve = curve;
        }
        if (h <= cfg.hausdorff_target) {
            res.reached_target = true;
            break;
        }
        if (interior.size() >= cfg.max_knots) break;

        // Rank spans by their local Hausdorff distance.
        std::vector<double> bounds{0.0};
        bounds.insert(bounds.end(), interior.begin(), interior.end());
        bounds.push_back(1.0);
        struct SpanScore {
            double h, a, b;
        };
        std::vector<SpanScore> ranked;
        for (std::size_t s = 0; s + 1 < bounds.size(); ++s) {
            PointSeq span_pts;
            for (std::size_t i = 0; i < t.size(); ++i)
                if (t[i] >= bounds[s] && t[i] <= bounds[s + 1]) span_pts.push_back(p[i]);
            if (span_pts.empty()) continue;
            double sh = hausdorff_curve_points(curve, span_pts, bounds[s], bounds[s + 1],
                                               cfg.sample_density);
            ranked.push_back({sh, bounds[s], bounds[s + 1]});
        }
        std::sort(ranked.begin(), ranked.end(),
                  [](const SpanScore& x, const SpanScore& y) { return x.h > y.h; });

        bool inserted = false;
        for (const SpanScore& span : ranked) {
            try {
                double proposed;
                if (cfg.strategy == RefinementStrategy::kKsn) {
                    PointSeq sp;
                    ParamVec st;
                    for (std::size_t i = 0; i < t.size(); ++i) {
                        if (t[i] < span.a || t[i] > span.b) continue;
                        sp.push_back(p[i]);
                        st.push_back((t[i] - span.a) / (span.b - span.a));
                    }
                    if (sp.size() < 2)
                        throw UnrefinableError("parnet_approximate: span too thin");
                    auto [rp, rt] = detail::resample_with_params(sp, st, cfg.l);
                    proposed = std::lerp(span.a, span.b, ksn_predict(*ksn, rp, rt));
                } else {
                    proposed = (span.a + span.b) / 2.0;
                }
                double snapped = snap_into_span(t, kv.values(), span.a, span.b, proposed);
                interior.insert(
                    std::upper_bound(interior.begin(), interior.end(), snapped), snapped);
                res.inserted_knots.push_back(snapped);
                inserted = true;
                break;
            } catch (const UnrefinableError&) {
                continue;
            }
        }
        // Every span rejected the knot: the parameter values are used up,
        // so further refinement is impossible and the best fit so far wins.
        if (!inserted) break;
    }
    return res;
}

}  // namespace parnet
