#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "curve.hpp"
#include "types.hpp"

namespace parnet {

/// Signed curvature per point via the osculating (circumscribed) circle
/// through each interior triple; sign follows turn orientation. Collinear
/// or degenerate triples get 0, endpoints copy their neighbor.
inline std::vector<double> curvature(const PointSeq& p) {
    require(p.size() >= 3, "curvature: need at least three points");
    std::vector<double> k(p.size(), 0.0);
    for (std::size_t i = 1; i + 1 < p.size(); ++i) {
        const Vec2 &a = p[i - 1], &b = p[i], &c = p[i + 1];
        double ab = distance(a, b), bc = distance(b, c), ca = distance(c, a);
        double denom = ab * bc * ca;
        k[i] = denom > 0.0 ? 2.0 * cross(b - a, c - a) / denom : 0.0;
    }
    k.front() = k[1];
    k.back() = k[k.size() - 2];
    return k;
}

/// Trapezoidal estimate of the total absolute curvature
///   sum_i (|k_i| + |k_{i+1}|) * |p_{i+1} - p_i| / 2.
inline double total_curvature(const PointSeq& p, const std::vector<double>& kappas) {
    require(p.size() == kappas.size(), "total_curvature: length mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < p.size(); ++i)
        sum += (std::abs(kappas[i]) + std::abs(kappas[i + 1])) * distance(p[i], p[i + 1]) / 2.0;
    return sum;
}

/// Length of the polygon through p.
inline double arclen(const PointSeq& p) {
    require(p.size() >= 2, "arclen: need at least two points");
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) sum += distance(p[i], p[i + 1]);
    return sum;
}

/// Cumulative polygon length at every point; front() == 0.
inline std::vector<double> arclen_prefix(const PointSeq& p) {
    std::vector<double> acc(p.size(), 0.0);
    for (std::size_t i = 1; i < p.size(); ++i)
        acc[i] = acc[i - 1] + distance(p[i - 1], p[i]);
    return acc;
}

namespace detail {

inline double directed_hausdorff_sq(const PointSeq& a, const PointSeq& b, double seed_sq) {
    double hmax = seed_sq;
    for (const Vec2& x : a) {
        double cmin = std::numeric_limits<double>::infinity();
        for (const Vec2& y : b) {
            cmin = std::min(cmin, squared_distance(x, y));
            if (cmin <= hmax) break;  // x cannot raise the running max
        }
        if (cmin > hmax) hmax = cmin;
    }
    return hmax;
}

}  // namespace detail

/// Symmetric discrete Hausdorff distance between two point sets.
inline double hausdorff(const PointSeq& a, const PointSeq& b) {
    require(!a.empty() && !b.empty(), "hausdorff: empty input");
    double h = detail::directed_hausdorff_sq(a, b, 0.0);
    h = detail::directed_hausdorff_sq(b, a, h);
    return std::sqrt(h);
}

/// Hausdorff distance between data points and a curve restricted to
/// [a, b], the curve discretized at density * |points| parameters.
inline double hausdorff_curve_points(const BSplineCurve& curve, const PointSeq& points,
                                     double a, double b, std::size_t density = 10) {
    require(!points.empty(), "hausdorff_curve_points: empty input");
    require(density >= 1, "hausdorff_curve_points: density must be >= 1");
    std::size_t count = std::max<std::size_t>(2, density * points.size());
    return hausdorff(curve.sample_range(a, b, count), points);
}

/// Same, over the curve's whole domain.
inline double hausdorff_curve_points(const BSplineCurve& curve, const PointSeq& points,
                                     std::size_t density = 10) {
    return hausdorff_curve_points(curve, points, curve.knots().domain_start(),
                                  curve.knots().domain_end(), density);
}

/// Per-axis min-max normalization into [0,1]^2. A degenerate axis (zero
/// extent) maps to the constant 0.5; all points identical is an error.
inline PointSeq normalize_points(const PointSeq& p) {
    require(!p.empty(), "normalize_points: empty input");
    Vec2 lo = p.front(), hi = p.front();
    for (const Vec2& q : p) {
        lo.x = std::min(lo.x, q.x);
        lo.y = std::min(lo.y, q.y);
        hi.x = std::max(hi.x, q.x);
        hi.y = std::max(hi.y, q.y);
    }
    const double dx = hi.x - lo.x, dy = hi.y - lo.y;
    require(dx > 0.0 || dy > 0.0, "normalize_points: all points identical");
    PointSeq out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        out[i].x = dx > 0.0 ? (p[i].x - lo.x) / dx : 0.5;
        out[i].y = dy > 0.0 ? (p[i].y - lo.y) / dy : 0.5;
    }
    return out;
}

/// Percentile with the linear-interpolation rule: rank = q*(N-1)/100 on
/// the sorted values, fractional ranks blend the two neighbors.
inline double percentile(std::vector<double> values, double q) {
    require(!values.empty(), "percentile: empty input");
    require(q >= 0.0 && q <= 100.0, "percentile: q outside [0, 100]");
    std::sort(values.begin(), values.end());
    double rank = q * static_cast<double>(values.size() - 1) / 100.0;
    std::size_t lo = static_cast<std::size_t>(rank);
    double frac = rank - static_cast<double>(lo);
    if (lo + 1 >= values.size()) return values.back();
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

namespace detail {

inline int orientation_sign(const Vec2& a, const Vec2& b, const Vec2& c) {
    double v = cross(b - a, c - a);
    return (v > 0.0) - (v < 0.0);
}

inline bool on_segment(const Vec2& a, const Vec2& b, const Vec2& q) {
    return std::min(a.x, b.x) <= q.x && q.x <= std::max(a.x, b.x) &&
           std::min(a.y, b.y) <= q.y && q.y <= std::max(a.y, b.y);
}

}  // namespace detail

/// Exact (orientation-based) closed-segment intersection test.
inline bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1,
                               const Vec2& q2) {
    int o1 = detail::orientation_sign(p1, p2, q1);
    int o2 = detail::orientation_sign(p1, p2, q2);
    int o3 = detail::orientation_sign(q1, q2, p1);
    int o4 = detail::orientation_sign(q1, q2, p2);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && detail::on_segment(p1, p2, q1)) return true;
    if (o2 == 0 && detail::on_segment(p1, p2, q2)) return true;
    if (o3 == 0 && detail::on_segment(q1, q2, p1)) return true;
    if (o4 == 0 && detail::on_segment(q1, q2, p2)) return true;
    return false;
}

/// True when any two non-adjacent polyline segments intersect.
inline bool polyline_self_intersects(const PointSeq& p) {
    if (p.size() < 4) return false;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        for (std::size_t j = i + 2; j + 1 < p.size(); ++j) {
            if (i == 0 && j + 2 == p.size() && p.front() == p.back())
                continue;  // closed polylines share their seam point
            if (segments_intersect(p[i], p[i + 1], p[j], p[j + 1])) return true;
        }
    }
    return false;
}

}  // namespace parnet
