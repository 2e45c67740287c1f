#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "knot_vector.hpp"
#include "types.hpp"

namespace parnet {

/// t_i = i/m, independent of the points.
inline ParamVec parametrize_uniform(const PointSeq& p) {
    require(p.size() >= 2, "parametrize_uniform: need at least two points");
    ParamVec t(p.size());
    for (std::size_t i = 0; i < p.size(); ++i)
        t[i] = static_cast<double>(i) / static_cast<double>(p.size() - 1);
    return t;
}

namespace detail {

inline ParamVec from_increments(const PointSeq& p, double exponent, const char* name) {
    require(p.size() >= 2, "parametrize: need at least two points");
    ParamVec t(p.size(), 0.0);
    for (std::size_t i = 1; i < p.size(); ++i) {
        double chord = distance(p[i - 1], p[i]);
        require(chord > 0.0, std::string(name) + ": zero-length chord");
        t[i] = t[i - 1] + std::pow(chord, exponent);
    }
    double total = t.back();
    for (double& v : t) v /= total;
    t.back() = 1.0;
    return t;
}

}  // namespace detail

/// Increments proportional to chord lengths.
inline ParamVec parametrize_chordal(const PointSeq& p) {
    return detail::from_increments(p, 1.0, "parametrize_chordal");
}

/// Increments proportional to square roots of chord lengths.
inline ParamVec parametrize_centripetal(const PointSeq& p) {
    return detail::from_increments(p, 0.5, "parametrize_centripetal");
}

/// Interior knots by parameter averaging with stride, the standard rule
/// for approximation: with m = |t|-1, n = num_ctrl-1, p = degree and
/// d = (m+1)/(n-p+1), interior knot j blends t_{i-1} and t_i at
/// i = floor(j*d), alpha = j*d - i. Satisfies Schoenberg-Whitney for t.
inline KnotVector knots_by_averaging(const ParamVec& t, int degree, std::size_t num_ctrl) {
    require(num_ctrl >= static_cast<std::size_t>(degree) + 1,
            "knots_by_averaging: too few control points for degree");
    require(t.size() >= num_ctrl, "knots_by_averaging: more control points than params");
    const std::size_t n = num_ctrl - 1;
    const double d = static_cast<double>(t.size()) / static_cast<double>(n - degree + 1);
    std::vector<double> interior;
    interior.reserve(n - degree);
    for (std::size_t j = 1; j + degree <= n; ++j) {
        double jd = static_cast<double>(j) * d;
        std::size_t i = static_cast<std::size_t>(jd);
        double alpha = jd - static_cast<double>(i);
        interior.push_back((1.0 - alpha) * t[i - 1] + alpha * t[i]);
    }
    return KnotVector::clamped(degree, interior, t.front(), t.back());
}

}  // namespace parnet
