#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "basis.hpp"
#include "knot_vector.hpp"
#include "types.hpp"

namespace parnet {

/// B-spline curve: clamped knot vector plus matching control points.
class BSplineCurve {
  public:
    BSplineCurve(KnotVector knots, PointSeq control_points)
        : knots_(std::move(knots)), ctrl_(std::move(control_points)) {
        require(ctrl_.size() == knots_.num_control_points(),
                "curve: control point count must match the knot vector");
    }

    const KnotVector& knots() const { return knots_; }
    const PointSeq& control_points() const { return ctrl_; }
    int degree() const { return knots_.degree(); }

    /// Point on the curve at parameter u, via the nonzero basis span.
    Vec2 evaluate(double u) const {
        std::size_t span = knots_.find_span(u);
        auto N = basis_nonzero(knots_, u, span);
        Vec2 p{0.0, 0.0};
        for (int j = 0; j <= degree(); ++j)
            p += N[j] * ctrl_[span - degree() + j];
        return p;
    }

    /// Curve sampled at `count` parameters uniformly spanning the domain.
    PointSeq sample(std::size_t count) const {
        require(count >= 2, "sample: need at least two samples");
        PointSeq out;
        out.reserve(count);
        return sample_range(knots_.domain_start(), knots_.domain_end(), count);
    }

    /// Curve sampled at `count` parameters uniformly spanning [a, b].
    PointSeq sample_range(double a, double b, std::size_t count) const {
        require(count >= 2 && a < b, "sample_range: bad range or count");
        PointSeq out;
        out.reserve(count);
        // std::lerp hits a and b exactly and never oversteps them, so the
        // end samples stay inside the knot domain.
        for (std::size_t i = 0; i < count; ++i)
            out.push_back(evaluate(std::lerp(a, b, static_cast<double>(i) / (count - 1))));
        return out;
    }

  private:
    KnotVector knots_;
    PointSeq ctrl_;
};

}  // namespace parnet
