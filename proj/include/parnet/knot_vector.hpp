#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "types.hpp"

namespace parnet {

/// Clamped knot vector for degree-k B-splines.
///
/// Invariants enforced at construction:
///  - size >= 2*(degree+1),
///  - non-decreasing,
///  - first and last knot each repeated exactly degree+1 times (clamped,
///    no higher multiplicity at the ends),
///  - positive total domain length.
class KnotVector {
  public:
    KnotVector(std::vector<double> knots, int degree)
        : knots_(std::move(knots)), degree_(degree) {
        validate();
    }

    KnotVector(std::initializer_list<double> knots, int degree)
        : knots_(knots), degree_(degree) {
        validate();
    }

    int degree() const { return degree_; }
    std::size_t size() const { return knots_.size(); }
    double operator[](std::size_t i) const { return knots_[i]; }
    const std::vector<double>& values() const { return knots_; }

    double domain_start() const { return knots_.front(); }
    double domain_end() const { return knots_.back(); }

    /// Number of control points a curve over this knot vector has.
    std::size_t num_control_points() const { return knots_.size() - degree_ - 1; }

    /// Number of basis functions == number of control points.
    std::size_t num_basis() const { return num_control_points(); }

    /// Index of the knot span containing u: largest i with knots[i] <= u
    /// < knots[i+1], except u == domain_end() maps to the last span of
    /// positive length so the curve is defined on the closed domain.
    std::size_t find_span(double u) const {
        require(u >= domain_start() && u <= domain_end(),
                "find_span: parameter outside knot domain");
        std::size_t last = last_positive_span();
        if (u >= knots_[last + 1]) return last;
        // Binary search over [degree, last].
        std::size_t lo = degree_, hi = last;
        while (lo < hi) {
            std::size_t mid = (lo + hi + 1) / 2;
            if (knots_[mid] <= u)
                lo = mid;
            else
                hi = mid - 1;
        }
        return lo;
    }

    /// Largest i with knots[i] < knots[i+1]. Exists because the domain has
    /// positive length.
    std::size_t last_positive_span() const {
        std::size_t i = knots_.size() - degree_ - 2;
        while (knots_[i] >= knots_[i + 1]) --i;
        return i;
    }

    /// Interior knots, i.e. everything strictly between the clamped ends.
    std::vector<double> interior() const {
        return {knots_.begin() + degree_ + 1, knots_.end() - degree_ - 1};
    }

    /// New knot vector with u inserted (multiplicity grows by one).
    KnotVector inserted(double u) const {
        require(u > domain_start() && u < domain_end(),
                "inserted: knot must be strictly inside the domain");
        std::vector<double> k = knots_;
        k.insert(std::upper_bound(k.begin(), k.end(), u), u);
        return KnotVector(std::move(k), degree_);
    }

    /// Clamped knot vector with no interior knots (Bezier form).
    static KnotVector bezier(int degree, double a = 0.0, double b = 1.0) {
        std::vector<double> k(2 * (degree + 1));
        std::fill(k.begin(), k.begin() + degree + 1, a);
        std::fill(k.begin() + degree + 1, k.end(), b);
        return KnotVector(std::move(k), degree);
    }

    /// Clamped knot vector with the given interior knots appended between
    /// the end clamps. `interior` must be non-decreasing and inside (a, b).
    static KnotVector clamped(int degree, const std::vector<double>& interior,
                              double a = 0.0, double b = 1.0) {
        std::vector<double> k;
        k.reserve(2 * (degree + 1) + interior.size());
        k.insert(k.end(), degree + 1, a);
        k.insert(k.end(), interior.begin(), interior.end());
        k.insert(k.end(), degree + 1, b);
        return KnotVector(std::move(k), degree);
    }

    bool operator==(const KnotVector& o) const {
        return degree_ == o.degree_ && knots_ == o.knots_;
    }

  private:
    void validate() const {
        require(degree_ >= 1, "knot vector: degree must be >= 1");
        require(knots_.size() >= 2 * static_cast<std::size_t>(degree_ + 1),
                "knot vector: too few knots for degree");
        require(std::is_sorted(knots_.begin(), knots_.end()),
                "knot vector: knots must be non-decreasing");
        require(knots_.back() > knots_.front(),
                "knot vector: domain must have positive length");
        const double a = knots_.front(), b = knots_.back();
        const std::size_t m = degree_ + 1;
        require(knots_[m - 1] == a && knots_[m] > a,
                "knot vector: start must repeat exactly degree+1 times");
        require(knots_[knots_.size() - m] == b && knots_[knots_.size() - m - 1] < b,
                "knot vector: end must repeat exactly degree+1 times");
    }

    std::vector<double> knots_;
    int degree_;
};

}  // namespace parnet
