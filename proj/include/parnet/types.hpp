#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace parnet {

/// 2D point / vector with the handful of operations the library needs.
struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2& operator+=(const Vec2& o) {
        x += o.x;
        y += o.y;
        return *this;
    }
    bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double squared_norm(const Vec2& v) { return v.x * v.x + v.y * v.y; }
inline double norm(const Vec2& v) { return std::hypot(v.x, v.y); }
inline double distance(const Vec2& a, const Vec2& b) { return norm(a - b); }
inline double squared_distance(const Vec2& a, const Vec2& b) { return squared_norm(a - b); }

/// Ordered sequence of 2D points. Most operations require length >= 2 and
/// a total polygon length > 0; the functions that care enforce it.
using PointSeq = std::vector<Vec2>;

/// Strictly increasing parameter values, 0 and 1 at the ends when the
/// vector covers a full curve or segment domain.
using ParamVec = std::vector<double>;

/// Normal-equation matrix is singular (Schoenberg-Whitney violated).
struct SingularSystemError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed input file; the message carries the offending line.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Random-curve rejection budget exhausted or similar generation failure.
struct SynthesisError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Training diverged or was set up inconsistently.
struct TrainingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A point-sequence segment dropped below the minimum size while still
/// exceeding the curvature threshold.
struct SegmentationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// No refinable knot span is left (no parameter strictly inside any span).
struct UnrefinableError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A value reached a state its producer's contract rules out
/// (e.g. a nonpositive increment out of a softplus layer).
struct InvalidStateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace parnet
