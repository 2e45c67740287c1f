#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstddef>
#include <vector>

#include "basis.hpp"
#include "curve.hpp"
#include "knot_vector.hpp"
#include "types.hpp"

namespace parnet {

/// Collocation matrix: row i holds all basis values at params[i].
inline Eigen::MatrixXd basis_matrix(const KnotVector& kv, const ParamVec& params) {
    Eigen::MatrixXd N(params.size(), kv.num_basis());
    for (std::size_t i = 0; i < params.size(); ++i) {
        std::size_t span = kv.find_span(params[i]);
        auto nz = basis_nonzero(kv, params[i], span);
        N.row(i).setZero();
        for (int j = 0; j <= kv.degree(); ++j)
            N(i, span - kv.degree() + j) = nz[j];
    }
    return N;
}

/// Solvability check for least squares over sorted params: every span
/// [U_j, U_{j+1}], j in [degree, #knots-degree-2], must contain at least
/// one parameter (closed interval).
inline bool schoenberg_whitney_ok(const KnotVector& kv, const ParamVec& params) {
    require(std::is_sorted(params.begin(), params.end()),
            "schoenberg_whitney_ok: params must be sorted");
    for (std::size_t j = kv.degree(); j + kv.degree() + 2 <= kv.size(); ++j) {
        auto it = std::lower_bound(params.begin(), params.end(), kv[j]);
        if (it == params.end() || *it > kv[j + 1]) return false;
    }
    return true;
}

inline Eigen::MatrixXd to_matrix(const PointSeq& points) {
    Eigen::MatrixXd P(points.size(), 2);
    for (std::size_t i = 0; i < points.size(); ++i) {
        P(i, 0) = points[i].x;
        P(i, 1) = points[i].y;
    }
    return P;
}

inline PointSeq from_matrix(const Eigen::MatrixXd& M) {
    PointSeq out(M.rows());
    for (Eigen::Index i = 0; i < M.rows(); ++i) out[i] = {M(i, 0), M(i, 1)};
    return out;
}

namespace detail {

inline void check_fit_args(const PointSeq& points, const ParamVec& params,
                           const KnotVector& kv) {
    require(points.size() == params.size(), "fit: one parameter per point");
    require(points.size() >= 2, "fit: need at least two points");
    require(std::is_sorted(params.begin(), params.end()), "fit: params must be sorted");
    require(params.front() >= kv.domain_start() && params.back() <= kv.domain_end(),
            "fit: params outside knot domain");
    if (!schoenberg_whitney_ok(kv, params))
        throw SingularSystemError("fit: Schoenberg-Whitney condition violated");
}

}  // namespace detail

/// Least-squares fit over all control points: solve (N^T N) C = N^T P
/// by normal equations. Endpoints are approximated, not interpolated.
inline BSplineCurve fit_unconstrained(const PointSeq& points, const ParamVec& params,
                                      const KnotVector& kv) {
    detail::check_fit_args(points, params, kv);
    Eigen::MatrixXd N = basis_matrix(kv, params);
    Eigen::MatrixXd C =
        (N.transpose() * N).ldlt().solve(N.transpose() * to_matrix(points));
    return BSplineCurve(kv, from_matrix(C));
}

/// Least-squares fit with pinned endpoints: c_0 = first point, c_last =
/// last point, the interior control points solving the normal equations
/// of the residual system
///   q_i = p_i - N_0(t_i) p_0 - N_last(t_i) p_m,  i = 1..m-1.
/// Assumes params start at the domain start and end at the domain end so
/// the pinned control points actually interpolate.
inline BSplineCurve fit_constrained(const PointSeq& points, const ParamVec& params,
                                    const KnotVector& kv) {
    detail::check_fit_args(points, params, kv);
    require(params.front() == kv.domain_start() && params.back() == kv.domain_end(),
            "fit_constrained: params must span the full domain");
    const std::size_t ncp = kv.num_control_points();
    const Vec2 p0 = points.front(), pm = points.back();
    if (ncp == 2) return BSplineCurve(kv, {p0, pm});

    const std::size_t rows = points.size() - 2, cols = ncp - 2;
    Eigen::MatrixXd N(rows, cols);
    Eigen::MatrixXd Q(rows, 2);
    for (std::size_t i = 1; i + 1 < points.size(); ++i) {
        auto full = basis_all(kv, params[i]);
        for (std::size_t j = 1; j + 1 < ncp; ++j) N(i - 1, j - 1) = full[j];
        Vec2 q = points[i] - full.front() * p0 - full.back() * pm;
        Q(i - 1, 0) = q.x;
        Q(i - 1, 1) = q.y;
    }
    Eigen::MatrixXd C = (N.transpose() * N).ldlt().solve(N.transpose() * Q);
    PointSeq ctrl(ncp);
    ctrl.front() = p0;
    ctrl.back() = pm;
    for (std::size_t j = 1; j + 1 < ncp; ++j) ctrl[j] = {C(j - 1, 0), C(j - 1, 1)};
    return BSplineCurve(kv, ctrl);
}

}  // namespace parnet
