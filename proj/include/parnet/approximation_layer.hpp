#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <utility>
#include <vector>

#include "basis.hpp"
#include "fit.hpp"
#include "knot_vector.hpp"
#include "types.hpp"

namespace parnet {

/// The differentiable approximation layer: least-squares fit of the
/// points at the given parameters, evaluated back at those parameters.
/// Loss is the mean Euclidean distance (not squared), and the backward
/// pass differentiates through the normal-equation solve via its
/// adjoint, reusing the forward factorization.
struct ApproxLayer {
    Eigen::MatrixXd N;     // l x ncp collocation matrix
    Eigen::MatrixXd P;     // l x 2 input points
    Eigen::MatrixXd C;     // ncp x 2 fitted control points
    Eigen::MatrixXd Papp;  // l x 2 curve at the parameters
    Eigen::LDLT<Eigen::MatrixXd> ldlt;
    double loss = 0.0;
};

inline ApproxLayer approximation_layer_run(const PointSeq& p, const ParamVec& t,
                                           const KnotVector& kv) {
    require(p.size() == t.size(), "approximation_layer: one parameter per point");
    require(p.size() >= 2, "approximation_layer: need at least two points");
    if (!schoenberg_whitney_ok(kv, t))
        throw SingularSystemError("approximation_layer: Schoenberg-Whitney violated");
    ApproxLayer lay;
    lay.N = basis_matrix(kv, t);
    lay.P = to_matrix(p);
    lay.ldlt = (lay.N.transpose() * lay.N).ldlt();
    lay.C = lay.ldlt.solve(lay.N.transpose() * lay.P);
    lay.Papp = lay.N * lay.C;
    const double l = static_cast<double>(p.size());
    lay.loss = 0.0;
    for (Eigen::Index i = 0; i < lay.P.rows(); ++i)
        lay.loss += (lay.Papp.row(i) - lay.P.row(i)).norm();
    lay.loss /= l;
    return lay;
}

/// Forward pass matching the published interface: approximated points
/// plus the mean-distance loss.
inline std::pair<PointSeq, double> approximation_layer(const PointSeq& p,
                                                       const ParamVec& t,
                                                       const KnotVector& kv) {
    ApproxLayer lay = approximation_layer_run(p, t, kv);
    return {from_matrix(lay.Papp), lay.loss};
}

namespace detail {

/// dloss/dN as a dense l x ncp sensitivity via the solve adjoint:
///   S = (G - N W) C^T + R W^T,  W = (N^T N)^{-1} N^T G,  R = P - N C,
/// where G_i = upstream * (papp_i - p_i) / (l * |papp_i - p_i|).
inline Eigen::MatrixXd basis_sensitivity(const ApproxLayer& lay, double upstream) {
    const double l = static_cast<double>(lay.P.rows());
    Eigen::MatrixXd G(lay.P.rows(), 2);
    for (Eigen::Index i = 0; i < lay.P.rows(); ++i) {
        Eigen::RowVector2d r = lay.Papp.row(i) - lay.P.row(i);
        double n = r.norm();
        G.row(i) = n > 0.0 ? Eigen::RowVector2d(upstream / (l * n) * r)
                           : Eigen::RowVector2d::Zero();
    }
    Eigen::MatrixXd W = lay.ldlt.solve(lay.N.transpose() * G);
    Eigen::MatrixXd R = lay.P - lay.Papp;
    return (G - lay.N * W) * lay.C.transpose() + R * W.transpose();
}

}  // namespace detail

/// Gradient of the loss with respect to every parameter t_i. Only row i
/// of N depends on t_i, through the basis argument derivative.
inline ParamVec approximation_layer_grad_t(const ApproxLayer& lay, const ParamVec& t,
                                           const KnotVector& kv, double upstream = 1.0) {
    Eigen::MatrixXd S = detail::basis_sensitivity(lay, upstream);
    ParamVec grad(t.size(), 0.0);
    for (std::size_t i = 0; i < t.size(); ++i) {
        std::size_t span = kv.find_span(t[i]);
        double g = 0.0;
        for (std::size_t j = span - kv.degree(); j <= span; ++j)
            g += basis_derivative(kv, j, t[i]) * S(static_cast<Eigen::Index>(i),
                                                   static_cast<Eigen::Index>(j));
        grad[i] = g;
    }
    return grad;
}

/// Gradient of the loss with respect to the knot at knot_index, via the
/// same sensitivity contracted with the finite-difference derivative of
/// the whole collocation matrix (four perturbed assemblies).
inline double approximation_layer_grad_knot(const ApproxLayer& lay, const ParamVec& t,
                                            const KnotVector& kv, std::size_t knot_index,
                                            double upstream = 1.0) {
    require(knot_index > static_cast<std::size_t>(kv.degree()) &&
                knot_index + kv.degree() + 1 < kv.size(),
            "approximation_layer_grad_knot: knot must be interior");
    Eigen::MatrixXd S = detail::basis_sensitivity(lay, upstream);
    const double h = 1e-6;
    auto assemble = [&](double delta) {
        std::vector<double> U = kv.values();
        U[knot_index] += delta;
        return basis_matrix(KnotVector(std::move(U), kv.degree()), t);
    };
    Eigen::MatrixXd dN = (-assemble(2 * h) + 8.0 * assemble(h) - 8.0 * assemble(-h) +
                          assemble(-2 * h)) /
                         (12.0 * h);
    return (dN.array() * S.array()).sum();
}

/// Published backward interface: gradients w.r.t. every t_i, and w.r.t.
/// the single interior knot when the knot vector has exactly one.
inline std::pair<ParamVec, double> approximation_layer_backward(const PointSeq& p,
                                                                const ParamVec& t,
                                                                const KnotVector& kv,
                                                                double upstream = 1.0) {
    ApproxLayer lay = approximation_layer_run(p, t, kv);
    ParamVec grad_t = approximation_layer_grad_t(lay, t, kv, upstream);
    double grad_u = 0.0;
    if (kv.interior().size() == 1)
        grad_u = approximation_layer_grad_knot(lay, t, kv, kv.degree() + 1, upstream);
    return {std::move(grad_t), grad_u};
}

}  // namespace parnet
