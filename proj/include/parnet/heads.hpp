#pragma once

#include <Eigen/Dense>
#include <cstddef>

#include "types.hpp"

namespace parnet {

inline constexpr double kKnotEpsilon = 1e-5;

/// Accumulate-and-rescale head: raw increments (length l-1, strictly
/// positive by the softplus output contract) to a parameter vector with
/// t_0 = 0, t_last = 1, strictly increasing. Invariant under positive
/// scaling of raw.
inline ParamVec ppn_head(const Eigen::VectorXd& raw) {
    require(raw.size() >= 1, "ppn_head: empty input");
    const std::size_t m = static_cast<std::size_t>(raw.size());
    ParamVec t(m + 1);
    t[0] = 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        if (!(raw[static_cast<Eigen::Index>(i)] > 0.0))
            throw InvalidStateError("ppn_head: nonpositive increment");
        acc += raw[static_cast<Eigen::Index>(i)];
        t[i + 1] = acc;
    }
    for (std::size_t i = 1; i <= m; ++i) t[i] /= acc;
    t[m] = 1.0;
    return t;
}

/// Gradient of ppn_head: with s = sum of raw and t the head output,
///   d t_i / d raw_j = ([j <= i-1] - t_i) / s,
/// so grad_raw_j = (suffix-sum of grad_t past j - <grad_t, t>) / s.
inline Eigen::VectorXd ppn_head_backward(const Eigen::VectorXd& raw,
                                         const ParamVec& t,
                                         const ParamVec& grad_t) {
    const std::size_t m = static_cast<std::size_t>(raw.size());
    require(t.size() == m + 1 && grad_t.size() == m + 1,
            "ppn_head_backward: size mismatch");
    const double s = raw.sum();
    double dot = 0.0;
    for (std::size_t i = 0; i <= m; ++i) dot += grad_t[i] * t[i];
    Eigen::VectorXd grad_raw(m);
    double suffix = 0.0;
    for (std::size_t j = m; j-- > 0;) {
        suffix += grad_t[j + 1];
        grad_raw[static_cast<Eigen::Index>(j)] = (suffix - dot) / s;
    }
    return grad_raw;
}

/// Threshold head keeping the predicted knot strictly inside (0,1).
inline double ksn_head(double raw) {
    if (raw <= 0.0) return kKnotEpsilon;
    if (raw >= 1.0) return 1.0 - kKnotEpsilon;
    return raw;
}

/// Pass-through gradient inside (0,1), zero on the clamped branches.
inline double ksn_head_backward(double raw, double grad_u) {
    return (raw > 0.0 && raw < 1.0) ? grad_u : 0.0;
}

}  // namespace parnet
