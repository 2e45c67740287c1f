#pragma once

#include <cstddef>
#include <vector>

#include "knot_vector.hpp"
#include "types.hpp"

namespace parnet {

namespace detail {

/// Cox-de Boor recursion for a single basis function, any degree k.
/// Zero-valued denominators drop their term (0/0 := 0). The degree-0
/// level is right-closed on the last positive-length span so the basis
/// covers the closed domain.
inline double basis_rec(const std::vector<double>& U, std::size_t i, int k, double u,
                        std::size_t end_span) {
    if (k == 0) {
        if (U[i] <= u && u < U[i + 1]) return 1.0;
        return (i == end_span && u == U[end_span + 1]) ? 1.0 : 0.0;
    }
    double v = 0.0;
    double dl = U[i + k] - U[i];
    if (dl > 0.0) v += (u - U[i]) / dl * basis_rec(U, i, k - 1, u, end_span);
    double dr = U[i + k + 1] - U[i + 1];
    if (dr > 0.0) v += (U[i + k + 1] - u) / dr * basis_rec(U, i + 1, k - 1, u, end_span);
    return v;
}

}  // namespace detail

/// Value of the i-th degree-kv.degree() basis function at u.
inline double basis_value(const KnotVector& kv, std::size_t i, double u) {
    require(i < kv.num_basis(), "basis_value: index out of range");
    require(u >= kv.domain_start() && u <= kv.domain_end(),
            "basis_value: parameter outside knot domain");
    return detail::basis_rec(kv.values(), i, kv.degree(), u, kv.last_positive_span());
}

/// The degree+1 possibly nonzero basis values at u, for the span returned
/// by find_span: result[j] == N_{span-degree+j}(u). Triangular scheme, no
/// zero denominators for a valid clamped knot vector.
inline std::vector<double> basis_nonzero(const KnotVector& kv, double u, std::size_t span) {
    const auto& U = kv.values();
    const int p = kv.degree();
    std::vector<double> N(p + 1, 0.0), left(p + 1, 0.0), right(p + 1, 0.0);
    N[0] = 1.0;
    for (int j = 1; j <= p; ++j) {
        left[j] = u - U[span + 1 - j];
        right[j] = U[span + j] - u;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            double tmp = N[r] / (right[r + 1] + left[j - r]);
            N[r] = saved + right[r + 1] * tmp;
            saved = left[j - r] * tmp;
        }
        N[j] = saved;
    }
    return N;
}

/// All basis values at u as a dense vector of length num_basis.
inline std::vector<double> basis_all(const KnotVector& kv, double u) {
    require(u >= kv.domain_start() && u <= kv.domain_end(),
            "basis_all: parameter outside knot domain");
    std::size_t span = kv.find_span(u);
    std::vector<double> row(kv.num_basis(), 0.0);
    auto nz = basis_nonzero(kv, u, span);
    for (int j = 0; j <= kv.degree(); ++j) row[span - kv.degree() + j] = nz[j];
    return row;
}

/// Derivative of the i-th basis function with respect to its argument:
///   N'_i,k = k * ( N_i,k-1 / (U_{i+k} - U_i) - N_{i+1},k-1 / (U_{i+k+1} - U_{i+1}) ),
/// zero-valued denominators dropping their term.
inline double basis_derivative(const KnotVector& kv, std::size_t i, double u) {
    require(i < kv.num_basis(), "basis_derivative: index out of range");
    require(u >= kv.domain_start() && u <= kv.domain_end(),
            "basis_derivative: parameter outside knot domain");
    const auto& U = kv.values();
    const int k = kv.degree();
    const std::size_t end_span = kv.last_positive_span();
    double v = 0.0;
    double dl = U[i + k] - U[i];
    if (dl > 0.0) v += detail::basis_rec(U, i, k - 1, u, end_span) / dl;
    double dr = U[i + k + 1] - U[i + 1];
    if (dr > 0.0) v -= detail::basis_rec(U, i + 1, k - 1, u, end_span) / dr;
    return k * v;
}

/// All basis argument-derivatives at u, dense.
inline std::vector<double> basis_all_derivative(const KnotVector& kv, double u) {
    std::vector<double> row(kv.num_basis(), 0.0);
    const std::size_t span = kv.find_span(u);
    for (std::size_t i = span - kv.degree(); i <= span; ++i)
        row[i] = basis_derivative(kv, i, u);
    return row;
}

/// Derivative of N_i(u) with respect to the knot at knot_index, by a
/// fourth-order central difference on the perturbed knot vector. The
/// knot must be interior and simple enough that +-2h keeps the vector
/// valid; h is fixed small against the O(h^4) truncation error.
inline double basis_derivative_wrt_knot(const KnotVector& kv, std::size_t i,
                                        std::size_t knot_index, double u) {
    require(knot_index > static_cast<std::size_t>(kv.degree()) &&
                knot_index + kv.degree() + 1 < kv.size(),
            "basis_derivative_wrt_knot: knot must be interior");
    const double h = 1e-6;
    auto eval = [&](double delta) {
        std::vector<double> U = kv.values();
        U[knot_index] += delta;
        KnotVector perturbed(std::move(U), kv.degree());
        return basis_value(perturbed, i, u);
    };
    return (-eval(2 * h) + 8 * eval(h) - 8 * eval(-h) + eval(-2 * h)) / (12 * h);
}

}  // namespace parnet
