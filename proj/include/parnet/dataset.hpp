#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "curve.hpp"
#include "geometry.hpp"
#include "knot_vector.hpp"
#include "rng.hpp"
#include "types.hpp"

namespace parnet {

enum class SamplingMode {
    kUniformParameter,
    kUniformArclength,
    kRandomParameter,
    // Corpus-level rule, resolved per curve id during synthesis: even ids
    // sample by arc length, odd ids at sorted random parameters.
    kMixed,
};

inline std::string to_string(SamplingMode m) {
    switch (m) {
        case SamplingMode::kUniformParameter: return "uniform-parameter";
        case SamplingMode::kUniformArclength: return "uniform-arclength";
        case SamplingMode::kRandomParameter: return "random-parameter";
        case SamplingMode::kMixed: return "mixed";
    }
    return "uniform-parameter";
}

inline SamplingMode sampling_mode_from(const std::string& s) {
    if (s == "uniform-parameter") return SamplingMode::kUniformParameter;
    if (s == "uniform-arclength") return SamplingMode::kUniformArclength;
    if (s == "random-parameter") return SamplingMode::kRandomParameter;
    if (s == "mixed") return SamplingMode::kMixed;
    throw ParseError("unknown sampling mode: " + s);
}

struct SynthesisConfig {
    int degree = 3;
    std::size_t num_ctrl_points = 4;  // degree+1: clamped, no interior knots
    double sigma_x = 1.0;
    double sigma_y = 2.0;
    double mu_start = 10.0;
    double delta_mu = 1.0;
    std::size_t l = 100;
    SamplingMode mode = SamplingMode::kUniformArclength;
    int intersection_density = 20;
    std::uint64_t seed = 0;

    void validate() const {
        require(degree >= 1, "synthesis: degree must be >= 1");
        require(num_ctrl_points >= static_cast<std::size_t>(degree) + 1,
                "synthesis: too few control points for degree");
        require(l >= 2 * static_cast<std::size_t>(degree + 1),
                "synthesis: l must be >= 2*(degree+1)");
        require(sigma_x >= 0.0 && sigma_y >= 0.0, "synthesis: sigmas must be >= 0");
        require(intersection_density >= 2, "synthesis: density must be >= 2");
    }
};

struct Instance {
    PointSeq points;
    std::uint64_t curve_id = 0;
    bool flipped = false;
    bool in_test = false;
};

struct Dataset {
    SynthesisConfig config;
    std::vector<Instance> instances;

    std::vector<std::size_t> split_indices(bool test) const {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < instances.size(); ++i)
            if (instances[i].in_test == test) idx.push_back(i);
        return idx;
    }
};

inline constexpr int kRejectionBudget = 1000;

/// Polyline proxy check: the curve sampled at density*(control point
/// count) uniform parameters, tested for non-adjacent segment crossings.
inline bool detect_self_intersection(const BSplineCurve& curve, int density) {
    require(density >= 2, "detect_self_intersection: density must be >= 2");
    std::size_t n = static_cast<std::size_t>(density) * curve.control_points().size();
    return polyline_self_intersects(curve.sample(n));
}

namespace detail {

inline PointSeq draw_control_points(const SynthesisConfig& cfg, std::size_t count,
                                    std::mt19937_64& g) {
    PointSeq ctrl(count);
    for (std::size_t i = 0; i < count; ++i) {
        ctrl[i].x = rng::normal(g, cfg.mu_start + static_cast<double>(i) * cfg.delta_mu,
                                cfg.sigma_x);
        ctrl[i].y = rng::normal(g, 10.0, cfg.sigma_y);
    }
    return ctrl;
}

inline KnotVector uniform_interior_kv(int degree, std::size_t num_ctrl) {
    std::size_t n_int = num_ctrl - degree - 1;
    std::vector<double> interior(n_int);
    for (std::size_t j = 0; j < n_int; ++j)
        interior[j] = static_cast<double>(j + 1) / static_cast<double>(n_int + 1);
    return KnotVector::clamped(degree, interior);
}

}  // namespace detail

/// Random clamped curve with normally drawn control points; self-
/// intersecting draws are rejected and retried.
inline BSplineCurve random_curve(const SynthesisConfig& cfg, std::mt19937_64& g) {
    cfg.validate();
    KnotVector kv = cfg.num_ctrl_points == static_cast<std::size_t>(cfg.degree) + 1
                        ? KnotVector::bezier(cfg.degree)
                        : detail::uniform_interior_kv(cfg.degree, cfg.num_ctrl_points);
    for (int attempt = 0; attempt < kRejectionBudget; ++attempt) {
        BSplineCurve curve(kv, detail::draw_control_points(cfg, cfg.num_ctrl_points, g));
        if (!detect_self_intersection(curve, cfg.intersection_density)) return curve;
    }
    throw SynthesisError("random_curve: rejection budget exhausted");
}

/// Random curve with j interior knots, j uniform in {3..8}, knot
/// positions uniform in (0,1), distinct after sorting.
inline BSplineCurve random_knotted_curve(const SynthesisConfig& cfg, std::mt19937_64& g) {
    cfg.validate();
    for (int attempt = 0; attempt < kRejectionBudget; ++attempt) {
        std::size_t j = 3 + rng::below(g, 6);
        std::vector<double> interior(j);
        for (auto& v : interior) v = rng::uniform_open(g);
        std::sort(interior.begin(), interior.end());
        if (std::adjacent_find(interior.begin(), interior.end()) != interior.end())
            continue;  // coincident knots: reject the draw
        KnotVector kv = KnotVector::clamped(cfg.degree, interior);
        BSplineCurve curve(kv,
                           detail::draw_control_points(cfg, kv.num_control_points(), g));
        if (!detect_self_intersection(curve, cfg.intersection_density)) return curve;
    }
    throw SynthesisError("random_knotted_curve: rejection budget exhausted");
}

/// l points on the curve under the chosen spacing rule. Only the
/// random-parameter mode consumes the generator.
inline PointSeq sample_curve(const BSplineCurve& curve, std::size_t l, SamplingMode mode,
                             std::mt19937_64& g) {
    require(l >= 2, "sample_curve: need at least two samples");
    require(mode != SamplingMode::kMixed,
            "sample_curve: mixed resolves to a concrete mode per curve");
    const double a = curve.knots().domain_start(), b = curve.knots().domain_end();
    switch (mode) {
        case SamplingMode::kUniformParameter:
            return curve.sample(l);
        case SamplingMode::kUniformArclength: {
            // Dense parameter->arclength table, inverted by linear
            // interpolation for equally spaced target lengths.
            const std::size_t n = 50 * l;
            PointSeq dense = curve.sample(n);
            std::vector<double> acc = arclen_prefix(dense);
            const double total = acc.back();
            PointSeq out;
            out.reserve(l);
            out.push_back(curve.evaluate(a));
            for (std::size_t i = 1; i + 1 < l; ++i) {
                double s = total * static_cast<double>(i) / static_cast<double>(l - 1);
                auto it = std::lower_bound(acc.begin(), acc.end(), s);
                std::size_t hi = static_cast<std::size_t>(it - acc.begin());
                std::size_t lo = hi - 1;
                double frac = (s - acc[lo]) / (acc[hi] - acc[lo]);
                double u = std::lerp(a, b,
                                     (static_cast<double>(lo) + frac) /
                                         static_cast<double>(n - 1));
                out.push_back(curve.evaluate(u));
            }
            out.push_back(curve.evaluate(b));
            return out;
        }
        case SamplingMode::kRandomParameter: {
            ParamVec t{a};
            for (std::size_t i = 0; i + 2 < l; ++i)
                t.push_back(std::lerp(a, b, rng::uniform(g)));
            t.push_back(b);
            std::sort(t.begin(), t.end());
            PointSeq out;
            out.reserve(l);
            for (double u : t) out.push_back(curve.evaluate(u));
            return out;
        }
    }
    throw std::logic_error("sample_curve: unreachable");
}

/// Index reversal; the augmentation used to double the training corpus.
inline PointSeq flip(const PointSeq& p) { return PointSeq(p.rbegin(), p.rend()); }

/// `count` accepted curves, each sampled to length l and flip-augmented,
/// split 80/20 by a seeded shuffle of curve ids (a curve's two instances
/// always land in the same split). Mixed mode alternates the spacing rule
/// by curve id so the corpus covers both spacing families.
inline Dataset build_training_set(const SynthesisConfig& cfg, std::size_t count) {
    cfg.validate();
    require(count >= 10, "build_training_set: need at least 10 curves");
    Dataset ds;
    ds.config = cfg;
    ds.instances.reserve(2 * count);
    for (std::size_t i = 0; i < count; ++i) {
        auto curve_rng = rng::derive(cfg.seed, i);
        auto sampling_rng = rng::derive(cfg.seed, i, rng::kSamplingSalt);
        BSplineCurve curve = random_curve(cfg, curve_rng);
        SamplingMode mode = cfg.mode;
        if (mode == SamplingMode::kMixed)
            mode = i % 2 == 0 ? SamplingMode::kUniformArclength
                              : SamplingMode::kRandomParameter;
        PointSeq points = sample_curve(curve, cfg.l, mode, sampling_rng);
        ds.instances.push_back({points, i, false, false});
        ds.instances.push_back({flip(points), i, true, false});
    }
    std::vector<std::uint64_t> ids(count);
    for (std::size_t i = 0; i < count; ++i) ids[i] = i;
    auto split_rng = rng::derive(cfg.seed, 0, rng::kSplitSalt);
    rng::shuffle(ids, split_rng);
    std::size_t n_test = static_cast<std::size_t>(0.2 * static_cast<double>(count) + 0.5);
    std::vector<bool> is_test(count, false);
    for (std::size_t i = 0; i < n_test; ++i) is_test[ids[i]] = true;
    for (auto& inst : ds.instances) inst.in_test = is_test[inst.curve_id];
    return ds;
}

/// The four evaluation sets. 1/2 use simple curves, 3/4 knotted ones;
/// 1/3 sample by arc length, 2/4 at sorted random parameters. Sets that
/// share a number parity share curve ids under the same seed.
inline Dataset build_eval_set(int which, std::size_t count, std::size_t points_per_curve,
                              SynthesisConfig cfg) {
    require(which >= 1 && which <= 4, "build_eval_set: set must be in 1..4");
    require(points_per_curve >= 2, "build_eval_set: need at least two points per curve");
    cfg.l = points_per_curve;
    if (which <= 2) cfg.num_ctrl_points = cfg.degree + 1;
    cfg.validate();
    SamplingMode mode = (which % 2 == 1) ? SamplingMode::kUniformArclength
                                         : SamplingMode::kRandomParameter;
    Dataset ds;
    ds.config = cfg;
    ds.config.mode = mode;
    ds.instances.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        auto curve_rng = rng::derive(cfg.seed, i);
        auto sampling_rng = rng::derive(cfg.seed, i, rng::kSamplingSalt);
        BSplineCurve curve = which <= 2 ? random_curve(cfg, curve_rng)
                                        : random_knotted_curve(cfg, curve_rng);
        ds.instances.push_back(
            {sample_curve(curve, points_per_curve, mode, sampling_rng), i, false, false});
    }
    return ds;
}

}  // namespace parnet
