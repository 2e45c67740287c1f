#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <string>
#include <vector>

#include "approximation_layer.hpp"
#include "dataset.hpp"
#include "geometry.hpp"
#include "heads.hpp"
#include "mlp.hpp"
#include "rng.hpp"
#include "types.hpp"

namespace parnet {

struct TrainConfig {
    std::vector<std::size_t> ppn_hidden{128, 128, 128};
    std::vector<std::size_t> ksn_hidden{64, 64, 64};
    double dropout = 0.2;
    AdamConfig adam;
    std::size_t batch_size = 256;
    std::size_t ppn_epochs = 150;
    std::size_t ksn_epochs = 60;
    int degree = 3;
    std::uint64_t seed = 0;
};

struct TrainHistory {
    struct Entry {
        long step = 0;
        double train_loss = 0.0;
        double test_loss = 0.0;
    };
    std::vector<Entry> entries;
};

inline void save_history(const TrainHistory& h, const std::string& path) {
    std::ofstream out(path);
    require(out.good(), "save_history: cannot open " + path);
    out << "# step train_loss test_loss\n" << std::setprecision(10);
    for (const auto& e : h.entries)
        out << e.step << " " << e.train_loss << " " << e.test_loss << "\n";
}

struct TrainResult {
    Mlp net;
    ModelInfo info;
    TrainHistory history;
};

/// Flattened network input (x_0..x_{l-1}, y_0..y_{l-1}).
inline Eigen::RowVectorXd points_input(const PointSeq& p) {
    Eigen::RowVectorXd x(2 * p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        x[static_cast<Eigen::Index>(i)] = p[i].x;
        x[static_cast<Eigen::Index>(p.size() + i)] = p[i].y;
    }
    return x;
}

/// Flattened (x.., y.., t..) input for the knot network.
inline Eigen::RowVectorXd points_params_input(const PointSeq& p, const ParamVec& t) {
    require(p.size() == t.size(), "points_params_input: size mismatch");
    Eigen::RowVectorXd x(3 * p.size());
    x.head(2 * p.size()) = points_input(p);
    for (std::size_t i = 0; i < t.size(); ++i)
        x[static_cast<Eigen::Index>(2 * p.size() + i)] = t[i];
    return x;
}

/// Parameter values for raw points: normalize, run the network, apply
/// the accumulate/rescale head.
inline ParamVec ppn_parametrize(const Mlp& ppn, const PointSeq& points) {
    Eigen::VectorXd raw = ppn.forward(points_input(normalize_points(points)).transpose());
    return ppn_head(raw);
}

/// Knot prediction in (0,1) for raw points with their parameters.
inline double ksn_predict(const Mlp& ksn, const PointSeq& points, const ParamVec& t) {
    Eigen::VectorXd raw =
        ksn.forward(points_params_input(normalize_points(points), t).transpose());
    return ksn_head(raw[0]);
}

/// Interior-knot vector (0,0,0,0,u,1,1,1,1) used by the knot network.
inline KnotVector single_knot_kv(int degree, double u) {
    return KnotVector::clamped(degree, {u});
}

/// Snap a predicted knot into a parameter-supported position: when the
/// knot lands in a span with no parameter (impossible while t spans
/// [0,1] under closed-interval support checks, but kept as a guard for
/// partial parameter vectors), move it to the midpoint of the two
/// nearest parameters. Gradients do not flow through a snap.
struct SnapResult {
    double u = 0.0;
    bool snapped = false;
};

inline SnapResult snap_knot_to_params(double u, const ParamVec& t, int degree) {
    require(t.size() >= 2, "snap_knot_to_params: need at least two params");
    if (schoenberg_whitney_ok(single_knot_kv(degree, u), t)) return {u, false};
    auto it = std::lower_bound(t.begin(), t.end(), u);
    std::size_t hi = static_cast<std::size_t>(it - t.begin());
    if (hi == 0) hi = 1;
    if (hi >= t.size()) hi = t.size() - 1;
    return {(t[hi - 1] + t[hi]) / 2.0, true};
}

namespace detail {

struct Prepared {
    std::vector<PointSeq> normalized;
    std::vector<std::size_t> train_idx, test_idx;
};

inline Prepared prepare(const Dataset& ds) {
    Prepared pr;
    pr.normalized.reserve(ds.instances.size());
    for (const auto& inst : ds.instances) pr.normalized.push_back(normalize_points(inst.points));
    pr.train_idx = ds.split_indices(false);
    pr.test_idx = ds.split_indices(true);
    require(!pr.train_idx.empty(), "training: empty train split");
    return pr;
}

}  // namespace detail

/// Self-supervised parametrization training: network raw increments ->
/// head -> least-squares layer -> mean-distance loss, backpropagated
/// exactly through the solve. Instances are min-max normalized before
/// both the input and the loss.
inline TrainResult train_ppn(const Dataset& ds, const TrainConfig& cfg) {
    require(!ds.instances.empty(), "train_ppn: empty dataset");
    const std::size_t l = ds.instances.front().points.size();
    require(l >= 4, "train_ppn: instances too short");
    detail::Prepared pr = detail::prepare(ds);
    const KnotVector kv = KnotVector::bezier(cfg.degree);

    std::vector<std::size_t> sizes{2 * l};
    sizes.insert(sizes.end(), cfg.ppn_hidden.begin(), cfg.ppn_hidden.end());
    sizes.push_back(l - 1);
    std::vector<Activation> acts(sizes.size() - 1, Activation::kSoftplus);
    auto init_rng = rng::derive(cfg.seed, 0, rng::kTrainingSalt);
    Mlp net = Mlp::make(sizes, acts, cfg.dropout, init_rng);
    AdamState adam(net);

    auto instance_loss = [&](const Mlp& m, std::size_t idx) {
        std::mt19937_64 unused(0);
        Eigen::MatrixXd raw =
            m.forward(points_input(pr.normalized[idx]), false, unused);
        ParamVec t = ppn_head(raw.row(0).transpose());
        return approximation_layer_run(pr.normalized[idx], t, kv).loss;
    };
    auto mean_loss = [&](const Mlp& m, const std::vector<std::size_t>& idx) {
        double s = 0.0;
        for (std::size_t i : idx) s += instance_loss(m, i);
        return idx.empty() ? 0.0 : s / static_cast<double>(idx.size());
    };

    TrainResult res{std::move(net), ModelInfo{"ppn", l, cfg.degree, 0.0}, {}};
    long step = 0;
    auto order = pr.train_idx;
    for (std::size_t epoch = 0; epoch < cfg.ppn_epochs; ++epoch) {
        auto epoch_rng = rng::derive(cfg.seed, epoch + 1, rng::kTrainingSalt);
        rng::shuffle(order, epoch_rng);
        double epoch_loss = 0.0;
        std::size_t epoch_batches = 0;
        for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
            const std::size_t bs = std::min(cfg.batch_size, order.size() - begin);
            Eigen::MatrixXd X(bs, 2 * l);
            for (std::size_t b = 0; b < bs; ++b)
                X.row(static_cast<Eigen::Index>(b)) =
                    points_input(pr.normalized[order[begin + b]]);
            ForwardTape tape;
            Eigen::MatrixXd raw = res.net.forward(X, true, epoch_rng, &tape);
            Eigen::MatrixXd dRaw = Eigen::MatrixXd::Zero(raw.rows(), raw.cols());
            double batch_loss = 0.0;
            for (std::size_t b = 0; b < bs; ++b) {
                const PointSeq& p = pr.normalized[order[begin + b]];
                ParamVec t = ppn_head(raw.row(static_cast<Eigen::Index>(b)).transpose());
                ApproxLayer lay = approximation_layer_run(p, t, kv);
                batch_loss += lay.loss;
                ParamVec grad_t = approximation_layer_grad_t(
                    lay, t, kv, 1.0 / static_cast<double>(bs));
                dRaw.row(static_cast<Eigen::Index>(b)) =
                    ppn_head_backward(raw.row(static_cast<Eigen::Index>(b)).transpose(),
                                      t, grad_t)
                        .transpose();
            }
            batch_loss /= static_cast<double>(bs);
            if (!std::isfinite(batch_loss))
                throw TrainingError("train_ppn: loss diverged at step " +
                                    std::to_string(step));
            Gradients g = res.net.backward(tape, dRaw);
            adam_step(adam, res.net, g, cfg.adam);
            ++step;
            epoch_loss += batch_loss;
            ++epoch_batches;
        }
        res.history.entries.push_back({step,
                                       epoch_loss / static_cast<double>(epoch_batches),
                                       mean_loss(res.net, pr.test_idx)});
    }
    return res;
}

/// Parameter vectors for every instance, inference mode.
inline std::vector<ParamVec> ppn_parametrize_dataset(const Mlp& ppn, const Dataset& ds) {
    std::vector<ParamVec> ts;
    ts.reserve(ds.instances.size());
    for (const auto& inst : ds.instances) ts.push_back(ppn_parametrize(ppn, inst.points));
    return ts;
}

/// Knot-placement training on (points, parameters) pairs: network ->
/// threshold head -> single-knot least-squares layer -> same loss, with
/// the knot gradient obtained through the collocation-matrix derivative.
inline TrainResult train_ksn(const Dataset& ds, const std::vector<ParamVec>& ts,
                             const TrainConfig& cfg) {
    require(!ds.instances.empty(), "train_ksn: empty dataset");
    require(ts.size() == ds.instances.size(), "train_ksn: one parameter vector per instance");
    const std::size_t l = ds.instances.front().points.size();
    detail::Prepared pr = detail::prepare(ds);

    std::vector<std::size_t> sizes{3 * l};
    sizes.insert(sizes.end(), cfg.ksn_hidden.begin(), cfg.ksn_hidden.end());
    sizes.push_back(1);
    std::vector<Activation> acts(sizes.size() - 1, Activation::kRelu);
    acts.back() = Activation::kSigmoid;
    auto init_rng = rng::derive(cfg.seed, 1ull << 32, rng::kTrainingSalt);
    Mlp net = Mlp::make(sizes, acts, cfg.dropout, init_rng);
    AdamState adam(net);

    auto forward_loss = [&](double raw, std::size_t idx, double* grad_raw) {
        SnapResult snap = snap_knot_to_params(ksn_head(raw), ts[idx], cfg.degree);
        KnotVector kv = single_knot_kv(cfg.degree, snap.u);
        ApproxLayer lay = approximation_layer_run(pr.normalized[idx], ts[idx], kv);
        if (grad_raw) {
            double gu = snap.snapped
                            ? 0.0
                            : approximation_layer_grad_knot(lay, ts[idx], kv,
                                                            cfg.degree + 1);
            *grad_raw = ksn_head_backward(raw, gu);
        }
        return lay.loss;
    };
    auto mean_loss = [&](const Mlp& m, const std::vector<std::size_t>& idx) {
        double s = 0.0;
        std::mt19937_64 unused(0);
        for (std::size_t i : idx) {
            Eigen::MatrixXd raw =
                m.forward(points_params_input(pr.normalized[i], ts[i]), false, unused);
            s += forward_loss(raw(0, 0), i, nullptr);
        }
        return idx.empty() ? 0.0 : s / static_cast<double>(idx.size());
    };

    TrainResult res{std::move(net), ModelInfo{"ksn", l, cfg.degree, 0.0}, {}};
    long step = 0;
    auto order = pr.train_idx;
    for (std::size_t epoch = 0; epoch < cfg.ksn_epochs; ++epoch) {
        auto epoch_rng = rng::derive(cfg.seed, (1ull << 32) ^ (epoch + 1),
                                     rng::kTrainingSalt);
        rng::shuffle(order, epoch_rng);
        double epoch_loss = 0.0;
        std::size_t epoch_batches = 0;
        for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
            const std::size_t bs = std::min(cfg.batch_size, order.size() - begin);
            Eigen::MatrixXd X(bs, 3 * l);
            for (std::size_t b = 0; b < bs; ++b) {
                std::size_t idx = order[begin + b];
                X.row(static_cast<Eigen::Index>(b)) =
                    points_params_input(pr.normalized[idx], ts[idx]);
            }
            ForwardTape tape;
            Eigen::MatrixXd raw = res.net.forward(X, true, epoch_rng, &tape);
            Eigen::MatrixXd dRaw = Eigen::MatrixXd::Zero(raw.rows(), 1);
            double batch_loss = 0.0;
            for (std::size_t b = 0; b < bs; ++b) {
                double grad_raw = 0.0;
                batch_loss += forward_loss(raw(static_cast<Eigen::Index>(b), 0),
                                           order[begin + b], &grad_raw);
                dRaw(static_cast<Eigen::Index>(b), 0) =
                    grad_raw / static_cast<double>(bs);
            }
            batch_loss /= static_cast<double>(bs);
            if (!std::isfinite(batch_loss))
                throw TrainingError("train_ksn: loss diverged at step " +
                                    std::to_string(step));
            Gradients g = res.net.backward(tape, dRaw);
            adam_step(adam, res.net, g, cfg.adam);
            ++step;
            epoch_loss += batch_loss;
            ++epoch_batches;
        }
        res.history.entries.push_back({step,
                                       epoch_loss / static_cast<double>(epoch_batches),
                                       mean_loss(res.net, pr.test_idx)});
    }
    return res;
}

}  // namespace parnet
