#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rng.hpp"
#include "types.hpp"

namespace parnet {

enum class Activation { kSoftplus, kRelu, kSigmoid, kIdentity };

inline std::string to_string(Activation a) {
    switch (a) {
        case Activation::kSoftplus: return "softplus";
        case Activation::kRelu: return "relu";
        case Activation::kSigmoid: return "sigmoid";
        case Activation::kIdentity: return "identity";
    }
    return "identity";
}

inline Activation activation_from(const std::string& s) {
    if (s == "softplus") return Activation::kSoftplus;
    if (s == "relu") return Activation::kRelu;
    if (s == "sigmoid") return Activation::kSigmoid;
    if (s == "identity") return Activation::kIdentity;
    throw ParseError("unknown activation: " + s);
}

/// ln(1+e^x); the branch avoids overflow while exp(x) stays accurate
/// through the subnormal range, so outputs are positive down to x≈-745.
inline double softplus(double x) { return x > 30.0 ? x : std::log1p(std::exp(x)); }
inline double relu(double x) { return x > 0.0 ? x : 0.0; }
inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline double activate(Activation a, double x) {
    switch (a) {
        case Activation::kSoftplus: return softplus(x);
        case Activation::kRelu: return relu(x);
        case Activation::kSigmoid: return sigmoid(x);
        case Activation::kIdentity: return x;
    }
    return x;
}

/// Derivative of the activation at preactivation x.
inline double activate_grad(Activation a, double x) {
    switch (a) {
        case Activation::kSoftplus: return sigmoid(x);
        case Activation::kRelu: return x > 0.0 ? 1.0 : 0.0;
        case Activation::kSigmoid: {
            double s = sigmoid(x);
            return s * (1.0 - s);
        }
        case Activation::kIdentity: return 1.0;
    }
    return 1.0;
}

struct Layer {
    Eigen::MatrixXd W;  // out x in
    Eigen::VectorXd b;  // out
    Activation act = Activation::kIdentity;
};

/// Activation record of one forward pass: everything backprop needs.
/// act[0] is the input; act[k+1] the (post-dropout) output of layer k.
struct ForwardTape {
    std::vector<Eigen::MatrixXd> pre;
    std::vector<Eigen::MatrixXd> act;
    std::vector<Eigen::MatrixXd> mask;  // empty rows when dropout was off
};

struct Gradients {
    std::vector<Eigen::MatrixXd> dW;
    std::vector<Eigen::VectorXd> db;
};

/// Dense feed-forward network. Rows are batch samples throughout.
class Mlp {
  public:
    Mlp() = default;
    Mlp(std::vector<Layer> layers, double dropout_rate)
        : layers_(std::move(layers)), dropout_(dropout_rate) {
        require(!layers_.empty(), "mlp: need at least one layer");
        require(dropout_ >= 0.0 && dropout_ < 1.0, "mlp: dropout rate outside [0,1)");
        for (std::size_t k = 0; k + 1 < layers_.size(); ++k)
            require(layers_[k + 1].W.cols() == layers_[k].W.rows(),
                    "mlp: consecutive layer dimensions incompatible");
        for (const Layer& l : layers_)
            require(l.b.size() == l.W.rows(), "mlp: bias size mismatch");
    }

    /// He-normal hidden weights, Glorot-uniform output weights, zero
    /// biases. sizes = (input, hidden..., output), one activation per layer.
    static Mlp make(const std::vector<std::size_t>& sizes,
                    const std::vector<Activation>& acts, double dropout_rate,
                    std::mt19937_64& g) {
        require(sizes.size() >= 2, "mlp: need input and output sizes");
        require(acts.size() == sizes.size() - 1, "mlp: one activation per layer");
        std::vector<Layer> layers(sizes.size() - 1);
        for (std::size_t k = 0; k < layers.size(); ++k) {
            const std::size_t fan_in = sizes[k], fan_out = sizes[k + 1];
            Layer& l = layers[k];
            l.W.resize(fan_out, fan_in);
            l.b = Eigen::VectorXd::Zero(fan_out);
            l.act = acts[k];
            if (k + 1 == layers.size()) {
                double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
                for (Eigen::Index i = 0; i < l.W.size(); ++i)
                    l.W.data()[i] = rng::uniform(g, -bound, bound);
            } else {
                double std = std::sqrt(2.0 / static_cast<double>(fan_in));
                for (Eigen::Index i = 0; i < l.W.size(); ++i)
                    l.W.data()[i] = std * rng::normal(g);
            }
        }
        return Mlp(std::move(layers), dropout_rate);
    }

    const std::vector<Layer>& layers() const { return layers_; }
    std::vector<Layer>& layers() { return layers_; }
    double dropout_rate() const { return dropout_; }
    std::size_t input_dim() const { return layers_.front().W.cols(); }
    std::size_t output_dim() const { return layers_.back().W.rows(); }

    std::vector<std::size_t> layer_sizes() const {
        std::vector<std::size_t> s{input_dim()};
        for (const Layer& l : layers_) s.push_back(l.W.rows());
        return s;
    }

    /// Batch forward pass. Inverted dropout on hidden activations when
    /// training, so inference needs no rescaling; tape optional.
    Eigen::MatrixXd forward(const Eigen::MatrixXd& X, bool training, std::mt19937_64& g,
                            ForwardTape* tape = nullptr) const {
        require(static_cast<std::size_t>(X.cols()) == input_dim(),
                "mlp: input width mismatch");
        if (tape) {
            tape->pre.clear();
            tape->act.clear();
            tape->mask.clear();
            tape->act.push_back(X);
        }
        Eigen::MatrixXd a = X;
        for (std::size_t k = 0; k < layers_.size(); ++k) {
            const Layer& l = layers_[k];
            Eigen::MatrixXd z = (a * l.W.transpose()).rowwise() + l.b.transpose();
            a = z.unaryExpr([&](double v) { return activate(l.act, v); });
            bool hidden = k + 1 < layers_.size();
            Eigen::MatrixXd mask;
            if (hidden && training && dropout_ > 0.0) {
                double keep = 1.0 - dropout_;
                mask.resize(a.rows(), a.cols());
                for (Eigen::Index i = 0; i < mask.size(); ++i)
                    mask.data()[i] = rng::uniform(g) < keep ? 1.0 / keep : 0.0;
                a.array() *= mask.array();
            }
            if (tape) {
                tape->pre.push_back(std::move(z));
                tape->mask.push_back(std::move(mask));
                tape->act.push_back(a);
            }
        }
        return a;
    }

    /// Inference-mode forward for a single input vector.
    Eigen::VectorXd forward(const Eigen::VectorXd& x) const {
        std::mt19937_64 unused(0);
        return forward(Eigen::MatrixXd(x.transpose()), false, unused).row(0);
    }

    /// Backpropagation from dL/d(output). Returns parameter gradients;
    /// grad_input, when requested, receives dL/d(input).
    Gradients backward(const ForwardTape& tape, const Eigen::MatrixXd& dY,
                       Eigen::MatrixXd* grad_input = nullptr) const {
        require(tape.pre.size() == layers_.size(), "mlp: tape does not match network");
        Gradients g;
        g.dW.resize(layers_.size());
        g.db.resize(layers_.size());
        Eigen::MatrixXd da = dY;
        for (std::size_t k = layers_.size(); k-- > 0;) {
            const Layer& l = layers_[k];
            if (tape.mask[k].size() > 0) da.array() *= tape.mask[k].array();
            Eigen::MatrixXd dz =
                da.array() *
                tape.pre[k].unaryExpr([&](double v) { return activate_grad(l.act, v); })
                    .array();
            g.dW[k] = dz.transpose() * tape.act[k];
            g.db[k] = dz.colwise().sum().transpose();
            if (k > 0 || grad_input) da = dz * l.W;
        }
        if (grad_input) *grad_input = std::move(da);
        return g;
    }

  private:
    std::vector<Layer> layers_;
    double dropout_ = 0.0;
};

struct AdamConfig {
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    std::vector<Eigen::MatrixXd> mW, vW;
    std::vector<Eigen::VectorXd> mb, vb;
    long step = 0;

    explicit AdamState(const Mlp& net) {
        for (const Layer& l : net.layers()) {
            mW.push_back(Eigen::MatrixXd::Zero(l.W.rows(), l.W.cols()));
            vW.push_back(Eigen::MatrixXd::Zero(l.W.rows(), l.W.cols()));
            mb.push_back(Eigen::VectorXd::Zero(l.b.size()));
            vb.push_back(Eigen::VectorXd::Zero(l.b.size()));
        }
    }
};

/// One bias-corrected Adam update, in place.
inline void adam_step(AdamState& st, Mlp& net, const Gradients& g,
                      const AdamConfig& cfg = {}) {
    require(g.dW.size() == net.layers().size(), "adam: gradient shape mismatch");
    st.step += 1;
    const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(st.step));
    const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(st.step));
    for (std::size_t k = 0; k < net.layers().size(); ++k) {
        Layer& l = net.layers()[k];
        require(g.dW[k].rows() == l.W.rows() && g.dW[k].cols() == l.W.cols() &&
                    g.db[k].size() == l.b.size(),
                "adam: gradient shape mismatch");
        st.mW[k] = cfg.beta1 * st.mW[k] + (1.0 - cfg.beta1) * g.dW[k];
        st.vW[k] = cfg.beta2 * st.vW[k] + (1.0 - cfg.beta2) * g.dW[k].array().square().matrix();
        st.mb[k] = cfg.beta1 * st.mb[k] + (1.0 - cfg.beta1) * g.db[k];
        st.vb[k] = cfg.beta2 * st.vb[k] + (1.0 - cfg.beta2) * g.db[k].array().square().matrix();
        l.W.array() -=
            cfg.lr * (st.mW[k].array() / c1) / ((st.vW[k].array() / c2).sqrt() + cfg.eps);
        l.b.array() -=
            cfg.lr * (st.mb[k].array() / c1) / ((st.vb[k].array() / c2).sqrt() + cfg.eps);
    }
}

/// Descriptive metadata persisted with a model.
struct ModelInfo {
    std::string kind;  // "ppn" | "ksn"
    std::size_t l = 0;
    int degree = 3;
    double kappa_threshold = 0.0;  // filled after training; consumed by the pipeline
};

inline constexpr const char* kModelMagic = "parnet model v1";

/// Text header (format version, kind, sizes, activations, dropout,
/// shape metadata) followed by raw row-major little-endian doubles for
/// each layer's W then b.
inline void save_model(const Mlp& net, const ModelInfo& info, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), "save_model: cannot open " + path);
    out << kModelMagic << "\n";
    out << "kind " << info.kind << "\n";
    out << "l " << info.l << "\n";
    out << "degree " << info.degree << "\n";
    std::ostringstream kt;
    kt.precision(17);
    kt << info.kappa_threshold;
    out << "kappa_threshold " << kt.str() << "\n";
    out << "dropout ";
    std::ostringstream dr;
    dr.precision(17);
    dr << net.dropout_rate();
    out << dr.str() << "\n";
    out << "layers";
    for (std::size_t s : net.layer_sizes()) out << " " << s;
    out << "\n";
    out << "activations";
    for (const Layer& l : net.layers()) out << " " << to_string(l.act);
    out << "\n";
    out << "binary\n";
    for (const Layer& l : net.layers()) {
        // Eigen stores column-major; emit row-major for the stated format.
        Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> w = l.W;
        out.write(reinterpret_cast<const char*>(w.data()),
                  static_cast<std::streamsize>(sizeof(double) * w.size()));
        out.write(reinterpret_cast<const char*>(l.b.data()),
                  static_cast<std::streamsize>(sizeof(double) * l.b.size()));
    }
    require(out.good(), "save_model: write failed for " + path);
}

inline std::pair<Mlp, ModelInfo> load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.good()) throw ParseError("load_model: cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != kModelMagic)
        throw ParseError("load_model: not a model file (bad or incompatible version tag)");
    ModelInfo info;
    double dropout = 0.0;
    std::vector<std::size_t> sizes;
    std::vector<Activation> acts;
    while (std::getline(in, line) && line != "binary") {
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "kind") {
            ls >> info.kind;
        } else if (key == "l") {
            ls >> info.l;
        } else if (key == "degree") {
            ls >> info.degree;
        } else if (key == "kappa_threshold") {
            ls >> info.kappa_threshold;
        } else if (key == "dropout") {
            ls >> dropout;
        } else if (key == "layers") {
            std::size_t s;
            while (ls >> s) sizes.push_back(s);
        } else if (key == "activations") {
            std::string a;
            while (ls >> a) acts.push_back(activation_from(a));
        } else {
            throw ParseError("load_model: unknown header key '" + key + "'");
        }
    }
    if (line != "binary") throw ParseError("load_model: missing binary marker");
    if (sizes.size() < 2 || acts.size() != sizes.size() - 1)
        throw ParseError("load_model: inconsistent layer declaration");
    std::vector<Layer> layers(sizes.size() - 1);
    for (std::size_t k = 0; k < layers.size(); ++k) {
        Layer& l = layers[k];
        Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> w(
            sizes[k + 1], sizes[k]);
        in.read(reinterpret_cast<char*>(w.data()),
                static_cast<std::streamsize>(sizeof(double) * w.size()));
        l.W = w;
        l.b.resize(sizes[k + 1]);
        in.read(reinterpret_cast<char*>(l.b.data()),
                static_cast<std::streamsize>(sizeof(double) * l.b.size()));
        l.act = acts[k];
        if (!in.good())
            throw ParseError("load_model: truncated weight block for layer " +
                             std::to_string(k));
    }
    char extra;
    if (in.read(&extra, 1))
        throw ParseError("load_model: trailing bytes after final weight block");
    return {Mlp(std::move(layers), dropout), info};
}

}  // namespace parnet
