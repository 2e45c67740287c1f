#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "parnet/mlp.hpp"

using namespace parnet;

namespace {

Mlp toy_net(std::uint64_t seed, double dropout = 0.0) {
    std::mt19937_64 g(seed);
    return Mlp::make({4, 6, 5, 3},
                     {Activation::kSoftplus, Activation::kRelu, Activation::kSigmoid},
                     dropout, g);
}

Eigen::MatrixXd random_batch(std::mt19937_64& g, Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd X(rows, cols);
    for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = rng::uniform(g, -2.0, 2.0);
    return X;
}

}  // namespace

TEST(Activations, HandValuesAndSafeBranches) {
    EXPECT_DOUBLE_EQ(softplus(0.0), std::log(2.0));
    EXPECT_DOUBLE_EQ(relu(-5.0), 0.0);
    EXPECT_DOUBLE_EQ(relu(2.5), 2.5);
    EXPECT_DOUBLE_EQ(sigmoid(0.0), 0.5);
    EXPECT_GT(softplus(-100.0), 0.0);
    EXPECT_DOUBLE_EQ(softplus(40.0), 40.0);  // overflow branch
    EXPECT_NEAR(softplus(10.0), 10.0 + std::log1p(std::exp(-10.0)), 1e-15);
    EXPECT_NEAR(activate_grad(Activation::kSoftplus, 1.3), sigmoid(1.3), 1e-15);
    EXPECT_DOUBLE_EQ(activate_grad(Activation::kRelu, -1.0), 0.0);
    EXPECT_DOUBLE_EQ(activate_grad(Activation::kIdentity, 9.0), 1.0);
}

TEST(Mlp, ZeroNetAndIdentityNet) {
    Layer zero{Eigen::MatrixXd::Zero(3, 4), Eigen::VectorXd::Zero(3), Activation::kRelu};
    Mlp zero_net({zero}, 0.0);
    std::mt19937_64 g(1);
    Eigen::MatrixXd X = random_batch(g, 5, 4);
    EXPECT_DOUBLE_EQ(zero_net.forward(X, false, g).norm(), 0.0);

    Layer id{Eigen::MatrixXd::Identity(4, 4), Eigen::VectorXd::Zero(4),
             Activation::kIdentity};
    Mlp id_net({id}, 0.0);
    EXPECT_NEAR((id_net.forward(X, false, g) - X).norm(), 0.0, 0.0);
}

TEST(Mlp, RejectsBadShapes) {
    Layer a{Eigen::MatrixXd::Zero(3, 4), Eigen::VectorXd::Zero(3), Activation::kRelu};
    Layer b{Eigen::MatrixXd::Zero(2, 5), Eigen::VectorXd::Zero(2), Activation::kRelu};
    EXPECT_THROW(Mlp({a, b}, 0.0), std::invalid_argument);
    Layer bad_bias{Eigen::MatrixXd::Zero(3, 4), Eigen::VectorXd::Zero(2),
                   Activation::kRelu};
    EXPECT_THROW(Mlp({bad_bias}, 0.0), std::invalid_argument);
    Mlp net = toy_net(2);
    std::mt19937_64 g(3);
    EXPECT_THROW(net.forward(random_batch(g, 2, 5), false, g), std::invalid_argument);
}

TEST(Mlp, WeightGradientsMatchFiniteDifferences) {
    Mlp net = toy_net(5);
    std::mt19937_64 g(7);
    Eigen::MatrixXd X = random_batch(g, 3, 4);
    auto loss_of = [&](const Mlp& n) {
        std::mt19937_64 unused(0);
        return n.forward(X, false, unused).sum();
    };
    ForwardTape tape;
    std::mt19937_64 unused(0);
    Eigen::MatrixXd Y = net.forward(X, false, unused, &tape);
    Gradients grads = net.backward(tape, Eigen::MatrixXd::Ones(Y.rows(), Y.cols()));
    const double h = 1e-6;
    for (std::size_t k = 0; k < net.layers().size(); ++k) {
        for (Eigen::Index idx = 0; idx < net.layers()[k].W.size(); idx += 7) {
            Mlp plus = net, minus = net;
            plus.layers()[k].W.data()[idx] += h;
            minus.layers()[k].W.data()[idx] -= h;
            double fd = (loss_of(plus) - loss_of(minus)) / (2 * h);
            double an = grads.dW[k].data()[idx];
            EXPECT_NEAR(an, fd, 1e-8 + 1e-4 * std::abs(fd)) << "layer " << k;
        }
        for (Eigen::Index idx = 0; idx < net.layers()[k].b.size(); idx += 2) {
            Mlp plus = net, minus = net;
            plus.layers()[k].b[idx] += h;
            minus.layers()[k].b[idx] -= h;
            double fd = (loss_of(plus) - loss_of(minus)) / (2 * h);
            EXPECT_NEAR(grads.db[k][idx], fd, 1e-8 + 1e-4 * std::abs(fd));
        }
    }
}

TEST(Mlp, InputGradientMatchesFiniteDifferences) {
    Mlp net = toy_net(11);
    std::mt19937_64 g(13);
    Eigen::MatrixXd X = random_batch(g, 2, 4);
    ForwardTape tape;
    std::mt19937_64 unused(0);
    Eigen::MatrixXd Y = net.forward(X, false, unused, &tape);
    Eigen::MatrixXd dX;
    net.backward(tape, Eigen::MatrixXd::Ones(Y.rows(), Y.cols()), &dX);
    const double h = 1e-6;
    for (Eigen::Index i = 0; i < X.size(); ++i) {
        Eigen::MatrixXd Xp = X, Xm = X;
        Xp.data()[i] += h;
        Xm.data()[i] -= h;
        double fd = (net.forward(Xp, false, unused).sum() -
                     net.forward(Xm, false, unused).sum()) /
                    (2 * h);
        EXPECT_NEAR(dX.data()[i], fd, 1e-8 + 1e-4 * std::abs(fd));
    }
}

TEST(Mlp, DropoutModes) {
    Mlp net = toy_net(17, 0.4);
    std::mt19937_64 g(19);
    Eigen::MatrixXd X = random_batch(g, 8, 4);
    std::mt19937_64 unused(0);
    // Inference is deterministic and ignores dropout.
    Eigen::MatrixXd a = net.forward(X, false, unused);
    Eigen::MatrixXd b = net.forward(X, false, unused);
    EXPECT_EQ((a - b).norm(), 0.0);
    // Training with the same stream reproduces; different streams differ.
    std::mt19937_64 g1(23), g2(23), g3(29);
    ForwardTape tape;
    Eigen::MatrixXd t1 = net.forward(X, true, g1, &tape);
    Eigen::MatrixXd t2 = net.forward(X, true, g2);
    Eigen::MatrixXd t3 = net.forward(X, true, g3);
    EXPECT_EQ((t1 - t2).norm(), 0.0);
    EXPECT_GT((t1 - t3).norm(), 0.0);
    // Masks exist for hidden layers only.
    ASSERT_EQ(tape.mask.size(), 3u);
    EXPECT_GT(tape.mask[0].size(), 0);
    EXPECT_GT(tape.mask[1].size(), 0);
    EXPECT_EQ(tape.mask[2].size(), 0);
}

TEST(Adam, ZeroGradientLeavesWeights) {
    Mlp net = toy_net(31);
    Mlp before = net;
    AdamState st(net);
    Gradients g;
    for (const Layer& l : net.layers()) {
        g.dW.push_back(Eigen::MatrixXd::Zero(l.W.rows(), l.W.cols()));
        g.db.push_back(Eigen::VectorXd::Zero(l.b.size()));
    }
    adam_step(st, net, g);
    for (std::size_t k = 0; k < net.layers().size(); ++k)
        EXPECT_EQ((net.layers()[k].W - before.layers()[k].W).norm(), 0.0);
}

TEST(Adam, FirstStepMagnitudeIsLearningRate) {
    Mlp net = toy_net(37);
    Mlp before = net;
    AdamState st(net);
    AdamConfig cfg;
    Gradients g;
    for (const Layer& l : net.layers()) {
        g.dW.push_back(Eigen::MatrixXd::Constant(l.W.rows(), l.W.cols(), 0.37));
        g.db.push_back(Eigen::VectorXd::Constant(l.b.size(), -0.8));
    }
    adam_step(st, net, g, cfg);
    // Bias-corrected first step: lr * g / (|g| + eps), i.e. +-lr.
    for (std::size_t k = 0; k < net.layers().size(); ++k) {
        Eigen::MatrixXd dw = net.layers()[k].W - before.layers()[k].W;
        for (Eigen::Index i = 0; i < dw.size(); ++i)
            EXPECT_NEAR(dw.data()[i], -cfg.lr, 1e-9);
        Eigen::VectorXd db = net.layers()[k].b - before.layers()[k].b;
        for (Eigen::Index i = 0; i < db.size(); ++i) EXPECT_NEAR(db[i], cfg.lr, 1e-9);
    }
    Gradients bad = g;
    bad.dW.pop_back();
    EXPECT_THROW(adam_step(st, net, bad), std::invalid_argument);
}

TEST(Adam, DeterministicGivenIdenticalInputs) {
    Mlp n1 = toy_net(41), n2 = toy_net(41);
    AdamState s1(n1), s2(n2);
    Gradients g;
    std::mt19937_64 rg(43);
    for (const Layer& l : n1.layers()) {
        g.dW.push_back(random_batch(rg, l.W.rows(), l.W.cols()));
        g.db.push_back(Eigen::VectorXd::Ones(l.b.size()));
    }
    for (int i = 0; i < 5; ++i) {
        adam_step(s1, n1, g);
        adam_step(s2, n2, g);
    }
    for (std::size_t k = 0; k < n1.layers().size(); ++k)
        EXPECT_EQ((n1.layers()[k].W - n2.layers()[k].W).norm(), 0.0);
}

TEST(ModelIo, RoundTripBitIdentical) {
    Mlp net = toy_net(47, 0.2);
    ModelInfo info{"ppn", 100, 3, 12.75};
    std::string path =
        (std::filesystem::temp_directory_path() / "parnet_model_rt.bin").string();
    save_model(net, info, path);
    auto [back, binfo] = load_model(path);
    EXPECT_EQ(binfo.kind, "ppn");
    EXPECT_EQ(binfo.l, 100u);
    EXPECT_EQ(binfo.degree, 3);
    EXPECT_DOUBLE_EQ(binfo.kappa_threshold, 12.75);
    EXPECT_DOUBLE_EQ(back.dropout_rate(), 0.2);
    std::mt19937_64 g(53);
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::MatrixXd X = random_batch(g, 1, 4);
        std::mt19937_64 unused(0);
        Eigen::MatrixXd a = net.forward(X, false, unused);
        Eigen::MatrixXd b = back.forward(X, false, unused);
        EXPECT_EQ((a - b).norm(), 0.0);
    }
    std::remove(path.c_str());
}

TEST(ModelIo, MalformedFilesFail) {
    Mlp net = toy_net(59);
    ModelInfo info{"ksn", 100, 3, 0.0};
    auto tmp = std::filesystem::temp_directory_path();
    std::string good = (tmp / "parnet_model_good.bin").string();
    save_model(net, info, good);

    std::string truncated = (tmp / "parnet_model_trunc.bin").string();
    {
        std::ifstream in(good, std::ios::binary);
        std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
        std::ofstream out(truncated, std::ios::binary);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() - 40));
    }
    EXPECT_THROW(load_model(truncated), ParseError);

    std::string bad_magic = (tmp / "parnet_model_magic.bin").string();
    {
        std::ofstream out(bad_magic, std::ios::binary);
        out << "parnet model v9\nbinary\n";
    }
    EXPECT_THROW(load_model(bad_magic), ParseError);
    EXPECT_THROW(load_model((tmp / "parnet_model_missing.bin").string()), ParseError);
    std::remove(good.c_str());
    std::remove(truncated.c_str());
    std::remove(bad_magic.c_str());
}
