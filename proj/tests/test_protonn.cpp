#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "nsd/protonn.hpp"
#include "oracles.hpp"

using namespace nsd;

namespace {

protonn::ProtoNNModel tiny_model(std::uint64_t seed, int d = 3, int dh = 2, int m = 2) {
    std::mt19937_64 rng(seed);
    protonn::ProtoNNModel model;
    model.input_dim = d;
    model.W.resize(dh, d);
    model.B.resize(dh, m);
    model.Z.resize(2, m);
    for (int i = 0; i < dh; ++i)
        for (int j = 0; j < d; ++j) model.W(i, j) = oracle::gaussian(rng);
    for (int i = 0; i < dh; ++i)
        for (int j = 0; j < m; ++j) model.B(i, j) = oracle::gaussian(rng);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < m; ++j) model.Z(i, j) = oracle::unit_real(rng);
    model.gamma = 0.8;
    return model;
}

bool models_identical(const protonn::ProtoNNModel& a, const protonn::ProtoNNModel& b) {
    return a.W == b.W && a.B == b.B && a.Z == b.Z && a.gamma == b.gamma;
}

}  // namespace

TEST_CASE("score: kernel at distance zero contributes exactly its label column") {
    protonn::ProtoNNModel model;
    model.input_dim = 3;
    model.W = Eigen::MatrixXd::Identity(2, 3) * 2.0;
    Eigen::VectorXd x(3);
    x << 1.0, -0.5, 0.25;
    model.B = model.W * x;  // single prototype sitting on the projected input
    model.Z.resize(2, 1);
    model.Z << 0.0, 1.0;
    model.gamma = 1.7;

    const Eigen::VectorXd s = protonn::score(model, x);
    CHECK(s(0) == 0.0);
    CHECK(s(1) == 1.0);

    // with the input on the prototype, gamma does not matter
    model.gamma = 3.4;
    const Eigen::VectorXd s2 = protonn::score(model, x);
    CHECK(s2(1) == 1.0);
}

TEST_CASE("score: large gamma recovers the nearest projected prototype's column") {
    std::mt19937_64 rng(71);
    protonn::ProtoNNModel model = tiny_model(71, 4, 3, 6);

    // prototypes are the projections of six known inputs; querying at those
    // inputs puts the nearest prototype at distance exactly zero
    std::vector<Eigen::VectorXd> inputs;
    for (int j = 0; j < 6; ++j) {
        Eigen::VectorXd x(4);
        for (int i = 0; i < 4; ++i) x(i) = 2.0 * oracle::gaussian(rng);
        inputs.push_back(x);
        model.B.col(j) = model.W * x;
    }
    double min_gap = std::numeric_limits<double>::infinity();
    for (int a = 0; a < 6; ++a)
        for (int b = a + 1; b < 6; ++b)
            min_gap = std::min(min_gap, (model.B.col(a) - model.B.col(b)).squaredNorm());
    REQUIRE(min_gap > 1e-6);
    // gamma^2 * minGap >= 40: every other prototype contributes < exp(-40)
    model.gamma = std::sqrt(40.0 / min_gap);

    for (int j = 0; j < 6; ++j) {
        const Eigen::VectorXd s = protonn::score(model, inputs[static_cast<std::size_t>(j)]);
        CHECK((s - model.Z.col(j)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("score: continuous in x") {
    const protonn::ProtoNNModel model = tiny_model(73);
    Eigen::VectorXd x(3);
    x << 0.3, -1.0, 0.7;
    const Eigen::VectorXd base = protonn::score(model, x);
    double prev_delta = std::numeric_limits<double>::infinity();
    for (double eps : {1e-2, 1e-4, 1e-6, 1e-8}) {
        Eigen::VectorXd xp = x;
        xp(0) += eps;
        const double delta = (protonn::score(model, xp) - base).cwiseAbs().maxCoeff();
        CHECK(delta < prev_delta + 1e-15);
        prev_delta = delta;
    }
    CHECK(prev_delta < 1e-6);
}

TEST_CASE("score: dimension mismatch is rejected") {
    const protonn::ProtoNNModel model = tiny_model(79);
    CHECK_THROWS_AS(protonn::score(model, Eigen::VectorXd::Zero(5)), DimensionMismatch);
}

TEST_CASE("predict: argmax with the tie going to class 1") {
    protonn::ProtoNNModel model;
    model.input_dim = 1;
    model.W = Eigen::MatrixXd::Identity(1, 1);
    model.B = Eigen::MatrixXd::Zero(1, 2);
    model.Z.resize(2, 2);
    model.gamma = 1.0;

    Eigen::VectorXd x = Eigen::VectorXd::Zero(1);
    model.Z << 0.2, 0.0, 0.9, 0.0;  // scores (0.2, 0.9)
    CHECK(protonn::predict(model, x) == 1);
    model.Z << 0.9, 0.0, 0.2, 0.0;
    CHECK(protonn::predict(model, x) == 0);
    model.Z << 0.5, 0.0, 0.5, 0.0;  // exact tie
    CHECK(protonn::predict(model, x) == 1);
}

TEST_CASE("predict: nearest-mean configuration equals the nearest-centroid oracle") {
    const oracle::Blobs blobs = oracle::make_blobs(300, 5, 5.0, 83);

    // one prototype per class at the true mean, identity projection, sharp kernel
    protonn::ProtoNNModel model;
    model.input_dim = 5;
    model.W = Eigen::MatrixXd::Identity(5, 5);
    model.B.resize(5, 2);
    model.B.col(0) = blobs.mean0;
    model.B.col(1) = blobs.mean1;
    model.Z.resize(2, 2);
    model.Z << 1.0, 0.0, 0.0, 1.0;
    model.gamma = 2.0;

    for (int i = 0; i < blobs.X.rows(); ++i) {
        const Eigen::VectorXd x = blobs.X.row(i).transpose();
        CHECK(protonn::predict(model, x) ==
              oracle::nearest_centroid_label(blobs.mean0, blobs.mean1, x));
    }
}

TEST_CASE("hard_threshold: pinned examples and the sorting oracle") {
    SUBCASE("keeps the two largest magnitudes of three") {
        Eigen::MatrixXd m(1, 3);
        m << 3.0, -5.0, 1.0;
        const Eigen::MatrixXd t = protonn::hard_threshold(m, 2.0 / 3.0);
        CHECK(t(0, 0) == 3.0);
        CHECK(t(0, 1) == -5.0);
        CHECK(t(0, 2) == 0.0);
    }
    SUBCASE("s = 1 is the identity") {
        std::mt19937_64 rng(89);
        Eigen::MatrixXd m(4, 7);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 7; ++j) m(i, j) = oracle::gaussian(rng);
        CHECK(protonn::hard_threshold(m, 1.0) == m);
    }
    SUBCASE("random 10x10 at s=0.3: nnz 30, kept set matches a sort by |value|") {
        std::mt19937_64 rng(97);
        Eigen::MatrixXd m(10, 10);
        for (int i = 0; i < 10; ++i)
            for (int j = 0; j < 10; ++j) m(i, j) = oracle::gaussian(rng);
        const Eigen::MatrixXd t = protonn::hard_threshold(m, 0.3);

        int nnz = 0;
        for (int i = 0; i < 10; ++i)
            for (int j = 0; j < 10; ++j)
                if (t(i, j) != 0.0) ++nnz;
        CHECK(nnz == 30);

        // oracle: flatten, sort by (-|v|, flat index), keep the first 30
        std::vector<std::pair<double, int>> order;
        for (int i = 0; i < 10; ++i)
            for (int j = 0; j < 10; ++j) order.emplace_back(-std::abs(m(i, j)), i * 10 + j);
        std::sort(order.begin(), order.end());
        Eigen::MatrixXd want = Eigen::MatrixXd::Zero(10, 10);
        for (int r = 0; r < 30; ++r) {
            const int flat = order[static_cast<std::size_t>(r)].second;
            want(flat / 10, flat % 10) = m(flat / 10, flat % 10);
        }
        CHECK(t == want);
    }
    SUBCASE("ties at the cut keep the earlier flat index") {
        Eigen::MatrixXd m(2, 2);
        m << 1.0, -1.0, 1.0, 1.0;
        const Eigen::MatrixXd t = protonn::hard_threshold(m, 0.5);
        CHECK(t(0, 0) == 1.0);
        CHECK(t(0, 1) == -1.0);
        CHECK(t(1, 0) == 0.0);
        CHECK(t(1, 1) == 0.0);
    }
}

TEST_CASE("model_size_bytes: the 40d + 960 affine law") {
    for (int d : {20, 50, 70, 100}) {
        protonn::ProtoNNModel model;
        model.input_dim = d;
        model.W = Eigen::MatrixXd::Ones(10, d);
        model.B = Eigen::MatrixXd::Ones(10, 20);
        model.Z = Eigen::MatrixXd::Ones(2, 20);
        CHECK(protonn::model_size_bytes(model) == 40 * d + 960);
    }

    // sparse budgets count stored nonzeros instead
    protonn::ProtoNNModel model;
    model.input_dim = 10;
    model.W = protonn::hard_threshold(Eigen::MatrixXd::Random(10, 10), 0.3);
    model.B = Eigen::MatrixXd::Ones(10, 4);
    model.Z = Eigen::MatrixXd::Ones(2, 4);
    model.sparsity_w = 0.3;
    CHECK(protonn::model_size_bytes(model) == 4 * (30 + 40 + 8));
}

TEST_CASE("train_gradients: matches central finite differences on a tiny model") {
    std::mt19937_64 rng(103);
    const int n = 12, d = 3;
    Eigen::MatrixXd X(n, d);
    std::vector<int> y;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) X(i, j) = oracle::gaussian(rng);
        y.push_back(static_cast<int>(rng() % 2));
    }

    for (int trial = 0; trial < 20; ++trial) {
        protonn::ProtoNNModel model = tiny_model(200 + static_cast<std::uint64_t>(trial));
        std::vector<int> batch;
        for (int b = 0; b < 6; ++b) batch.push_back(static_cast<int>(rng() % n));

        const protonn::Gradients g = protonn::train_gradients(model, X, y, batch);
        const std::vector<int> batch_y = [&] {
            std::vector<int> out;
            for (int idx : batch) out.push_back(y[static_cast<std::size_t>(idx)]);
            return out;
        }();
        Eigen::MatrixXd Xb(static_cast<Eigen::Index>(batch.size()), d);
        for (std::size_t b = 0; b < batch.size(); ++b) Xb.row(static_cast<Eigen::Index>(b)) = X.row(batch[b]);

        const double h = 1e-6;
        auto fd_check = [&](Eigen::MatrixXd& param, const Eigen::MatrixXd& grad) {
            for (int i = 0; i < param.rows(); ++i)
                for (int j = 0; j < param.cols(); ++j) {
                    const double orig = param(i, j);
                    param(i, j) = orig + h;
                    const double up = protonn::batch_loss(model, Xb, batch_y);
                    param(i, j) = orig - h;
                    const double down = protonn::batch_loss(model, Xb, batch_y);
                    param(i, j) = orig;
                    const double fd = (up - down) / (2.0 * h);
                    const double denom = std::max(std::abs(fd), 1e-6);
                    CHECK(std::abs(grad(i, j) - fd) / denom < 1e-4);
                }
        };
        fd_check(model.W, g.dW);
        fd_check(model.B, g.dB);
        fd_check(model.Z, g.dZ);
    }
}

TEST_CASE("train_gradients: zero residual gives zero gradients") {
    // one prototype per class exactly on the projected points, one-hot labels,
    // gamma huge: score equals the one-hot, so the loss sits at its minimum
    protonn::ProtoNNModel model;
    model.input_dim = 2;
    model.W = Eigen::MatrixXd::Identity(2, 2);
    model.B.resize(2, 2);
    model.B << 0.0, 10.0, 0.0, 10.0;
    model.Z.resize(2, 2);
    model.Z << 1.0, 0.0, 0.0, 1.0;
    model.gamma = 50.0;

    Eigen::MatrixXd X(2, 2);
    X << 0.0, 0.0, 10.0, 10.0;
    const std::vector<int> y{0, 1};
    const protonn::Gradients g = protonn::train_gradients(model, X, y, {0, 1});
    CHECK(g.dW.cwiseAbs().maxCoeff() < 1e-12);
    CHECK(g.dB.cwiseAbs().maxCoeff() < 1e-12);
    CHECK(g.dZ.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("train: separable blobs are fit to 0.99+ training accuracy") {
    const oracle::Blobs blobs = oracle::make_blobs(400, 2, 6.0, 107);

    protonn::ProtoNNConfig cfg;
    cfg.proj_dim = 2;
    cfg.n_prototypes = 6;
    cfg.epochs = 40;
    cfg.batch = 64;
    cfg.seed = 9;

    protonn::TrainLog log;
    const protonn::ProtoNNModel model = protonn::train(blobs.X, blobs.y, cfg, &log);

    int correct = 0;
    for (int i = 0; i < blobs.X.rows(); ++i)
        if (protonn::predict(model, blobs.X.row(i).transpose()) ==
            blobs.y[static_cast<std::size_t>(i)])
            ++correct;
    CHECK(static_cast<double>(correct) / static_cast<double>(blobs.X.rows()) >= 0.99);

    // accepted-epoch training loss never increases beyond tolerance
    for (std::size_t e = 1; e < log.train_loss.size(); ++e)
        CHECK(log.train_loss[e] <= log.train_loss[e - 1] + 1e-6);
    CHECK(log.gamma > 0.0);
}

TEST_CASE("train: fixed seed gives bit-identical models") {
    const oracle::Blobs blobs = oracle::make_blobs(120, 4, 4.0, 109);
    protonn::ProtoNNConfig cfg;
    cfg.proj_dim = 3;
    cfg.n_prototypes = 4;
    cfg.epochs = 10;
    cfg.batch = 32;
    cfg.seed = 77;

    const protonn::ProtoNNModel a = protonn::train(blobs.X, blobs.y, cfg);
    const protonn::ProtoNNModel b = protonn::train(blobs.X, blobs.y, cfg);
    CHECK(models_identical(a, b));

    protonn::ProtoNNConfig other = cfg;
    other.seed = 78;
    const protonn::ProtoNNModel c = protonn::train(blobs.X, blobs.y, other);
    CHECK_FALSE(models_identical(a, c));
}

TEST_CASE("train: sparsity budgets hold after training") {
    const oracle::Blobs blobs = oracle::make_blobs(200, 6, 4.0, 113);
    protonn::ProtoNNConfig cfg;
    cfg.proj_dim = 4;
    cfg.n_prototypes = 8;
    cfg.epochs = 15;
    cfg.batch = 32;
    cfg.sparsity_w = 0.5;
    cfg.sparsity_b = 0.75;
    cfg.sparsity_z = 0.5;

    protonn::TrainLog log;
    const protonn::ProtoNNModel model = protonn::train(blobs.X, blobs.y, cfg, &log);

    const auto nnz = [](const Eigen::MatrixXd& M) {
        long long c = 0;
        for (int i = 0; i < M.rows(); ++i)
            for (int j = 0; j < M.cols(); ++j)
                if (M(i, j) != 0.0) ++c;
        return c;
    };
    CHECK(nnz(model.W) <= static_cast<long long>(std::ceil(0.5 * 4 * 6)));
    CHECK(nnz(model.B) <= static_cast<long long>(std::ceil(0.75 * 4 * 8)));
    CHECK(nnz(model.Z) <= static_cast<long long>(std::ceil(0.5 * 2 * 8)));
    for (const auto& counts : log.nnz) {
        CHECK(counts[0] <= 12);
        CHECK(counts[1] <= 24);
        CHECK(counts[2] <= 8);
    }
}

TEST_CASE("one prototype per point with gamma large behaves like 1-NN") {
    // The kernel vote equals the nearest neighbor only when the nearest
    // prototype's weight beats everything the other class can muster, i.e.
    // gamma^2 * (d_other^2 - d_nearest^2) > ln(n - 1). Queries are filtered
    // to that regime; bounded data keeps every exponent representable.
    std::mt19937_64 rng(127);
    const int n = 24, d = 3;
    Eigen::MatrixXd X(n, d);
    std::vector<int> y;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) X(i, j) = oracle::unit_real(rng);
        y.push_back(static_cast<int>(rng() % 2));
    }

    protonn::ProtoNNModel model;
    model.input_dim = d;
    model.W = Eigen::MatrixXd::Identity(d, d);
    model.B = X.transpose();  // one prototype per training point
    model.Z = Eigen::MatrixXd::Zero(2, n);
    for (int i = 0; i < n; ++i) model.Z(y[static_cast<std::size_t>(i)], i) = 1.0;
    model.gamma = 12.0;  // worst exponent 144 * 3 stays far from underflow

    const double needed_gap = std::log(static_cast<double>(n - 1)) /
                              (model.gamma * model.gamma);
    int usable = 0;
    for (int trial = 0; trial < 300; ++trial) {
        Eigen::VectorXd q(d);
        for (int j = 0; j < d; ++j) q(j) = oracle::unit_real(rng);

        double best[2] = {std::numeric_limits<double>::infinity(),
                          std::numeric_limits<double>::infinity()};
        for (int i = 0; i < n; ++i) {
            const double d2 = (X.row(i).transpose() - q).squaredNorm();
            double& slot = best[y[static_cast<std::size_t>(i)]];
            slot = std::min(slot, d2);
        }
        if (std::abs(best[0] - best[1]) <= needed_gap) continue;

        ++usable;
        CHECK(protonn::predict(model, q) == oracle::knn_label(X, y, q, 1));
    }
    CHECK(usable >= 200);  // the margin filter must not hollow the test out
}

TEST_CASE("train: input validation") {
    const oracle::Blobs blobs = oracle::make_blobs(50, 3, 4.0, 131);
    protonn::ProtoNNConfig cfg;
    cfg.proj_dim = 2;
    cfg.n_prototypes = 4;
    cfg.epochs = 2;

    SUBCASE("single-class labels") {
        std::vector<int> ones(50, 1);
        CHECK_THROWS_AS(protonn::train(blobs.X, ones, cfg), SingleClassTrainingSet);
    }
    SUBCASE("non-binary label") {
        std::vector<int> bad = blobs.y;
        bad[3] = 2;
        CHECK_THROWS_AS(protonn::train(blobs.X, bad, cfg), NonBinaryValue);
    }
    SUBCASE("projection wider than the input") {
        protonn::ProtoNNConfig wide = cfg;
        wide.proj_dim = 9;
        CHECK_THROWS_AS(protonn::train(blobs.X, blobs.y, wide), DimensionMismatch);
    }
    SUBCASE("budget out of range") {
        protonn::ProtoNNConfig bad = cfg;
        bad.sparsity_w = 0.0;
        CHECK_THROWS_AS(protonn::train(blobs.X, blobs.y, bad), BudgetInfeasible);
        bad.sparsity_w = 1.5;
        CHECK_THROWS_AS(protonn::train(blobs.X, blobs.y, bad), BudgetInfeasible);
    }
    SUBCASE("fewer samples than prototypes") {
        protonn::ProtoNNConfig big = cfg;
        big.n_prototypes = 60;
        CHECK_THROWS_AS(protonn::train(blobs.X, blobs.y, big), TooFewSamples);
    }
}

TEST_CASE("snap_to_float32: parameters become exactly float-representable") {
    protonn::ProtoNNModel model = tiny_model(137);
    model.W(0, 0) = 0.1;  // not exactly representable in binary32
    protonn::snap_to_float32(model);
    for (int i = 0; i < model.W.rows(); ++i)
        for (int j = 0; j < model.W.cols(); ++j)
            CHECK(model.W(i, j) == static_cast<double>(static_cast<float>(model.W(i, j))));
    CHECK(model.gamma == static_cast<double>(static_cast<float>(model.gamma)));
}
