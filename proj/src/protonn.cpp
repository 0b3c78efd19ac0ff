#include "nsd/protonn.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace nsd::protonn {

namespace {

// Hand-rolled draws so results are identical across standard libraries.
std::size_t bounded(std::mt19937_64& rng, std::size_t n) { return rng() % n; }

double unit_real(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <typename T>
void shuffle_indices(std::vector<T>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i)
        std::swap(v[i - 1], v[bounded(rng, i)]);
}

Eigen::VectorXd kernel_vector(const ProtoNNModel& model, const Eigen::VectorXd& projected) {
    const int m = model.n_prototypes();
    Eigen::VectorXd k(m);
    const double g2 = model.gamma * model.gamma;
    for (int j = 0; j < m; ++j)
        k[j] = std::exp(-g2 * (model.B.col(j) - projected).squaredNorm());
    return k;
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t mid = v.size() / 2;
    if (v.size() % 2 == 1) return v[mid];
    return 0.5 * (v[mid - 1] + v[mid]);
}

// Lloyd's algorithm with a k-means++ start over the columns of P.
Eigen::MatrixXd kmeans_columns(const Eigen::MatrixXd& P, int k, std::mt19937_64& rng) {
    const int n = static_cast<int>(P.cols());
    Eigen::MatrixXd centroids(P.rows(), k);
    if (n <= k) {
        for (int j = 0; j < k; ++j) centroids.col(j) = P.col(j % n);
        return centroids;
    }

    std::vector<double> d2(n);
    centroids.col(0) = P.col(bounded(rng, static_cast<std::size_t>(n)));
    for (int c = 1; c < k; ++c) {
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            double best = (P.col(i) - centroids.col(0)).squaredNorm();
            for (int j = 1; j < c; ++j)
                best = std::min(best, (P.col(i) - centroids.col(j)).squaredNorm());
            d2[i] = best;
            total += best;
        }
        int pick = 0;
        if (total > 0.0) {
            double target = unit_real(rng) * total, acc = 0.0;
            for (int i = 0; i < n; ++i) {
                acc += d2[i];
                if (acc >= target) { pick = i; break; }
            }
        } else {
            pick = static_cast<int>(bounded(rng, static_cast<std::size_t>(n)));
        }
        centroids.col(c) = P.col(pick);
    }

    std::vector<int> assign(n, -1);
    for (int iter = 0; iter < 50; ++iter) {
        bool changed = false;
        for (int i = 0; i < n; ++i) {
            int best = 0;
            double bd = (P.col(i) - centroids.col(0)).squaredNorm();
            for (int j = 1; j < k; ++j) {
                const double d = (P.col(i) - centroids.col(j)).squaredNorm();
                if (d < bd) { bd = d; best = j; }
            }
            if (assign[i] != best) { assign[i] = best; changed = true; }
        }
        if (!changed) break;
        for (int j = 0; j < k; ++j) {
            Eigen::VectorXd sum = Eigen::VectorXd::Zero(P.rows());
            int count = 0;
            for (int i = 0; i < n; ++i)
                if (assign[i] == j) { sum += P.col(i); ++count; }
            if (count > 0) {
                centroids.col(j) = sum / count;
            } else {
                // reseed an empty cluster with the worst-fit point
                int far = 0;
                double fd = -1.0;
                for (int i = 0; i < n; ++i) {
                    const double d = (P.col(i) - centroids.col(assign[i])).squaredNorm();
                    if (d > fd) { fd = d; far = i; }
                }
                centroids.col(j) = P.col(far);
                assign[far] = j;
            }
        }
    }
    return centroids;
}

Eigen::MatrixXd top_pca_rows(const Eigen::MatrixXd& X, int rows) {
    const Eigen::Index n = X.rows(), d = X.cols();
    const Eigen::MatrixXd centered = X.rowwise() - X.colwise().mean();
    const Eigen::MatrixXd cov =
        centered.transpose() * centered / static_cast<double>(std::max<Eigen::Index>(n - 1, 1));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success) throw Error("protonn: PCA warm start failed");
    Eigen::MatrixXd W(rows, d);
    for (int r = 0; r < rows; ++r) {
        Eigen::VectorXd v = eig.eigenvectors().col(d - 1 - r);
        Eigen::Index imax = 0;
        for (Eigen::Index i = 1; i < d; ++i)
            if (std::abs(v[i]) > std::abs(v[imax])) imax = i;
        if (v[imax] < 0.0) v = -v;
        W.row(r) = v.transpose();
    }
    return W;
}

void check_config(const ProtoNNConfig& cfg) {
    for (double s : {cfg.sparsity_w, cfg.sparsity_b, cfg.sparsity_z})
        if (!(s > 0.0) || s > 1.0)
            throw BudgetInfeasible("protonn: sparsity budgets must lie in (0,1]");
    if (cfg.proj_dim < 1 || cfg.n_prototypes < 2)
        throw Error("protonn: need proj_dim >= 1 and at least one prototype per class");
    if (cfg.epochs < 0 || cfg.batch < 2)
        throw Error("protonn: need epochs >= 0 and batch >= 2");
    if (cfg.gamma && *cfg.gamma <= 0.0) throw Error("protonn: gamma must be positive");
}

}  // namespace

Eigen::VectorXd score(const ProtoNNModel& model, const Eigen::VectorXd& x) {
    if (x.size() != model.input_dim)
        throw DimensionMismatch("protonn::score: input length != model input_dim");
    return model.Z * kernel_vector(model, model.W * x);
}

int predict(const ProtoNNModel& model, const Eigen::VectorXd& x) {
    const Eigen::VectorXd s = score(model, x);
    // tie goes to class 1: a missed seizure is the costly error
    return s[1] >= s[0] ? 1 : 0;
}

Eigen::MatrixXd hard_threshold(const Eigen::MatrixXd& M, double sparsity) {
    if (!(sparsity > 0.0) || sparsity > 1.0)
        throw BudgetInfeasible("hard_threshold: sparsity must lie in (0,1]");
    const long long numel = static_cast<long long>(M.size());
    const long long keep =
        static_cast<long long>(std::ceil(sparsity * static_cast<double>(numel)));
    if (keep >= numel) return M;

    const Eigen::Index cols = M.cols();
    std::vector<std::pair<double, long long>> order(static_cast<std::size_t>(numel));
    for (Eigen::Index r = 0; r < M.rows(); ++r)
        for (Eigen::Index c = 0; c < cols; ++c) {
            const long long flat = static_cast<long long>(r) * cols + c;
            order[static_cast<std::size_t>(flat)] = {std::abs(M(r, c)), flat};
        }
    // ties at the cut resolved toward the earlier row-major index
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });

    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(M.rows(), cols);
    for (long long i = 0; i < keep; ++i) {
        const long long flat = order[static_cast<std::size_t>(i)].second;
        const Eigen::Index r = static_cast<Eigen::Index>(flat / cols);
        const Eigen::Index c = static_cast<Eigen::Index>(flat % cols);
        out(r, c) = M(r, c);
    }
    return out;
}

long long stored_entries(const Eigen::MatrixXd& M, double sparsity) {
    if (sparsity >= 1.0) return static_cast<long long>(M.size());
    long long nnz = 0;
    for (Eigen::Index r = 0; r < M.rows(); ++r)
        for (Eigen::Index c = 0; c < M.cols(); ++c)
            if (M(r, c) != 0.0) ++nnz;
    return nnz;
}

long long model_size_bytes(const ProtoNNModel& model) {
    return 4 * (stored_entries(model.W, model.sparsity_w) +
                stored_entries(model.B, model.sparsity_b) +
                stored_entries(model.Z, model.sparsity_z));
}

Gradients train_gradients(const ProtoNNModel& model, const Eigen::MatrixXd& X,
                          const std::vector<int>& y,
                          const std::vector<int>& batch_indices) {
    if (batch_indices.empty()) throw EmptyInput("train_gradients: empty batch");
    const int m = model.n_prototypes();
    const int labels = model.n_labels();
    const double g2 = model.gamma * model.gamma;
    const double n = static_cast<double>(batch_indices.size());

    Gradients g;
    g.dW = Eigen::MatrixXd::Zero(model.W.rows(), model.W.cols());
    g.dB = Eigen::MatrixXd::Zero(model.B.rows(), model.B.cols());
    g.dZ = Eigen::MatrixXd::Zero(model.Z.rows(), model.Z.cols());

    Eigen::VectorXd onehot(labels);
    for (int idx : batch_indices) {
        const Eigen::VectorXd x = X.row(idx).transpose();
        const Eigen::VectorXd p = model.W * x;
        const Eigen::VectorXd k = kernel_vector(model, p);
        onehot.setZero();
        onehot[y[static_cast<std::size_t>(idx)]] = 1.0;
        const Eigen::VectorXd r = model.Z * k - onehot;

        g.dZ += r * k.transpose();
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(model.B.rows());
        for (int j = 0; j < m; ++j) {
            const Eigen::VectorXd diff = model.B.col(j) - p;
            const double coef = k[j] * r.dot(model.Z.col(j));
            g.dB.col(j) -= coef * diff;  // sign folded in; scaled below
            acc += coef * diff;
        }
        g.dW += acc * x.transpose();
    }
    g.dZ *= 2.0 / n;
    g.dB *= 4.0 * g2 / n;
    g.dW *= 4.0 * g2 / n;
    return g;
}

double batch_loss(const ProtoNNModel& model, const Eigen::MatrixXd& X,
                  const std::vector<int>& y) {
    if (X.rows() == 0) throw EmptyInput("batch_loss: no rows");
    Eigen::VectorXd onehot(model.n_labels());
    double loss = 0.0;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        const Eigen::VectorXd s = score(model, X.row(i).transpose());
        onehot.setZero();
        onehot[y[static_cast<std::size_t>(i)]] = 1.0;
        loss += (s - onehot).squaredNorm();
    }
    return loss / static_cast<double>(X.rows());
}

ProtoNNModel train(const Eigen::MatrixXd& X, const std::vector<int>& y,
                   const ProtoNNConfig& cfg, TrainLog* log,
                   const Eigen::MatrixXd* X_val, const std::vector<int>* y_val) {
    check_config(cfg);
    const int n = static_cast<int>(X.rows());
    const int d = static_cast<int>(X.cols());
    if (n == 0 || d == 0) throw EmptyInput("protonn::train: empty training set");
    if (static_cast<int>(y.size()) != n)
        throw LengthMismatch("protonn::train: labels do not match rows");
    if (cfg.proj_dim > d)
        throw DimensionMismatch("protonn::train: proj_dim exceeds input dim");
    if (n < cfg.n_prototypes)
        throw TooFewSamples("protonn::train: need at least one sample per prototype");
    for (int label : y)
        if (label != 0 && label != 1)
            throw NonBinaryValue("protonn::train: labels must be 0 or 1");

    std::vector<int> class_idx[2];
    for (int i = 0; i < n; ++i) class_idx[y[static_cast<std::size_t>(i)]].push_back(i);
    if (class_idx[0].empty() || class_idx[1].empty())
        throw SingleClassTrainingSet("protonn::train: both classes must be present");

    std::mt19937_64 rng(cfg.seed);

    // Validation set: caller-provided, else a stratified fifth held out (when
    // the input is large enough to spare it), else the training set itself.
    std::vector<int> train_rows, val_rows;
    if (X_val == nullptr) {
        std::vector<int> cls0 = class_idx[0], cls1 = class_idx[1];
        shuffle_indices(cls0, rng);
        shuffle_indices(cls1, rng);
        const std::size_t take0 = cls0.size() / 5, take1 = cls1.size() / 5;
        const bool can_split =
            take0 + take1 > 0 && cls0.size() - take0 >= 1 && cls1.size() - take1 >= 1 &&
            n - static_cast<int>(take0 + take1) >= cfg.n_prototypes;
        if (can_split) {
            val_rows.assign(cls0.begin(), cls0.begin() + static_cast<long>(take0));
            val_rows.insert(val_rows.end(), cls1.begin(), cls1.begin() + static_cast<long>(take1));
            train_rows.assign(cls0.begin() + static_cast<long>(take0), cls0.end());
            train_rows.insert(train_rows.end(), cls1.begin() + static_cast<long>(take1), cls1.end());
        } else {
            train_rows.resize(static_cast<std::size_t>(n));
            std::iota(train_rows.begin(), train_rows.end(), 0);
            val_rows = train_rows;
        }
        std::sort(train_rows.begin(), train_rows.end());
        std::sort(val_rows.begin(), val_rows.end());
    } else {
        if (y_val == nullptr || static_cast<int>(y_val->size()) != X_val->rows())
            throw LengthMismatch("protonn::train: validation labels do not match rows");
        train_rows.resize(static_cast<std::size_t>(n));
        std::iota(train_rows.begin(), train_rows.end(), 0);
    }

    Eigen::MatrixXd X_train(train_rows.size(), d);
    std::vector<int> y_train(train_rows.size());
    for (std::size_t i = 0; i < train_rows.size(); ++i) {
        X_train.row(static_cast<Eigen::Index>(i)) = X.row(train_rows[i]);
        y_train[i] = y[static_cast<std::size_t>(train_rows[i])];
    }
    Eigen::MatrixXd X_valid;
    std::vector<int> y_valid;
    if (X_val != nullptr) {
        X_valid = *X_val;
        y_valid = *y_val;
    } else {
        X_valid.resize(static_cast<Eigen::Index>(val_rows.size()), d);
        y_valid.resize(val_rows.size());
        for (std::size_t i = 0; i < val_rows.size(); ++i) {
            X_valid.row(static_cast<Eigen::Index>(i)) = X.row(val_rows[i]);
            y_valid[i] = y[static_cast<std::size_t>(val_rows[i])];
        }
    }

    std::vector<int> tr_idx[2];
    for (std::size_t i = 0; i < y_train.size(); ++i)
        tr_idx[y_train[i]].push_back(static_cast<int>(i));
    if (tr_idx[0].empty() || tr_idx[1].empty())
        throw SingleClassTrainingSet("protonn::train: both classes must survive the holdout");

    // Warm start: PCA directions for W, per-class k-means prototypes, one-hot Z.
    ProtoNNModel model;
    model.input_dim = d;
    model.sparsity_w = cfg.sparsity_w;
    model.sparsity_b = cfg.sparsity_b;
    model.sparsity_z = cfg.sparsity_z;
    model.W = top_pca_rows(X_train, cfg.proj_dim);

    const int m = cfg.n_prototypes;
    const int m1 = (m + 1) / 2;  // class 1 gets the odd prototype
    const int m0 = m - m1;
    Eigen::MatrixXd projected(cfg.proj_dim, X_train.rows());
    for (Eigen::Index i = 0; i < X_train.rows(); ++i)
        projected.col(i) = model.W * X_train.row(i).transpose();

    Eigen::MatrixXd proj0(cfg.proj_dim, tr_idx[0].size()), proj1(cfg.proj_dim, tr_idx[1].size());
    for (std::size_t i = 0; i < tr_idx[0].size(); ++i) proj0.col(static_cast<Eigen::Index>(i)) = projected.col(tr_idx[0][i]);
    for (std::size_t i = 0; i < tr_idx[1].size(); ++i) proj1.col(static_cast<Eigen::Index>(i)) = projected.col(tr_idx[1][i]);

    model.B.resize(cfg.proj_dim, m);
    model.Z = Eigen::MatrixXd::Zero(2, m);
    model.B.leftCols(m0) = kmeans_columns(proj0, m0, rng);
    model.B.rightCols(m1) = kmeans_columns(proj1, m1, rng);
    for (int j = 0; j < m; ++j) model.Z(j < m0 ? 0 : 1, j) = 1.0;

    if (cfg.gamma) {
        model.gamma = *cfg.gamma;
    } else {
        std::vector<double> dists;
        dists.reserve(static_cast<std::size_t>(X_train.rows()) * static_cast<std::size_t>(m));
        for (Eigen::Index i = 0; i < projected.cols(); ++i)
            for (int j = 0; j < m; ++j)
                dists.push_back((projected.col(i) - model.B.col(j)).norm());
        const double med = median(std::move(dists));
        model.gamma = med > 0.0 ? 2.5 / med : 1.0;
    }

    model.W = hard_threshold(model.W, cfg.sparsity_w);
    model.B = hard_threshold(model.B, cfg.sparsity_b);
    model.Z = hard_threshold(model.Z, cfg.sparsity_z);

    if (log) {
        *log = TrainLog{};
        log->gamma = model.gamma;
    }

    double train_loss = batch_loss(model, X_train, y_train);
    double best_val = batch_loss(model, X_valid, y_valid);
    ProtoNNModel best = model;
    int best_epoch = 0;
    if (log) {
        log->train_loss.push_back(train_loss);
        log->val_loss.push_back(best_val);
        log->nnz.push_back({stored_entries(model.W, 0.0), stored_entries(model.B, 0.0),
                            stored_entries(model.Z, 0.0)});
    }

    const int half = std::max(1, cfg.batch / 2);
    double scale = 1.0;
    std::vector<int> batch(2 * static_cast<std::size_t>(half));
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const ProtoNNModel checkpoint = model;
        shuffle_indices(tr_idx[0], rng);
        shuffle_indices(tr_idx[1], rng);

        const double decay = scale / std::sqrt(static_cast<double>(epoch));
        const std::size_t n0 = tr_idx[0].size(), n1 = tr_idx[1].size();
        const std::size_t n_batches =
            (std::max(n0, n1) + static_cast<std::size_t>(half) - 1) / static_cast<std::size_t>(half);
        std::size_t pos0 = 0, pos1 = 0;
        for (std::size_t b = 0; b < n_batches; ++b) {
            // stratified 50/50 batch: the smaller class cycles (resampled)
            for (int t = 0; t < half; ++t) {
                batch[static_cast<std::size_t>(t)] = tr_idx[0][(pos0 + static_cast<std::size_t>(t)) % n0];
                batch[static_cast<std::size_t>(half + t)] = tr_idx[1][(pos1 + static_cast<std::size_t>(t)) % n1];
            }
            pos0 += static_cast<std::size_t>(half);
            pos1 += static_cast<std::size_t>(half);

            Gradients g = train_gradients(model, X_train, y_train, batch);
            model.Z -= cfg.step_z * decay * g.dZ;
            model.Z = hard_threshold(model.Z, cfg.sparsity_z);
            g = train_gradients(model, X_train, y_train, batch);
            model.B -= cfg.step_b * decay * g.dB;
            model.B = hard_threshold(model.B, cfg.sparsity_b);
            g = train_gradients(model, X_train, y_train, batch);
            model.W -= cfg.step_w * decay * g.dW;
            model.W = hard_threshold(model.W, cfg.sparsity_w);
        }

        const double loss = batch_loss(model, X_train, y_train);
        if (loss > train_loss + 1e-9) {
            // reject the epoch: restore the checkpoint and shrink the steps
            model = checkpoint;
            scale *= 0.5;
            if (log) ++log->rejected_epochs;
            continue;
        }
        train_loss = loss;
        const double val = batch_loss(model, X_valid, y_valid);
        if (val < best_val) {
            best_val = val;
            best = model;
            best_epoch = epoch;
        }
        if (log) {
            log->train_loss.push_back(loss);
            log->val_loss.push_back(val);
            log->nnz.push_back({stored_entries(model.W, 0.0), stored_entries(model.B, 0.0),
                                stored_entries(model.Z, 0.0)});
        }
    }

    if (log) log->best_epoch = best_epoch;
    snap_to_float32(best);
    return best;
}

void snap_to_float32(ProtoNNModel& model) {
    auto snap = [](Eigen::MatrixXd& M) {
        for (Eigen::Index r = 0; r < M.rows(); ++r)
            for (Eigen::Index c = 0; c < M.cols(); ++c)
                M(r, c) = static_cast<double>(static_cast<float>(M(r, c)));
    };
    snap(model.W);
    snap(model.B);
    snap(model.Z);
    model.gamma = static_cast<double>(static_cast<float>(model.gamma));
}

}  // namespace nsd::protonn
