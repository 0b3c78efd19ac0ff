#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "nsd/errors.hpp"

namespace nsd::protonn {

struct ProtoNNConfig {
    int proj_dim = 10;      // d-hat
    int n_prototypes = 20;  // m
    std::optional<double> gamma;  // nullopt = auto (2.5 / median projected distance)
    double sparsity_w = 1.0;  // fraction of entries kept, (0,1]
    double sparsity_b = 1.0;
    double sparsity_z = 1.0;
    int epochs = 100;
    int batch = 256;
    double step_w = 0.05;  // base step sizes, decayed by 1/sqrt(epoch)
    double step_b = 0.05;
    double step_z = 0.05;
    std::uint64_t seed = 42;
};

/// Compressed prototype classifier: score(x) = sum_j Z_j * exp(-gamma^2 *
/// ||B_j - W x||^2). Parameters are kept under hard sparsity budgets.
struct ProtoNNModel {
    Eigen::MatrixXd W;  // proj_dim x input_dim
    Eigen::MatrixXd B;  // proj_dim x m, prototype columns
    Eigen::MatrixXd Z;  // L x m label columns, L = 2
    double gamma = 1.0;
    int input_dim = 0;
    double sparsity_w = 1.0, sparsity_b = 1.0, sparsity_z = 1.0;

    int proj_dim() const { return static_cast<int>(W.rows()); }
    int n_prototypes() const { return static_cast<int>(B.cols()); }
    int n_labels() const { return static_cast<int>(Z.rows()); }
};

/// RBF-weighted label sum; finite for all finite inputs. Throws DimensionMismatch.
Eigen::VectorXd score(const ProtoNNModel& model, const Eigen::VectorXd& x);

/// argmax over the score vector; ties go to class 1 (a missed seizure is the
/// costly error).
int predict(const ProtoNNModel& model, const Eigen::VectorXd& x);

/// Keep the ceil(s * numel) largest-magnitude entries, zero the rest. Ties at
/// the cut are kept by earlier row-major flat index. s = 1 is the identity.
Eigen::MatrixXd hard_threshold(const Eigen::MatrixXd& M, double sparsity);

/// Stored parameter count: every entry for a dense (budget 1) matrix,
/// otherwise the number of nonzeros left by hard thresholding.
long long stored_entries(const Eigen::MatrixXd& M, double sparsity);

/// Serialized parameter footprint: 4 bytes per stored value across W, B, Z.
long long model_size_bytes(const ProtoNNModel& model);

struct Gradients {
    Eigen::MatrixXd dW, dB, dZ;
};

/// Analytic gradients of the mean squared loss over the batch
/// (1/|batch|) * sum ||onehot(y) - score(x)||^2 at the current parameters.
Gradients train_gradients(const ProtoNNModel& model, const Eigen::MatrixXd& X,
                          const std::vector<int>& y,
                          const std::vector<int>& batch_indices);

/// Mean squared loss over a set of rows.
double batch_loss(const ProtoNNModel& model, const Eigen::MatrixXd& X,
                  const std::vector<int>& y);

struct TrainLog {
    std::vector<double> train_loss;  // per accepted epoch, index 0 = initial
    std::vector<double> val_loss;
    std::vector<std::array<long long, 3>> nnz;  // (W,B,Z) after each epoch
    int rejected_epochs = 0;
    int best_epoch = 0;
    double gamma = 0.0;
};

/// Alternating projected mini-batch gradient descent: per batch a Z step, a B
/// step, then a W step, each followed by hard thresholding with its budget.
/// Batches are stratified 50/50 by resampling. Epochs that increase the full
/// training loss are rolled back with the step scale halved, and the snapshot
/// with the best validation loss is returned. Deterministic for a fixed seed.
/// When no validation set is passed, a stratified fifth of the input is held
/// out. Throws SingleClassTrainingSet, BudgetInfeasible, TooFewSamples.
ProtoNNModel train(const Eigen::MatrixXd& X, const std::vector<int>& y,
                   const ProtoNNConfig& cfg, TrainLog* log = nullptr,
                   const Eigen::MatrixXd* X_val = nullptr,
                   const std::vector<int>* y_val = nullptr);

/// Round every parameter through float32 so serialization is lossless.
void snap_to_float32(ProtoNNModel& model);

}  // namespace nsd::protonn
