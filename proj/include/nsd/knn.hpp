#pragma once

#include <Eigen/Dense>
#include <vector>

#include "nsd/errors.hpp"

namespace nsd::knn {

/// Exact brute-force kNN over the full training set; the anti-edge baseline.
struct KnnModel {
    Eigen::MatrixXd points;  // n x d, one row per training sample
    std::vector<int> labels;
    int k = 1;
};

KnnModel make_model(const Eigen::MatrixXd& points, const std::vector<int>& labels, int k);

/// Majority vote among the k Euclidean-nearest training points. Distance ties
/// break toward the lower training index, vote ties toward class 1.
/// Throws DimensionMismatch.
int knn_predict(const KnnModel& model, const Eigen::VectorXd& x);

/// Fraction of class-1 votes among the k nearest; the continuous score for AUC.
double knn_vote_fraction(const KnnModel& model, const Eigen::VectorXd& x);

/// k from `k_grid` maximizing validation accuracy; ties prefer the smaller k.
int knn_select_k(const Eigen::MatrixXd& X_train, const std::vector<int>& y_train,
                 const Eigen::MatrixXd& X_val, const std::vector<int>& y_val,
                 const std::vector<int>& k_grid);

/// Reported model footprint: float32 points plus one byte per label.
long long knn_model_bytes(const KnnModel& model);

}  // namespace nsd::knn
