#pragma once

#include <Eigen/Dense>

#include "nsd/errors.hpp"

namespace nsd::pca {

/// Standardize-then-project model. `components` rows are orthonormal; the
/// sign convention (largest-magnitude entry of each row positive) makes the
/// decomposition reproducible across platforms.
struct PcaModel {
    Eigen::VectorXd mean;                      // D
    Eigen::VectorXd scale;                     // D, per-feature std (zero -> 1)
    Eigen::MatrixXd components;                // d x D, orthonormal rows
    Eigen::VectorXd explained_variance_ratio;  // d, non-increasing

    int input_dim() const { return static_cast<int>(mean.size()); }
    int output_dim() const { return static_cast<int>(components.rows()); }
};

/// Fit on rows of X (n x D): z-score standardize, eigendecompose the sample
/// covariance, keep the top-d eigenvectors. Deterministic. Throws
/// TooFewSamples (n <= d) and TargetDimExceedsFeatureDim.
PcaModel fit(const Eigen::MatrixXd& X, int target_dim);

/// components * ((x - mean) / scale). Throws DimensionMismatch.
Eigen::VectorXd transform(const PcaModel& model, const Eigen::VectorXd& x);

/// Row-wise transform of a matrix of samples.
Eigen::MatrixXd transform(const PcaModel& model, const Eigen::MatrixXd& X);

/// Back-projection to the original feature space (lossy for d < D).
Eigen::VectorXd inverse_transform(const PcaModel& model, const Eigen::VectorXd& y);

}  // namespace nsd::pca
