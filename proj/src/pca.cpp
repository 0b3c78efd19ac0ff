#include "nsd/pca.hpp"

#include <Eigen/Eigenvalues>

namespace nsd::pca {

PcaModel fit(const Eigen::MatrixXd& X, int target_dim) {
    const Eigen::Index n = X.rows();
    const Eigen::Index dim = X.cols();
    if (n == 0 || dim == 0) throw EmptyInput("pca::fit: empty matrix");
    if (target_dim < 1 || target_dim > dim)
        throw TargetDimExceedsFeatureDim("pca::fit: target_dim must be in [1, n_features]");
    if (n <= target_dim)
        throw TooFewSamples("pca::fit: need more samples than target dimensions");

    PcaModel model;
    model.mean = X.colwise().mean();
    Eigen::MatrixXd centered = X.rowwise() - model.mean.transpose();

    model.scale.resize(dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
        const double var = centered.col(j).squaredNorm() / static_cast<double>(n);
        const double sd = std::sqrt(var);
        model.scale[j] = sd > 0.0 ? sd : 1.0;  // constant feature: leave centered zeros
        centered.col(j) /= model.scale[j];
    }

    const Eigen::MatrixXd cov =
        centered.transpose() * centered / static_cast<double>(n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success) throw Error("pca::fit: eigendecomposition failed");

    // SelfAdjointEigenSolver yields ascending eigenvalues; take the tail.
    const Eigen::VectorXd evals = eig.eigenvalues();
    const Eigen::MatrixXd evecs = eig.eigenvectors();
    double total = 0.0;
    for (Eigen::Index i = 0; i < dim; ++i) total += std::max(evals[i], 0.0);

    model.components.resize(target_dim, dim);
    model.explained_variance_ratio.resize(target_dim);
    for (int k = 0; k < target_dim; ++k) {
        const Eigen::Index src = dim - 1 - k;
        Eigen::VectorXd v = evecs.col(src);
        // sign convention: largest-|.| coefficient positive (ties: first wins)
        Eigen::Index imax = 0;
        for (Eigen::Index i = 1; i < dim; ++i)
            if (std::abs(v[i]) > std::abs(v[imax])) imax = i;
        if (v[imax] < 0.0) v = -v;
        model.components.row(k) = v.transpose();
        model.explained_variance_ratio[k] =
            total > 0.0 ? std::max(evals[src], 0.0) / total : 0.0;
    }
    return model;
}

Eigen::VectorXd transform(const PcaModel& model, const Eigen::VectorXd& x) {
    if (x.size() != model.mean.size())
        throw DimensionMismatch("pca::transform: input length != model input_dim");
    return model.components *
           ((x - model.mean).array() / model.scale.array()).matrix();
}

Eigen::MatrixXd transform(const PcaModel& model, const Eigen::MatrixXd& X) {
    if (X.cols() != model.mean.size())
        throw DimensionMismatch("pca::transform: input width != model input_dim");
    Eigen::MatrixXd centered = X.rowwise() - model.mean.transpose();
    for (Eigen::Index j = 0; j < centered.cols(); ++j) centered.col(j) /= model.scale[j];
    return centered * model.components.transpose();
}

Eigen::VectorXd inverse_transform(const PcaModel& model, const Eigen::VectorXd& y) {
    if (y.size() != model.components.rows())
        throw DimensionMismatch("pca::inverse_transform: input length != model output_dim");
    Eigen::VectorXd z = model.components.transpose() * y;
    return (z.array() * model.scale.array()).matrix() + model.mean;
}

}  // namespace nsd::pca
