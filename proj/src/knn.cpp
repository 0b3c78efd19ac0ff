#include "nsd/knn.hpp"

#include <algorithm>
#include <cmath>

namespace nsd::knn {

namespace {

// indices of the k nearest training rows, distance ties toward lower index
std::vector<int> nearest(const KnnModel& model, const Eigen::VectorXd& x) {
    if (x.size() != model.points.cols())
        throw DimensionMismatch("knn: query length != model dimension");
    const int n = static_cast<int>(model.points.rows());
    std::vector<std::pair<double, int>> dist(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        dist[static_cast<std::size_t>(i)] = {
            (model.points.row(i).transpose() - x).squaredNorm(), i};
    const auto kth = dist.begin() + model.k;
    std::partial_sort(dist.begin(), kth, dist.end());
    std::vector<int> idx(static_cast<std::size_t>(model.k));
    for (int i = 0; i < model.k; ++i) idx[static_cast<std::size_t>(i)] = dist[static_cast<std::size_t>(i)].second;
    return idx;
}

}  // namespace

KnnModel make_model(const Eigen::MatrixXd& points, const std::vector<int>& labels, int k) {
    if (points.rows() == 0) throw EmptyInput("knn: empty training set");
    if (static_cast<Eigen::Index>(labels.size()) != points.rows())
        throw LengthMismatch("knn: labels do not match points");
    if (k < 1 || k > static_cast<int>(points.rows()))
        throw Error("knn: k must lie in [1, n]");
    for (int label : labels)
        if (label != 0 && label != 1) throw NonBinaryValue("knn: labels must be 0 or 1");
    for (Eigen::Index i = 0; i < points.rows(); ++i)
        for (Eigen::Index j = 0; j < points.cols(); ++j)
            if (!std::isfinite(points(i, j))) throw Error("knn: points must be finite");
    return {points, labels, k};
}

int knn_predict(const KnnModel& model, const Eigen::VectorXd& x) {
    int votes1 = 0;
    for (int i : nearest(model, x)) votes1 += model.labels[static_cast<std::size_t>(i)];
    return 2 * votes1 >= model.k ? 1 : 0;  // vote tie -> class 1
}

double knn_vote_fraction(const KnnModel& model, const Eigen::VectorXd& x) {
    int votes1 = 0;
    for (int i : nearest(model, x)) votes1 += model.labels[static_cast<std::size_t>(i)];
    return static_cast<double>(votes1) / static_cast<double>(model.k);
}

int knn_select_k(const Eigen::MatrixXd& X_train, const std::vector<int>& y_train,
                 const Eigen::MatrixXd& X_val, const std::vector<int>& y_val,
                 const std::vector<int>& k_grid) {
    if (k_grid.empty()) throw EmptyInput("knn_select_k: empty k grid");
    if (X_val.rows() == 0) throw EmptyInput("knn_select_k: empty validation set");
    if (static_cast<Eigen::Index>(y_val.size()) != X_val.rows())
        throw LengthMismatch("knn_select_k: validation labels do not match rows");

    std::vector<int> ks;
    for (int k : k_grid)
        if (k >= 1 && k <= static_cast<int>(X_train.rows())) ks.push_back(k);
    if (ks.empty()) throw Error("knn_select_k: no feasible k in grid");
    const int kmax = *std::max_element(ks.begin(), ks.end());

    // rank each query once, then read every candidate k off the prefix votes
    KnnModel probe = make_model(X_train, y_train, kmax);
    std::vector<long long> correct(ks.size(), 0);
    for (Eigen::Index i = 0; i < X_val.rows(); ++i) {
        const std::vector<int> order = nearest(probe, X_val.row(i).transpose());
        std::vector<int> prefix1(static_cast<std::size_t>(kmax) + 1, 0);
        for (int r = 0; r < kmax; ++r)
            prefix1[static_cast<std::size_t>(r) + 1] =
                prefix1[static_cast<std::size_t>(r)] + y_train[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])];
        for (std::size_t g = 0; g < ks.size(); ++g) {
            const int k = ks[g];
            const int pred = 2 * prefix1[static_cast<std::size_t>(k)] >= k ? 1 : 0;
            if (pred == y_val[static_cast<std::size_t>(i)]) ++correct[g];
        }
    }

    int best_k = 0;
    long long best_correct = -1;
    for (std::size_t g = 0; g < ks.size(); ++g) {
        if (correct[g] > best_correct || (correct[g] == best_correct && ks[g] < best_k)) {
            best_correct = correct[g];
            best_k = ks[g];
        }
    }
    return best_k;
}

long long knn_model_bytes(const KnnModel& model) {
    return 4 * static_cast<long long>(model.points.rows()) * model.points.cols() +
           static_cast<long long>(model.points.rows());
}

}  // namespace nsd::knn
