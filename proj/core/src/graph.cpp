#include "tessera/graph/graph.hpp"

#include "tessera/errors.hpp"

namespace tessera::graph {

AdjacencyMatrix::AdjacencyMatrix(Eigen::MatrixXd a) : a_(std::move(a)) {
    if (a_.rows() != a_.cols()) throw InvalidArgument("adjacency: matrix must be square");
    for (int i = 0; i < a_.rows(); ++i) {
        if (a_(i, i) != 0.0) throw InvalidArgument("adjacency: diagonal must be zero");
        for (int j = 0; j < a_.cols(); ++j) {
            const double v = a_(i, j);
            if (v != 0.0 && v != 1.0) throw InvalidArgument("adjacency: entries must be 0 or 1");
            if (v != a_(j, i)) throw InvalidArgument("adjacency: matrix must be symmetric");
        }
    }
}

AdjacencyMatrix::AdjacencyMatrix(int n, const std::vector<std::pair<int, int>>& edges) {
    if (n < 1) throw InvalidArgument("adjacency: n must be positive");
    a_ = Eigen::MatrixXd::Zero(n, n);
    for (const auto& [i, j] : edges) {
        if (i < 0 || j < 0 || i >= n || j >= n) throw InvalidArgument("adjacency: edge out of range");
        if (i == j) throw InvalidArgument("adjacency: self-loop in edge list");
        a_(i, j) = 1.0;
        a_(j, i) = 1.0;
    }
}

AugmentedAdjacency augment_adjacency(const AdjacencyMatrix& a) {
    Eigen::MatrixXd t = a.matrix();
    t.diagonal().setOnes();
    return AugmentedAdjacency(std::move(t));
}

Eigen::VectorXd graph_convolution(const Eigen::MatrixXd& w_gc, const AugmentedAdjacency& a_tilde,
                                  const Eigen::VectorXd& x) {
    const int n = a_tilde.n();
    if (w_gc.rows() != n || w_gc.cols() != n || x.size() != n)
        throw InvalidArgument("graph_convolution: shape mismatch");
    return (w_gc.array() * a_tilde.matrix().array()).matrix() * x;
}

Eigen::MatrixXd k_hop_reach(const AdjacencyMatrix& a, int k) {
    if (k < 1) throw InvalidArgument("k_hop_reach: k must be >= 1");
    const int n = a.n();
    const Eigen::MatrixXd step = augment_adjacency(a).matrix();
    Eigen::MatrixXd reach = step;
    for (int hop = 1; hop < k; ++hop) {
        const Eigen::MatrixXd product = reach * step;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) reach(i, j) = product(i, j) > 0.0 ? 1.0 : 0.0;
    }
    return reach;
}

}  // namespace tessera::graph
