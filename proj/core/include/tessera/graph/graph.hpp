#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace tessera::graph {

/// Symmetric 0/1 adjacency with zero diagonal.
class AdjacencyMatrix {
public:
    AdjacencyMatrix() = default;
    /// Validates symmetry, zero diagonal and 0/1 entries.
    explicit AdjacencyMatrix(Eigen::MatrixXd a);
    /// From an undirected edge list.
    AdjacencyMatrix(int n, const std::vector<std::pair<int, int>>& edges);

    int n() const { return static_cast<int>(a_.rows()); }
    const Eigen::MatrixXd& matrix() const { return a_; }

private:
    Eigen::MatrixXd a_;
};

/// Adjacency with self-loops added (unit diagonal).
class AugmentedAdjacency {
public:
    AugmentedAdjacency() = default;
    explicit AugmentedAdjacency(Eigen::MatrixXd a_tilde) : a_(std::move(a_tilde)) {}

    int n() const { return static_cast<int>(a_.rows()); }
    const Eigen::MatrixXd& matrix() const { return a_; }

private:
    Eigen::MatrixXd a_;
};

AugmentedAdjacency augment_adjacency(const AdjacencyMatrix& a);

/// 1-hop graph convolution: (w_gc masked by a_tilde) * x.
Eigen::VectorXd graph_convolution(const Eigen::MatrixXd& w_gc, const AugmentedAdjacency& a_tilde,
                                  const Eigen::VectorXd& x);

/// Boolean reachability within <= k hops, self included. k = 1 equals
/// augment_adjacency.
Eigen::MatrixXd k_hop_reach(const AdjacencyMatrix& a, int k);

}  // namespace tessera::graph
