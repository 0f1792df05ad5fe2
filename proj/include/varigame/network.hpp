#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace varigame {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

/// Simple undirected k-regular graph. Edges carry stable ids so per-edge state
/// (the game currently played across the edge) can be stored in flat arrays.
class RegularGraph {
public:
  /// Validates regularity, symmetry, distinct neighbors and absence of
  /// self-loops. Throws std::invalid_argument.
  explicit RegularGraph(std::vector<std::vector<NodeId>> adjacency);

  std::size_t n_nodes() const { return n_nodes_; }
  std::size_t degree() const { return degree_; }
  std::size_t n_edges() const { return edges_.size(); }

  std::span<const NodeId> neighbors(NodeId v) const {
    return {neighbors_.data() + static_cast<std::size_t>(v) * degree_, degree_};
  }
  /// edge_ids(v)[j] is the id of the edge (v, neighbors(v)[j]).
  std::span<const EdgeId> edge_ids(NodeId v) const {
    return {edge_ids_.data() + static_cast<std::size_t>(v) * degree_, degree_};
  }
  /// Endpoints of each edge, smaller id first.
  const std::vector<std::pair<NodeId, NodeId>>& edges() const { return edges_; }

private:
  std::size_t n_nodes_;
  std::size_t degree_;
  std::vector<NodeId> neighbors_;
  std::vector<EdgeId> edge_ids_;
  std::vector<std::pair<NodeId, NodeId>> edges_;
};

/// Periodic square lattice, 4 orthogonal neighbors. side >= 3.
RegularGraph lattice_von_neumann(std::size_t side);
/// Periodic width x height lattice, 4 neighbors. Both dimensions >= 3.
RegularGraph lattice_von_neumann(std::size_t width, std::size_t height);

/// Periodic square lattice, 8 neighbors (orthogonal and diagonal). side >= 3.
RegularGraph lattice_moore(std::size_t side);
RegularGraph lattice_moore(std::size_t width, std::size_t height);

/// K_n, degree n - 1. n >= 2.
RegularGraph complete_graph(std::size_t n);

/// Maximum number of restarts of the stub-pairing construction.
inline constexpr int kRandomRegularMaxRestarts = 1000;

/// Random simple k-regular graph from the pairing (configuration) model. Stubs
/// are paired uniformly at random; a pairing that would create a loop or a
/// multi-edge is redrawn, and when no legal pair remains the construction
/// restarts (at most kRandomRegularMaxRestarts times). Deterministic in `seed`.
/// Throws std::invalid_argument when n*k is odd or k >= n, std::runtime_error
/// when the restart bound is exhausted.
RegularGraph random_regular(std::size_t n, std::size_t k, std::uint64_t seed);

} // namespace varigame
