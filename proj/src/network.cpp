#include "varigame/network.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

#include "varigame/random.hpp"

namespace varigame {

RegularGraph::RegularGraph(std::vector<std::vector<NodeId>> adjacency) : n_nodes_(adjacency.size()) {
  if (n_nodes_ < 2) throw std::invalid_argument("graph needs at least two nodes");
  if (n_nodes_ > std::numeric_limits<NodeId>::max()) throw std::invalid_argument("graph too large");
  degree_ = adjacency.front().size();
  if (degree_ == 0) throw std::invalid_argument("graph degree must be positive");

  neighbors_.reserve(n_nodes_ * degree_);
  for (NodeId v = 0; v < n_nodes_; ++v) {
    const auto& nb = adjacency[v];
    if (nb.size() != degree_)
      throw std::invalid_argument("node " + std::to_string(v) + " has degree " + std::to_string(nb.size()) +
                                  ", expected " + std::to_string(degree_));
    auto sorted = nb;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::invalid_argument("node " + std::to_string(v) + " has a repeated neighbor");
    for (NodeId u : nb) {
      if (u >= n_nodes_) throw std::invalid_argument("neighbor id out of range");
      if (u == v) throw std::invalid_argument("self-loop at node " + std::to_string(v));
      const auto& back = adjacency[u];
      if (std::find(back.begin(), back.end(), v) == back.end())
        throw std::invalid_argument("asymmetric adjacency between " + std::to_string(v) + " and " +
                                    std::to_string(u));
    }
    neighbors_.insert(neighbors_.end(), nb.begin(), nb.end());
  }

  // Assign edge ids in order of first appearance from the smaller endpoint.
  edge_ids_.assign(neighbors_.size(), 0);
  std::map<std::pair<NodeId, NodeId>, EdgeId> ids;
  for (NodeId v = 0; v < n_nodes_; ++v) {
    for (std::size_t j = 0; j < degree_; ++j) {
      const NodeId u = neighbors_[v * degree_ + j];
      const auto key = std::minmax(v, u);
      auto [it, inserted] = ids.try_emplace({key.first, key.second}, static_cast<EdgeId>(edges_.size()));
      if (inserted) edges_.emplace_back(key.first, key.second);
      edge_ids_[v * degree_ + j] = it->second;
    }
  }
}

namespace {

RegularGraph lattice(std::size_t width, std::size_t height, bool diagonals) {
  if (width < 3 || height < 3)
    throw std::invalid_argument("periodic lattice needs both sides >= 3 (got " + std::to_string(width) + "x" +
                                std::to_string(height) + ")");
  const auto w = static_cast<long>(width);
  const auto h = static_cast<long>(height);
  auto id = [&](long x, long y) { return static_cast<NodeId>(((y + h) % h) * w + (x + w) % w); };

  std::vector<std::vector<NodeId>> adj(width * height);
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      auto& nb = adj[id(x, y)];
      nb = {id(x + 1, y), id(x - 1, y), id(x, y + 1), id(x, y - 1)};
      if (diagonals) {
        nb.insert(nb.end(), {id(x + 1, y + 1), id(x - 1, y + 1), id(x + 1, y - 1), id(x - 1, y - 1)});
      }
    }
  }
  return RegularGraph(std::move(adj));
}

} // namespace

RegularGraph lattice_von_neumann(std::size_t side) { return lattice(side, side, false); }
RegularGraph lattice_von_neumann(std::size_t width, std::size_t height) { return lattice(width, height, false); }
RegularGraph lattice_moore(std::size_t side) { return lattice(side, side, true); }
RegularGraph lattice_moore(std::size_t width, std::size_t height) { return lattice(width, height, true); }

RegularGraph complete_graph(std::size_t n) {
  if (n < 2) throw std::invalid_argument("complete graph needs n >= 2");
  std::vector<std::vector<NodeId>> adj(n);
  for (NodeId v = 0; v < n; ++v)
    for (NodeId u = 0; u < n; ++u)
      if (u != v) adj[v].push_back(u);
  return RegularGraph(std::move(adj));
}

RegularGraph random_regular(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k == 0 || k >= n) throw std::invalid_argument("random regular graph needs 0 < k < n");
  if ((n * k) % 2 != 0) throw std::invalid_argument("n * k must be even");

  RandomStream rng(seed);
  std::vector<std::vector<NodeId>> adj(n);
  auto legal = [&](NodeId a, NodeId b) {
    return a != b && std::find(adj[a].begin(), adj[a].end(), b) == adj[a].end();
  };

  for (int attempt = 0; attempt < kRandomRegularMaxRestarts; ++attempt) {
    for (auto& nb : adj) nb.clear();
    std::vector<NodeId> stubs;
    stubs.reserve(n * k);
    for (NodeId v = 0; v < n; ++v) stubs.insert(stubs.end(), k, v);

    bool stuck = false;
    while (!stubs.empty() && !stuck) {
      const std::size_t m = stubs.size();
      bool paired = false;
      // A handful of random tries before paying for the exhaustive legality scan.
      for (int tries = 0; tries < 64 && !paired; ++tries) {
        const std::size_t i = rng.below(m);
        std::size_t j = rng.below(m - 1);
        if (j >= i) ++j;
        if (!legal(stubs[i], stubs[j])) continue;
        adj[stubs[i]].push_back(stubs[j]);
        adj[stubs[j]].push_back(stubs[i]);
        const auto [hi, lo] = std::minmax(i, j, std::greater<>());
        stubs[hi] = stubs.back();
        stubs.pop_back();
        stubs[lo] = stubs.back();
        stubs.pop_back();
        paired = true;
      }
      if (paired) continue;
      std::vector<std::pair<std::size_t, std::size_t>> options;
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
          if (legal(stubs[i], stubs[j])) options.emplace_back(i, j);
      if (options.empty()) {
        stuck = true;
        break;
      }
      const auto [i, j] = options[rng.below(options.size())];
      adj[stubs[i]].push_back(stubs[j]);
      adj[stubs[j]].push_back(stubs[i]);
      stubs[j] = stubs.back();
      stubs.pop_back();
      stubs[i] = stubs.back();
      stubs.pop_back();
    }
    if (!stuck) return RegularGraph(std::move(adj));
  }
  throw std::runtime_error("random regular graph construction failed after " +
                           std::to_string(kRandomRegularMaxRestarts) + " restarts");
}

} // namespace varigame
