#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace bwg {

using Edge = std::pair<int, int>;

/// Simple labelled graph. Ordinary graphs use vertex ids 1..n. A derived
/// graph additionally carries the unlabelled vertex at id 0; its size n still
/// counts labelled vertices only.
class LabelledGraph {
 public:
  LabelledGraph() = default;
  /// Edges are normalised to (min, max) and sorted; loops, duplicates and
  /// out-of-range ids throw.
  LabelledGraph(int n, std::vector<Edge> edges, std::optional<int> root = std::nullopt, bool derived = false);

  int size() const { return n_; }
  bool derived() const { return derived_; }
  int first_vertex() const { return derived_ ? 0 : 1; }
  int vertex_count() const { return derived_ ? n_ + 1 : n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::optional<int>& root() const { return root_; }

  LabelledGraph with_root(std::optional<int> r) const;
  /// Adjacency lists indexed by vertex id (entry 0 unused for ordinary graphs).
  std::vector<std::vector<int>> adjacency() const;
  bool has_edge(int a, int b) const;

  friend bool operator==(const LabelledGraph&, const LabelledGraph&) = default;

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
  std::optional<int> root_;
  bool derived_ = false;
};

struct Block {
  std::vector<int> vertices;  // sorted
  std::vector<Edge> edges;    // sorted
  friend bool operator==(const Block&, const Block&) = default;
  friend auto operator<=>(const Block& a, const Block& b) { return a.edges <=> b.edges; }
};

struct BlockDecomposition {
  std::vector<Block> blocks;       // sorted by edge list
  std::vector<int> cut_vertices;   // sorted
};

struct BlockCutTree {
  int block_count = 0;
  std::vector<int> cut_vertices;   // node block_count + i is cut_vertices[i]
  std::vector<std::pair<int, int>> edges;  // (block node, cut node)
  int node_count() const { return block_count + static_cast<int>(cut_vertices.size()); }
};

bool is_connected(const LabelledGraph& g);

/// Maximal 2-connected subgraphs by one lowpoint DFS with an edge stack.
/// Throws std::invalid_argument for disconnected graphs or fewer than two vertices.
BlockDecomposition block_decompose(const LabelledGraph& g);

BlockCutTree block_cut_tree(const LabelledGraph& g);

/// True for a single edge, or for a connected graph on at least 3 vertices
/// without cut vertex.
bool is_2connected(const LabelledGraph& g);

inline constexpr int kPlanarityMaxVertices = 12;

/// Planarity membership for small graphs (at most kPlanarityMaxVertices).
bool is_planar(const LabelledGraph& g);

/// Every block is a single edge or a cycle.
bool is_cactus(const LabelledGraph& g);

using GraphPredicate = std::function<bool(const LabelledGraph&)>;

inline constexpr int kEnumerateMaxVertices = 7;

/// Visits every simple graph on {1..n} accepted by pred. Edge (i,j), i<j, is
/// ranked lexicographically; edge sets are visited in increasing order of
/// their characteristic vector read with the first edge most significant.
void enumerate_graphs(int n, const GraphPredicate& pred, const std::function<void(const LabelledGraph&)>& visit);
std::vector<LabelledGraph> enumerate_graphs(int n, const GraphPredicate& pred);

/// Restriction to `keep`, relabelled order-preservingly onto {1..|keep|}.
/// For derived graphs vertex 0 stays the unlabelled vertex when kept.
LabelledGraph consistent_relabel(const LabelledGraph& g, const std::vector<int>& keep);

/// `n;u,v u,v ...;root` with root empty when absent. Derived graphs are
/// written with a leading `*`.
std::string to_exchange(const LabelledGraph& g);
LabelledGraph parse_exchange(const std::string& line);

}  // namespace bwg
