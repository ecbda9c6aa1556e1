#pragma once

#include "bwg/graph.hpp"
#include "bwg/numeric.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace bwg {

/// Plane tree stored by its depth-first (preorder) outdegree sequence.
/// Vertex 0 is the root; children of v are listed left to right.
class PlaneTree {
 public:
  PlaneTree() : PlaneTree(std::vector<int>{0}) {}
  /// Throws unless the sequence is a valid preorder encoding.
  explicit PlaneTree(std::vector<int> outdegrees);

  int size() const { return static_cast<int>(outdeg_.size()); }
  int outdegree(int v) const { return outdeg_[v]; }
  const std::vector<int>& outdegrees() const { return outdeg_; }
  /// Children of v in plane order.
  std::span<const int> children(int v) const {
    return {child_list_.data() + child_start_[v], static_cast<std::size_t>(outdeg_[v])};
  }
  int parent(int v) const { return parent_[v]; }

  friend bool operator==(const PlaneTree& a, const PlaneTree& b) { return a.outdeg_ == b.outdeg_; }

 private:
  std::vector<int> outdeg_;
  std::vector<int> child_start_;
  std::vector<int> child_list_;
  std::vector<int> parent_;
};

/// A derived block inside a decoration. `shape` is a derived graph whose
/// labelled vertices 1..k map to `labels[0..k-1]` (ascending) of the
/// decoration; vertex 0 is the vertex the block hangs from.
struct DerivedBlock {
  LabelledGraph shape;
  std::vector<int> labels;
  int size() const { return static_cast<int>(labels.size()); }
  friend bool operator==(const DerivedBlock&, const DerivedBlock&) = default;
};

/// Well-labelled set of derived blocks, ordered by smallest label.
struct Decoration {
  std::vector<DerivedBlock> blocks;
  int total_size = 0;
  friend bool operator==(const Decoration&, const Decoration&) = default;
};

struct DecoratedBlockTree {
  PlaneTree tree;
  std::vector<Decoration> decorations;  // indexed by preorder vertex
};

struct LabelAllocation {
  int root_label = 1;
  std::vector<std::vector<int>> sets;  // ascending; sizes equal outdegrees
  friend bool operator==(const LabelAllocation&, const LabelAllocation&) = default;
};

struct BlockTreeResult {
  DecoratedBlockTree tree;
  LabelAllocation allocation;
};

/// Decorated block tree of a rooted connected graph. Every child set of a
/// vertex is ordered by graph label, which is also the decoration's label
/// order, so the allocation sets come out ascending.
BlockTreeResult build_block_tree(const LabelledGraph& g);

/// Inverse of build_block_tree. Throws on size mismatches or invalid labels.
LabelledGraph rebuild_graph(const DecoratedBlockTree& t, const LabelAllocation& alloc);

/// Checks decoration invariants: well-labelled union, outdegree match, and
/// each block shape 2-connected with vertex 0 restored.
bool decorations_consistent(const DecoratedBlockTree& t, std::string* why = nullptr);

/// dec(t) * n * multinomial(n-1; d_1..d_n) where dec(t) = prod phi[d_i] and
/// phi[k] is the EGF count of size-k decorations.
PolyU count_graphs_for_tree(const PlaneTree& t, const std::vector<PolyU>& phi_counts);
Rational count_graphs_for_tree(const PlaneTree& t, const std::vector<Rational>& phi_counts);

inline constexpr int kPlaneTreeMaxVertices = 12;

/// All Catalan(n-1) plane trees on n vertices, in decreasing lexicographic
/// order of the preorder outdegree sequence.
void enumerate_plane_trees(int n, const std::function<void(const PlaneTree&)>& visit);
std::vector<PlaneTree> enumerate_plane_trees(int n);

struct DegreeRanking {
  std::vector<int> degrees;   // nonincreasing
  std::vector<int> vertices;  // vertices[j] has degrees[j]; ties by preorder index
};

DegreeRanking tree_degree_stats(const PlaneTree& t);

/// Parenthesised dump: each vertex prints `[b1|b2|...]` with its blocks in
/// exchange format, followed by `(child child ...)` when it has children.
std::string dump_tree(const DecoratedBlockTree& t);

}  // namespace bwg
