#include "bwg/block_tree.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace bwg {

PlaneTree::PlaneTree(std::vector<int> outdegrees) : outdeg_(std::move(outdegrees)) {
  const int n = static_cast<int>(outdeg_.size());
  if (n == 0) throw std::invalid_argument("plane tree needs at least one vertex");
  child_start_.assign(n, 0);
  parent_.assign(n, -1);
  long acc = 0;
  for (int v = 0; v < n; ++v) {
    if (outdeg_[v] < 0) throw std::invalid_argument("negative outdegree");
    child_start_[v] = static_cast<int>(acc);
    acc += outdeg_[v];
  }
  if (acc != n - 1) throw std::invalid_argument("outdegrees must sum to n - 1");
  child_list_.assign(static_cast<std::size_t>(n - 1), -1);
  std::vector<int> filled(n, 0);
  std::vector<int> open;  // vertices with pending children
  for (int v = 0; v < n; ++v) {
    if (v > 0) {
      if (open.empty()) throw std::invalid_argument("not a preorder outdegree sequence");
      int p = open.back();
      parent_[v] = p;
      child_list_[child_start_[p] + filled[p]++] = v;
      if (filled[p] == outdeg_[p]) open.pop_back();
    }
    if (outdeg_[v] > 0) open.push_back(v);
  }
  if (!open.empty()) throw std::invalid_argument("not a preorder outdegree sequence");
}

BlockTreeResult build_block_tree(const LabelledGraph& g) {
  if (!g.root()) throw std::invalid_argument("build_block_tree needs a rooted graph");
  if (g.derived()) throw std::invalid_argument("build_block_tree needs an ordinary graph");
  if (!is_connected(g)) throw std::invalid_argument("build_block_tree needs a connected graph");
  const int n = g.size();
  std::vector<Block> blocks;
  if (n >= 2) blocks = block_decompose(g).blocks;
  std::vector<std::vector<int>> blocks_at(static_cast<std::size_t>(n) + 1);
  for (int b = 0; b < static_cast<int>(blocks.size()); ++b)
    for (int v : blocks[b].vertices) blocks_at[v].push_back(b);

  BlockTreeResult out;
  out.allocation.root_label = *g.root();
  std::vector<int> outdeg;
  outdeg.reserve(n);

  struct Item {
    int vertex;
    int parent_block;
  };
  std::vector<Item> stack{{*g.root(), -1}};
  while (!stack.empty()) {
    auto [v, pb] = stack.back();
    stack.pop_back();

    std::vector<int> own;
    for (int b : blocks_at[v])
      if (b != pb) own.push_back(b);
    std::vector<int> kids;
    for (int b : own)
      for (int w : blocks[b].vertices)
        if (w != v) kids.push_back(w);
    std::sort(kids.begin(), kids.end());

    Decoration dec;
    dec.total_size = static_cast<int>(kids.size());
    for (int b : own) {
      const Block& blk = blocks[b];
      std::vector<int> others;
      for (int w : blk.vertices)
        if (w != v) others.push_back(w);  // ascending
      std::map<int, int> local;
      local[v] = 0;
      for (std::size_t i = 0; i < others.size(); ++i) local[others[i]] = static_cast<int>(i) + 1;
      std::vector<Edge> edges;
      for (auto [a, c] : blk.edges) edges.emplace_back(local[a], local[c]);
      DerivedBlock db{LabelledGraph(static_cast<int>(others.size()), std::move(edges), std::nullopt, true), {}};
      for (int w : others)
        db.labels.push_back(static_cast<int>(std::lower_bound(kids.begin(), kids.end(), w) - kids.begin()) + 1);
      dec.blocks.push_back(std::move(db));
    }
    std::sort(dec.blocks.begin(), dec.blocks.end(),
              [](const DerivedBlock& a, const DerivedBlock& b) { return a.labels.front() < b.labels.front(); });

    outdeg.push_back(dec.total_size);
    out.tree.decorations.push_back(std::move(dec));
    out.allocation.sets.push_back(kids);

    // parent block of child w is the unique own block containing it
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) {
      int via = -1;
      for (int b : own)
        if (std::binary_search(blocks[b].vertices.begin(), blocks[b].vertices.end(), *it)) via = b;
      stack.push_back({*it, via});
    }
  }
  out.tree.tree = PlaneTree(std::move(outdeg));
  return out;
}

LabelledGraph rebuild_graph(const DecoratedBlockTree& t, const LabelAllocation& alloc) {
  const int n = t.tree.size();
  if (static_cast<int>(t.decorations.size()) != n || static_cast<int>(alloc.sets.size()) != n)
    throw std::invalid_argument("allocation or decorations do not match the tree size");
  std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
  auto take = [&](int label) {
    if (label < 1 || label > n || used[label]) throw std::invalid_argument("allocation is not a partition of 1..n");
    used[label] = 1;
  };
  take(alloc.root_label);
  for (int v = 0; v < n; ++v) {
    const auto& s = alloc.sets[v];
    if (static_cast<int>(s.size()) != t.tree.outdegree(v)) throw std::invalid_argument("allocation size differs from outdegree");
    if (!std::is_sorted(s.begin(), s.end())) throw std::invalid_argument("allocation sets must be ascending");
    for (int l : s) take(l);
  }

  std::vector<int> label(n, 0);
  label[0] = alloc.root_label;
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) {
    auto kids = t.tree.children(v);
    for (std::size_t i = 0; i < kids.size(); ++i) label[kids[i]] = alloc.sets[v][i];
    const Decoration& dec = t.decorations[v];
    if (dec.total_size != t.tree.outdegree(v)) throw std::invalid_argument("decoration size differs from outdegree");
    for (const auto& b : dec.blocks) {
      if (b.shape.size() != b.size()) throw std::invalid_argument("block shape and label list disagree");
      auto map = [&](int x) {
        if (x == 0) return label[v];
        int rank = b.labels[x - 1];
        if (rank < 1 || rank > dec.total_size) throw std::invalid_argument("decoration label out of range");
        return alloc.sets[v][rank - 1];
      };
      for (auto [a, c] : b.shape.edges()) edges.emplace_back(map(a), map(c));
    }
  }
  return LabelledGraph(n, std::move(edges), alloc.root_label);
}

bool decorations_consistent(const DecoratedBlockTree& t, std::string* why) {
  auto fail = [&](const std::string& m) {
    if (why) *why = m;
    return false;
  };
  if (static_cast<int>(t.decorations.size()) != t.tree.size()) return fail("decoration count");
  for (int v = 0; v < t.tree.size(); ++v) {
    const auto& d = t.decorations[v];
    if (d.total_size != t.tree.outdegree(v)) return fail("outdegree mismatch at vertex " + std::to_string(v));
    std::vector<int> all;
    int prev_min = 0;
    for (const auto& b : d.blocks) {
      if (b.labels.empty() || !std::is_sorted(b.labels.begin(), b.labels.end())) return fail("block labels");
      if (b.labels.front() <= prev_min) return fail("blocks not ordered by smallest label");
      prev_min = b.labels.front();
      if (b.shape.size() != b.size() || !b.shape.derived()) return fail("block shape");
      if (!is_2connected(b.shape)) return fail("block not 2-connected");
      all.insert(all.end(), b.labels.begin(), b.labels.end());
    }
    std::sort(all.begin(), all.end());
    for (int i = 0; i < static_cast<int>(all.size()); ++i)
      if (all[i] != i + 1) return fail("decoration not well-labelled at vertex " + std::to_string(v));
    if (static_cast<int>(all.size()) != d.total_size) return fail("decoration size");
  }
  return true;
}

namespace {

template <class T>
T count_impl(const PlaneTree& t, const std::vector<T>& phi) {
  const int n = t.size();
  T dec = T(1);
  Integer denom = 1;
  for (int v = 0; v < n; ++v) {
    int d = t.outdegree(v);
    if (d >= static_cast<int>(phi.size())) throw std::invalid_argument("decoration counts missing for outdegree " + std::to_string(d));
    dec = dec * phi[d];
    denom *= factorial(static_cast<unsigned>(d));
  }
  Integer mult = factorial(static_cast<unsigned>(n - 1)) / denom;
  return dec * T(Rational(mult * n));
}

}  // namespace

PolyU count_graphs_for_tree(const PlaneTree& t, const std::vector<PolyU>& phi_counts) {
  return count_impl(t, phi_counts);
}

Rational count_graphs_for_tree(const PlaneTree& t, const std::vector<Rational>& phi_counts) {
  return count_impl(t, phi_counts);
}

void enumerate_plane_trees(int n, const std::function<void(const PlaneTree&)>& visit) {
  if (n < 1) throw std::invalid_argument("plane trees need at least one vertex");
  if (n > kPlaneTreeMaxVertices) throw std::invalid_argument("enumerate_plane_trees supports n <= 12");
  std::vector<int> seq(n, 0);
  // slots = number of still-unfilled child positions before position i
  std::function<void(int, int)> rec = [&](int i, int slots) {
    const int remaining = n - i - 1;
    if (remaining == 0) {
      if (slots != 1) return;
      seq[i] = 0;
      visit(PlaneTree(seq));
      return;
    }
    const int hi = remaining - slots + 1;
    const int lo = std::max(0, 2 - slots);
    for (int d = hi; d >= lo; --d) {
      seq[i] = d;
      rec(i + 1, slots - 1 + d);
    }
  };
  rec(0, 1);
}

std::vector<PlaneTree> enumerate_plane_trees(int n) {
  std::vector<PlaneTree> out;
  enumerate_plane_trees(n, [&](const PlaneTree& t) { out.push_back(t); });
  return out;
}

DegreeRanking tree_degree_stats(const PlaneTree& t) {
  DegreeRanking r;
  r.vertices.resize(t.size());
  std::iota(r.vertices.begin(), r.vertices.end(), 0);
  std::stable_sort(r.vertices.begin(), r.vertices.end(),
                   [&](int a, int b) { return t.outdegree(a) > t.outdegree(b); });
  r.degrees.reserve(t.size());
  for (int v : r.vertices) r.degrees.push_back(t.outdegree(v));
  return r;
}

std::string dump_tree(const DecoratedBlockTree& t) {
  std::ostringstream os;
  struct Item {
    int v;
    bool close;
  };
  std::vector<Item> stack{{0, false}};
  bool need_space = false;
  while (!stack.empty()) {
    Item it = stack.back();
    stack.pop_back();
    if (it.close) {
      os << ')';
      need_space = true;
      continue;
    }
    if (need_space) os << ' ';
    os << '[';
    const auto& d = t.decorations[it.v];
    for (std::size_t i = 0; i < d.blocks.size(); ++i) {
      if (i) os << '|';
      os << to_exchange(d.blocks[i].shape) << '@';
      for (std::size_t j = 0; j < d.blocks[i].labels.size(); ++j) os << (j ? "," : "") << d.blocks[i].labels[j];
    }
    os << ']';
    need_space = true;
    auto kids = t.tree.children(it.v);
    if (!kids.empty()) {
      os << '(';
      need_space = false;
      stack.push_back({it.v, true});
      for (auto k = kids.rbegin(); k != kids.rend(); ++k) stack.push_back({*k, false});
    }
  }
  return os.str();
}

}  // namespace bwg
