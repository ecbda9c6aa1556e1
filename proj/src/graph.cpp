#include "bwg/graph.hpp"

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/boyer_myrvold_planar_test.hpp>

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

namespace bwg {

LabelledGraph::LabelledGraph(int n, std::vector<Edge> edges, std::optional<int> root, bool derived)
    : n_(n), edges_(std::move(edges)), root_(root), derived_(derived) {
  if (n < 0) throw std::invalid_argument("negative vertex count");
  const int lo = derived ? 0 : 1;
  for (auto& e : edges_) {
    if (e.first > e.second) std::swap(e.first, e.second);
    if (e.first == e.second) throw std::invalid_argument("loop at vertex " + std::to_string(e.first));
    if (e.first < lo || e.second > n) throw std::invalid_argument("edge endpoint out of range");
  }
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
    throw std::invalid_argument("duplicate edge");
  if (root_ && (*root_ < lo || *root_ > n)) throw std::invalid_argument("root out of range");
}

LabelledGraph LabelledGraph::with_root(std::optional<int> r) const {
  return LabelledGraph(n_, edges_, r, derived_);
}

std::vector<std::vector<int>> LabelledGraph::adjacency() const {
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n_) + 1);
  for (auto [a, b] : edges_) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  for (auto& l : adj) std::sort(l.begin(), l.end());
  return adj;
}

bool LabelledGraph::has_edge(int a, int b) const {
  if (a > b) std::swap(a, b);
  return std::binary_search(edges_.begin(), edges_.end(), Edge{a, b});
}

bool is_connected(const LabelledGraph& g) {
  if (g.vertex_count() <= 1) return true;
  auto adj = g.adjacency();
  std::vector<char> seen(adj.size(), 0);
  std::vector<int> stack{g.first_vertex()};
  seen[g.first_vertex()] = 1;
  int count = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int w : adj[v])
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        stack.push_back(w);
      }
  }
  return count == g.vertex_count();
}

BlockDecomposition block_decompose(const LabelledGraph& g) {
  if (g.vertex_count() < 2) throw std::invalid_argument("block_decompose needs at least two vertices");
  if (!is_connected(g)) throw std::invalid_argument("block_decompose needs a connected graph");
  auto adj = g.adjacency();
  const std::size_t V = adj.size();
  std::vector<int> disc(V, -1), low(V, 0);
  std::vector<Edge> estack;
  BlockDecomposition out;

  struct Frame {
    int v, parent;
    std::size_t next;
  };
  int clock = 0;
  const int start = g.first_vertex();
  std::vector<Frame> frames{{start, -1, 0}};
  disc[start] = low[start] = clock++;
  while (!frames.empty()) {
    Frame& f = frames.back();
    if (f.next < adj[f.v].size()) {
      int w = adj[f.v][f.next++];
      if (disc[w] < 0) {
        estack.emplace_back(f.v, w);
        disc[w] = low[w] = clock++;
        frames.push_back({w, f.v, 0});
      } else if (w != f.parent && disc[w] < disc[f.v]) {
        estack.emplace_back(f.v, w);
        low[f.v] = std::min(low[f.v], disc[w]);
      }
      continue;
    }
    const int v = f.v, p = f.parent;
    frames.pop_back();
    if (p < 0) continue;
    low[p] = std::min(low[p], low[v]);
    if (low[v] >= disc[p]) {
      Block b;
      while (true) {
        Edge e = estack.back();
        estack.pop_back();
        b.edges.emplace_back(std::min(e.first, e.second), std::max(e.first, e.second));
        b.vertices.push_back(e.first);
        b.vertices.push_back(e.second);
        if (e == Edge{p, v}) break;
      }
      std::sort(b.edges.begin(), b.edges.end());
      std::sort(b.vertices.begin(), b.vertices.end());
      b.vertices.erase(std::unique(b.vertices.begin(), b.vertices.end()), b.vertices.end());
      out.blocks.push_back(std::move(b));
    }
  }
  std::sort(out.blocks.begin(), out.blocks.end());
  std::vector<int> membership(V, 0);
  for (const auto& b : out.blocks)
    for (int v : b.vertices) ++membership[v];
  for (std::size_t v = 0; v < V; ++v)
    if (membership[v] >= 2) out.cut_vertices.push_back(static_cast<int>(v));
  return out;
}

BlockCutTree block_cut_tree(const LabelledGraph& g) {
  BlockCutTree t;
  if (g.vertex_count() == 1) return t;
  auto dec = block_decompose(g);
  t.block_count = static_cast<int>(dec.blocks.size());
  t.cut_vertices = dec.cut_vertices;
  for (int b = 0; b < t.block_count; ++b)
    for (int v : dec.blocks[b].vertices) {
      auto it = std::lower_bound(t.cut_vertices.begin(), t.cut_vertices.end(), v);
      if (it != t.cut_vertices.end() && *it == v)
        t.edges.emplace_back(b, t.block_count + static_cast<int>(it - t.cut_vertices.begin()));
    }
  return t;
}

bool is_2connected(const LabelledGraph& g) {
  const int V = g.vertex_count();
  if (V < 2) return false;
  if (V == 2) return g.edges().size() == 1;
  if (!is_connected(g)) return false;
  return block_decompose(g).blocks.size() == 1;
}

bool is_planar(const LabelledGraph& g) {
  const int V = g.vertex_count();
  if (V > kPlanarityMaxVertices) throw std::invalid_argument("is_planar supports at most 12 vertices");
  const int E = static_cast<int>(g.edges().size());
  if (V >= 3 && E > 3 * V - 6) return false;
  if (V <= 4) return true;
  using G = boost::adjacency_list<boost::vecS, boost::vecS, boost::undirectedS>;
  G bg(static_cast<std::size_t>(V));
  const int off = g.first_vertex();
  for (auto [a, b] : g.edges()) boost::add_edge(a - off, b - off, bg);
  return boost::boyer_myrvold_planarity_test(bg);
}

bool is_cactus(const LabelledGraph& g) {
  if (!is_connected(g)) return false;
  if (g.vertex_count() == 1) return true;
  for (const auto& b : block_decompose(g).blocks)
    if (b.edges.size() != 1 && b.edges.size() != b.vertices.size()) return false;
  return true;
}

void enumerate_graphs(int n, const GraphPredicate& pred, const std::function<void(const LabelledGraph&)>& visit) {
  if (n < 0) throw std::invalid_argument("negative vertex count");
  if (n > kEnumerateMaxVertices) throw std::invalid_argument("enumerate_graphs supports n <= 7");
  std::vector<Edge> slots;
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) slots.emplace_back(i, j);
  const int m = static_cast<int>(slots.size());
  const unsigned long total = 1UL << m;
  std::vector<Edge> edges;
  edges.reserve(m);
  for (unsigned long mask = 0; mask < total; ++mask) {
    edges.clear();
    for (int i = 0; i < m; ++i)
      if (mask >> (m - 1 - i) & 1UL) edges.push_back(slots[i]);
    LabelledGraph g(n, edges);
    if (!pred || pred(g)) visit(g);
  }
}

std::vector<LabelledGraph> enumerate_graphs(int n, const GraphPredicate& pred) {
  std::vector<LabelledGraph> out;
  enumerate_graphs(n, pred, [&](const LabelledGraph& g) { out.push_back(g); });
  return out;
}

LabelledGraph consistent_relabel(const LabelledGraph& g, const std::vector<int>& keep) {
  if (keep.empty()) throw std::invalid_argument("consistent_relabel needs a nonempty vertex set");
  std::vector<int> k(keep);
  std::sort(k.begin(), k.end());
  k.erase(std::unique(k.begin(), k.end()), k.end());
  const bool keeps_unlabelled = g.derived() && k.front() == 0;
  std::map<int, int> rank;
  int next = keeps_unlabelled ? 0 : 1;
  for (int v : k) {
    if (v < g.first_vertex() || v > g.size()) throw std::invalid_argument("vertex not in graph");
    rank[v] = next++;
  }
  std::vector<Edge> edges;
  for (auto [a, b] : g.edges()) {
    auto ia = rank.find(a), ib = rank.find(b);
    if (ia != rank.end() && ib != rank.end()) edges.emplace_back(ia->second, ib->second);
  }
  std::optional<int> root;
  if (g.root() && rank.count(*g.root())) root = rank[*g.root()];
  const int labelled = static_cast<int>(k.size()) - (keeps_unlabelled ? 1 : 0);
  return LabelledGraph(labelled, std::move(edges), root, keeps_unlabelled);
}

std::string to_exchange(const LabelledGraph& g) {
  std::ostringstream os;
  if (g.derived()) os << '*';
  os << g.size() << ';';
  bool first = true;
  for (auto [a, b] : g.edges()) {
    if (!first) os << ' ';
    first = false;
    os << a << ',' << b;
  }
  os << ';';
  if (g.root()) os << *g.root();
  return os.str();
}

LabelledGraph parse_exchange(const std::string& line) {
  std::string s = line;
  bool derived = false;
  if (!s.empty() && s[0] == '*') {
    derived = true;
    s = s.substr(1);
  }
  auto p1 = s.find(';');
  auto p2 = s.find(';', p1 == std::string::npos ? 0 : p1 + 1);
  if (p1 == std::string::npos || p2 == std::string::npos) throw std::invalid_argument("malformed graph line: " + line);
  int n = std::stoi(s.substr(0, p1));
  std::vector<Edge> edges;
  std::istringstream es(s.substr(p1 + 1, p2 - p1 - 1));
  std::string tok;
  while (es >> tok) {
    auto c = tok.find(',');
    if (c == std::string::npos) throw std::invalid_argument("malformed edge: " + tok);
    edges.emplace_back(std::stoi(tok.substr(0, c)), std::stoi(tok.substr(c + 1)));
  }
  std::optional<int> root;
  std::string r = s.substr(p2 + 1);
  while (!r.empty() && std::isspace(static_cast<unsigned char>(r.back()))) r.pop_back();
  if (!r.empty()) root = std::stoi(r);
  return LabelledGraph(n, std::move(edges), root, derived);
}

}  // namespace bwg
