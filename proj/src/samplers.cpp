#include "bwg/samplers.hpp"

#include "bwg/convolution.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace bwg {

namespace {

constexpr double kNegligibleTail = 1e-12;

bool is_concrete(const BlockClassSpec& cls) { return cls.tools.has_value() && !cls.abstract; }

std::size_t pick(const std::vector<double>& w, double total, Rng& rng) {
  double target = rng.uniform() * total;
  for (std::size_t i = 0; i < w.size(); ++i) {
    target -= w[i];
    if (target < 0) return i;
  }
  // rounding: the last positive entry
  for (std::size_t i = w.size(); i-- > 0;)
    if (w[i] > 0) return i;
  throw std::logic_error("pick from an all-zero weight vector");
}

}  // namespace

// ---------------------------------------------------------------------------

BlockSizeSampler::BlockSizeSampler(const BlockClassSpec& cls, double y, int table_cap) {
  if (!cls.unbounded) throw std::invalid_argument(cls.name + ": block-size sampling needs coefficients of every order");
  if (!(y > 0) || y > cls.rho_B) throw std::domain_error(cls.name + ": block-size sampler needs 0 < y <= rho_B");
  if (table_cap < 1) throw std::invalid_argument("table cap must be positive");
  cap_ = table_cap;
  std::vector<double> w(static_cast<std::size_t>(cap_), 0.0);
  const double ly = std::log(y);
  for (int j = 1; j <= cap_; ++j) {
    const double c = cls.coefficient_double(j);
    if (c != 0) w[j - 1] = c * std::exp(j * ly);
    head_ += w[j - 1];
  }
  if (cls.power_law) {
    beta_ = cls.power_law->beta;
    q_ = y / cls.rho_B;
    tail_ = cls.power_law->A * power_tail_sum(cap_, beta_, q_);
  } else if (cls.closed_form && cls.closed_form->Bp) {
    const double bp = cls.closed_form->Bp(y);
    if ((bp - head_) / bp > kNegligibleTail)
      throw std::runtime_error(cls.name + ": block-size tail beyond the table is not negligible");
  }
  total_ = head_ + tail_;
  table_ = AliasTable(w);
}

int BlockSizeSampler::sample(Rng& rng) const {
  if (tail_ > 0 && rng.uniform() * total_ >= head_) return sample_tail(rng);
  return static_cast<int>(table_.sample(rng)) + 1;
}

int BlockSizeSampler::sample_tail(Rng& rng) const {
  const double k0 = cap_ + 1;
  const bool geometric = q_ < 1 && 1 / (1 - q_) <= k0;
  for (;;) {
    if (geometric) {
      // j = k0 + Geometric(1 - q); accept with (j / k0)^{-beta}
      const double g = std::floor(std::log(rng.uniform_pos()) / std::log(q_));
      const double j = k0 + g;
      if (j > INT_MAX - 1) continue;
      if (rng.uniform() < std::pow(j / k0, -beta_)) return static_cast<int>(j);
    } else {
      // j = floor(X), X Pareto on [k0, inf) with density ~ x^{-beta}
      const double x = k0 * std::pow(rng.uniform_pos(), -1 / (beta_ - 1));
      if (!(x < INT_MAX - 1)) continue;
      const double j = std::floor(x);
      const double bound = std::pow(1 + 1 / k0, beta_);
      const double ratio = (beta_ - 1) / (j * -std::expm1((1 - beta_) * std::log1p(1 / j)));
      const double accept = ratio * (q_ < 1 ? std::exp(j * std::log(q_)) : 1.0) / bound;
      if (rng.uniform() < accept) return static_cast<int>(j);
    }
  }
}

// ---------------------------------------------------------------------------

int DecorationSample::total() const { return std::accumulate(sizes.begin(), sizes.end(), 0); }

Decoration reshuffle_labels(std::vector<LabelledGraph> shapes, Rng& rng) {
  int total = 0;
  for (const auto& s : shapes) total += s.size();
  auto perm = rng.permutation(total);
  Decoration d;
  d.total_size = total;
  int offset = 0;
  for (auto& s : shapes) {
    std::vector<int> labels(perm.begin() + offset, perm.begin() + offset + s.size());
    for (int& l : labels) ++l;
    std::sort(labels.begin(), labels.end());
    offset += s.size();
    d.blocks.push_back({std::move(s), std::move(labels)});
  }
  std::sort(d.blocks.begin(), d.blocks.end(),
            [](const DerivedBlock& a, const DerivedBlock& b) { return a.labels.front() < b.labels.front(); });
  return d;
}

LabelAllocation uniform_allocation(const PlaneTree& t, Rng& rng) {
  const int n = t.size();
  LabelAllocation a;
  a.root_label = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
  std::vector<int> rest;
  rest.reserve(n - 1);
  for (int l = 1; l <= n; ++l)
    if (l != a.root_label) rest.push_back(l);
  auto perm = rng.permutation(n - 1);
  a.sets.resize(n);
  int offset = 0;
  for (int v = 0; v < n; ++v) {
    auto& s = a.sets[v];
    for (int i = 0; i < t.outdegree(v); ++i) s.push_back(rest[perm[offset + i]]);
    offset += t.outdegree(v);
    std::sort(s.begin(), s.end());
  }
  return a;
}

namespace {

void finish_concrete(const BlockClassSpec& cls, SampleOutput& out, std::vector<Decoration> decs, Rng& rng,
                     bool graph) {
  if (!is_concrete(cls)) return;
  DecoratedBlockTree t{out.tree, std::move(decs)};
  out.allocation = uniform_allocation(out.tree, rng);
  if (graph) out.graph = rebuild_graph(t, *out.allocation);
  out.decorated = std::move(t);
}

}  // namespace

// ---------------------------------------------------------------------------

double cstar_value(const BlockClassSpec& cls, double u, double x) {
  const PhaseSolution s = solve_phase(cls, u);
  if (!(x > 0)) throw std::domain_error("x must be positive");
  if (x > s.rho_u * (1 + 1e-14)) throw std::domain_error(cls.name + ": x beyond rho(u), C(x, u) diverges");
  const double bp_top = s.y_u == cls.rho_B && cls.metadata ? cls.metadata->Bp_at_rho : eval_Bp(cls, s.y_u);
  auto f = [&](double y) { return y - x * std::exp(u * (y == s.y_u ? bp_top : eval_Bp(cls, y))); };
  double lo = 0, hi = s.y_u;
  if (f(hi) <= 0) return hi;
  for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

BoltzmannSampler::BoltzmannSampler(const BlockClassSpec& cls, double u, double x)
    : BoltzmannSampler(cls, u, x, cstar_value(cls, u, x)) {}

BoltzmannSampler::BoltzmannSampler(const BlockClassSpec& cls, double u, double x, double y)
    : cls_(&cls), u_(u), x_(x), y_(y), sizes_(std::make_shared<BlockSizeSampler>(cls, y)) {
  if (!(u > 0)) throw std::invalid_argument("weight u must be positive");
}

BoltzmannSampler BoltzmannSampler::at_y(const BlockClassSpec& cls, double u, double y) {
  return BoltzmannSampler(cls, u, 0, y);
}

DecorationSample BoltzmannSampler::phi(Rng& rng) const {
  DecorationSample d;
  const long k = rng.poisson(u_ * sizes_->Bp());
  d.sizes.reserve(static_cast<std::size_t>(k));
  for (long i = 0; i < k; ++i) d.sizes.push_back(sizes_->sample(rng));
  if (is_concrete(*cls_)) {
    std::vector<LabelledGraph> shapes;
    for (int s : d.sizes) shapes.push_back(cls_->tools->sample(s, rng));
    d.decoration = reshuffle_labels(std::move(shapes), rng);
    d.sizes.clear();
    for (const auto& b : d.decoration->blocks) d.sizes.push_back(b.size());
  }
  return d;
}

std::optional<SampleOutput> BoltzmannSampler::cstar_sample(Rng& rng, long max_size, bool graph) const {
  // preorder generation: `pending` counts vertices announced but not drawn
  std::vector<int> outdeg;
  std::vector<std::vector<int>> sizes;
  std::vector<Decoration> decs;
  const bool concrete = is_concrete(*cls_);
  long pending = 1;
  while (pending > 0) {
    auto d = phi(rng);
    const int total = d.total();
    outdeg.push_back(total);
    sizes.push_back(std::move(d.sizes));
    if (concrete) decs.push_back(std::move(*d.decoration));
    pending += total - 1;
    if (static_cast<long>(outdeg.size()) + pending > max_size) return std::nullopt;
  }
  SampleOutput out;
  out.tree = PlaneTree(std::move(outdeg));
  out.block_sizes = std::move(sizes);
  out.u = u_;
  out.x = x_;
  finish_concrete(*cls_, out, std::move(decs), rng, graph);
  return out;
}

DecorationSample boltzmann_phi(const BlockClassSpec& cls, double y, double u, const RngHandle& h) {
  Rng rng(h);
  return BoltzmannSampler::at_y(cls, u, y).phi(rng);
}

std::optional<SampleOutput> boltzmann_cstar(const BlockClassSpec& cls, double x, double u, const RngHandle& h,
                                            long max_size) {
  Rng rng(h);
  return BoltzmannSampler(cls, u, x).cstar_sample(rng, max_size);
}

// ---------------------------------------------------------------------------

ConditionedTreeSampler::ConditionedTreeSampler(const std::vector<double>& mu, int n) : n_(n), t_(n - 1) {
  if (n < 1) throw std::invalid_argument("tree size must be positive");
  std::vector<double> base(static_cast<std::size_t>(t_) + 1, 0.0);
  for (int j = 0; j <= t_ && j < static_cast<int>(mu.size()); ++j) base[j] = std::max(0.0, mu[j]);
  if (n > 1 && !(base[0] > 0)) throw std::invalid_argument("offspring law without leaves");
  laws_.emplace(1, std::move(base));
  build(n);
  if (!(laws_.at(n)[t_] > 0)) throw std::invalid_argument("offspring law cannot produce a tree of this size");
}

void ConditionedTreeSampler::build(int m) {
  if (laws_.count(m)) return;
  const int a = m / 2, b = m - a;
  build(a);
  build(b);
  auto c = convolve(laws_.at(a), laws_.at(b), static_cast<std::size_t>(t_) + 1);
  for (double& v : c) v = std::max(0.0, v);
  laws_.emplace(m, std::move(c));
}

std::vector<int> ConditionedTreeSampler::sample_sequence(Rng& rng) const {
  std::vector<int> out(static_cast<std::size_t>(n_), 0);
  struct Task {
    int m, target, offset;
  };
  std::vector<Task> stack{{n_, t_, 0}};
  std::vector<double> w;
  while (!stack.empty()) {
    const Task task = stack.back();
    stack.pop_back();
    if (task.m == 1) {
      out[task.offset] = task.target;
      continue;
    }
    const int a = task.m / 2, b = task.m - a;
    const auto& la = law(a);
    const auto& lb = law(b);
    w.assign(static_cast<std::size_t>(task.target) + 1, 0.0);
    double total = 0;
    for (int s = 0; s <= task.target; ++s) {
      w[s] = la[s] * lb[task.target - s];
      total += w[s];
    }
    if (!(total > 0)) throw std::runtime_error("conditioned sampler: partial-sum law underflow");
    const int s = static_cast<int>(pick(w, total, rng));
    stack.push_back({b, task.target - s, task.offset + a});
    stack.push_back({a, s, task.offset});
  }
  return out;
}

std::vector<int> cycle_lemma_rotate(const std::vector<int>& seq) {
  const std::size_t n = seq.size();
  long walk = 0, best = LONG_MAX;
  std::size_t start = 0;
  for (std::size_t k = 0; k < n; ++k) {
    walk += seq[k] - 1;
    if (walk < best) {
      best = walk;
      start = k + 1;
    }
  }
  if (walk != -1) throw std::invalid_argument("cycle lemma needs outdegree sum n - 1");
  std::vector<int> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = seq[(start + i) % n];
  return out;
}

PlaneTree ConditionedTreeSampler::sample(Rng& rng) const { return PlaneTree(cycle_lemma_rotate(sample_sequence(rng))); }

PlaneTree bienayme_conditioned(const ReproductionLaw& law, int n, Rng& rng) {
  return ConditionedTreeSampler(law.probs, n).sample(rng);
}

PlaneTree bienayme_conditioned_rejection(const ReproductionLaw& law, int n, Rng& rng, long budget,
                                         RejectionDiagnostics* diag) {
  if (n < 1) throw std::invalid_argument("tree size must be positive");
  if (n == 1) return PlaneTree();
  std::vector<double> w(law.probs.begin(), law.probs.begin() + std::min<std::size_t>(law.probs.size(), n));
  if (!(w[0] > 0)) throw std::invalid_argument("offspring law without leaves");
  AliasTable table(w);
  RejectionDiagnostics local;
  RejectionDiagnostics& d = diag ? *diag : local;
  std::vector<int> seq(static_cast<std::size_t>(n));
  while (d.draws < budget) {
    ++d.attempts;
    long sum = 0;
    int i = 0;
    for (; i < n && sum <= n - 1; ++i) {
      seq[i] = static_cast<int>(table.sample(rng));
      sum += seq[i];
    }
    d.draws += i;
    if (i == n && sum == n - 1) return PlaneTree(cycle_lemma_rotate(seq));
  }
  throw std::runtime_error("rejection budget exhausted after " + std::to_string(d.attempts) + " attempts");
}

// ---------------------------------------------------------------------------

DecorationSampler::DecorationSampler(const BlockClassSpec& cls, double u, int dmax)
    : DecorationSampler(cls, u, reproduction_law(cls, u, dmax)) {}

DecorationSampler::DecorationSampler(const BlockClassSpec& cls, double u, const ReproductionLaw& law)
    : cls_(&cls), f_(law.tilted) {
  const int J = static_cast<int>(f_.size()) - 1;
  g_.assign(f_.size(), 0.0);
  const double lb = std::log(law.base);
  for (int j = 1; j <= J; ++j) {
    const double c = cls.coefficient_double(j);
    if (c != 0) g_[j] = j * u * c * std::exp(j * lb);
  }
}

DecorationSample DecorationSampler::sample(int d, Rng& rng, bool concrete) const {
  if (d < 0 || d > dmax()) throw std::out_of_range("decoration size outside the precomputed range");
  if (d > 0 && !(f_[d] > 0)) throw std::invalid_argument("no decoration of this size");
  concrete = concrete && is_concrete(*cls_);
  DecorationSample out;
  std::vector<int> pool;
  if (concrete) {
    out.decoration = Decoration{};
    out.decoration->total_size = d;
    pool.resize(d);
    std::iota(pool.begin(), pool.end(), 1);
  }
  std::vector<double> w;
  int rem = d;
  while (rem > 0) {
    w.assign(static_cast<std::size_t>(rem), 0.0);
    double total = 0;
    for (int j = 1; j <= rem; ++j) {
      w[j - 1] = g_[j] * f_[rem - j];
      total += w[j - 1];
    }
    const int j = static_cast<int>(pick(w, total, rng)) + 1;
    out.sizes.push_back(j);
    if (concrete) {
      // the smallest remaining label plus a uniform (j-1)-subset of the rest
      auto idx = rng.subset(rem - 1, j - 1);
      std::vector<int> labels{pool[0]};
      std::vector<char> taken(static_cast<std::size_t>(rem), 0);
      taken[0] = 1;
      for (int i : idx) {
        labels.push_back(pool[i + 1]);
        taken[i + 1] = 1;
      }
      std::vector<int> next;
      next.reserve(static_cast<std::size_t>(rem - j));
      for (int i = 0; i < rem; ++i)
        if (!taken[i]) next.push_back(pool[i]);
      pool = std::move(next);
      out.decoration->blocks.push_back({cls_->tools->sample(j, rng), std::move(labels)});
    }
    rem -= j;
  }
  return out;
}

DecorationSample decoration_conditioned(const BlockClassSpec& cls, double u, int d, Rng& rng) {
  return DecorationSampler(cls, u, d).sample(d, rng);
}

// ---------------------------------------------------------------------------

PnuSampler::PnuSampler(const BlockClassSpec& cls, double u, int n)
    : cls_(&cls), u_(u), n_(n), law_(reproduction_law(cls, u, std::max(n - 1, 0))) {
  if (n < 1) throw std::invalid_argument("size must be positive");
  trees_ = std::make_unique<ConditionedTreeSampler>(law_.probs, n);
  decorations_ = std::make_unique<DecorationSampler>(cls, u, law_);
}

SampleOutput PnuSampler::sample(Rng& rng, bool graph) const {
  SampleOutput out;
  out.u = u_;
  out.n = n_;
  out.tree = trees_->sample(rng);
  out.block_sizes.resize(static_cast<std::size_t>(n_));
  std::vector<Decoration> decs;
  const bool concrete = is_concrete(*cls_);
  for (int v = 0; v < n_; ++v) {
    auto d = decorations_->sample(out.tree.outdegree(v), rng);
    out.block_sizes[v] = std::move(d.sizes);
    if (concrete) decs.push_back(std::move(*d.decoration));
  }
  finish_concrete(*cls_, out, std::move(decs), rng, graph);
  return out;
}

SampleOutput sample_pnu(const BlockClassSpec& cls, double u, int n, const RngHandle& h, bool graph) {
  Rng rng(h);
  return PnuSampler(cls, u, n).sample(rng, graph);
}

// ---------------------------------------------------------------------------

ExactSmallSampler::ExactSmallSampler(const BlockClassSpec& cls, double u, int n) {
  if (n < 1 || n > kExactSmallMaxVertices) throw std::invalid_argument("exact sampler supports 1 <= n <= 6");
  if (!cls.tools || !cls.tools->member) throw std::invalid_argument(cls.name + ": exact sampler needs a member test");
  std::vector<double> w;
  enumerate_graphs(n, is_connected, [&](const LabelledGraph& g) {
    int b = 0;
    if (n >= 2) {
      for (const auto& blk : block_decompose(g).blocks) {
        std::vector<Edge> e;
        auto rank = [&](int v) {
          return static_cast<int>(std::lower_bound(blk.vertices.begin(), blk.vertices.end(), v) - blk.vertices.begin()) + 1;
        };
        for (auto [x, y] : blk.edges) e.emplace_back(rank(x), rank(y));
        if (!cls.tools->member(LabelledGraph(static_cast<int>(blk.vertices.size()), std::move(e)))) return;
        ++b;
      }
    }
    for (int r = 1; r <= n; ++r) {
      graphs_.push_back(g.with_root(r));
      blocks_.push_back(b);
      w.push_back(std::pow(u, b));
    }
  });
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  probs_.resize(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) probs_[i] = w[i] / total;
  table_ = AliasTable(w);
}

LabelledGraph ExactSmallSampler::sample(Rng& rng) const { return graphs_[table_.sample(rng)]; }

LabelledGraph exact_small_sampler(const BlockClassSpec& cls, double u, int n, const RngHandle& h) {
  Rng rng(h);
  return ExactSmallSampler(cls, u, n).sample(rng);
}

}  // namespace bwg
