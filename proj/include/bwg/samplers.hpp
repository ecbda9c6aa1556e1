#pragma once

#include "bwg/block_class.hpp"
#include "bwg/block_tree.hpp"
#include "bwg/phase.hpp"
#include "bwg/rng.hpp"

#include <map>
#include <memory>
#include <optional>
#include <vector>

namespace bwg {

/// Block sizes j >= 1 with P(j) = [y^j]B'(y) y^j / B'(y). An alias table
/// covers j <= table cap; power-law classes sample the remaining tail
/// exactly by rejection, other classes require a negligible tail.
class BlockSizeSampler {
 public:
  BlockSizeSampler(const BlockClassSpec& cls, double y, int table_cap = 1 << 16);
  int sample(Rng& rng) const;
  double Bp() const { return total_; }
  double tail_mass() const { return tail_ / total_; }

 private:
  int sample_tail(Rng& rng) const;

  AliasTable table_;
  int cap_ = 0;
  double head_ = 0, tail_ = 0, total_ = 0;
  double beta_ = 0, q_ = 1;
};

/// A decoration: block sizes in label order, plus the labelled blocks for
/// concrete classes.
struct DecorationSample {
  std::vector<int> sizes;
  std::optional<Decoration> decoration;
  int total() const;
};

/// Unconditioned tree plus decorations; graph only for concrete classes.
struct SampleOutput {
  PlaneTree tree;
  std::vector<std::vector<int>> block_sizes;  // per preorder vertex
  std::optional<DecoratedBlockTree> decorated;
  std::optional<LabelAllocation> allocation;
  std::optional<LabelledGraph> graph;
  double u = 0;
  std::optional<long> n;
  std::optional<double> x;
};

/// Uniform order-assignment of labels 1..total to the blocks of a set of
/// derived blocks drawn in arbitrary order, then blocks sorted by smallest
/// label.
Decoration reshuffle_labels(std::vector<LabelledGraph> shapes, Rng& rng);

/// Root label uniform in 1..n; the other labels split uniformly into
/// ascending sets of sizes outdegree(v), in preorder.
LabelAllocation uniform_allocation(const PlaneTree& t, Rng& rng);

/// Boltzmann samplers for Set(B') at y and C(x, u), with shared tables.
class BoltzmannSampler {
 public:
  /// x in (0, rho(u)]. Throws for classes with capped coefficients.
  BoltzmannSampler(const BlockClassSpec& cls, double u, double x);
  /// Same decoration sampler with y given directly, 0 < y <= rho_B.
  static BoltzmannSampler at_y(const BlockClassSpec& cls, double u, double y);

  double y() const { return y_; }
  double cstar() const { return y_; }
  DecorationSample phi(Rng& rng) const;
  /// Returns std::nullopt when the tree exceeds max_size vertices.
  std::optional<SampleOutput> cstar_sample(Rng& rng, long max_size = 10'000'000, bool graph = true) const;

 private:
  BoltzmannSampler(const BlockClassSpec& cls, double u, double x, double y);

  const BlockClassSpec* cls_;
  double u_, x_, y_;
  std::shared_ptr<BlockSizeSampler> sizes_;
};

/// C(x, u) for 0 < x <= rho(u): the smallest root of y = x exp(u B'(y)).
double cstar_value(const BlockClassSpec& cls, double u, double x);

DecorationSample boltzmann_phi(const BlockClassSpec& cls, double y, double u, const RngHandle& h);
std::optional<SampleOutput> boltzmann_cstar(const BlockClassSpec& cls, double x, double u, const RngHandle& h,
                                            long max_size = 10'000'000);

/// Exact sampler of a Bienaymé tree conditioned on n vertices. The n
/// outdegrees are drawn i.i.d. from mu conditioned on their sum being n-1
/// by splitting the index range in halves and drawing the left sum from
/// P_a(s) P_b(t - s), with the partial-sum laws P_m precomputed by
/// convolution; the cycle lemma then picks the unique valid rotation.
class ConditionedTreeSampler {
 public:
  ConditionedTreeSampler(const std::vector<double>& mu, int n);
  int size() const { return n_; }
  /// Exchangeable outdegree sequence with sum n - 1, before rotation.
  std::vector<int> sample_sequence(Rng& rng) const;
  PlaneTree sample(Rng& rng) const;

 private:
  const std::vector<double>& law(int m) const { return laws_.at(m); }
  void build(int m);

  int n_ = 1;
  int t_ = 0;
  std::map<int, std::vector<double>> laws_;
};

/// Rotation of a sequence with sum n-1 into a preorder outdegree sequence.
std::vector<int> cycle_lemma_rotate(const std::vector<int>& seq);

PlaneTree bienayme_conditioned(const ReproductionLaw& law, int n, Rng& rng);

struct RejectionDiagnostics {
  long attempts = 0;
  long draws = 0;
};

/// Plain rejection: n i.i.d. draws from the (n-1)-truncated law until the
/// sum is n-1. Throws after `budget` outdegree draws.
PlaneTree bienayme_conditioned_rejection(const ReproductionLaw& law, int n, Rng& rng, long budget = 1'000'000'000,
                                         RejectionDiagnostics* diag = nullptr);

/// Gibbs partition of size d for Set(B') with weight u per block. The first
/// block is the one holding the smallest label; its size j is drawn with
/// weight j g_j f_{d-j} / (d f_d) where f = exp(g), g_j = u [y^j]B' base^j.
class DecorationSampler {
 public:
  DecorationSampler(const BlockClassSpec& cls, double u, int dmax);
  /// Reuses the exp-series of a reproduction law computed at the same u.
  DecorationSampler(const BlockClassSpec& cls, double u, const ReproductionLaw& law);
  DecorationSample sample(int d, Rng& rng, bool concrete = true) const;
  int dmax() const { return static_cast<int>(f_.size()) - 1; }

 private:
  const BlockClassSpec* cls_;
  std::vector<double> g_;  // j g_j
  std::vector<double> f_;
};

DecorationSample decoration_conditioned(const BlockClassSpec& cls, double u, int d, Rng& rng);

/// Full pipeline for P_{n,u}: conditioned tree, conditioned decorations,
/// uniform label allocation, and the rebuilt graph for concrete classes.
class PnuSampler {
 public:
  PnuSampler(const BlockClassSpec& cls, double u, int n);
  SampleOutput sample(Rng& rng, bool graph = true) const;
  const ReproductionLaw& law() const { return law_; }

 private:
  const BlockClassSpec* cls_;
  double u_;
  int n_;
  ReproductionLaw law_;
  std::unique_ptr<ConditionedTreeSampler> trees_;
  std::unique_ptr<DecorationSampler> decorations_;
};

SampleOutput sample_pnu(const BlockClassSpec& cls, double u, int n, const RngHandle& h, bool graph = true);

/// Direct sampler of P_{n,u} from the enumerated rooted class members.
class ExactSmallSampler {
 public:
  ExactSmallSampler(const BlockClassSpec& cls, double u, int n);
  LabelledGraph sample(Rng& rng) const;
  const std::vector<LabelledGraph>& graphs() const { return graphs_; }
  const std::vector<double>& probabilities() const { return probs_; }
  /// Number of blocks of each graph.
  const std::vector<int>& block_counts() const { return blocks_; }

 private:
  std::vector<LabelledGraph> graphs_;
  std::vector<int> blocks_;
  std::vector<double> probs_;
  AliasTable table_;
};

inline constexpr int kExactSmallMaxVertices = 6;

LabelledGraph exact_small_sampler(const BlockClassSpec& cls, double u, int n, const RngHandle& h);

}  // namespace bwg
