#include "doctest.h"
#include "oracles.hpp"

#include "bwg/samplers.hpp"
#include "bwg/stats.hpp"

#include <cmath>
#include <map>
#include <numeric>

using namespace bwg;

namespace {

std::vector<double> normalized(std::vector<double> w) {
  const double t = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& x : w) x /= t;
  return w;
}

// exact law of Bienaymé(mu) conditioned on n vertices, over all plane trees
std::map<std::vector<int>, double> exact_tree_law(const std::vector<double>& mu, int n) {
  std::map<std::vector<int>, double> law;
  double total = 0;
  enumerate_plane_trees(n, [&](const PlaneTree& t) {
    double w = 1;
    for (int d : t.outdegrees()) w *= mu[d];
    law[t.outdegrees()] = w;
    total += w;
  });
  for (auto& [k, v] : law) v /= total;
  return law;
}

template <class Draw>
GoodnessOfFit tree_fit(const std::map<std::vector<int>, double>& law, long samples, Draw draw) {
  std::map<std::vector<int>, long> seen;
  for (long i = 0; i < samples; ++i) ++seen[draw().outdegrees()];
  std::vector<long> counts;
  std::vector<double> probs;
  for (const auto& [k, p] : law) {
    counts.push_back(seen.count(k) ? seen[k] : 0);
    probs.push_back(p);
  }
  long covered = std::accumulate(counts.begin(), counts.end(), 0L);
  REQUIRE(covered == samples);
  return chi_square_gof(counts, probs);
}

}  // namespace

TEST_CASE("cycle lemma rotation") {
  CHECK(cycle_lemma_rotate({0, 2, 0}) == std::vector<int>{2, 0, 0});
  CHECK(cycle_lemma_rotate({0, 0, 2}) == std::vector<int>{2, 0, 0});
  CHECK(cycle_lemma_rotate({0}) == std::vector<int>{0});
  CHECK_THROWS(cycle_lemma_rotate({1, 1}));
  Rng rng(RngHandle{7, 0});
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(30));
    std::vector<int> seq(n, 0);
    for (int k = 0; k < n - 1; ++k) ++seq[rng.below(n)];
    auto r = cycle_lemma_rotate(seq);
    CHECK_NOTHROW(PlaneTree{r});
    int valid = 0;
    for (int s = 0; s < n; ++s) {
      std::vector<int> rot(n);
      for (int i = 0; i < n; ++i) rot[i] = seq[(s + i) % n];
      long walk = 0;
      bool ok = true;
      for (int i = 0; i < n - 1; ++i) ok = ok && (walk += rot[i] - 1) >= 0;
      valid += ok;
    }
    CHECK(valid >= 1);
  }
}

TEST_CASE("conditioned Poisson trees on three vertices") {
  auto law = reproduction_law(trees_class(), 1.0, 2);
  ConditionedTreeSampler s(law.probs, 3);
  Rng rng(RngHandle{1, 0});
  long wide = 0;
  const long N = 30000;
  for (long i = 0; i < N; ++i) wide += s.sample(rng).outdegrees() == std::vector<int>{2, 0, 0};
  const double p = 1.0 / 3.0, sd = std::sqrt(p * (1 - p) / N);
  CHECK(std::abs(wide / double(N) - p) < 3 * sd);
  CHECK(ConditionedTreeSampler(law.probs, 1).sample(rng).size() == 1);
}

TEST_CASE("conditioned tree sampler matches the exact law") {
  auto p = polylog_class();
  for (double u : {0.2, critical_u(p), 0.6}) {
    const int n = 7;
    auto law = reproduction_law(p, u, n - 1);
    auto exact = exact_tree_law(law.probs, n);
    ConditionedTreeSampler s(law.probs, n);
    Rng rng(RngHandle{3, 1});
    auto g = tree_fit(exact, 100000, [&] { return s.sample(rng); });
    CHECK_MESSAGE(g.p_value > 1e-3, "u=" << u << " p=" << g.p_value);
    Rng rng2(RngHandle{3, 2});
    RejectionDiagnostics diag;
    auto g2 = tree_fit(exact, 30000, [&] { return bienayme_conditioned_rejection(law, n, rng2, 1'000'000'000, &diag); });
    CHECK(g2.p_value > 1e-3);
    CHECK(diag.attempts >= 30000);
  }
  auto t = reproduction_law(trees_class(), 1.0, 3);
  Rng rng(RngHandle{0, 0});
  CHECK_THROWS(bienayme_conditioned_rejection(t, 40, rng, 10));
  CHECK_THROWS(ConditionedTreeSampler({0.0, 1.0}, 3));
}

TEST_CASE("large conditioned trees") {
  auto p = polylog_class();
  for (double u : {0.2, critical_u(p), 0.6}) {
    PnuSampler s(p, u, 20000);
    Rng rng(RngHandle{11, 0});
    auto out = s.sample(rng);
    CHECK(out.tree.size() == 20000);
    long total = 0;
    for (int v = 0; v < out.tree.size(); ++v) {
      long dv = std::accumulate(out.block_sizes[v].begin(), out.block_sizes[v].end(), 0L);
      CHECK(dv == out.tree.outdegree(v));
      total += dv;
    }
    CHECK(total == 19999);
    if (u == 0.2) CHECK(tree_degree_stats(out.tree).degrees[0] > 5000);
  }
}

TEST_CASE("determinism under a fixed handle") {
  auto c = cacti_class();
  PnuSampler s(c, 1.0, 60);
  Rng a(RngHandle{5, 9}), b(RngHandle{5, 9}), other(RngHandle{5, 10});
  auto x = s.sample(a), y = s.sample(b), z = s.sample(other);
  CHECK(x.tree == y.tree);
  CHECK(x.block_sizes == y.block_sizes);
  CHECK(*x.graph == *y.graph);
  CHECK_FALSE(*x.graph == *z.graph);
  auto bx = boltzmann_cstar(c, 0.1, 1.0, RngHandle{4, 4}), by = boltzmann_cstar(c, 0.1, 1.0, RngHandle{4, 4});
  CHECK(bx->tree == by->tree);
}

TEST_CASE("Gibbs decorations") {
  auto c = cacti_class();
  Rng rng(RngHandle{2, 0});
  CHECK(DecorationSampler(c, 1.0, 4).sample(0, rng).sizes.empty());
  auto t = trees_class();
  DecorationSampler ts(t, 0.7, 5);
  CHECK(ts.sample(3, rng).sizes == std::vector<int>{1, 1, 1});

  // size 2: one triangle (weight u) or two edges (weight u^2)
  for (double u : {1.0, 2.0}) {
    DecorationSampler ds(c, u, 4);
    long single = 0;
    const long N = 20000;
    for (long i = 0; i < N; ++i) single += ds.sample(2, rng).sizes.size() == 1;
    const double p = 1 / (1 + u), sd = std::sqrt(p * (1 - p) / N);
    CHECK(std::abs(single / double(N) - p) < 4 * sd);
  }

  // u = 1: uniform over the labelled decorations of each size
  DecorationSampler ds(c, 1.0, 4);
  for (int d = 1; d <= 3; ++d) {
    std::map<std::string, long> seen;
    const long N = 60000;
    for (long i = 0; i < N; ++i) {
      auto s = ds.sample(d, rng);
      REQUIRE(s.decoration);
      std::string key;
      for (const auto& b : s.decoration->blocks) {
        key += to_exchange(b.shape) + "@";
        for (int l : b.labels) key += std::to_string(l) + ",";
        key += "|";
      }
      ++seen[key];
    }
    const long expected_count = d == 1 ? 1 : d == 2 ? 2 : 7;
    CHECK(static_cast<long>(seen.size()) == expected_count);
    std::vector<long> counts;
    for (const auto& [k, v] : seen) counts.push_back(v);
    auto g = chi_square_gof(counts, std::vector<double>(counts.size(), 1.0 / counts.size()));
    CHECK(g.p_value > 1e-3);
  }
}

TEST_CASE("block-size sampler tail") {
  auto p = polylog_class();
  for (double y : {1.0, 0.99, 0.9}) {
    const int cap = 16;
    BlockSizeSampler s(p, y, cap);
    CHECK(s.Bp() == doctest::Approx(polylog(2.5, y)).epsilon(1e-12));
    Rng rng(RngHandle{8, static_cast<std::uint64_t>(y * 100)});
    // bins 1..40 and a lumped tail
    const int B = 40;
    std::vector<long> counts(B + 1, 0);
    const long N = 400000;
    for (long i = 0; i < N; ++i) ++counts[std::min(s.sample(rng), B + 1) - 1];
    std::vector<double> probs(B + 1, 0.0);
    double head = 0;
    for (int j = 1; j <= B; ++j) head += probs[j - 1] = std::pow(j, -2.5) * std::pow(y, j) / s.Bp();
    probs[B] = 1 - head;
    auto g = chi_square_gof(counts, probs);
    CHECK_MESSAGE(g.p_value > 1e-3, "y=" << y << " p=" << g.p_value);
  }
  CHECK_THROWS(BlockSizeSampler(planar_class(), 0.01));
  CHECK_THROWS(BlockSizeSampler(p, 1.01));
}

TEST_CASE("Boltzmann samplers") {
  auto t = trees_class();
  const double u = 1.0;
  const double rho = solve_phase(t, u).rho_u;
  CHECK(cstar_value(t, u, rho) == doctest::Approx(1 / u).epsilon(1e-12));
  BoltzmannSampler b(t, u, rho);
  Rng rng(RngHandle{6, 0});
  const int B = 8;
  std::vector<long> counts(B + 1, 0);
  const long N = 100000;
  long blocks = 0;
  for (long i = 0; i < N; ++i) {
    auto s = b.cstar_sample(rng, 64, false);
    const long size = s ? s->tree.size() : B + 1;
    ++counts[std::min<long>(size, B + 1) - 1];
    blocks += b.phi(rng).sizes.size();
  }
  std::vector<double> probs(B + 1, 0.0);
  double head = 0;
  const double y = 1 / u;
  for (int n = 1; n <= B; ++n)
    head += probs[n - 1] = std::exp((n - 1) * std::log(n * u) - std::lgamma(n + 1.0) + n * std::log(rho)) / y;
  probs[B] = 1 - head;
  auto g = chi_square_gof(counts, probs);
  CHECK(g.p_value > 1e-3);
  const double mean_blocks = u * y;
  CHECK(std::abs(blocks / double(N) - mean_blocks) < 4 * std::sqrt(mean_blocks / N));

  auto c = cacti_class();
  const double x = 0.5 * solve_phase(c, 1.0).rho_u;
  BoltzmannSampler cb(c, 1.0, x);
  long ones = 0;
  for (long i = 0; i < N; ++i) {
    auto s = cb.cstar_sample(rng);
    REQUIRE(s);
    ones += s->tree.size() == 1;
    REQUIRE(s->graph);
    CHECK(s->graph->size() == s->tree.size());
    if (s->tree.size() > 1) CHECK(is_cactus(*s->graph));
  }
  const double p1 = x / cb.cstar();
  CHECK(std::abs(ones / double(N) - p1) < 4 * std::sqrt(p1 * (1 - p1) / N));
  CHECK(BoltzmannSampler::at_y(c, 1.0, 1e-9).phi(rng).sizes.empty());
  CHECK_THROWS(BoltzmannSampler(c, 1.0, 1.01 * solve_phase(c, 1.0).rho_u));
}

TEST_CASE("exact small sampler") {
  auto c = cacti_class();
  ExactSmallSampler e(c, 2.0, 3);
  double w = 0;
  for (int b : e.block_counts()) w += std::pow(2.0, b);
  CHECK(w == doctest::Approx(3 * 2 + 9 * 4));
  CHECK(e.graphs().size() == 12);
  CHECK_THROWS(ExactSmallSampler(c, 1.0, 7));
  CHECK_THROWS(ExactSmallSampler(polylog_class(), 1.0, 3));
  ExactSmallSampler tiny(c, 1e-6, 4);
  Rng rng(RngHandle{1, 1});
  // with u -> 0 the mass sits on graphs with the fewest blocks (4-cycles)
  for (int i = 0; i < 50; ++i) CHECK(tiny.sample(rng).edges().size() == 4);
}

TEST_CASE("size-conditioned sampler against enumeration, cacti n = 4") {
  auto c = cacti_class();
  for (double u : {0.5, 2.0}) {
    ExactSmallSampler e(c, u, 4);
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < e.graphs().size(); ++i) index[to_exchange(e.graphs()[i])] = i;
    PnuSampler s(c, u, 4);
    Rng rng(RngHandle{12, 0});
    std::vector<long> counts(e.graphs().size(), 0);
    const long N = 200000;
    for (long i = 0; i < N; ++i) {
      auto out = s.sample(rng);
      auto it = index.find(to_exchange(*out.graph));
      REQUIRE(it != index.end());
      ++counts[it->second];
      // decoration sizes agree with the rebuilt graph
      if (i < 2000) {
        std::vector<int> a, b;
        for (const auto& v : out.block_sizes) a.insert(a.end(), v.begin(), v.end());
        for (const auto& blk : block_decompose(*out.graph).blocks) b.push_back(int(blk.vertices.size()) - 1);
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        CHECK(a == b);
      }
    }
    auto g = chi_square_gof(counts, e.probabilities());
    CHECK_MESSAGE(g.p_value > 1e-3, "u=" << u << " p=" << g.p_value);
  }
}

TEST_CASE("root block counts under size conditioning are not Poisson") {
  // the per-vertex block count is Poisson(u B'(y)) only without conditioning
  auto c = cacti_class();
  const double u = 1.0;
  const int n = 5;
  PnuSampler s(c, u, n);
  const double lambda = u * eval_Bp(c, solve_phase(c, u).y_u);
  Rng rng(RngHandle{13, 0});
  const int K = 4;
  std::vector<long> counts(K + 1, 0);
  const long N = 200000;
  for (long i = 0; i < N; ++i) ++counts[std::min<std::size_t>(s.sample(rng, false).block_sizes[0].size(), K)];
  std::vector<double> probs(K + 1, 0.0);
  double head = 0, term = std::exp(-lambda);
  for (int k = 0; k < K; ++k) {
    head += probs[k] = term;
    term *= lambda / (k + 1);
  }
  probs[K] = 1 - head;
  auto g = chi_square_gof(counts, probs);
  CHECK(g.p_value < 1e-6);
  CHECK(total_variation(counts, probs) > 0.05);
}
