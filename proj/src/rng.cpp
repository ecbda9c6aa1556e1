#include "bwg/rng.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace bwg {

RngHandle RngHandle::substream(std::uint64_t index) const {
  // splitmix64 of (stream, index) keeps children of distinct streams apart
  std::uint64_t z = stream * 0x9E3779B97F4A7C15ULL + index + 1;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return {seed, z};
}

Rng::Rng(const RngHandle& h) {
  std::seed_seq seq{static_cast<std::uint32_t>(h.seed), static_cast<std::uint32_t>(h.seed >> 32),
                    static_cast<std::uint32_t>(h.stream), static_cast<std::uint32_t>(h.stream >> 32)};
  engine_.seed(seq);
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("below(0)");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do x = engine_();
  while (x >= limit);
  return x % n;
}

long Rng::poisson(double mean) {
  if (!(mean >= 0) || !std::isfinite(mean)) throw std::invalid_argument("poisson mean must be finite and >= 0");
  if (mean == 0) return 0;
  if (mean > 30) return poisson(mean / 2) + poisson(mean / 2);
  double u = uniform();
  double p = std::exp(-mean), cdf = p;
  long k = 0;
  while (u >= cdf) {
    ++k;
    p *= mean / k;
    double next = cdf + p;
    if (next == cdf) break;  // u fell in the rounding residue of the cdf
    cdf = next;
  }
  return k;
}

std::vector<int> Rng::permutation(int n) {
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  for (int i = n - 1; i > 0; --i) std::swap(p[i], p[below(static_cast<std::uint64_t>(i) + 1)]);
  return p;
}

std::vector<int> Rng::subset(int n, int k) {
  if (k < 0 || k > n) throw std::invalid_argument("subset size out of range");
  std::vector<char> in(static_cast<std::size_t>(n), 0);
  for (int j = n - k; j < n; ++j) {
    int t = static_cast<int>(below(static_cast<std::uint64_t>(j) + 1));
    if (in[t]) t = j;
    in[t] = 1;
  }
  std::vector<int> out;
  out.reserve(k);
  for (int i = 0; i < n; ++i)
    if (in[i]) out.push_back(i);
  return out;
}

AliasTable::AliasTable(const std::vector<double>& weights) {
  const std::size_t m = weights.size();
  if (m == 0) throw std::invalid_argument("alias table needs weights");
  double total = 0;
  for (double w : weights) {
    if (!(w >= 0)) throw std::invalid_argument("alias weights must be nonnegative");
    total += w;
  }
  if (!(total > 0)) throw std::invalid_argument("alias weights sum to zero");
  prob_.assign(m, 0);
  alias_.assign(m, 0);
  std::vector<double> scaled(m);
  std::vector<std::uint32_t> small, large;
  for (std::size_t i = 0; i < m; ++i) {
    scaled[i] = weights[i] * static_cast<double>(m) / total;
    (scaled[i] < 1 ? small : large).push_back(static_cast<std::uint32_t>(i));
  }
  while (!small.empty() && !large.empty()) {
    auto s = small.back(), l = large.back();
    small.pop_back();
    prob_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1;
    if (scaled[l] < 1) {
      large.pop_back();
      small.push_back(l);
    }
  }
  for (auto i : large) prob_[i] = 1;
  for (auto i : small) prob_[i] = 1;
}

std::size_t AliasTable::sample(Rng& rng) const {
  std::size_t i = rng.below(prob_.size());
  return rng.uniform() < prob_[i] ? i : alias_[i];
}

}  // namespace bwg
