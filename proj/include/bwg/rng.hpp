#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace bwg {

/// Identifies a reproducible random stream: mt19937_64 seeded through
/// std::seed_seq from the 32-bit halves of (seed, stream).
struct RngHandle {
  static constexpr const char* kAlgorithm = "mt19937_64/seed_seq";
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  RngHandle substream(std::uint64_t index) const;
};

/// Engine plus the draws the samplers use. All draws are implemented here so
/// output is identical across standard libraries.
class Rng {
 public:
  explicit Rng(const RngHandle& h);

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1].
  double uniform_pos() { return 1.0 - uniform(); }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  /// Poisson(mean) by inversion; means above 30 are split into halves.
  long poisson(double mean);
  /// Uniformly random permutation of 0..n-1 (Fisher-Yates).
  std::vector<int> permutation(int n);
  /// Uniform k-subset of {0..n-1}, ascending (Floyd's algorithm).
  std::vector<int> subset(int n, int k);

 private:
  std::mt19937_64 engine_;
};

/// Walker alias table over weights w_0..w_{m-1} (nonnegative, not all zero).
class AliasTable {
 public:
  AliasTable() = default;
  explicit AliasTable(const std::vector<double>& weights);
  std::size_t sample(Rng& rng) const;
  std::size_t size() const { return prob_.size(); }

 private:
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
};

}  // namespace bwg
