#pragma once

#include "bwg/block_tree.hpp"
#include "bwg/graph.hpp"
#include "bwg/numeric.hpp"
#include "bwg/rng.hpp"
#include "bwg/series.hpp"
#include "bwg/singular.hpp"

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace bwg {

/// Closed-form evaluators of B'(y), B''(y), B'''(y) on [0, rho_B].
struct ClosedForm {
  std::function<double(double)> Bp;
  std::function<double(double)> Bpp;
  std::function<double(double)> Bppp;
};

/// Enumerator and uniform sampler of derived blocks of size k (derived
/// graphs on {0..k}, vertex 0 unlabelled).
struct BlockTools {
  std::function<const std::vector<LabelledGraph>&(int k)> enumerate;
  std::function<LabelledGraph(int k, Rng& rng)> sample;
  std::function<bool(const LabelledGraph&)> member;  // 2-connected class member test
};

/// [y^k]B'(y) = A k^{-beta} rho^{-k} exactly, for every k >= 1.
struct PowerLawCoefficients {
  double A = 1;
  double beta = 2.5;
};

struct BlockClassSpec {
  std::string name;
  bool abstract = false;
  /// Coefficients are available for 1 <= k <= weight_cap, or for every k
  /// when `unbounded` (weight_cap is then only the default series order).
  int weight_cap = 0;
  bool unbounded = false;
  /// [y^k]B' exactly, when rational; std::nullopt otherwise.
  std::function<std::optional<Rational>(int k)> exact_coefficient;
  /// [y^k]B' at the current MPFR precision.
  std::function<BigFloat(int k)> coefficient;
  double rho_B = 0;  // radius of convergence of B'; may be +inf
  std::optional<ClosedForm> closed_form;
  std::optional<SingularMetadata> metadata;
  std::optional<BlockTools> tools;
  std::optional<PowerLawCoefficients> power_law;
  std::string provenance;

  double coefficient_double(int k) const;
  bool has_coefficient(int k) const { return k >= 0 && (unbounded || k <= weight_cap); }
  /// b'_k = k! [y^k]B', exact when available.
  std::optional<Rational> weight(int k) const;
  bool integer_weights(int order) const;
};

BlockClassSpec trees_class();
BlockClassSpec cacti_class();
BlockClassSpec polylog_class();
BlockClassSpec planar_class();
BlockClassSpec all_graphs_class();

/// Shipped classes by name: trees, cacti, polylog, planar, all_graphs.
BlockClassSpec class_by_name(const std::string& name);

/// Class-spec file (JSON): name, abstract, weights (inline list of b'_k for
/// k = 1.. as numbers or "p/q" strings) or weights_csv (path to `k,b'_k`
/// rows), optional base (a shipped class supplying block tools), optional
/// metadata {rho_B, Bp_at_rho, Bpp_at_rho, c_B}, optional provenance.
BlockClassSpec load_class_file(const std::string& path);
BlockClassSpec class_from_json_text(const std::string& text, const std::string& base_dir = ".");

/// [y^k] entry b'_k / k! for k = 0..order. Throws when order exceeds the
/// weight cap, or when an exact domain is requested for irrational weights.
template <class T>
Series<T> bprime_series(const BlockClassSpec& cls, int order, const Domain& domain);

/// Phi(y, u) = exp(u B'(y)) with u formal.
Series<PolyU> phi_series_u(const BlockClassSpec& cls, int order);
/// EGF counts phi_k = k! [y^k] exp(u B'(y)), k = 0..order.
std::vector<PolyU> decoration_counts(const BlockClassSpec& cls, int order);

/// B', B'', B''' at 0 <= y <= rho_B from the closed form, or otherwise from
/// the truncated series with singular tail (B''' without tail).
double eval_Bp(const BlockClassSpec& cls, double y);
double eval_Bpp(const BlockClassSpec& cls, double y);
double eval_Bppp(const BlockClassSpec& cls, double y);

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> failures;
  std::vector<std::string> notes;
};

struct ValidationOptions {
  int enumerate_cap = 5;       // compare weights with block_tools up to this k
  double tail_tolerance = 0.01;
};

ValidationReport validate_class(const BlockClassSpec& cls, const ValidationOptions& opt = {});

/// Li_s(y) for 0 <= y <= 1 (y < 1 when s <= 1).
double polylog(double s, double y);

}  // namespace bwg
