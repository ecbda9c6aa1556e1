#include "bwg/block_class.hpp"

#include "json.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/zeta.hpp>

#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace bwg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Derived blocks of size k from 2-connected members on k+1 vertices,
/// relabelled v -> v - 1 so that the old vertex 1 becomes the unlabelled 0.
class BlockCache {
 public:
  explicit BlockCache(std::function<bool(const LabelledGraph&)> member) : member_(std::move(member)) {}

  const std::vector<LabelledGraph>& get(int k) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(k);
    if (it != cache_.end()) return it->second;
    if (k < 1 || k + 1 > kEnumerateMaxVertices) throw std::invalid_argument("derived block enumeration supports 1 <= k <= 6");
    std::vector<LabelledGraph> out;
    enumerate_graphs(k + 1, nullptr, [&](const LabelledGraph& g) {
      if (!is_2connected(g) || !member_(g)) return;
      std::vector<Edge> e;
      for (auto [a, b] : g.edges()) e.emplace_back(a - 1, b - 1);
      out.emplace_back(k, std::move(e), std::nullopt, true);
    });
    return cache_.emplace(k, std::move(out)).first->second;
  }

 private:
  std::function<bool(const LabelledGraph&)> member_;
  std::mutex mu_;
  std::map<int, std::vector<LabelledGraph>> cache_;
};

BlockTools enumerated_tools(std::function<bool(const LabelledGraph&)> member) {
  auto cache = std::make_shared<BlockCache>(member);
  BlockTools t;
  t.member = member;
  t.enumerate = [cache](int k) -> const std::vector<LabelledGraph>& { return cache->get(k); };
  t.sample = [cache](int k, Rng& rng) {
    const auto& all = cache->get(k);
    if (all.empty()) throw std::invalid_argument("no derived block of size " + std::to_string(k));
    return all[rng.below(all.size())];
  };
  return t;
}

std::function<BigFloat(int)> from_exact(std::function<std::optional<Rational>(int)> exact) {
  return [exact](int k) {
    auto q = exact(k);
    if (!q) throw std::logic_error("missing exact coefficient");
    return BigFloat(boost::multiprecision::numerator(*q)) / BigFloat(boost::multiprecision::denominator(*q));
  };
}

std::function<std::optional<Rational>(int)> table_coefficients(std::vector<Rational> weights) {
  // weights[k-1] = b'_k
  return [weights](int k) -> std::optional<Rational> {
    if (k == 0) return Rational(0);
    if (k < 1 || k > static_cast<int>(weights.size())) return std::nullopt;
    return weights[k - 1] / Rational(factorial(static_cast<unsigned>(k)));
  };
}

Rational parse_rational(const nlohmann::json& v) {
  if (v.is_number_integer()) return Rational(v.get<long long>());
  if (v.is_number_unsigned()) return Rational(Integer(v.get<unsigned long long>()));
  if (v.is_number_float()) return Rational(v.get<double>());
  if (v.is_string()) return Rational(v.get<std::string>());
  throw std::invalid_argument("weight must be a number or a \"p/q\" string");
}

}  // namespace

// ---------------------------------------------------------------------------

double BlockClassSpec::coefficient_double(int k) const {
  if (!has_coefficient(k)) throw std::out_of_range(name + ": coefficient index beyond weight cap");
  if (k == 0) return 0;
  if (power_law) return power_law->A * std::pow(static_cast<double>(k), -power_law->beta) * std::pow(rho_B, -k);
  if (exact_coefficient) {
    if (auto q = exact_coefficient(k)) return q->convert_to<double>();
  }
  PrecisionScope scope(64);
  return coefficient(k).convert_to<double>();
}

std::optional<Rational> BlockClassSpec::weight(int k) const {
  if (!exact_coefficient || !has_coefficient(k)) return std::nullopt;
  auto q = exact_coefficient(k);
  if (!q) return std::nullopt;
  return *q * Rational(factorial(static_cast<unsigned>(k)));
}

bool BlockClassSpec::integer_weights(int order) const {
  for (int k = 1; k <= order; ++k) {
    auto w = weight(k);
    if (!w || boost::multiprecision::denominator(*w) != 1) return false;
  }
  return true;
}

BlockClassSpec trees_class() {
  BlockClassSpec c;
  c.name = "trees";
  c.weight_cap = 10000;
  c.unbounded = true;
  c.exact_coefficient = [](int k) -> std::optional<Rational> { return Rational(k == 1 ? 1 : 0); };
  c.coefficient = from_exact(c.exact_coefficient);
  c.rho_B = kInf;
  c.closed_form = ClosedForm{[](double y) { return y; }, [](double) { return 1.0; }, [](double) { return 0.0; }};
  c.tools = BlockTools{};
  auto edge = std::make_shared<std::vector<LabelledGraph>>(
      std::vector<LabelledGraph>{LabelledGraph(1, {{0, 1}}, std::nullopt, true)});
  auto none = std::make_shared<std::vector<LabelledGraph>>();
  c.tools->enumerate = [edge, none](int k) -> const std::vector<LabelledGraph>& { return k == 1 ? *edge : *none; };
  c.tools->sample = [edge](int k, Rng&) {
    if (k != 1) throw std::invalid_argument("trees class has only size-1 blocks");
    return edge->front();
  };
  c.tools->member = [](const LabelledGraph& g) { return g.vertex_count() == 2 && g.edges().size() == 1; };
  c.provenance = "blocks are single edges";
  return c;
}

BlockClassSpec cacti_class() {
  BlockClassSpec c;
  c.name = "cacti";
  c.weight_cap = 10000;
  c.unbounded = true;
  // (k+1)-cycles on labelled vertices number k!/2, so [y^k]B' = 1/2 for k >= 2
  c.exact_coefficient = [](int k) -> std::optional<Rational> {
    if (k == 0) return Rational(0);
    return k == 1 ? Rational(1) : Rational(1, 2);
  };
  c.coefficient = from_exact(c.exact_coefficient);
  c.rho_B = 1;
  c.closed_form = ClosedForm{
      [](double y) { return y + y * y / (2 * (1 - y)); },
      [](double y) { return y >= 1 ? kInf : 1 + (2 * y - y * y) / (2 * (1 - y) * (1 - y)); },
      [](double y) { return y >= 1 ? kInf : 1 / ((1 - y) * (1 - y) * (1 - y)); }};
  auto member = [](const LabelledGraph& g) {
    return g.edges().size() == 1 || static_cast<int>(g.edges().size()) == g.vertex_count();
  };
  c.tools = enumerated_tools(member);
  c.tools->sample = [](int k, Rng& rng) {
    if (k < 1) throw std::invalid_argument("block size must be positive");
    if (k == 1) return LabelledGraph(1, {{0, 1}}, std::nullopt, true);
    // each (k+1)-cycle arises from exactly two orders of 1..k
    auto p = rng.permutation(k);
    std::vector<Edge> e;
    e.emplace_back(0, p[0] + 1);
    for (int i = 0; i + 1 < k; ++i) e.emplace_back(p[i] + 1, p[i + 1] + 1);
    e.emplace_back(p[k - 1] + 1, 0);
    return LabelledGraph(k, std::move(e), std::nullopt, true);
  };
  c.provenance = "blocks are edges and cycles";
  return c;
}

BlockClassSpec polylog_class() {
  BlockClassSpec c;
  c.name = "polylog";
  c.abstract = true;
  c.weight_cap = 10000;
  c.unbounded = true;
  c.exact_coefficient = [](int k) -> std::optional<Rational> {
    if (k == 0) return Rational(0);
    if (k == 1) return Rational(1);
    return std::nullopt;
  };
  c.coefficient = [](int k) { return k == 0 ? BigFloat(0) : BigFloat(pow(BigFloat(k), BigFloat(-2.5))); };
  c.rho_B = 1;
  c.power_law = PowerLawCoefficients{1.0, 2.5};
  c.closed_form = ClosedForm{
      [](double y) { return polylog(2.5, y); },
      [](double y) { return y == 0 ? 1.0 : polylog(1.5, y) / y; },
      [](double y) {
        if (y == 0) return 1 / std::sqrt(8.0);
        if (y >= 1) return kInf;
        return (polylog(0.5, y) - polylog(1.5, y)) / (y * y);
      }};
  SingularMetadata m;
  m.rho_B = 1;
  m.Bp_at_rho = boost::math::zeta(2.5);
  m.Bpp_at_rho = boost::math::zeta(1.5);
  m.c_B = kGammaMinusThreeHalves;
  c.metadata = m;
  c.provenance = "[y^k]B' = k^(-5/2); metadata from zeta(5/2), zeta(3/2) and the transfer constant";
  return c;
}

BlockClassSpec planar_class() {
  BlockClassSpec c;
  c.name = "planar";
  c.weight_cap = 6;
  std::vector<Rational> w = {1, 1, 10, 237, 10707, 774924};
  c.exact_coefficient = table_coefficients(w);
  c.coefficient = from_exact(c.exact_coefficient);
  const double R = 0.03819109766;     // radius of 2-connected planar graphs
  const double rhoC = 0.03672841251;  // radius of connected planar graphs
  const double b = 0.3704247487e-5;   // b_n ~ b n^{-7/2} R^{-n} n!
  SingularMetadata m;
  m.rho_B = R;
  m.Bp_at_rho = std::log(R / rhoC);
  m.Bpp_at_rho = 1.05422;
  m.c_B = b * kGammaMinusThreeHalves * std::pow(R, -2.5);
  c.rho_B = R;
  c.metadata = m;
  c.tools = enumerated_tools([](const LabelledGraph& g) { return is_planar(g); });
  c.provenance =
      "weights by exhaustive enumeration (k+1 <= 7); R, rho_C and b are literature constants for labelled "
      "2-connected and connected planar graphs; B'(R) = ln(R/rho_C) because y(1) = R at u = 1; B''(R) is an "
      "external input without an independent derivation here";
  return c;
}

BlockClassSpec all_graphs_class() {
  BlockClassSpec c;
  c.name = "all_graphs";
  c.weight_cap = 6;
  std::vector<Rational> w = {1, 1, 10, 238, 11368, 1014888};
  c.exact_coefficient = table_coefficients(w);
  c.coefficient = from_exact(c.exact_coefficient);
  c.rho_B = 0;
  c.tools = enumerated_tools([](const LabelledGraph&) { return true; });
  c.provenance = "2-connected labelled graphs on k+1 vertices, by exhaustive enumeration";
  return c;
}

BlockClassSpec class_by_name(const std::string& name) {
  if (name == "trees") return trees_class();
  if (name == "cacti") return cacti_class();
  if (name == "polylog") return polylog_class();
  if (name == "planar") return planar_class();
  if (name == "all_graphs" || name == "all") return all_graphs_class();
  throw std::invalid_argument("unknown class: " + name);
}

BlockClassSpec class_from_json_text(const std::string& text, const std::string& base_dir) {
  auto j = nlohmann::json::parse(text);
  BlockClassSpec c;
  if (j.contains("base")) c = class_by_name(j.at("base").get<std::string>());
  c.name = j.value("name", c.name.empty() ? std::string("custom") : c.name);
  c.closed_form.reset();
  c.power_law.reset();
  c.metadata.reset();
  std::vector<Rational> w;
  if (j.contains("weights")) {
    for (const auto& v : j.at("weights")) w.push_back(parse_rational(v));
  } else if (j.contains("weights_csv")) {
    std::string path = j.at("weights_csv").get<std::string>();
    if (!path.empty() && path[0] != '/') path = base_dir + "/" + path;
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open weights file " + path);
    std::string line;
    int expect = 1;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#' || line[0] == 'k') continue;
      auto comma = line.find(',');
      if (comma == std::string::npos) throw std::runtime_error("malformed weights row: " + line);
      if (std::stoi(line.substr(0, comma)) != expect++) throw std::runtime_error("weights rows must be k = 1, 2, ...");
      std::string val = line.substr(comma + 1);
      while (!val.empty() && std::isspace(static_cast<unsigned char>(val.back()))) val.pop_back();
      w.push_back(val.find_first_of(".eE") != std::string::npos ? Rational(std::stod(val)) : Rational(val));
    }
  } else {
    throw std::invalid_argument("class file needs weights or weights_csv");
  }
  if (w.empty()) throw std::invalid_argument("class file has no weights");
  c.weight_cap = static_cast<int>(w.size());
  c.unbounded = false;
  c.exact_coefficient = table_coefficients(w);
  c.coefficient = from_exact(c.exact_coefficient);
  c.abstract = j.value("abstract", !c.tools.has_value());
  if (c.abstract) c.tools.reset();
  c.rho_B = kInf;
  if (j.contains("metadata")) {
    const auto& m = j.at("metadata");
    SingularMetadata md;
    md.rho_B = m.at("rho_B").get<double>();
    md.Bp_at_rho = m.at("Bp_at_rho").get<double>();
    md.Bpp_at_rho = m.at("Bpp_at_rho").is_string() ? kInf : m.at("Bpp_at_rho").get<double>();
    md.c_B = m.at("c_B").get<double>();
    c.metadata = md;
    c.rho_B = md.rho_B;
  }
  if (j.contains("rho_B")) c.rho_B = j.at("rho_B").get<double>();
  c.provenance = j.value("provenance", std::string("class file"));
  return c;
}

BlockClassSpec load_class_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open class file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  auto slash = path.find_last_of('/');
  return class_from_json_text(ss.str(), slash == std::string::npos ? "." : path.substr(0, slash));
}

// ---------------------------------------------------------------------------

template <class T>
Series<T> bprime_series(const BlockClassSpec& cls, int order, const Domain& domain) {
  if (order < 0) throw std::invalid_argument("negative order");
  if (!cls.has_coefficient(order))
    throw std::invalid_argument(cls.name + ": order " + std::to_string(order) + " exceeds weight cap " +
                                std::to_string(cls.weight_cap));
  DomainScope scope(domain);
  std::vector<T> c(static_cast<std::size_t>(order) + 1);
  for (int k = 0; k <= order; ++k) {
    if constexpr (std::is_same_v<T, Rational> || std::is_same_v<T, PolyU>) {
      auto q = cls.exact_coefficient ? cls.exact_coefficient(k) : std::nullopt;
      if (!q) throw std::invalid_argument(cls.name + ": weights are not exact rationals");
      c[k] = T(*q);
    } else if constexpr (std::is_same_v<T, BigFloat>) {
      c[k] = k == 0 ? BigFloat(0) : cls.coefficient(k);
    } else {
      c[k] = cls.coefficient_double(k);
    }
  }
  return Series<T>(domain, std::move(c));
}

template Series<Rational> bprime_series(const BlockClassSpec&, int, const Domain&);
template Series<PolyU> bprime_series(const BlockClassSpec&, int, const Domain&);
template Series<BigFloat> bprime_series(const BlockClassSpec&, int, const Domain&);
template Series<double> bprime_series(const BlockClassSpec&, int, const Domain&);

Series<PolyU> phi_series_u(const BlockClassSpec& cls, int order) {
  auto b = bprime_series<PolyU>(cls, order, Domain::poly_u());
  return series_exp(series_scale(b, PolyU::monomial(1)));
}

std::vector<PolyU> decoration_counts(const BlockClassSpec& cls, int order) {
  return egf_counts(phi_series_u(cls, order));
}

namespace {

double eval_series(const BlockClassSpec& cls, double y, int derivative) {
  if (y < 0) throw std::domain_error("evaluation point must be nonnegative");
  if (y > cls.rho_B) throw std::domain_error(cls.name + ": evaluation point beyond rho_B");
  const Domain d = Domain::bigfloat(128);
  DomainScope scope(d);
  const int K = cls.weight_cap;
  auto s = bprime_series<BigFloat>(cls, K, d);
  for (int i = 0; i < derivative; ++i) s = series_derive(s);
  const SingularMetadata* meta = (cls.metadata && derivative <= 1) ? &*cls.metadata : nullptr;
  return eval_with_tail(s, BigFloat(y), meta, std::min(derivative, 1)).value.convert_to<double>();
}

}  // namespace

double eval_Bp(const BlockClassSpec& cls, double y) {
  if (cls.closed_form && cls.closed_form->Bp) return cls.closed_form->Bp(y);
  if (cls.metadata && y == cls.metadata->rho_B) return cls.metadata->Bp_at_rho;
  return eval_series(cls, y, 0);
}

double eval_Bpp(const BlockClassSpec& cls, double y) {
  if (cls.closed_form && cls.closed_form->Bpp) return cls.closed_form->Bpp(y);
  if (cls.metadata && y == cls.metadata->rho_B) return cls.metadata->Bpp_at_rho;
  return eval_series(cls, y, 1);
}

double eval_Bppp(const BlockClassSpec& cls, double y) {
  if (cls.closed_form && cls.closed_form->Bppp) return cls.closed_form->Bppp(y);
  if (cls.metadata && y == cls.metadata->rho_B) return kInf;
  return eval_series(cls, y, 2);
}

// ---------------------------------------------------------------------------

ValidationReport validate_class(const BlockClassSpec& cls, const ValidationOptions& opt) {
  ValidationReport r;
  auto fail = [&](const std::string& m) {
    r.ok = false;
    r.failures.push_back(m);
  };
  const int K = cls.weight_cap;
  if (K < 1) fail("no weights");
  const int scan = std::min(K, 100000);
  for (int k = 1; k <= scan; ++k)
    if (!(cls.coefficient_double(k) >= 0)) {
      fail("negative weight at k = " + std::to_string(k));
      break;
    }

  if (cls.tools && !cls.abstract) {
    for (int k = 1; k <= std::min({opt.enumerate_cap, K, kEnumerateMaxVertices - 1}); ++k) {
      auto w = cls.weight(k);
      auto count = cls.tools->enumerate(k).size();
      if (!w || *w != Rational(static_cast<long>(count)))
        fail("b'_" + std::to_string(k) + " differs from block enumeration (" + std::to_string(count) + ")");
    }
  }

  if (cls.closed_form && cls.closed_form->Bp) {
    const double top = std::isfinite(cls.rho_B) ? 0.9 * cls.rho_B : 2.0;
    const int terms = std::min(K, 20000);
    for (int i = 0; i <= 20; ++i) {
      double y = top * i / 20.0;
      double series = 0, yp = 1;
      for (int k = 1; k <= terms; ++k) {
        yp *= y;
        if (yp == 0) break;
        double c = cls.coefficient_double(k);
        if (c != 0) series += c * yp;
      }
      double closed = cls.closed_form->Bp(y);
      if (std::abs(series - closed) > 1e-9 * std::max(1.0, std::abs(closed))) {
        fail("closed form B' differs from series at y = " + std::to_string(y));
        break;
      }
    }
  }

  if (cls.metadata) {
    const auto& m = *cls.metadata;
    if (!(m.rho_B > 0)) fail("rho_B must be positive");
    if (!(m.Bp_at_rho > 0)) fail("B'(rho_B) must be positive");
    double sp = 0, spp = 0;
    const int terms = std::min(K, 100000);
    for (int k = 1; k <= terms; ++k) {
      double a = cls.coefficient_double(k) * std::pow(m.rho_B, k);
      sp += a;
      spp += k * a / m.rho_B;
    }
    if (sp > m.Bp_at_rho * (1 + 1e-12)) fail("partial sums of B' exceed B'(rho_B)");
    if (spp > m.Bpp_at_rho * (1 + 1e-12)) fail("partial sums of B'' exceed B''(rho_B)");
    if (K >= 100) {
      const double target = m.transfer_constant();
      for (int k = std::max(1, K / 10); k <= K; k += std::max(1, K / 100)) {
        double ratio = cls.coefficient_double(k) * std::pow(m.rho_B, k) * std::pow(k, 2.5) / target;
        if (std::abs(ratio - 1) > opt.tail_tolerance) {
          fail("coefficient tail does not match the 3/2 transfer constant at k = " + std::to_string(k));
          break;
        }
      }
    } else {
      r.notes.push_back("too few weights for a tail fit; metadata taken as given");
    }
  }
  return r;
}

double polylog(double s, double y) {
  if (y < 0 || y > 1) throw std::domain_error("polylog: y must lie in [0, 1]");
  if (y == 0) return 0;
  if (y == 1) {
    if (s <= 1) return kInf;
    return boost::math::zeta(s);
  }
  if (y <= 0.75) {
    double sum = 0, yp = 1;
    for (int k = 1; k < 2000; ++k) {
      yp *= y;
      double term = yp * std::pow(static_cast<double>(k), -s);
      sum += term;
      if (term < 1e-18 * sum) break;
    }
    return sum;
  }
  // Li_s(e^{-t}) = Gamma(1-s) t^{s-1} + sum_k zeta(s-k) (-t)^k / k!, |t| < 2 pi
  const double t = -std::log(y);
  double sum = boost::math::tgamma(1 - s) * std::pow(t, s - 1);
  double tk = 1;
  for (int k = 0; k < 60; ++k) {
    if (k > 0) tk *= -t / k;
    double term = boost::math::zeta(s - k) * tk;
    sum += term;
    if (k > 3 && std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

}  // namespace bwg
