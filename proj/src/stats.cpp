#include "bwg/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace bwg {

namespace {

constexpr std::size_t kMinReplicates = 100;

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stderr_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0;
  const double m = mean_of(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

std::map<long, std::vector<const BlockStatsRecord*>> by_n(const std::vector<BlockStatsRecord>& records) {
  std::map<long, std::vector<const BlockStatsRecord*>> g;
  for (const auto& r : records) g[r.n].push_back(&r);
  return g;
}

int rank_value(const std::vector<int>& v, int j) { return j < static_cast<int>(v.size()) ? v[j] : 0; }

}  // namespace

GoodnessOfFit chi_square_gof(const std::vector<long>& counts, const std::vector<double>& probs, double min_expected) {
  if (counts.size() != probs.size()) throw std::invalid_argument("counts and probabilities differ in length");
  const double total = static_cast<double>(std::accumulate(counts.begin(), counts.end(), 0L));
  if (total <= 0) throw std::invalid_argument("no observations");
  GoodnessOfFit g;
  double lump_obs = 0, lump_exp = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double e = probs[i] * total;
    if (e < min_expected) {
      lump_obs += static_cast<double>(counts[i]);
      lump_exp += e;
      continue;
    }
    g.statistic += (counts[i] - e) * (counts[i] - e) / e;
    ++g.bins;
  }
  if (lump_exp > 0) {
    g.statistic += (lump_obs - lump_exp) * (lump_obs - lump_exp) / lump_exp;
    ++g.bins;
  } else if (lump_obs > 0) {
    g.statistic = std::numeric_limits<double>::infinity();
  }
  g.dof = std::max(1, g.bins - 1);
  if (std::isinf(g.statistic)) {
    g.p_value = 0;
  } else {
    boost::math::chi_squared dist(g.dof);
    g.p_value = boost::math::cdf(boost::math::complement(dist, g.statistic));
  }
  return g;
}

double total_variation(const std::vector<long>& counts, const std::vector<double>& probs) {
  if (counts.size() != probs.size()) throw std::invalid_argument("counts and probabilities differ in length");
  const double total = static_cast<double>(std::accumulate(counts.begin(), counts.end(), 0L));
  double tv = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) tv += std::abs(counts[i] / total - probs[i]);
  return tv / 2;
}

// ---------------------------------------------------------------------------

BlockStatsRecord extract_block_stats(const SampleOutput& s, int ranks) {
  BlockStatsRecord r;
  const int n = s.tree.size();
  r.n = n;
  r.u = s.u;
  const auto ranking = tree_degree_stats(s.tree);
  std::vector<int> all;
  std::vector<double> counts(static_cast<std::size_t>(n));
  double weighted = 0, weight = 0;
  for (int v = 0; v < n; ++v) {
    const auto& b = s.block_sizes[v];
    all.insert(all.end(), b.begin(), b.end());
    counts[v] = static_cast<double>(b.size());
    weighted += s.tree.outdegree(v) * counts[v];
    weight += s.tree.outdegree(v);
  }
  for (int j = 0; j < ranks; ++j) {
    if (j < n) {
      const int v = ranking.vertices[j];
      r.d.push_back(ranking.degrees[j]);
      const auto& b = s.block_sizes[v];
      r.m.push_back(b.empty() ? 0 : *std::max_element(b.begin(), b.end()));
    } else {
      r.d.push_back(0);
      r.m.push_back(0);
    }
  }
  const int top = std::min<int>(ranks, static_cast<int>(all.size()));
  std::partial_sort(all.begin(), all.begin() + top, all.end(), std::greater<>());
  r.LB.assign(all.begin(), all.begin() + top);
  r.LB.resize(static_cast<std::size_t>(ranks), 0);
  r.num_blocks = static_cast<long>(all.size());
  r.blocks_per_vertex_mean = mean_of(counts);
  double var = 0;
  for (double c : counts) var += (c - r.blocks_per_vertex_mean) * (c - r.blocks_per_vertex_mean);
  r.blocks_per_vertex_var = var / n;
  r.blocks_size_biased_mean = weight > 0 ? weighted / weight : 0;
  r.blocks_at_top = static_cast<int>(s.block_sizes[ranking.vertices[0]].size());
  return r;
}

// ---------------------------------------------------------------------------

bool CheckItem::pass() const {
  if (!asserted) return true;
  const double err = std::abs(value - target);
  return std::isfinite(value) && err <= (relative ? tolerance * std::abs(target) : tolerance);
}

bool CheckReport::pass() const {
  return std::all_of(items.begin(), items.end(), [](const CheckItem& i) { return i.pass(); });
}

std::string CheckReport::to_json() const {
  nlohmann::json j;
  j["check"] = check;
  j["regime"] = regime;
  j["pass"] = pass();
  j["items"] = nlohmann::json::array();
  for (const auto& i : items) {
    j["items"].push_back({{"name", i.name},
                          {"value", i.value},
                          {"target", i.target},
                          {"tolerance", i.tolerance},
                          {"relative", i.relative},
                          {"asserted", i.asserted},
                          {"pass", i.pass()}});
  }
  nlohmann::json info = nlohmann::json::object();
  for (const auto& [k, v] : this->info) info[k] = v;
  j["info"] = info;
  return j.dump(2);
}

GridSummary summarize(const std::vector<BlockStatsRecord>& records, Statistic stat) {
  GridSummary g;
  for (const auto& [n, rs] : by_n(records)) {
    std::vector<double> x1, x2;
    for (const auto* r : rs) {
      const auto& v = stat == Statistic::Degree ? r->d : r->LB;
      x1.push_back(rank_value(v, 0));
      x2.push_back(rank_value(v, 1));
    }
    g.n.push_back(n);
    g.mean1.push_back(mean_of(x1));
    g.median1.push_back(quantile(x1, 0.5));
    g.mean2.push_back(mean_of(x2));
    g.median2.push_back(quantile(x2, 0.5));
    g.q99_1.push_back(quantile(x1, 0.99));
  }
  return g;
}

double loglog_slope(const std::vector<long>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("slope fit needs two or more points");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(y[i] > 0)) throw std::domain_error("slope fit needs positive values");
    lx.push_back(std::log(static_cast<double>(x[i])));
    ly.push_back(std::log(y[i]));
  }
  const double mx = mean_of(lx), my = mean_of(ly);
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  return sxy / sxx;
}

CheckReport scaling_check(const std::vector<BlockStatsRecord>& records, const PhaseSolution& phase, double rho_B,
                          Statistic stat) {
  const auto groups = by_n(records);
  if (groups.size() < 3) throw std::invalid_argument("scaling check needs at least three sizes");
  for (const auto& [n, rs] : groups)
    if (rs.size() < kMinReplicates) throw std::invalid_argument("scaling check needs at least 100 replicates per size");
  const GridSummary g = summarize(records, stat);
  const std::string label = stat == Statistic::Degree ? "d" : "LB";
  CheckReport rep;
  rep.check = stat == Statistic::Degree ? "degree_scaling" : "block_size_phase";
  rep.regime = to_string(phase.phase);
  for (std::size_t i = 0; i < g.n.size(); ++i) {
    const std::string at = "@n=" + std::to_string(g.n[i]);
    rep.info.emplace_back("mean " + label + "1 " + at, g.mean1[i]);
    rep.info.emplace_back("median " + label + "1 " + at, g.median1[i]);
    rep.info.emplace_back("median " + label + "2 " + at, g.median2[i]);
    rep.info.emplace_back("q99 " + label + "1 " + at, g.q99_1[i]);
  }
  const double nmax = static_cast<double>(g.n.back());
  switch (phase.phase) {
    case Phase::Subcritical: {
      rep.items.push_back({"mean " + label + "1/n at largest n", g.mean1.back() / nmax, 1 - phase.u / phase.u_C, 0.05,
                           true});
      rep.items.push_back({"slope of median " + label + "2", loglog_slope(g.n, g.median2), 2.0 / 3.0, 0.10});
      for (std::size_t i = 0; i < g.n.size(); ++i)
        rep.info.emplace_back("median " + label + "2/n^(2/3) @n=" + std::to_string(g.n[i]),
                              g.median2[i] / std::pow(static_cast<double>(g.n[i]), 2.0 / 3.0));
      break;
    }
    case Phase::Critical: {
      rep.items.push_back({"slope of median " + label + "1", loglog_slope(g.n, g.median1), 2.0 / 3.0, 0.05});
      for (std::size_t i = 0; i < g.n.size(); ++i)
        rep.info.emplace_back("median " + label + "1/n^(2/3) @n=" + std::to_string(g.n[i]),
                              g.median1[i] / std::pow(static_cast<double>(g.n[i]), 2.0 / 3.0));
      break;
    }
    case Phase::Supercritical: {
      if (!std::isfinite(rho_B)) throw std::invalid_argument("log-law fit needs a finite rho_B");
      const double L = std::log(rho_B / phase.y_u);
      // mean X1 = a h(n) + b with h(n) = ln n - 5/2 ln ln n
      std::vector<double> h;
      for (long n : g.n) h.push_back(std::log(double(n)) - 2.5 * std::log(std::log(double(n))));
      const double mh = mean_of(h), my = mean_of(g.mean1);
      double sxy = 0, sxx = 0;
      for (std::size_t i = 0; i < h.size(); ++i) {
        sxy += (h[i] - mh) * (g.mean1[i] - my);
        sxx += (h[i] - mh) * (h[i] - mh);
      }
      const double a = sxy / sxx;
      rep.items.push_back({"log-law coefficient of mean " + label + "1 times ln(rho_B/y)", a * L, 1.0, 0.15, true});
      rep.info.emplace_back("fitted coefficient", a);
      rep.info.emplace_back("predicted coefficient 1/ln(rho_B/y)", 1 / L);
      rep.info.emplace_back("intercept", my - a * mh);
      break;
    }
  }
  return rep;
}

std::vector<std::pair<long, double>> iid_max_reference(const BlockClassSpec& cls, const PhaseSolution& phase,
                                                      const std::vector<BlockStatsRecord>& records, Statistic stat,
                                                      int support) {
  std::vector<double> p;
  if (stat == Statistic::Degree) {
    p = reproduction_law(cls, phase.u, support).probs;
  } else {
    const double lb = std::log(phase.y_u);
    p.assign(static_cast<std::size_t>(support) + 1, 0.0);
    for (int k = 1; k <= support && cls.has_coefficient(k); ++k) p[k] = cls.coefficient_double(k) * std::exp(k * lb);
  }
  // tail[m] = P(X >= m)
  std::vector<double> tail(p.size() + 1, 0.0);
  for (std::size_t m = p.size(); m-- > 0;) tail[m] = tail[m + 1] + p[m];
  const double total = tail[0];
  std::vector<std::pair<long, double>> out;
  for (const auto& [n, rs] : by_n(records)) {
    double N = static_cast<double>(n);
    if (stat == Statistic::BlockSize) {
      N = 0;
      for (const auto* r : rs) N += static_cast<double>(r->num_blocks);
      N /= static_cast<double>(rs.size());
    }
    double mean = 0;
    for (std::size_t m = 1; m < tail.size(); ++m) mean += -std::expm1(N * std::log1p(-tail[m] / total));
    out.emplace_back(n, mean);
  }
  return out;
}

CheckReport degree_scaling_check(const std::vector<BlockStatsRecord>& records, const PhaseSolution& phase,
                                 double rho_B) {
  return scaling_check(records, phase, rho_B, Statistic::Degree);
}

CheckReport block_size_phase_check(const std::vector<BlockStatsRecord>& records, const PhaseSolution& phase,
                                   double rho_B) {
  return scaling_check(records, phase, rho_B, Statistic::BlockSize);
}

CheckReport gibbs_remainder_check(const std::vector<BlockStatsRecord>& records, const RemainderLaw& law,
                                  double p0_exact) {
  const auto groups = by_n(records);
  if (groups.empty()) throw std::invalid_argument("no records");
  constexpr int kBins = 10;
  CheckReport rep;
  rep.check = "gibbs_remainder";
  for (const auto& [n, rs] : groups) {
    std::vector<double> diff;
    for (const auto* r : rs) diff.push_back(rank_value(r->d, 0) - rank_value(r->m, 0));
    rep.info.emplace_back("q99 d1-m1 @n=" + std::to_string(n), quantile(diff, 0.99));
  }
  const auto& top = groups.rbegin()->second;
  std::vector<long> counts(kBins + 1, 0);
  for (const auto* r : top) {
    const int x = rank_value(r->d, 0) - rank_value(r->m, 0);
    if (x < 0) throw std::logic_error("largest block exceeds the outdegree");
    ++counts[std::min(x, kBins)];
  }
  std::vector<double> probs(kBins + 1, 0.0);
  double head = 0;
  for (int i = 0; i < kBins && i < static_cast<int>(law.probs.size()); ++i) head += probs[i] = law.probs[i];
  probs[kBins] = std::max(0.0, 1 - head);
  const double total = static_cast<double>(top.size());
  const double p0 = counts[0] / total;
  rep.items.push_back({"TV(d1-m1, R) on 0..9 and >=10", total_variation(counts, probs), 0, 0.02});
  rep.items.push_back({"P(R = 0) against exp(-u B'(rho_B))", law.probs.empty() ? 0 : law.probs[0], p0_exact, 5e-4, true});
  rep.info.emplace_back("replicates at largest n", total);
  rep.info.emplace_back("empirical P(d1-m1 = 0)", p0);
  rep.info.emplace_back("standard error of empirical P(0)", std::sqrt(p0 * (1 - p0) / total));
  auto gof = chi_square_gof(counts, probs);
  rep.info.emplace_back("chi-square p-value", gof.p_value);
  // TV of samples of the same size drawn from R itself
  Rng rng(RngHandle{0x7e57, 0});
  AliasTable table(probs);
  constexpr int kRepeats = 400;
  double tv_sum = 0;
  int below = 0;
  for (int k = 0; k < kRepeats; ++k) {
    std::vector<long> c(probs.size(), 0);
    for (std::size_t i = 0; i < top.size(); ++i) ++c[table.sample(rng)];
    const double tv = total_variation(c, probs);
    tv_sum += tv;
    below += tv < 0.02;
  }
  rep.info.emplace_back("mean TV of exact-law samples of this size", tv_sum / kRepeats);
  rep.info.emplace_back("fraction of exact-law samples with TV < 0.02", double(below) / kRepeats);
  return rep;
}

CheckReport block_count_probe(const std::vector<BlockStatsRecord>& records, double u_over_uc, double u_bp_rho) {
  const auto groups = by_n(records);
  if (groups.empty()) throw std::invalid_argument("no records");
  CheckReport rep;
  rep.check = "block_count_candidates";
  const auto& top = groups.rbegin()->second;
  std::vector<double> a, b, c;
  for (const auto* r : top) {
    a.push_back(r->blocks_per_vertex_mean);
    b.push_back(r->blocks_size_biased_mean);
    c.push_back(r->blocks_at_top);
  }
  auto add = [&](const std::string& name, const std::vector<double>& v) {
    rep.items.push_back({name + " vs u/u_C", mean_of(v), u_over_uc, 0, false, false});
    rep.items.push_back({name + " vs u B'(rho_B)", mean_of(v), u_bp_rho, 0, false, false});
    rep.info.emplace_back(name + " standard error", stderr_of(v));
  };
  add("uniform vertex", a);
  add("size-biased vertex", b);
  add("largest-degree vertex", c);
  return rep;
}

// ---------------------------------------------------------------------------

RunConfig parse_run_config(const std::string& json_text) {
  auto j = nlohmann::json::parse(json_text);
  RunConfig c;
  c.class_name = j.value("class", c.class_name);
  c.class_file = j.value("class_file", std::string());
  for (const auto& v : j.at("u")) {
    if (v.is_string()) {
      if (v.get<std::string>() != "critical") throw std::invalid_argument("u entries are numbers or \"critical\"");
      c.u.push_back(std::numeric_limits<double>::quiet_NaN());
    } else {
      c.u.push_back(v.get<double>());
    }
  }
  for (const auto& v : j.at("n")) c.n.push_back(v.get<long>());
  c.replicates = j.value("replicates", c.replicates);
  c.seed = j.value("seed", c.seed);
  c.ranks = j.value("ranks", c.ranks);
  c.threads = j.value("threads", c.threads);
  c.records_csv = j.value("records_csv", std::string());
  c.report_json = j.value("report_json", std::string());
  validate(c);
  return c;
}

void validate(const RunConfig& c) {
  if (c.u.empty()) throw std::invalid_argument("config needs at least one u");
  if (c.n.empty()) throw std::invalid_argument("config needs an n grid");
  for (std::size_t i = 0; i < c.n.size(); ++i) {
    if (c.n[i] < 1) throw std::invalid_argument("n values must be positive");
    if (i > 0 && c.n[i] <= c.n[i - 1]) throw std::invalid_argument("n grid must be strictly increasing");
  }
  if (c.replicates < 1) throw std::invalid_argument("replicates must be at least 1");
  if (c.ranks < 1) throw std::invalid_argument("ranks must be at least 1");
}

int default_threads() {
  if (const char* env = std::getenv("BWG_THREADS")) {
    const int t = std::atoi(env);
    if (t > 0) return t;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<BlockStatsRecord> collect_records(const BlockClassSpec& cls, double u, const std::vector<long>& ns,
                                              long replicates, std::uint64_t seed, int ranks, int threads,
                                              std::uint64_t u_index) {
  if (threads <= 0) threads = default_threads();
  std::vector<BlockStatsRecord> out;
  for (std::size_t ni = 0; ni < ns.size(); ++ni) {
    const PnuSampler sampler(cls, u, static_cast<int>(ns[ni]));
    std::vector<BlockStatsRecord> recs(static_cast<std::size_t>(replicates));
    std::atomic<long> next{0};
    auto work = [&]() {
      for (long r; (r = next.fetch_add(1)) < replicates;) {
        const std::uint64_t stream = (u_index << 48) | (static_cast<std::uint64_t>(ni) << 32) |
                                     static_cast<std::uint64_t>(r);
        Rng rng(RngHandle{seed, stream});
        auto rec = extract_block_stats(sampler.sample(rng, false), ranks);
        rec.replicate = r;
        rec.seed = seed;
        rec.stream = stream;
        recs[r] = std::move(rec);
      }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    out.insert(out.end(), recs.begin(), recs.end());
  }
  return out;
}

std::string records_csv_header(int ranks) {
  std::ostringstream os;
  os << "n,u,replicate,seed,stream";
  for (const char* p : {"d", "m", "LB"})
    for (int j = 1; j <= ranks; ++j) os << ',' << p << j;
  os << ",num_blocks,blocks_mean,blocks_var,blocks_size_biased,blocks_at_top";
  return os.str();
}

std::string to_csv_row(const BlockStatsRecord& r, int ranks) {
  std::ostringstream os;
  os.precision(17);
  os << r.n << ',' << r.u << ',' << r.replicate << ',' << r.seed << ',' << r.stream;
  for (const auto* v : {&r.d, &r.m, &r.LB})
    for (int j = 0; j < ranks; ++j) os << ',' << rank_value(*v, j);
  os << ',' << r.num_blocks << ',' << r.blocks_per_vertex_mean << ',' << r.blocks_per_vertex_var << ','
     << r.blocks_size_biased_mean << ',' << r.blocks_at_top;
  return os.str();
}

StatsRun run_stats(const RunConfig& cfg) {
  validate(cfg);
  const BlockClassSpec cls = cfg.class_file.empty() ? class_by_name(cfg.class_name) : load_class_file(cfg.class_file);
  const int threads = cfg.threads > 0 ? cfg.threads : default_threads();
  StatsRun run;
  for (std::size_t ui = 0; ui < cfg.u.size(); ++ui) {
    const double u = std::isnan(cfg.u[ui]) ? critical_u(cls) : cfg.u[ui];
    auto recs = collect_records(cls, u, cfg.n, cfg.replicates, cfg.seed, cfg.ranks, threads, ui);
    const PhaseSolution phase = solve_phase(cls, u);
    const double rho_B = cls.metadata ? cls.metadata->rho_B : cls.rho_B;
    auto attempt = [&](const std::string& name, auto&& f) {
      try {
        run.reports.push_back(f());
      } catch (const std::exception& e) {
        CheckReport r;
        r.check = name;
        r.regime = to_string(phase.phase);
        r.items.push_back({std::string("not evaluated: ") + e.what(), 0, 0, 0, false, false});
        run.reports.push_back(r);
      }
      run.reports.back().regime = to_string(phase.phase);
      run.reports.back().info.emplace_back("u", u);
    };
    auto with_reference = [&](CheckReport rep, Statistic stat) {
      if (phase.phase == Phase::Supercritical) {
        const std::string label = stat == Statistic::Degree ? "d1" : "LB1";
        for (auto [n, m] : iid_max_reference(cls, phase, recs, stat))
          rep.info.emplace_back("i.i.d.-maximum mean " + label + " @n=" + std::to_string(n), m);
      }
      return rep;
    };
    attempt("degree_scaling",
            [&] { return with_reference(degree_scaling_check(recs, phase, rho_B), Statistic::Degree); });
    attempt("block_size_phase",
            [&] { return with_reference(block_size_phase_check(recs, phase, rho_B), Statistic::BlockSize); });
    if (cls.metadata && phase.phase != Phase::Supercritical) {
      attempt("gibbs_remainder", [&] {
        auto law = gibbs_remainder_law(cls, u, std::min(cls.weight_cap, 4096));
        return gibbs_remainder_check(recs, law, std::exp(-u * cls.metadata->Bp_at_rho));
      });
      attempt("block_count_candidates", [&] {
        return block_count_probe(recs, u / phase.u_C, u * cls.metadata->Bp_at_rho);
      });
    }
    run.records.insert(run.records.end(), recs.begin(), recs.end());
  }
  if (!cfg.records_csv.empty()) {
    std::ofstream os(cfg.records_csv);
    if (!os) throw std::runtime_error("cannot write " + cfg.records_csv);
    os << records_csv_header(cfg.ranks) << '\n';
    for (const auto& r : run.records) os << to_csv_row(r, cfg.ranks) << '\n';
  }
  if (!cfg.report_json.empty()) {
    std::ofstream os(cfg.report_json);
    if (!os) throw std::runtime_error("cannot write " + cfg.report_json);
    os << '[';
    for (std::size_t i = 0; i < run.reports.size(); ++i) os << (i ? ",\n" : "\n") << run.reports[i].to_json();
    os << "\n]\n";
  }
  return run;
}

}  // namespace bwg
