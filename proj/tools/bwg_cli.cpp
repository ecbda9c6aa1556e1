#include "acceptance.hpp"

#include "bwg/block_class.hpp"
#include "bwg/phase.hpp"
#include "bwg/samplers.hpp"
#include "bwg/stats.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace bwg;
using nlohmann::json;

namespace {

struct ClassArgs {
  std::string name = "polylog";
  std::string file;
  BlockClassSpec load() const { return file.empty() ? class_by_name(name) : load_class_file(file); }
};

void add_class_options(CLI::App* cmd, ClassArgs& c) {
  cmd->add_option("--class", c.name, "Shipped class: trees, cacti, polylog, planar, all_graphs")->capture_default_str();
  cmd->add_option("--class-file", c.file, "Class-spec JSON file (overrides --class)");
}

double resolve_u(const std::string& text, const BlockClassSpec& cls) {
  if (text == "critical") return critical_u(cls);
  std::size_t used = 0;
  const double u = std::stod(text, &used);
  if (used != text.size() || !(u > 0)) throw std::invalid_argument("u must be positive or 'critical': " + text);
  return u;
}

int run_enumerate(const ClassArgs& ca, int order, const std::string& u_text, unsigned bits, int digits) {
  const auto cls = ca.load();
  if (order < 1) throw std::invalid_argument("order must be at least 1");
  if (u_text.empty()) {
    // n! [x^n] C as a polynomial in u
    std::vector<PolyU> T;
    try {
      T = egf_counts(lagrange_solve(phi_series_u(cls, order - 1), order));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(std::string(e.what()) + " (pass --u for decimal coefficients)");
    }
    std::cout << "n,count\n";
    for (int n = 1; n <= order; ++n) std::cout << n << ",\"" << to_string(T[n]) << "\"\n";
    return 0;
  }
  const double u = resolve_u(u_text, cls);
  const Domain d = Domain::bigfloat(bits);
  DomainScope scope(d);
  auto C = lagrange_solve(series_exp(series_scale(bprime_series<BigFloat>(cls, order - 1, d), BigFloat(u))), order);
  std::cout << "n,coefficient\n";
  for (int n = 1; n <= order; ++n) std::cout << n << ',' << to_string(C[n], digits) << '\n';
  return 0;
}

json constants_json(const BlockClassSpec& cls, double u) {
  if (!cls.metadata) return nullptr;
  const auto c = asymptotic_constants(cls, u);
  json base = {{"alpha", c.alpha}, {"gamma", c.gamma_u}, {"c", c.c_u}, {"rho", c.rho_u}};
  if (c.regime == Phase::Subcritical) base["r"] = c.r_u;
  json printed = base, derived = base;
  printed["s"] = c.s_u;
  printed["leading"] = c.leading;
  derived["s"] = c.s_u_derived;
  derived["leading"] = c.leading_derived;
  return {{"printed", printed}, {"derived", derived}};
}

int run_phase(const ClassArgs& ca, const std::vector<std::string>& us) {
  const auto cls = ca.load();
  for (const auto& text : us) {
    const double u = resolve_u(text, cls);
    const auto p = solve_phase(cls, u);
    json j = {{"class", cls.name}, {"u", u},          {"u_C", p.u_C},         {"rho", p.rho_u},
              {"y", p.y_u},        {"phase", to_string(p.phase)}, {"mean_mu", p.mean_mu}};
    j["constants"] = constants_json(cls, u);
    std::cout << j.dump() << '\n';
  }
  return 0;
}

struct SampleArgs {
  std::string u = "1";
  long n = 0;
  double x = 0;
  long replicates = 1;
  std::uint64_t seed = 1;
  std::string emit = "sizes";
  std::string format = "jsonl";
  long max_size = 10'000'000;
};

int run_sample(const ClassArgs& ca, const SampleArgs& a) {
  const auto cls = ca.load();
  const double u = resolve_u(a.u, cls);
  if ((a.n > 0) == (a.x > 0)) throw std::invalid_argument("give exactly one of --n and --x");
  const bool want_graph = a.emit == "graph";
  if (want_graph && !cls.tools) throw std::invalid_argument(cls.name + " is abstract: no graphs to emit");
  if (a.format == "exchange" && !want_graph) throw std::invalid_argument("--format exchange needs --emit graph");
  std::unique_ptr<PnuSampler> pnu;
  std::unique_ptr<BoltzmannSampler> boltz;
  if (a.n > 0) pnu = std::make_unique<PnuSampler>(cls, u, static_cast<int>(a.n));
  else boltz = std::make_unique<BoltzmannSampler>(cls, u, a.x);
  for (long r = 0; r < a.replicates; ++r) {
    const RngHandle h{a.seed, static_cast<std::uint64_t>(r)};
    Rng rng(h);
    std::optional<SampleOutput> s;
    if (pnu) s = pnu->sample(rng, want_graph);
    else s = boltz->cstar_sample(rng, a.max_size, want_graph);
    if (a.format == "exchange") {
      std::cout << (s ? to_exchange(*s->graph) : std::string()) << '\n';
      continue;
    }
    json j = {{"replicate", r}, {"seed", a.seed}, {"stream", h.stream}, {"u", u}};
    if (!s) {
      j["aborted"] = true;
      j["max_size"] = a.max_size;
      std::cout << j.dump() << '\n';
      continue;
    }
    j["n"] = s->tree.size();
    if (a.emit == "sizes") {
      std::vector<int> all;
      for (const auto& v : s->block_sizes) all.insert(all.end(), v.begin(), v.end());
      std::sort(all.rbegin(), all.rend());
      const auto& od = s->tree.outdegrees();
      j["max_outdegree"] = od.empty() ? 0 : *std::max_element(od.begin(), od.end());
      j["block_sizes"] = all;
    } else if (a.emit == "tree") {
      j["outdegrees"] = s->tree.outdegrees();
      j["decorations"] = s->block_sizes;
    } else if (want_graph) {
      j["graph"] = to_exchange(*s->graph);
    } else {
      throw std::invalid_argument("--emit must be sizes, tree or graph");
    }
    std::cout << j.dump() << '\n';
  }
  return 0;
}

int run_stats_command(const std::string& path, int threads) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  RunConfig cfg = parse_run_config(ss.str());
  if (threads > 0) cfg.threads = threads;
  validate(cfg);
  const auto run = run_stats(cfg);
  bool ok = true;
  for (const auto& r : run.reports) {
    ok = ok && r.pass();
    std::cout << (r.pass() ? "PASS " : "FAIL ") << r.check << " (" << r.regime << ")\n";
    for (const auto& it : r.items)
      std::cout << "    " << (it.asserted ? (it.pass() ? "ok   " : "MISS ") : "info ") << it.name << ": " << it.value
                << " vs " << it.target << '\n';
  }
  std::cout << run.records.size() << " records\n";
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Block-weighted random graphs: enumeration, phases, sampling and statistics"};
  app.require_subcommand(1);

  ClassArgs ca;

  auto* en = app.add_subcommand("enumerate", "Coefficient table of C(x, u) as CSV");
  add_class_options(en, ca);
  int order = 10;
  std::string en_u;
  unsigned bits = 192;
  int digits = 30;
  en->add_option("--order", order, "Largest n")->capture_default_str();
  en->add_option("--u", en_u, "Numeric u or 'critical'; omitted: exact polynomials in u");
  en->add_option("--bits", bits, "Working precision for numeric u")->capture_default_str();
  en->add_option("--digits", digits, "Significant digits printed for numeric u")->capture_default_str();

  auto* ph = app.add_subcommand("phase", "Phase, rho(u), y(u) and asymptotic constants as JSON lines");
  add_class_options(ph, ca);
  std::vector<std::string> ph_u;
  ph->add_option("--u", ph_u, "Values of u or 'critical'")->required();

  auto* sa = app.add_subcommand("sample", "Samples from P_{n,u} (--n) or the Boltzmann model (--x)");
  add_class_options(sa, ca);
  SampleArgs sargs;
  sa->add_option("--u", sargs.u, "Block weight or 'critical'")->capture_default_str();
  sa->add_option("--n", sargs.n, "Vertex count for the conditioned model");
  sa->add_option("--x", sargs.x, "Boltzmann parameter, 0 < x <= rho(u)");
  sa->add_option("--replicates", sargs.replicates, "Number of samples")->capture_default_str();
  sa->add_option("--seed", sargs.seed, "Seed; sample r uses stream r")->capture_default_str();
  sa->add_option("--emit", sargs.emit, "sizes, tree or graph")->capture_default_str();
  sa->add_option("--format", sargs.format, "jsonl or exchange (graphs only)")->capture_default_str();
  sa->add_option("--max-size", sargs.max_size, "Boltzmann abort size")->capture_default_str();

  auto* st = app.add_subcommand("stats", "Run a RunConfig JSON file");
  std::string config;
  int threads = 0;
  st->add_option("config", config, "RunConfig file")->required();
  st->add_option("--threads", threads, "Worker threads (default: BWG_THREADS or hardware)");

  auto* ve = app.add_subcommand("verify", "Run the acceptance criteria; exit code 0 when all pass");
  acceptance::Options vopt;
  ve->add_option("--seed", vopt.seed, "Seed for the sampled criteria")->capture_default_str();
  ve->add_option("--threads", vopt.threads, "Worker threads");
  ve->add_option("--only", vopt.only, "Criterion numbers to run");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*en) return run_enumerate(ca, order, en_u, bits, digits);
    if (*ph) return run_phase(ca, ph_u);
    if (*sa) return run_sample(ca, sargs);
    if (*st) return run_stats_command(config, threads);
    if (*ve) {
      auto results = acceptance::run(vopt, &std::cout);
      int failed = 0;
      for (const auto& r : results) failed += !r.pass;
      std::cout << results.size() - failed << "/" << results.size() << " criteria pass\n";
      return failed == 0 ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
