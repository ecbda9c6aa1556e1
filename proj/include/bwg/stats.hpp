#pragma once

#include "bwg/phase.hpp"
#include "bwg/samplers.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bwg {

struct GoodnessOfFit {
  double statistic = 0;
  int dof = 0;
  double p_value = 1;
  int bins = 0;  // after lumping
};

/// Pearson chi-square of counts against probabilities; bins with expected
/// count below min_expected are merged into one.
GoodnessOfFit chi_square_gof(const std::vector<long>& counts, const std::vector<double>& probs,
                             double min_expected = 5);

/// Total variation between the empirical law of counts and probs; the last
/// entry of both may be a lumped tail.
double total_variation(const std::vector<long>& counts, const std::vector<double>& probs);

/// Derived block sizes throughout (a block on k+1 vertices has size k).
struct BlockStatsRecord {
  long n = 0;
  double u = 0;
  long replicate = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::vector<int> d;   // largest outdegrees d^(1..j)
  std::vector<int> m;   // largest block in the decoration of v^(j)
  std::vector<int> LB;  // largest block sizes over the whole graph
  long num_blocks = 0;
  double blocks_per_vertex_mean = 0;  // uniform vertex
  double blocks_per_vertex_var = 0;
  double blocks_size_biased_mean = 0;  // vertex drawn proportionally to its decoration size
  int blocks_at_top = 0;               // block count at v^(1)
};

/// Ranks beyond the available entries are reported as 0.
BlockStatsRecord extract_block_stats(const SampleOutput& s, int ranks);

struct CheckItem {
  std::string name;
  double value = 0;
  double target = 0;
  double tolerance = 0;  // absolute unless `relative`
  bool relative = false;
  bool asserted = true;
  bool pass() const;
};

struct CheckReport {
  std::string check;
  std::string regime;
  std::vector<CheckItem> items;
  std::vector<std::pair<std::string, double>> info;
  bool pass() const;
  std::string to_json() const;
};

enum class Statistic { Degree, BlockSize };

/// Per n: the rank-1 and rank-2 values of the chosen statistic.
struct GridSummary {
  std::vector<long> n;
  std::vector<double> mean1, median1, mean2, median2, q99_1;
};
GridSummary summarize(const std::vector<BlockStatsRecord>& records, Statistic stat);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<long>& x, const std::vector<double>& y);

/// Subcritical: mean X^(1)/n at the largest n against 1 - u/u_C (5%) and the
/// log-log slope of median X^(2) against 2/3 (0.10). Critical: slope of
/// median X^(1) against 2/3 (0.05). Supercritical: mean X^(1) fitted as
/// a (ln n - 5/2 ln ln n) + b, with a against 1/ln(rho_B/y(u)) (15%).
CheckReport scaling_check(const std::vector<BlockStatsRecord>& records, const PhaseSolution& phase, double rho_B,
                          Statistic stat);
/// Mean of the maximum of N i.i.d. draws per n: outdegrees from the
/// reproduction law with N = n, or block sizes with weights [y^k]B' y(u)^k
/// and N the mean block count of the records. Support is cut at `support`.
std::vector<std::pair<long, double>> iid_max_reference(const BlockClassSpec& cls, const PhaseSolution& phase,
                                                      const std::vector<BlockStatsRecord>& records, Statistic stat,
                                                      int support = 4096);

CheckReport degree_scaling_check(const std::vector<BlockStatsRecord>& records, const PhaseSolution& phase,
                                 double rho_B);
CheckReport block_size_phase_check(const std::vector<BlockStatsRecord>& records, const PhaseSolution& phase,
                                   double rho_B);

/// Empirical law of d^(1) - m^(1) at the largest n against R on bins
/// 0..9 plus a lumped tail: TV below 0.02 and P(0) within 3 significant
/// figures of exp(-u B'(rho_B)). 99th percentiles per n are reported.
CheckReport gibbs_remainder_check(const std::vector<BlockStatsRecord>& records, const RemainderLaw& law,
                                  double p0_exact);

/// Three candidate means of the block count with standard errors; nothing
/// is asserted.
CheckReport block_count_probe(const std::vector<BlockStatsRecord>& records, double u_over_uc, double u_bp_rho);

struct RunConfig {
  std::string class_name = "polylog";
  std::string class_file;  // overrides class_name when set
  std::vector<double> u;   // "critical" in the file resolves to u_C
  std::vector<long> n;
  long replicates = 200;
  std::uint64_t seed = 1;
  int ranks = 5;
  int threads = 0;  // 0: BWG_THREADS or hardware concurrency
  std::string records_csv;
  std::string report_json;
};

/// Parses the JSON form; `critical` entries of "u" need the class.
RunConfig parse_run_config(const std::string& json_text);
void validate(const RunConfig& c);

/// Threads from BWG_THREADS, else hardware concurrency, at least 1.
int default_threads();

/// Runs sample_pnu for every (u, n, replicate), in parallel by replicate;
/// stream index (u_index << 48) | (n_index << 32) | replicate.
std::vector<BlockStatsRecord> collect_records(const BlockClassSpec& cls, double u, const std::vector<long>& ns,
                                              long replicates, std::uint64_t seed, int ranks, int threads,
                                              std::uint64_t u_index = 0);

std::string records_csv_header(int ranks);
std::string to_csv_row(const BlockStatsRecord& r, int ranks);

struct StatsRun {
  std::vector<BlockStatsRecord> records;
  std::vector<CheckReport> reports;
};
StatsRun run_stats(const RunConfig& cfg);

}  // namespace bwg
