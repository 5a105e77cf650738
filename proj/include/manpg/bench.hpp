#ifndef MANPG_BENCH_HPP
#define MANPG_BENCH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "manpg/solvers.hpp"

namespace manpg {

enum class ProblemKind { Spca, Cm, McpSpca };
enum class SolverKind { Manpg, ManpgAda, Soc, Subgrad };

std::string to_string(ProblemKind k);
std::string to_string(SolverKind k);
ProblemKind parse_problem_kind(const std::string& s);
SolverKind parse_solver_kind(const std::string& s);

struct ExperimentSpec {
  ProblemKind problem = ProblemKind::Spca;
  std::vector<Eigen::Index> ns{100};
  std::vector<Eigen::Index> rs{5};
  std::vector<double> mus{0.8};
  int instances = 50;
  std::vector<SolverKind> solvers{SolverKind::Manpg};
  std::uint64_t seed_base = 0;
  int subgrad_warmup = 500;  // shared warm-start iterations
  int max_iter = 30000;
  double eps_scale = 1e-8;
  RetractionKind retraction = RetractionKind::Polar;
  // wall-clock seconds of each solver call; zeroed when false so repeated
  // runs emit byte-identical CSV
  bool record_timing = true;
  Eigen::Index spca_m = 50;
  double mcp_lambda = 1.0;
  double mcp_gamma = 2.0;

  void validate() const;
};

struct RunRecord {
  ProblemKind problem = ProblemKind::Spca;
  Eigen::Index n = 0, r = 0;
  double mu = 0.0;
  int instance = 0;
  SolverKind solver = SolverKind::Manpg;
  double cpu_s = 0.0;
  long iters = 0;
  double F = 0.0;
  double sparsity = 0.0;
  double dist2 = 0.0;  // squared subspace distance to the ManPG solution
  std::string agreement = "same";  // same | different | failed
  long linesearch = 0;
  double ssn_mean = 0.0;
};

// Runs the full sweep: per instance a seeded random point is projected onto
// the manifold, refined by the subgradient warm start, then handed to every
// solver; ManPG runs first and anchors the objective-target stops and the
// agreement classification. Solver aborts become `failed` records.
std::vector<RunRecord> run_experiment(const ExperimentSpec& spec);

// Writes <prefix>_raw.csv and <prefix>_agg.csv. Aggregate means are taken
// over agreement == "same" records only.
void emit_csv(const std::vector<RunRecord>& records, const std::string& prefix);

std::vector<RunRecord> parse_raw_csv(const std::string& path);

}  // namespace manpg

#endif  // MANPG_BENCH_HPP
