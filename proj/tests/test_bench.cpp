#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "manpg/bench.hpp"

using namespace manpg;

namespace {

ExperimentSpec small_spec() {
  ExperimentSpec spec;
  spec.problem = ProblemKind::Spca;
  spec.ns = {12};
  spec.rs = {2};
  spec.mus = {0.5};
  spec.instances = 2;
  spec.solvers = {SolverKind::Manpg, SolverKind::ManpgAda, SolverKind::Soc};
  spec.seed_base = 7;
  spec.subgrad_warmup = 50;
  spec.max_iter = 5000;
  spec.spca_m = 20;
  spec.record_timing = false;
  return spec;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

long count_lines(const std::string& text) {
  long n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

}  // namespace

TEST_CASE("kind names round trip and bad names throw") {
  for (ProblemKind k : {ProblemKind::Spca, ProblemKind::Cm, ProblemKind::McpSpca})
    CHECK(parse_problem_kind(to_string(k)) == k);
  for (SolverKind k :
       {SolverKind::Manpg, SolverKind::ManpgAda, SolverKind::Soc, SolverKind::Subgrad})
    CHECK(parse_solver_kind(to_string(k)) == k);
  CHECK_THROWS_AS(parse_problem_kind("nope"), std::invalid_argument);
  CHECK_THROWS_AS(parse_solver_kind("nope"), std::invalid_argument);
}

TEST_CASE("spec validation") {
  ExperimentSpec spec = small_spec();
  CHECK_NOTHROW(spec.validate());
  spec.ns.clear();
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec = small_spec();
  spec.instances = 0;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec = small_spec();
  spec.solvers.clear();
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

TEST_CASE("single manpg instance produces one self-agreeing record") {
  ExperimentSpec spec = small_spec();
  spec.instances = 1;
  spec.solvers = {SolverKind::Manpg};
  std::vector<RunRecord> records = run_experiment(spec);
  REQUIRE(records.size() == 1);
  CHECK(records[0].agreement == "same");
  CHECK(records[0].dist2 == 0.0);
  CHECK(records[0].solver == SolverKind::Manpg);
  CHECK(records[0].iters >= 0);
}

TEST_CASE("full small sweep: ordering, agreement, csv round trip") {
  ExperimentSpec spec = small_spec();
  std::vector<RunRecord> records = run_experiment(spec);
  REQUIRE(records.size() == 6);  // 2 instances x 3 solvers

  // sorted by (instance, solver) within the single grid point
  for (size_t i = 1; i < records.size(); ++i) {
    auto key = [](const RunRecord& r) {
      return std::make_pair(r.instance, static_cast<int>(r.solver));
    };
    CHECK(key(records[i - 1]) < key(records[i]));
  }
  for (const RunRecord& r : records) {
    CHECK(r.agreement != "failed");
    if (r.solver == SolverKind::Manpg) CHECK(r.dist2 == 0.0);
  }

  emit_csv(records, "tmp_bench_sweep");
  std::vector<RunRecord> back = parse_raw_csv("tmp_bench_sweep_raw.csv");
  REQUIRE(back.size() == records.size());
  for (size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].solver == records[i].solver);
    CHECK(back[i].instance == records[i].instance);
    CHECK(back[i].agreement == records[i].agreement);
    CHECK(back[i].F == doctest::Approx(records[i].F).epsilon(1e-11));
    CHECK(back[i].iters == records[i].iters);
  }

  // one aggregate row per solver at the single grid point
  std::string agg = slurp("tmp_bench_sweep_agg.csv");
  CHECK(count_lines(agg) == 1 + 3);
  std::remove("tmp_bench_sweep_raw.csv");
  std::remove("tmp_bench_sweep_agg.csv");
}

TEST_CASE("emit_csv single record and failed-row filtering") {
  RunRecord ok;
  ok.problem = ProblemKind::Cm;
  ok.n = 8;
  ok.r = 2;
  ok.mu = 0.1;
  ok.instance = 0;
  ok.solver = SolverKind::Manpg;
  ok.F = -1.25;
  ok.iters = 10;

  emit_csv({ok}, "tmp_bench_single");
  CHECK(count_lines(slurp("tmp_bench_single_raw.csv")) == 2);
  CHECK(count_lines(slurp("tmp_bench_single_agg.csv")) == 2);
  std::remove("tmp_bench_single_raw.csv");
  std::remove("tmp_bench_single_agg.csv");

  RunRecord bad = ok;
  bad.instance = 1;
  bad.agreement = "failed";
  bad.F = std::numeric_limits<double>::quiet_NaN();
  emit_csv({ok, bad}, "tmp_bench_failed");
  std::string agg = slurp("tmp_bench_failed_agg.csv");
  std::remove("tmp_bench_failed_raw.csv");
  std::remove("tmp_bench_failed_agg.csv");

  // the aggregate F mean must come from the good row only (no NaN leakage)
  std::istringstream ss(agg);
  std::string header, row;
  REQUIRE(std::getline(ss, header));
  REQUIRE(std::getline(ss, row));
  CHECK(row.find("nan") == std::string::npos);
  CHECK(row.find(",1,0,1,") != std::string::npos);  // same=1, different=0, failed=1
}

TEST_CASE("identical spec and seed give byte-identical csv") {
  ExperimentSpec spec = small_spec();
  spec.solvers = {SolverKind::Manpg, SolverKind::ManpgAda};
  emit_csv(run_experiment(spec), "tmp_bench_det_a");
  emit_csv(run_experiment(spec), "tmp_bench_det_b");
  CHECK(slurp("tmp_bench_det_a_raw.csv") == slurp("tmp_bench_det_b_raw.csv"));
  CHECK(slurp("tmp_bench_det_a_agg.csv") == slurp("tmp_bench_det_b_agg.csv"));
  for (const char* p : {"tmp_bench_det_a_raw.csv", "tmp_bench_det_a_agg.csv",
                        "tmp_bench_det_b_raw.csv", "tmp_bench_det_b_agg.csv"})
    std::remove(p);
}

TEST_CASE("multi-n grid emits one aggregate row per grid point and solver") {
  ExperimentSpec spec = small_spec();
  spec.ns = {8, 12};
  spec.instances = 1;
  spec.solvers = {SolverKind::Manpg};
  emit_csv(run_experiment(spec), "tmp_bench_grid");
  CHECK(count_lines(slurp("tmp_bench_grid_agg.csv")) == 1 + 2);
  std::remove("tmp_bench_grid_raw.csv");
  std::remove("tmp_bench_grid_agg.csv");
}
