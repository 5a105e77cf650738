#include "manpg/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "manpg/soc.hpp"

namespace manpg {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t grid_index,
                          std::uint64_t instance, std::uint64_t stream) {
  return splitmix64(splitmix64(splitmix64(base) ^ grid_index) ^ (instance << 8) ^ stream);
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

struct SolverOutcome {
  StiefelPoint X;
  double F = 0.0;
  long iters = 0;
  long linesearch = 0;
  double ssn_mean = 0.0;
  double seconds = 0.0;
};

}  // namespace

std::string to_string(ProblemKind k) {
  switch (k) {
    case ProblemKind::Spca: return "spca";
    case ProblemKind::Cm: return "cm";
    case ProblemKind::McpSpca: return "mcp-spca";
  }
  return "?";
}

std::string to_string(SolverKind k) {
  switch (k) {
    case SolverKind::Manpg: return "manpg";
    case SolverKind::ManpgAda: return "manpg-ada";
    case SolverKind::Soc: return "soc";
    case SolverKind::Subgrad: return "subgrad";
  }
  return "?";
}

ProblemKind parse_problem_kind(const std::string& s) {
  if (s == "spca") return ProblemKind::Spca;
  if (s == "cm") return ProblemKind::Cm;
  if (s == "mcp-spca") return ProblemKind::McpSpca;
  throw std::invalid_argument("unknown problem kind: " + s);
}

SolverKind parse_solver_kind(const std::string& s) {
  if (s == "manpg") return SolverKind::Manpg;
  if (s == "manpg-ada") return SolverKind::ManpgAda;
  if (s == "soc") return SolverKind::Soc;
  if (s == "subgrad") return SolverKind::Subgrad;
  throw std::invalid_argument("unknown solver kind: " + s);
}

void ExperimentSpec::validate() const {
  if (ns.empty() || rs.empty() || mus.empty())
    throw std::invalid_argument("ExperimentSpec: grids must be non-empty");
  if (instances < 1) throw std::invalid_argument("ExperimentSpec: instances >= 1");
  if (solvers.empty()) throw std::invalid_argument("ExperimentSpec: no solvers requested");
}

std::vector<RunRecord> run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  std::vector<RunRecord> records;

  std::uint64_t grid_index = 0;
  for (Eigen::Index n : spec.ns)
    for (Eigen::Index r : spec.rs)
      for (double mu : spec.mus) {
        ++grid_index;
        for (int inst = 0; inst < spec.instances; ++inst) {
          std::unique_ptr<ProblemOracle> oracle;
          std::unique_ptr<SocCmSolver> soc_cm;
          std::unique_ptr<SocSpcaSolver> soc_spca;
          switch (spec.problem) {
            case ProblemKind::Spca: {
              SpcaProblem p = gen_spca(spec.spca_m, n,
                                       derive_seed(spec.seed_base, grid_index, inst, 1), mu);
              oracle = make_oracle(p);
              if (std::find(spec.solvers.begin(), spec.solvers.end(), SolverKind::Soc) !=
                  spec.solvers.end())
                soc_spca = std::make_unique<SocSpcaSolver>(p.A, mu);
              break;
            }
            case ProblemKind::Cm: {
              CmProblem p = build_fe_hamiltonian(n, mu);
              oracle = make_oracle(p);
              if (std::find(spec.solvers.begin(), spec.solvers.end(), SolverKind::Soc) !=
                  spec.solvers.end()) {
                double beta = static_cast<double>(n) * static_cast<double>(r) * mu / 25.0 + 1.0;
                soc_cm = std::make_unique<SocCmSolver>(p.H, mu, beta);
              }
              break;
            }
            case ProblemKind::McpSpca: {
              SpcaProblem base = gen_spca(spec.spca_m, n,
                                          derive_seed(spec.seed_base, grid_index, inst, 1), mu);
              McpSpcaProblem p;
              p.A = base.A;
              p.mu = mu;
              p.lambda = spec.mcp_lambda;
              p.gamma = spec.mcp_gamma;
              p.sigma2_max = base.sigma2_max;
              oracle = make_oracle(p);
              break;
            }
          }

          Rng x_rng(derive_seed(spec.seed_base, grid_index, inst, 2));
          StiefelPoint X_init = riemannian_subgradient(
              *oracle, random_stiefel(n, r, x_rng), spec.subgrad_warmup);

          SolverConfig cfg;
          cfg.max_iter = spec.max_iter;
          cfg.eps_scale = spec.eps_scale;
          cfg.retraction = spec.retraction;

          // ManPG runs first so its objective anchors the other stops.
          bool have_anchor = false;
          StiefelPoint X_anchor = X_init;
          double F_anchor = 0.0;
          std::vector<SolverKind> order = spec.solvers;
          std::stable_partition(order.begin(), order.end(),
                                [](SolverKind s) { return s == SolverKind::Manpg; });

          for (SolverKind sk : order) {
            RunRecord rec;
            rec.problem = spec.problem;
            rec.n = n;
            rec.r = r;
            rec.mu = mu;
            rec.instance = inst;
            rec.solver = sk;
            try {
              SolverOutcome oc{X_init};
              auto t0 = std::chrono::steady_clock::now();
              switch (sk) {
                case SolverKind::Manpg: {
                  SolverResult res = manpg(*oracle, X_init, cfg);
                  oc = SolverOutcome{res.X, res.F, res.iterations, res.total_backtracks,
                                     res.mean_ssn_iters, 0.0};
                  break;
                }
                case SolverKind::ManpgAda: {
                  SolverConfig acfg = cfg;
                  if (have_anchor) acfg.f_target = F_anchor;
                  SolverResult res = manpg_ada(*oracle, X_init, acfg);
                  oc = SolverOutcome{res.X, res.F, res.iterations, res.total_backtracks,
                                     res.mean_ssn_iters, 0.0};
                  break;
                }
                case SolverKind::Soc: {
                  double tgt = have_anchor ? F_anchor
                                           : std::numeric_limits<double>::quiet_NaN();
                  SocResult res =
                      soc_cm ? soc_run(*soc_cm, X_init, tgt, spec.max_iter)
                             : (soc_spca ? soc_run(*soc_spca, X_init, tgt, spec.max_iter)
                                         : throw std::runtime_error(
                                               "SOC is not available for this problem"));
                  oc = SolverOutcome{res.X, res.F, res.iterations, 0, 0.0, 0.0};
                  break;
                }
                case SolverKind::Subgrad: {
                  StiefelPoint X = X_init;
                  long k = 0;
                  for (; k < spec.max_iter; ++k) {
                    Eigen::MatrixXd sg = oracle->euclidean_subgradient(X.matrix());
                    TangentVector dir = tangent_project(X, sg);
                    double step = 1.0 / std::pow(static_cast<double>(k + 1), 0.75);
                    X = retract(X, -step * dir.data, RetractionKind::Polar);
                    if (have_anchor && oracle->eval_F(X.matrix()) <= F_anchor + 1e-3) {
                      ++k;
                      break;
                    }
                  }
                  oc = SolverOutcome{X, oracle->eval_F(X.matrix()), k, 0, 0.0, 0.0};
                  break;
                }
              }
              oc.seconds = elapsed(t0);

              rec.cpu_s = spec.record_timing ? oc.seconds : 0.0;
              rec.iters = oc.iters;
              rec.F = oc.F;
              rec.sparsity = sparsity(oc.X.matrix());
              rec.linesearch = oc.linesearch;
              rec.ssn_mean = oc.ssn_mean;
              if (sk == SolverKind::Manpg) {
                have_anchor = true;
                X_anchor = oc.X;
                F_anchor = oc.F;
                rec.dist2 = 0.0;
                rec.agreement = "same";
              } else if (have_anchor) {
                double d = subspace_distance(X_anchor, oc.X);
                rec.dist2 = d * d;
                rec.agreement = rec.dist2 <= 0.1 ? "same" : "different";
              } else {
                rec.dist2 = 0.0;
                rec.agreement = "same";
              }
            } catch (const std::exception&) {
              rec.agreement = "failed";
              rec.cpu_s = 0.0;
              rec.F = std::numeric_limits<double>::quiet_NaN();
              rec.sparsity = std::numeric_limits<double>::quiet_NaN();
              rec.dist2 = std::numeric_limits<double>::quiet_NaN();
            }
            records.push_back(std::move(rec));
          }
        }
      }

  std::sort(records.begin(), records.end(), [](const RunRecord& a, const RunRecord& b) {
    auto key = [](const RunRecord& x) {
      return std::make_tuple(static_cast<int>(x.problem), x.n, x.r, x.mu, x.instance,
                             static_cast<int>(x.solver));
    };
    return key(a) < key(b);
  });
  return records;
}

void emit_csv(const std::vector<RunRecord>& records, const std::string& prefix) {
  if (records.empty()) throw std::invalid_argument("emit_csv: no records");

  const std::string raw_path = prefix + "_raw.csv";
  std::ofstream raw(raw_path);
  if (!raw) throw std::runtime_error("emit_csv: cannot open " + raw_path);
  raw << "problem,n,r,mu,instance,solver,cpu_s,iters,F,sparsity,dist2,agreement,"
         "linesearch,ssn_mean\n";
  for (const RunRecord& r : records) {
    raw << to_string(r.problem) << ',' << r.n << ',' << r.r << ',' << fmt(r.mu) << ','
        << r.instance << ',' << to_string(r.solver) << ',' << fmt(r.cpu_s) << ',' << r.iters
        << ',' << fmt(r.F) << ',' << fmt(r.sparsity) << ',' << fmt(r.dist2) << ','
        << r.agreement << ',' << r.linesearch << ',' << fmt(r.ssn_mean) << '\n';
  }
  if (!raw) throw std::runtime_error("emit_csv: write failed for " + raw_path);

  struct Agg {
    long same = 0, different = 0, failed = 0;
    double cpu = 0, iters = 0, F = 0, sp = 0, d2 = 0, ls = 0, ssn = 0;
  };
  std::map<std::tuple<int, Eigen::Index, Eigen::Index, double, int>, Agg> groups;
  for (const RunRecord& r : records) {
    Agg& a = groups[{static_cast<int>(r.problem), r.n, r.r, r.mu,
                     static_cast<int>(r.solver)}];
    if (r.agreement == "same") {
      ++a.same;
      a.cpu += r.cpu_s;
      a.iters += static_cast<double>(r.iters);
      a.F += r.F;
      a.sp += r.sparsity;
      a.d2 += r.dist2;
      a.ls += static_cast<double>(r.linesearch);
      a.ssn += r.ssn_mean;
    } else if (r.agreement == "different") {
      ++a.different;
    } else {
      ++a.failed;
    }
  }

  const std::string agg_path = prefix + "_agg.csv";
  std::ofstream agg(agg_path);
  if (!agg) throw std::runtime_error("emit_csv: cannot open " + agg_path);
  agg << "problem,n,r,mu,solver,count_same,count_different,count_failed,cpu_s,iters,F,"
         "sparsity,dist2,linesearch,ssn_mean\n";
  for (const auto& [key, a] : groups) {
    double m = a.same > 0 ? static_cast<double>(a.same) : 1.0;
    agg << to_string(static_cast<ProblemKind>(std::get<0>(key))) << ',' << std::get<1>(key)
        << ',' << std::get<2>(key) << ',' << fmt(std::get<3>(key)) << ','
        << to_string(static_cast<SolverKind>(std::get<4>(key))) << ',' << a.same << ','
        << a.different << ',' << a.failed << ',' << fmt(a.cpu / m) << ',' << fmt(a.iters / m)
        << ',' << fmt(a.F / m) << ',' << fmt(a.sp / m) << ',' << fmt(a.d2 / m) << ','
        << fmt(a.ls / m) << ',' << fmt(a.ssn / m) << '\n';
  }
  if (!agg) throw std::runtime_error("emit_csv: write failed for " + agg_path);
}

std::vector<RunRecord> parse_raw_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("parse_raw_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("parse_raw_csv: empty file");
  std::vector<RunRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    RunRecord r;
    auto next = [&]() {
      if (!std::getline(ls, cell, ',')) throw std::runtime_error("parse_raw_csv: short row");
      return cell;
    };
    r.problem = parse_problem_kind(next());
    r.n = std::stol(next());
    r.r = std::stol(next());
    r.mu = std::stod(next());
    r.instance = std::stoi(next());
    r.solver = parse_solver_kind(next());
    r.cpu_s = std::stod(next());
    r.iters = std::stol(next());
    r.F = std::stod(next());
    r.sparsity = std::stod(next());
    r.dist2 = std::stod(next());
    r.agreement = next();
    r.linesearch = std::stol(next());
    r.ssn_mean = std::stod(next());
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace manpg
