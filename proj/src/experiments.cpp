#include "gsvd/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <limits>
#include <sstream>
#include <thread>

#include "gsvd/analysis.hpp"
#include "gsvd/matrix_market.hpp"
#include "gsvd/operators.hpp"
#include "gsvd/rand_gsvd.hpp"
#include "gsvd/reference.hpp"
#include "gsvd/sampling.hpp"

namespace gsvd {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

bool looks_like_path(const std::string& text) {
  return text.find('/') != std::string::npos || text.ends_with(".mtx") ||
         text.ends_with(".mm");
}

}  // namespace

Experiment experiment_from_name(const std::string& name) {
  if (name == "accuracy_vs_k") return Experiment::accuracy_vs_k;
  if (name == "method_comparison") return Experiment::method_comparison;
  if (name == "sv_and_angles") return Experiment::sv_and_angles;
  if (name == "condition_sweep") return Experiment::condition_sweep;
  if (name == "preconditioner") return Experiment::preconditioner;
  if (name == "inexactness") return Experiment::inexactness;
  if (name == "bounds_audit") return Experiment::bounds_audit;
  if (name == "sensitivity") return Experiment::sensitivity;
  throw UsageError("unknown experiment '" + name + "'");
}

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::accuracy_vs_k: return "accuracy_vs_k";
    case Experiment::method_comparison: return "method_comparison";
    case Experiment::sv_and_angles: return "sv_and_angles";
    case Experiment::condition_sweep: return "condition_sweep";
    case Experiment::preconditioner: return "preconditioner";
    case Experiment::inexactness: return "inexactness";
    case Experiment::bounds_audit: return "bounds_audit";
    case Experiment::sensitivity: return "sensitivity";
  }
  return "?";
}

MatrixSource MatrixSource::parse(const std::string& text, Index n, Index r,
                                 std::uint64_t seed) {
  MatrixSource src;
  if (looks_like_path(text)) {
    src.file = text;
    return src;
  }
  TestMatrixSpec spec;
  spec.kind = test_matrix_kind_from_name(text);  // throws on unknown names
  spec.n = n;
  spec.r = r;
  spec.seed = seed;
  src.gen = spec;
  return src;
}

DenseMatrix MatrixSource::load() const {
  if (!file.empty()) return read_matrix_market(file);
  if (!gen) throw UsageError("matrix: no source given");
  return make_test_matrix(*gen);
}

std::string MatrixSource::describe() const {
  if (!file.empty()) return "file:" + file;
  std::ostringstream os;
  os << to_string(gen->kind) << "(n=" << gen->n << ";r=" << gen->r
     << ";seed=" << gen->seed << ")";
  return os.str();
}

WeightSource WeightSource::parse(const std::string& text) {
  WeightSource w;
  if (text == "identity") {
    w.kind = Kind::identity;
  } else if (text == "minij") {
    w.kind = Kind::minij;
  } else if (text.starts_with("randsvd")) {
    w.kind = Kind::randsvd;
    const auto first = text.find(':');
    if (first != std::string::npos) {
      const auto second = text.find(':', first + 1);
      w.kappa = std::stod(text.substr(first + 1, second - first - 1));
      if (second != std::string::npos) w.seed = std::stoull(text.substr(second + 1));
    }
  } else if (looks_like_path(text)) {
    w.kind = Kind::file;
    w.file = text;
  } else {
    throw UsageError("unknown weight spec '" + text + "'");
  }
  return w;
}

DenseMatrix WeightSource::load(Index n) const {
  switch (kind) {
    case Kind::identity: return DenseMatrix::identity(n);
    case Kind::minij: return make_minij(n);
    case Kind::randsvd: return make_randsvd_spd(n, kappa, SpectrumMode::log_uniform, seed);
    case Kind::file: {
      DenseMatrix W = read_matrix_market(file);
      if (W.rows() != n || W.cols() != n) {
        throw UsageError("weight file '" + file + "' is " + std::to_string(W.rows()) +
                         "x" + std::to_string(W.cols()) + ", expected " +
                         std::to_string(n));
      }
      return W;
    }
  }
  throw std::logic_error("WeightSource::load: unreachable");
}

std::string WeightSource::describe() const {
  switch (kind) {
    case Kind::identity: return "identity";
    case Kind::minij: return "minij";
    case Kind::randsvd: {
      std::ostringstream os;
      os << "randsvd(kappa=" << kappa << ";seed=" << seed << ")";
      return os.str();
    }
    case Kind::file: return "file:" + file;
  }
  return "?";
}

void ExperimentConfig::finalize_and_validate() {
  if (k_grid.empty()) {
    switch (experiment) {
      case Experiment::accuracy_vs_k:
        for (Index k = 5; k <= 60; k += 5) k_grid.push_back(k);
        break;
      case Experiment::method_comparison:
      case Experiment::sv_and_angles: k_grid = {50}; break;
      case Experiment::condition_sweep:
      case Experiment::preconditioner: k_grid = {30, 50}; break;
      case Experiment::inexactness:
      case Experiment::sensitivity: k_grid = {30}; break;
      case Experiment::bounds_audit: k_grid = {10, 30, 50}; break;
    }
  }
  if (q_list.empty()) {
    switch (experiment) {
      case Experiment::preconditioner: q_list = {0}; break;
      case Experiment::inexactness:
      case Experiment::sensitivity: q_list = {1}; break;
      case Experiment::bounds_audit: q_list = {0, 1, 2}; break;
      default: q_list = {0, 1}; break;
    }
  }
  if (seeds.empty()) {
    for (std::uint64_t s = 1; s <= 10; ++s) seeds.push_back(s);
  }

  if (p < 0) throw UsageError("p must be >= 0");
  for (Index k : k_grid) {
    if (k < 1) throw UsageError("k-grid entries must be >= 1");
  }
  for (Index q : q_list) {
    if (q < 0) throw UsageError("q-list entries must be >= 0");
  }
  if (!(delta > 0.0 && delta < 1.0)) throw UsageError("delta must lie in (0,1)");
  if (experiment == Experiment::condition_sweep && kappa_grid.empty()) {
    throw UsageError("condition_sweep needs a nonempty kappa grid");
  }
  if (experiment == Experiment::preconditioner && precond != "exact" &&
      precond != "jacobi") {
    throw UsageError("precond must be 'exact' or 'jacobi'");
  }
  for (double t : rel_tols) {
    if (t < 0) throw UsageError("rel-tol entries must be >= 0");
  }
}

namespace {

enum class Method { gsvd, geneig, twosided };

std::string method_name(Method m, Index q) {
  switch (m) {
    case Method::gsvd: return "gsvd-q" + std::to_string(q);
    case Method::geneig: return "geneig";
    case Method::twosided: return "twosided";
  }
  return "?";
}

using Cell = ResultTable::Cell;
using Row = std::vector<Cell>;

// One fully-loaded problem instance: matrices, oracle, norms.
struct Problem {
  DenseMatrix A, S, T;
  ExactGsvd truth;
  double normA = 0;
  double kappaT = 1;
};

double spd_condition_number(const Matrix& W) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (W + W.transpose()));
  return es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff();
}

Problem make_problem(DenseMatrix A, DenseMatrix S, DenseMatrix T) {
  Problem pb;
  pb.truth = exact_gsvd(A, S, T);
  pb.normA = weighted_op_norm(A, S, T);
  pb.kappaT = spd_condition_number(T.eigen());
  pb.A = std::move(A);
  pb.S = std::move(S);
  pb.T = std::move(T);
  return pb;
}

GsvdFactors truncated_copy(const GsvdFactors& f, Index k) {
  if (k >= f.rank()) return f;
  GsvdFactors out;
  out.U = DenseMatrix(Matrix(f.U.eigen().leftCols(k)));
  out.V = DenseMatrix(Matrix(f.V.eigen().leftCols(k)));
  out.sigma = f.sigma.head(k).eval();
  return out;
}

double factors_error(const Problem& pb, const GsvdFactors& f) {
  const Matrix Ahat =
      f.U.eigen() * f.sigma.asDiagonal() * f.V.eigen().transpose() * pb.T.eigen();
  return weighted_op_norm(DenseMatrix(Matrix(pb.A.eigen() - Ahat)), pb.S, pb.T);
}

struct RunResult {
  double rel_error = kNaN, abs_error = kNaN, best_possible = kNaN, sigma_kp1 = kNaN;
  double proj_abs_error = kNaN;
  double omega = kNaN, sigma_weighted = kNaN;
  double gapdep_rhs = kNaN, gapdep_loose_rhs = kNaN, gapindep_rhs = kNaN;
  double prob_gapdep_rhs = kNaN, prob_gapindep_rhs = kNaN;
  MatvecCounts observed, expected;
  bool counts_match = false;
  int holds_gapdep = 1, holds_gapindep = 1, holds_prob_gapdep = 1,
      holds_prob_gapindep = 1;
  GsvdFactors factors;  // truncated to k
  double wall_ms = kNaN;
};

// Runs one (method, k, q, seed) cell: the driver on counted operators, the
// truncated-error metrics against the oracle, and for the subspace-iteration
// route the realized per-sample and a-priori bound right-hand sides.
RunResult execute_cell(const Problem& pb, Method method, Index k, Index p, Index q,
                       const SamplerSpec& sampler, double delta, double kappa_eff,
                       bool want_bounds) {
  const auto t0 = std::chrono::steady_clock::now();
  RunResult out;

  DenseOp A(pb.A);
  SpdDenseOp S(pb.S), T(pb.T);
  SketchConfig scfg;
  scfg.k = k;
  scfg.p = p;
  scfg.q = q;
  scfg.sampler = sampler;

  GsvdFactors full;
  GsvdRoute route = GsvdRoute::direct;
  switch (method) {
    case Method::gsvd:
      scfg.truncate = false;  // keep the full basis for the projection error
      full = rand_gsvd(A, S, T, scfg);
      break;
    case Method::geneig:
      route = GsvdRoute::gheig;
      full = gheig_gsvd(A, S, T, scfg);
      break;
    case Method::twosided:
      route = GsvdRoute::two_sided;
      full = two_sided_gsvd(A, S, T, scfg);
      break;
  }

  out.observed = observed_matvec_counts(A, S, T);
  out.expected = expected_matvec_counts(route, scfg.ell(), q, full.rank());
  out.counts_match = out.observed == out.expected;

  out.factors = truncated_copy(full, k);
  out.abs_error = factors_error(pb, out.factors);
  out.rel_error = out.abs_error / pb.normA;
  const Index nsv = pb.truth.sigma.size();
  out.sigma_kp1 = k < nsv ? pb.truth.sigma(k) : 0.0;
  out.best_possible = out.sigma_kp1 / pb.truth.sigma(0);

  if (method == Method::gsvd && want_bounds) {
    // exact arithmetic makes the untruncated reconstruction equal Q Q^T S A,
    // the quantity the range-finder bounds control
    out.proj_abs_error = factors_error(pb, full);
    BoundInputs in;
    in.k = k;
    in.p = p;
    in.q = q;
    in.delta = delta;
    in.n = pb.A.cols();
    in.sigma = pb.truth.sigma;
    in.kappa_T = kappa_eff;
    try {
      const DenseMatrix Omega = draw(sampler, pb.A.cols(), scfg.ell());
      SpdDenseOp Tlocal(pb.T);
      const InteractionTerms terms = omega_interaction_terms(Omega, Tlocal, pb.truth, k);
      out.omega = terms.omega;
      out.sigma_weighted = terms.sigma_weighted;
      in.omega_interaction = terms.omega;
      in.sigma_weighted_interaction = terms.sigma_weighted;
    } catch (const RankAssumptionError&) {
      // keep the probabilistic sides; per-sample columns stay NaN
    }
    const BoundReport rep =
        bound_check(in, out.proj_abs_error, 1e-9 * pb.truth.sigma(0));
    if (rep.gap_dep_rhs) out.gapdep_rhs = *rep.gap_dep_rhs;
    if (rep.gap_dep_rhs_loose) out.gapdep_loose_rhs = *rep.gap_dep_rhs_loose;
    if (rep.gap_indep_rhs) out.gapindep_rhs = *rep.gap_indep_rhs;
    if (rep.prob_gap_dep_rhs) out.prob_gapdep_rhs = *rep.prob_gap_dep_rhs;
    if (rep.prob_gap_indep_rhs) out.prob_gapindep_rhs = *rep.prob_gap_indep_rhs;
    out.holds_gapdep = rep.gap_dep_holds ? 1 : 0;
    out.holds_gapindep = rep.gap_indep_holds ? 1 : 0;
    out.holds_prob_gapdep = rep.prob_gap_dep_holds ? 1 : 0;
    out.holds_prob_gapindep = rep.prob_gap_indep_holds ? 1 : 0;
  }

  out.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  return out;
}

// Deterministic parallel map: job i's result lands at slot i regardless of
// the worker that ran it.
template <typename Job>
void run_jobs(const std::vector<Job>& jobs, bool serial,
              const std::function<void(const Job&, std::size_t)>& work) {
  if (serial || jobs.size() <= 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) work(jobs[i], i);
    return;
  }
  const unsigned workers =
      std::min<unsigned>(std::max(1u, std::thread::hardware_concurrency()),
                         static_cast<unsigned>(jobs.size()));
  std::vector<std::future<void>> futures;
  futures.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    futures.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < jobs.size(); i += workers) work(jobs[i], i);
    }));
  }
  for (auto& f : futures) f.get();
}

struct TableBuilder {
  const ExperimentConfig& cfg;
  ResultTable table;
  std::string matrix_desc, ws_desc, wt_desc;

  explicit TableBuilder(const ExperimentConfig& c) : cfg(c) {
    matrix_desc = c.matrix.describe();
    ws_desc = c.weight_s.describe();
    wt_desc = c.weight_t.describe();
  }

  void set_columns(std::vector<std::string> value_columns) {
    table.columns = {"experiment", "matrix", "n",    "weight_s", "weight_t",
                     "sampler",    "rng",    "method", "k",       "p",
                     "q",          "seed",   "delta"};
    for (auto& c : value_columns) table.columns.push_back(std::move(c));
    if (cfg.timing) table.columns.push_back("wall_ms");
  }

  Row prefix(Index n, const std::string& sampler, const std::string& method, Index k,
             Index q, std::uint64_t seed) const {
    return Row{to_string(cfg.experiment),
               matrix_desc,
               std::int64_t(n),
               ws_desc,
               wt_desc,
               sampler,
               std::string(rng::kName),
               method,
               std::int64_t(k),
               std::int64_t(cfg.p),
               std::int64_t(q),
               std::int64_t(seed),
               cfg.delta};
  }

  void push(Row row, double wall_ms) {
    if (cfg.timing) row.push_back(wall_ms);
    table.rows.push_back(std::move(row));
  }
};

const std::vector<std::string> kErrorColumns = {
    "kappa_t",        "kappa_eff",        "rel_error",      "abs_error",
    "best_possible",  "sigma_kp1",        "proj_abs_error", "omega",
    "sigma_weighted", "gapdep_rhs",       "gapdep_loose_rhs", "gapindep_rhs",
    "prob_gapdep_rhs", "prob_gapindep_rhs", "holds_gapdep",  "holds_gapindep",
    "holds_prob_gapdep", "holds_prob_gapindep", "mv_a",      "mv_at",
    "mv_s",           "mv_s_solve",       "mv_t",           "mv_t_solve",
    "exp_a",          "exp_at",           "exp_s",          "exp_s_solve",
    "exp_t",          "exp_t_solve",      "counts_match"};

void append_error_cells(Row& row, const RunResult& r, double kappa_t,
                        double kappa_eff) {
  row.insert(row.end(),
             {kappa_t,
              kappa_eff,
              r.rel_error,
              r.abs_error,
              r.best_possible,
              r.sigma_kp1,
              r.proj_abs_error,
              r.omega,
              r.sigma_weighted,
              r.gapdep_rhs,
              r.gapdep_loose_rhs,
              r.gapindep_rhs,
              r.prob_gapdep_rhs,
              r.prob_gapindep_rhs,
              std::int64_t(r.holds_gapdep),
              std::int64_t(r.holds_gapindep),
              std::int64_t(r.holds_prob_gapdep),
              std::int64_t(r.holds_prob_gapindep),
              std::int64_t(r.observed.a),
              std::int64_t(r.observed.at),
              std::int64_t(r.observed.s_apply),
              std::int64_t(r.observed.s_solve),
              std::int64_t(r.observed.t_apply),
              std::int64_t(r.observed.t_solve),
              std::int64_t(r.expected.a),
              std::int64_t(r.expected.at),
              std::int64_t(r.expected.s_apply),
              std::int64_t(r.expected.s_solve),
              std::int64_t(r.expected.t_apply),
              std::int64_t(r.expected.t_solve),
              std::int64_t(r.counts_match ? 1 : 0)});
}

struct Job {
  Method method = Method::gsvd;
  Index k = 1;
  Index q = 0;
  std::uint64_t seed = 0;
  double kappa = 0;     // condition_sweep
  double rel_tol = 0;   // inexactness
  bool preconditioned = false;
};

// accuracy_vs_k, method_comparison, condition-free error tables
void run_error_experiment(TableBuilder& tb, const Problem& pb,
                          const std::vector<Method>& methods,
                          const std::vector<Index>& qs_for_gsvd) {
  const ExperimentConfig& cfg = tb.cfg;

  std::vector<Job> jobs;
  for (Index k : cfg.k_grid) {
    for (Method m : methods) {
      const std::vector<Index> qs =
          (m == Method::gsvd) ? qs_for_gsvd : std::vector<Index>{0};
      for (Index q : qs) {
        for (std::uint64_t seed : cfg.seeds) {
          jobs.push_back({m, k, q, seed, 0, 0, false});
        }
      }
    }
  }

  std::vector<RunResult> results(jobs.size());
  run_jobs<Job>(jobs, cfg.serial, [&](const Job& job, std::size_t i) {
    SamplerSpec sampler;
    sampler.seed = job.seed;
    results[i] = execute_cell(pb, job.method, job.k, cfg.p, job.q, sampler, cfg.delta,
                              pb.kappaT, true);
  });

  tb.set_columns(kErrorColumns);
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const Job& job = jobs[i];
    const RunResult& r = results[i];
    Row row = tb.prefix(pb.A.cols(), "gaussian", method_name(job.method, job.q), job.k,
                        job.q, job.seed);
    append_error_cells(row, r, pb.kappaT, pb.kappaT);
    tb.push(std::move(row), r.wall_ms);
  }
}

// Largest disagreement between the two oracle transform paths (Cholesky
// factors vs eigendecomposition square roots), relative to sigma_1. At the
// extreme end of the kappa grid this is the attainable ground-truth floor.
double oracle_two_path_floor(const Problem& pb) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(pb.S.eigen()), et(pb.T.eigen());
  const Matrix B = es.operatorSqrt() * pb.A.eigen() * et.operatorInverseSqrt();
  const Vector s2 = Eigen::BDCSVD<Matrix>(B).singularValues();
  return (pb.truth.sigma - s2).cwiseAbs().maxCoeff() / pb.truth.sigma(0);
}

void run_condition_sweep(TableBuilder& tb, const ExperimentConfig& cfg,
                         const DenseMatrix& A, const DenseMatrix& S) {
  tb.set_columns(kErrorColumns);
  std::vector<double> floors;
  for (double kappa : cfg.kappa_grid) {
    WeightSource wt = cfg.weight_t;
    wt.kind = WeightSource::Kind::randsvd;
    wt.kappa = kappa;
    const Problem pb = make_problem(A, S, wt.load(A.cols()));
    floors.push_back(oracle_two_path_floor(pb));

    std::vector<Job> jobs;
    for (Index k : cfg.k_grid) {
      for (Index q : cfg.q_list) {
        for (std::uint64_t seed : cfg.seeds) jobs.push_back({Method::gsvd, k, q, seed});
      }
    }
    std::vector<RunResult> results(jobs.size());
    run_jobs<Job>(jobs, cfg.serial, [&](const Job& job, std::size_t i) {
      SamplerSpec sampler;
      sampler.seed = job.seed;
      results[i] = execute_cell(pb, Method::gsvd, job.k, cfg.p, job.q, sampler,
                                cfg.delta, pb.kappaT, true);
    });
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      Row row = tb.prefix(pb.A.cols(), "gaussian", method_name(Method::gsvd, jobs[i].q),
                          jobs[i].k, jobs[i].q, jobs[i].seed);
      append_error_cells(row, results[i], pb.kappaT, pb.kappaT);
      tb.push(std::move(row), results[i].wall_ms);
    }
  }
  tb.table.metadata["oracle_two_path_floor"] = floors;
}

void run_preconditioner(TableBuilder& tb, const Problem& pb) {
  const ExperimentConfig& cfg = tb.cfg;

  // build L from an uncounted operator; measure kappa(L^T T L)
  SpdDenseOp Tfree(pb.T);
  auto P = std::make_shared<Preconditioner>(
      cfg.precond == "jacobi" ? jacobi_preconditioner(Tfree) : exact_preconditioner(Tfree));
  const Index n = pb.T.rows();
  Matrix LTL(n, n);
  Vector e = Vector::Zero(n);
  for (Index j = 0; j < n; ++j) {
    e(j) = 1.0;
    LTL.col(j) = P->apply_Lt(pb.T.eigen() * P->apply_L(e));
    e(j) = 0.0;
  }
  const double kappa_pre = spd_condition_number(LTL);

  std::vector<Job> jobs;
  for (Index k : cfg.k_grid) {
    for (Index q : cfg.q_list) {
      for (bool pre : {false, true}) {
        for (std::uint64_t seed : cfg.seeds) {
          Job job{Method::gsvd, k, q, seed};
          job.preconditioned = pre;
          jobs.push_back(job);
        }
      }
    }
  }
  std::vector<RunResult> results(jobs.size());
  run_jobs<Job>(jobs, cfg.serial, [&](const Job& job, std::size_t i) {
    SamplerSpec sampler;
    sampler.seed = job.seed;
    if (job.preconditioned) {
      sampler.kind = SamplerSpec::Kind::preconditioned;
      sampler.precond = P;
    }
    results[i] = execute_cell(pb, Method::gsvd, job.k, cfg.p, job.q, sampler, cfg.delta,
                              job.preconditioned ? kappa_pre : pb.kappaT, true);
  });

  tb.set_columns(kErrorColumns);
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const Job& job = jobs[i];
    Row row = tb.prefix(pb.A.cols(),
                        job.preconditioned ? "preconditioned:" + cfg.precond : "gaussian",
                        method_name(Method::gsvd, job.q), job.k, job.q, job.seed);
    append_error_cells(row, results[i], pb.kappaT,
                       job.preconditioned ? kappa_pre : pb.kappaT);
    tb.push(std::move(row), results[i].wall_ms);
  }
  tb.table.metadata["kappa_preconditioned"] = kappa_pre;
}

void run_sv_and_angles(TableBuilder& tb, const Problem& pb) {
  const ExperimentConfig& cfg = tb.cfg;
  const Index k = cfg.k_grid.front();

  struct MethodQ {
    Method m;
    Index q;
  };
  const std::vector<MethodQ> methods = {
      {Method::gsvd, 0}, {Method::gsvd, 1}, {Method::geneig, 0}, {Method::twosided, 0}};

  std::vector<Job> jobs;
  for (const MethodQ& mq : methods) {
    for (std::uint64_t seed : cfg.seeds) jobs.push_back({mq.m, k, mq.q, seed});
  }
  std::vector<RunResult> results(jobs.size());
  std::vector<ErrorReport> reports(jobs.size());
  run_jobs<Job>(jobs, cfg.serial, [&](const Job& job, std::size_t i) {
    SamplerSpec sampler;
    sampler.seed = job.seed;
    results[i] = execute_cell(pb, job.method, job.k, cfg.p, job.q, sampler, cfg.delta,
                              pb.kappaT, false);
    reports[i] = error_report(pb.A, pb.S, pb.T, results[i].factors, pb.truth);
  });

  tb.set_columns({"index", "sigma_true", "sigma_hat", "sv_abs_error", "left_angle",
                  "right_angle"});
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const Job& job = jobs[i];
    for (Index j = 0; j < k; ++j) {
      Row row = tb.prefix(pb.A.cols(), "gaussian", method_name(job.method, job.q), k,
                          job.q, job.seed);
      row.insert(row.end(),
                 {std::int64_t(j + 1), pb.truth.sigma(j), results[i].factors.sigma(j),
                  reports[i].sv_abs_errors(j), reports[i].left_angles(j),
                  reports[i].right_angles(j)});
      tb.push(std::move(row), results[i].wall_ms);
    }
  }
}

void run_inexactness(TableBuilder& tb, const Problem& pb) {
  const ExperimentConfig& cfg = tb.cfg;
  const Index k = cfg.k_grid.front();
  const Index q = cfg.q_list.front();
  const Index nsv_out = std::min<Index>(10, k);

  std::vector<double> tols = {0.0};  // the exact path is always the baseline
  tols.insert(tols.end(), cfg.rel_tols.begin(), cfg.rel_tols.end());

  std::vector<Job> jobs;
  for (double tol : tols) {
    for (std::uint64_t seed : cfg.seeds) {
      Job job{Method::gsvd, k, q, seed};
      job.rel_tol = tol;
      jobs.push_back(job);
    }
  }

  struct InexactResult {
    Vector sigma_hat;
    MatvecCounts observed, expected;
    bool counts_match = false;
    double wall_ms = kNaN;
  };
  std::vector<InexactResult> results(jobs.size());
  run_jobs<Job>(jobs, cfg.serial, [&](const Job& job, std::size_t i) {
    const auto t0 = std::chrono::steady_clock::now();
    DenseOp Ainner(pb.A);
    InexactOp A(Ainner, job.rel_tol, job.seed);
    SpdDenseOp S(pb.S), T(pb.T);
    SketchConfig scfg;
    scfg.k = job.k;
    scfg.p = cfg.p;
    scfg.q = job.q;
    scfg.sampler.seed = job.seed;
    const GsvdFactors f = rand_gsvd(A, S, T, scfg);
    results[i].sigma_hat = f.sigma;
    results[i].observed = observed_matvec_counts(A, S, T);
    results[i].expected = expected_matvec_counts(GsvdRoute::direct, scfg.ell(), job.q,
                                                 f.rank());
    results[i].counts_match = results[i].observed == results[i].expected;
    results[i].wall_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
  });

  tb.set_columns({"rel_tol", "index", "sigma_true", "sigma_hat", "sv_abs_error",
                  "mv_a", "mv_at", "counts_match"});
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const Job& job = jobs[i];
    const InexactResult& r = results[i];
    for (Index j = 0; j < nsv_out; ++j) {
      Row row = tb.prefix(pb.A.cols(), "gaussian", method_name(Method::gsvd, q), k, q,
                          job.seed);
      row.insert(row.end(),
                 {job.rel_tol, std::int64_t(j + 1), pb.truth.sigma(j), r.sigma_hat(j),
                  std::abs(pb.truth.sigma(j) - r.sigma_hat(j)),
                  std::int64_t(r.observed.a), std::int64_t(r.observed.at),
                  std::int64_t(r.counts_match ? 1 : 0)});
      tb.push(std::move(row), r.wall_ms);
    }
  }
}

void run_sensitivity(TableBuilder& tb, const Problem& pb) {
  const ExperimentConfig& cfg = tb.cfg;
  const Index k = cfg.k_grid.front();
  const Index q = cfg.q_list.front();
  const std::uint64_t seed = cfg.seeds.front();
  const Index n = pb.A.cols();

  const DenseMatrix basis = cfg.basis_file.empty() ? DenseMatrix::identity(n)
                                                   : read_matrix_market(cfg.basis_file);
  if (basis.rows() != n) {
    throw UsageError("sensitivity basis has " + std::to_string(basis.rows()) +
                     " rows, expected " + std::to_string(n));
  }

  const auto t0 = std::chrono::steady_clock::now();
  DenseOp A(pb.A);
  SpdDenseOp S(pb.S), T(pb.T);
  SketchConfig scfg;
  scfg.k = k;
  scfg.p = cfg.p;
  scfg.q = q;
  scfg.sampler.seed = seed;
  const GsvdFactors f = rand_gsvd(A, S, T, scfg);
  const Vector estimate = sensitivity_indices(f, T, basis);
  const double wall_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - t0)
                             .count();

  tb.set_columns({"index", "estimate", "brute_force", "abs_error", "sigma_kp1"});
  const double sigma_kp1 = k < pb.truth.sigma.size() ? pb.truth.sigma(k) : 0.0;
  for (Index i = 0; i < basis.cols(); ++i) {
    const Vector theta = basis.eigen().col(i);
    const Vector atheta = pb.A.eigen() * theta;
    const double brute = std::sqrt(atheta.dot(pb.S.eigen() * atheta)) /
                         std::sqrt(theta.dot(pb.T.eigen() * theta));
    Row row = tb.prefix(n, "gaussian", method_name(Method::gsvd, q), k, q, seed);
    row.insert(row.end(), {std::int64_t(i + 1), estimate(i), brute,
                           std::abs(estimate(i) - brute), sigma_kp1});
    tb.push(std::move(row), wall_ms);
  }
}

}  // namespace

ResultTable run_experiment(const ExperimentConfig& cfg_in) {
  ExperimentConfig cfg = cfg_in;
  cfg.finalize_and_validate();

  DenseMatrix A = cfg.matrix.load();
  const Index m = A.rows(), n = A.cols();
  for (Index k : cfg.k_grid) {
    if (k + cfg.p > std::min(m, n)) {
      throw UsageError("k + p = " + std::to_string(k + cfg.p) +
                       " exceeds min(m, n) = " + std::to_string(std::min(m, n)));
    }
  }
  if (std::max(m, n) > kOracleSizeCap) {
    throw UsageError("matrix exceeds the reference-oracle size cap of " +
                     std::to_string(kOracleSizeCap));
  }

  TableBuilder tb(cfg);
  tb.table.metadata = {
      {"schema", "gsvd-results/1"},
      {"library_version", kVersion},
      {"rng", rng::kName},
      {"experiment", to_string(cfg.experiment)},
      {"matrix", cfg.matrix.describe()},
      {"weight_s", cfg.weight_s.describe()},
      {"weight_t", cfg.weight_t.describe()},
      {"m", m},
      {"n", n},
      {"k_grid", cfg.k_grid},
      {"p", cfg.p},
      {"q_list", cfg.q_list},
      {"seeds", cfg.seeds},
      {"delta", cfg.delta},
      {"serial", cfg.serial},
      {"timing", cfg.timing},
      {"bound_slack", "1e-9 * sigma_1"},
      {"two_sided_subseed_xor", "0x9E3779B97F4A7C15"},
  };

  switch (cfg.experiment) {
    case Experiment::condition_sweep: {
      tb.table.metadata["kappa_grid"] = cfg.kappa_grid;
      run_condition_sweep(tb, cfg, A, cfg.weight_s.load(m));
      break;
    }
    case Experiment::accuracy_vs_k: {
      const Problem pb = make_problem(std::move(A), cfg.weight_s.load(m),
                                      cfg.weight_t.load(n));
      run_error_experiment(tb, pb, {Method::gsvd}, cfg.q_list);
      break;
    }
    case Experiment::method_comparison: {
      const Problem pb = make_problem(std::move(A), cfg.weight_s.load(m),
                                      cfg.weight_t.load(n));
      run_error_experiment(tb, pb, {Method::gsvd, Method::geneig, Method::twosided},
                           {0, 1});
      break;
    }
    case Experiment::bounds_audit: {
      const Problem pb = make_problem(std::move(A), cfg.weight_s.load(m),
                                      cfg.weight_t.load(n));
      run_error_experiment(tb, pb, {Method::gsvd}, cfg.q_list);
      break;
    }
    case Experiment::preconditioner: {
      tb.table.metadata["precond"] = cfg.precond;
      const Problem pb = make_problem(std::move(A), cfg.weight_s.load(m),
                                      cfg.weight_t.load(n));
      run_preconditioner(tb, pb);
      break;
    }
    case Experiment::sv_and_angles: {
      const Problem pb = make_problem(std::move(A), cfg.weight_s.load(m),
                                      cfg.weight_t.load(n));
      run_sv_and_angles(tb, pb);
      break;
    }
    case Experiment::inexactness: {
      tb.table.metadata["rel_tols"] = cfg.rel_tols;
      const Problem pb = make_problem(std::move(A), cfg.weight_s.load(m),
                                      cfg.weight_t.load(n));
      run_inexactness(tb, pb);
      break;
    }
    case Experiment::sensitivity: {
      const Problem pb = make_problem(std::move(A), cfg.weight_s.load(m),
                                      cfg.weight_t.load(n));
      run_sensitivity(tb, pb);
      break;
    }
  }
  return tb.table;
}

std::string render_csv(const ResultTable& table) {
  std::ostringstream os;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) os << ',';
    os << table.columns[c];
  }
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) os << ',';
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
              os << format_double(v);
            } else {
              os << v;
            }
          },
          row[c]);
    }
    os << '\n';
  }
  return os.str();
}

nlohmann::ordered_json render_json(const ResultTable& table) {
  nlohmann::ordered_json out;
  out["schema"] = "gsvd-results/1";
  out["metadata"] = table.metadata;
  out["columns"] = table.columns;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json jr = nlohmann::ordered_json::array();
    for (const auto& cell : row) {
      std::visit([&](const auto& v) { jr.push_back(v); }, cell);
    }
    rows.push_back(std::move(jr));
  }
  out["rows"] = std::move(rows);
  return out;
}

void emit_results(const ResultTable& table, ExperimentConfig::Format format,
                  const std::string& path) {
  if (table.rows.empty()) {
    throw std::runtime_error("emit_results: refusing to write an empty table");
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("emit_results: cannot write '" + path + "'");
  if (format == ExperimentConfig::Format::csv) {
    out << render_csv(table);
  } else {
    out << render_json(table).dump(2) << '\n';
  }
  if (!out) throw std::runtime_error("emit_results: write failed for '" + path + "'");
}

}  // namespace gsvd
