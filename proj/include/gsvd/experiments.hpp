#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "gsvd/dense_matrix.hpp"
#include "gsvd/test_matrices.hpp"

namespace gsvd {

/// Invalid configuration; maps to exit code 1 in the CLI.
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

enum class Experiment {
  accuracy_vs_k,
  method_comparison,
  sv_and_angles,
  condition_sweep,
  preconditioner,
  inexactness,
  bounds_audit,
  sensitivity,
};
Experiment experiment_from_name(const std::string& name);
std::string to_string(Experiment e);

/// Input matrix A: a generator spec, or a Matrix Market file.
struct MatrixSource {
  std::string file;                   ///< non-empty: read from disk
  std::optional<TestMatrixSpec> gen;  ///< otherwise: generate

  static MatrixSource parse(const std::string& text, Index n, Index r,
                            std::uint64_t seed);
  DenseMatrix load() const;
  std::string describe() const;
};

/// Weight matrix S or T.
struct WeightSource {
  enum class Kind { identity, minij, randsvd, file };
  Kind kind = Kind::identity;
  double kappa = 1e4;
  std::uint64_t seed = 42;
  std::string file;

  static WeightSource parse(const std::string& text);
  DenseMatrix load(Index n) const;
  std::string describe() const;
};

struct ExperimentConfig {
  Experiment experiment = Experiment::accuracy_vs_k;
  MatrixSource matrix;
  WeightSource weight_s;
  WeightSource weight_t;
  std::vector<Index> k_grid;
  Index p = 10;
  std::vector<Index> q_list;
  std::vector<std::uint64_t> seeds;
  double delta = 0.1;
  std::vector<double> kappa_grid = {10.0, 1e4, 1e7, 1e10};  ///< condition_sweep
  std::vector<double> rel_tols = {1e-9, 1e-6, 1e-3};        ///< inexactness
  std::string precond = "exact";                            ///< preconditioner: exact | jacobi
  std::string basis_file;                                   ///< sensitivity: empty = identity
  std::string out;
  enum class Format { csv, json } format = Format::csv;
  bool serial = false;
  bool timing = false;  ///< adds a wall_ms column; off by default so outputs
                        ///< stay byte-identical across runs

  /// Defaults for the per-experiment knobs left empty, then a consistency
  /// check. Throws UsageError naming the offending field.
  void finalize_and_validate();
};

/// Flat result table with a fixed, documented column order plus run metadata.
struct ResultTable {
  using Cell = std::variant<std::int64_t, double, std::string>;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  nlohmann::ordered_json metadata;
};

ResultTable run_experiment(const ExperimentConfig& cfg);

std::string render_csv(const ResultTable& table);
nlohmann::ordered_json render_json(const ResultTable& table);

/// Writes the table; refuses empty tables and unwritable paths.
void emit_results(const ResultTable& table, ExperimentConfig::Format format,
                  const std::string& path);

}  // namespace gsvd
