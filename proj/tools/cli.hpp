#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "emt/bandit.hpp"
#include "emt/datasets.hpp"
#include "emt/evaluation.hpp"

namespace emt::cli {

enum ExitCode : int { kOk = 0, kValidation = 1, kRuntime = 2 };

struct ExperimentConfig {
  std::vector<std::string> datasets;
  std::vector<std::string> learners{"emt"};
  std::string label;  // name or zero-based index; empty selects the last column
  bool has_header = true;
  std::size_t seeds = 50;
  std::uint64_t base_seed = 0;
  std::size_t take = 4000;
  std::size_t stride = 0;  // 0: max(1, T / 100)
  LearnerParams params;
  double alpha = 0.05;
  std::size_t jobs = 1;
  std::string output = "-";
};

/// A loaded dataset after full-file scaling.
struct PreparedDataset {
  std::string name;
  SupervisedDataset data;
};

PreparedDataset prepare(const std::string& path, const std::string& label, bool has_header);

/// One (dataset, learner, seed) cell: subsample with a seed-derived shuffle,
/// then progressive validation over every sampled row.
RunResult run_cell(const PreparedDataset& ds, LearnerKind kind, const LearnerParams& params,
                   std::size_t take, std::uint64_t seed, std::size_t stride);

/// Run every (dataset x learner x seed) cell; results indexed
/// [dataset][learner][seed]. Cells are spread over `jobs` threads.
using Grid = std::vector<std::vector<std::vector<RunResult>>>;
Grid run_grid(const std::vector<PreparedDataset>& datasets, const std::vector<LearnerKind>& learners,
              const ExperimentConfig& cfg);

int cmd_run(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_compare(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_diagnose(const std::string& dataset, const std::string& label, bool has_header,
                 std::ostream& out, std::ostream& err);

/// Full command line entry point; `out` receives records unless --output
/// names a file.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace emt::cli
