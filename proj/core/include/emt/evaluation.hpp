#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "emt/bandit.hpp"
#include "emt/datasets.hpp"

namespace emt {

struct RunConfig {
  std::size_t horizon = 1;
  std::uint64_t seed = 0;
  std::size_t stride = 1;

  /// max(1, T / 100)
  static std::size_t default_stride(std::size_t horizon) noexcept;
  void validate() const;
};

struct Checkpoint {
  std::size_t t;
  double progressive_reward;
};

struct RunResult {
  std::uint64_t seed = 0;
  std::vector<Checkpoint> checkpoints;  // strictly increasing t, last is the final round
  std::vector<double> rewards;          // observed reward per round
  double final_reward = 0.0;
  bool truncated = false;  // the environment ran out before the horizon
};

/// Progressive validation: predict, reveal the chosen action's reward, learn.
/// The value at round t is (1/t) * sum_{s<=t} y_s, recorded every `stride`
/// rounds and at the last round played.
RunResult run(CbLearner& learner, BanditEnv& env, const RunConfig& cfg);

struct Aggregate {
  std::vector<std::size_t> t;
  std::vector<double> mean;
  std::vector<double> std_error;  // sample std / sqrt(seeds)
  std::size_t seeds = 0;
};

/// Per-checkpoint mean and standard error. Requires >= 2 results sharing one
/// checkpoint grid.
Aggregate aggregate(std::span<const RunResult> results);

double mean(std::span<const double> xs);
/// Sample (n - 1) variance.
double sample_variance(std::span<const double> xs);

enum class Winner { A, B, Tie };

struct SignificanceOutcome {
  double mean_a = 0.0;
  double mean_b = 0.0;
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;
  Winner winner = Winner::Tie;
};

/// Two-sided Welch t test; the larger-mean side wins iff p < alpha.
SignificanceOutcome welch_test(std::span<const double> a, std::span<const double> b,
                               double alpha = 0.05);

/// Two-sided tail probability P(|T| >= |t|) for Student's t with df degrees
/// of freedom.
double student_t_two_sided_p(double t, double df);

}  // namespace emt
