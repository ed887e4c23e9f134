#include "emt/evaluation.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>

#include "emt/error.hpp"

namespace emt {

std::size_t RunConfig::default_stride(std::size_t horizon) noexcept {
  return std::max<std::size_t>(1, horizon / 100);
}

void RunConfig::validate() const {
  if (horizon < 1) throw InvalidInput("horizon must be at least 1");
  if (stride < 1) throw InvalidInput("checkpoint stride must be at least 1");
}

RunResult run(CbLearner& learner, BanditEnv& env, const RunConfig& cfg) {
  cfg.validate();
  RunResult out;
  out.seed = cfg.seed;
  out.rewards.reserve(cfg.horizon);
  double total = 0.0;
  std::size_t t = 0;
  while (t < cfg.horizon) {
    const auto round = env.step();
    if (!round) {
      out.truncated = true;
      break;
    }
    const std::size_t action = learner.predict(round->context);
    const double y = round->reward(action);
    learner.learn(round->context, action, y);
    ++t;
    total += y;
    out.rewards.push_back(y);
    if (t % cfg.stride == 0 || t == cfg.horizon) {
      out.checkpoints.push_back({t, total / static_cast<double>(t)});
    }
  }
  if (t > 0 && (out.checkpoints.empty() || out.checkpoints.back().t != t)) {
    out.checkpoints.push_back({t, total / static_cast<double>(t)});
  }
  out.final_reward = t > 0 ? out.checkpoints.back().progressive_reward : 0.0;
  return out;
}

double mean(std::span<const double> xs) {
  if (xs.empty()) throw InvalidInput("mean of an empty sample");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) throw InvalidInput("sample variance needs at least two values");
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return ss / static_cast<double>(xs.size() - 1);
}

Aggregate aggregate(std::span<const RunResult> results) {
  if (results.size() < 2) throw InvalidInput("aggregate needs at least two results");
  const auto& grid = results.front().checkpoints;
  for (const auto& r : results) {
    const bool same = std::equal(r.checkpoints.begin(), r.checkpoints.end(), grid.begin(), grid.end(),
                                 [](const Checkpoint& a, const Checkpoint& b) { return a.t == b.t; });
    if (!same) throw InvalidInput("aggregate: results have different checkpoint grids");
  }
  Aggregate agg;
  agg.seeds = results.size();
  std::vector<double> column(results.size());
  for (std::size_t c = 0; c < grid.size(); ++c) {
    for (std::size_t r = 0; r < results.size(); ++r) {
      column[r] = results[r].checkpoints[c].progressive_reward;
    }
    agg.t.push_back(grid[c].t);
    agg.mean.push_back(mean(column));
    agg.std_error.push_back(std::sqrt(sample_variance(column) / static_cast<double>(column.size())));
  }
  return agg;
}

double student_t_two_sided_p(double t, double df) {
  if (std::isnan(t)) return 1.0;
  if (std::isinf(t)) return 0.0;
  const boost::math::students_t dist(df);
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))));
}

SignificanceOutcome welch_test(std::span<const double> a, std::span<const double> b, double alpha) {
  if (a.size() < 2 || b.size() < 2) throw InvalidInput("welch_test needs at least two values per side");
  SignificanceOutcome out;
  out.mean_a = mean(a);
  out.mean_b = mean(b);
  const double va = sample_variance(a) / static_cast<double>(a.size());
  const double vb = sample_variance(b) / static_cast<double>(b.size());
  const double diff = out.mean_a - out.mean_b;
  const double se2 = va + vb;

  if (se2 == 0.0) {
    if (diff == 0.0) return out;  // t = 0, p = 1
    out.t = diff > 0 ? INFINITY : -INFINITY;
    out.df = static_cast<double>(a.size() + b.size() - 2);
    out.p = 0.0;
  } else {
    out.t = diff / std::sqrt(se2);
    out.df = se2 * se2 /
             (va * va / static_cast<double>(a.size() - 1) + vb * vb / static_cast<double>(b.size() - 1));
    out.p = student_t_two_sided_p(out.t, out.df);
  }
  if (out.p < alpha) out.winner = diff > 0 ? Winner::A : Winner::B;
  return out;
}

}  // namespace emt
