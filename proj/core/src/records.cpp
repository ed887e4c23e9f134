#include "emt/records.hpp"

#include <cmath>
#include <string>

namespace emt::records {

namespace {

Json finite_or_string(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

}  // namespace

Json checkpoint(std::string_view dataset, std::string_view learner, std::uint64_t seed,
                const Checkpoint& cp) {
  return Json{{"type", "checkpoint"},     {"dataset", dataset}, {"learner", learner},
              {"seed", seed},             {"t", cp.t},          {"progressive_reward", cp.progressive_reward}};
}

Json summary(std::string_view dataset, std::string_view learner, const RunResult& result) {
  return Json{{"type", "summary"},
              {"dataset", dataset},
              {"learner", learner},
              {"seed", result.seed},
              {"t", result.rewards.size()},
              {"progressive_reward", result.final_reward},
              {"truncated", result.truncated}};
}

Json comparison(std::string_view dataset, std::string_view a, std::string_view b,
                const SignificanceOutcome& o, double alpha) {
  std::string winner = "tie";
  if (o.winner == Winner::A) winner = std::string(a);
  if (o.winner == Winner::B) winner = std::string(b);
  return Json{{"type", "comparison"},
              {"dataset", dataset},
              {"a", a},
              {"b", b},
              {"mean_a", o.mean_a},
              {"mean_b", o.mean_b},
              {"t", finite_or_string(o.t)},
              {"df", finite_or_string(o.df)},
              {"p", o.p},
              {"alpha", alpha},
              {"winner", winner}};
}

}  // namespace emt::records
