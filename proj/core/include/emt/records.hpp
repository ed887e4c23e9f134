#pragma once

#include <nlohmann/json.hpp>
#include <string_view>

#include "emt/evaluation.hpp"

namespace emt::records {

using Json = nlohmann::ordered_json;

/// One object per checkpoint:
/// {"type":"checkpoint","dataset","learner","seed","t","progressive_reward"}
Json checkpoint(std::string_view dataset, std::string_view learner, std::uint64_t seed,
                const Checkpoint& cp);

/// {"type":"summary", ..., "t" (rounds played), "progressive_reward" (final), "truncated"}
Json summary(std::string_view dataset, std::string_view learner, const RunResult& result);

/// {"type":"comparison","dataset","a","b","mean_a","mean_b","t","df","p","alpha","winner"}
/// winner is the winning learner's name or "tie". Infinite t is written as a
/// signed string since JSON has no infinity.
Json comparison(std::string_view dataset, std::string_view a, std::string_view b,
                const SignificanceOutcome& outcome, double alpha);

}  // namespace emt::records
