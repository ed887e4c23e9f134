// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "emt/bandit.hpp"
#include "emt/evaluation.hpp"
#include "emt/oja.hpp"
#include "emt/scorer.hpp"
#include "emt/synthetic.hpp"
#include "emt/tree.hpp"
#include "oracles.hpp"

namespace {

using namespace emt;

struct Verdict {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<double> random_key(std::mt19937_64& gen, std::size_t d) {
  std::uniform_real_distribution<double> unif(0, 1);
  std::vector<double> k(d);
  for (auto& v : k) v = unif(gen);
  return k;
}

void collect(const Node& n, std::vector<const Memory*>& out) {
  if (n.is_leaf()) {
    for (const auto& m : n.memories) out.push_back(&m);
    return;
  }
  collect(*n.left, out);
  collect(*n.right, out);
}

std::vector<const Memory*> memories(const Emt& tree) {
  std::vector<const Memory*> out;
  collect(tree.root(), out);
  return out;
}

// Mean final progressive reward over `seeds` runs, each on its own
// seed-shuffled copy of the environment.
double mean_final(const cli::PreparedDataset& ds, LearnerKind kind, const LearnerParams& p,
                  std::size_t seeds) {
  double sum = 0;
  for (std::size_t s = 0; s < seeds; ++s) {
    sum += cli::run_cell(ds, kind, p, ds.data.rows(), s, 0).final_reward;
  }
  return sum / static_cast<double>(seeds);
}

const cli::PreparedDataset& recurring_env() {
  static const cli::PreparedDataset ds{"recurring", synthetic::recurring_contexts(50, 5, 4, 4000, 1000)};
  return ds;
}

const cli::PreparedDataset& linear_env() {
  static const cli::PreparedDataset ds{"linear", synthetic::linear_classes(5, 3, 4000, 1000)};
  return ds;
}

Verdict self_consistency() {
  std::mt19937_64 gen(1);
  std::vector<std::vector<double>> keys;
  for (int i = 0; i < 1000; ++i) keys.push_back(random_key(gen, 10));
  const auto start = std::chrono::steady_clock::now();
  Emt tree(10, {});
  for (std::size_t i = 0; i < keys.size(); ++i) tree.learn(keys[i], static_cast<double>(i));
  int failures = 0;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const auto r = tree.query(keys[i]);
    if (!r || r->value != static_cast<double>(i)) ++failures;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {failures == 0 && secs < 1.0, fmt("failures=%d time=%.3fs", failures, secs)};
}

Verdict ablation_direction() {
  const auto& ds = recurring_env();
  const double abs_diff = mean_final(ds, LearnerKind::Emt, {}, 20);
  const double interaction = mean_final(ds, LearnerKind::EmtNoSelf, {}, 20);
  return {abs_diff - interaction >= 0.02,
          fmt("emt=%.4f emt-noself=%.4f diff=%.4f (need >= 0.02)", abs_diff, interaction,
              abs_diff - interaction)};
}

Verdict oja_fidelity() {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> normal(0, 1);
  int good = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::MatrixXd g(8, 8);
    for (int i = 0; i < 64; ++i) g.data()[i] = normal(gen);
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
    std::vector<std::vector<double>> rows(512, std::vector<double>(8));
    for (auto& row : rows) {
      Eigen::VectorXd z(8);
      for (int i = 0; i < 8; ++i) z[i] = normal(gen) * (i == 0 ? 10.0 : 1.0);
      const Eigen::VectorXd x = q * z;
      std::copy(x.data(), x.data() + 8, row.begin());
    }
    std::vector<std::span<const double>> spans(rows.begin(), rows.end());
    Rng rng(trial);
    const auto v = top_eigen(spans, rng);
    if (oracle::abs_cosine(v, oracle::exact_top_eigenvector(rows)) >= 0.95) ++good;
  }
  return {good >= 95, fmt("%d/100 trials with |cos| >= 0.95 (need >= 95)", good)};
}

Verdict logarithmic_access() {
  constexpr std::size_t kN = 16384, kC = 32, kDim = 8;
  std::mt19937_64 gen(4);
  TreeConfig cfg;
  cfg.leaf_capacity = kC;
  Emt tree(kDim, cfg);
  std::vector<std::vector<double>> keys;
  for (std::size_t i = 0; i < kN; ++i) {
    keys.push_back(random_key(gen, kDim));
    tree.learn(keys.back(), static_cast<double>(i));
  }
  const auto st = tree.stats();
  const double depth_bound = 2 * std::log2(static_cast<double>(kN) / kC) + 4;
  std::size_t worst = 0;
  for (const auto& k : keys) {
    const Node& leaf = tree.locate(k);
    if (!leaf.deferred) worst = std::max(worst, leaf.memories.size());
  }
  for (int i = 0; i < 2000; ++i) {
    const Node& leaf = tree.locate(random_key(gen, kDim));
    if (!leaf.deferred) worst = std::max(worst, leaf.memories.size());
  }
  const double deferred_share = static_cast<double>(st.deferred_leaves) / static_cast<double>(st.leaves);
  const bool ok = st.max_depth <= depth_bound && worst <= kC && deferred_share < 0.01;
  return {ok, fmt("max_depth=%zu (bound %.0f) max_scored=%zu (c=%zu) deferred=%zu/%zu leaves",
                  st.max_depth, depth_bound, worst, kC, st.deferred_leaves, st.leaves)};
}

Verdict gradient_check() {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> unif(0, 1);
  int checked = 0;
  double worst = 0;
  while (checked < 100) {
    const std::size_t d = 2 + gen() % 15;
    std::vector<double> w(d), x(d), near(d), far(d);
    for (auto* v : {&w, &x, &near, &far}) {
      for (auto& e : *v) e = unif(gen);
    }
    Scorer s(w, 0.01, PairFeaturizer::AbsDiff);
    if (!(s.predict_score(x, near) > 1e-3 && s.predict_score(x, far) > 1e-3)) continue;
    const auto analytic = s.ranking_loss(x, near, far).gradient;
    const auto fd = oracle::central_gradient(
        [&](std::span<const double> ww) { return oracle::ranking_loss_abs_diff(ww, x, near, far); }, w, 1e-5);
    double num = 0, den = 0;
    for (std::size_t i = 0; i < d; ++i) {
      num += (analytic[i] - fd[i]) * (analytic[i] - fd[i]);
      den += fd[i] * fd[i];
    }
    worst = std::max(worst, std::sqrt(num) / std::max(std::sqrt(den), 1e-12));
    ++checked;
  }
  return {worst <= 1e-4, fmt("worst relative error %.2e over 100 configurations", worst)};
}

Verdict stacking_no_downside() {
  const double lin_pemt = mean_final(linear_env(), LearnerKind::Pemt, {}, 10);
  const double lin_param = mean_final(linear_env(), LearnerKind::Parametric, {}, 10);
  const double rep_pemt = mean_final(recurring_env(), LearnerKind::Pemt, {}, 10);
  const double rep_param = mean_final(recurring_env(), LearnerKind::Parametric, {}, 10);
  const double rep_emt = mean_final(recurring_env(), LearnerKind::Emt, {}, 10);
  const bool a = std::abs(lin_pemt - lin_param) <= 0.01;
  const bool b = rep_pemt >= rep_param + 0.05 && rep_pemt >= rep_emt - 0.01;
  return {a && b, fmt("linear: pemt=%.4f parametric=%.4f | repeat: pemt=%.4f parametric=%.4f emt=%.4f",
                      lin_pemt, lin_param, rep_pemt, rep_param, rep_emt)};
}

Verdict lru_bound() {
  constexpr std::size_t kBudget = 1000;
  std::mt19937_64 gen(7);
  TreeConfig cfg;
  cfg.memory_budget = kBudget;
  Emt tree(6, cfg);
  std::vector<std::vector<double>> seen;
  std::size_t over = 0, mismatches = 0, evictions = 0;
  for (int i = 0; i < 10000; ++i) {
    // queries between learns shuffle the access order
    for (int q = 0; q < 2 && !seen.empty(); ++q) tree.query(seen[gen() % seen.size()]);

    std::set<std::uint64_t> before;
    std::uint64_t expected = 0;
    std::uint64_t oldest_tick = ~std::uint64_t{0};
    for (const auto* m : memories(tree)) {
      before.insert(m->order);
      if (m->last_access < oldest_tick) {
        oldest_tick = m->last_access;
        expected = m->order;
      }
    }
    seen.push_back(random_key(gen, 6));
    tree.learn(seen.back(), static_cast<double>(i % 2));
    if (tree.size() > kBudget) ++over;

    if (before.size() == kBudget) {
      ++evictions;
      std::set<std::uint64_t> after;
      for (const auto* m : memories(tree)) after.insert(m->order);
      std::vector<std::uint64_t> gone;
      std::set_difference(before.begin(), before.end(), after.begin(), after.end(), std::back_inserter(gone));
      if (gone != std::vector<std::uint64_t>{expected}) ++mismatches;
    }
  }

  LearnerParams bounded;
  bounded.memory_budget = kBudget;
  const double unbounded_pemt = mean_final(recurring_env(), LearnerKind::Pemt, {}, 10);
  const double bounded_pemt = mean_final(recurring_env(), LearnerKind::Pemt, bounded, 10);
  const bool ok = over == 0 && mismatches == 0 && evictions > 0 &&
                  std::abs(bounded_pemt - unbounded_pemt) <= 0.02;
  return {ok, fmt("over_budget=%zu evictions=%zu mismatches=%zu pemt bounded=%.4f unbounded=%.4f",
                  over, evictions, mismatches, bounded_pemt, unbounded_pemt)};
}

Verdict evaluation_arithmetic() {
  // Progressive traces versus a brute-force cumulative mean.
  std::size_t trace_mismatches = 0;
  for (auto kind : {LearnerKind::Emt, LearnerKind::Parametric, LearnerKind::Pemt}) {
    const auto r = cli::run_cell(recurring_env(), kind, {}, 4000, 9, 1);
    double sum = 0;
    for (std::size_t t = 1; t <= r.rewards.size(); ++t) {
      sum += r.rewards[t - 1];
      if (r.checkpoints[t - 1].progressive_reward != sum / static_cast<double>(t)) ++trace_mismatches;
    }
  }

  // Welch p-values versus the quadrature oracle.
  std::mt19937_64 gen(8);
  std::normal_distribution<double> normal(0.6, 0.05);
  double worst_p = 0;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(2 + trial % 10), b(3 + trial % 7);
    for (auto& v : a) v = normal(gen);
    for (auto& v : b) v = normal(gen) + 0.01 * (trial % 4);
    const auto o = welch_test(a, b);
    worst_p = std::max(worst_p, std::abs(o.p - oracle::student_t_two_sided_p(o.t, o.df)));
  }

  // Uniform exploration at epsilon = 1.
  EpsilonGreedy policy(1.0, 4, 10);
  std::vector<double> counts(4, 0);
  for (int i = 0; i < 10000; ++i) ++counts[policy.select(std::vector<double>{1, 0, 0, 0})];
  double chi = 0;
  for (double c : counts) chi += (c - 2500) * (c - 2500) / 2500;
  constexpr double kChiSq3At99 = 11.344866730144373;

  const bool ok = trace_mismatches == 0 && worst_p <= 1e-6 && chi < kChiSq3At99;
  return {ok, fmt("trace mismatches=%zu worst |p - oracle|=%.2e chi2=%.3f (critical %.3f)",
                  trace_mismatches, worst_p, chi, kChiSq3At99)};
}

Verdict determinism() {
  cli::ExperimentConfig cfg;
  cfg.learners = {"emt", "pemt", "parametric"};
  cfg.seeds = 3;
  cfg.take = 2000;
  auto once = [&](std::size_t jobs) {
    cfg.jobs = jobs;
    std::ostringstream out, err;
    const int code = cli::cmd_run(cfg, out, err);
    return std::pair{code, out.str()};
  };
  // cmd_run reads from disk, so stage the environment as a file first.
  const auto path = std::filesystem::temp_directory_path() / "emt_acceptance_determinism.csv";
  {
    std::ofstream f(path);
    write_csv(f, recurring_env().data);
  }
  cfg.datasets = {path.string()};
  const auto [c1, first] = once(1);
  const auto [c2, second] = once(1);
  const auto [c3, threaded] = once(2);
  std::filesystem::remove(path);
  const bool ok = c1 == 0 && c2 == 0 && c3 == 0 && !first.empty() && first == second && first == threaded;
  return {ok, fmt("%zu bytes, repeat identical=%s, jobs=2 identical=%s", first.size(),
                  first == second ? "yes" : "no", first == threaded ? "yes" : "no")};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"self-consistency", self_consistency},
      {"ablation direction", ablation_direction},
      {"oja fidelity", oja_fidelity},
      {"logarithmic access", logarithmic_access},
      {"scorer gradient check", gradient_check},
      {"stacking no-downside", stacking_no_downside},
      {"lru bound", lru_bound},
      {"evaluation arithmetic", evaluation_arithmetic},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += !v.pass;
    std::printf("%s %zu %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
