#include "cli.hpp"

#include <CLI11.hpp>
#include <atomic>
#include <functional>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <thread>

#include "emt/error.hpp"
#include "emt/random.hpp"
#include "emt/records.hpp"
#include "emt/synthetic.hpp"

namespace emt::cli {

namespace {

using records::Json;

std::vector<LearnerKind> parse_learners(const std::vector<std::string>& names) {
  std::vector<LearnerKind> out;
  for (const auto& n : names) {
    const auto k = parse_learner(n);
    if (!k) {
      throw InvalidInput("--learner: unknown learner '" + n + "' (valid: " + valid_learner_names() + ")");
    }
    out.push_back(*k);
  }
  return out;
}

void validate(const ExperimentConfig& cfg, std::size_t min_seeds) {
  if (cfg.datasets.empty()) throw InvalidInput("--dataset: at least one dataset is required");
  if (cfg.learners.empty()) throw InvalidInput("--learner: at least one learner is required");
  if (cfg.seeds < min_seeds) {
    throw InvalidInput("--seeds: need at least " + std::to_string(min_seeds) + " seeds");
  }
  if (cfg.take < 1) throw InvalidInput("--take: must be at least 1");
  if (cfg.jobs < 1) throw InvalidInput("--jobs: must be at least 1");
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw InvalidInput("--alpha: must lie in (0, 1)");
  const auto& p = cfg.params;
  if (!(p.epsilon >= 0.0 && p.epsilon <= 1.0)) throw InvalidInput("--epsilon: must lie in [0, 1]");
  if (p.leaf_capacity < 2) throw InvalidInput("--leaf-capacity: must be at least 2");
  if (!(p.scorer_learning_rate > 0.0)) throw InvalidInput("--eta: must be positive");
  if (p.memory_budget && *p.memory_budget < 1) throw InvalidInput("--budget: must be at least 1");
  if (p.hash_bits < 1 || p.hash_bits > 30) throw InvalidInput("--hash-bits: must lie in [1, 30]");
  if (!(p.linear_learning_rate > 0.0)) throw InvalidInput("--linear-lr: must be positive");
  p.validate();
  parse_learners(cfg.learners);
}

Json config_record(std::string_view command, const ExperimentConfig& cfg) {
  Json j{{"type", "config"},
         {"command", command},
         {"datasets", cfg.datasets},
         {"learners", cfg.learners},
         {"label", cfg.label},
         {"header", cfg.has_header},
         {"seeds", cfg.seeds},
         {"seed", cfg.base_seed},
         {"take", cfg.take},
         {"stride", cfg.stride},
         {"epsilon", cfg.params.epsilon},
         {"leaf_capacity", cfg.params.leaf_capacity},
         {"eta", cfg.params.scorer_learning_rate},
         {"budget", nullptr},
         {"hash_bits", cfg.params.hash_bits},
         {"linear_lr", cfg.params.linear_learning_rate}};
  if (cfg.params.memory_budget) j["budget"] = *cfg.params.memory_budget;
  if (command == "compare") j["alpha"] = cfg.alpha;
  return j;
}

std::vector<PreparedDataset> load_all(const ExperimentConfig& cfg) {
  std::vector<PreparedDataset> out;
  for (const auto& path : cfg.datasets) out.push_back(prepare(path, cfg.label, cfg.has_header));
  return out;
}

void emit(std::ostream& out, const Json& j) { out << j.dump() << '\n'; }

void emit_runs(std::ostream& out, const std::vector<PreparedDataset>& datasets,
               const std::vector<LearnerKind>& learners, const Grid& grid) {
  for (std::size_t d = 0; d < datasets.size(); ++d) {
    for (std::size_t l = 0; l < learners.size(); ++l) {
      for (const auto& r : grid[d][l]) {
        for (const auto& cp : r.checkpoints) {
          emit(out, records::checkpoint(datasets[d].name, to_string(learners[l]), r.seed, cp));
        }
        emit(out, records::summary(datasets[d].name, to_string(learners[l]), r));
      }
    }
  }
}

}  // namespace

PreparedDataset prepare(const std::string& path, const std::string& label, bool has_header) {
  auto raw = load_csv(path, label.empty() ? LabelColumn{} : LabelColumn::parse(label), has_header);
  raw.validate();
  const auto scaling = fit_scaling(raw);
  return {path, apply_scaling(std::move(raw), scaling)};
}

RunResult run_cell(const PreparedDataset& ds, LearnerKind kind, const LearnerParams& params,
                   std::size_t take, std::uint64_t seed, std::size_t stride) {
  BanditEnv env(subsample(ds.data, take, derive_seed(seed, "shuffle")));
  auto learner = make_learner(kind, params, env.context_dim(), env.actions(), seed);
  const std::size_t horizon = env.length();
  RunConfig rc{horizon, seed, stride == 0 ? RunConfig::default_stride(horizon) : stride};
  return run(*learner, env, rc);
}

Grid run_grid(const std::vector<PreparedDataset>& datasets, const std::vector<LearnerKind>& learners,
              const ExperimentConfig& cfg) {
  Grid grid(datasets.size(),
            std::vector<std::vector<RunResult>>(learners.size(), std::vector<RunResult>(cfg.seeds)));
  const std::size_t cells = datasets.size() * learners.size() * cfg.seeds;
  std::atomic<std::size_t> next{0};
  std::mutex error_mu;
  std::exception_ptr error;

  auto worker = [&] {
    for (std::size_t i = next++; i < cells; i = next++) {
      const std::size_t s = i % cfg.seeds;
      const std::size_t l = (i / cfg.seeds) % learners.size();
      const std::size_t d = i / (cfg.seeds * learners.size());
      try {
        grid[d][l][s] = run_cell(datasets[d], learners[l], cfg.params, cfg.take, cfg.base_seed + s,
                                 cfg.stride);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min(cfg.jobs, cells);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  return grid;
}

int cmd_run(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
  std::vector<PreparedDataset> datasets;
  std::vector<LearnerKind> learners;
  try {
    validate(cfg, 1);
    learners = parse_learners(cfg.learners);
    datasets = load_all(cfg);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  }
  try {
    const auto grid = run_grid(datasets, learners, cfg);
    emit(out, config_record("run", cfg));
    emit_runs(out, datasets, learners, grid);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kOk;
}

int cmd_compare(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
  std::vector<PreparedDataset> datasets;
  std::vector<LearnerKind> learners;
  try {
    validate(cfg, 2);
    if (cfg.learners.size() < 2) throw InvalidInput("--learner: compare needs at least two learners");
    learners = parse_learners(cfg.learners);
    datasets = load_all(cfg);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  }
  try {
    const auto grid = run_grid(datasets, learners, cfg);
    emit(out, config_record("compare", cfg));
    emit_runs(out, datasets, learners, grid);

    const std::size_t n = learners.size();
    std::vector<std::vector<std::size_t>> wins(n, std::vector<std::size_t>(n, 0));
    for (std::size_t d = 0; d < datasets.size(); ++d) {
      std::vector<std::vector<double>> finals(n);
      for (std::size_t l = 0; l < n; ++l) {
        for (const auto& r : grid[d][l]) finals[l].push_back(r.final_reward);
      }
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
          const auto o = welch_test(finals[a], finals[b], cfg.alpha);
          if (o.winner == Winner::A) ++wins[a][b];
          if (o.winner == Winner::B) ++wins[b][a];
          emit(out, records::comparison(datasets[d].name, cfg.learners[a], cfg.learners[b], o, cfg.alpha));
        }
      }
    }

    // Row beats column on this many datasets; the diagonal is undefined.
    Json matrix = Json::array();
    for (std::size_t a = 0; a < n; ++a) {
      Json row = Json::array();
      for (std::size_t b = 0; b < n; ++b) row.push_back(a == b ? Json(nullptr) : Json(wins[a][b]));
      matrix.push_back(row);
    }
    emit(out, Json{{"type", "win_matrix"}, {"learners", cfg.learners}, {"wins", matrix}});

    // setw counts bytes, so the multibyte dash is padded by hand.
    auto cell = [&err](const std::string& s, std::size_t columns) {
      err << s << std::string(s.size() < 12 ? 12 - columns : 1, ' ');
    };
    cell("", 0);
    for (const auto& name : cfg.learners) cell(name, name.size());
    err << '\n';
    for (std::size_t a = 0; a < n; ++a) {
      cell(cfg.learners[a], cfg.learners[a].size());
      for (std::size_t b = 0; b < n; ++b) {
        if (a == b) {
          cell("—", 1);
        } else {
          const auto w = std::to_string(wins[a][b]);
          cell(w, w.size());
        }
      }
      err << '\n';
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kOk;
}

int cmd_diagnose(const std::string& dataset, const std::string& label, bool has_header,
                 std::ostream& out, std::ostream& err) {
  SupervisedDataset ds;
  try {
    ds = load_csv(dataset, label.empty() ? LabelColumn{} : LabelColumn::parse(label), has_header);
    ds.validate();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  }
  try {
    const auto ev = top_eigen_explained_variance(ds);
    if (ev.zero_variance) err << "warning: " << dataset << " has zero total feature variance\n";
    if (ds.imputed_cells > 0) {
      err << "warning: " << ds.imputed_cells << " empty numeric cells were zero-filled\n";
    }
    emit(out, Json{{"type", "diagnosis"},
                   {"dataset", dataset},
                   {"rows", ds.rows()},
                   {"d_x", ds.dim()},
                   {"k", ds.classes},
                   {"top_eigen_explained", ev.ratio}});
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kOk;
}

namespace {

void add_experiment_flags(CLI::App& cmd, ExperimentConfig& cfg, std::optional<std::size_t>& budget) {
  cmd.add_option("--dataset,-d", cfg.datasets, "CSV dataset path (repeatable)")->required();
  cmd.add_option("--learner,-l", cfg.learners, "Learner: " + valid_learner_names() + " (repeatable)")
      ->capture_default_str();
  cmd.add_option("--label", cfg.label, "Label column name or zero-based index (default: last column)");
  cmd.add_flag("!--no-header", cfg.has_header, "CSV has no header row");
  cmd.add_option("--seeds", cfg.seeds, "Number of seeds per (dataset, learner)")->capture_default_str();
  cmd.add_option("--seed", cfg.base_seed, "First seed; runs use seed, seed+1, ...")->capture_default_str();
  cmd.add_option("--take", cfg.take, "Rows sampled per run")->capture_default_str();
  cmd.add_option("--stride", cfg.stride, "Checkpoint stride in rounds (0: T/100)")->capture_default_str();
  cmd.add_option("--epsilon", cfg.params.epsilon, "Exploration rate")->capture_default_str();
  cmd.add_option("--leaf-capacity,-c", cfg.params.leaf_capacity, "EMT leaf capacity")->capture_default_str();
  cmd.add_option("--eta", cfg.params.scorer_learning_rate, "EMT scorer learning rate")->capture_default_str();
  cmd.add_option("--budget", budget, "EMT memory budget with LRU eviction (default: unbounded)");
  cmd.add_option("--hash-bits", cfg.params.hash_bits, "Parametric hash table bits")->capture_default_str();
  cmd.add_option("--linear-lr", cfg.params.linear_learning_rate, "Parametric base learning rate")
      ->capture_default_str();
  cmd.add_option("--jobs,-j", cfg.jobs, "Worker threads")->capture_default_str();
  cmd.add_option("--output,-o", cfg.output, "JSON-lines output file ('-' for stdout)")->capture_default_str();
}

int with_output(const std::string& path, std::ostream& fallback, std::ostream& err,
                const std::function<int(std::ostream&)>& body) {
  if (path == "-") return body(fallback);
  std::ofstream file(path);
  if (!file) {
    err << "error: --output: cannot open " << path << '\n';
    return kValidation;
  }
  return body(file);
}

int cmd_synth(const std::string& kind, std::size_t rows, std::size_t dim, std::size_t actions,
              std::size_t contexts, const std::vector<double>& variances, std::uint64_t seed,
              std::ostream& out, std::ostream& err) {
  try {
    SupervisedDataset ds;
    if (kind == "recurring") {
      ds = synthetic::recurring_contexts(contexts, dim, actions, rows, seed);
    } else if (kind == "linear") {
      ds = synthetic::linear_classes(dim, actions, rows, seed);
    } else if (kind == "gaussian") {
      ds = synthetic::gaussian(variances, rows, true, seed);
    } else {
      throw InvalidInput("--kind: unknown generator '" + kind + "' (valid: recurring, linear, gaussian)");
    }
    write_csv(out, ds);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  }
  return kOk;
}

}  // namespace

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Eigen Memory Tree contextual-bandit experiments"};
  app.require_subcommand(1);

  ExperimentConfig run_cfg;
  std::optional<std::size_t> run_budget;
  auto* run = app.add_subcommand("run", "Progressive validation of learners over datasets and seeds");
  add_experiment_flags(*run, run_cfg, run_budget);

  ExperimentConfig cmp_cfg;
  cmp_cfg.learners = {"emt", "parametric"};
  std::optional<std::size_t> cmp_budget;
  auto* compare = app.add_subcommand("compare", "Pairwise Welch tests between learners");
  add_experiment_flags(*compare, cmp_cfg, cmp_budget);
  compare->add_option("--alpha", cmp_cfg.alpha, "Significance level")->capture_default_str();

  std::string diag_dataset;
  std::string diag_label;
  bool diag_header = true;
  auto* diagnose = app.add_subcommand("diagnose", "Dataset shape and top-eigenvector explained variance");
  diagnose->add_option("--dataset,-d", diag_dataset, "CSV dataset path")->required();
  diagnose->add_option("--label", diag_label, "Label column name or zero-based index (default: last column)");
  diagnose->add_flag("!--no-header", diag_header, "CSV has no header row");

  std::string synth_kind = "recurring";
  std::size_t synth_rows = 4000, synth_dim = 5, synth_actions = 4, synth_contexts = 50;
  std::vector<double> synth_var{9.0, 1.0};
  std::uint64_t synth_seed = 0;
  std::string synth_out = "-";
  auto* synth = app.add_subcommand("synth", "Write a synthetic classification CSV");
  synth->add_option("--kind", synth_kind, "recurring, linear or gaussian")->capture_default_str();
  synth->add_option("--rows", synth_rows, "Rows")->capture_default_str();
  synth->add_option("--dim", synth_dim, "Feature dimension (recurring, linear)")->capture_default_str();
  synth->add_option("--actions", synth_actions, "Classes (recurring, linear)")->capture_default_str();
  synth->add_option("--contexts", synth_contexts, "Distinct contexts (recurring)")->capture_default_str();
  synth->add_option("--variances", synth_var, "Covariance spectrum (gaussian)")->capture_default_str();
  synth->add_option("--seed", synth_seed, "Generator seed")->capture_default_str();
  synth->add_option("--output,-o", synth_out, "CSV output file ('-' for stdout)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidation;
  }

  if (*run) {
    run_cfg.params.memory_budget = run_budget;
    return with_output(run_cfg.output, out, err,
                       [&](std::ostream& os) { return cmd_run(run_cfg, os, err); });
  }
  if (*compare) {
    cmp_cfg.params.memory_budget = cmp_budget;
    return with_output(cmp_cfg.output, out, err,
                       [&](std::ostream& os) { return cmd_compare(cmp_cfg, os, err); });
  }
  if (*diagnose) return cmd_diagnose(diag_dataset, diag_label, diag_header, out, err);
  return with_output(synth_out, out, err, [&](std::ostream& os) {
    return cmd_synth(synth_kind, synth_rows, synth_dim, synth_actions, synth_contexts, synth_var,
                     synth_seed, os, err);
  });
}

}  // namespace emt::cli
