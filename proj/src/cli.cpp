#include "tron/cli.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "tron/io.hpp"
#include "tron/model.hpp"

namespace tron::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  double C = 1.0;
  double eps = 0.1;
  int solver = 0;  // 0 = logistic regression, 2 = L2-SVM
  unsigned threads = 1;
  bool threads_given = false;
  std::string backend;  // empty = derive from threads
  bool precond = false;
  std::size_t dense_n = 0;  // 0 = LIBSVM sparse input
  std::size_t budget = std::size_t{2} << 30;
  std::string report_path;
  std::vector<std::string> positional;

  LossKind loss() const { return solver == 0 ? LossKind::Logistic : LossKind::L2Svm; }
};

double parse_flag_double(const std::string& flag, const std::string& value) {
  try {
    std::size_t used = 0;
    double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw UsageError("flag " + flag + ": '" + value + "' is not a number");
  }
}

std::size_t parse_flag_count(const std::string& flag, const std::string& value) {
  try {
    std::size_t used = 0;
    long long v = std::stoll(value, &used);
    if (used != value.size() || v < 0) throw std::invalid_argument(value);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw UsageError("flag " + flag + ": '" + value + "' is not a nonnegative integer");
  }
}

/// Shared flag walk; `extra` handles command-specific flags and returns
/// false for ones it does not know. Last occurrence wins.
template <typename Extra>
void parse_args(const std::vector<std::string>& args, CommonOptions& opt, const Extra& extra) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.empty() || a[0] != '-' || a == "-") {
      opt.positional.push_back(a);
      continue;
    }
    auto need_value = [&](const char* flag) -> const std::string& {
      if (i + 1 >= args.size()) throw UsageError(std::string("flag ") + flag + " needs a value");
      return args[++i];
    };
    if (a == "-c") {
      opt.C = parse_flag_double(a, need_value("-c"));
      if (!(opt.C > 0.0)) throw UsageError("flag -c: C must be positive");
    } else if (a == "-e") {
      opt.eps = parse_flag_double(a, need_value("-e"));
      if (!(opt.eps > 0.0)) throw UsageError("flag -e: eps must be positive");
    } else if (a == "-s") {
      std::size_t s = parse_flag_count(a, need_value("-s"));
      if (s != 0 && s != 2) {
        throw UsageError("flag -s: solver " + std::to_string(s) +
                         " is not supported (0 = logistic regression, 2 = L2-SVM)");
      }
      opt.solver = static_cast<int>(s);
    } else if (a == "-nr") {
      std::size_t t = parse_flag_count(a, need_value("-nr"));
      if (t < 1) throw UsageError("flag -nr: thread count must be >= 1");
      opt.threads = static_cast<unsigned>(t);
      opt.threads_given = true;
    } else if (a == "--backend") {
      const std::string& b = need_value("--backend");
      if (b != "seq" && b != "par" && b != "staged" && b != "mix") {
        throw UsageError("flag --backend: '" + b + "' is not one of seq|par|staged|mix");
      }
      opt.backend = b;
    } else if (a == "--precond") {
      opt.precond = true;
    } else if (a == "--dense") {
      opt.dense_n = parse_flag_count(a, need_value("--dense"));
      if (opt.dense_n == 0) throw UsageError("flag --dense: dimension must be >= 1");
    } else if (a == "--budget") {
      opt.budget = parse_flag_count(a, need_value("--budget"));
    } else if (a == "--report") {
      opt.report_path = need_value("--report");
    } else if (!extra(a, i, args)) {
      throw UsageError("unknown flag " + a);
    }
  }
}

ExecutionPlan make_plan(const CommonOptions& opt, std::ostream& err) {
  std::string backend = opt.backend;
  if (backend.empty()) backend = (opt.threads_given && opt.threads > 1) ? "par" : "seq";
  ExecutionPlan plan;
  if (backend == "seq") {
    plan = ExecutionPlan::sequential();
    if (opt.threads > 1) err << "note: -nr has no effect with --backend seq\n";
  } else if (backend == "par") {
    plan = ExecutionPlan::parallel(opt.threads > 1 ? opt.threads : 1);
  } else if (backend == "staged") {
    plan = ExecutionPlan::staged_decoupled();
    if (opt.threads > 1) err << "note: -nr has no effect with --backend staged\n";
  } else {
    plan = ExecutionPlan::mixed_active_set(opt.threads > 1 ? opt.threads : 1);
  }
  plan.gathered_budget_bytes = opt.budget;
  return plan;
}

Problem load_problem(const CommonOptions& opt, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'", 0);
  Problem p = opt.dense_n > 0 ? load_dense(in, opt.dense_n) : parse_libsvm(in);
  p.C = opt.C;
  return p;
}

TrustRegionConfig make_config(const CommonOptions& opt) {
  TrustRegionConfig cfg;
  cfg.eps = opt.eps;
  cfg.use_preconditioner = opt.precond;
  return cfg;
}

ExecutionPlan plan_from_tag(const std::string& tag, unsigned default_threads,
                            std::size_t budget) {
  std::string name = tag;
  unsigned workers = default_threads;
  auto colon = tag.find(':');
  if (colon != std::string::npos) {
    name = tag.substr(0, colon);
    workers = static_cast<unsigned>(parse_flag_count("--configs", tag.substr(colon + 1)));
    if (workers < 1) throw UsageError("flag --configs: worker count must be >= 1 in '" + tag + "'");
  }
  ExecutionPlan plan;
  if (name == "seq") {
    plan = ExecutionPlan::sequential();
  } else if (name == "par") {
    plan = ExecutionPlan::parallel(workers);
  } else if (name == "staged") {
    plan = ExecutionPlan::staged_decoupled();
  } else if (name == "mix") {
    plan = ExecutionPlan::mixed_active_set(workers);
  } else {
    throw UsageError("flag --configs: '" + tag + "' is not one of seq|par|staged|mix");
  }
  plan.gathered_budget_bytes = budget;
  return plan;
}

int data_error(std::ostream& err, const std::exception& e) {
  err << "data error: " << e.what() << '\n';
  return kExitData;
}

}  // namespace

int run_train(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CommonOptions opt;
  try {
    parse_args(args, opt, [](const std::string&, std::size_t&, const std::vector<std::string>&) {
      return false;
    });
    if (opt.positional.empty()) throw UsageError("missing input data path");
    if (opt.positional.size() > 2) {
      throw UsageError("unexpected argument '" + opt.positional[2] + "'");
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    err << "usage: tron train [-c C] [-e EPS] [-s 0|2] [-nr T] [--backend seq|par|staged|mix]\n"
           "                  [--precond] [--dense N] [--budget BYTES] [--report PATH]\n"
           "                  DATA [MODEL]\n";
    return kExitUsage;
  }

  const std::string& data_path = opt.positional[0];
  std::string model_path =
      opt.positional.size() > 1 ? opt.positional[1] : data_path + ".model";

  Problem p;
  try {
    p = load_problem(opt, data_path);
    if (p.instances() == 0) throw ParseError("'" + data_path + "' holds no instances", 0);
  } catch (const ParseError& e) {
    return data_error(err, e);
  }

  ExecutionPlan plan = make_plan(opt, err);
  TrustRegionConfig cfg = make_config(opt);

  SolveResult result;
  try {
    auto start = std::chrono::steady_clock::now();
    result = solve(p, opt.loss(), cfg, plan);
    auto stop = std::chrono::steady_clock::now();
    double seconds = std::chrono::duration<double>(stop - start).count();
    char line[160];
    std::snprintf(line, sizeof(line),
                  "training time: %.6f s, objective %.12e, %zu iterations (%zu accepted)%s\n",
                  seconds, result.objective, result.trace.iterations.size(),
                  result.trace.accepted_steps, result.converged ? "" : " [not converged]");
    out << line;
  } catch (const BudgetExceededError& e) {
    err << "budget exceeded: " << e.what() << '\n';
    return kExitBudget;
  } catch (const NumericalFailureError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }

  Model m;
  m.loss = opt.loss();
  m.n = p.features();
  m.C = opt.C;
  m.eps = opt.eps;
  m.backend_tag = opt.backend.empty()
                      ? ((opt.threads_given && opt.threads > 1) ? "par" : "seq")
                      : opt.backend;
  m.w = result.w;
  std::ofstream model_out(model_path);
  if (!model_out) {
    err << "data error: cannot write model to '" << model_path << "'\n";
    return kExitData;
  }
  save_model(m, model_out);

  if (!opt.report_path.empty()) {
    std::ofstream report(opt.report_path);
    if (!report) {
      err << "data error: cannot write report to '" << opt.report_path << "'\n";
      return kExitData;
    }
    report << ledger_report(plan);
  }
  return kExitOk;
}

int run_predict(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CommonOptions opt;
  try {
    parse_args(args, opt, [](const std::string&, std::size_t&, const std::vector<std::string>&) {
      return false;
    });
    if (opt.positional.size() != 3) {
      throw UsageError("expected DATA MODEL OUTPUT, got " +
                       std::to_string(opt.positional.size()) + " arguments");
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    err << "usage: tron predict [--dense N] DATA MODEL OUTPUT\n";
    return kExitUsage;
  }

  try {
    Model m;
    {
      std::ifstream min(opt.positional[1]);
      if (!min) throw ParseError("cannot open '" + opt.positional[1] + "'", 0);
      m = load_model(min);
    }
    Problem data = load_problem(opt, opt.positional[0]);
    PredictOutcome outcome = predict(m, data);
    if (outcome.ignored_features > 0) {
      err << "warning: ignored " << outcome.ignored_features
          << " feature entries beyond the model dimension " << m.n << '\n';
    }
    std::ofstream labels(opt.positional[2]);
    if (!labels) throw ParseError("cannot write labels to '" + opt.positional[2] + "'", 0);
    for (double label : outcome.labels) labels << (label > 0 ? "1" : "-1") << '\n';
    if (!data.y.empty()) {
      char line[96];
      std::snprintf(line, sizeof(line), "accuracy: %.4f%% (%zu/%zu)\n",
                    100.0 * static_cast<double>(outcome.correct) /
                        static_cast<double>(data.instances()),
                    outcome.correct, data.instances());
      out << line;
    }
  } catch (const ParseError& e) {
    return data_error(err, e);
  }
  return kExitOk;
}

std::vector<BenchRow> bench_sweep(const Problem& p, LossKind loss, const TrustRegionConfig& cfg,
                                  const std::vector<std::string>& configs, std::size_t runs,
                                  std::size_t budget_bytes) {
  std::vector<BenchRow> rows;
  for (const std::string& tag : configs) {
    BenchRow row;
    row.config = tag;
    row.min_time = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < runs; ++r) {
      ExecutionPlan plan = plan_from_tag(tag, 1, budget_bytes);
      auto start = std::chrono::steady_clock::now();
      SolveResult result = solve(p, loss, cfg, plan);
      auto stop = std::chrono::steady_clock::now();
      double seconds = std::chrono::duration<double>(stop - start).count();
      row.run_times.push_back(seconds);
      if (seconds < row.min_time) row.min_time = seconds;
      if (r == 0) {
        row.objective = result.objective;
        row.outer_iterations = result.trace.iterations.size();
        row.converged = result.converged;
      }
    }
    rows.push_back(std::move(row));
  }
  // Sequential baseline normalizes the speedup column; first row otherwise.
  std::size_t baseline = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].config == "seq" || rows[i].config.rfind("seq:", 0) == 0) {
      baseline = i;
      break;
    }
  }
  for (auto& row : rows) row.speedup = rows[baseline].min_time / row.min_time;
  return rows;
}

int run_bench(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CommonOptions opt;
  std::size_t runs = 10;
  std::string configs_flag = "seq";
  try {
    parse_args(args, opt,
               [&](const std::string& a, std::size_t& i, const std::vector<std::string>& all) {
                 if (a == "--runs") {
                   if (i + 1 >= all.size()) throw UsageError("flag --runs needs a value");
                   runs = parse_flag_count(a, all[++i]);
                   if (runs < 1) throw UsageError("flag --runs: need at least one run");
                   return true;
                 }
                 if (a == "--configs") {
                   if (i + 1 >= all.size()) throw UsageError("flag --configs needs a value");
                   configs_flag = all[++i];
                   return true;
                 }
                 return false;
               });
    if (opt.positional.size() != 1) {
      throw UsageError(opt.positional.empty()
                           ? "missing input data path"
                           : "unexpected argument '" + opt.positional[1] + "'");
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    err << "usage: tron bench [data flags] [--runs K] [--configs seq,par:2,staged,mix:4] DATA\n";
    return kExitUsage;
  }

  std::vector<std::string> configs;
  {
    std::stringstream ss(configs_flag);
    std::string tag;
    while (std::getline(ss, tag, ',')) {
      if (!tag.empty()) configs.push_back(tag);
    }
    if (configs.empty()) {
      err << "usage error: flag --configs lists no configurations\n";
      return kExitUsage;
    }
  }

  Problem p;
  try {
    p = load_problem(opt, opt.positional[0]);
    if (p.instances() == 0) {
      throw ParseError("'" + opt.positional[0] + "' holds no instances", 0);
    }
  } catch (const ParseError& e) {
    return data_error(err, e);
  }

  std::vector<BenchRow> rows;
  try {
    rows = bench_sweep(p, opt.loss(), make_config(opt), configs, runs, opt.budget);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const BudgetExceededError& e) {
    err << "budget exceeded: " << e.what() << '\n';
    return kExitBudget;
  } catch (const NumericalFailureError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }

  char line[160];
  std::snprintf(line, sizeof(line), "%-12s %12s %9s %22s %6s %s\n", "config", "min_time_s",
                "speedup", "objective", "iters", "converged");
  out << line;
  for (const auto& row : rows) {
    std::snprintf(line, sizeof(line), "%-12s %12.6f %9.3f %22.12e %6zu %s\n", row.config.c_str(),
                  row.min_time, row.speedup, row.objective, row.outer_iterations,
                  row.converged ? "yes" : "no");
    out << line;
  }
  return kExitOk;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  if (args.empty()) {
    err << "usage: tron <train|predict|bench> [args]\n";
    return kExitUsage;
  }
  std::vector<std::string> rest(args.begin() + 1, args.end());
  if (args[0] == "train") return run_train(rest, out, err);
  if (args[0] == "predict") return run_predict(rest, out, err);
  if (args[0] == "bench") return run_bench(rest, out, err);
  err << "usage error: unknown command '" << args[0] << "'\n";
  err << "usage: tron <train|predict|bench> [args]\n";
  return kExitUsage;
}

}  // namespace tron::cli
