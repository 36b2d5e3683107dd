// lgplan: command-line front end. See docs/cli.md.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lgplan/domains.hpp"
#include "lgplan/errors.hpp"
#include "lgplan/graph.hpp"
#include "lgplan/heuristics.hpp"
#include "lgplan/interchange.hpp"
#include "lgplan/io.hpp"
#include "lgplan/model_io.hpp"
#include "lgplan/mpnn.hpp"
#include "lgplan/problem.hpp"
#include "lgplan/search.hpp"
#include "lgplan/theory.hpp"
#include "lgplan/training.hpp"

namespace fs = std::filesystem;
using namespace lgplan;

namespace {

constexpr const char* kVersion = "0.3.0";

struct Common {
  uint64_t seed = 0;
  int jobs = 1;
  std::string out = "out";
  bool no_timing = false;
};

struct TaskArgs {
  std::string domain;
  std::string problem;
};

void add_task_args(CLI::App* app, TaskArgs& t) {
  app->add_option("-d,--domain", t.domain, "PDDL domain file (omit for .sas/.task input)");
  app->add_option("-p,--problem", t.problem, "PDDL problem, .sas or .task file")->required();
}

Problem load_problem(const TaskArgs& t) {
  for (const auto& f : {t.domain, t.problem}) {
    if (!f.empty() && !fs::exists(f)) throw FileNotFound("no such file: " + f);
  }
  Problem p = Problem::load(t.domain, t.problem);
  p.set_name(fs::path(t.problem).stem().string());
  return p;
}

// Problems of one split of a suite written by `gen`, in file order.
std::vector<Problem> load_suite(const std::string& dir, const std::string& split) {
  const fs::path root(dir);
  const fs::path domain = root / "domain.pddl";
  if (!fs::exists(domain)) throw FileNotFound("no suite domain at " + domain.string());
  std::vector<fs::path> files;
  if (fs::is_directory(root / split)) {
    for (const auto& e : fs::directory_iterator(root / split)) {
      if (e.path().extension() == ".pddl") files.push_back(e.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw FileNotFound("no problems in " + (root / split).string());
  std::vector<Problem> out;
  for (const auto& f : files) {
    out.push_back(Problem::load(domain, f));
    out.back().set_name(split + "/" + f.stem().string());
  }
  return out;
}

SizeRange parse_range(const std::string& text) {
  const auto dash = text.find('-');
  try {
    if (dash == std::string::npos) {
      const int v = std::stoi(text);
      return {v, v};
    }
    return {std::stoi(text.substr(0, dash)), std::stoi(text.substr(dash + 1))};
  } catch (const std::exception&) {
    throw CLI::ValidationError("size range", "expected N or LO-HI, got '" + text + "'");
  }
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto end = comma == std::string::npos ? text.size() : comma;
    if (end > start) out.push_back(text.substr(start, end - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

// Resolved options of the chosen subcommand, plus the tool version.
void write_run_json(const CLI::App& app, const CLI::App& sub, const Common& common,
                    const std::vector<std::string>& argv) {
  nlohmann::ordered_json j;
  j["tool"] = "lgplan";
  j["version"] = kVersion;
  j["subcommand"] = sub.get_name();
  j["argv"] = argv;
  nlohmann::ordered_json opts;
  for (const CLI::App* a : {&app, &sub}) {
    for (const CLI::Option* o : a->get_options()) {
      if (o->get_lnames().empty() || o->get_lnames().front() == "help" ||
          o->get_lnames().front() == "version") {
        continue;
      }
      const std::string key = o->get_lnames().front();
      if (o->get_expected_max() == 0) {
        opts[key] = o->count() > 0;
      } else if (!o->results().empty()) {
        opts[key] = o->results().size() == 1 ? nlohmann::ordered_json(o->results().front())
                                             : nlohmann::ordered_json(o->results());
      } else {
        opts[key] = o->get_default_str();
      }
    }
  }
  j["options"] = std::move(opts);
  j["seed"] = common.seed;
  j["jobs"] = common.jobs;
  write_text_file(fs::path(common.out) / "run.json", j.dump(2) + "\n");
}

// ---------------------------------------------------------------------------

int cmd_ground(const Common& c, const TaskArgs& t) {
  const Problem p = load_problem(t);
  const auto& s = p.strips();
  write_text_file(fs::path(c.out) / "task.task", write_task_dump(s));
  std::printf("%s: %zu propositions, %zu actions\n", p.name().c_str(), s.propositions.size(),
              s.actions.size());
  if (const auto* g = p.grounding()) {
    for (const auto& w : g->warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  }
  return 0;
}

struct GraphArgs {
  std::string kind = "slg";
  std::string format = "json";
  std::string plan;
  int T = 4;
};

int cmd_graph(const Common& c, const TaskArgs& t, const GraphArgs& g) {
  const Problem p = load_problem(t);
  StripsState state = p.strips().initial_state();
  if (!g.plan.empty()) {
    if (!fs::exists(g.plan)) throw FileNotFound("no such file: " + g.plan);
    for (int a : parse_plan(p.strips(), read_text_file(g.plan))) {
      auto next = apply(p.strips(), state, a);
      if (!next) throw InvalidPlan("plan action " + p.strips().actions[static_cast<size_t>(a)].name +
                                   " is not applicable");
      state = std::move(*next);
    }
  }
  const IndexEncoder encoder(g.T);
  const StateEncoder encode(p, parse_graph_kind(g.kind), encoder);
  const LearningGraph graph = encode(state);
  const bool dot = g.format == "dot";
  write_text_file(fs::path(c.out) / (dot ? "graph.dot" : "graph.json"),
                  dot ? graph_to_dot(graph) : graph_to_json(graph));
  std::printf("%s graph: %d nodes", g.kind.c_str(), graph.num_nodes());
  for (int l = 0; l < graph.num_labels(); ++l) {
    std::printf(", %zu %s", graph.num_edges(l), label_names(graph.kind)[static_cast<size_t>(l)].c_str());
  }
  std::printf("\n");
  return 0;
}

struct TrainArgs {
  std::string suite;
  std::string split = "train";
  std::string kind = "slg";
  int layers = 8;
  int hidden = 64;
  int T = 4;
  std::string aggregator = "mean";
  std::string readout = "sum";
  int batch = 16;
  double lr = 1e-3;
  int patience = 10;
  int max_epochs = 10000;
  size_t hstar_budget = 1'000'000;
};

int cmd_train(const Common& c, const TrainArgs& a) {
  const auto problems = load_suite(a.suite, a.split);
  const GraphKind kind = parse_graph_kind(a.kind);
  const IndexEncoder encoder(a.T);
  std::vector<std::string> warnings;
  const auto samples =
      build_training_set(problems, kind, encoder, HStarOptions{a.hstar_budget}, &warnings);
  for (const auto& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());

  MpnnConfig mc;
  mc.kind = kind;
  mc.layers = a.layers;
  mc.hidden = a.hidden;
  mc.T = a.T;
  mc.aggregator = parse_aggregator(a.aggregator);
  mc.readout = parse_readout(a.readout);
  mc.seed = derive_seed(c.seed, "train/init");
  TrainConfig tc;
  tc.batch_size = a.batch;
  tc.lr0 = a.lr;
  tc.patience = a.patience;
  tc.max_epochs = a.max_epochs;
  tc.seed = derive_seed(c.seed, "train/data");
  tc.jobs = c.jobs;

  const auto result = train(samples, mc, tc);
  save_model(result.model, fs::path(c.out) / "model.lgm");
  write_text_file(fs::path(c.out) / "trace.csv", result.trace.to_csv(!c.no_timing));
  const auto& last = result.trace.epochs.back();
  std::printf("%zu tasks, %zu samples, %zu epochs (%s), final train %.4g holdout %.4g\n",
              problems.size(), samples.size(), result.trace.epochs.size(),
              result.trace.stop_reason.c_str(), last.train_loss, last.holdout_loss);
  return 0;
}

struct SearchArgs {
  std::string heuristic = "hff";
  std::string model;
  double timeout = 600.0;
  size_t max_nodes = 5'000'000;
  int eval_batch = 64;
};

SearchConfig search_config(const SearchArgs& s) {
  SearchConfig cfg;
  cfg.timeout_seconds = s.timeout;
  cfg.max_nodes = s.max_nodes;
  cfg.eval_batch = s.eval_batch;
  return cfg;
}

// A learned heuristic that owns its per-problem graph encoder.
struct LearnedHeuristic {
  std::shared_ptr<const MpnnModel> model;
  std::shared_ptr<const IndexEncoder> encoder;
  int jobs = 1;

  BatchHeuristic make(const Problem& p) const {
    auto enc = std::make_shared<StateEncoder>(p, model->config().kind, *encoder);
    auto h = model_heuristic(*model, *enc, jobs);
    return [enc, h, m = model, e = encoder](std::span<const StripsState> s, std::span<double> out) {
      h(s, out);
    };
  }
};

LearnedHeuristic load_learned(const std::string& path, int jobs) {
  if (!fs::exists(path)) throw FileNotFound("no such model file: " + path);
  auto model = std::make_shared<const MpnnModel>(load_model(path));
  auto encoder = std::make_shared<const IndexEncoder>(model->config().T);
  return {std::move(model), std::move(encoder), jobs};
}

int cmd_solve(const Common& c, const TaskArgs& t, const SearchArgs& s) {
  std::optional<LearnedHeuristic> learned;
  if (!s.model.empty()) learned = load_learned(s.model, c.jobs);
  const Problem p = load_problem(t);
  const BatchHeuristic h =
      learned ? learned->make(p) : oracle_heuristic(p.strips(), s.heuristic);
  const SearchResult r = gbfs(p.strips(), h, search_config(s));
  write_text_file(fs::path(c.out) / "result.json", result_json(r, !c.no_timing));
  if (r.plan) write_text_file(fs::path(c.out) / "plan.txt", plan_text(p.strips(), *r.plan));
  std::printf("%s: %s", p.name().c_str(), std::string(to_string(r.status)).c_str());
  if (r.solved()) std::printf(", cost %lld", static_cast<long long>(r.plan_cost));
  std::printf(", %lld expansions, %lld evaluations\n", r.expansions, r.evaluations);
  return 0;
}

int cmd_oracle(const Common& c, const TaskArgs& t, const std::string& names) {
  const Problem p = load_problem(t);
  const auto& s = p.strips();
  const StripsState init = s.initial_state();
  nlohmann::ordered_json j;
  j["task"] = p.name();
  for (const auto& name : split_list(names)) {
    HeuristicValue v;
    if (name == "hmax") v = h_dp(s, init, DpKind::kMax);
    else if (name == "hadd") v = h_dp(s, init, DpKind::kAdd);
    else if (name == "hff") v = h_ff(s, init);
    else if (name == "hplus") v = h_plus(s, init);
    else if (name == "hstar") v = h_star(s, init);
    else throw Error("unknown oracle '" + name + "' (expected hmax, hadd, hff, hplus, hstar)");
    j[name] = v.infinite() ? nlohmann::ordered_json("inf") : nlohmann::ordered_json(v.value);
    std::printf("%-6s %s\n", name.c_str(), v.to_string().c_str());
  }
  write_text_file(fs::path(c.out) / "oracle.json", j.dump(2) + "\n");
  return 0;
}

int cmd_theory(const Common& c, int random_tasks, int random_models) {
  TheoryOptions o;
  o.seed = c.seed;
  o.random_tasks = random_tasks;
  o.random_models = random_models;
  std::vector<TheoremVerdict> all;
  bool ok = true;
  const std::pair<const char*, std::vector<TheoremVerdict>> groups[] = {
      {"thm1", check_thm1(o)}, {"thm3", check_thm3(o)}, {"thm4", check_thm4(o)},
      {"thm5", check_thm5(o)}};
  for (const auto& [name, verdicts] : groups) {
    const bool pass = std::all_of(verdicts.begin(), verdicts.end(),
                                  [](const TheoremVerdict& v) { return v.pass; });
    std::printf("%s %s (%zu checks)\n", pass ? "PASS" : "FAIL", name, verdicts.size());
    for (const auto& v : verdicts) {
      if (!v.pass) std::printf("  %s/%s: %s\n", v.pair_id.c_str(), v.graph_kind.c_str(), v.detail.c_str());
    }
    ok = ok && pass;
    all.insert(all.end(), verdicts.begin(), verdicts.end());
  }
  write_text_file(fs::path(c.out) / "theory.json", verdicts_json(all));
  return ok ? 0 : 1;
}

struct GenArgs {
  std::string domain = "gripper";
  std::string train = "1-6";
  std::string validate = "7-8";
  std::string test = "7-10";
  int per_size = 1;
};

int cmd_gen(const Common& c, const GenArgs& g) {
  SuiteSpec spec;
  spec.domain = parse_domain(g.domain);
  spec.train = parse_range(g.train);
  spec.validate = parse_range(g.validate);
  spec.test = parse_range(g.test);
  spec.per_size = g.per_size;
  spec.seed = c.seed;
  const Suite suite = generate(spec);
  write_suite(suite, c.out);
  std::printf("%s: %zu train, %zu validate, %zu test tasks\n", g.domain.c_str(), suite.train.size(),
              suite.validate.size(), suite.test.size());
  return 0;
}

int cmd_experiment(const Common& c, const std::string& suite, const std::string& split,
                   const std::string& names, const std::vector<std::string>& models,
                   const SearchArgs& s) {
  const auto problems = load_suite(suite, split);
  std::vector<HeuristicSpec> specs;
  for (const auto& name : split_list(names)) {
    specs.push_back({name, [name](const Problem& p) { return oracle_heuristic(p.strips(), name); }});
  }
  for (const auto& path : models) {
    const LearnedHeuristic learned = load_learned(path, 1);
    specs.push_back({"model:" + fs::path(path).stem().string(),
                     [learned](const Problem& p) { return learned.make(p); }});
  }
  const auto report = run_experiment(problems, specs, search_config(s), c.jobs);
  write_text_file(fs::path(c.out) / "results.csv", report.to_csv(!c.no_timing));
  write_text_file(fs::path(c.out) / "coverage.csv", report.coverage_csv());
  std::printf("%-28s %-18s %-10s %6s %10s\n", "task", "heuristic", "status", "cost", "expanded");
  for (const auto& row : report.rows) {
    std::printf("%-28s %-18s %-10s %6s %10lld\n", row.task.c_str(), row.heuristic.c_str(),
                std::string(to_string(row.result.status)).c_str(),
                row.result.solved() ? std::to_string(row.result.plan_cost).c_str() : "-",
                row.result.expansions);
  }
  for (const auto& spec : specs) {
    std::printf("coverage %s: %d/%zu\n", spec.name.c_str(), report.coverage(spec.name),
                problems.size());
  }
  return 0;
}

void add_search_args(CLI::App* app, SearchArgs& s) {
  app->add_option("--timeout", s.timeout, "search time limit in seconds")->capture_default_str();
  app->add_option("--max-nodes", s.max_nodes, "cap on distinct states seen")->capture_default_str();
  app->add_option("--eval-batch", s.eval_batch, "successors per heuristic batch")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lgplan: learning graphs, learned heuristics and greedy search for classical planning"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Common c;
  app.add_option("--seed", c.seed, "master seed for every random stream")->capture_default_str();
  app.add_option("-j,--jobs", c.jobs, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("-o,--out", c.out, "output directory")->capture_default_str();
  app.add_flag("--no-timing", c.no_timing, "write zero timings so outputs are byte-identical");

  TaskArgs task;
  auto* ground = app.add_subcommand("ground", "ground a task and write its STRIPS dump");
  add_task_args(ground, task);

  GraphArgs graph;
  auto* graph_cmd = app.add_subcommand("graph", "write the learning graph of a state");
  add_task_args(graph_cmd, task);
  graph_cmd->add_option("-k,--kind", graph.kind, "slg, flg or llg")
      ->capture_default_str()
      ->check(CLI::IsMember({"slg", "flg", "llg"}));
  graph_cmd->add_option("--format", graph.format, "json or dot")
      ->capture_default_str()
      ->check(CLI::IsMember({"json", "dot"}));
  graph_cmd->add_option("--plan", graph.plan, "apply this plan to the initial state first");
  graph_cmd->add_option("--T", graph.T, "index encoding width (llg)")->capture_default_str();

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "train a model on a generated suite");
  train_cmd->add_option("-s,--suite", tr.suite, "suite directory written by gen")->required();
  train_cmd->add_option("--split", tr.split, "suite split to train on")->capture_default_str();
  train_cmd->add_option("-k,--kind", tr.kind, "slg, flg or llg")
      ->capture_default_str()
      ->check(CLI::IsMember({"slg", "flg", "llg"}));
  train_cmd->add_option("--layers", tr.layers)->capture_default_str()->check(CLI::PositiveNumber);
  train_cmd->add_option("--hidden", tr.hidden)->capture_default_str()->check(CLI::PositiveNumber);
  train_cmd->add_option("--T", tr.T, "index encoding width (llg)")->capture_default_str();
  train_cmd->add_option("--aggregator", tr.aggregator)
      ->capture_default_str()
      ->check(CLI::IsMember({"mean", "max", "sum"}));
  train_cmd->add_option("--readout", tr.readout)
      ->capture_default_str()
      ->check(CLI::IsMember({"mean", "max", "sum"}));
  train_cmd->add_option("--batch", tr.batch)->capture_default_str()->check(CLI::PositiveNumber);
  train_cmd->add_option("--lr", tr.lr)->capture_default_str();
  train_cmd->add_option("--patience", tr.patience)->capture_default_str();
  train_cmd->add_option("--max-epochs", tr.max_epochs)->capture_default_str();
  train_cmd->add_option("--hstar-budget", tr.hstar_budget, "state cap for optimal labelling")
      ->capture_default_str();

  SearchArgs search;
  auto* solve = app.add_subcommand("solve", "run greedy best-first search on a task");
  add_task_args(solve, task);
  auto* hopt = solve->add_option("-H,--heuristic", search.heuristic,
                                 "blind, hmax, hadd, hff, hplus or hstar")
                   ->capture_default_str();
  solve->add_option("-m,--model", search.model, "learned model file")->excludes(hopt);
  add_search_args(solve, search);

  std::string oracles = "hmax,hadd,hff,hplus,hstar";
  auto* oracle = app.add_subcommand("oracle", "print oracle heuristic values of the initial state");
  add_task_args(oracle, task);
  oracle->add_option("--heuristics", oracles, "comma-separated list")->capture_default_str();

  int random_tasks = 200, random_models = 100;
  auto* theory = app.add_subcommand("theory", "run every theorem check");
  theory->add_option("--random-tasks", random_tasks)->capture_default_str();
  theory->add_option("--random-models", random_models)->capture_default_str();

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "generate a train/validate/test suite");
  gen_cmd->add_option("--domain", gen.domain)
      ->capture_default_str()
      ->check(CLI::IsMember({"gripper", "blocksworld", "visitall", "spanner"}));
  gen_cmd->add_option("--train", gen.train, "size range LO-HI")->capture_default_str();
  gen_cmd->add_option("--validate", gen.validate, "size range LO-HI")->capture_default_str();
  gen_cmd->add_option("--test", gen.test, "size range LO-HI")->capture_default_str();
  gen_cmd->add_option("--per-size", gen.per_size)->capture_default_str();

  std::string ex_suite, ex_split = "test", ex_heuristics = "blind,hff";
  std::vector<std::string> ex_models;
  auto* experiment = app.add_subcommand("experiment", "coverage table over a suite split");
  experiment->add_option("-s,--suite", ex_suite, "suite directory written by gen")->required();
  experiment->add_option("--split", ex_split)->capture_default_str();
  experiment->add_option("-H,--heuristics", ex_heuristics, "comma-separated oracle heuristics")
      ->capture_default_str();
  experiment->add_option("-m,--model", ex_models, "learned model file (repeatable)");
  add_search_args(experiment, search);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "usage error: %s\nhint: run `lgplan --help` or `lgplan <subcommand> --help`\n",
                 e.what());
    return 2;
  }

  const CLI::App* sub = app.get_subcommands().front();
  const std::vector<std::string> args(argv + 1, argv + argc);
  try {
    write_run_json(app, *sub, c, args);
    if (sub == ground) return cmd_ground(c, task);
    if (sub == graph_cmd) return cmd_graph(c, task, graph);
    if (sub == train_cmd) return cmd_train(c, tr);
    if (sub == solve) return cmd_solve(c, task, search);
    if (sub == oracle) return cmd_oracle(c, task, oracles);
    if (sub == theory) return cmd_theory(c, random_tasks, random_models);
    if (sub == gen_cmd) return cmd_gen(c, gen);
    if (sub == experiment) return cmd_experiment(c, ex_suite, ex_split, ex_heuristics, ex_models, search);
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 1;
  }
  return 2;
}
