#include "lgplan/domains.hpp"

#include <cstdio>

#include <nlohmann/json.hpp>

#include "lgplan/errors.hpp"
#include "lgplan/interchange.hpp"
#include "lgplan/io.hpp"
#include "lgplan/pddl.hpp"
#include "lgplan/random.hpp"

namespace lgplan {

namespace {

const char* const kGripperDomain = R"((define (domain gripper)
  (:requirements :strips :typing)
  (:types room ball gripper)
  (:predicates (at-robby ?r - room) (at ?b - ball ?r - room)
               (free ?g - gripper) (carry ?b - ball ?g - gripper))
  (:action move
    :parameters (?from ?to - room)
    :precondition (at-robby ?from)
    :effect (and (at-robby ?to) (not (at-robby ?from))))
  (:action pick
    :parameters (?b - ball ?r - room ?g - gripper)
    :precondition (and (at ?b ?r) (at-robby ?r) (free ?g))
    :effect (and (carry ?b ?g) (not (at ?b ?r)) (not (free ?g))))
  (:action drop
    :parameters (?b - ball ?r - room ?g - gripper)
    :precondition (and (carry ?b ?g) (at-robby ?r))
    :effect (and (at ?b ?r) (free ?g) (not (carry ?b ?g)))))
)";

const char* const kBlocksworldDomain = R"((define (domain blocksworld)
  (:requirements :strips)
  (:predicates (on ?x ?y) (ontable ?x) (clear ?x) (handempty) (holding ?x))
  (:action pick-up
    :parameters (?x)
    :precondition (and (clear ?x) (ontable ?x) (handempty))
    :effect (and (holding ?x) (not (ontable ?x)) (not (clear ?x)) (not (handempty))))
  (:action put-down
    :parameters (?x)
    :precondition (holding ?x)
    :effect (and (ontable ?x) (clear ?x) (handempty) (not (holding ?x))))
  (:action stack
    :parameters (?x ?y)
    :precondition (and (holding ?x) (clear ?y))
    :effect (and (on ?x ?y) (clear ?x) (handempty) (not (holding ?x)) (not (clear ?y))))
  (:action unstack
    :parameters (?x ?y)
    :precondition (and (on ?x ?y) (clear ?x) (handempty))
    :effect (and (holding ?x) (clear ?y) (not (on ?x ?y)) (not (clear ?x)) (not (handempty)))))
)";

const char* const kVisitallDomain = R"((define (domain visitall)
  (:requirements :strips :typing)
  (:types place)
  (:predicates (connected ?x ?y - place) (at-robot ?x - place) (visited ?x - place))
  (:action move
    :parameters (?from ?to - place)
    :precondition (and (at-robot ?from) (connected ?from ?to))
    :effect (and (at-robot ?to) (visited ?to) (not (at-robot ?from)))))
)";

const char* const kSpannerDomain = R"((define (domain spanner)
  (:requirements :strips :typing)
  (:types location locatable - object
          man nut spanner - locatable)
  (:predicates (at ?m - locatable ?l - location) (carrying ?m - man ?s - spanner)
               (useable ?s - spanner) (link ?l1 ?l2 - location)
               (tightened ?n - nut) (loose ?n - nut))
  (:action walk
    :parameters (?start ?end - location ?m - man)
    :precondition (and (at ?m ?start) (link ?start ?end))
    :effect (and (not (at ?m ?start)) (at ?m ?end)))
  (:action pickup_spanner
    :parameters (?l - location ?s - spanner ?m - man)
    :precondition (and (at ?m ?l) (at ?s ?l))
    :effect (and (not (at ?s ?l)) (carrying ?m ?s)))
  (:action tighten_nut
    :parameters (?l - location ?s - spanner ?m - man ?n - nut)
    :precondition (and (at ?m ?l) (at ?n ?l) (carrying ?m ?s) (useable ?s) (loose ?n))
    :effect (and (not (loose ?n)) (not (useable ?s)) (tightened ?n))))
)";

std::string pad(int v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02d", v);
  return buf;
}

struct ProblemWriter {
  std::string objects, init, goal;

  void object(const std::string& name, const std::string& type = "") {
    objects += " " + name;
    if (!type.empty()) objects += " - " + type;
  }
  void fact(const std::string& atom) { init += "\n    (" + atom + ")"; }
  void target(const std::string& atom) { goal += "\n    (" + atom + ")"; }

  std::string text(const std::string& name, Domain d) const {
    return "(define (problem " + name + ")\n  (:domain " + std::string(to_string(d)) +
           ")\n  (:objects" + objects + ")\n  (:init" + init + ")\n  (:goal (and" + goal +
           ")))\n";
  }
};

std::string gripper_problem(const std::string& name, int b) {
  ProblemWriter w;
  w.object("rooma", "room");
  w.object("roomb", "room");
  w.object("left", "gripper");
  w.object("right", "gripper");
  for (int i = 1; i <= b; ++i) w.object("ball" + std::to_string(i), "ball");
  w.fact("at-robby rooma");
  w.fact("free left");
  w.fact("free right");
  for (int i = 1; i <= b; ++i) {
    w.fact("at ball" + std::to_string(i) + " rooma");
    w.target("at ball" + std::to_string(i) + " roomb");
  }
  return w.text(name, Domain::kGripper);
}

// Random tower configuration: a shuffled order cut into stacks.
std::vector<std::vector<int>> random_towers(Rng& rng, int blocks) {
  std::vector<int> order(static_cast<size_t>(blocks));
  for (int i = 0; i < blocks; ++i) order[static_cast<size_t>(i)] = i + 1;
  rng.shuffle(std::span<int>(order));
  std::vector<std::vector<int>> towers;
  for (int b : order) {
    if (towers.empty() || rng.bernoulli(0.5)) towers.emplace_back();
    towers.back().push_back(b);
  }
  return towers;
}

std::string blocksworld_problem(const std::string& name, int blocks, uint64_t seed) {
  Rng rng(derive_seed(seed, "gen/blocksworld"));
  auto init = random_towers(rng, blocks);
  auto goal = random_towers(rng, blocks);
  auto block = [](int b) { return "b" + std::to_string(b); };
  ProblemWriter w;
  for (int b = 1; b <= blocks; ++b) w.object(block(b));
  w.fact("handempty");
  for (const auto& t : init) {
    w.fact("ontable " + block(t.front()));
    for (size_t i = 1; i < t.size(); ++i) w.fact("on " + block(t[i]) + " " + block(t[i - 1]));
    w.fact("clear " + block(t.back()));
  }
  for (const auto& t : goal) {
    w.target("ontable " + block(t.front()));
    for (size_t i = 1; i < t.size(); ++i) w.target("on " + block(t[i]) + " " + block(t[i - 1]));
  }
  return w.text(name, Domain::kBlocksworld);
}

std::string visitall_problem(const std::string& name, int n) {
  auto cell = [](int x, int y) { return "c-" + std::to_string(x) + "-" + std::to_string(y); };
  ProblemWriter w;
  for (int x = 1; x <= n; ++x) {
    for (int y = 1; y <= n; ++y) w.object(cell(x, y), "place");
  }
  w.fact("at-robot " + cell(1, 1));
  w.fact("visited " + cell(1, 1));
  for (int x = 1; x <= n; ++x) {
    for (int y = 1; y <= n; ++y) {
      if (x > 1) w.fact("connected " + cell(x, y) + " " + cell(x - 1, y));
      if (x < n) w.fact("connected " + cell(x, y) + " " + cell(x + 1, y));
      if (y > 1) w.fact("connected " + cell(x, y) + " " + cell(x, y - 1));
      if (y < n) w.fact("connected " + cell(x, y) + " " + cell(x, y + 1));
      w.target("visited " + cell(x, y));
    }
  }
  return w.text(name, Domain::kVisitall);
}

std::string spanner_problem(const std::string& name, int k, uint64_t seed) {
  Rng rng(derive_seed(seed, "gen/spanner"));
  ProblemWriter w;
  w.object("bob", "man");
  for (int i = 1; i <= k; ++i) w.object("spanner" + std::to_string(i), "spanner");
  for (int i = 1; i <= k; ++i) w.object("nut" + std::to_string(i), "nut");
  w.object("shed", "location");
  for (int i = 1; i <= k; ++i) w.object("location" + std::to_string(i), "location");
  w.object("gate", "location");
  w.fact("at bob shed");
  for (int i = 1; i <= k; ++i) {
    const int loc = static_cast<int>(rng.range(1, k));
    w.fact("at spanner" + std::to_string(i) + " location" + std::to_string(loc));
    w.fact("useable spanner" + std::to_string(i));
  }
  for (int i = 1; i <= k; ++i) {
    w.fact("loose nut" + std::to_string(i));
    w.fact("at nut" + std::to_string(i) + " gate");
    w.target("tightened nut" + std::to_string(i));
  }
  w.fact("link shed location1");
  for (int i = 1; i < k; ++i) {
    w.fact("link location" + std::to_string(i) + " location" + std::to_string(i + 1));
  }
  w.fact("link location" + std::to_string(k) + " gate");
  return w.text(name, Domain::kSpanner);
}

void check_range(Domain d, SizeRange r, const char* split) {
  const auto b = size_bounds(d);
  if (r.lo > r.hi || r.lo < b.lo || r.hi > b.hi) {
    throw InvalidSize(std::string(split) + " sizes [" + std::to_string(r.lo) + "," +
                      std::to_string(r.hi) + "] outside " + std::string(to_string(d)) +
                      " bounds [" + std::to_string(b.lo) + "," + std::to_string(b.hi) + "]");
  }
}

}  // namespace

std::string_view to_string(Domain domain) {
  switch (domain) {
    case Domain::kGripper: return "gripper";
    case Domain::kBlocksworld: return "blocksworld";
    case Domain::kVisitall: return "visitall";
    case Domain::kSpanner: return "spanner";
  }
  return "?";
}

Domain parse_domain(std::string_view name) {
  for (Domain d : {Domain::kGripper, Domain::kBlocksworld, Domain::kVisitall, Domain::kSpanner}) {
    if (name == to_string(d)) return d;
  }
  throw Error("unknown domain '" + std::string(name) +
              "' (expected gripper, blocksworld, visitall, spanner)");
}

SizeRange size_bounds(Domain domain) {
  switch (domain) {
    case Domain::kGripper: return {1, 100};
    case Domain::kBlocksworld: return {1, 40};
    case Domain::kVisitall: return {2, 30};
    case Domain::kSpanner: return {1, 60};
  }
  return {};
}

std::string domain_pddl(Domain domain) {
  switch (domain) {
    case Domain::kGripper: return kGripperDomain;
    case Domain::kBlocksworld: return kBlocksworldDomain;
    case Domain::kVisitall: return kVisitallDomain;
    case Domain::kSpanner: return kSpannerDomain;
  }
  return "";
}

GeneratedTask generate_instance(Domain domain, int size, uint64_t seed) {
  check_range(domain, {size, size}, "instance");
  GeneratedTask g;
  g.domain = domain;
  g.size = size;
  g.seed = seed;
  g.name = std::string(to_string(domain)) + "-n" + pad(size) + "-s" + std::to_string(seed);
  switch (domain) {
    case Domain::kGripper: g.problem_pddl = gripper_problem(g.name, size); break;
    case Domain::kBlocksworld: g.problem_pddl = blocksworld_problem(g.name, size, seed); break;
    case Domain::kVisitall: g.problem_pddl = visitall_problem(g.name, size); break;
    case Domain::kSpanner: g.problem_pddl = spanner_problem(g.name, size, seed); break;
  }
  g.task = parse_pddl(domain_pddl(domain), g.problem_pddl);
  return g;
}

int gripper_optimal_cost(int balls) {
  if (balls < 1) throw InvalidSize("gripper needs at least one ball");
  return 2 * balls + 2 * ((balls + 1) / 2) - 1;
}

void SuiteSpec::check() const {
  check_range(domain, train, "train");
  check_range(domain, validate, "validate");
  check_range(domain, test, "test");
  if (per_size < 1) throw InvalidSize("per_size must be at least 1");
  if (train.hi >= test.lo) {
    throw InvalidSize("train sizes must lie below test sizes (train max " +
                      std::to_string(train.hi) + ", test min " + std::to_string(test.lo) + ")");
  }
}

Suite generate(const SuiteSpec& spec) {
  spec.check();
  Suite suite;
  suite.spec = spec;
  auto fill = [&](SizeRange r, const char* split, std::vector<GeneratedTask>& out) {
    for (int size = r.lo; size <= r.hi; ++size) {
      for (int k = 0; k < spec.per_size; ++k) {
        const uint64_t seed = hash_combine(
            derive_seed(spec.seed, std::string("gen/") + split),
            static_cast<uint64_t>(size) * 1000003ULL + static_cast<uint64_t>(k));
        auto task = generate_instance(spec.domain, size, seed % 1000000007ULL);
        out.push_back(std::move(task));
      }
    }
  };
  fill(spec.train, "train", suite.train);
  fill(spec.validate, "validate", suite.validate);
  fill(spec.test, "test", suite.test);
  return suite;
}

std::string Suite::manifest_json() const {
  nlohmann::ordered_json j;
  j["domain"] = std::string(to_string(spec.domain));
  j["seed"] = spec.seed;
  j["per_size"] = spec.per_size;
  auto split = [](SizeRange r, const std::vector<GeneratedTask>& tasks) {
    nlohmann::ordered_json s;
    s["sizes"] = {r.lo, r.hi};
    auto files = nlohmann::ordered_json::array();
    for (size_t i = 0; i < tasks.size(); ++i) {
      files.push_back({{"file", "p" + pad(static_cast<int>(i + 1)) + ".pddl"},
                       {"name", tasks[i].name},
                       {"size", tasks[i].size},
                       {"seed", tasks[i].seed}});
    }
    s["tasks"] = std::move(files);
    return s;
  };
  j["train"] = split(spec.train, train);
  j["validate"] = split(spec.validate, validate);
  j["test"] = split(spec.test, test);
  return j.dump(2) + "\n";
}

void write_suite(const Suite& suite, const std::filesystem::path& dir) {
  write_text_file(dir / "domain.pddl", domain_pddl(suite.spec.domain));
  auto emit = [&](const char* split, const std::vector<GeneratedTask>& tasks) {
    for (size_t i = 0; i < tasks.size(); ++i) {
      write_text_file(dir / split / ("p" + pad(static_cast<int>(i + 1)) + ".pddl"),
                      tasks[i].problem_pddl);
    }
  };
  emit("train", suite.train);
  emit("validate", suite.validate);
  emit("test", suite.test);
  write_text_file(dir / "manifest.json", suite.manifest_json());
}

std::vector<Problem> to_problems(std::span<const GeneratedTask> tasks) {
  std::vector<Problem> out;
  out.reserve(tasks.size());
  for (const auto& t : tasks) {
    out.push_back(Problem::from_lifted(t.task));
    out.back().set_name(t.name);
  }
  return out;
}

std::vector<LabeledGraphSample> build_training_set(std::span<const Problem> tasks, GraphKind kind,
                                                   const IndexEncoder& encoder,
                                                   const HStarOptions& budget,
                                                   std::vector<std::string>* warnings) {
  std::vector<LabeledGraphSample> samples;
  for (const auto& problem : tasks) {
    const StripsTask& t = problem.strips();
    std::optional<std::vector<int>> plan;
    try {
      plan = optimal_plan(t, t.initial_state(), budget);
    } catch (const BudgetExceeded& e) {
      if (warnings) warnings->push_back(problem.name() + ": skipped, " + e.what());
      continue;
    }
    if (!plan) {
      if (warnings) warnings->push_back(problem.name() + ": skipped, unsolvable");
      continue;
    }
    const StateEncoder encode(problem, kind, encoder);
    for (auto& ls : label_dataset(t, *plan)) {
      samples.push_back({encode(ls.state), ls.target});
    }
  }
  return samples;
}

}  // namespace lgplan
