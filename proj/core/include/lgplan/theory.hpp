#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lgplan/graph.hpp"
#include "lgplan/heuristics.hpp"
#include "lgplan/random.hpp"
#include "lgplan/task.hpp"

namespace lgplan {

// ---------------------------------------------------------------------------
// 1-WL colour refinement
// ---------------------------------------------------------------------------

// Stable colour multiset after refining a graph in which every labelled
// edge became an auxiliary node coloured by its label. LLG index-encoding
// features are coloured by the argument index, not the float vector.
struct ColorHistogram {
  std::vector<std::pair<uint64_t, int>> counts;  // (colour, multiplicity), sorted
  int rounds = 0;                                // refinement rounds until stable

  // Two graphs are WL-equivalent iff they stabilise after the same number of
  // rounds with the same histogram.
  friend bool operator==(const ColorHistogram&, const ColorHistogram&) = default;
};

ColorHistogram wl_refine(const LearningGraph& graph);

// Cross-check: refines the disjoint union with an exact colour dictionary
// (no hashing) and compares the two halves.
bool wl_equivalent_exact(const LearningGraph& a, const LearningGraph& b);

// ---------------------------------------------------------------------------
// Counterexample generators
// ---------------------------------------------------------------------------

// P = G = {p0, p1}, s0 = {p0}; a0 adds p1 and deletes p0, a1 adds p0.
// h* = 2, h+ = 1.
StripsTask gen_thm2_example();

// Two-object Q/W tasks that share LLG colours but differ in solvability.
std::pair<LiftedTask, LiftedTask> gen_thm3_pair();

// The 6-action, 4-proposition delete-free pair with h* = 4 and 3.
std::pair<StripsTask, StripsTask> gen_thm4_pair();

// Grid family over p(x,y), x,y in [n]: h* = n^2 and 2n - 1. Throws
// InvalidSize for n < 2.
std::pair<StripsTask, StripsTask> gen_thm5_pair(int n);

// Random unit-cost task with 1..max_props propositions and 1..max_actions
// actions.
StripsTask random_unit_task(Rng& rng, int max_props = 8, int max_actions = 8);

// ---------------------------------------------------------------------------
// Exact message-passing program for h_max / h_add
// ---------------------------------------------------------------------------

enum class DeleteEdges { kIgnoreLabel, kDropEdges };

// Runs the 2L+2-layer program on an SLG: embedding, L alternating
// action/proposition rounds, then the goal readout. B plays the role of
// infinity. Throws BoundViolation when the readout reaches B or a
// proposition value leaves [0, B]; throws Error for non-SLG graphs.
double exact_mpnn_heuristic(const LearningGraph& slg, DpKind which, int L, double B,
                            DeleteEdges deletes = DeleteEdges::kIgnoreLabel);

// ---------------------------------------------------------------------------
// Verdicts
// ---------------------------------------------------------------------------

struct TheoremVerdict {
  std::string theorem;  // "thm1" .. "thm5"
  std::string pair_id;
  std::string graph_kind;  // "slg" | "flg" | "llg" | "-"
  bool wl_equal = false;
  std::vector<std::string> h_values;
  double mpnn_gap = 0.0;
  bool pass = false;
  std::string detail;
};

struct TheoryOptions {
  uint64_t seed = 0;
  int random_tasks = 200;
  int random_models = 100;
  std::vector<int> thm5_sizes{2, 3, 4, 5};
};

std::vector<TheoremVerdict> check_thm1(const TheoryOptions& options);
std::vector<TheoremVerdict> check_thm2();
std::vector<TheoremVerdict> check_thm3(const TheoryOptions& options);
std::vector<TheoremVerdict> check_thm4(const TheoryOptions& options);
std::vector<TheoremVerdict> check_thm5(const TheoryOptions& options);

// Largest |F(G1) - F(G2)| over `count` seeded random models of `kind`.
double max_model_gap(const LearningGraph& g1, const LearningGraph& g2, uint64_t seed, int count);

// JSON array of verdict objects.
std::string verdicts_json(const std::vector<TheoremVerdict>& verdicts);

}  // namespace lgplan
