#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "lgplan/graph.hpp"
#include "lgplan/grounding.hpp"
#include "lgplan/task.hpp"

namespace lgplan {

// A task in every representation the toolkit needs. Search always runs on
// the STRIPS form; graphs are built from whichever form the kind requires.
class Problem {
 public:
  enum class Source { kPddl, kSas, kStrips };

  static Problem from_lifted(LiftedTask lifted, const GroundingOptions& options = {});
  static Problem from_sas(FdrTask fdr);
  static Problem from_strips(StripsTask strips);
  // PDDL domain + problem, or a single .sas / .task dump file (domain empty).
  static Problem load(const std::filesystem::path& domain, const std::filesystem::path& problem,
                      const GroundingOptions& options = {});

  Source source() const { return source_; }
  const std::string& name() const { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }

  const StripsTask& strips() const { return strips_; }
  // Lifted task: parsed PDDL, or the propositional lifting of a STRIPS task.
  // Throws UnsupportedFeature for SAS input.
  const LiftedTask& lifted() const;
  // SAS input, or the binary encoding of the STRIPS task.
  const FdrTask& fdr() const { return fdr_; }
  const GroundingMap* grounding() const { return grounding_ ? &*grounding_ : nullptr; }

  FdrState to_fdr(const StripsState& s) const;
  std::vector<Atom> to_lifted(const StripsState& s) const;

 private:
  Source source_ = Source::kStrips;
  std::string name_;
  StripsTask strips_;
  FdrTask fdr_;
  std::optional<LiftedTask> lifted_;
  std::optional<GroundingMap> grounding_;
  std::optional<StripsView> view_;
};

// Turns search states into learning graphs of one kind. Holds references to
// the problem and encoder, which must outlive it.
class StateEncoder {
 public:
  StateEncoder(const Problem& problem, GraphKind kind, const IndexEncoder& encoder);

  GraphKind kind() const { return kind_; }
  LearningGraph operator()(const StripsState& state) const;

 private:
  const Problem& problem_;
  GraphKind kind_;
  const IndexEncoder& encoder_;
  std::unique_ptr<LlgBuilder> llg_;
};

}  // namespace lgplan
