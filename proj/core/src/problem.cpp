#include "lgplan/problem.hpp"

#include "lgplan/errors.hpp"
#include "lgplan/interchange.hpp"
#include "lgplan/io.hpp"
#include "lgplan/pddl.hpp"
#include "lgplan/sas.hpp"

namespace lgplan {

Problem Problem::from_lifted(LiftedTask lifted, const GroundingOptions& options) {
  Problem p;
  p.source_ = Source::kPddl;
  p.name_ = lifted.problem_name;
  GroundedTask grounded = ground(lifted, options);
  p.strips_ = std::move(grounded.task);
  p.grounding_ = std::move(grounded.map);
  p.fdr_ = binary_fdr_encoding(p.strips_);
  p.lifted_ = std::move(lifted);
  return p;
}

Problem Problem::from_sas(FdrTask fdr) {
  fdr.validate();
  Problem p;
  p.source_ = Source::kSas;
  p.name_ = "sas";
  p.view_ = strips_view(fdr);
  p.strips_ = p.view_->task;
  p.fdr_ = std::move(fdr);
  return p;
}

Problem Problem::from_strips(StripsTask strips) {
  strips.validate();
  Problem p;
  p.source_ = Source::kStrips;
  p.name_ = "strips";
  p.fdr_ = binary_fdr_encoding(strips);
  p.lifted_ = propositional_lifting(strips);
  p.strips_ = std::move(strips);
  return p;
}

Problem Problem::load(const std::filesystem::path& domain, const std::filesystem::path& problem,
                      const GroundingOptions& options) {
  if (domain.empty()) {
    if (problem.extension() == ".task") {
      Problem p = from_strips(read_task_dump(read_text_file(problem)));
      p.name_ = problem.stem().string();
      return p;
    }
    if (problem.extension() != ".sas") {
      throw Error("a domain file is required unless the task is a .sas or .task file");
    }
    Problem p = from_sas(parse_sas(read_text_file(problem)));
    p.name_ = problem.stem().string();
    return p;
  }
  return from_lifted(parse_pddl_files(domain, problem), options);
}

const LiftedTask& Problem::lifted() const {
  if (!lifted_) throw UnsupportedFeature("lifted graphs need PDDL or STRIPS input, not SAS");
  return *lifted_;
}

FdrState Problem::to_fdr(const StripsState& s) const {
  if (view_) return view_->to_fdr(s);
  FdrState out(strips_.propositions.size(), 0);
  for (int p : s.members()) out[static_cast<size_t>(p)] = 1;
  return out;
}

std::vector<Atom> Problem::to_lifted(const StripsState& s) const {
  if (grounding_) return grounding_->lifted_state(s);
  if (!lifted_) throw UnsupportedFeature("lifted graphs need PDDL or STRIPS input, not SAS");
  std::vector<Atom> atoms;
  for (int p : s.members()) atoms.push_back({p, {}});
  return atoms;
}

StateEncoder::StateEncoder(const Problem& problem, GraphKind kind, const IndexEncoder& encoder)
    : problem_(problem), kind_(kind), encoder_(encoder) {
  if (kind == GraphKind::kLlg) llg_ = std::make_unique<LlgBuilder>(problem.lifted(), encoder);
}

LearningGraph StateEncoder::operator()(const StripsState& state) const {
  switch (kind_) {
    case GraphKind::kSlg: return build_slg(problem_.strips(), state);
    case GraphKind::kFlg: return build_flg(problem_.fdr(), problem_.to_fdr(state));
    case GraphKind::kLlg: {
      const auto atoms = problem_.to_lifted(state);
      return llg_->build(atoms);
    }
  }
  throw Error("unknown graph kind");
}

}  // namespace lgplan
