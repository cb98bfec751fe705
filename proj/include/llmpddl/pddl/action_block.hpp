#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "llmpddl/pddl/ast.hpp"
#include "llmpddl/pddl/errors.hpp"
#include "llmpddl/pddl/parser.hpp"

namespace llmpddl::pddl {

// Sections of the structured reply an LLM gives for one action.
struct ActionBlock {
  std::vector<TypedName> params;
  std::vector<std::string> param_notes;  // per parameter, may be empty
  std::vector<Literal> precondition;
  std::vector<Equality> constraints;
  std::vector<Atom> add_effects;
  std::vector<Atom> del_effects;
  std::vector<PredicateDef> new_predicates;
  std::vector<UnsupportedUse> unsupported;

  ActionModel to_model(std::string name, std::string provenance = {}) const;
};

struct ActionBlockOptions {
  // Require fenced snippets and no prose around them.
  bool strict = false;
};

class MissingSection : public PddlError {
 public:
  explicit MissingSection(std::string section);
  const std::string& section() const { return section_; }

 private:
  std::string section_;
};

class SnippetSyntaxError : public PddlError {
 public:
  SnippetSyntaxError(std::string section, const std::string& detail);
  const std::string& section() const { return section_; }

 private:
  std::string section_;
};

// Unsupported connectives are recorded in `unsupported`, not thrown, so the
// caller can turn them into feedback.
ActionBlock parse_action_block(std::string_view text, const ActionBlockOptions& options = {});

// Writes a reply in the sectioned layout parse_action_block reads. Used to
// author scripted replies and cassettes.
std::string print_action_block(const ActionModel& model, const std::vector<PredicateDef>& new_predicates,
                               const std::vector<std::string>& param_notes = {});

// Finds the first PDDL expression in chatty text: the first ``` fence when
// present, otherwise the first balanced parenthesis group. Empty when none.
std::string extract_snippet(std::string_view text);

}  // namespace llmpddl::pddl
