#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "llmpddl/pddl/errors.hpp"

namespace llmpddl::pddl {

// S-expression node. Atoms keep their raw spelling; callers normalize.
struct SExpr {
  bool is_list = false;
  std::string atom;
  std::vector<SExpr> items;
  SourcePos pos;
  // `;` comment that follows this node on the same line, without the `;`
  // and trimmed. Used for predicate descriptions and action provenance.
  std::string trailing_comment;

  bool is_atom() const { return !is_list; }
  // Atom equal (case-insensitively) to `text`.
  bool is(std::string_view text) const;
  // List whose first item is an atom equal to `head`.
  bool has_head(std::string_view head) const;
  std::string to_string() const;
};

// Reads every top-level expression of `text`. Throws SyntaxError.
std::vector<SExpr> read_sexprs(std::string_view text);
// Reads exactly one expression; trailing non-comment content is an error.
SExpr read_sexpr(std::string_view text);

}  // namespace llmpddl::pddl
