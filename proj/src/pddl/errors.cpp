#include "llmpddl/pddl/errors.hpp"

#include "llmpddl/resources.hpp"

namespace llmpddl::pddl {

namespace {

std::string describe(const std::string& message, SourcePos pos, const std::string& token) {
  std::string out = "line " + std::to_string(pos.line) + ", column " + std::to_string(pos.column) +
                    ": " + message;
  if (!token.empty()) out += " (at '" + token + "')";
  return out;
}

}  // namespace

SyntaxError::SyntaxError(const std::string& message, SourcePos pos, std::string token)
    : PddlError(describe(message, pos, token)), pos_(pos), token_(std::move(token)), detail_(message) {}

UnsupportedFeature::UnsupportedFeature(std::string keyword)
    : PddlError([&] {
        std::string text = resources::builtin_template("feedback_unsupported_keyword");
        const std::string slot = "{{keyword}}";
        if (auto at = text.find(slot); at != std::string::npos) text.replace(at, slot.size(), keyword);
        return text;
      }()),
      keyword_(std::move(keyword)) {}

UnknownType::UnknownType(std::string type)
    : PddlError("unknown type '" + type + "'"), type_(std::move(type)) {}

UnknownPredicate::UnknownPredicate(std::string predicate)
    : PddlError("unknown predicate '" + predicate + "'"), predicate_(std::move(predicate)) {}

UnknownObject::UnknownObject(std::string object)
    : PddlError("undeclared object '" + object + "'"), object_(std::move(object)) {}

}  // namespace llmpddl::pddl
