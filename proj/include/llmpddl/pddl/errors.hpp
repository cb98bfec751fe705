#pragma once

#include <stdexcept>
#include <string>

namespace llmpddl::pddl {

struct SourcePos {
  int line = 0;
  int column = 0;
};

class PddlError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SyntaxError : public PddlError {
 public:
  SyntaxError(const std::string& message, SourcePos pos, std::string token);
  SourcePos pos() const { return pos_; }
  const std::string& token() const { return token_; }
  const std::string& detail() const { return detail_; }

 private:
  SourcePos pos_;
  std::string token_;
  std::string detail_;
};

// A keyword outside the supported STRIPS subset. what() is the
// unsupported-keyword feedback sentence.
class UnsupportedFeature : public PddlError {
 public:
  explicit UnsupportedFeature(std::string keyword);
  const std::string& keyword() const { return keyword_; }

 private:
  std::string keyword_;
};

// Structurally valid text whose model violates an invariant (cyclic types,
// undeclared variables, duplicate names).
class ModelError : public PddlError {
 public:
  using PddlError::PddlError;
};

class UnknownType : public PddlError {
 public:
  explicit UnknownType(std::string type);
  const std::string& type() const { return type_; }

 private:
  std::string type_;
};

class UnknownPredicate : public PddlError {
 public:
  explicit UnknownPredicate(std::string predicate);
  const std::string& predicate() const { return predicate_; }

 private:
  std::string predicate_;
};

class UnknownObject : public PddlError {
 public:
  explicit UnknownObject(std::string object);
  const std::string& object() const { return object_; }

 private:
  std::string object_;
};

class TypeMismatch : public PddlError {
 public:
  using PddlError::PddlError;
};

class ArityMismatch : public PddlError {
 public:
  using PddlError::PddlError;
};

}  // namespace llmpddl::pddl
