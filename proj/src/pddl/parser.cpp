#include "llmpddl/pddl/parser.hpp"

#include <algorithm>
#include <array>
#include <set>

namespace llmpddl::pddl {

namespace {

constexpr std::array kUnsupportedKeywords = {
    "forall", "exists", "when", "imply", "oneof", "or", "increase", "decrease", "assign", "either",
};

constexpr std::array kSupportedRequirements = {
    ":strips",
    ":typing",
    ":negative-preconditions",
    ":equality",
};

[[noreturn]] void fail(const std::string& message, const SExpr& at) {
  throw SyntaxError(message, at.pos, at.is_list ? at.to_string() : at.atom);
}

const SExpr& expect_list(const SExpr& expr, const std::string& what) {
  if (!expr.is_list) fail("expected " + what, expr);
  return expr;
}

const std::string& expect_atom(const SExpr& expr, const std::string& what) {
  if (expr.is_list) fail("expected " + what, expr);
  return expr.atom;
}

bool is_variable(std::string_view name) { return !name.empty() && name.front() == '?'; }

Atom read_atom(const SExpr& expr) {
  expect_list(expr, "a predicate");
  if (expr.items.empty()) fail("empty predicate", expr);
  Atom atom;
  atom.predicate = normalize_symbol(expect_atom(expr.items.front(), "a predicate name"));
  for (std::size_t i = 1; i < expr.items.size(); ++i) {
    atom.args.push_back(to_lower(expect_atom(expr.items[i], "a term")));
  }
  return atom;
}

Equality read_equality(const SExpr& expr, bool negated) {
  if (expr.items.size() != 3) fail("'=' takes exactly two terms", expr);
  return {to_lower(expect_atom(expr.items[1], "a term")), to_lower(expect_atom(expr.items[2], "a term")),
          negated};
}

// Returns true when `expr` is an unsupported construct that was recorded.
bool check_unsupported(const SExpr& expr, std::string_view section,
                       std::vector<UnsupportedUse>* unsupported) {
  if (!expr.is_list || expr.items.empty() || expr.items.front().is_list) return false;
  std::string head = to_lower(expr.items.front().atom);
  if (!is_unsupported_keyword(head)) return false;
  if (!unsupported) throw UnsupportedFeature(head);
  unsupported->push_back({head, std::string(section), expr.to_string(), {}});
  return true;
}

void read_conjunction(const SExpr& expr, std::string_view section, Conjunction& out,
                      std::vector<UnsupportedUse>* unsupported) {
  expect_list(expr, "a formula");
  if (expr.items.empty()) return;
  if (check_unsupported(expr, section, unsupported)) return;
  if (expr.has_head("and")) {
    for (std::size_t i = 1; i < expr.items.size(); ++i) {
      read_conjunction(expr.items[i], section, out, unsupported);
    }
    return;
  }
  if (expr.has_head("not")) {
    if (expr.items.size() != 2) fail("'not' takes exactly one formula", expr);
    const SExpr& inner = expect_list(expr.items[1], "a formula under 'not'");
    if (check_unsupported(inner, section, unsupported)) return;
    if (inner.has_head("=")) {
      out.equalities.push_back(read_equality(inner, true));
      return;
    }
    if (inner.has_head("not") || inner.has_head("and")) fail("only literals may be negated", expr);
    out.literals.push_back({false, read_atom(inner)});
    return;
  }
  if (expr.has_head("=")) {
    out.equalities.push_back(read_equality(expr, false));
    return;
  }
  out.literals.push_back({true, read_atom(expr)});
}

const SExpr* find_section(const SExpr& root, std::string_view keyword) {
  for (const auto& item : root.items) {
    if (item.has_head(keyword)) return &item;
  }
  return nullptr;
}

void check_variables(const ActionModel& action) {
  auto check = [&](const std::string& term) {
    if (is_variable(term) && !action.find_param(term)) {
      throw ModelError("action '" + action.name + "' uses undeclared variable " + term);
    }
    if (!is_variable(term)) {
      throw ModelError("action '" + action.name + "' uses constant '" + term +
                       "'; only parameters may appear in action models");
    }
  };
  for (const auto& lit : action.precondition) std::for_each(lit.atom.args.begin(), lit.atom.args.end(), check);
  for (const auto& eq : action.constraints) {
    check(eq.lhs);
    check(eq.rhs);
  }
  for (const auto& atom : action.add_effects) std::for_each(atom.args.begin(), atom.args.end(), check);
  for (const auto& atom : action.del_effects) std::for_each(atom.args.begin(), atom.args.end(), check);
  std::set<std::string> seen;
  for (const auto& p : action.params) {
    if (!seen.insert(p.name).second) {
      throw ModelError("action '" + action.name + "' declares " + p.name + " twice");
    }
  }
}

std::string canonical_type(const TypeHierarchy& types, const std::string& raw) {
  if (auto c = types.canonical(raw)) return *c;
  return raw;
}

ActionModel read_action(const SExpr& expr, const TypeHierarchy& types,
                        std::vector<UnsupportedUse>* unsupported) {
  if (expr.items.size() < 2) fail("action without a name", expr);
  ActionModel action;
  const std::size_t first_unsupported = unsupported ? unsupported->size() : 0;
  const SExpr& name = expr.items[1];
  action.name = normalize_symbol(expect_atom(name, "an action name"));
  const std::string provenance_tag = "provenance:";
  if (name.trailing_comment.rfind(provenance_tag, 0) == 0) {
    std::string value = name.trailing_comment.substr(provenance_tag.size());
    value.erase(0, value.find_first_not_of(' '));
    action.provenance = value;
  }
  for (std::size_t i = 2; i < expr.items.size(); i += 2) {
    const SExpr& key = expr.items[i];
    if (i + 1 >= expr.items.size()) fail("missing value for action field", key);
    const SExpr& value = expr.items[i + 1];
    if (key.is(":parameters")) {
      expect_list(value, "a parameter list");
      action.params = parse_typed_list(value.items, 0, true);
      for (auto& p : action.params) p.type = canonical_type(types, p.type);
    } else if (key.is(":precondition")) {
      Conjunction c = parse_conjunction(value, "precondition", unsupported);
      action.precondition = std::move(c.literals);
      action.constraints = std::move(c.equalities);
    } else if (key.is(":effect")) {
      EffectLists e = parse_effects(value, unsupported);
      action.add_effects = std::move(e.add);
      action.del_effects = std::move(e.del);
    } else if (key.is(":duration") || key.is(":condition")) {
      throw UnsupportedFeature(to_lower(key.atom));
    } else {
      fail("unknown action field", key);
    }
  }
  check_variables(action);
  if (unsupported) {
    for (std::size_t i = first_unsupported; i < unsupported->size(); ++i) (*unsupported)[i].action = action.name;
  }
  return action;
}

void check_literal_usage(const DomainModel& domain, const ActionModel& action, const Atom& atom) {
  const PredicateDef* pred = domain.find_predicate(atom.predicate);
  if (!pred) throw UnknownPredicate(atom.predicate);
  if (pred->params.size() != atom.args.size()) {
    throw ArityMismatch("predicate '" + atom.predicate + "' takes " + std::to_string(pred->params.size()) +
                        " argument(s) but " + std::to_string(atom.args.size()) + " were given in action '" +
                        action.name + "'");
  }
  for (std::size_t i = 0; i < atom.args.size(); ++i) {
    const TypedName* param = action.find_param(atom.args[i]);
    if (!domain.types.is_subtype(param->type, pred->params[i].type)) {
      throw TypeMismatch("argument " + std::to_string(i + 1) + " of '" + atom.predicate + "' in action '" +
                         action.name + "' should be " + pred->params[i].type + " but " + param->name +
                         " is " + param->type);
    }
  }
}

}  // namespace

bool is_unsupported_keyword(std::string_view word) {
  return std::any_of(kUnsupportedKeywords.begin(), kUnsupportedKeywords.end(),
                     [&](const char* k) { return iequals(word, k); });
}

std::vector<TypedName> parse_typed_list(const std::vector<SExpr>& items, std::size_t first, bool variables) {
  std::vector<TypedName> out;
  std::size_t pending_from = 0;
  for (std::size_t i = first; i < items.size(); ++i) {
    const SExpr& item = items[i];
    if (item.is("-")) {
      if (i + 1 >= items.size()) fail("missing type after '-'", item);
      const SExpr& type = items[i + 1];
      if (type.has_head("either")) throw UnsupportedFeature("either");
      const std::string& type_name = expect_atom(type, "a type name");
      if (pending_from == out.size()) fail("type without names", item);
      for (std::size_t j = pending_from; j < out.size(); ++j) out[j].type = type_name;
      pending_from = out.size();
      ++i;
      continue;
    }
    const std::string& name = expect_atom(item, variables ? "a variable" : "a name");
    if (variables && !is_variable(name)) fail("expected a variable starting with '?'", item);
    out.push_back({variables ? to_lower(name) : name, std::string(kRootType)});
  }
  return out;
}

Conjunction parse_conjunction(const SExpr& expr, std::string_view section,
                              std::vector<UnsupportedUse>* unsupported) {
  Conjunction out;
  read_conjunction(expr, section, out, unsupported);
  return out;
}

EffectLists parse_effects(const SExpr& expr, std::vector<UnsupportedUse>* unsupported) {
  Conjunction c = parse_conjunction(expr, "effect", unsupported);
  if (!c.equalities.empty()) fail("equality cannot be an effect", expr);
  EffectLists out;
  for (auto& lit : c.literals) (lit.positive ? out.add : out.del).push_back(std::move(lit.atom));
  return out;
}

DomainModel parse_domain(std::string_view text, const ParseOptions& options) {
  auto roots = read_sexprs(text);
  if (roots.size() != 1) {
    throw SyntaxError("expected exactly one (define (domain ...)) form", roots.empty() ? SourcePos{1, 1} : roots[1].pos,
                      "");
  }
  return parse_domain(roots.front(), options);
}

DomainModel parse_domain(const SExpr& root, const ParseOptions& options, std::vector<UnsupportedUse>* unsupported) {
  if (!root.has_head("define") || root.items.size() < 2 || !root.items[1].has_head("domain") ||
      root.items[1].items.size() != 2) {
    fail("expected (define (domain <name>) ...)", root);
  }
  DomainModel domain;
  domain.name = to_lower(expect_atom(root.items[1].items[1], "a domain name"));

  if (const SExpr* reqs = find_section(root, ":requirements")) {
    for (std::size_t i = 1; i < reqs->items.size(); ++i) {
      std::string req = to_lower(expect_atom(reqs->items[i], "a requirement"));
      if (std::find(kSupportedRequirements.begin(), kSupportedRequirements.end(), req) ==
          kSupportedRequirements.end()) {
        throw UnsupportedFeature(req);
      }
    }
  }
  if (const SExpr* types = find_section(root, ":types")) {
    std::vector<std::pair<std::string, std::string>> decls;
    for (auto& t : parse_typed_list(types->items, 1, false)) decls.emplace_back(t.name, t.type);
    domain.types = TypeHierarchy::from_declarations(decls);
  }
  if (const SExpr* preds = find_section(root, ":predicates")) {
    for (std::size_t i = 1; i < preds->items.size(); ++i) {
      const SExpr& decl = expect_list(preds->items[i], "a predicate declaration");
      if (decl.items.empty()) fail("empty predicate declaration", decl);
      PredicateDef def;
      def.name = normalize_symbol(expect_atom(decl.items.front(), "a predicate name"));
      def.params = parse_typed_list(decl.items, 1, true);
      for (auto& p : def.params) p.type = canonical_type(domain.types, p.type);
      def.description = decl.trailing_comment;
      domain.predicates.push_back(std::move(def));
    }
  }
  for (std::size_t i = 2; i < root.items.size(); ++i) {
    const SExpr& section = expect_list(root.items[i], "a domain section");
    if (section.items.empty()) fail("empty domain section", section);
    const SExpr& head = section.items.front();
    if (head.is(":requirements") || head.is(":types") || head.is(":predicates")) continue;
    if (head.is(":action")) {
      ActionModel action = read_action(section, domain.types, unsupported);
      if (domain.find_action(action.name)) throw ModelError("duplicate action '" + action.name + "'");
      domain.actions.push_back(std::move(action));
      continue;
    }
    if (head.is(":constants") || head.is(":functions") || head.is(":derived") || head.is(":durative-action") ||
        head.is(":constraints")) {
      throw UnsupportedFeature(to_lower(head.atom));
    }
    fail("unknown domain section", head);
  }
  if (options.check_types) check_domain(domain);
  return domain;
}

void check_domain(const DomainModel& domain) {
  std::set<std::string> names;
  for (const auto& pred : domain.predicates) {
    if (!names.insert(pred.name).second) throw ModelError("duplicate predicate '" + pred.name + "'");
    if (domain.types.contains(pred.name)) {
      throw ModelError("predicate '" + pred.name + "' has the same name as a type");
    }
    for (const auto& p : pred.params) {
      if (!domain.types.contains(p.type)) throw UnknownType(p.type);
    }
  }
  for (const auto& action : domain.actions) {
    for (const auto& p : action.params) {
      if (!domain.types.contains(p.type)) throw UnknownType(p.type);
    }
    for (const auto& lit : action.precondition) check_literal_usage(domain, action, lit.atom);
    for (const auto& atom : action.add_effects) check_literal_usage(domain, action, atom);
    for (const auto& atom : action.del_effects) check_literal_usage(domain, action, atom);
  }
}

std::vector<Literal> parse_goal(const SExpr& expr, const DomainModel& domain, const std::vector<TypedName>& objects) {
  Conjunction c = parse_conjunction(expr, "goal");
  if (!c.equalities.empty()) fail("equality is not allowed in goals", expr);
  auto find_object = [&](const std::string& name) -> const TypedName* {
    auto it = std::find_if(objects.begin(), objects.end(), [&](const TypedName& o) { return o.name == name; });
    return it == objects.end() ? nullptr : &*it;
  };
  for (const auto& lit : c.literals) {
    const PredicateDef* pred = domain.find_predicate(lit.atom.predicate);
    if (!pred) throw UnknownPredicate(lit.atom.predicate);
    if (pred->params.size() != lit.atom.args.size()) {
      throw ArityMismatch("predicate '" + pred->name + "' takes " + std::to_string(pred->params.size()) +
                          " argument(s) but " + std::to_string(lit.atom.args.size()) + " were given");
    }
    for (std::size_t i = 0; i < lit.atom.args.size(); ++i) {
      const std::string& arg = lit.atom.args[i];
      if (is_variable(arg)) fail("goals must be ground", expr);
      const TypedName* obj = find_object(arg);
      if (!obj) throw UnknownObject(arg);
      if (!domain.types.is_subtype(obj->type, pred->params[i].type)) {
        throw TypeMismatch("object '" + arg + "' of type " + obj->type + " used where " + pred->params[i].type +
                           " is required in " + to_string(lit.atom));
      }
    }
  }
  return c.literals;
}

ProblemSpec parse_problem(std::string_view text, const DomainModel& domain) {
  auto roots = read_sexprs(text);
  if (roots.size() != 1) throw SyntaxError("expected exactly one (define (problem ...)) form", SourcePos{1, 1}, "");
  const SExpr& root = roots.front();
  if (!root.has_head("define") || root.items.size() < 2 || !root.items[1].has_head("problem") ||
      root.items[1].items.size() != 2) {
    fail("expected (define (problem <name>) ...)", root);
  }
  ProblemSpec problem;
  problem.name = to_lower(expect_atom(root.items[1].items[1], "a problem name"));
  problem.domain = domain.name;
  bool has_goal = false;
  for (std::size_t i = 2; i < root.items.size(); ++i) {
    const SExpr& section = expect_list(root.items[i], "a problem section");
    if (section.items.empty()) fail("empty problem section", section);
    const SExpr& head = section.items.front();
    if (head.is(":domain")) {
      if (section.items.size() != 2) fail("expected (:domain <name>)", section);
      std::string name = to_lower(expect_atom(section.items[1], "a domain name"));
      if (name != domain.name) {
        throw ModelError("problem refers to domain '" + name + "' but domain '" + domain.name + "' was given");
      }
    } else if (head.is(":requirements")) {
      continue;
    } else if (head.is(":objects")) {
      for (auto& obj : parse_typed_list(section.items, 1, false)) {
        obj.name = to_lower(obj.name);
        auto type = domain.types.canonical(obj.type);
        if (!type) throw UnknownType(obj.type);
        obj.type = *type;
        if (problem.find_object(obj.name)) throw ModelError("object '" + obj.name + "' declared twice");
        problem.objects.push_back(std::move(obj));
      }
    } else if (head.is(":init")) {
      for (std::size_t j = 1; j < section.items.size(); ++j) {
        const SExpr& fact = section.items[j];
        if (fact.has_head("not")) fail("negative facts are implicit in the initial state", fact);
        if (fact.has_head("=")) throw UnsupportedFeature("=");
        Atom atom = read_atom(fact);
        const PredicateDef* pred = domain.find_predicate(atom.predicate);
        if (!pred) throw UnknownPredicate(atom.predicate);
        if (pred->params.size() != atom.args.size()) {
          throw ArityMismatch("predicate '" + pred->name + "' takes " + std::to_string(pred->params.size()) +
                              " argument(s) but " + std::to_string(atom.args.size()) + " were given");
        }
        for (std::size_t k = 0; k < atom.args.size(); ++k) {
          const TypedName* obj = problem.find_object(atom.args[k]);
          if (!obj) throw UnknownObject(atom.args[k]);
          if (!domain.types.is_subtype(obj->type, pred->params[k].type)) {
            throw TypeMismatch("object '" + obj->name + "' of type " + obj->type + " used where " +
                               pred->params[k].type + " is required in " + to_string(atom));
          }
        }
        problem.init.push_back(std::move(atom));
      }
    } else if (head.is(":goal")) {
      if (section.items.size() != 2) fail("expected (:goal <formula>)", section);
      has_goal = true;
      // Objects may follow the goal section in sloppy files; resolve at the end.
      continue;
    } else if (head.is(":metric") || head.is(":constraints")) {
      throw UnsupportedFeature(to_lower(head.atom));
    } else {
      fail("unknown problem section", head);
    }
  }
  if (has_goal) problem.goal = parse_goal(find_section(root, ":goal")->items[1], domain, problem.objects);
  return problem;
}

Plan parse_plan(std::string_view text) {
  Plan plan;
  std::size_t line_start = 0;
  while (line_start <= text.size()) {
    std::size_t line_end = text.find('\n', line_start);
    if (line_end == std::string_view::npos) line_end = text.size();
    std::string_view line = text.substr(line_start, line_end - line_start);
    if (auto semi = line.find(';'); semi != std::string_view::npos) line = line.substr(0, semi);
    if (auto open = line.find('('); open != std::string_view::npos) {
      auto close = line.rfind(')');
      if (close == std::string_view::npos || close < open) {
        throw SyntaxError("unbalanced plan step", SourcePos{0, 0}, std::string(line));
      }
      SExpr step = read_sexpr(line.substr(open, close - open + 1));
      Atom atom = read_atom(step);
      plan.steps.push_back({atom.predicate, atom.args});
    }
    line_start = line_end + 1;
  }
  return plan;
}

}  // namespace llmpddl::pddl
