#include <cctype>
#include <regex>
#include <sstream>

#include "llmpddl/correction/correction.hpp"
#include "llmpddl/orchestrator/orchestrator.hpp"
#include "llmpddl/pddl/action_block.hpp"
#include "llmpddl/pddl/errors.hpp"
#include "llmpddl/pddl/sexpr.hpp"
#include "internal.hpp"

namespace llmpddl::orchestrator {

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

// One unmet condition as a clause, via the predicate descriptions when
// they are available.
std::string clause(const std::string& text, const builder::PredicateRegistry& reg) {
  pddl::SExpr e;
  try {
    e = pddl::read_sexpr(text);
  } catch (const pddl::PddlError&) {
    return text;
  }
  bool negated = e.has_head("not") && e.items.size() == 2;
  const pddl::SExpr& inner = negated ? e.items[1] : e;
  if (!inner.is_list || inner.items.empty() || !inner.items[0].is_atom()) return text;
  std::vector<std::string> args;
  for (std::size_t i = 1; i < inner.items.size(); ++i) {
    if (!inner.items[i].is_atom()) return text;
    args.push_back(inner.items[i].atom);
  }
  if (inner.items[0].atom == "=" && args.size() == 2) {
    return args[0] + " and " + args[1] + (negated ? " must be different" : " must be the same");
  }
  std::string c;
  try {
    c = correction::describe({inner.items[0].atom, args}, reg);
  } catch (const correction::MissingDescription&) {
    c = pddl::to_string(pddl::Atom{inner.items[0].atom, args});
  }
  return negated ? "it is not the case that " + c : c;
}

std::string items(const std::vector<std::string>& unmet, const builder::PredicateRegistry& reg, bool raw) {
  std::string out;
  for (const auto& u : unmet) out += "- " + (raw ? u : clause(u, reg)) + "\n";
  return out;
}

}  // namespace

std::string translate_validation_feedback(const engine::ValidationReport& report, const builder::PredicateRegistry& reg,
                                          const llm::TemplateSet& templates) {
  if (report.valid) return "";
  std::vector<std::string> parts;
  for (const auto& f : report.failures) {
    std::string step = std::to_string(f.step);
    switch (f.kind) {
      case engine::FailureKind::UnmetPrecondition:
        parts.push_back(templates.render("validation_unmet_precondition", {{"step", step}, {"items", items(f.unmet, reg, false)}}));
        break;
      case engine::FailureKind::UnmetGoal:
        parts.push_back(templates.render("validation_unmet_goal", {{"steps", step}, {"items", items(f.unmet, reg, false)}}));
        break;
      case engine::FailureKind::InvalidParameter:
        parts.push_back(templates.render("validation_invalid_parameter", {{"step", step}, {"items", items(f.unmet, reg, true)}}));
        break;
    }
  }
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty() && out.back() != '\n') out += "\n";
    out += p;
  }
  while (!out.empty() && out.back() == '\n') out.pop_back();
  return out;
}

std::string polish_feedback(const std::string& feedback, const builder::PredicateRegistry& reg, Gateway& gateway) {
  llm::Conversation conv{detail::fresh_id(gateway.store, "feedback-polish"), {"feedback-polish"}, {}};
  conv.add(llm::Role::User,
           gateway.templates.render("validation_to_nl", {{"predicate_list", reg.render_for_prompt()}, {"feedback", feedback}}));
  std::string reply = trim(llm::complete(conv, gateway.transport).content);
  if (gateway.store) gateway.store->persist(conv);
  return reply.empty() ? feedback : reply;
}

namespace {

struct StepReader {
  const pddl::DomainModel& domain;
  const std::vector<pddl::TypedName>& objects;

  const pddl::ActionModel* action(const std::string& word) const { return domain.find_action(pddl::normalize_symbol(word)); }

  std::optional<std::string> object(const std::string& word, bool exact) const {
    for (const auto& o : objects) {
      if (o.name == word) return o.name;
    }
    if (exact) return std::nullopt;
    std::string low = pddl::to_lower(word);
    for (const auto& o : objects) {
      if (pddl::to_lower(o.name) == low) return o.name;
    }
    return std::nullopt;
  }

  std::optional<pddl::PlanStep> resolve(const pddl::ActionModel& a, const std::vector<std::string>& args, bool exact) const {
    if (args.size() != a.params.size()) return std::nullopt;
    pddl::PlanStep step{a.name, {}};
    for (const auto& w : args) {
      auto o = object(w, exact);
      if (!o) return std::nullopt;
      step.args.push_back(*o);
    }
    return step;
  }

  // "(action obj ...)" taken literally.
  std::optional<pddl::PlanStep> exact(const pddl::SExpr& e) const {
    if (!e.is_list || e.items.empty() || !e.items[0].is_atom()) return std::nullopt;
    const pddl::ActionModel* a = domain.find_action(e.items[0].atom);
    if (!a) return std::nullopt;
    std::vector<std::string> args;
    for (std::size_t i = 1; i < e.items.size(); ++i) {
      if (!e.items[i].is_atom()) return std::nullopt;
      args.push_back(e.items[i].atom);
    }
    return resolve(*a, args, true);
  }

  // Case, punctuation, spacing and articles are ignored; a multi-word
  // action name may be spelled with spaces.
  std::optional<pddl::PlanStep> fuzzy(const std::string& line) const {
    std::string cleaned;
    for (char c : line) {
      bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_';
      cleaned += keep ? c : ' ';
    }
    std::istringstream in(cleaned);
    std::vector<std::string> words;
    for (std::string w; in >> w;) words.push_back(w);
    for (std::size_t k = 1; k <= words.size() && k <= 4; ++k) {
      std::string name = words[0];
      for (std::size_t i = 1; i < k; ++i) name += "-" + words[i];
      const pddl::ActionModel* a = action(name);
      if (!a) continue;
      std::vector<std::string> args;
      for (std::size_t i = k; i < words.size(); ++i) {
        std::string low = pddl::to_lower(words[i]);
        bool article = low == "the" || low == "a" || low == "an";
        if (article && !object(words[i], false)) continue;
        args.push_back(words[i]);
      }
      if (auto s = resolve(*a, args, false)) return s;
    }
    return std::nullopt;
  }
};

// Drops list markers: "1.", "2)", "Step 3:", "-", "*".
std::string strip_marker(const std::string& line) {
  static const std::regex marker(R"(^\s*(?:(?:step\s*)?\d+\s*[.):]|[-*])\s*)", std::regex::icase);
  return trim(std::regex_replace(line, marker, "", std::regex_constants::format_first_only));
}

std::string action_list(const pddl::DomainModel& domain) {
  std::string out;
  for (const auto& a : domain.actions) {
    out += "(" + a.name;
    for (const auto& p : a.params) out += " " + p.name + " - " + p.type;
    out += ")\n";
  }
  return out;
}

}  // namespace

ActionTranslation translate_actions(const std::string& raw_plan, const pddl::DomainModel& domain,
                                    const std::vector<pddl::TypedName>& objects, Gateway* gateway) {
  ActionTranslation out;
  StepReader reader{domain, objects};
  pddl::Plan plan;
  std::istringstream in(raw_plan);
  std::size_t step_no = 0;
  auto invalid = [&](std::size_t n) {
    llm::TemplateSet defaults;
    const llm::TemplateSet& t = gateway ? gateway->templates : defaults;
    out.error = t.render("plan_invalid_output", {{"step", std::to_string(n)}});
    return out;
  };
  for (std::string raw; std::getline(in, raw);) {
    std::string line = trim(raw);
    if (line.empty() || line.starts_with(";") || line.starts_with("```")) continue;
    // Headings such as "Plan:".
    if (line.back() == ':' && line.find('(') == std::string::npos) continue;
    line = strip_marker(line);
    if (line.empty()) continue;
    ++step_no;

    std::optional<pddl::SExpr> expr;
    if (line.front() == '(') {
      try {
        expr = pddl::read_sexpr(line);
      } catch (const pddl::PddlError&) {
      }
    }
    if (expr) {
      if (auto s = reader.exact(*expr)) {
        plan.steps.push_back(*s);
        continue;
      }
    }
    if (auto s = reader.fuzzy(line)) {
      plan.steps.push_back(*s);
      continue;
    }
    // A well-formed step of a known action with missing or unknown
    // arguments cannot be repaired by rewording.
    if (expr && expr->is_list && !expr->items.empty() && expr->items[0].is_atom() &&
        reader.action(expr->items[0].atom)) {
      return invalid(step_no);
    }
    if (!gateway) return invalid(step_no);

    llm::Conversation conv{detail::fresh_id(gateway->store, "action-translation"), {"action-translation"}, {}};
    conv.add(llm::Role::User, gateway->templates.render("action_translation", {{"action_list", action_list(domain)},
                                                                                {"objects", render_objects(objects)},
                                                                                {"raw_action", line}}));
    std::string reply = trim(llm::complete(conv, gateway->transport).content);
    ++out.gateway_calls;
    if (gateway->store) gateway->store->persist(conv);
    std::optional<pddl::PlanStep> s;
    std::string snippet = pddl::extract_snippet(reply);
    if (!snippet.empty() && !pddl::to_lower(reply).starts_with("none")) {
      try {
        s = reader.exact(pddl::read_sexpr(snippet));
      } catch (const pddl::PddlError&) {
      }
    }
    if (!s) return invalid(step_no);
    plan.steps.push_back(*s);
  }
  out.plan = std::move(plan);
  return out;
}

}  // namespace llmpddl::orchestrator
