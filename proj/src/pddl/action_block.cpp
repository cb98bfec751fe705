#include "llmpddl/pddl/action_block.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>
#include <sstream>

namespace llmpddl::pddl {

MissingSection::MissingSection(std::string section)
    : PddlError("the reply has no '" + section + ":' section"), section_(std::move(section)) {}

SnippetSyntaxError::SnippetSyntaxError(std::string section, const std::string& detail)
    : PddlError("syntax error in the " + section + " section: " + detail), section_(std::move(section)) {}

namespace {

enum class Section { Parameters, Preconditions, Effects, NewPredicates };

constexpr std::array kSectionNames = {"Parameters", "Preconditions", "Effects", "New Predicates"};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Strips markdown decoration around a line: "## **Effects:**" -> "Effects:".
std::string_view strip_markdown(std::string_view s) {
  s = trim(s);
  while (!s.empty() && (s.front() == '#' || s.front() == '*' || s.front() == '_')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == '*' || s.back() == '_')) s.remove_suffix(1);
  return trim(s);
}

// Returns the section a header line opens and the content after the colon.
std::optional<std::pair<Section, std::string>> match_header(std::string_view line) {
  static const std::array<std::pair<std::string_view, Section>, 8> keys = {{
      {"new predicates", Section::NewPredicates},
      {"new predicate", Section::NewPredicates},
      {"preconditions", Section::Preconditions},
      {"precondition", Section::Preconditions},
      {"parameters", Section::Parameters},
      {"parameter", Section::Parameters},
      {"effects", Section::Effects},
      {"effect", Section::Effects},
  }};
  std::string_view s = strip_markdown(line);
  std::string lower = to_lower(s);
  for (const auto& [key, section] : keys) {
    if (lower.rfind(key, 0) != 0) continue;
    std::string_view rest = s.substr(key.size());
    // Allow markdown closing the bold before the colon: "**Effects**:".
    while (!rest.empty() && (rest.front() == '*' || rest.front() == '_')) rest.remove_prefix(1);
    if (rest.empty()) return std::make_pair(section, std::string());
    if (rest.front() != ':') return std::nullopt;
    rest.remove_prefix(1);
    while (!rest.empty() && (rest.front() == '*' || rest.front() == '_')) rest.remove_prefix(1);
    return std::make_pair(section, std::string(trim(rest)));
  }
  return std::nullopt;
}

struct Sections {
  std::string preamble;
  std::array<std::optional<std::string>, 4> body;
};

Sections split_sections(std::string_view text) {
  Sections out;
  std::string* current = &out.preamble;
  bool in_fence = false;
  std::istringstream lines{std::string(text)};
  std::string line;
  while (std::getline(lines, line)) {
    if (trim(line).rfind("```", 0) == 0) in_fence = !in_fence;
    if (!in_fence) {
      if (auto header = match_header(line)) {
        auto& slot = out.body[static_cast<std::size_t>(header->first)];
        // A repeated header continues the first occurrence.
        if (!slot) slot = std::string();
        current = &*slot;
        if (!header->second.empty()) *current += header->second + "\n";
        continue;
      }
    }
    *current += line;
    *current += '\n';
  }
  return out;
}

bool is_none(std::string_view body) {
  std::string_view s = strip_markdown(body);
  while (!s.empty() && (s.back() == '.')) s.remove_suffix(1);
  return s.empty() || iequals(s, "none") || iequals(s, "no new predicates") || iequals(s, "(none)");
}

// "1. ?x ?y - block: note" -> typed names and the note.
std::optional<std::pair<std::vector<TypedName>, std::string>> parse_param_line(std::string_view line) {
  std::string_view s = trim(line);
  std::size_t i = 0;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  if (i > 0 && i < s.size() && (s[i] == '.' || s[i] == ')')) s.remove_prefix(i + 1);
  s = trim(s);
  while (!s.empty() && (s.front() == '-' || s.front() == '*' || s.front() == '`')) s = trim(s.substr(1));
  if (s.empty() || s.front() != '?') return std::nullopt;
  std::string_view decl = s;
  std::string note;
  if (auto colon = s.find(':'); colon != std::string_view::npos) {
    decl = s.substr(0, colon);
    note = std::string(trim(s.substr(colon + 1)));
  }
  std::vector<SExpr> tokens;
  std::istringstream words{std::string(decl)};
  std::string word;
  while (words >> word) {
    while (!word.empty() && word.back() == '`') word.pop_back();
    if (word.empty()) continue;
    SExpr atom;
    atom.atom = word;
    tokens.push_back(std::move(atom));
  }
  return std::make_pair(parse_typed_list(tokens, 0, true), note);
}

std::string section_snippet(const std::string& body, std::string_view section, bool strict) {
  std::string snippet = extract_snippet(body);
  if (strict && body.find("```") == std::string::npos && !is_none(body)) {
    throw SnippetSyntaxError(std::string(section), "expected a fenced code block");
  }
  if (snippet.empty() && !is_none(body)) {
    throw SnippetSyntaxError(std::string(section), "no PDDL expression found");
  }
  return snippet;
}

SExpr read_snippet(const std::string& snippet, std::string_view section) {
  try {
    return read_sexpr(snippet);
  } catch (const SyntaxError& e) {
    throw SnippetSyntaxError(std::string(section), e.what());
  }
}

void check_terms(const ActionBlock& block, const std::vector<std::string>& args, std::string_view section) {
  for (const auto& term : args) {
    if (term.empty() || term.front() != '?') {
      throw SnippetSyntaxError(std::string(section),
                               "'" + term + "' is not a parameter; use variables listed under Parameters");
    }
    bool declared = std::any_of(block.params.begin(), block.params.end(),
                                [&](const TypedName& p) { return p.name == term; });
    if (!declared) {
      throw SnippetSyntaxError(std::string(section), "variable " + term + " is not listed under Parameters");
    }
  }
}

}  // namespace

std::string extract_snippet(std::string_view text) {
  if (auto fence = text.find("```"); fence != std::string_view::npos) {
    std::size_t start = text.find('\n', fence);
    if (start == std::string_view::npos) return {};
    ++start;
    std::size_t end = text.find("```", start);
    if (end == std::string_view::npos) end = text.size();
    return std::string(trim(text.substr(start, end - start)));
  }
  std::size_t open = text.find('(');
  if (open == std::string_view::npos) return {};
  int depth = 0;
  bool comment = false;
  for (std::size_t i = open; i < text.size(); ++i) {
    char c = text[i];
    if (comment) {
      if (c == '\n') comment = false;
      continue;
    }
    if (c == ';') comment = true;
    if (c == '(') ++depth;
    if (c == ')' && --depth == 0) return std::string(text.substr(open, i - open + 1));
  }
  // Unbalanced: hand back the rest so the reader reports the position.
  return std::string(text.substr(open));
}

std::string print_action_block(const ActionModel& model, const std::vector<PredicateDef>& new_predicates,
                               const std::vector<std::string>& param_notes) {
  std::ostringstream out;
  out << "Parameters:\n";
  for (std::size_t i = 0; i < model.params.size(); ++i) {
    out << i + 1 << ". " << model.params[i].name << " - " << model.params[i].type;
    if (i < param_notes.size() && !param_notes[i].empty()) out << ": " << param_notes[i];
    out << '\n';
  }
  auto block = [&](const char* header, const std::vector<std::string>& items) {
    out << '\n' << header << ":\n```\n(and\n";
    for (const auto& item : items) out << "    " << item << '\n';
    out << ")\n```\n";
  };
  std::vector<std::string> pre;
  for (const auto& l : model.precondition) pre.push_back(to_string(l));
  for (const auto& e : model.constraints) pre.push_back(to_string(e));
  block("Preconditions", pre);
  std::vector<std::string> eff;
  for (const auto& a : model.add_effects) eff.push_back(to_string(a));
  for (const auto& a : model.del_effects) eff.push_back("(not " + to_string(a) + ")");
  block("Effects", eff);
  out << "\nNew Predicates:\n";
  if (new_predicates.empty()) out << "None\n";
  for (std::size_t i = 0; i < new_predicates.size(); ++i) {
    out << i + 1 << ". " << signature(new_predicates[i]) << ": " << new_predicates[i].description << '\n';
  }
  return out.str();
}

ActionModel ActionBlock::to_model(std::string name, std::string provenance) const {
  ActionModel model;
  model.name = normalize_symbol(name);
  model.params = params;
  model.precondition = precondition;
  model.constraints = constraints;
  model.add_effects = add_effects;
  model.del_effects = del_effects;
  model.provenance = std::move(provenance);
  return model;
}

ActionBlock parse_action_block(std::string_view text, const ActionBlockOptions& options) {
  Sections sections = split_sections(text);
  auto body = [&](Section s) -> const std::optional<std::string>& {
    return sections.body[static_cast<std::size_t>(s)];
  };
  for (Section s : {Section::Preconditions, Section::Effects, Section::NewPredicates}) {
    if (!body(s)) throw MissingSection(kSectionNames[static_cast<std::size_t>(s)]);
  }
  ActionBlock block;

  // The construction prompt ends with "Parameters:", so replies often start
  // directly with the parameter list.
  const std::string& params_text = body(Section::Parameters) ? *body(Section::Parameters) : sections.preamble;
  std::istringstream params_lines{params_text};
  std::string line;
  while (std::getline(params_lines, line)) {
    try {
      if (auto parsed = parse_param_line(line)) {
        for (auto& p : parsed->first) {
          block.params.push_back(std::move(p));
          block.param_notes.push_back(parsed->second);
        }
      }
    } catch (const SyntaxError& e) {
      throw SnippetSyntaxError("Parameters", e.what());
    }
  }
  for (std::size_t i = 0; i < block.params.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (block.params[i].name == block.params[j].name) {
        throw SnippetSyntaxError("Parameters", "variable " + block.params[i].name + " is listed twice");
      }
    }
  }

  std::string pre = section_snippet(*body(Section::Preconditions), "Preconditions", options.strict);
  if (!pre.empty()) {
    try {
      Conjunction c = parse_conjunction(read_snippet(pre, "Preconditions"), "precondition", &block.unsupported);
      block.precondition = std::move(c.literals);
      block.constraints = std::move(c.equalities);
    } catch (const SyntaxError& e) {
      throw SnippetSyntaxError("Preconditions", e.what());
    }
  }
  for (const auto& l : block.precondition) check_terms(block, l.atom.args, "Preconditions");
  for (const auto& e : block.constraints) check_terms(block, {e.lhs, e.rhs}, "Preconditions");

  std::string eff = section_snippet(*body(Section::Effects), "Effects", options.strict);
  if (!eff.empty()) {
    try {
      EffectLists e = parse_effects(read_snippet(eff, "Effects"), &block.unsupported);
      block.add_effects = std::move(e.add);
      block.del_effects = std::move(e.del);
    } catch (const SyntaxError& e) {
      throw SnippetSyntaxError("Effects", e.what());
    }
  }
  for (const auto& a : block.add_effects) check_terms(block, a.args, "Effects");
  for (const auto& a : block.del_effects) check_terms(block, a.args, "Effects");

  const std::string& preds = *body(Section::NewPredicates);
  if (!is_none(preds)) {
    std::istringstream pred_lines{preds};
    while (std::getline(pred_lines, line)) {
      auto open = line.find('(');
      if (open == std::string::npos || line.find("```") != std::string::npos) continue;
      std::string sig = extract_snippet(std::string_view(line).substr(open));
      SExpr decl = read_snippet(sig, "New Predicates");
      if (!decl.is_list || decl.items.empty() || decl.items.front().is_list) {
        throw SnippetSyntaxError("New Predicates", "expected (name ?x - type ...) in '" + line + "'");
      }
      PredicateDef def;
      def.name = normalize_symbol(decl.items.front().atom);
      try {
        def.params = parse_typed_list(decl.items, 1, true);
      } catch (const SyntaxError& e) {
        throw SnippetSyntaxError("New Predicates", e.what());
      }
      std::string_view rest = trim(std::string_view(line).substr(open + sig.size()));
      while (!rest.empty() && (rest.front() == ':' || rest.front() == '-' || rest.front() == '`')) {
        rest = trim(rest.substr(1));
      }
      if (rest.empty()) {
        throw SnippetSyntaxError("New Predicates", "predicate '" + def.name + "' has no description");
      }
      def.description = std::string(rest);
      block.new_predicates.push_back(std::move(def));
    }
  }
  return block;
}

}  // namespace llmpddl::pddl
